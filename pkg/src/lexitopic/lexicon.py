"""Bidirectional word lexicon composed from several two-column TSV sources."""

from __future__ import annotations

import enum
import logging
import unicodedata
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import InputError, ParameterError, RecordError

logger = logging.getLogger(__name__)

SourceSpec = Union[str, Path, "tuple[str, Union[str, Path]]"]

HEADER_PREFIX = "# sources:"


class Direction(enum.Enum):
    A_TO_B = "a2b"
    B_TO_A = "b2a"


def normalize_token(text: str) -> str:
    """NFC-normalize, lower-case and collapse internal whitespace."""
    text = unicodedata.normalize("NFC", text)
    return " ".join(text.lower().split())


@dataclass(frozen=True)
class TranslationPair:
    source_word: str
    target_word: str
    origin_tag: str = ""

    def __post_init__(self) -> None:
        for side in (self.source_word, self.target_word):
            if not side.strip():
                raise ValueError("translation pair has an empty side")

    def term_count(self) -> int:
        return max(len(self.source_word.split()), len(self.target_word.split()))


@dataclass(frozen=True)
class BilingualLexicon:
    """Symmetric word association between language A and language B.

    ``forward`` maps A-words to sets of B-words and ``backward`` the
    reverse. Both are filled from the same pair set, so ``b in
    forward[a]`` holds exactly when ``a in backward[b]``.
    """

    forward: Mapping[str, frozenset] = field(default_factory=dict)
    backward: Mapping[str, frozenset] = field(default_factory=dict)
    source_tags: frozenset = frozenset()
    source_counts: Mapping[str, int] = field(default_factory=dict, compare=False)

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[str, str]],
        source_tags: Iterable[str] = (),
        source_counts: Mapping[str, int] | None = None,
    ) -> "BilingualLexicon":
        fwd: dict[str, set[str]] = defaultdict(set)
        bwd: dict[str, set[str]] = defaultdict(set)
        for a, b in pairs:
            fwd[a].add(b)
            bwd[b].add(a)
        return cls(
            forward={a: frozenset(bs) for a, bs in fwd.items()},
            backward={b: frozenset(as_) for b, as_ in bwd.items()},
            source_tags=frozenset(source_tags),
            source_counts=dict(source_counts or {}),
        )

    @classmethod
    def identity(cls, words: Iterable[str]) -> "BilingualLexicon":
        """Lexicon mapping every word to itself only."""
        return cls.from_pairs(((w, w) for w in words), source_tags=("identity",))

    def translate(self, word: str, direction: Direction = Direction.A_TO_B) -> frozenset:
        table = self.forward if direction is Direction.A_TO_B else self.backward
        return table.get(word, frozenset())

    def pairs(self) -> Iterator[tuple[str, str]]:
        """All (a, b) pairs in sorted order."""
        for a in sorted(self.forward):
            for b in sorted(self.forward[a]):
                yield a, b

    def __len__(self) -> int:
        return sum(len(bs) for bs in self.forward.values())


def translate(lex: BilingualLexicon, word: str, direction: Direction = Direction.A_TO_B) -> frozenset:
    """Translation set of ``word``; empty for unknown words."""
    return lex.translate(word, direction)


def _source_tag_and_path(source: SourceSpec) -> tuple[str, Path]:
    if isinstance(source, tuple):
        tag, path = source
        return str(tag), Path(path)
    path = Path(source)
    return path.stem, path


def read_pairs(
    path: Union[str, Path],
    tag: str = "",
    skip_malformed: bool = False,
) -> Iterator[TranslationPair]:
    """Yield normalized pairs from a two-column UTF-8 TSV file.

    Blank lines and ``#`` comments are ignored.  A malformed record raises
    :class:`RecordError` unless ``skip_malformed`` is set, in which case it
    is logged and skipped.
    """
    path = Path(path)
    try:
        handle = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise InputError(path, exc.strerror or str(exc)) from exc
    with handle:
        try:
            for line_no, line in enumerate(handle, start=1):
                line = line.rstrip("\r\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                cols = line.split("\t")
                if len(cols) != 2:
                    reason = f"expected 2 tab-separated columns, got {len(cols)}"
                else:
                    a, b = normalize_token(cols[0]), normalize_token(cols[1])
                    if a and b:
                        yield TranslationPair(a, b, tag)
                        continue
                    reason = "empty word"
                if not skip_malformed:
                    raise RecordError(path, line_no, reason)
                logger.warning("%s:%d: skipping malformed record (%s)", path, line_no, reason)
        except UnicodeDecodeError as exc:
            raise InputError(path, f"not valid UTF-8 ({exc.reason})") from exc


def compose_lexicon(
    sources: Sequence[SourceSpec],
    excluded_tags: Iterable[str] = (),
    max_terms: int = 2,
    skip_malformed: bool = False,
) -> BilingualLexicon:
    """Union of all pairs from the non-excluded sources.

    A source is a path (tag = file stem) or a ``(tag, path)`` tuple.  Pairs
    where either side has more than ``max_terms`` whitespace-separated
    terms are dropped.
    """
    if max_terms < 1:
        raise ParameterError(f"max_terms must be positive, got {max_terms}")
    excluded = {t.strip() for t in excluded_tags if t.strip()}
    resolved = [_source_tag_and_path(s) for s in sources]
    unknown = excluded - {tag for tag, _ in resolved}
    if unknown:
        logger.warning("excluded tags not among the sources: %s", ", ".join(sorted(unknown)))

    all_pairs: set[tuple[str, str]] = set()
    included: list[str] = []
    counts: dict[str, int] = {}
    for tag, path in resolved:
        if tag in excluded:
            continue
        kept: set[tuple[str, str]] = set()
        for pair in read_pairs(path, tag, skip_malformed=skip_malformed):
            if pair.term_count() <= max_terms:
                kept.add((pair.source_word, pair.target_word))
        included.append(tag)
        counts[tag] = counts.get(tag, 0) + len(kept)
        all_pairs |= kept
    return BilingualLexicon.from_pairs(sorted(all_pairs), included, counts)


def save_lexicon(lex: BilingualLexicon, path: Union[str, Path]) -> None:
    """Write the lexicon as ``a<TAB>b`` lines below a header naming its sources."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as out:
        out.write(f"{HEADER_PREFIX} {','.join(sorted(lex.source_tags))}\n")
        for a, b in lex.pairs():
            out.write(f"{a}\t{b}\n")


def load_lexicon(path: Union[str, Path]) -> BilingualLexicon:
    """Read a lexicon written by :func:`save_lexicon` (or any plain TSV)."""
    path = Path(path)
    tags: list[str] = []
    try:
        with path.open("r", encoding="utf-8") as fh:
            first = fh.readline()
    except OSError as exc:
        raise InputError(path, exc.strerror or str(exc)) from exc
    if first.startswith(HEADER_PREFIX):
        tags = [t for t in first[len(HEADER_PREFIX):].strip().split(",") if t]
    pairs = [(p.source_word, p.target_word) for p in read_pairs(path)]
    return BilingualLexicon.from_pairs(pairs, tags or [path.stem])
