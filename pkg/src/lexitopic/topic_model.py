"""Topic models as per-topic word-score tables, plus JSON persistence."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .errors import InputError, ModelFormatError, ParameterError

NORMALIZATION_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Topic:
    """Word -> non-negative score, with a cached 1-based rank index.

    Ranks sort by descending score; equal scores fall back to ascending
    lexicographic word order so the ordering is deterministic.
    """

    weights: Mapping[str, float]

    def __post_init__(self) -> None:
        clean = {}
        for word, score in self.weights.items():
            score = float(score)
            if not score >= 0.0 or math.isinf(score):
                raise ParameterError(f"score for {word!r} must be finite and >= 0, got {score}")
            clean[word] = score
        object.__setattr__(self, "weights", clean)

    @cached_property
    def ranked_words(self) -> tuple[str, ...]:
        return tuple(sorted(self.weights, key=lambda w: (-self.weights[w], w)))

    @cached_property
    def _rank_of(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.ranked_words, start=1)}

    def get_rank(self, word: str) -> int | None:
        return self._rank_of.get(word)

    def word_at_rank(self, rank: int) -> str:
        return self.ranked_words[rank - 1]

    def top(self, n: int) -> list[tuple[str, float]]:
        return [(w, self.weights[w]) for w in self.ranked_words[:n]]

    def total(self) -> float:
        return math.fsum(self.weights.values())

    def __getitem__(self, word: str) -> float:
        return self.weights[word]

    def get(self, word: str, default: float = 0.0) -> float:
        return self.weights.get(word, default)

    def __contains__(self, word: object) -> bool:
        return word in self.weights

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self) -> Iterator[str]:
        return iter(self.weights)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Topic):
            return NotImplemented
        return self.weights == other.weights

    def __repr__(self) -> str:
        head = ", ".join(f"{w}: {s:.4g}" for w, s in self.top(5))
        more = ", ..." if len(self) > 5 else ""
        return f"Topic({{{head}{more}}})"


def get_rank(topic: Topic, word: str) -> int | None:
    """1-based rank of ``word`` in ``topic``, or None if absent."""
    return topic.get_rank(word)


@dataclass(frozen=True, eq=False)
class TopicModel:
    topics: tuple[Topic, ...]
    vocabulary: frozenset = field(default=frozenset())
    language_tag: str = ""
    normalized: bool = False

    def __post_init__(self) -> None:
        topics = tuple(t if isinstance(t, Topic) else Topic(t) for t in self.topics)
        if not topics:
            raise ParameterError("a topic model needs at least one topic")
        vocab = frozenset(self.vocabulary)
        for t in topics:
            vocab |= t.weights.keys()
        object.__setattr__(self, "topics", topics)
        object.__setattr__(self, "vocabulary", vocab)
        if self.normalized:
            for k, t in enumerate(topics):
                if abs(t.total() - 1.0) > NORMALIZATION_TOLERANCE:
                    raise ParameterError(f"topic {k} is flagged normalized but sums to {t.total()!r}")
                if len(t) != len(vocab) or any(s <= 0.0 for s in t.weights.values()):
                    raise ParameterError(f"topic {k} is flagged normalized but does not cover the vocabulary")

    @property
    def num_topics(self) -> int:
        return len(self.topics)

    def __len__(self) -> int:
        return len(self.topics)

    def __getitem__(self, k: int) -> Topic:
        return self.topics[k]

    def __iter__(self) -> Iterator[Topic]:
        return iter(self.topics)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TopicModel):
            return NotImplemented
        return (
            self.topics == other.topics
            and self.vocabulary == other.vocabulary
            and self.language_tag == other.language_tag
            and self.normalized == other.normalized
        )

    @cached_property
    def sorted_vocabulary(self) -> tuple[str, ...]:
        return tuple(sorted(self.vocabulary))

    @cached_property
    def word_index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.sorted_vocabulary)}

    @cached_property
    def phi(self) -> np.ndarray:
        """Dense K x V score matrix with columns in ``sorted_vocabulary`` order."""
        mat = np.zeros((len(self.topics), len(self.vocabulary)), dtype=np.float64)
        index = self.word_index
        for k, t in enumerate(self.topics):
            for w, s in t.weights.items():
                mat[k, index[w]] = s
        return mat


def min_probability(model: TopicModel) -> float:
    """Smallest strictly positive score stored anywhere in the model."""
    positive = [s for t in model.topics for s in t.weights.values() if s > 0.0]
    if not positive:
        raise ParameterError("model has no positive scores")
    return min(positive)


def fit_to_vocabulary(model: TopicModel, vocab: Iterable[str], epsilon: float) -> TopicModel:
    """Give every topic an entry for every word of ``vocab``.

    Missing words get ``epsilon``; existing scores are kept as they are.
    """
    if not epsilon > 0.0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    vocab = frozenset(vocab)
    extra = model.vocabulary - vocab
    if extra:
        raise ParameterError(f"vocabulary misses {len(extra)} model words, e.g. {sorted(extra)[0]!r}")
    topics = []
    for t in model.topics:
        weights = dict(t.weights)
        for w in vocab:
            if w not in weights:
                weights[w] = epsilon
        topics.append(Topic(weights))
    return TopicModel(tuple(topics), vocab, model.language_tag, normalized=False)


def normalize(model: TopicModel) -> TopicModel:
    """Divide each topic by its total mass."""
    topics = []
    for k, t in enumerate(model.topics):
        total = t.total()
        if not total > 0.0:
            raise ParameterError(f"topic {k} has zero mass and cannot be normalized")
        topics.append(Topic({w: s / total for w, s in t.weights.items()}))
    dense = all(len(t) == len(model.vocabulary) and min(t.weights.values()) > 0.0 for t in topics)
    sums_ok = all(abs(t.total() - 1.0) <= NORMALIZATION_TOLERANCE for t in topics)
    return TopicModel(tuple(topics), model.vocabulary, model.language_tag, normalized=dense and sums_ok)


# --------------------------------------------------------------------------
# persistence


def model_to_dict(model: TopicModel) -> dict:
    return {
        "language_tag": model.language_tag,
        "normalized": model.normalized,
        "vocabulary": list(model.sorted_vocabulary),
        "topics": [{w: t.weights[w] for w in sorted(t.weights)} for t in model.topics],
    }


def model_from_dict(data: Mapping, source: str = "<model>") -> TopicModel:
    if not isinstance(data, Mapping):
        raise ModelFormatError(f"{source}: top level must be a JSON object")
    if "topics" not in data:
        raise ModelFormatError(f"{source}: missing required key 'topics'")
    raw_topics = data["topics"]
    if not isinstance(raw_topics, list) or not raw_topics:
        raise ModelFormatError(f"{source}: 'topics' must be a non-empty list")
    topics = []
    for k, raw in enumerate(raw_topics):
        if not isinstance(raw, Mapping):
            raise ModelFormatError(f"{source}: topic {k} must be an object of word -> score")
        for w, s in raw.items():
            if isinstance(s, bool) or not isinstance(s, (int, float)):
                raise ModelFormatError(f"{source}: topic {k}, word {w!r}: score must be a number")
        try:
            topics.append(Topic(raw))
        except ParameterError as exc:
            raise ModelFormatError(f"{source}: topic {k}: {exc}") from exc
    vocab = data.get("vocabulary", [])
    if not isinstance(vocab, list) or not all(isinstance(w, str) for w in vocab):
        raise ModelFormatError(f"{source}: 'vocabulary' must be a list of strings")
    try:
        return TopicModel(
            tuple(topics),
            frozenset(vocab),
            str(data.get("language_tag", "")),
            normalized=bool(data.get("normalized", False)),
        )
    except ParameterError as exc:
        raise ModelFormatError(f"{source}: {exc}") from exc


def save_model(model: TopicModel, path: Union[str, Path]) -> None:
    # json writes floats with repr(), the shortest string that round-trips exactly
    Path(path).write_text(json.dumps(model_to_dict(model), ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


def load_model(path: Union[str, Path]) -> TopicModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(path, exc.strerror or str(exc)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON ({exc})") from exc
    return model_from_dict(data, str(path))


def model_from_matrix(
    phi: np.ndarray, words: Sequence[str], language_tag: str = "", normalized: bool | None = None
) -> TopicModel:
    """Build a dense model from a K x V matrix; zero entries are left out."""
    phi = np.asarray(phi, dtype=np.float64)
    topics = tuple(
        Topic({w: float(s) for w, s in zip(words, row) if s > 0.0}) for row in phi
    )
    model = TopicModel(topics, frozenset(words), language_tag)
    if normalized is None:
        normalized = all(
            len(t) == len(model.vocabulary) and abs(t.total() - 1.0) <= NORMALIZATION_TOLERANCE
            for t in topics
        )
    if normalized:
        model = TopicModel(topics, model.vocabulary, language_tag, normalized=True)
    return model
