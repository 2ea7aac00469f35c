"""Topic-model translation through a bilingual lexicon.

Each source word above the threshold is translated; every candidate is
scored by a voting model over its re-translations that occur in the same
source topic; the best ``n_best`` candidates per source word survive; a
target word reached from several source words keeps its maximum score.
The translated topics are then filled up to the joint target vocabulary
with a small fallback score and normalized.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Iterable, Sequence

import numpy as np

from ._parallel import parallel_map
from .errors import ParameterError, TranslationError
from .lexicon import BilingualLexicon, Direction
from .topic_model import Topic, TopicModel, fit_to_vocabulary, min_probability, normalize
from .voting import Family, Voter, VotingModelSpec, evaluate


class KeepOriginPolicy(enum.Enum):
    ALWAYS = "always"
    NEVER = "never"
    IF_NO_TRANSLATION = "if-no-translation"

    @classmethod
    def parse(cls, text: "str | KeepOriginPolicy") -> "KeepOriginPolicy":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("_", "-")
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(p.value for p in cls)
            raise ParameterError(f"unknown keep-origin policy {text!r}; choose one of {choices}") from None


@dataclass(frozen=True)
class TranslationConfig:
    threshold: float | None = None
    n_best: int | None = None
    epsilon: float | None = None
    keep_origin: KeepOriginPolicy = KeepOriginPolicy.NEVER
    voting: VotingModelSpec = field(default_factory=VotingModelSpec)
    assembly: str = "max"

    def __post_init__(self) -> None:
        if self.threshold is not None and not 0.0 <= self.threshold < 1.0:
            raise ParameterError(f"threshold must lie in [0, 1), got {self.threshold}")
        if self.epsilon is not None and not self.epsilon > 0.0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}")
        if self.n_best is not None and self.n_best < 1:
            raise ParameterError(f"n_best must be >= 1, got {self.n_best}")
        if self.assembly != "max":
            raise ParameterError(f"only max assembly is supported, got {self.assembly!r}")
        object.__setattr__(self, "keep_origin", KeepOriginPolicy.parse(self.keep_origin))

    @property
    def delta(self) -> float:
        return 0.0 if self.threshold is None else self.threshold


@dataclass(frozen=True)
class Contribution:
    """One source word's claim on a target word."""

    source: str
    score: float
    voters: int
    kept_origin: bool = False


TopicProvenance = dict  # target word -> list[Contribution]


@dataclass(frozen=True)
class TranslatedTopicModel:
    model: TopicModel
    raw_topics: tuple[dict, ...]
    provenance: tuple[TopicProvenance, ...]
    epsilon: float

    def provenance_to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "topics": [
                {
                    word: [
                        {"source": c.source, "score": c.score, "voters": c.voters, "kept_origin": c.kept_origin}
                        for c in prov[word]
                    ]
                    for word in sorted(prov)
                }
                for prov in self.provenance
            ],
        }


def _merge(out: dict, prov: dict, word: str, contribution: Contribution) -> None:
    prov.setdefault(word, []).append(contribution)
    if contribution.score > out.get(word, -math.inf):
        out[word] = contribution.score


def _source_words(topic: Topic, vocab_a: Iterable[str] | None, delta: float) -> list[str]:
    allowed = None if vocab_a is None else set(vocab_a)
    return [
        w for w in topic.ranked_words
        if topic[w] > delta and (allowed is None or w in allowed)
    ]


def _voting_spec_for(cfg: TranslationConfig, floor: float) -> VotingModelSpec:
    spec = cfg.voting
    if spec.family is Family.COMBRRPEN and spec.epsilon_floor is None:
        spec = spec.with_epsilon_floor(floor)
    return spec


def _translate_topic_traced(
    topic_a: Topic,
    vocab_a: Iterable[str] | None,
    lex: BilingualLexicon,
    cfg: TranslationConfig,
    spec: VotingModelSpec | None = None,
) -> tuple[dict, dict]:
    if spec is None:
        positive = [s for s in topic_a.weights.values() if s > 0.0]
        spec = _voting_spec_for(cfg, min(positive) if positive else 1e-300)
    scores: dict[str, float] = {}
    prov: dict[str, list[Contribution]] = {}
    # a candidate's voters depend only on the candidate within one topic
    scored: dict[str, tuple[float, int] | None] = {}

    for origin in _source_words(topic_a, vocab_a, cfg.delta):
        elected = []
        for cand in lex.translate(origin, Direction.A_TO_B):
            if cand not in scored:
                voters = [
                    Voter(topic_a.get_rank(back), topic_a[back])
                    for back in sorted(lex.translate(cand, Direction.B_TO_A))
                    if topic_a.get(back) > 0.0
                ]
                scored[cand] = (evaluate(spec, voters), len(voters)) if voters else None
            if scored[cand] is not None:
                elected.append((cand, *scored[cand]))
        elected.sort(key=lambda e: (-e[1], e[0]))
        if cfg.n_best is not None:
            elected = elected[: cfg.n_best]
        for cand, score, n_voters in elected:
            _merge(scores, prov, cand, Contribution(origin, score, n_voters))
        if cfg.keep_origin is KeepOriginPolicy.ALWAYS or (
            cfg.keep_origin is KeepOriginPolicy.IF_NO_TRANSLATION and not elected
        ):
            _merge(scores, prov, origin, Contribution(origin, topic_a[origin], 0, kept_origin=True))
    return scores, prov


def translate_topic(
    topic_a: Topic,
    vocab_a: Iterable[str] | None,
    lex: BilingualLexicon,
    cfg: TranslationConfig,
) -> dict:
    """Translate one topic; returns the unnormalized target word -> score map."""
    return _translate_topic_traced(topic_a, vocab_a, lex, cfg)[0]


def default_epsilon(model_a: TopicModel, raw_topics: Sequence[dict]) -> float:
    """One ULP below the smallest positive score of source and raw target."""
    smallest = min_probability(model_a)
    raw_positive = [s for t in raw_topics for s in t.values() if s > 0.0]
    if raw_positive:
        smallest = min(smallest, min(raw_positive))
    return smallest - math.ulp(smallest)


def _assemble(
    model_a: TopicModel,
    traced: Sequence[tuple[dict, dict]],
    epsilon: float | None,
    language_tag: str,
) -> TranslatedTopicModel:
    raw = tuple(scores for scores, _ in traced)
    for k, scores in enumerate(raw):
        if not any(s > 0.0 for s in scores.values()):
            raise TranslationError(f"topic {k} has no translated words; cannot normalize it")
    vocab_b = frozenset().union(*(t.keys() for t in raw))
    eps = default_epsilon(model_a, raw) if epsilon is None else epsilon
    model_b = TopicModel(tuple(Topic(t) for t in raw), vocab_b, language_tag)
    model_b = normalize(fit_to_vocabulary(model_b, vocab_b, eps))
    return TranslatedTopicModel(model_b, raw, tuple(p for _, p in traced), eps)


def _voting_worker(topic: Topic, vocab_a, lex, cfg, spec):
    return _translate_topic_traced(topic, vocab_a, lex, cfg, spec)


def translate_topic_model(
    model_a: TopicModel,
    lex: BilingualLexicon,
    cfg: TranslationConfig | None = None,
    jobs: int = 1,
    language_tag: str | None = None,
) -> TranslatedTopicModel:
    """Translate every topic of ``model_a`` and build the target model.

    Topics are translated independently (in ``jobs`` processes when > 1);
    output is identical for every worker count.
    """
    cfg = cfg or TranslationConfig()
    spec = _voting_spec_for(cfg, min_probability(model_a))
    worker = partial(_voting_worker, vocab_a=model_a.vocabulary, lex=lex, cfg=cfg, spec=spec)
    traced = parallel_map(worker, list(model_a.topics), jobs)
    tag = model_a.language_tag if language_tag is None else language_tag
    return _assemble(model_a, traced, cfg.epsilon, tag)


def _plain_worker(item, vocab_a, lex, top_n, keep_origin, delta, seed):
    k, topic = item
    rng = np.random.default_rng([seed, k])
    scores: dict[str, float] = {}
    prov: dict[str, list[Contribution]] = {}
    for origin in _source_words(topic, vocab_a, delta):
        phi = topic[origin]
        cands = sorted(lex.translate(origin, Direction.A_TO_B))
        if top_n is not None and len(cands) > top_n:
            picked = rng.choice(len(cands), size=top_n, replace=False)
            cands = [cands[i] for i in sorted(picked)]
        for cand in cands:
            _merge(scores, prov, cand, Contribution(origin, phi, 0))
        if keep_origin is KeepOriginPolicy.ALWAYS or (
            keep_origin is KeepOriginPolicy.IF_NO_TRANSLATION and not cands
        ):
            _merge(scores, prov, origin, Contribution(origin, phi, 0, kept_origin=True))
    return scores, prov


def translate_plain(
    model_a: TopicModel,
    lex: BilingualLexicon,
    top_n: int | None = None,
    keep_origin: KeepOriginPolicy | str = KeepOriginPolicy.NEVER,
    seed: int = 0,
    threshold: float | None = None,
    epsilon: float | None = None,
    jobs: int = 1,
    language_tag: str | None = None,
) -> TranslatedTopicModel:
    """Baseline: every translation inherits its source word's probability.

    With ``top_n`` smaller than a word's translation count, a uniformly
    random subset of ``top_n`` translations is kept.  Randomness is drawn
    per topic from ``(seed, topic index)``.
    """
    if top_n is not None and top_n < 1:
        raise ParameterError(f"top_n must be >= 1, got {top_n}")
    cfg = TranslationConfig(threshold=threshold, epsilon=epsilon, keep_origin=keep_origin)
    worker = partial(
        _plain_worker,
        vocab_a=model_a.vocabulary,
        lex=lex,
        top_n=top_n,
        keep_origin=cfg.keep_origin,
        delta=cfg.delta,
        seed=seed,
    )
    traced = parallel_map(worker, list(enumerate(model_a.topics)), jobs)
    tag = model_a.language_tag if language_tag is None else language_tag
    return _assemble(model_a, traced, cfg.epsilon, tag)
