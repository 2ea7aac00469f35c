"""Consistency of an original and a translated model on aligned documents.

For each aligned pair the two documents' topic distributions are inferred
(each with its own model), ranked, and compared with NDCG@3 and the top-3
overlap.  Relevance gains are 3, 2, 1 for the reference's top three topics,
the discount is ``log2(position + 1)``, and the ideal ordering is the
reference's own.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Iterator, Sequence, Union

from ._parallel import parallel_map
from .errors import InputError, ParameterError, RecordError
from .inference import (
    DEFAULT_ALPHA,
    DEFAULT_BURN_IN,
    DEFAULT_ITERATIONS,
    Document,
    document_seed,
    infer_theta,
)
from .topic_model import Topic, TopicModel

GAINS = (3, 2, 1)

BUCKETS = ("1.00", "]1.00, 0.75]", "]0.75, 0.50]", "]0.50, 0.25]", "]0.25, 0.00[", "0.00")


@dataclass(frozen=True)
class AlignedPair:
    pair_id: str
    doc_a: Document
    doc_b: Document

    @classmethod
    def from_dict(cls, data: dict) -> "AlignedPair":
        if not isinstance(data, dict):
            raise ValueError("aligned pair must be a JSON object")
        for key in ("pair_id", "doc_a", "doc_b"):
            if key not in data:
                raise ValueError(f"aligned pair is missing {key!r}")
        return cls(str(data["pair_id"]), Document.from_dict(data["doc_a"]), Document.from_dict(data["doc_b"]))

    def to_dict(self) -> dict:
        return {"pair_id": self.pair_id, "doc_a": self.doc_a.to_dict(), "doc_b": self.doc_b.to_dict()}


@dataclass(frozen=True)
class PairResult:
    pair_id: str
    ndcg: float
    overlap: int
    ranking_a: tuple[int, ...] = field(default=(), compare=False)
    ranking_b: tuple[int, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class EvalReport:
    per_pair: tuple[PairResult, ...]
    mu: float
    overlap_histogram: dict
    bucket_histogram: dict

    @classmethod
    def from_results(cls, results: Sequence[PairResult]) -> "EvalReport":
        results = tuple(results)
        mu = math.fsum(r.ndcg for r in results) / len(results) if results else 0.0
        overlaps = {m: 0 for m in (3, 2, 1, 0)}
        buckets = {b: 0 for b in BUCKETS}
        for r in results:
            overlaps[r.overlap] += 1
            buckets[ndcg_bucket(r.ndcg)] += 1
        return cls(results, mu, overlaps, buckets)

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "pairs": len(self.per_pair),
            "overlap_histogram": {str(k): v for k, v in self.overlap_histogram.items()},
            "bucket_histogram": dict(self.bucket_histogram),
            "per_pair": [
                {
                    "pair_id": r.pair_id,
                    "ndcg": r.ndcg,
                    "overlap": r.overlap,
                    "top3_a": list(r.ranking_a[:3]),
                    "top3_b": list(r.ranking_b[:3]),
                }
                for r in self.per_pair
            ],
        }


def ndcg_bucket(value: float) -> str:
    if value >= 1.0 - 1e-12:
        return BUCKETS[0]
    if value >= 0.75:
        return BUCKETS[1]
    if value >= 0.5:
        return BUCKETS[2]
    if value >= 0.25:
        return BUCKETS[3]
    if value > 0.0:
        return BUCKETS[4]
    return BUCKETS[5]


def ndcg_at_3(reference: Sequence[int], candidate: Sequence[int]) -> float:
    """NDCG@3 of ``candidate`` against the top three of ``reference``."""
    if len(reference) < 3 or len(candidate) < 3:
        raise ParameterError("NDCG@3 needs rankings over at least 3 topics")
    relevance = dict(zip(reference[:3], GAINS))
    dcg = sum(relevance.get(t, 0) / math.log2(j + 1) for j, t in enumerate(candidate[:3], start=1))
    idcg = sum(g / math.log2(j + 1) for j, g in enumerate(GAINS, start=1))
    return dcg / idcg


def overlap_at_3(reference: Sequence[int], candidate: Sequence[int]) -> int:
    return len(set(reference[:3]) & set(candidate[:3]))


def recall_precision_at_k(reference: Sequence[int], candidate: Sequence[int], k: int) -> tuple[float, float]:
    """Recall and precision of the candidate's top-k against the reference's top-k."""
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    ref, cand = set(reference[:k]), set(candidate[:k])
    hits = len(ref & cand)
    recall = hits / len(ref) if ref else 0.0
    precision = hits / len(cand) if cand else 0.0
    return recall, precision


def topic_sharpness(topic: Topic, r: int) -> float:
    """Slope of the score curve between rank 1 and rank ``r``."""
    if r < 2:
        raise ParameterError(f"sharpness needs a rank >= 2, got {r}")
    if len(topic) < r:
        raise ParameterError(f"topic has only {len(topic)} words, cannot take rank {r}")
    first = topic[topic.word_at_rank(1)]
    at_r = topic[topic.word_at_rank(r)]
    # same as (at_r - first) / (1 - r), written so a flat topic gives +0.0
    return (first - at_r) / (r - 1)


def _evaluate_pair(pair, model_a, model_b, alpha, iterations, burn_in, seed) -> PairResult:
    # both sides share one seed so that a self-comparison is exact
    pair_seed = document_seed(seed, pair.pair_id)
    theta_a = infer_theta(model_a, pair.doc_a, alpha, iterations, burn_in, pair_seed)
    theta_b = infer_theta(model_b, pair.doc_b, alpha, iterations, burn_in, pair_seed)
    rank_a, rank_b = theta_a.ranking(), theta_b.ranking()
    return PairResult(pair.pair_id, ndcg_at_3(rank_a, rank_b), overlap_at_3(rank_a, rank_b), tuple(rank_a), tuple(rank_b))


def evaluate_consistency(
    model_a: TopicModel,
    model_b: TopicModel,
    pairs: Sequence[AlignedPair],
    alpha: float = DEFAULT_ALPHA,
    iterations: int = DEFAULT_ITERATIONS,
    burn_in: int = DEFAULT_BURN_IN,
    seed: int = 0,
    jobs: int = 1,
) -> EvalReport:
    """Compare topic rankings of ``model_a`` on ``doc_a`` and ``model_b`` on ``doc_b``."""
    if model_a.num_topics != model_b.num_topics:
        raise ParameterError(
            f"models disagree on the number of topics: {model_a.num_topics} vs {model_b.num_topics}"
        )
    worker = partial(
        _evaluate_pair,
        model_a=model_a,
        model_b=model_b,
        alpha=alpha,
        iterations=iterations,
        burn_in=burn_in,
        seed=seed,
    )
    return EvalReport.from_results(parallel_map(worker, list(pairs), jobs))


def read_aligned_pairs(path: Union[str, Path]) -> Iterator[AlignedPair]:
    path = Path(path)
    try:
        handle = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise InputError(path, exc.strerror or str(exc)) from exc
    with handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield AlignedPair.from_dict(json.loads(line))
            except (json.JSONDecodeError, ValueError) as exc:
                raise RecordError(path, line_no, str(exc)) from exc


def format_report(report: EvalReport, label: str = "model") -> str:
    """Human-readable summary laid out like a rank / mu / bucket table."""
    width = max(12, len(label) + 2)
    lines = [
        f"{'':<16}{label:>{width}}",
        f"{'pairs':<16}{len(report.per_pair):>{width}}",
        f"{'mu (NDCG@3)':<16}{report.mu:>{width}.3f}",
        "NDCG@3 buckets",
    ]
    for bucket, count in report.bucket_histogram.items():
        lines.append(f"  {bucket:<14}{count:>{width}}")
    lines.append("same top-3 topics")
    total = max(1, len(report.per_pair))
    for matches, count in report.overlap_histogram.items():
        bar = "#" * round(40 * count / total)
        lines.append(f"  {matches} of 3{'':<8}{count:>{width}}  {bar}")
    return "\n".join(lines)
