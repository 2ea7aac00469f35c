"""Per-document topic distributions under a fixed topic model.

Fold-in collapsed Gibbs sampling: the word distributions stay fixed and
only the document's topic assignments are resampled, each token drawing
topic k with probability proportional to ``phi_k(w) * (count_k + alpha)``
where ``count_k`` excludes the token itself.  Post-burn-in counts are
averaged and smoothed into ``(avg_k + alpha) / (n + K * alpha)``.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from ._parallel import parallel_map
from .errors import InputError, ParameterError, RecordError
from .topic_model import TopicModel

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

DEFAULT_ALPHA = 0.01
DEFAULT_ITERATIONS = 200
DEFAULT_BURN_IN = 50


@dataclass(frozen=True)
class Document:
    id: str
    tokens: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))

    @classmethod
    def from_dict(cls, data: dict) -> "Document":
        if not isinstance(data, dict) or "id" not in data or "tokens" not in data:
            raise ValueError("document must be an object with 'id' and 'tokens'")
        tokens = data["tokens"]
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise ValueError("'tokens' must be a list of strings")
        return cls(str(data["id"]), tuple(tokens))

    def to_dict(self) -> dict:
        return {"id": self.id, "tokens": list(self.tokens)}


@dataclass(frozen=True)
class ThetaDistribution:
    document_id: str
    probabilities: tuple[float, ...]

    def ranking(self) -> list[int]:
        """Topic indices by descending probability, ties by ascending index."""
        p = self.probabilities
        return sorted(range(len(p)), key=lambda k: (-p[k], k))

    def to_dict(self) -> dict:
        return {"id": self.document_id, "theta": list(self.probabilities)}


def _gibbs_kernel(phi_tok, uniforms, alpha, burn_in):  # pragma: no cover - jitted below
    n, n_topics = phi_tok.shape
    iterations = uniforms.shape[0] - 1
    counts = np.zeros(n_topics)
    acc = np.zeros(n_topics)
    z = np.zeros(n, dtype=np.int64)
    weights = np.zeros(n_topics)

    # initial assignment drawn sequentially from the same conditional
    for i in range(n):
        total = 0.0
        for k in range(n_topics):
            total += phi_tok[i, k] * (counts[k] + alpha)
            weights[k] = total
        target = uniforms[0, i] * total
        chosen = n_topics - 1
        for k in range(n_topics):
            if target < weights[k]:
                chosen = k
                break
        z[i] = chosen
        counts[chosen] += 1.0

    for it in range(iterations):
        for i in range(n):
            counts[z[i]] -= 1.0
            total = 0.0
            for k in range(n_topics):
                total += phi_tok[i, k] * (counts[k] + alpha)
                weights[k] = total
            target = uniforms[it + 1, i] * total
            chosen = n_topics - 1
            for k in range(n_topics):
                if target < weights[k]:
                    chosen = k
                    break
            z[i] = chosen
            counts[chosen] += 1.0
        if it >= burn_in:
            for k in range(n_topics):
                acc[k] += counts[k]
    return acc


_python_kernel = _gibbs_kernel
_gibbs = numba.njit(cache=False, nogil=True)(_gibbs_kernel) if numba is not None else _gibbs_kernel


def infer_theta(
    model: TopicModel,
    doc: Document,
    alpha: float = DEFAULT_ALPHA,
    iterations: int = DEFAULT_ITERATIONS,
    burn_in: int = DEFAULT_BURN_IN,
    seed: Union[int, Sequence[int]] = 0,
) -> ThetaDistribution:
    """Infer the topic distribution of ``doc`` with the word distributions fixed.

    Tokens outside the model vocabulary are ignored.  A document without
    known tokens gets the uniform distribution.
    """
    if not alpha > 0.0:
        raise ParameterError(f"alpha must be > 0, got {alpha}")
    if iterations < 1 or burn_in < 0 or iterations <= burn_in:
        raise ParameterError(
            f"need iterations > burn_in >= 0, got iterations={iterations}, burn_in={burn_in}"
        )
    n_topics = model.num_topics
    index = model.word_index
    ids = [index[t] for t in doc.tokens if t in index]
    if not ids:
        return ThetaDistribution(doc.id, tuple([1.0 / n_topics] * n_topics))

    phi_tok = np.ascontiguousarray(model.phi[:, ids].T)
    rng = np.random.default_rng(seed)
    uniforms = rng.random((iterations + 1, len(ids)))
    acc = _gibbs(phi_tok, uniforms, float(alpha), int(burn_in))
    avg = acc / (iterations - burn_in)
    theta = (avg + alpha) / (len(ids) + n_topics * alpha)
    theta = theta / theta.sum()
    return ThetaDistribution(doc.id, tuple(float(p) for p in theta))


def document_seed(seed: int, doc_id: str) -> list[int]:
    """Per-document seed that does not depend on corpus order."""
    return [int(seed), zlib.crc32(doc_id.encode("utf-8"))]


def _infer_one(doc, model, alpha, iterations, burn_in, seed):
    return infer_theta(model, doc, alpha, iterations, burn_in, document_seed(seed, doc.id))


def infer_corpus(
    model: TopicModel,
    docs: Sequence[Document],
    alpha: float = DEFAULT_ALPHA,
    iterations: int = DEFAULT_ITERATIONS,
    burn_in: int = DEFAULT_BURN_IN,
    seed: int = 0,
    jobs: int = 1,
) -> list[ThetaDistribution]:
    worker = partial(_infer_one, model=model, alpha=alpha, iterations=iterations, burn_in=burn_in, seed=seed)
    return parallel_map(worker, list(docs), jobs)


def read_documents(path: Union[str, Path]) -> Iterator[Document]:
    """Documents from JSONL, one ``{"id": ..., "tokens": [...]}`` per line."""
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
                yield Document.from_dict(json.loads(line))
            except (json.JSONDecodeError, ValueError) as exc:
                raise RecordError(path, line_no, str(exc)) from exc


def write_thetas(thetas: Iterable[ThetaDistribution], path: Union[str, Path]) -> None:
    with Path(path).open("w", encoding="utf-8") as out:
        for theta in thetas:
            out.write(json.dumps(theta.to_dict()) + "\n")
