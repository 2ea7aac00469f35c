"""Voting models that turn a candidate's voters into one score.

A voter is a re-translation of a candidate that occurs in the source
topic; it carries that word's 1-based rank and probability in the topic.
"Top-n voters" are the n voters with the largest probability (ties go to
the smaller rank, then to insertion order).  Reciprocal-rank terms always
use the voter's topic-global rank.

Voting spec grammar, as accepted by :func:`parse_voting_spec`::

    spec   ::= family [ "-top:" INT ] [ ":" params ]
    params ::= param { "," param }
    param  ::= "top=" INT | "x=" REAL | "eps=" REAL | "rr=" ("fixed" | "free")
    family ::= votes | combsum | combgsum | rr | combsumrr | combavg
             | combnor | combrrpen | combgnor

``top`` bounds the voters considered (default: all of them), ``x`` is the
reciprocal-rank exponent, ``eps`` the empty-voter floor of CombRRPEN, and
``rr=free`` makes CombRRPEN's reciprocal-rank term use ``top`` and ``x``
instead of the fixed top-1, exponent-1 term.
"""

from __future__ import annotations

import enum
import math
import re
import statistics
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import ParameterError


@dataclass(frozen=True)
class Voter:
    rank: int
    probability: float

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ParameterError(f"voter rank must be >= 1, got {self.rank}")
        if not self.probability > 0.0:
            raise ParameterError(f"voter probability must be > 0, got {self.probability}")


class Family(enum.Enum):
    VOTES = "votes"
    COMBSUM = "combsum"
    COMBGSUM = "combgsum"
    RR = "rr"
    COMBSUM_RR = "combsumrr"
    COMBAVG = "combavg"
    COMBNOR = "combnor"
    COMBRRPEN = "combrrpen"
    COMBGNOR = "combgnor"


@dataclass(frozen=True)
class VotingModelSpec:
    """A voting family plus its parameters; ``n=None`` means all voters."""

    family: Family = Family.COMBSUM
    n: int | None = None
    x: float = 1.0
    epsilon_floor: float | None = None
    fixed_rr_term: bool = True

    def __post_init__(self) -> None:
        if self.n is not None and self.n < 1:
            raise ParameterError(f"top-n must be >= 1, got {self.n}")
        if not self.x > 0:
            raise ParameterError(f"exponent x must be > 0, got {self.x}")
        if self.epsilon_floor is not None and not self.epsilon_floor > 0:
            raise ParameterError(f"epsilon floor must be > 0, got {self.epsilon_floor}")

    def with_epsilon_floor(self, eps: float) -> "VotingModelSpec":
        return VotingModelSpec(self.family, self.n, self.x, eps, self.fixed_rr_term)

    def __str__(self) -> str:
        text = self.family.value
        params = []
        if self.n is not None:
            params.append(f"top={self.n}")
        if self.x != 1.0:
            params.append(f"x={self.x:g}")
        if self.epsilon_floor is not None:
            params.append(f"eps={self.epsilon_floor!r}")
        if not self.fixed_rr_term:
            params.append("rr=free")
        return text + (":" + ",".join(params) if params else "")


def top_voters(voters: Sequence[Voter], n: int | None) -> list[Voter]:
    order = sorted(range(len(voters)), key=lambda i: (-voters[i].probability, voters[i].rank, i))
    if n is not None:
        order = order[:n]
    return [voters[i] for i in order]


def _count(voters: Sequence[Voter], n: int | None) -> int:
    return len(voters) if n is None else min(len(voters), n)


def score_votes(voters: Sequence[Voter]) -> float:
    return float(len(voters))


def score_comb_sum(voters: Sequence[Voter], n: int | None = None) -> float:
    return math.fsum(v.probability for v in top_voters(voters, n))


def score_comb_gsum(voters: Sequence[Voter], n: int | None = None) -> float:
    top = top_voters(voters, n)
    if not top:
        return 0.0
    if len(top) == 1:
        # geometric_mean goes through exp(log(p)), which is not exact for one value
        return top[0].probability
    return statistics.geometric_mean(v.probability for v in top)


def score_rr(voters: Sequence[Voter], n: int | None = None, x: float = 1.0) -> float:
    return math.fsum((1.0 / v.rank) ** x for v in top_voters(voters, n))


def score_comb_sum_rr(voters: Sequence[Voter], n: int | None = None, x: float = 1.0) -> float:
    return math.fsum(v.probability * (1.0 / v.rank) ** x for v in top_voters(voters, n))


def score_comb_avg(voters: Sequence[Voter], n: int | None = None) -> float:
    top = top_voters(voters, n)
    if not top:
        return 0.0
    return math.fsum(v.probability for v in top) / len(top)


def score_comb_nor(voters: Sequence[Voter], n: int | None = None) -> float:
    if not voters:
        return 0.0
    return (score_comb_sum(voters, n) + score_comb_avg(voters, n)) / (_count(voters, n) + 1)


def score_comb_rr_pen(
    voters: Sequence[Voter],
    n: int | None = None,
    epsilon_floor: float = 0.0,
    x: float = 1.0,
    fixed_rr_term: bool = True,
) -> float:
    """Reciprocal rank of the best voter plus the mean of the top-n scores.

    With no voters the result is ``epsilon_floor``.  ``fixed_rr_term=False``
    evaluates the reciprocal-rank part with ``n`` and ``x`` instead of 1, 1.
    """
    if not voters:
        return epsilon_floor
    rr = score_rr(voters, 1, 1.0) if fixed_rr_term else score_rr(voters, n, x)
    return rr + score_comb_sum(voters, n) / _count(voters, n)


def score_comb_gnor(voters: Sequence[Voter], n: int | None = None) -> float:
    if not voters:
        return 0.0
    return (score_comb_sum(voters, n) + score_comb_gsum(voters, n)) / (_count(voters, n) + 1)


_DISPATCH: dict[Family, Callable[[VotingModelSpec, Sequence[Voter]], float]] = {
    Family.VOTES: lambda s, v: score_votes(v),
    Family.COMBSUM: lambda s, v: score_comb_sum(v, s.n),
    Family.COMBGSUM: lambda s, v: score_comb_gsum(v, s.n),
    Family.RR: lambda s, v: score_rr(v, s.n, s.x),
    Family.COMBSUM_RR: lambda s, v: score_comb_sum_rr(v, s.n, s.x),
    Family.COMBAVG: lambda s, v: score_comb_avg(v, s.n),
    Family.COMBNOR: lambda s, v: score_comb_nor(v, s.n),
    Family.COMBRRPEN: lambda s, v: score_comb_rr_pen(
        v, s.n, s.epsilon_floor or 0.0, s.x, s.fixed_rr_term
    ),
    Family.COMBGNOR: lambda s, v: score_comb_gnor(v, s.n),
}


def evaluate(spec: VotingModelSpec, voters: Sequence[Voter]) -> float:
    """Score ``voters`` with the family named in ``spec``."""
    return _DISPATCH[spec.family](spec, voters)


_ALIASES = {
    "combsum_rr": Family.COMBSUM_RR,
    "combrr_pen": Family.COMBRRPEN,
}
_SPEC_RE = re.compile(r"^(?P<family>[a-z_]+)(?:-top:(?P<top>[^:]+))?(?::(?P<params>.*))?$")

GRAMMAR_HINT = (
    "expected FAMILY[-top:N][:top=N,x=X,eps=E,rr=fixed|free] with FAMILY one of "
    + ", ".join(f.value for f in Family)
)


def _parse_int(text: str, what: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParameterError(f"{what} must be an integer, got {text!r}; {GRAMMAR_HINT}") from None
    if value < 1:
        raise ParameterError(f"{what} must be >= 1, got {value}; {GRAMMAR_HINT}")
    return value


def _parse_float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParameterError(f"{what} must be a number, got {text!r}; {GRAMMAR_HINT}") from None


def parse_voting_spec(text: str) -> VotingModelSpec:
    """Parse strings such as ``combsum``, ``combsum-top:3`` or ``rr:top=2,x=2``."""
    raw = text.strip().lower()
    m = _SPEC_RE.match(raw)
    if not m:
        raise ParameterError(f"invalid voting spec {text!r}; {GRAMMAR_HINT}")
    name = m.group("family")
    try:
        family = _ALIASES.get(name) or Family(name)
    except ValueError:
        raise ParameterError(f"unknown voting family {name!r}; {GRAMMAR_HINT}") from None
    kwargs: dict = {}
    if m.group("top"):
        kwargs["n"] = _parse_int(m.group("top"), "top")
    if m.group("params"):
        for item in m.group("params").split(","):
            key, sep, value = item.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not value:
                raise ParameterError(f"malformed parameter {item!r}; {GRAMMAR_HINT}")
            if key == "top":
                kwargs["n"] = _parse_int(value, "top")
            elif key == "x":
                kwargs["x"] = _parse_float(value, "x")
            elif key == "eps":
                kwargs["epsilon_floor"] = _parse_float(value, "eps")
            elif key == "rr" and value in ("fixed", "free"):
                kwargs["fixed_rr_term"] = value == "fixed"
            else:
                raise ParameterError(f"unknown parameter {item!r}; {GRAMMAR_HINT}")
    return VotingModelSpec(family, **kwargs)
