"""Nash equilibria of the networked public-goods game at a fixed belief.

At belief ``mu`` every node best-responds to the mixed benefit ``b~(.; mu)``
and the equilibria are exactly the solutions of the LCP

    x >= 0,   (A+I) x >= e* 1,   x . ((A+I) x - e* 1) = 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .benefit import BenefitPair, GameParams, mixed_benefit, sigma_b, unilateral_effort
from .errors import CapExceeded, NotAnEquilibrium, NotMaximalIndependent
from .graph import (
    Graph,
    closed_adjacency,
    degree_plus_one_weights,
    is_maximal_independent,
    reduced_closed_solve,
    weighted_max_independent_set,
)

ENUMERATION_CAP = 16
PIVOT_TOL = 1e-9
DEDUP_TOL = 1e-9


class EquilibriumClass(str, Enum):
    SPECIALIZED = "specialized"
    DISTRIBUTED = "distributed"
    HYBRID = "hybrid"


class Regime(str, Enum):
    """Which limit of sigma_b the optimistic probability-safe objective is read in."""

    SIGMA_TO_ZERO = "sigma_to_zero"
    SIGMA_TO_ONE = "sigma_to_one"


@dataclass(frozen=True)
class EffortProfile:
    x: np.ndarray
    e_ref: float

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim != 1 or (x < 0).any():
            raise ValueError("effort profile must be a nonnegative vector")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    def neighborhood_effort(self, g: Graph) -> np.ndarray:
        return neighborhood_effort(g, self.x)


@dataclass(frozen=True)
class NashCheck:
    ok: bool
    residuals: np.ndarray

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class EquilibriumSet:
    profiles: list
    complete: bool
    parametric_note: str | None = None
    singular_supports: int = 0

    def __len__(self):
        return len(self.profiles)

    def __iter__(self):
        return iter(self.profiles)


@dataclass(frozen=True)
class DistributedSolution:
    """Result of solving ``(A+I) x = e* 1``.

    ``x`` is always the solved profile (twin effort split evenly); ``exists``
    tells whether it is a true distributed equilibrium, i.e. strictly positive.
    """

    x: np.ndarray
    e: float
    exists: bool
    reduced: bool

    @property
    def profile(self):
        return EffortProfile(self.x, self.e) if self.exists else None


@dataclass(frozen=True)
class BenefitBounds:
    lower8: float
    upper8: float
    lower9: float
    upper9: float


def default_tol(e):
    return 1e-9 * max(1.0, float(e))


def neighborhood_effort(g: Graph, x) -> np.ndarray:
    """``E_k(x) = x_k + sum of neighbours' efforts`` for every node."""
    return closed_adjacency(g) @ np.asarray(x, dtype=float)


def best_response(g: Graph, x, k: int, e: float) -> float:
    x = np.asarray(x, dtype=float)
    return max(0.0, float(e) - float(x[g.neighbors(k)].sum()))


def is_nash(g: Graph, x, e: float, tol: float | None = None) -> NashCheck:
    """Check the three LCP conditions; residuals are the per-node worst violation."""
    x = np.asarray(x, dtype=float)
    tol = default_tol(e) if tol is None else tol
    slack = neighborhood_effort(g, x) - e
    residuals = np.maximum.reduce([np.maximum(-x, 0.0), np.maximum(-slack, 0.0), np.abs(x * slack)])
    return NashCheck(bool((residuals <= tol).all()), residuals)


def classify_equilibrium(g: Graph, x, e: float) -> EquilibriumClass:
    x = np.asarray(x, dtype=float)
    if not is_nash(g, x, e):
        raise NotAnEquilibrium("profile violates the equilibrium conditions")
    tol = default_tol(e)
    if np.all((np.abs(x) <= tol) | (np.abs(x - e) <= 1e-9 * max(e, 1e-300))):
        return EquilibriumClass.SPECIALIZED
    if np.all(x > tol):
        return EquilibriumClass.DISTRIBUTED
    return EquilibriumClass.HYBRID


def specialized_from_mis(g: Graph, nodes, e: float) -> EffortProfile:
    nodes = set(nodes)
    if not is_maximal_independent(g, nodes):
        raise NotMaximalIndependent(f"{sorted(nodes)} is not a maximal independent set")
    x = np.zeros(g.n)
    x[sorted(nodes)] = e
    return EffortProfile(x, e)


def _twin_pairs_in(g: Graph, mask: int):
    nodes = [i for i in range(g.n) if (mask >> i) & 1]
    sub = closed_adjacency(g)[np.ix_(nodes, nodes)]
    pairs = []
    for a in range(len(nodes)):
        for b in range(a + 1, len(nodes)):
            if sub[a, b] and np.array_equal(sub[a], sub[b]):
                pairs.append((nodes[a], nodes[b]))
    return pairs


def enumerate_equilibria(g: Graph, e: float, cap: int = ENUMERATION_CAP) -> EquilibriumSet:
    """All isolated equilibria via support enumeration.

    Singular supports are skipped and counted.  When one of them holds a pair
    of twins (in the induced subgraph) the equilibria there form a continuum;
    its extreme points are covered by smaller supports and ``parametric_note``
    records the pairs.
    """
    if g.n > cap:
        raise CapExceeded(g.n, cap, "support enumeration")
    e = float(e)
    if e <= 0.0:
        return EquilibriumSet([EffortProfile(np.zeros(g.n), e)], complete=True)
    tol = default_tol(e)
    xs, _, singular = kernels.support_equilibria(closed_adjacency(g), e, PIVOT_TOL, tol * 1e-3, tol)
    order = np.lexsort(xs.T[::-1]) if len(xs) else np.array([], dtype=int)
    kept = []
    for row in xs[order]:
        if kept and np.linalg.norm(row - kept[-1]) < DEDUP_TOL:
            continue
        kept.append(row)
    twins = sorted({p for s in singular for p in _twin_pairs_in(g, int(s))})
    note = None
    if twins:
        shown = ", ".join(f"{u}-{v}" for u, v in twins[:12])
        more = "" if len(twins) <= 12 else f" (+{len(twins) - 12} more)"
        note = (
            f"{len(singular)} singular support(s) skipped; twin pairs {shown}{more} "
            "admit continua of equilibria that shift effort within the pair at fixed pair total"
        )
    return EquilibriumSet(
        [EffortProfile(r, e) for r in kept], complete=True, parametric_note=note, singular_supports=len(singular)
    )


def distributed_equilibrium(g: Graph, e: float) -> DistributedSolution:
    """Solve ``(A+I) x = e* 1``, merging twins first when the system is singular.

    With twins merged the representative's effort is spread evenly across its
    class, which keeps every neighbourhood total unchanged.
    """
    y, classes = reduced_closed_solve(g, e)
    if classes is None:
        x = y
    else:
        x = np.zeros(g.n)
        for value, cls in zip(y, classes):
            x[cls] = value / len(cls)
    exists = bool((x > default_tol(e)).all())
    return DistributedSolution(x, float(e), exists, classes is not None)


def aggregate_effort(x) -> float:
    return float(np.sum(x))


def weighted_aggregate_effort(x, w) -> float:
    return float(np.dot(np.asarray(w, dtype=float), np.asarray(x, dtype=float)))


def aggregate_benefit(g: Graph, x, bp: BenefitPair, mu: float) -> float:
    """``sum_k b~(E_k(x); mu)``."""
    return float(np.sum(mixed_benefit(bp, mu, neighborhood_effort(g, x), 0)))


def weighted_independence_number(g: Graph) -> float:
    """``alpha_w`` for the weights ``(A+I) 1``."""
    return weighted_max_independent_set(g, degree_plus_one_weights(g))[1]


def spread_ratio(gp, mu, n, e):
    """``sigma_b`` at belief ``mu``, or 0 where it is undefined (single node, zero effort)."""
    if n < 2 or e <= 0.0:
        return 0.0
    return sigma_b(gp, mu, n)


def benefit_bounds(g: Graph, gp: GameParams, mu: float) -> BenefitBounds:
    """Sandwich bounds on the best equilibrium aggregate benefit at belief ``mu``."""
    e = unilateral_effort(gp, mu)
    n = g.n
    bp, c = gp.benefit, gp.cost
    base = n * mixed_benefit(bp, mu, e, 0)
    alpha_w = weighted_independence_number(g)
    spread = (alpha_w - n) * c * e
    return BenefitBounds(
        lower8=base,
        upper8=n * mixed_benefit(bp, mu, n * e, 0),
        lower9=base + spread_ratio(gp, mu, n, e) * spread,
        upper9=base + spread,
    )


def limit_max_benefit(g: Graph, gp: GameParams, mu: float, regime: Regime) -> float:
    """Best equilibrium aggregate benefit in the sigma_b -> 0 or sigma_b -> 1 limit."""
    e = unilateral_effort(gp, mu)
    n = g.n
    base = n * mixed_benefit(gp.benefit, mu, e, 0)
    if Regime(regime) is Regime.SIGMA_TO_ZERO:
        return base
    return base - gp.cost * n * e + gp.cost * weighted_independence_number(g) * e
