"""Public signaling policies, reduced objectives over beliefs, and concavification.

A policy is the pair ``(p_l, p_h)`` of probabilities of truthfully signaling
the low and the high state.  Graph constants turn each government objective
into a scalar function of the public belief; its upper concave envelope at
the prior is the best value any policy can reach.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .benefit import (
    GameParams,
    clamp_belief,
    curvature_R,
    curvature_R_tilde,
    mixed_benefit,
    sufficient_Y_Z,
    unilateral_effort,
)
from .errors import DegenerateDerivative, PriorOnBoundary
from .game import Regime, weighted_independence_number
from .graph import Graph, independence_number, network_constant_m

MU_GRID = 2001
CLASS_TOL = 1e-9
DEAD_BAND = 1e-7


class Objective(str, Enum):
    AGGREGATE_EFFORT = "aggregate_effort"
    PROBABILITY_SAFE = "probability_safe"


class Attitude(str, Enum):
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"


class PolicyClass(str, Enum):
    FULL_DISCLOSURE = "full_disclosure"
    NO_DISCLOSURE = "no_disclosure"
    EXAGGERATION = "exaggeration"
    DOWNPLAY = "downplay"
    INTERMEDIATE = "intermediate"


class Signal(str, Enum):
    HIGH = "h"
    LOW = "l"


@dataclass(frozen=True)
class Policy:
    p_l: float
    p_h: float

    def __post_init__(self):
        for name in ("p_l", "p_h"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    def mirrored(self) -> "Policy":
        return Policy(1.0 - self.p_l, 1.0 - self.p_h)


@dataclass(frozen=True)
class ObjectiveSpec:
    objective: Objective
    attitude: Attitude
    regime: Regime = Regime.SIGMA_TO_ZERO

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective(self.objective))
        object.__setattr__(self, "attitude", Attitude(self.attitude))
        object.__setattr__(self, "regime", Regime(self.regime))

    @property
    def uses_regime(self):
        return self.objective is Objective.PROBABILITY_SAFE and self.attitude is Attitude.OPTIMISTIC

    def label(self):
        base = f"{self.objective.value}/{self.attitude.value}"
        return f"{base}/{self.regime.value}" if self.uses_regime else base


@dataclass(frozen=True, eq=False)
class ReducedObjective:
    """``O(mu)`` sampled on a belief grid; calling it interpolates linearly."""

    grid: np.ndarray
    values: np.ndarray
    effort: np.ndarray
    spec: ObjectiveSpec
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.values).all():
            raise ValueError("reduced objective has non-finite values")
        if (np.diff(self.grid) <= 0).any() or self.grid[0] != 0.0 or self.grid[-1] != 1.0:
            raise ValueError("belief grid must increase strictly from 0 to 1")

    def __call__(self, mu):
        out = np.interp(mu, self.grid, self.values)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class ConcaveEnvelope:
    """Upper concave envelope given by its hull vertices."""

    mu: np.ndarray
    value: np.ndarray

    def __call__(self, mu):
        out = np.interp(mu, self.mu, self.value)
        return float(out) if np.ndim(out) == 0 else out

    def slopes(self):
        return np.diff(self.value) / np.diff(self.mu)


@dataclass(frozen=True)
class OptimalPolicy:
    policy: Policy
    value: float
    posteriors: tuple  # (mu_l*, mu_h*)


# --- beliefs --------------------------------------------------------------------


def posterior(pol: Policy, mu0: float, signal) -> tuple[float, float]:
    """Posterior of the high state after ``signal`` and the signal's probability.

    A signal that is never sent returns ``(mu0, 0.0)``.
    """
    signal = Signal(signal)
    if signal is Signal.HIGH:
        joint = mu0 * pol.p_h
        prob = joint + (1.0 - mu0) * (1.0 - pol.p_l)
    else:
        joint = mu0 * (1.0 - pol.p_h)
        prob = joint + (1.0 - mu0) * pol.p_l
    if prob <= 0.0:
        return mu0, 0.0
    return joint / prob, prob


def graph_constants(g: Graph, spec: ObjectiveSpec | None = None) -> dict:
    """Graph constants the objective needs (all of them when ``spec`` is None)."""
    need = {"n"}
    if spec is None:
        need |= {"alpha", "m", "alpha_w"}
    elif spec.objective is Objective.AGGREGATE_EFFORT:
        need.add("alpha" if spec.attitude is Attitude.OPTIMISTIC else "m")
    elif spec.uses_regime and spec.regime is Regime.SIGMA_TO_ONE:
        need.add("alpha_w")
    out = {"n": g.n}
    if "alpha" in need:
        out["alpha"] = independence_number(g)
    if "m" in need:
        out["m"] = network_constant_m(g)
    if "alpha_w" in need:
        out["alpha_w"] = weighted_independence_number(g)
    return out


def belief_grid(size=MU_GRID, extra=()):
    grid = np.linspace(0.0, 1.0, int(size))
    if len(extra):
        grid = np.unique(np.concatenate([grid, np.asarray(extra, dtype=float)]))
    return grid


def reduced_values(spec: ObjectiveSpec, gp: GameParams, mu, constants: dict):
    """Evaluate the reduced objective at beliefs ``mu`` given the graph constants."""
    e = np.asarray(unilateral_effort(gp, mu), dtype=float)
    if spec.objective is Objective.AGGREGATE_EFFORT:
        factor = constants["alpha"] if spec.attitude is Attitude.OPTIMISTIC else constants["m"]
        return factor * e, e
    safe = np.asarray(mixed_benefit(gp.benefit, mu, e, 0), dtype=float)
    if spec.uses_regime and spec.regime is Regime.SIGMA_TO_ONE:
        safe = safe + gp.cost * e * (constants["alpha_w"] / constants["n"] - 1.0)
    return safe, e


def reduced_objective(spec: ObjectiveSpec, g: Graph, gp: GameParams, grid_size: int = MU_GRID) -> ReducedObjective:
    """The government objective as a function of the induced public belief.

    The prior is inserted into the grid so no-disclosure values are exact.
    """
    constants = graph_constants(g, spec)
    grid = belief_grid(grid_size, [gp.prior])
    values, e = reduced_values(spec, gp, grid, constants)
    return ReducedObjective(grid, values, e, spec, constants)


def concave_envelope(ro: ReducedObjective) -> ConcaveEnvelope:
    idx = kernels.upper_hull(ro.grid, ro.values)
    return ConcaveEnvelope(ro.grid[idx].copy(), ro.values[idx].copy())


def _envelope_tol(value):
    return 1e-12 * max(1.0, abs(value))


def optimal_policy(ro: ReducedObjective, env: ConcaveEnvelope, mu0: float) -> OptimalPolicy:
    """Split the prior onto the envelope segment containing it and invert to ``(p_l, p_h)``.

    When the objective already touches the envelope at the prior, the split is
    degenerate and the no-disclosure policy ``(0, 1)`` is returned.
    """
    if not 0.0 < mu0 < 1.0:
        raise PriorOnBoundary(f"prior {mu0} leaves no room for persuasion")
    value = env(mu0)
    if ro(mu0) >= value - _envelope_tol(value):
        return OptimalPolicy(Policy(0.0, 1.0), value, (mu0, mu0))
    j = int(np.searchsorted(env.mu, mu0, side="right"))
    mu_lo, mu_hi = float(env.mu[j - 1]), float(env.mu[j])
    lam = (mu0 - mu_lo) / (mu_hi - mu_lo)
    p_h = lam * mu_hi / mu0
    p_l = (1.0 - lam) * (1.0 - mu_lo) / (1.0 - mu0)
    pol = Policy(min(max(p_l, 0.0), 1.0), min(max(p_h, 0.0), 1.0))
    return OptimalPolicy(pol, value, (mu_lo, mu_hi))


def expected_objective(pol: Policy, ro: ReducedObjective, mu0: float) -> float:
    total = 0.0
    for s in Signal:
        mu, prob = posterior(pol, mu0, s)
        if prob > 0.0:
            total += prob * ro(mu)
    return total


def classify_policy(pol: Policy, tol: float = CLASS_TOL) -> PolicyClass:
    def near(a, b):
        return abs(a - b) <= tol

    p_l, p_h = pol.p_l, pol.p_h
    if (near(p_l, 1) and near(p_h, 1)) or (near(p_l, 0) and near(p_h, 0)):
        return PolicyClass.FULL_DISCLOSURE
    if near(p_l + p_h, 1.0):
        return PolicyClass.NO_DISCLOSURE
    if near(p_h, 0) or near(p_h, 1):
        return PolicyClass.EXAGGERATION
    if near(p_l, 0) or near(p_l, 1):
        return PolicyClass.DOWNPLAY
    return PolicyClass.INTERMEDIATE


@dataclass(frozen=True, eq=False)
class PolicySweep:
    p_l: np.ndarray
    p_h: np.ndarray
    values: np.ndarray  # values[i, j] belongs to (p_l[i], p_h[j])

    def argmax(self) -> Policy:
        i, j = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return Policy(float(self.p_l[i]), float(self.p_h[j]))


def policy_sweep(ro: ReducedObjective, mu0: float, size: int = 101) -> PolicySweep:
    axis = np.linspace(0.0, 1.0, int(size))
    values = kernels.policy_sweep(axis, axis, float(mu0), ro.grid, ro.values)
    return PolicySweep(axis, axis.copy(), values)


def symmetry_check(pol: Policy, ro: ReducedObjective, mu0: float) -> tuple[float, float]:
    """Discrepancies between ``pol`` and its mirror with the signals swapped."""
    mirror = pol.mirrored()
    gap = 0.0
    for s, s_c in ((Signal.HIGH, Signal.LOW), (Signal.LOW, Signal.HIGH)):
        mu_a, pr_a = posterior(pol, mu0, s)
        mu_b, pr_b = posterior(mirror, mu0, s_c)
        gap = max(gap, abs(pr_a - pr_b), abs(mu_a - mu_b) if pr_a > 0 else 0.0)
    obj_gap = abs(expected_objective(pol, ro, mu0) - expected_objective(mirror, ro, mu0))
    return gap, obj_gap


# --- curvature-based predictions ---------------------------------------------


@dataclass(frozen=True, eq=False)
class CurvatureReport:
    prediction: PolicyClass
    discriminant: str
    mu: np.ndarray  # interior beliefs the discriminants were evaluated at
    r: np.ndarray
    r_tilde: np.ndarray
    sign_changes: list
    indifferent: bool = False
    clamped_mu: np.ndarray = field(default_factory=lambda: np.empty(0))
    note: str = ""

    @property
    def defer_to_concavification(self):
        return len(self.clamped_mu) > 0


def _signs(d, band):
    return np.where(np.abs(d) <= band, 0, np.sign(d)).astype(int)


def _changes(mu, s):
    nz = np.flatnonzero(s)
    out = []
    for a, b in zip(nz[:-1], nz[1:]):
        if s[a] != s[b]:
            out.append(0.5 * (mu[a] + mu[b]))
    return out


def _single_discriminant(s):
    nz = s[s != 0]
    if len(nz) == 0:
        return None
    if (nz > 0).all():
        return PolicyClass.NO_DISCLOSURE
    if (nz < 0).all():
        return PolicyClass.FULL_DISCLOSURE
    flips = np.flatnonzero(np.diff(nz))
    if len(flips) == 1:
        return PolicyClass.EXAGGERATION if nz[0] < 0 else PolicyClass.DOWNPLAY
    return PolicyClass.INTERMEDIATE


def _split_exists(low_ok, high_ok):
    # some k with low_ok on [:k] and high_ok on [k:]
    n = len(low_ok)
    prefix = np.concatenate([[True], np.cumprod(low_ok).astype(bool)])
    suffix = np.concatenate([np.cumprod(high_ok[::-1])[::-1].astype(bool), [True]])
    return bool((prefix & suffix)[1:n].any())


def curvature_recommendation(spec: ObjectiveSpec, gp: GameParams, mu_grid=None, dead_band=DEAD_BAND) -> CurvatureReport:
    """Predict the optimal policy class from the signs of R and R~ over beliefs.

    Aggregate-effort objectives use R, the probability-safe ones use R~, and
    the optimistic sigma_b -> 1 case mixes them: R below the switching belief
    and R~ above it for exaggeration, mirrored for downplay.
    """
    mu = belief_grid() if mu_grid is None else np.asarray(mu_grid, dtype=float)
    e = np.asarray(unilateral_effort(gp, mu), dtype=float)
    interior = e > 0.0
    mu_in = mu[interior]
    r = np.asarray(curvature_R(gp, mu_in), dtype=float) if len(mu_in) else np.empty(0)
    rt = np.asarray(curvature_R_tilde(gp, mu_in), dtype=float) if len(mu_in) else np.empty(0)
    s_r, s_rt = _signs(r, dead_band), _signs(rt, dead_band)
    note = ""
    indifferent = False
    if spec.objective is Objective.AGGREGATE_EFFORT:
        name, signs = "R", s_r
    elif not (spec.uses_regime and spec.regime is Regime.SIGMA_TO_ONE):
        name, signs = "R_tilde", s_rt
    else:
        name, signs = "mixed", None
    if signs is not None:
        pred = _single_discriminant(signs)
        changes = _changes(mu_in, signs)
        if pred is None:
            pred, indifferent = PolicyClass.INTERMEDIATE, True
            note = f"{name} vanishes on every interior belief: all policies are equally good"
    else:
        changes = sorted(set(_changes(mu_in, s_r)) | set(_changes(mu_in, s_rt)))
        note = "mixed test: R governs beliefs below the switch and R~ above it (downplay mirrored)"
        if len(mu_in) and (s_rt > 0).all():
            pred = PolicyClass.NO_DISCLOSURE
        elif len(mu_in) and (s_r < 0).all():
            pred = PolicyClass.FULL_DISCLOSURE
        elif len(mu_in) and _split_exists(s_r <= 0, s_rt >= 0) and (s_r < 0).any() and (s_rt > 0).any():
            pred = PolicyClass.EXAGGERATION
        elif len(mu_in) and _split_exists(s_rt >= 0, s_r <= 0) and (s_rt > 0).any() and (s_r < 0).any():
            pred = PolicyClass.DOWNPLAY
        else:
            pred = PolicyClass.INTERMEDIATE
    clamped = mu[~interior]
    if len(clamped):
        kink = clamp_belief(gp)
        note = (note + "; " if note else "") + (
            f"effort is clamped at 0 for beliefs up to {kink:.6g}; defer to concavification"
        )
    return CurvatureReport(pred, name, mu_in, r, rt, changes, indifferent, clamped, note)


@dataclass(frozen=True, eq=False)
class SufficientReport:
    x: np.ndarray
    y: np.ndarray | None
    z: np.ndarray | None
    verdict: str
    error: str | None = None


def effort_range_grid(gp: GameParams, size=201):
    lo, hi = unilateral_effort(gp, np.array([0.0, 1.0]))
    if hi <= lo:
        lo, hi = 0.0, max(hi, 1.0)
    return np.linspace(lo, hi, size)


def sufficient_condition_report(gp: GameParams, x_grid=None, tol=DEAD_BAND) -> SufficientReport:
    """Check the belief-free sign conditions on Y and Z over an effort grid.

    ``Y < 0 and Z > 0`` everywhere makes no disclosure optimal for the
    aggregate-effort objectives; ``Y > 0 and Z < 0`` makes full disclosure
    optimal.  Default grid: the range of unilateral efforts ``[e*(0), e*(1)]``.
    """
    x = effort_range_grid(gp) if x_grid is None else np.asarray(x_grid, dtype=float)
    try:
        y, z = sufficient_Y_Z(gp.benefit, x)
    except DegenerateDerivative as exc:
        return SufficientReport(x, None, None, "degenerate", str(exc))
    y, z = np.atleast_1d(y), np.atleast_1d(z)
    if (y < 0).all() and (z > 0).all():
        verdict = "no information sufficient"
    elif (y > 0).all() and (z < 0).all():
        verdict = "full information sufficient"
    elif ((y <= tol).all() and (z >= -tol).all()) or ((y >= -tol).all() and (z <= tol).all()):
        verdict = "boundary - fall back to R"
    else:
        verdict = "inconclusive"
    return SufficientReport(x, y, z, verdict)
