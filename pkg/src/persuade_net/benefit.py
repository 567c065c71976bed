"""State-conditional benefit functions, the unilateral effort and its curvature diagnostics.

A benefit pair holds ``b(x; h)`` and ``b(x; l)``, the probability of staying
safe at neighbourhood effort ``x`` in the high and low infection state.  All
evaluators broadcast over numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.interpolate import make_interp_spline

from .errors import BracketFailure, DegenerateDerivative, InteriorRequired, InvalidBenefit

VALIDATION_POINTS = 512
VALIDATION_TOL = 1e-9
DEGENERATE_TOL = 1e-14
BRACKET_CAP = 2.0**60
ROOT_TOL = 1e-12
_MAX_BISECTIONS = 4000


class State(str, Enum):
    HIGH = "h"
    LOW = "l"


def _state(s) -> State:
    return s if isinstance(s, State) else State(s)


class BenefitPair:
    """Base class; subclasses implement ``_eval(x, state, order)``."""

    saturation_tol = 1e-6

    def _eval(self, x, state: State, order: int):
        raise NotImplementedError

    def validation_grid(self) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x, state, order=0):
        return benefit_eval(self, x, state, order)

    def validate(self):
        """Check range, monotonicity, concavity, ordering and saturation on the grid."""
        x = self.validation_grid()
        tol = VALIDATION_TOL
        bh, bl = self._eval(x, State.HIGH, 0), self._eval(x, State.LOW, 0)
        for name, b in (("h", bh), ("l", bl)):
            if (b < -tol).any() or (b > 1 + tol).any():
                raise InvalidBenefit(f"b(x;{name}) leaves [0, 1] on the validation grid")
            if (self._eval(x, _state(name), 1) < -tol).any():
                raise InvalidBenefit(f"b(x;{name}) is not increasing")
            if (self._eval(x, _state(name), 2) > tol).any():
                raise InvalidBenefit(f"b(x;{name}) is not concave")
            if abs(1.0 - b[-1]) > self.saturation_tol:
                raise InvalidBenefit(
                    f"b(x;{name}) does not saturate at 1: b({x[-1]:g}) = {b[-1]!r}"
                )
        if (bh > bl + tol).any() or not bh[0] < bl[0]:
            raise InvalidBenefit("need b(x;h) < b(x;l): the high state must be less safe")


@dataclass(frozen=True)
class Exponential(BenefitPair):
    """``b(x;h) = 1 - H e^{-x}``, ``b(x;l) = 1 - L e^{-x}``."""

    H: float
    L: float

    def __post_init__(self):
        if not (0 < self.L < self.H <= 1):
            raise InvalidBenefit(f"exponential family needs 0 < L < H <= 1, got H={self.H}, L={self.L}")
        self.validate()

    def _eval(self, x, state, order):
        scale = self.H if state is State.HIGH else self.L
        ex = scale * np.exp(-np.asarray(x, dtype=float))
        if order == 0:
            return 1.0 - ex
        return ex if order % 2 == 1 else -ex

    def validation_grid(self):
        return np.linspace(0.0, 60.0, VALIDATION_POINTS)


@dataclass(frozen=True)
class PowerSaturating(BenefitPair):
    """``b(x;i) = 1 - a_i (1+x)^{-p_i}``.

    ``p`` is the exponent of both states unless ``p_l`` sets a separate
    low-state exponent.
    """

    a_h: float
    a_l: float
    p: float
    p_l: float | None = None

    def __post_init__(self):
        if not (0 < self.a_l and 0 < self.a_h <= 1 and self.a_l <= 1):
            raise InvalidBenefit("power family needs amplitudes in (0, 1]")
        if self.p <= 0 or (self.p_l is not None and self.p_l <= 0):
            raise InvalidBenefit("power family needs positive exponents")
        self.validate()

    def _params(self, state):
        if state is State.HIGH:
            return self.a_h, self.p
        return self.a_l, self.p if self.p_l is None else self.p_l

    def _eval(self, x, state, order):
        a, p = self._params(state)
        u = 1.0 + np.asarray(x, dtype=float)
        if order == 0:
            return 1.0 - a * u**-p
        # d^k/dx^k of -a u^{-p} = -a (-p)(-p-1)...(-p-k+1) u^{-p-k}
        coef = -a
        for j in range(order):
            coef *= -p - j
        return coef * u ** (-p - order)

    def validation_grid(self):
        # far enough out that a (1+x)^{-p} < 1e-9 in both states
        decades = [math.log10(a / 1e-9) / q for a, q in (self._params(State.HIGH), self._params(State.LOW))]
        top = min(max(decades + [6.0]), 300.0)
        return np.concatenate([[0.0], np.logspace(-6.0, top, VALIDATION_POINTS - 1)])


@dataclass(frozen=True, eq=False)
class Tabulated(BenefitPair):
    """Benefit pair interpolated from samples by a quintic B-spline.

    A quintic spline has a continuous third derivative, which the curvature
    formulas need.  At least six strictly increasing samples are required;
    the last sample must already be saturated within ``saturation_tol``.
    """

    x: np.ndarray
    b_h: np.ndarray
    b_l: np.ndarray
    saturation_tol: float = 1e-3
    _splines: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        bh = np.asarray(self.b_h, dtype=float)
        bl = np.asarray(self.b_l, dtype=float)
        if not (x.ndim == bh.ndim == bl.ndim == 1 and len(x) == len(bh) == len(bl)):
            raise InvalidBenefit("tabulated samples must be three equal-length columns")
        if len(x) < 6:
            raise InvalidBenefit("tabulated family needs at least 6 samples")
        if (np.diff(x) <= 0).any() or x[0] < 0:
            raise InvalidBenefit("sample abscissae must be nonnegative and strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "b_h", bh)
        object.__setattr__(self, "b_l", bl)
        object.__setattr__(
            self,
            "_splines",
            {State.HIGH: make_interp_spline(x, bh, k=5), State.LOW: make_interp_spline(x, bl, k=5)},
        )
        self.validate()

    @classmethod
    def from_csv(cls, path, saturation_tol=1e-3):
        """Read a CSV with header ``x,b_h,b_l``."""
        data = np.genfromtxt(Path(path), delimiter=",", names=True)
        missing = {"x", "b_h", "b_l"} - set(data.dtype.names or ())
        if missing:
            raise InvalidBenefit(f"{path}: missing columns {sorted(missing)}")
        return cls(data["x"], data["b_h"], data["b_l"], saturation_tol=saturation_tol)

    def _eval(self, x, state, order):
        return self._splines[state](np.asarray(x, dtype=float), nu=order)

    def validation_grid(self):
        return np.linspace(self.x[0], self.x[-1], VALIDATION_POINTS)


def benefit_from_dict(spec: dict, base_dir=None) -> BenefitPair:
    """Build a family from its JSON form, e.g. ``{"family": "exponential", "H": 0.9, "L": 0.5}``."""
    spec = dict(spec)
    family = spec.pop("family", None)
    if family == "exponential":
        return Exponential(float(spec["H"]), float(spec["L"]))
    if family == "power_saturating":
        p_l = spec.get("p_l")
        return PowerSaturating(
            float(spec["a_h"]), float(spec["a_l"]), float(spec["p"]), None if p_l is None else float(p_l)
        )
    if family == "tabulated":
        path = Path(spec["csv"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return Tabulated.from_csv(path, saturation_tol=float(spec.get("saturation_tol", 1e-3)))
    raise InvalidBenefit(f"unknown benefit family {family!r}")


def benefit_to_dict(bp: BenefitPair) -> dict:
    if isinstance(bp, Exponential):
        return {"family": "exponential", "H": bp.H, "L": bp.L}
    if isinstance(bp, PowerSaturating):
        out = {"family": "power_saturating", "a_h": bp.a_h, "a_l": bp.a_l, "p": bp.p}
        if bp.p_l is not None:
            out["p_l"] = bp.p_l
        return out
    return {"family": "tabulated", "samples": len(bp.x)}


# --- evaluation ---------------------------------------------------------------


def _check_order(order):
    if order not in (0, 1, 2, 3):
        raise ValueError(f"derivative order must be 0..3, got {order}")


def benefit_eval(bp: BenefitPair, x, state, order=0):
    _check_order(order)
    out = bp._eval(np.asarray(x, dtype=float), _state(state), order)
    return float(out) if np.ndim(out) == 0 else out


def mixed_benefit(bp: BenefitPair, mu, x, order=0):
    """``mu * b(x;h) + (1 - mu) * b(x;l)`` (or its ``order``-th x-derivative)."""
    _check_order(order)
    mu = np.asarray(mu, dtype=float)
    x = np.asarray(x, dtype=float)
    out = mu * bp._eval(x, State.HIGH, order) + (1.0 - mu) * bp._eval(x, State.LOW, order)
    return float(out) if np.ndim(out) == 0 else out


def delta_b(bp: BenefitPair, x, order=0):
    """``b(x;l) - b(x;h)`` and its derivatives."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    out = bp._eval(x, State.LOW, order) - bp._eval(x, State.HIGH, order)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class GameParams:
    """Benefit pair, marginal effort cost ``c`` and prior probability of the high state."""

    benefit: BenefitPair
    cost: float
    prior: float = 0.5

    def __post_init__(self):
        if not (self.cost > 0 and math.isfinite(self.cost)):
            raise ValueError(f"cost must be positive, got {self.cost}")
        if not 0.0 <= self.prior <= 1.0:
            raise ValueError(f"prior must lie in [0, 1], got {self.prior}")

    @cached_property
    def a1_holds(self) -> bool:
        """Unilateral effort nondecreasing in the belief (checked on a 101-point grid)."""
        e = unilateral_effort(self, np.linspace(0.0, 1.0, 101))
        return bool((np.diff(e) >= -ROOT_TOL).all() and e[-1] > e[0])

    @cached_property
    def a2_holds(self) -> bool:
        """``c < b'(0; l)``: positive effort even under certainty of the low state."""
        return bool(self.cost < benefit_eval(self.benefit, 0.0, State.LOW, 1))

    def with_prior(self, prior):
        return GameParams(self.benefit, self.cost, prior)


def _beliefs(mu):
    mu = np.asarray(mu, dtype=float)
    if ((mu < 0) | (mu > 1) | ~np.isfinite(mu)).any():
        raise ValueError("beliefs must lie in [0, 1]")
    return mu


def unilateral_effort(gp: GameParams, mu):
    """Effort ``e*`` solving ``mu b'(e;h) + (1-mu) b'(e;l) = c``, clamped at 0.

    Bisection with bracket doubling from ``[0, 1]``.  Iteration continues past
    the 1e-12 target down to floating-point resolution, so finite differences of
    ``e*(mu)`` stay meaningful.
    """
    mu_arr = _beliefs(mu)
    flat = mu_arr.ravel()
    bp, c = gp.benefit, gp.cost

    def excess(x):
        return mixed_benefit(bp, flat, x, 1) - c

    active = np.asarray(excess(np.zeros_like(flat)) > 0.0)
    lo = np.zeros_like(flat)
    hi = np.ones_like(flat)
    need = active & (excess(hi) > 0.0)
    while need.any():
        lo = np.where(need, hi, lo)
        hi = np.where(need, 2.0 * hi, hi)
        if (hi > BRACKET_CAP).any():
            raise BracketFailure(
                f"marginal mixed benefit stays above c={c} beyond effort {BRACKET_CAP:g}"
            )
        need = active & (excess(hi) > 0.0)
    for _ in range(_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        going = active & (mid > lo) & (mid < hi)
        if not going.any():
            break
        above = excess(mid) > 0.0
        lo = np.where(going & above, mid, lo)
        hi = np.where(going & ~above, mid, hi)
    out = np.where(active, 0.5 * (lo + hi), 0.0).reshape(mu_arr.shape)
    return float(out) if out.ndim == 0 else out


def clamp_belief(gp: GameParams):
    """Belief at which ``b~'(0; mu) = c``, or ``None`` when no belief is clamped to zero effort."""
    s_l = benefit_eval(gp.benefit, 0.0, State.LOW, 1)
    s_h = benefit_eval(gp.benefit, 0.0, State.HIGH, 1)
    if gp.cost < min(s_l, s_h):
        return None
    if s_h == s_l:
        return 1.0
    mu = (gp.cost - s_l) / (s_h - s_l)
    return float(min(max(mu, 0.0), 1.0))


def _interior_effort(gp, mu):
    e = np.asarray(unilateral_effort(gp, mu), dtype=float)
    if (e <= 0.0).any():
        raise InteriorRequired("unilateral effort is clamped at 0 for some belief")
    return e


def e_star_derivatives(gp: GameParams, mu):
    """First and second belief-derivatives of the unilateral effort."""
    mu = _beliefs(mu)
    e = _interior_effort(gp, mu)
    bp = gp.benefit
    d2 = mixed_benefit(bp, mu, e, 2)
    d3 = mixed_benefit(bp, mu, e, 3)
    first = delta_b(bp, e, 1) / d2
    gap2 = benefit_eval(bp, e, State.HIGH, 2) - benefit_eval(bp, e, State.LOW, 2)
    second = first / (-d2) * (d3 * first + 2.0 * gap2)
    if np.ndim(first) == 0:
        return float(first), float(second)
    return first, second


def _ratio(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    if (np.abs(den) < DEGENERATE_TOL).any():
        raise DegenerateDerivative("denominator below 1e-14")
    out = -num / den
    return float(out) if out.ndim == 0 else out


def risk_aversion(f1, f2):
    """Absolute risk aversion ``-f''/f'``."""
    return _ratio(f2, f1)


def prudence(f2, f3):
    """Absolute prudence ``-f'''/f''``."""
    return _ratio(f3, f2)


def _curvature_terms(gp, mu):
    mu = _beliefs(mu)
    e = _interior_effort(gp, mu)
    bp = gp.benefit
    a_delta = risk_aversion(delta_b(bp, e, 1), delta_b(bp, e, 2))
    b1, b2, b3 = (mixed_benefit(bp, mu, e, k) for k in (1, 2, 3))
    return a_delta, prudence(b2, b3), risk_aversion(b1, b2)


def curvature_R(gp: GameParams, mu):
    """``2 A(delta b) - P(b~)`` at ``e*(mu)``; its sign is minus the sign of ``e*''(mu)``.

    Twice the half-weighted form ``A(delta b) - P(b~)/2``; only the sign matters.
    """
    a_delta, p_mix, _ = _curvature_terms(gp, mu)
    return 2.0 * a_delta - p_mix


def curvature_R_tilde(gp: GameParams, mu):
    """``R - A(b~)`` at ``e*(mu)``; its sign is minus the sign of ``d^2/dmu^2 b~(e*(mu); mu)``."""
    a_delta, p_mix, a_mix = _curvature_terms(gp, mu)
    return 2.0 * a_delta - p_mix - a_mix


def sufficient_Y_Z(bp: BenefitPair, x):
    """Belief-free terms with ``R > 0  <=>  mu * Y < Z`` at effort ``x``."""
    d1, d2, d3 = (delta_b(bp, x, k) for k in (1, 2, 3))
    if (np.abs(np.asarray(d1)) < DEGENERATE_TOL).any():
        raise DegenerateDerivative("delta b' vanishes; Y and Z are undefined")
    r = np.asarray(d2) / np.asarray(d1)
    y = 2.0 * r * d2 - d3
    z = 2.0 * r * benefit_eval(bp, x, State.LOW, 2) - benefit_eval(bp, x, State.LOW, 3)
    if np.ndim(y) == 0:
        return float(y), float(z)
    return y, z


def sigma_b(gp: GameParams, mu, n: int):
    """``(b~(n e*) - b~(e*)) / (c e* (n-1))`` for the mixed benefit at belief ``mu``."""
    if n < 2:
        raise ValueError("sigma_b needs n >= 2")
    mu = _beliefs(mu)
    e = _interior_effort(gp, mu)
    bp = gp.benefit
    out = (mixed_benefit(bp, mu, n * e, 0) - mixed_benefit(bp, mu, e, 0)) / (gp.cost * e * (n - 1))
    return float(out) if np.ndim(out) == 0 else out
