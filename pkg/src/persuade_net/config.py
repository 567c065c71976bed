"""JSON run configuration.

Example::

    {
      "graph": {"generator": "erdos_renyi", "n": 8, "p": 0.5, "seed": 3},
      "benefit": {"family": "exponential", "H": 0.9, "L": 0.5},
      "cost": 0.3,
      "prior": 0.5,
      "objective": {"objective": "aggregate_effort", "attitude": "optimistic"},
      "grids": {"mu": 2001, "sweep": 101},
      "output": "out"
    }

A graph may instead come from ``{"edge_list": "graph.txt"}``.  Relative paths
are resolved against the directory holding the config file.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .benefit import BenefitPair, GameParams, benefit_from_dict
from .errors import ConfigError, InvalidBenefit
from .game import ENUMERATION_CAP, Regime
from .graph import GENERATORS, MIS_CAP, Graph, read_edge_list
from .persuasion import CLASS_TOL, DEAD_BAND, MU_GRID, Attitude, Objective, ObjectiveSpec

MIN_GRID = 11
_TOP_KEYS = {"graph", "benefit", "cost", "prior", "mu", "objective", "grids", "tolerances", "caps", "output"}
_GEN_ARGS = {
    "path": ("n",),
    "cycle": ("n",),
    "star": ("n",),
    "complete": ("n",),
    "erdos_renyi": ("n", "p", "seed"),
}


@dataclass(frozen=True)
class RunConfig:
    graph: Graph
    graph_spec: dict
    benefit: BenefitPair
    cost: float
    prior: float
    objective: ObjectiveSpec
    mu: float | None = None
    mu_grid: int = MU_GRID
    sweep_grid: int = 101
    dead_band: float = DEAD_BAND
    class_tol: float = CLASS_TOL
    enumeration_cap: int = ENUMERATION_CAP
    mis_cap: int = MIS_CAP
    output: Path = field(default_factory=lambda: Path("out"))

    @property
    def game(self) -> GameParams:
        return GameParams(self.benefit, self.cost, self.prior)

    @property
    def belief(self) -> float:
        """Belief at which equilibria are computed (defaults to the prior)."""
        return self.prior if self.mu is None else self.mu

    def override(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _number(d, key, default=None, lo=-math.inf, hi=math.inf, integer=False):
    v = d.get(key, default)
    if v is None:
        raise ConfigError(f"missing required field {key!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(f"{key!r} must be an integer, got {v!r}")
    if not (lo <= v <= hi) or not math.isfinite(v):
        raise ConfigError(f"{key!r}={v!r} outside [{lo}, {hi}]")
    return int(v) if integer else float(v)


def _graph(spec, base: Path) -> Graph:
    if not isinstance(spec, dict):
        raise ConfigError("'graph' must be an object")
    if "edge_list" in spec:
        path = Path(spec["edge_list"])
        if not path.is_absolute():
            path = base / path
        if not path.is_file():
            raise ConfigError(f"edge list {path} does not exist")
        n = spec.get("n")
        try:
            return read_edge_list(path, n=None if n is None else int(n), one_based=bool(spec.get("one_based", False)))
        except ValueError as exc:
            raise ConfigError(f"bad edge list {path}: {exc}") from None
    name = spec.get("generator")
    if name not in GENERATORS:
        raise ConfigError(f"unknown graph generator {name!r}; choose from {sorted(GENERATORS)}")
    args = []
    for key in _GEN_ARGS[name]:
        if key == "p":
            args.append(_number(spec, key, lo=0.0, hi=1.0))
        else:
            args.append(_number(spec, key, lo=0 if key == "seed" else 1, integer=True))
    try:
        return GENERATORS[name](*args)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _objective(spec) -> ObjectiveSpec:
    spec = spec or {}
    try:
        return ObjectiveSpec(
            Objective(spec.get("objective", "aggregate_effort")),
            Attitude(spec.get("attitude", "optimistic")),
            Regime(spec.get("regime", "sigma_to_zero")),
        )
    except ValueError as exc:
        raise ConfigError(f"bad objective: {exc}") from None


def config_from_dict(data: dict, base_dir=".") -> RunConfig:
    """Validate and build a :class:`RunConfig`.

    The prior may sit on the boundary {0, 1}; commands that need an interior
    prior report that separately.
    """
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
    base = Path(base_dir)
    if "graph" not in data or "benefit" not in data:
        raise ConfigError("config needs both 'graph' and 'benefit'")
    graph = _graph(data["graph"], base)
    try:
        benefit = benefit_from_dict(data["benefit"], base_dir=base)
        benefit.validate()
    except (InvalidBenefit, KeyError, ValueError, OSError) as exc:
        raise ConfigError(f"bad benefit: {exc}") from None
    cost = _number(data, "cost", lo=0.0)
    if cost <= 0:
        raise ConfigError("'cost' must be positive")
    prior = _number(data, "prior", 0.5, 0.0, 1.0)
    mu = None if data.get("mu") is None else _number(data, "mu", lo=0.0, hi=1.0)
    grids = data.get("grids", {})
    tols = data.get("tolerances", {})
    caps = data.get("caps", {})
    for name, block in (("grids", grids), ("tolerances", tols), ("caps", caps)):
        if not isinstance(block, dict):
            raise ConfigError(f"{name!r} must be an object")
    cfg = RunConfig(
        graph=graph,
        graph_spec=dict(data["graph"]),
        benefit=benefit,
        cost=cost,
        prior=prior,
        objective=_objective(data.get("objective")),
        mu=mu,
        mu_grid=_number(grids, "mu", MU_GRID, MIN_GRID, integer=True),
        sweep_grid=_number(grids, "sweep", 101, MIN_GRID, integer=True),
        dead_band=_number(tols, "dead_band", DEAD_BAND, 0.0),
        class_tol=_number(tols, "class", CLASS_TOL, 0.0),
        enumeration_cap=_number(caps, "enumeration", ENUMERATION_CAP, 1, 62, integer=True),
        mis_cap=_number(caps, "mis", MIS_CAP, 1, 62, integer=True),
        output=base / str(data.get("output", "out")),
    )
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(data, base_dir=path.parent)


EXAMPLE_PRESETS = {
    1: {"H": 0.9, "L": 0.5, "cost": 0.3, "prior": 0.5},
    2: {"H": 0.9, "L": 0.2, "cost": 0.3, "prior": 0.5},
}


def example_config(example: int, graph: dict | None = None, objective: dict | None = None) -> dict:
    """Config dict for one of the two built-in exponential examples (default graph: P_3)."""
    if example not in EXAMPLE_PRESETS:
        raise ConfigError(f"unknown example {example!r}; choose 1 or 2")
    p = EXAMPLE_PRESETS[example]
    return {
        "graph": graph or {"generator": "path", "n": 3},
        "benefit": {"family": "exponential", "H": p["H"], "L": p["L"]},
        "cost": p["cost"],
        "prior": p["prior"],
        "objective": objective or {"objective": "aggregate_effort", "attitude": "optimistic"},
    }
