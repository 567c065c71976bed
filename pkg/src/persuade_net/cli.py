"""``persuade-net`` command line.

Exit codes: 0 success, 2 enumeration cap exceeded, 3 prior on the boundary,
4 invalid configuration.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import BACKEND
from .benefit import benefit_to_dict, clamp_belief, mixed_benefit, unilateral_effort
from .config import EXAMPLE_PRESETS, RunConfig, config_from_dict, example_config, load_config
from .errors import CapExceeded, ConfigError, PriorOnBoundary, SingularAfterReduction
from .game import (
    aggregate_benefit,
    aggregate_effort,
    classify_equilibrium,
    enumerate_equilibria,
    spread_ratio,
    weighted_independence_number,
)
from .graph import independence_number, network_constant_m
from .output import atomic_write_text, heatmap_svg, line_chart_svg, write_csv, write_json
from .persuasion import (
    Attitude,
    Objective,
    ObjectiveSpec,
    Policy,
    classify_policy,
    concave_envelope,
    curvature_recommendation,
    optimal_policy,
    policy_sweep,
    posterior,
    reduced_objective,
    sufficient_condition_report,
    symmetry_check,
)

EXIT_OK, EXIT_CAP, EXIT_PRIOR, EXIT_CONFIG = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _constants(cfg: RunConfig) -> dict:
    g = cfg.graph
    out = {"n": g.n, "edges": len(g.edges)}
    out["alpha"] = independence_number(g, cfg.mis_cap)
    out["alpha_w"] = weighted_independence_number(g) if g.n <= cfg.mis_cap else None
    try:
        out["m"] = network_constant_m(g)
    except SingularAfterReduction as exc:
        out["m"] = None
        out["m_error"] = str(exc)
    return out


def _metadata(cfg: RunConfig, command: str, **extra) -> dict:
    meta = {
        "command": command,
        "version": __version__,
        "graph": cfg.graph_spec,
        "benefit": benefit_to_dict(cfg.benefit),
        "cost": cfg.cost,
        "prior": cfg.prior,
        "objective": cfg.objective.label(),
        "grids": {"mu": cfg.mu_grid, "sweep": cfg.sweep_grid},
    }
    meta.update(extra)
    return meta


def cmd_equilibria(cfg: RunConfig, out: Path) -> dict:
    """Enumerate all equilibria at the configured belief and write them as CSV."""
    g, gp = cfg.graph, cfg.game
    mu = cfg.belief
    e = unilateral_effort(gp, mu)
    eqs = enumerate_equilibria(g, e, cap=cfg.enumeration_cap)
    rows = []
    for prof in eqs:
        cls = classify_equilibrium(g, prof.x, e)
        rows.append(
            [cls.value, *prof.x.tolist(), aggregate_effort(prof.x), aggregate_benefit(g, prof.x, gp.benefit, mu)]
        )
    header = ["class", *(f"x_{k}" for k in range(g.n)), "aggregate_effort", "aggregate_benefit"]
    write_csv(out / "equilibria.csv", header, rows)
    summary = {
        "belief": mu,
        "unilateral_effort": e,
        "equilibria": len(rows),
        "constants": _constants(cfg),
        "parametric_note": eqs.parametric_note,
        "singular_supports": eqs.singular_supports,
    }
    write_json(out / "equilibria.json", _metadata(cfg, "equilibria", summary=summary))
    return summary


def _policy_report(cfg: RunConfig, gp, spec: ObjectiveSpec, mu0: float, grid: int) -> tuple[dict, object, object]:
    ro = reduced_objective(spec, cfg.graph, gp, grid_size=grid)
    env = concave_envelope(ro)
    best = optimal_policy(ro, env, mu0)
    pol = best.policy
    cls = classify_policy(pol, cfg.class_tol)
    curv = curvature_recommendation(spec, gp, ro.grid, cfg.dead_band)
    suff = sufficient_condition_report(gp)
    gap, obj_gap = symmetry_check(pol, ro, mu0)
    signals = {}
    for s in ("h", "l"):
        mu_s, prob = posterior(pol, mu0, s)
        signals[s] = {"posterior": mu_s, "probability": prob}
    report = {
        "objective": spec.label(),
        "prior": mu0,
        "policy": {"p_l": pol.p_l, "p_h": pol.p_h},
        "value": best.value,
        "objective_at_prior": ro(mu0),
        "class": cls.value,
        "posteriors": {"mu_l": best.posteriors[0], "mu_h": best.posteriors[1]},
        "signals": signals,
        "curvature": {
            "prediction": curv.prediction.value,
            "discriminant": curv.discriminant,
            "indifferent": curv.indifferent,
            "sign_changes": curv.sign_changes,
            "R_range": [float(curv.r.min()), float(curv.r.max())] if len(curv.r) else None,
            "R_tilde_range": [float(curv.r_tilde.min()), float(curv.r_tilde.max())] if len(curv.r_tilde) else None,
            "clamped_up_to": clamp_belief(gp) if curv.defer_to_concavification else None,
            "defer_to_concavification": curv.defer_to_concavification,
            "note": curv.note,
        },
        "sufficient_condition": {"verdict": suff.verdict, "error": suff.error},
        "symmetry": {"posterior_discrepancy": gap, "objective_discrepancy": obj_gap},
        "constants": ro.constants,
    }
    if spec.uses_regime:
        report["sigma_b"] = {
            s: spread_ratio(gp, v["posterior"], cfg.graph.n, unilateral_effort(gp, v["posterior"]))
            for s, v in signals.items()
            if v["probability"] > 0
        }
    return report, ro, env


def cmd_policy(cfg: RunConfig, out: Path) -> dict:
    """Reduced objective, envelope and optimal policy at the prior."""
    gp = cfg.game
    report, ro, env = _policy_report(cfg, gp, cfg.objective, cfg.prior, cfg.mu_grid)
    rows = zip(ro.grid, ro.values, env(ro.grid))
    write_csv(out / "envelope.csv", ["mu", "objective", "envelope"], rows)
    write_json(out / "policy.json", _metadata(cfg, "policy", report=report))
    return report


def _sweep(cfg: RunConfig, gp, spec, size, out: Path, stem: str, title: str) -> dict:
    ro = reduced_objective(spec, cfg.graph, gp, grid_size=cfg.mu_grid)
    sw = policy_sweep(ro, gp.prior, size)
    rows = []
    for i, pl in enumerate(sw.p_l):
        for j, ph in enumerate(sw.p_h):
            cls = classify_policy(Policy(float(pl), float(ph)), cfg.class_tol)
            rows.append([pl, ph, sw.values[i, j], cls.value])
    write_csv(out / f"{stem}.csv", ["p_l", "p_h", "expected_objective", "class"], rows)
    best = sw.argmax()
    svg = heatmap_svg(sw.p_l, sw.p_h, sw.values, title=title, argmax=(best.p_l, best.p_h))
    atomic_write_text(out / f"{stem}.svg", svg)
    return {"argmax": {"p_l": best.p_l, "p_h": best.p_h}, "max": float(sw.values.max()), "size": size}


def cmd_sweep(cfg: RunConfig, out: Path) -> dict:
    """Expected objective on a (p_l, p_h) grid, as CSV and an SVG heat map."""
    summary = _sweep(cfg, cfg.game, cfg.objective, cfg.sweep_grid, out, "sweep", cfg.objective.label())
    write_json(out / "sweep.json", _metadata(cfg, "sweep", summary=summary))
    return summary


def cmd_reproduce(cfg: RunConfig, example: int, out: Path) -> dict:
    """Effort and objective curves plus sweeps for one of the built-in examples."""
    gp = cfg.game
    mu = np.linspace(0.0, 1.0, cfg.mu_grid)
    e = unilateral_effort(gp, mu)
    safe = mixed_benefit(gp.benefit, mu, e, 0)
    write_csv(out / "effort.csv", ["mu", "e_star", "mixed_benefit_at_e_star"], zip(mu, e, safe))
    atomic_write_text(
        out / "effort.svg", line_chart_svg(mu, {"e*(mu)": e}, title=f"Example {example}: unilateral effort")
    )
    atomic_write_text(
        out / "safety.svg",
        line_chart_svg(mu, {"b~(e*(mu); mu)": safe}, title=f"Example {example}: probability safe"),
    )
    policies = {}
    specs = [
        ObjectiveSpec(Objective.AGGREGATE_EFFORT, Attitude.OPTIMISTIC),
        ObjectiveSpec(Objective.AGGREGATE_EFFORT, Attitude.PESSIMISTIC),
        ObjectiveSpec(Objective.PROBABILITY_SAFE, Attitude.PESSIMISTIC),
    ]
    for spec in specs:
        report, _, _ = _policy_report(cfg, gp, spec, cfg.prior, cfg.mu_grid)
        stem = "sweep_" + spec.label().replace("/", "_")
        report["sweep"] = _sweep(cfg, gp, spec, cfg.sweep_grid, out, stem, spec.label())
        policies[spec.label()] = report
    interior = e[1:-1] > 0
    second = np.diff(e, 2)
    meta = _metadata(
        cfg,
        "reproduce",
        example=example,
        preset=EXAMPLE_PRESETS[example],
        constants=_constants(cfg),
        clamp_belief=clamp_belief(gp),
        max_interior_second_difference=float(second[interior].max()) if interior.any() else None,
        policies=policies,
    )
    write_json(out / "metadata.json", meta)
    return meta


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="persuade-net", description="Networked public-goods games and optimal public signaling.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} backend)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (
        ("equilibria", "enumerate equilibria at a belief"),
        ("policy", "optimal signaling policy at the prior"),
        ("sweep", "expected objective over the policy grid"),
        ("reproduce", "regenerate the built-in example figures"),
    ):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", type=Path, required=name != "reproduce", help="JSON run configuration")
        s.add_argument("--out", type=Path, help="output directory (default: config 'output')")
        s.add_argument("--mu", type=float, help="belief for equilibria, prior for the other commands")
        s.add_argument("--grid", type=int, help="belief grid size (policy, reproduce) or policy grid size (sweep)")
        if name == "reproduce":
            s.add_argument("--example", type=int, choices=sorted(EXAMPLE_PRESETS), required=True)
    return p


def _resolve(args) -> RunConfig:
    if args.command == "reproduce":
        base = example_config(args.example)
        if args.config is not None:
            user = load_config(args.config)
            base["graph"] = user.graph_spec
            cfg = config_from_dict(base, base_dir=args.config.parent)
        else:
            cfg = config_from_dict(base)
    else:
        cfg = load_config(args.config)
    if args.mu is not None:
        if not 0.0 <= args.mu <= 1.0:
            raise ConfigError(f"--mu must lie in [0, 1], got {args.mu}")
        cfg = cfg.override(mu=args.mu) if args.command == "equilibria" else cfg.override(prior=args.mu)
    if args.grid is not None:
        if args.grid < 11:
            raise ConfigError("--grid must be at least 11")
        cfg = cfg.override(sweep_grid=args.grid) if args.command == "sweep" else cfg.override(mu_grid=args.grid)
    return cfg


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _resolve(args)
        out = args.out or cfg.output
        if args.command == "equilibria":
            res = cmd_equilibria(cfg, out)
            c = res["constants"]
            print(
                f"{res['equilibria']} equilibria at mu={res['belief']:g} (e*={res['unilateral_effort']:.6g}); "
                f"n={c['n']} alpha={c['alpha']} alpha_w={c['alpha_w']} m={c['m']}"
            )
        elif args.command == "policy":
            if not 0.0 < cfg.prior < 1.0:
                raise PriorOnBoundary(f"prior {cfg.prior} must lie strictly inside (0, 1)")
            res = cmd_policy(cfg, out)
            pol = res["policy"]
            print(
                f"{res['objective']}: policy (p_l={pol['p_l']:.6g}, p_h={pol['p_h']:.6g}) "
                f"class={res['class']} value={res['value']:.10g} curvature={res['curvature']['prediction']}"
            )
        elif args.command == "sweep":
            if not 0.0 < cfg.prior < 1.0:
                raise PriorOnBoundary(f"prior {cfg.prior} must lie strictly inside (0, 1)")
            res = cmd_sweep(cfg, out)
            print(f"argmax (p_l={res['argmax']['p_l']:g}, p_h={res['argmax']['p_h']:g}) value={res['max']:.10g}")
        else:
            if not 0.0 < cfg.prior < 1.0:
                raise PriorOnBoundary(f"prior {cfg.prior} must lie strictly inside (0, 1)")
            res = cmd_reproduce(cfg, args.example, out)
            for label, rep in res["policies"].items():
                print(f"{label}: class={rep['class']} sweep argmax={rep['sweep']['argmax']}")
        print(f"wrote {out}")
        return EXIT_OK
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except PriorOnBoundary as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRIOR
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
