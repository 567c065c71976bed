import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from persuade_net import (
    Attitude,
    Exponential,
    GameParams,
    Graph,
    Objective,
    ObjectiveSpec,
    Policy,
    PolicyClass,
    PowerSaturating,
    PriorOnBoundary,
    ReducedObjective,
    classify_policy,
    concave_envelope,
    curvature_R,
    curvature_R_tilde,
    curvature_recommendation,
    expected_objective,
    optimal_policy,
    path_graph,
    policy_sweep,
    posterior,
    reduced_objective,
    sufficient_condition_report,
    symmetry_check,
    unilateral_effort,
)
from persuade_net.benefit import BenefitPair, State
from persuade_net.game import Regime
from persuade_net.persuasion import belief_grid

AE_OPT = ObjectiveSpec(Objective.AGGREGATE_EFFORT, Attitude.OPTIMISTIC)
AE_PES = ObjectiveSpec(Objective.AGGREGATE_EFFORT, Attitude.PESSIMISTIC)
PS_PES = ObjectiveSpec(Objective.PROBABILITY_SAFE, Attitude.PESSIMISTIC)
PS_ONE = ObjectiveSpec(Objective.PROBABILITY_SAFE, Attitude.OPTIMISTIC, Regime.SIGMA_TO_ONE)

# R changes sign once, from - to +, near mu = 0.43
CROSSING = GameParams(PowerSaturating(0.9, 0.2, 0.5, 1.0), 0.05, 0.3)


def synthetic(fn, size=2001):
    grid = belief_grid(size)
    values = fn(grid)
    return ReducedObjective(grid, values, np.zeros_like(grid), AE_OPT)


def tangency_belief(H=0.9, L=0.2, c=0.3):
    # chord from (0, 0) touching f(mu) = ln((L + mu (H - L)) / c)
    f = lambda m: math.log((L + m * (H - L)) / c) - m * (H - L) / (L + m * (H - L))
    return brentq(f, (c - L) / (H - L) + 1e-9, 1.0, xtol=1e-15)


def test_posterior_examples():
    assert posterior(Policy(1, 1), 0.5, "h") == (1.0, 0.5)
    mu, prob = posterior(Policy(0.5, 1.0), 0.4, "h")
    assert mu == pytest.approx(4 / 7, abs=1e-15) and prob == pytest.approx(0.7, abs=1e-15)
    for mu0 in (0.1, 0.5, 0.9):
        for s in "hl":
            assert posterior(Policy(0.3, 0.7), mu0, s)[0] == pytest.approx(mu0, abs=1e-15)
    assert posterior(Policy(1, 1), 0.5, "h")[1] + posterior(Policy(1, 1), 0.5, "l")[1] == 1.0
    # a signal that is never sent
    assert posterior(Policy(0.0, 1.0), 0.3, "l") == (0.3, 0.0)


def test_policy_validation():
    with pytest.raises(ValueError):
        Policy(1.2, 0.5)


def test_reduced_objective_examples(example1):
    ro = reduced_objective(PS_PES, path_graph(3), example1)
    assert np.allclose(ro.values, 0.7, atol=1e-10)
    ro = reduced_objective(AE_OPT, path_graph(3), example1)
    assert ro(1.0) == pytest.approx(2 * math.log(3), abs=1e-12)
    assert ro.constants == {"n": 3, "alpha": 2}
    single = Graph(1)
    e = unilateral_effort(example1, belief_grid())
    for spec in (AE_OPT, AE_PES):
        assert np.allclose(reduced_objective(spec, single, example1).values[:: 200], e[:: 200])
    b = reduced_objective(PS_PES, single, example1).values
    for spec in (ObjectiveSpec("probability_safe", "optimistic"), PS_ONE):
        assert np.allclose(reduced_objective(spec, single, example1).values, b)


def test_reduced_objective_inserts_prior():
    gp = GameParams(Exponential(0.9, 0.5), 0.3, 0.123456)
    ro = reduced_objective(AE_OPT, path_graph(3), gp)
    assert 0.123456 in ro.grid and len(ro.grid) == 2002


def test_envelope_of_concave_curve(example1):
    ro = reduced_objective(AE_OPT, path_graph(3), example1)
    env = concave_envelope(ro)
    assert np.max(np.abs(env(ro.grid) - ro.values)) < 1e-12


def test_envelope_of_convex_curve():
    ro = synthetic(lambda m: m**2)
    env = concave_envelope(ro)
    assert env.mu.tolist() == [0.0, 1.0]
    assert np.allclose(env(ro.grid), ro.grid)


def test_envelope_invariants_example2(example2):
    ro = reduced_objective(AE_OPT, path_graph(3), example2)
    env = concave_envelope(ro)
    assert np.all(env(ro.grid) >= ro.values - 1e-15)
    assert np.all(np.diff(env.slopes()) <= 1e-12)
    assert np.allclose(env.value, ro(env.mu), atol=0)
    mu_t = tangency_belief()
    # below the tangency the envelope is the chord from the origin
    assert env.mu[0] == 0.0 and abs(env.mu[1] - mu_t) < 1e-3
    e_t = 2 * math.log((0.2 + 0.7 * mu_t) / 0.3)
    assert env(0.3) == pytest.approx(0.3 / mu_t * e_t, rel=1e-6)


def test_optimal_policy_example1_no_disclosure(example1):
    for spec in (AE_OPT, AE_PES):
        ro = reduced_objective(spec, path_graph(3), example1)
        best = optimal_policy(ro, concave_envelope(ro), 0.5)
        assert best.policy.p_l + best.policy.p_h == pytest.approx(1.0, abs=1e-12)
        assert classify_policy(best.policy) is PolicyClass.NO_DISCLOSURE
        assert best.value == pytest.approx(ro(0.5), abs=1e-12)


def test_optimal_policy_convex_full_disclosure():
    ro = synthetic(lambda m: m**2)
    best = optimal_policy(ro, concave_envelope(ro), 0.5)
    assert best.posteriors == (0.0, 1.0)
    assert (best.policy.p_l, best.policy.p_h) == pytest.approx((1.0, 1.0))
    assert best.value == pytest.approx(0.5)
    assert classify_policy(best.policy) is PolicyClass.FULL_DISCLOSURE


def test_optimal_policy_example2_exaggeration(example2):
    ro = reduced_objective(AE_OPT, path_graph(3), example2)
    best = optimal_policy(ro, concave_envelope(ro), 0.5)
    mu_t = tangency_belief()
    assert best.policy.p_h == 1.0
    assert best.policy.p_l == pytest.approx((1 - 0.5 / mu_t) / 0.5, abs=5e-3)
    assert classify_policy(best.policy) is PolicyClass.EXAGGERATION


def test_optimal_policy_round_trips(example2):
    for mu0 in (0.2, 0.35, 0.5):
        ro = reduced_objective(AE_PES, path_graph(3), example2.with_prior(mu0))
        best = optimal_policy(ro, concave_envelope(ro), mu0)
        mu_h, _ = posterior(best.policy, mu0, "h")
        mu_l, _ = posterior(best.policy, mu0, "l")
        assert (mu_l, mu_h) == pytest.approx(best.posteriors, abs=1e-9)
        assert expected_objective(best.policy, ro, mu0) == pytest.approx(best.value, abs=1e-9)


def test_prior_on_boundary(example1):
    ro = reduced_objective(AE_OPT, path_graph(3), example1)
    env = concave_envelope(ro)
    for mu0 in (0.0, 1.0):
        with pytest.raises(PriorOnBoundary):
            optimal_policy(ro, env, mu0)


def test_expected_objective_special_policies(example2):
    ro = reduced_objective(AE_OPT, path_graph(3), example2)
    assert expected_objective(Policy(0.3, 0.7), ro, 0.4) == pytest.approx(ro(0.4), abs=1e-14)
    assert expected_objective(Policy(1, 1), ro, 0.4) == pytest.approx(0.4 * ro(1.0) + 0.6 * ro(0.0), abs=1e-14)


@pytest.mark.parametrize(
    "pol,cls",
    [
        ((1, 1), PolicyClass.FULL_DISCLOSURE),
        ((0, 0), PolicyClass.FULL_DISCLOSURE),
        ((0.3, 0.7), PolicyClass.NO_DISCLOSURE),
        ((0, 1), PolicyClass.NO_DISCLOSURE),
        ((0.4, 1), PolicyClass.EXAGGERATION),
        ((0.4, 0), PolicyClass.EXAGGERATION),
        ((1, 0.4), PolicyClass.DOWNPLAY),
        ((0, 0.4), PolicyClass.DOWNPLAY),
        ((0.2, 0.3), PolicyClass.INTERMEDIATE),
    ],
)
def test_classify_policy(pol, cls):
    assert classify_policy(Policy(*pol)) is cls


def test_curvature_recommendation_examples(example1):
    rep = curvature_recommendation(AE_OPT, example1)
    assert rep.prediction is PolicyClass.NO_DISCLOSURE and rep.discriminant == "R"
    rep = curvature_recommendation(PS_PES, example1)
    assert rep.indifferent and rep.prediction is PolicyClass.INTERMEDIATE
    assert "equally good" in rep.note


def test_curvature_recommendation_matches_concavification_on_crossing():
    rep = curvature_recommendation(AE_OPT, CROSSING)
    assert rep.prediction is PolicyClass.EXAGGERATION and len(rep.sign_changes) == 1
    for spec in (AE_OPT, AE_PES):
        ro = reduced_objective(spec, path_graph(3), CROSSING)
        best = optimal_policy(ro, concave_envelope(ro), CROSSING.prior)
        assert classify_policy(best.policy) is PolicyClass.EXAGGERATION


def test_curvature_recommendation_defers_when_clamped(example2):
    rep = curvature_recommendation(AE_OPT, example2)
    assert rep.defer_to_concavification
    assert rep.clamped_mu.max() <= 1 / 7 + 1e-12


def test_mixed_discriminant_report(example1):
    rep = curvature_recommendation(PS_ONE, example1)
    assert rep.discriminant == "mixed"
    assert "R~" in rep.note


def test_sufficient_condition_report(example1):
    assert sufficient_condition_report(example1).verdict == "no information sufficient"
    assert sufficient_condition_report(GameParams(PowerSaturating(0.9, 0.5, 1.0), 0.1)).verdict == (
        "no information sufficient"
    )
    assert sufficient_condition_report(CROSSING).verdict == "inconclusive"

    class Shifted(BenefitPair):
        def _eval(self, x, state, order):
            base = np.exp(-x) * (-1.0) ** (order + 1) if order else 1.0 - np.exp(-x)
            return base - (0.1 if (state is State.HIGH and order == 0) else 0.0)

    rep = sufficient_condition_report(GameParams(Shifted(), 0.3), x_grid=np.linspace(0, 2, 5))
    assert rep.verdict == "degenerate" and rep.error


def test_symmetry_examples(example1):
    ro = reduced_objective(AE_OPT, path_graph(3), example1)
    gap, obj_gap = symmetry_check(Policy(0.7, 0.2), ro, 0.4)
    assert gap < 1e-12 and obj_gap < 1e-12
    assert symmetry_check(Policy(0.5, 0.5), ro, 0.4) == (0.0, 0.0)


def test_sweep_rotation_symmetry(example2):
    ro = reduced_objective(AE_OPT, path_graph(3), example2)
    sw = policy_sweep(ro, 0.5, 101)
    assert np.max(np.abs(sw.values - sw.values[::-1, ::-1])) < 1e-12


def test_envelope_dominates_sweep(example1, example2):
    for gp in (example1, example2):
        for spec in (AE_OPT, AE_PES, PS_PES):
            ro = reduced_objective(spec, path_graph(3), gp)
            env = concave_envelope(ro)
            sw = policy_sweep(ro, gp.prior, 41)
            assert sw.values.max() <= env(gp.prior) + 1e-9


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_bayes_plausibility(p_l, p_h, mu0):
    pol = Policy(p_l, p_h)
    total = sum(prob * mu for mu, prob in (posterior(pol, mu0, s) for s in "hl"))
    assert abs(total - mu0) <= 1e-14
    assert sum(posterior(pol, mu0, s)[1] for s in "hl") == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 1.0), st.floats(0.05, 0.9), st.floats(0.3, 3.0), st.floats(0.3, 6.0), st.floats(0.01, 0.1))
def test_negative_r_implies_negative_r_tilde(a_h, ratio, p, p_l, cost):
    if p > p_l or a_h * p <= a_h * ratio * p_l:
        return
    gp = GameParams(PowerSaturating(a_h, a_h * ratio, p, p_l), cost)
    mu = np.linspace(0, 1, 51)
    if (unilateral_effort(gp, mu) <= 0).any():
        return
    r, rt = curvature_R(gp, mu), curvature_R_tilde(gp, mu)
    assert np.all(rt[r < 0] < 0)


def test_negative_r_everywhere_gives_full_disclosure():
    gp = GameParams(PowerSaturating(0.9, 0.6, 1.0, 2.0), 0.1, 0.5)
    assert np.all(curvature_R(gp, belief_grid(201)) < 0)
    for spec in (AE_OPT, AE_PES, PS_PES):
        assert curvature_recommendation(spec, gp).prediction is PolicyClass.FULL_DISCLOSURE
        ro = reduced_objective(spec, path_graph(3), gp)
        best = optimal_policy(ro, concave_envelope(ro), 0.5)
        assert classify_policy(best.policy) is PolicyClass.FULL_DISCLOSURE
