from dataclasses import replace

import numpy as np
import pytest

from coexistsim import signals
from coexistsim.etiquette import (BOTH_ACCESS, BOTH_BACKOFF, DeviationCase, Feasibility,
                                  GrimTrigger, Margin, Obey, RegionGrid, _branch_schedule,
                                  compliance, deviation_inequalities, expected_next_network_age,
                                  play_with_deviation, region_sweep, spe_feasible,
                                  stage_one_payoffs)
from coexistsim.exceptions import ParameterError
from coexistsim.model import (AccessProfile, ActionProfile, NetworkSizes, Recommendation,
                              ScenarioParams, SlotLengths)
from coexistsim.sim import Estimate, Phase, simulate_runs

F, I, U = Feasibility.FEASIBLE, Feasibility.INFEASIBLE, Feasibility.INDETERMINATE


def test_compliance_indicator():
    assert compliance(Recommendation.HEADS, True, False)
    assert compliance(Recommendation.TAILS, False, True)
    for aon, ton in ((True, True), (False, False), (False, True)):
        assert not compliance(Recommendation.HEADS, aon, ton)
    assert not compliance(Recommendation.TAILS, True, False)


def test_deviation_cases_map_to_profiles():
    assert DeviationCase.H_TON_DEVIATES.actions == BOTH_ACCESS
    assert DeviationCase.T_AON_DEVIATES.actions == BOTH_ACCESS
    assert DeviationCase.H_AON_DEVIATES.actions == BOTH_BACKOFF
    assert DeviationCase.T_TON_DEVIATES.actions == BOTH_BACKOFF
    assert DeviationCase.T_TON_DEVIATES.recommendation is Recommendation.TAILS
    assert Obey.HEADS.actions == ActionProfile(True, False)


def test_grim_trigger_never_forgives():
    trigger = GrimTrigger()
    assert trigger.observe(Recommendation.HEADS, ActionProfile(True, False))
    assert trigger.phase is Phase.COOPERATIVE
    assert not trigger.observe(Recommendation.TAILS, BOTH_ACCESS)
    assert trigger.observe(Recommendation.TAILS, ActionProfile(False, True))
    assert trigger.triggered_at == 2
    assert trigger.phase is Phase.COMPETITIVE
    assert trigger.flags == [True, False, True]


@pytest.mark.parametrize('case', list(DeviationCase))
def test_injected_deviation_triggers_competition(scenario, case):
    trace = play_with_deviation(scenario, 12, case, 4, seed=6)
    assert trace.triggered_at == 4
    assert trace.psi[:3] == (True, True, True)
    assert trace.psi[3] is False
    assert [r.phase for r in trace.records[:3]] == [Phase.COOPERATIVE] * 3
    assert trace.records[3].phase is Phase.FORCED
    assert trace.records[3].actions == case.actions
    assert all(r.phase is Phase.COMPETITIVE for r in trace.records[4:])
    assert trace.prescribed == (Phase.COOPERATIVE,) * 4 + (Phase.COMPETITIVE,) * 8
    with pytest.raises(ParameterError):
        play_with_deviation(scenario, 12, case, 13)


def test_expected_next_network_age_examples(two_players, five_by_five, equal_slots,
                                            small_collision):
    silent_aon = AccessProfile(0.0, 0.2)
    assert expected_next_network_age(Obey.HEADS, five_by_five, small_collision, silent_aon,
                                     3.0) == pytest.approx(3.01)
    profile = AccessProfile(0.7, 0.2)
    assert expected_next_network_age(DeviationCase.H_AON_DEVIATES, five_by_five,
                                     small_collision, profile, 3.0) == pytest.approx(3.01)
    both = AccessProfile(1.0, 1.0)
    assert expected_next_network_age(Obey.TAILS, two_players, equal_slots, both,
                                     1.01) == pytest.approx(2.02)
    assert expected_next_network_age(Obey.HEADS, two_players, equal_slots, both,
                                     1.01) == pytest.approx(1.01)
    assert expected_next_network_age(DeviationCase.T_AON_DEVIATES, two_players, equal_slots,
                                     both, 1.01) == pytest.approx(2.02)
    with pytest.raises(ParameterError):
        expected_next_network_age('obey', two_players, equal_slots, both, 1.01)


@pytest.mark.parametrize('case', [Obey.HEADS, Obey.TAILS, DeviationCase.H_TON_DEVIATES,
                                  DeviationCase.H_AON_DEVIATES])
def test_stage_one_terms_match_simulation(scenario, case):
    params = replace(scenario, initial_age=6.0)
    analytic = stage_one_payoffs(case, params)
    batch = simulate_runs(params, 1, _branch_schedule(case), 20000, seed=31)
    for simulated, expected in ((Estimate.of(batch.u_aon_stream[:, 0]), analytic.u_aon),
                                (Estimate.of(batch.u_ton_stream[:, 0]), analytic.u_ton)):
        assert abs(simulated.mean - expected) <= 4 * simulated.se + 1e-12


def test_feasibility_conjunction():
    sure = Margin('a', Estimate(1.0, 0.0))
    broken = Margin('b', Estimate(-1.0, 0.1))
    unsure = Margin('c', Estimate(0.1, 0.1))
    assert sure.decided and sure.holds
    assert broken.decided and not broken.holds
    assert not unsure.decided
    assert Feasibility.all_of((sure, sure)) is F
    assert Feasibility.all_of((sure, unsure)) is U
    assert Feasibility.all_of((unsure, broken)) is I


def test_vanishing_discount_breaks_obedience(scenario):
    report = deviation_inequalities(replace(scenario, alpha=0.01), 200, 50, seed=2)
    inq2 = report.margins[1]
    assert inq2.name == 'inq2'
    assert inq2.decided and not inq2.holds
    assert report.ton_prefers is I
    assert report.spe is I
    assert spe_feasible(scenario, 0.01, 0.5, 200, 50, seed=2) is I


def test_spe_feasible_rejects_closed_unit_values(scenario):
    with pytest.raises(ParameterError):
        spe_feasible(scenario, 1.0, 0.5, 10, 10)
    with pytest.raises(ParameterError):
        spe_feasible(scenario, 0.5, 0.0, 10, 10)


def test_margins_are_reproducible(scenario):
    first = deviation_inequalities(scenario, 100, 40, seed=13, chunk_runs=30)
    second = deviation_inequalities(scenario, 100, 40, seed=13, threads=4, chunk_runs=30)
    assert first.margins == second.margins
    assert first.margins != deviation_inequalities(scenario, 100, 40, seed=14).margins


def test_region_sweep_intersection_law(scenario):
    seen = []

    def receiver(sender, alpha, p_r, feasibility):
        seen.append((alpha, p_r, feasibility))

    with signals.cell_evaluated.connected_to(receiver):
        grid = region_sweep(scenario, [0.3, 0.9], [0.25, 0.5, 0.75], 100, 40, seed=4)
    assert grid.spe.shape == (2, 3)
    assert grid.margin_mean.shape == (2, 3, 4)
    assert np.array_equal(grid.cells, grid.ton_prefers_cells & grid.aon_prefers_cells)
    assert grid.area() == int(grid.cells.sum())
    assert len(seen) == 6
    assert len(list(grid.rows())) == 6


def test_region_sweep_thread_independent(scenario):
    one = region_sweep(scenario, [0.5, 0.9], [0.5], 120, 30, seed=4, chunk_runs=50)
    many = region_sweep(scenario, [0.5, 0.9], [0.5], 120, 30, seed=4, chunk_runs=50, threads=4)
    assert np.array_equal(one.margin_mean, many.margin_mean)
    assert np.array_equal(one.margin_se, many.margin_se)


@pytest.mark.parametrize('alphas', [[], [0.5, 0.5], [0.0, 0.5], [0.4, 1.0], [0.6, 0.3]])
def test_region_sweep_axis_validation(scenario, alphas):
    with pytest.raises(ParameterError):
        region_sweep(scenario, alphas, [0.5], 10, 10)


def _synthetic(spe):
    spe = np.array(spe, dtype=object)
    shape = spe.shape
    return RegionGrid(np.linspace(0.1, 0.9, shape[0]), np.linspace(0.2, 0.8, shape[1]),
                      spe.copy(), spe.copy(), spe, np.zeros(shape + (4,)),
                      np.zeros(shape + (4,)))


def test_refinement_pairs():
    grid = _synthetic([[F, I], [U, I], [I, F]])
    assert grid.refinement_pairs() == [(0.1, 0.9, 0.2)]
    assert _synthetic([[I, I], [U, F], [F, F]]).refinement_pairs() == []
    assert grid.indeterminate.tolist() == [[False, False], [True, False], [False, False]]
    assert grid.area() == 2


@pytest.mark.slow
def test_self_enforceable_region_shrinks_with_network_size():
    slots = SlotLengths(0.01, 1.01, 1.01)
    axis = np.linspace(0.05, 0.95, 10)
    areas = []
    for n in (2, 5, 10):
        params = ScenarioParams(NetworkSizes(n, n), slots, alpha=0.9, p_r=0.5)
        grid = region_sweep(params, axis, axis, 2000, 300, seed=1)
        areas.append(grid.area())
    assert areas[2] <= areas[1] <= areas[0]
    assert areas[0] > 0
    assert areas[2] <= 2


@pytest.mark.slow
def test_pair_obeys_at_low_bias_only(equal_slots):
    params = ScenarioParams(NetworkSizes(2, 2), equal_slots, alpha=0.9, p_r=0.5)
    assert spe_feasible(params, 0.9, 0.3, 2000, 300, seed=1) is F
    for p_r in (0.5, 0.7):
        report = deviation_inequalities(replace(params, p_r=p_r), 2000, 300, seed=1)
        inq2 = report.margins[1]
        assert inq2.decided and not inq2.holds
        assert report.spe is I
