import numpy as np
import pytest

from coexistsim.equilibrium import (Regime, _select, aon_objective, best_response_oracle,
                                    competitive_thresholds, cooperation_beneficial_pr_set,
                                    cooperative_optimum, cooperative_tau_aon,
                                    expected_stage_payoffs, msne, msne_equal_slots,
                                    msne_tau_aon, printed_pr_bounds, ton_objective)
from coexistsim.exceptions import OutOfRange, ParameterError
from coexistsim.model import AccessProfile, Mode, NetworkSizes, SlotLengths


def test_thresholds_five_by_five(five_by_five, small_collision):
    _, thresholds = msne(five_by_five, small_collision, 1.0)
    assert thresholds.th0 == pytest.approx(-0.6812, abs=1e-3)
    assert thresholds.th1 == pytest.approx(4.5450, abs=1e-3)
    assert thresholds.th == thresholds.th1


def test_forced_one_below_threshold(five_by_five, small_collision):
    profile, thresholds = msne(five_by_five, small_collision, 1.0)
    assert profile.tau_aon == 1.0
    assert thresholds.regime is Regime.FORCED_ONE


def test_interior_equilibrium(five_by_five, small_collision):
    profile, thresholds = msne(five_by_five, small_collision, 4.6460)
    assert profile.tau_aon == pytest.approx(0.9295, abs=1e-4)
    assert profile.tau_ton == 0.2
    assert thresholds.regime is Regime.INTERIOR


@pytest.mark.parametrize('n_ton', [1, 2, 5, 10, 50])
def test_ton_strategy_depends_only_on_its_size(n_ton, small_collision, large_collision):
    for n_aon in (1, 3, 10):
        for slots in (small_collision, large_collision):
            for age in (0.5, 3.0, 20.0):
                profile, _ = msne(NetworkSizes(n_aon, n_ton), slots, age)
                assert profile.tau_ton == 1.0 / n_ton


def test_single_ton_node_thresholds(two_players, small_collision, large_collision):
    th0, _ = competitive_thresholds(two_players, small_collision)
    assert th0 == -np.inf
    th0, _ = competitive_thresholds(two_players, large_collision)
    assert th0 == np.inf
    for age in (0.0, 1.01, 50.0):
        assert msne(two_players, small_collision, age)[0].tau_aon == 1.0
        assert msne(two_players, large_collision, age)[0].tau_aon == 0.0


def test_equal_slots_closed_form(equal_slots):
    profile = msne_equal_slots(NetworkSizes(1, 3), equal_slots, 2.0)
    assert profile.tau_aon == pytest.approx(1.0)
    assert profile.tau_ton == pytest.approx(1.0 / 3)
    assert msne_equal_slots(NetworkSizes(5, 5), equal_slots, 4.9).tau_aon == 0.0
    with pytest.raises(ParameterError):
        msne_equal_slots(NetworkSizes(5, 5), SlotLengths(0.01, 1.01, 0.101), 4.9)


def test_msne_specializes_to_equal_slots(equal_slots):
    for n_aon in (1, 2, 5, 10):
        for n_ton in (1, 2, 5):
            sizes = NetworkSizes(n_aon, n_ton)
            for age in np.linspace(0.0, 30.0, 61):
                assert msne(sizes, equal_slots, age)[0] == msne_equal_slots(sizes, equal_slots, age)


def test_msne_accepts_age_arrays(five_by_five, small_collision):
    ages = np.array([1.0, 4.646, 10.0])
    taus = msne_tau_aon(five_by_five, small_collision, ages)
    for age, tau in zip(ages, taus):
        assert msne(five_by_five, small_collision, age)[0].tau_aon == tau


def test_regimes_follow_array_ages(five_by_five, small_collision, equal_slots):
    ages = np.array([1.0, 4.0, 10.0])
    profile, thresholds = msne(five_by_five, small_collision, ages)
    assert list(thresholds.regime) == [Regime.FORCED_ONE, Regime.FORCED_ONE, Regime.INTERIOR]
    assert np.array_equal(profile.tau_aon, msne_tau_aon(five_by_five, small_collision, ages))
    _, thresholds = cooperative_optimum(five_by_five, equal_slots, np.array([2.0, 7.0]))
    assert list(thresholds.regime) == [Regime.FORCED_ZERO, Regime.INTERIOR]
    assert msne(five_by_five, small_collision, 10.0)[1].regime is Regime.INTERIOR


def test_single_aon_node_always_transmits_against_a_shared_ton(small_collision):
    ages = np.linspace(0.0, 40.0, 401)
    for n_ton in (2, 5, 10):
        taus = msne_tau_aon(NetworkSizes(1, n_ton), small_collision, ages)
        assert np.allclose(taus, 1.0, rtol=0, atol=1e-12)


def test_cooperative_aon_is_never_aggressive_with_equal_slots(five_by_five, equal_slots):
    ages = np.linspace(0.0, 200.0, 2001)
    taus = cooperative_tau_aon(five_by_five, equal_slots, ages)
    assert np.all(taus < 1.0)
    assert np.all(taus[ages <= 5.0] == 0.0)


def test_negative_age_rejected(five_by_five, small_collision):
    with pytest.raises(ParameterError):
        msne(five_by_five, small_collision, -1.0)
    with pytest.raises(ParameterError):
        cooperative_optimum(five_by_five, small_collision, -1.0)


def test_interior_outside_unit_interval_is_reported():
    with pytest.raises(OutOfRange) as info:
        _select(2.0, 0.0, 1.0, lambda age: age * 0 + 1.5)
    assert info.value.value == 1.5
    assert info.value.network_age == 2.0
    assert _select(2.0, 0.0, 1.0, lambda age: age * 0 + 1.0 + 1e-10) == 1.0


def test_tie_goes_to_forced_zero():
    assert _select(1.0, 1.0, 1.0, lambda age: age * 0 + 0.5) == 0.0


def test_cooperative_optimum_examples(two_players, equal_slots, small_collision):
    profile, _ = cooperative_optimum(two_players, equal_slots, 1.01)
    assert profile.tau_aon == pytest.approx(1.0)
    assert profile.tau_ton == 1.0

    sizes = NetworkSizes(5, 3)
    profile, thresholds = cooperative_optimum(sizes, small_collision, 10.0)
    assert 0.0 < profile.tau_aon < 1.0
    assert profile.tau_ton == pytest.approx(1.0 / 3)
    assert thresholds.th0 == pytest.approx(5.0)
    assert thresholds.th1 == pytest.approx(4.545)
    oracle = best_response_oracle(
        aon_objective(sizes, small_collision, 10.0, 1.0 / 3, Mode.COOPERATIVE, p_r=0.5),
        grid_step=1e-5)
    assert oracle == pytest.approx(profile.tau_aon, abs=2e-5)


def test_stage_payoffs_examples(two_players, equal_slots, five_by_five, small_collision):
    both = AccessProfile(1.0, 1.0)
    payoffs = expected_stage_payoffs(Mode.COOPERATIVE, two_players, equal_slots, both, 1.01,
                                     rate=1.0, p_r=0.5)
    assert payoffs.u_aon == pytest.approx(-1.515, abs=1e-9)
    assert payoffs.u_ton == pytest.approx(0.505, abs=1e-9)

    payoffs = expected_stage_payoffs(Mode.COMPETITIVE, two_players, equal_slots, both, 1.01)
    assert payoffs.u_aon == pytest.approx(-2.02, abs=1e-9)
    assert payoffs.u_ton == 0

    silent = AccessProfile(0.0, 0.0)
    for mode, p_r in ((Mode.COMPETITIVE, None), (Mode.COOPERATIVE, 0.3)):
        payoffs = expected_stage_payoffs(mode, five_by_five, small_collision, silent, 3.0,
                                         p_r=p_r)
        assert payoffs.u_ton == 0
        assert payoffs.u_aon == pytest.approx(-3.01)

    with pytest.raises(ParameterError):
        expected_stage_payoffs(Mode.COOPERATIVE, two_players, equal_slots, both, 1.01)


def test_oracle_examples(small_collision, five_by_five):
    sizes = NetworkSizes(5, 4)
    assert best_response_oracle(ton_objective(sizes, small_collision, 0.3)) == \
        pytest.approx(0.25, abs=1e-4)
    age_objective = aon_objective(five_by_five, small_collision, 1.0, 0.2)
    assert best_response_oracle(age_objective) == 1.0
    age_objective = aon_objective(five_by_five, small_collision, 4.6460, 0.2)
    assert best_response_oracle(age_objective) == pytest.approx(0.9295, abs=1.5e-4)
    with pytest.raises(ParameterError):
        best_response_oracle(age_objective, grid_step=0.05)


def _upper_age(th0, th1, slots):
    finite = [t for t in (th0, th1) if np.isfinite(t)]
    return 3 * max(finite + [slots.sigma_success])


def test_closed_forms_match_oracle_on_random_draws():
    rng = np.random.default_rng(2024)
    step = 1e-4
    for _ in range(1000):
        sizes = NetworkSizes(int(rng.integers(1, 11)), int(rng.integers(1, 11)))
        slots = SlotLengths.from_beta(0.01, float(rng.choice([0.1, 1.0, 2.0])))
        age = float(rng.uniform(0.0, _upper_age(*competitive_thresholds(sizes, slots),
                                                slots=slots)))

        profile, _ = msne(sizes, slots, age)
        objective = aon_objective(sizes, slots, age, profile.tau_ton)
        best = objective(best_response_oracle(objective, step))
        assert objective(profile.tau_aon) >= best - 1e-12
        objective = ton_objective(sizes, slots, profile.tau_aon)
        best = objective(best_response_oracle(objective, step))
        assert objective(profile.tau_ton) >= best - 1e-12

        profile, _ = cooperative_optimum(sizes, slots, age)
        objective = aon_objective(sizes, slots, age, profile.tau_ton, Mode.COOPERATIVE, p_r=0.5)
        best = objective(best_response_oracle(objective, step))
        assert objective(profile.tau_aon) >= best - 1e-12
        objective = ton_objective(sizes, slots, profile.tau_aon, mode=Mode.COOPERATIVE, p_r=0.5)
        best = objective(best_response_oracle(objective, step))
        assert objective(profile.tau_ton) >= best - 1e-12


@pytest.mark.parametrize('sizes, ratio, age', [
    (NetworkSizes(5, 5), 0.1, 4.646),
    (NetworkSizes(2, 3), 0.1, 6.0),
    (NetworkSizes(4, 2), 2.0, 12.0),
    (NetworkSizes(3, 5), 1.0, 9.0),
])
def test_oracle_argmax_on_curved_objectives(sizes, ratio, age):
    slots = SlotLengths.from_beta(0.01, ratio)
    profile, thresholds = msne(sizes, slots, age)
    assert thresholds.regime is Regime.INTERIOR
    oracle = best_response_oracle(aon_objective(sizes, slots, age, profile.tau_ton))
    assert oracle == pytest.approx(profile.tau_aon, abs=1.5e-4)
    oracle = best_response_oracle(ton_objective(sizes, slots, profile.tau_aon))
    assert oracle == pytest.approx(profile.tau_ton, abs=1.5e-4)


def test_equilibrium_is_a_mutual_best_response(small_collision, large_collision, equal_slots):
    grid = np.linspace(0.0, 1.0, 11)
    for slots in (small_collision, equal_slots, large_collision):
        for sizes in (NetworkSizes(1, 1), NetworkSizes(2, 5), NetworkSizes(5, 5)):
            for age in (0.5, 2.0, 5.0, 12.0):
                profile, _ = msne(sizes, slots, age)
                aon = aon_objective(sizes, slots, age, profile.tau_ton)
                assert np.all(aon(grid) <= aon(profile.tau_aon) + 1e-9)
                ton = ton_objective(sizes, slots, profile.tau_aon)
                assert np.all(ton(grid) <= ton(profile.tau_ton) + 1e-9)


def test_interior_branch_is_continuous_at_threshold(five_by_five, small_collision,
                                                    large_collision, equal_slots):
    eps = 1e-9
    for slots in (small_collision, large_collision, equal_slots):
        _, thresholds = msne(five_by_five, slots, 0.0)
        boundary = 1.0 if thresholds.th1 > thresholds.th0 else 0.0
        tau = msne_tau_aon(five_by_five, slots, thresholds.th + eps)
        assert tau == pytest.approx(boundary, abs=1e-6)
        th0 = 5 * (slots.sigma_success - slots.sigma_idle)
        th1 = 5 * (slots.sigma_success - slots.sigma_collision)
        boundary = 1.0 if th1 > th0 else 0.0
        tau = cooperative_tau_aon(five_by_five, slots, max(th0, th1) + eps)
        assert tau == pytest.approx(boundary, abs=1e-6)


def test_cooperation_beneficial_pr_set(two_players, equal_slots, large_collision,
                                       five_by_five):
    assert cooperation_beneficial_pr_set(two_players, equal_slots, 1.01) == ((0.0, 1.0),)
    assert cooperation_beneficial_pr_set(two_players, large_collision, 1.01) == ((0.0, 0.0),)
    assert cooperation_beneficial_pr_set(five_by_five, equal_slots, 1.01) == ((0.0, 0.0),)
    with pytest.raises(ParameterError):
        cooperation_beneficial_pr_set(two_players, equal_slots, 1.01, pr_grid_step=0.1)


def test_printed_pr_bounds(two_players, equal_slots):
    lower, upper = printed_pr_bounds(two_players, equal_slots, 1.01)
    assert lower == pytest.approx(0.0)
    assert upper == 1.0
