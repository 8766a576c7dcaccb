"""Stage-game solutions.

The competitive stage game has a mixed strategy Nash equilibrium in which
every TON node transmits with probability 1/N_T and the AON's access
probability depends on the network age it enters the stage with. Under the
coordination device both networks instead pick the access probabilities that
minimize age (AON) and maximize throughput (TON) on their exclusive slots.
"""
import enum
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import OutOfRange, ParameterError
from .model import (AccessProfile, Mode, expected_network_throughput,
                    expected_node_age, slot_probabilities_competitive,
                    slot_probabilities_cooperative)
from .utils import merge_intervals, probability_grid

logger = logging.getLogger(__name__)

#: interior values this close outside [0, 1] are clamped, anything further raises
BOUNDARY_TOLERANCE = 1e-9

#: slack of the stage payoff comparisons on a P_R grid
PAYOFF_TOLERANCE = 1e-9


class Regime(enum.Enum):
    INTERIOR = 'interior'
    FORCED_ONE = 'forced-one'
    FORCED_ZERO = 'forced-zero'


@dataclass(frozen=True)
class ThresholdAges:
    th0: float
    th1: float
    regime: Regime

    @property
    def th(self):
        return max(self.th0, self.th1)


@dataclass(frozen=True)
class StagePayoffs:
    u_ton: float
    u_aon: float


def ton_access_probability(sizes):
    return 1.0 / sizes.n_ton


def _check_age(network_age):
    if np.any(np.asarray(network_age) < 0):
        raise ParameterError('network age must be >= 0, got %r' % (network_age,))


def _regime(network_age, th0, th1):
    """Branch of the three-branch rule; an object array of regimes for array ages."""
    # a tie between the two thresholds goes to the silent branch
    forced = Regime.FORCED_ONE if th1 > th0 else Regime.FORCED_ZERO
    above = np.asarray(network_age, dtype=float) > max(th0, th1)
    if above.ndim == 0:
        return Regime.INTERIOR if above else forced
    return np.where(above, Regime.INTERIOR, forced)


def _select(network_age, th0, th1, interior):
    """Three-branch rule, elementwise over ``network_age``."""
    network_age = np.asarray(network_age, dtype=float)
    forced = 1.0 if th1 > th0 else 0.0
    above = network_age > max(th0, th1)
    with np.errstate(divide='ignore', invalid='ignore'):
        value = np.where(above, interior(network_age), forced)
    low, high = -BOUNDARY_TOLERANCE, 1.0 + BOUNDARY_TOLERANCE
    bad = above & ~((value >= low) & (value <= high))
    if np.any(bad):
        index = np.argmax(bad) if bad.ndim else ()
        raise OutOfRange('interior access probability %r outside [0, 1]'
                         % (float(value[index]),),
                         value=float(value[index]),
                         network_age=float(network_age[index]))
    value = np.clip(value, 0.0, 1.0)
    return float(value) if value.ndim == 0 else value


def competitive_thresholds(sizes, slots):
    """Threshold ages of the AON equilibrium strategy against tau_T = 1/N_T."""
    n_a, n_t = sizes.n_aon, sizes.n_ton
    tau_t = ton_access_probability(sizes)
    gap = slots.sigma_success - slots.sigma_collision
    th1 = n_a * gap
    if n_t == 1:
        if gap == 0:
            th0 = n_a * (slots.sigma_success - slots.sigma_idle)
        else:
            th0 = -np.inf if gap > 0 else np.inf
    else:
        th0 = (n_a * (slots.sigma_success - slots.sigma_idle)
               - n_a * n_t * tau_t * gap / (1.0 - tau_t))
    return th0, th1


def msne_equal_slots(sizes, slots, network_age):
    """Equilibrium when collisions last as long as successes (sigma_S == sigma_C)."""
    if slots.sigma_success != slots.sigma_collision:
        raise ParameterError('equal-slot equilibrium needs sigma_S == sigma_C, got %r and %r'
                             % (slots.sigma_success, slots.sigma_collision))
    _check_age(network_age)
    n_a = sizes.n_aon
    th0 = n_a * (slots.sigma_success - slots.sigma_idle)

    def interior(age):
        return ((n_a * (slots.sigma_idle - slots.sigma_success) + age)
                / (n_a * (slots.sigma_idle - slots.sigma_collision + age)))

    tau_aon = _select(network_age, th0, 0.0, interior)
    return AccessProfile(tau_aon, ton_access_probability(sizes))


def msne_tau_aon(sizes, slots, network_age):
    """AON equilibrium access probability; ``network_age`` may be an array."""
    _check_age(network_age)
    if slots.sigma_success == slots.sigma_collision:
        return msne_equal_slots(sizes, slots, network_age).tau_aon

    n_a, n_t = sizes.n_aon, sizes.n_ton
    th0, th1 = competitive_thresholds(sizes, slots)
    if n_t == 1:
        # TON always transmits, the AON either always joins it or never does
        return _select(network_age, th0, th1, lambda age: np.ones_like(age))

    tau_t = ton_access_probability(sizes)
    gap = slots.sigma_success - slots.sigma_collision
    backoff = 1.0 - tau_t
    contention = n_a * n_t * tau_t * gap

    def interior(age):
        numerator = backoff * (age - n_a * (slots.sigma_success - slots.sigma_idle)) + contention
        denominator = (backoff * n_a * (age + slots.sigma_idle - slots.sigma_collision - n_a * gap)
                       + contention)
        return numerator / denominator

    return _select(network_age, th0, th1, interior)


def msne(sizes, slots, network_age):
    """Mixed strategy Nash equilibrium of the competitive stage game."""
    tau_aon = msne_tau_aon(sizes, slots, network_age)
    th0, th1 = competitive_thresholds(sizes, slots)
    thresholds = ThresholdAges(th0, th1, _regime(network_age, th0, th1))
    return AccessProfile(tau_aon, ton_access_probability(sizes)), thresholds


def cooperative_thresholds(sizes, slots):
    n_a = sizes.n_aon
    return (n_a * (slots.sigma_success - slots.sigma_idle),
            n_a * (slots.sigma_success - slots.sigma_collision))


def cooperative_tau_aon(sizes, slots, network_age):
    """Age-minimizing AON access probability on its exclusive slots."""
    _check_age(network_age)
    n_a = sizes.n_aon
    th0, th1 = cooperative_thresholds(sizes, slots)
    gap = slots.sigma_success - slots.sigma_collision

    def interior(age):
        return ((age - n_a * (slots.sigma_success - slots.sigma_idle))
                / (n_a * (age + slots.sigma_idle - slots.sigma_collision - n_a * gap)))

    return _select(network_age, th0, th1, interior)


def cooperative_optimum(sizes, slots, network_age):
    """Optimal strategies of the one-shot game under the coordination device."""
    tau_aon = cooperative_tau_aon(sizes, slots, network_age)
    th0, th1 = cooperative_thresholds(sizes, slots)
    thresholds = ThresholdAges(th0, th1, _regime(network_age, th0, th1))
    return AccessProfile(tau_aon, ton_access_probability(sizes)), thresholds


def _probabilities(mode, sizes, profile, p_r):
    if mode is Mode.COOPERATIVE:
        if p_r is None:
            raise ParameterError('cooperative payoffs need p_r')
        return slot_probabilities_cooperative(sizes, profile, p_r)
    return slot_probabilities_competitive(sizes, profile)


def expected_stage_payoffs(mode, sizes, slots, profile, network_age, rate=1.0, p_r=None):
    """Expected (u_ton, u_aon) of one stage entered with ``network_age``."""
    probs = _probabilities(mode, sizes, profile, p_r)
    return StagePayoffs(
        u_ton=expected_network_throughput(probs, slots, rate),
        u_aon=-expected_node_age(probs, network_age, slots),
    )


def aon_objective(sizes, slots, network_age, tau_ton, mode=Mode.COMPETITIVE, p_r=None):
    """AON stage payoff as a function of its own access probability."""
    def objective(tau_aon):
        probs = _probabilities(mode, sizes, AccessProfile(tau_aon, tau_ton), p_r)
        return -expected_node_age(probs, network_age, slots)
    return objective


def ton_objective(sizes, slots, tau_aon, rate=1.0, mode=Mode.COMPETITIVE, p_r=None):
    """TON stage payoff as a function of its own access probability."""
    def objective(tau_ton):
        probs = _probabilities(mode, sizes, AccessProfile(tau_aon, tau_ton), p_r)
        return expected_network_throughput(probs, slots, rate)
    return objective


def best_response_oracle(objective, grid_step=1e-4, maximize=True):
    """Exhaustive search of ``objective`` over {0, grid_step, ..., 1}.

    ``objective`` is evaluated once on the whole grid array.
    """
    if not 0 < grid_step <= 0.01:
        raise ParameterError('grid step must lie in (0, 0.01], got %r' % (grid_step,))
    grid = probability_grid(grid_step)
    values = np.broadcast_to(np.asarray(objective(grid), dtype=float), grid.shape)
    index = np.argmax(values) if maximize else np.argmin(values)
    return float(grid[index])


def cooperation_beneficial_pr_set(sizes, slots, network_age, pr_grid_step=0.01, rate=1.0):
    """P_R intervals on which both networks gain from cooperating in one stage."""
    if not 0 < pr_grid_step <= 0.01:
        raise ParameterError('P_R grid step must lie in (0, 0.01], got %r' % (pr_grid_step,))
    competitive, _ = msne(sizes, slots, network_age)
    cooperative, _ = cooperative_optimum(sizes, slots, network_age)
    alone = expected_stage_payoffs(Mode.COMPETITIVE, sizes, slots, competitive,
                                   network_age, rate)
    p_r = probability_grid(pr_grid_step)
    together = expected_stage_payoffs(Mode.COOPERATIVE, sizes, slots, cooperative,
                                      network_age, rate, p_r=p_r)
    mask = ((together.u_ton >= alone.u_ton - PAYOFF_TOLERANCE)
            & (together.u_aon >= alone.u_aon - PAYOFF_TOLERANCE))
    intervals = merge_intervals(p_r, mask)
    logger.debug('cooperation beneficial at age %r for P_R in %r', network_age, intervals)
    return intervals


def printed_pr_bounds(sizes, slots, network_age):
    """Closed-form P_R bounds of the one-shot cooperation range.

    Reported next to the grid result only; the lower bound is a ratio that
    degenerates (inf or nan) when its denominator vanishes.
    """
    competitive, _ = msne(sizes, slots, network_age)
    cooperative, _ = cooperative_optimum(sizes, slots, network_age)
    n_a, n_t = sizes.n_aon, sizes.n_ton
    tau_a, tau_t = cooperative.tau_aon, cooperative.tau_ton
    probs = slot_probabilities_competitive(sizes, competitive)
    idle_t = (1.0 - tau_t) ** n_t
    alone_a = tau_a * (1.0 - tau_a) ** (n_a - 1)
    alone_t = n_t * tau_t * (1.0 - tau_t) ** (n_t - 1)
    idle_gap = slots.sigma_idle - slots.sigma_collision
    success_gap = slots.sigma_success - slots.sigma_collision

    numerator = (network_age * probs.p_success_node_aon
                 - idle_gap * (probs.p_idle - idle_t)
                 - success_gap * (probs.p_success_total - alone_t))
    denominator = (network_age * alone_a
                   - idle_gap * ((1.0 - tau_a) ** n_a - idle_t)
                   - success_gap * (n_a * alone_a - alone_t))
    with np.errstate(divide='ignore', invalid='ignore'):
        lower = float(np.float64(numerator) / np.float64(denominator))
    upper = 1.0 - (1.0 - competitive.tau_aon) ** n_a
    return lower, upper
