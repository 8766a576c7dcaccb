"""Grim-trigger coexistence etiquette.

The coordination device recommends exclusive access to one network per
stage. Obedience is self-enforcing when, for both recommendations, neither
network gains by deviating in stage 1 and being punished with the competitive
equilibrium forever after. Each of the four deviation inequalities compares an
obeying branch against a deviating branch; stage-1 terms are computed in closed
form and continuations by paired Monte Carlo.
"""
import enum
import logging
from dataclasses import dataclass, replace
from typing import NamedTuple, Tuple

import numpy as np

from . import signals
from .equilibrium import StagePayoffs, cooperative_optimum
from .exceptions import ParameterError
from .model import (ActionProfile, Mode, Recommendation, expected_network_throughput,
                    expected_node_age, slot_probabilities_for_actions)
from .sim import (ACCUMULATE_REALIZED, DEFAULT_CHUNK_RUNS, Estimate, ForcedStage, Phase,
                  Schedule, discount_weights, play, run_uniforms, simulate_runs)

logger = logging.getLogger(__name__)

ACCESS_BACKOFF = ActionProfile(True, False)
BACKOFF_ACCESS = ActionProfile(False, True)
BOTH_ACCESS = ActionProfile(True, True)
BOTH_BACKOFF = ActionProfile(False, False)

#: margins within this many standard errors of zero are left undecided
DECISION_SE = 2.0


class Obey(enum.Enum):
    HEADS = 'obey-H'
    TAILS = 'obey-T'

    @property
    def recommendation(self):
        return Recommendation.HEADS if self is Obey.HEADS else Recommendation.TAILS

    @property
    def actions(self):
        return ACCESS_BACKOFF if self is Obey.HEADS else BACKOFF_ACCESS


class DeviationCase(enum.Enum):
    H_TON_DEVIATES = 'H-ton-deviates'
    H_AON_DEVIATES = 'H-aon-deviates'
    T_AON_DEVIATES = 'T-aon-deviates'
    T_TON_DEVIATES = 'T-ton-deviates'

    @property
    def recommendation(self):
        if self in (DeviationCase.H_TON_DEVIATES, DeviationCase.H_AON_DEVIATES):
            return Recommendation.HEADS
        return Recommendation.TAILS

    @property
    def actions(self):
        if self in (DeviationCase.H_TON_DEVIATES, DeviationCase.T_AON_DEVIATES):
            return BOTH_ACCESS
        return BOTH_BACKOFF


class Feasibility(enum.Enum):
    FEASIBLE = 'feasible'
    INFEASIBLE = 'infeasible'
    INDETERMINATE = 'indeterminate'

    @classmethod
    def all_of(cls, margins):
        """Conjunction of decided/undecided inequalities."""
        if any(m.decided and not m.holds for m in margins):
            return cls.INFEASIBLE
        if all(m.decided for m in margins):
            return cls.FEASIBLE
        return cls.INDETERMINATE


def compliance(recommendation, aon_access, ton_access):
    """Indicator that a stage's action profile follows the recommendation."""
    if recommendation is Recommendation.HEADS:
        return bool(aon_access and not ton_access)
    return bool(ton_access and not aon_access)


class GrimTrigger(object):
    """Tracks compliance and switches to competition after the first violation."""

    def __init__(self):
        self.flags = []
        self.triggered_at = None

    @property
    def phase(self):
        """Stage game prescribed for the next stage."""
        return Phase.COOPERATIVE if self.triggered_at is None else Phase.COMPETITIVE

    def observe(self, recommendation, actions):
        psi = compliance(recommendation, actions.aon_access, actions.ton_access)
        self.flags.append(psi)
        if not psi and self.triggered_at is None:
            self.triggered_at = len(self.flags)
            logger.debug('recommendation %s disobeyed with %s at stage %d',
                         recommendation.value, actions, self.triggered_at)
        return psi


class DeviationTrace(NamedTuple):
    records: list
    prescribed: Tuple[Phase, ...]
    psi: Tuple[bool, ...]
    triggered_at: int


def play_with_deviation(params, n_stages, case, stage, seed=0):
    """One cooperative run with ``case`` injected at ``stage``, then grim trigger."""
    if not isinstance(case, DeviationCase):
        raise ParameterError('unknown deviation case %r' % (case,))
    if not 1 <= stage <= n_stages:
        raise ParameterError('deviation stage must lie in 1..%d, got %r' % (n_stages, stage))
    schedule = Schedule(Mode.COOPERATIVE,
                        forced=(ForcedStage(stage, case.recommendation, case.actions),),
                        compete_from=stage + 1)
    uniforms = run_uniforms(seed, (), [0], n_stages, params.sizes)
    chunk = play(params, n_stages, schedule, uniforms, trace=True)
    trigger = GrimTrigger()
    prescribed = []
    flags = []
    for record in chunk.records:
        prescribed.append(trigger.phase)
        flags.append(trigger.observe(record.recommendation, record.actions))
    return DeviationTrace(chunk.records, tuple(prescribed), tuple(flags), trigger.triggered_at)


def expected_next_network_age(case, sizes, slots, profile_hat, network_age):
    """Expected network age after stage 1 under the case's action profile.

    The silent network's access probability is zeroed, the other keeps its
    cooperative optimum.
    """
    if not isinstance(case, (Obey, DeviationCase)):
        raise ParameterError('unknown case %r' % (case,))
    # obey-T: a silenced AON leaves the idle probability at (1 - tau_T)**N_T. The
    # closed-form obey-T payoff writes (1 - tau_A_hat)**N_A for this term instead.
    probs = slot_probabilities_for_actions(sizes, profile_hat, case.actions)
    return expected_node_age(probs, network_age, slots)


def stage_one_payoffs(case, params, network_age=None):
    """Closed-form stage-1 payoffs of an obeying or deviating branch."""
    if network_age is None:
        network_age = params.initial_age
    profile_hat, _ = cooperative_optimum(params.sizes, params.slots, network_age)
    probs = slot_probabilities_for_actions(params.sizes, profile_hat, case.actions)
    return StagePayoffs(
        u_ton=expected_network_throughput(probs, params.slots, params.rate),
        u_aon=-expected_node_age(probs, network_age, params.slots),
    )


@dataclass(frozen=True)
class Margin:
    """Paired estimate of one inequality's left minus right side."""
    name: str
    estimate: Estimate

    @property
    def holds(self):
        return self.estimate.mean >= 0.0

    @property
    def decided(self):
        return self.estimate.se == 0.0 or abs(self.estimate.mean) > DECISION_SE * self.estimate.se


class StageOneCheck(NamedTuple):
    branch: str
    analytic: StagePayoffs
    simulated: StagePayoffs


@dataclass(frozen=True)
class DeviationReport:
    margins: Tuple[Margin, Margin, Margin, Margin]
    stage_one: Tuple[StageOneCheck, ...]

    @property
    def ton_prefers(self):
        return Feasibility.all_of((self.margins[1], self.margins[3]))

    @property
    def aon_prefers(self):
        return Feasibility.all_of((self.margins[0], self.margins[2]))

    @property
    def spe(self):
        return Feasibility.all_of(self.margins)


# stage-1 profile of every branch; deviations that share a profile share a simulation
_BRANCHES = (
    ('obey-H', Obey.HEADS),
    ('obey-T', Obey.TAILS),
    ('both-access', DeviationCase.H_TON_DEVIATES),
    ('both-backoff', DeviationCase.H_AON_DEVIATES),
)


def _branch_schedule(case):
    forced = (ForcedStage(1, case.recommendation, case.actions),)
    if isinstance(case, Obey):
        return Schedule(Mode.COOPERATIVE, forced=forced)
    return Schedule(Mode.COOPERATIVE, forced=forced, compete_from=2)


class _Branches(object):
    """Simulated stage payoff streams of the four stage-1 branches."""

    def __init__(self, params, n_runs, n_stages, seed, key, threads, chunk_runs, accumulate):
        self.batches = {}
        self.analytic = {}
        for name, case in _BRANCHES:
            # every branch replays the same random streams
            self.batches[name] = simulate_runs(
                params, n_stages, _branch_schedule(case), n_runs, seed=seed,
                chunk_runs=chunk_runs, accumulate=accumulate, threads=threads, key=key)
            self.analytic[name] = stage_one_payoffs(case, params)

    def discounted(self, name, alpha):
        batch = self.batches[name]
        weights = discount_weights(alpha, batch.n_stages)
        analytic = self.analytic[name]
        u_aon = weights[0] * analytic.u_aon + batch.u_aon_stream[:, 1:] @ weights[1:]
        u_ton = weights[0] * analytic.u_ton + batch.u_ton_stream[:, 1:] @ weights[1:]
        return u_aon, u_ton

    def stage_one(self):
        checks = []
        for name, _ in _BRANCHES:
            batch = self.batches[name]
            simulated = StagePayoffs(u_ton=float(np.mean(batch.u_ton_stream[:, 0])),
                                     u_aon=float(np.mean(batch.u_aon_stream[:, 0])))
            checks.append(StageOneCheck(name, self.analytic[name], simulated))
        return tuple(checks)

    def report(self, alpha):
        obey_h = self.discounted('obey-H', alpha)
        obey_t = self.discounted('obey-T', alpha)
        both_access = self.discounted('both-access', alpha)
        both_backoff = self.discounted('both-backoff', alpha)
        margins = (
            Margin('inq1', Estimate.of(obey_h[0] - both_backoff[0])),
            Margin('inq2', Estimate.of(obey_h[1] - both_access[1])),
            Margin('inq3', Estimate.of(obey_t[0] - both_access[0])),
            Margin('inq4', Estimate.of(obey_t[1] - both_backoff[1])),
        )
        return DeviationReport(margins, self.stage_one())


def deviation_inequalities(params, n_runs, n_stages, seed=0, threads=1,
                           chunk_runs=DEFAULT_CHUNK_RUNS, accumulate=ACCUMULATE_REALIZED):
    """Estimate the four obedience-versus-deviation margins at ``params``."""
    branches = _Branches(params, n_runs, n_stages, seed, (), threads, chunk_runs, accumulate)
    return branches.report(params.alpha)


def _check_open_unit(name, value):
    if not 0.0 < value < 1.0:
        raise ParameterError('%s must lie in (0, 1), got %r' % (name, value))


def spe_feasible(params, alpha, p_r, n_runs, n_stages, seed=0, threads=1,
                 chunk_runs=DEFAULT_CHUNK_RUNS, accumulate=ACCUMULATE_REALIZED):
    """Whether obeying the device is self-enforcing at (alpha, p_r)."""
    _check_open_unit('alpha', alpha)
    _check_open_unit('p_r', p_r)
    report = deviation_inequalities(replace(params, alpha=alpha, p_r=p_r), n_runs, n_stages,
                                    seed, threads, chunk_runs, accumulate)
    return report.spe


@dataclass(frozen=True, eq=False)
class RegionGrid:
    alpha_axis: np.ndarray
    pr_axis: np.ndarray
    ton_prefers: np.ndarray
    aon_prefers: np.ndarray
    spe: np.ndarray
    margin_mean: np.ndarray
    margin_se: np.ndarray

    @staticmethod
    def _mask(states):
        return np.vectorize(lambda state: state is Feasibility.FEASIBLE, otypes=[bool])(states)

    @property
    def cells(self):
        return self._mask(self.spe)

    @property
    def ton_prefers_cells(self):
        return self._mask(self.ton_prefers)

    @property
    def aon_prefers_cells(self):
        return self._mask(self.aon_prefers)

    @property
    def indeterminate(self):
        return np.vectorize(lambda state: state is Feasibility.INDETERMINATE,
                            otypes=[bool])(self.spe)

    def area(self):
        """Number of self-enforceable cells."""
        return int(np.count_nonzero(self.cells))

    def refinement_pairs(self):
        """(alpha1, alpha2, p_r) with a decided feasible cell below a decided infeasible one."""
        pairs = []
        for j, p_r in enumerate(self.pr_axis):
            column = self.spe[:, j]
            for i1, low in enumerate(column):
                if low is not Feasibility.FEASIBLE:
                    continue
                for i2 in range(i1 + 1, len(column)):
                    if column[i2] is Feasibility.INFEASIBLE:
                        pairs.append((float(self.alpha_axis[i1]), float(self.alpha_axis[i2]),
                                      float(p_r)))
        return pairs

    def rows(self):
        for i, alpha in enumerate(self.alpha_axis):
            for j, p_r in enumerate(self.pr_axis):
                yield i, j, float(alpha), float(p_r)


def _check_axis(name, values):
    axis = np.asarray(values, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise ParameterError('%s grid must be a non-empty list' % name)
    if np.any(axis <= 0.0) or np.any(axis >= 1.0):
        raise ParameterError('%s grid must lie in (0, 1)' % name)
    if np.any(np.diff(axis) <= 0):
        raise ParameterError('%s grid must be strictly increasing' % name)
    return axis


def region_sweep(params, alpha_grid, pr_grid, n_runs, n_stages, seed=0, threads=1,
                 chunk_runs=DEFAULT_CHUNK_RUNS, accumulate=ACCUMULATE_REALIZED):
    """Preference and self-enforceability over an (alpha, P_R) grid.

    alpha only enters through discounting, so each P_R column is simulated
    once and evaluated at every alpha.
    """
    alphas = _check_axis('alpha', alpha_grid)
    prs = _check_axis('P_R', pr_grid)
    shape = (alphas.size, prs.size)
    ton = np.empty(shape, dtype=object)
    aon = np.empty(shape, dtype=object)
    spe = np.empty(shape, dtype=object)
    mean = np.zeros(shape + (4,))
    se = np.zeros(shape + (4,))

    for j, p_r in enumerate(prs):
        column = replace(params, p_r=float(p_r))
        branches = _Branches(column, n_runs, n_stages, seed, (j,), threads, chunk_runs, accumulate)
        for i, alpha in enumerate(alphas):
            report = branches.report(float(alpha))
            ton[i, j], aon[i, j], spe[i, j] = report.ton_prefers, report.aon_prefers, report.spe
            mean[i, j] = [m.estimate.mean for m in report.margins]
            se[i, j] = [m.estimate.se for m in report.margins]
            signals.cell_evaluated.send(region_sweep, alpha=float(alpha), p_r=float(p_r),
                                        feasibility=report.spe)

    grid = RegionGrid(alphas, prs, ton, aon, spe, mean, se)
    for alpha1, alpha2, p_r in grid.refinement_pairs():
        logger.warning('self-enforceable at alpha=%g but not at alpha=%g (P_R=%g); refine the grid',
                       alpha1, alpha2, p_r)
    return grid
