import math

from ..equilibrium import (competitive_thresholds, cooperation_beneficial_pr_set,
                           cooperative_optimum, expected_stage_payoffs, msne,
                           printed_pr_bounds)
from ..experiment import Experiment
from ..model import Mode, NetworkSizes
from ..utils import format_intervals


def reference_age(th0, th1, slots):
    """Network age one successful slot above th0.

    Falls back to the other threshold when th0 is infinite, and never goes
    below sigma_S.
    """
    base = th0 if math.isfinite(th0) else th1
    return max(base + slots.sigma_success, slots.sigma_success)


class StageExperiment(Experiment):
    """
    Competitive and cooperative one-shot games for every size in SWEEP_SIZES.
    """
    name = 'stage'
    columns = ('N_A', 'N_T', 'network_age',
               'tau_aon_msne', 'tau_ton_msne', 'u_ton_msne', 'u_aon_msne',
               'tau_aon_coop', 'tau_ton_coop', 'p_r', 'u_ton_coop', 'u_aon_coop',
               'beneficial_pr', 'printed_pr_lower', 'printed_pr_upper')

    def title(self):
        return 'Stage game payoffs with and without the coordination device'

    def rows(self):
        slots, rate, p_r = self.scenario.slots, self.scenario.rate, self.scenario.p_r
        for n_aon, n_ton in self.config.sizes:
            sizes = NetworkSizes(n_aon, n_ton)
            age = reference_age(*competitive_thresholds(sizes, slots), slots=slots)
            competitive, _ = msne(sizes, slots, age)
            cooperative, _ = cooperative_optimum(sizes, slots, age)
            alone = expected_stage_payoffs(Mode.COMPETITIVE, sizes, slots, competitive, age, rate)
            together = expected_stage_payoffs(Mode.COOPERATIVE, sizes, slots, cooperative, age,
                                              rate, p_r=p_r)
            intervals = cooperation_beneficial_pr_set(sizes, slots, age, self.config.pr_step, rate)
            lower, upper = printed_pr_bounds(sizes, slots, age)
            yield (n_aon, n_ton, age,
                   competitive.tau_aon, competitive.tau_ton, alone.u_ton, alone.u_aon,
                   cooperative.tau_aon, cooperative.tau_ton, p_r, together.u_ton, together.u_aon,
                   format_intervals(intervals), lower, upper)
