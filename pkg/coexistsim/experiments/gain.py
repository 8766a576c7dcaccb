from dataclasses import replace

from ..experiment import Experiment
from ..model import Mode
from ..sim import Schedule, simulate_runs


class GainExperiment(Experiment):
    """
    Gain of cooperation over competition for every (alpha, P_R) in the sweeps.

    alpha only enters through discounting, so every P_R is simulated once per
    mode and evaluated at all alphas. Both modes replay the same random streams.
    """
    name = 'gain'
    uses_simulation = True
    columns = ('N_A', 'N_T', 'sigma_C_ratio', 'alpha', 'p_r', 'reference', 'n_runs', 'n_stages',
               'seed', 'gain_aon', 'gain_ton')
    flags = (('self_test', 'Compare cooperation against itself; every gain is 0.'),)

    def title(self):
        return 'Gain of cooperation over competition'

    def _simulate(self, scenario, mode):
        config = self.config
        return simulate_runs(scenario, config.n_stages, Schedule(mode), config.n_runs,
                             seed=config.master_seed, chunk_runs=config.chunk_runs,
                             accumulate=config.accumulate, threads=config.threads)

    def rows(self):
        config = self.config
        reference = Mode.COOPERATIVE if self.self_test else Mode.COMPETITIVE
        competing = None
        for p_r in config.prs:
            scenario = replace(self.scenario, p_r=p_r)
            together = self._simulate(scenario, Mode.COOPERATIVE)
            if reference is Mode.COOPERATIVE:
                apart = together
            else:
                # the competitive game ignores the device
                if competing is None:
                    competing = self._simulate(scenario, Mode.COMPETITIVE)
                apart = competing
            for alpha in config.alphas:
                gain = together.aggregate(alpha)
                base = apart.aggregate(alpha)
                yield (self.scenario_columns() + (alpha, p_r, reference.value, config.n_runs,
                                                  config.n_stages, config.master_seed,
                                                  gain.u_aon.mean - base.u_aon.mean,
                                                  gain.u_ton.mean - base.u_ton.mean))
