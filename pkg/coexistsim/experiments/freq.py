from dataclasses import replace

from ..experiment import Experiment
from ..model import Mode, NetworkSizes
from ..sim import monte_carlo


class FreqExperiment(Experiment):
    """
    Empirical frequency of the aggressive (tau_A = 1) and silent (tau_A = 0)
    equilibrium stages of competitive runs over SWEEP_FREQ_SIZES squared.
    """
    name = 'freq'
    uses_simulation = True
    columns = ('N_A', 'N_T', 'sigma_C_ratio', 'n_runs', 'n_stages', 'seed',
               'f_tau1_mean', 'f_tau1_se', 'f_tau0_mean', 'f_tau0_se')

    def title(self):
        return 'Frequency of the boundary equilibrium strategies'

    def rows(self):
        config = self.config
        for n_aon in config.freq_sizes:
            for n_ton in config.freq_sizes:
                scenario = replace(self.scenario, sizes=NetworkSizes(n_aon, n_ton))
                run_config = replace(config.run_config(Mode.COMPETITIVE), params=scenario)
                aggregate = monte_carlo(run_config, config.n_runs, config.threads)
                yield (self.scenario_columns(scenario)
                       + (config.n_runs, config.n_stages, config.master_seed,
                          aggregate.freq_tau_one.mean, aggregate.freq_tau_one.se,
                          aggregate.freq_tau_zero.mean, aggregate.freq_tau_zero.se))
