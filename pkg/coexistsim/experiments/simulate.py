from ..experiment import Experiment
from ..sim import monte_carlo, run_trace


class SimulateExperiment(Experiment):
    """
    Monte Carlo average discounted payoffs of the configured mode.
    """
    name = 'simulate'
    uses_simulation = True
    columns = ('mode', 'N_A', 'N_T', 'sigma_C_ratio', 'alpha', 'p_r', 'n_runs', 'n_stages',
               'seed', 'U_aon_mean', 'U_aon_se', 'U_ton_mean', 'U_ton_se',
               'f_tau1_mean', 'f_tau0_mean')
    trace_columns = ('stage', 'network_age', 'tau_aon', 'tau_ton', 'phase', 'recommendation',
                     'selected', 'slot', 'node', 'u_aon', 'u_ton')
    flags = (('trace', 'Write the per-stage trace of the first run instead.'),)

    def title(self):
        return 'Repeated game payoffs of competing or cooperating networks'

    def header(self):
        return self.trace_columns if self.trace else self.columns

    def rows(self):
        config = self.config
        run_config = config.run_config()
        if self.trace:
            for record in run_trace(run_config):
                yield (record.stage, record.network_age, record.tau_aon, record.tau_ton,
                       record.phase.value, record.recommendation.value, record.selected,
                       record.kind.name.lower(), record.node, record.u_aon, record.u_ton)
            return

        aggregate = monte_carlo(run_config, config.n_runs, config.threads)
        yield ((config.mode.value,) + self.scenario_columns()
               + (self.scenario.alpha, self.scenario.p_r, config.n_runs, config.n_stages,
                  config.master_seed, aggregate.u_aon.mean, aggregate.u_aon.se,
                  aggregate.u_ton.mean, aggregate.u_ton.se,
                  aggregate.freq_tau_one.mean, aggregate.freq_tau_zero.mean))
