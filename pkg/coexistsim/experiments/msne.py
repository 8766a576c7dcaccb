from ..equilibrium import msne
from ..experiment import Experiment


class MsneExperiment(Experiment):
    """
    Stage equilibrium and its threshold ages for every age in SWEEP_AGES.
    """
    name = 'msne'
    columns = ('N_A', 'N_T', 'sigma_I', 'sigma_S', 'sigma_C', 'network_age',
               'tau_aon', 'tau_ton', 'th0', 'th1', 'th', 'regime')

    def title(self):
        return 'Competitive stage equilibrium for a list of network ages'

    def rows(self):
        sizes, slots = self.scenario.sizes, self.scenario.slots
        for age in self.config.ages:
            profile, thresholds = msne(sizes, slots, age)
            yield (sizes.n_aon, sizes.n_ton, slots.sigma_idle, slots.sigma_success,
                   slots.sigma_collision, age, profile.tau_aon, profile.tau_ton,
                   thresholds.th0, thresholds.th1, thresholds.th, thresholds.regime.value)
