from ..etiquette import Feasibility, region_sweep
from ..experiment import Experiment


class RegionExperiment(Experiment):
    """
    Where each network prefers obeying the device, and where obedience is
    self-enforcing, over SWEEP_ALPHAS x SWEEP_PRS.
    """
    name = 'region'
    uses_simulation = True
    columns = (('N_A', 'N_T', 'sigma_C_ratio', 'alpha', 'p_r',
                'ton_prefers', 'aon_prefers', 'spe', 'spe_state', 'indeterminate')
               + tuple('inq%d_%s' % (n, part) for n in range(1, 5) for part in ('margin', 'se')))

    def title(self):
        return 'Self-enforceable cooperation over an (alpha, P_R) grid'

    def rows(self):
        config = self.config
        grid = region_sweep(self.scenario, config.alphas, config.prs, config.n_runs,
                            config.n_stages, seed=config.master_seed, threads=config.threads,
                            chunk_runs=config.chunk_runs, accumulate=config.accumulate)
        ton, aon, spe = grid.ton_prefers_cells, grid.aon_prefers_cells, grid.cells
        for i, j, alpha, p_r in grid.rows():
            margins = []
            for mean, se in zip(grid.margin_mean[i, j], grid.margin_se[i, j]):
                margins.extend((mean, se))
            yield (self.scenario_columns()
                   + (alpha, p_r, ton[i, j], aon[i, j], spe[i, j], grid.spe[i, j].value,
                      grid.spe[i, j] is Feasibility.INDETERMINATE)
                   + tuple(margins))
