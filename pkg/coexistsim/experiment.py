"""Base Experiment class"""
import csv

from .utils import format_cell


class Experiment(object):
    """
    Base class for experiments.

    A subclass names itself, lists its CSV columns and yields one row per
    result; the command line turns each registered subclass into a subcommand.
    """
    # name = base
    columns = ()

    # (flag, help) pairs of boolean options, passed to __init__ as keywords
    flags = ()

    # Experiments that draw random numbers honor the simulation options
    uses_simulation = False

    def __init__(self, config, **flags):
        self.config = config
        for flag, _ in self.flags:
            setattr(self, flag, bool(flags.get(flag, False)))
        self.rows_written = 0

    def title(self):
        """One-line description shown in the command help"""
        raise NotImplementedError

    def header(self):
        return self.columns

    def rows(self):
        raise NotImplementedError

    def write(self, stream):
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(self.header())
        for row in self.rows():
            writer.writerow([format_cell(value) for value in row])
            self.rows_written += 1
        return self.rows_written

    def summary(self):
        return '%s: %d rows' % (self.name, self.rows_written)

    # Helpers shared by the simulation experiments

    @property
    def scenario(self):
        return self.config.scenario

    def scenario_columns(self, scenario=None):
        scenario = scenario or self.scenario
        return (scenario.sizes.n_aon, scenario.sizes.n_ton, scenario.slots.collision_ratio)
