"""Experiment configuration.

Configuration files are flat Python files of upper-case ``KEY = value``
assignments read with :class:`flask.Config`. Sections are key prefixes
(``SCENARIO_``, ``SIM_``, ``SWEEP_``, ``OUTPUT_``) plus ``EXPERIMENTS``, the
dotted paths of the experiment classes the command line exposes. A file only
lists the keys it changes; everything else falls back to
:func:`_default_config`.
"""
import logging
import os
import re
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from flask import Config
from jinja2 import Environment, PackageLoader

from .exceptions import ConfigError, ParameterError
from .model import Mode, NetworkSizes, ScenarioParams, SlotLengths
from .sim import ACCUMULATE_CHOICES, MAX_SEED, RunConfig

logger = logging.getLogger(__name__)

ENV_VAR = 'COEXISTSIM_SETTINGS'

#: sigma_C / sigma_S of the named slot scenarios
SLOT_SCENARIOS = {
    'small-collision': 0.1,
    'equal-slots': 1.0,
    'large-collision': 2.0,
}
EXPLICIT = 'explicit'

FULL_SCALE = {'SIM_RUNS': 100000, 'SIM_STAGES': 1000}

_DECILES = tuple(round(0.05 + 0.1 * i, 2) for i in range(10))


def _default_config():
    return {
        'SCENARIO_N_AON': 5,
        'SCENARIO_N_TON': 5,
        'SCENARIO_SLOT_SCENARIO': 'small-collision',
        'SCENARIO_BETA': 0.01,
        'SCENARIO_SIGMA_IDLE': None,
        'SCENARIO_SIGMA_SUCCESS': None,
        'SCENARIO_SIGMA_COLLISION': None,
        'SCENARIO_RATE': 1.0,
        'SCENARIO_ALPHA': 0.9,
        'SCENARIO_P_R': 0.5,
        'SCENARIO_INITIAL_AGE': None,
        'SIM_MODE': 'competitive',
        'SIM_RUNS': 2000,
        'SIM_STAGES': 300,
        'SIM_SEED': 0,
        'SIM_THREADS': 1,
        'SIM_CHUNK_RUNS': 250,
        'SIM_ACCUMULATE': 'realized',
        'SWEEP_AGES': (1.0, 4.646, 10.0),
        'SWEEP_ALPHAS': _DECILES,
        'SWEEP_PRS': _DECILES,
        'SWEEP_PR_STEP': 0.01,
        'SWEEP_SIZES': ((1, 1), (2, 2), (5, 5), (10, 10)),
        'SWEEP_FREQ_SIZES': (1, 2, 5, 10, 50),
        'OUTPUT_PATH': '-',
        'EXPERIMENTS': (
            'coexistsim.experiments.msne.MsneExperiment',
            'coexistsim.experiments.stage.StageExperiment',
            'coexistsim.experiments.simulate.SimulateExperiment',
            'coexistsim.experiments.region.RegionExperiment',
            'coexistsim.experiments.gain.GainExperiment',
            'coexistsim.experiments.freq.FreqExperiment',
        ),
    }


def _int(value):
    if isinstance(value, bool) or int(value) != value:
        raise ValueError('expected an integer, got %r' % (value,))
    return int(value)


def _positive_int(value):
    value = _int(value)
    if value < 1:
        raise ValueError('expected a positive integer, got %r' % (value,))
    return value


def _float(value):
    if isinstance(value, bool):
        raise ValueError('expected a number, got %r' % (value,))
    return float(value)


def _seed(value):
    value = _int(value)
    if not 0 <= value <= MAX_SEED:
        raise ValueError('expected an unsigned 64-bit integer, got %r' % (value,))
    return value


def _grid_step(value):
    value = _float(value)
    if not 0 < value <= 0.01:
        raise ValueError('expected a step in (0, 0.01], got %r' % (value,))
    return value


def _optional_float(value):
    return None if value is None else _float(value)


def _floats(value):
    return tuple(_float(v) for v in value)


def _positive_ints(value):
    return tuple(_positive_int(v) for v in value)


def _size_pairs(value):
    pairs = []
    for pair in value:
        n_aon, n_ton = pair
        pairs.append((_positive_int(n_aon), _positive_int(n_ton)))
    return tuple(pairs)


def _strings(value):
    if isinstance(value, str):
        raise ValueError('expected a list of strings, got %r' % (value,))
    return tuple(str(v) for v in value)


def _choice(*choices):
    def convert(value):
        if value not in choices:
            raise ValueError('expected one of %s, got %r' % (', '.join(choices), value))
        return value
    return convert


_CONVERTERS = {
    'SCENARIO_N_AON': _positive_int,
    'SCENARIO_N_TON': _positive_int,
    'SCENARIO_SLOT_SCENARIO': _choice(EXPLICIT, *SLOT_SCENARIOS),
    'SCENARIO_BETA': _float,
    'SCENARIO_SIGMA_IDLE': _optional_float,
    'SCENARIO_SIGMA_SUCCESS': _optional_float,
    'SCENARIO_SIGMA_COLLISION': _optional_float,
    'SCENARIO_RATE': _float,
    'SCENARIO_ALPHA': _float,
    'SCENARIO_P_R': _float,
    'SCENARIO_INITIAL_AGE': _optional_float,
    'SIM_MODE': _choice(*(mode.value for mode in Mode)),
    'SIM_RUNS': _positive_int,
    'SIM_STAGES': _positive_int,
    'SIM_SEED': _seed,
    'SIM_THREADS': _positive_int,
    'SIM_CHUNK_RUNS': _positive_int,
    'SIM_ACCUMULATE': _choice(*ACCUMULATE_CHOICES),
    'SWEEP_AGES': _floats,
    'SWEEP_ALPHAS': _floats,
    'SWEEP_PRS': _floats,
    'SWEEP_PR_STEP': _grid_step,
    'SWEEP_SIZES': _size_pairs,
    'SWEEP_FREQ_SIZES': _positive_ints,
    'OUTPUT_PATH': str,
    'EXPERIMENTS': _strings,
}

_SECTIONS = (
    ('scenario', 'SCENARIO_'),
    ('simulation', 'SIM_'),
    ('sweeps', 'SWEEP_'),
    ('output', 'OUTPUT_'),
    ('experiments', 'EXPERIMENTS'),
)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioParams
    slot_scenario: str
    beta: float
    mode: Mode
    n_runs: int
    n_stages: int
    master_seed: int
    threads: int
    chunk_runs: int
    accumulate: str
    ages: Tuple[float, ...]
    alphas: Tuple[float, ...]
    prs: Tuple[float, ...]
    pr_step: float
    sizes: Tuple[Tuple[int, int], ...]
    freq_sizes: Tuple[int, ...]
    output: str
    experiments: Tuple[str, ...]
    explicit_initial_age: Optional[float] = None

    def run_config(self, mode=None, **changes):
        """RunConfig of this experiment, optionally for another mode or scenario."""
        scenario = replace(self.scenario, **changes) if changes else self.scenario
        return RunConfig(scenario, self.n_stages, mode or self.mode, self.master_seed,
                         self.chunk_runs, self.accumulate)

    def with_overrides(self, **values):
        """Copy with command line overrides applied; ``None`` leaves a field alone."""
        values = dict((k, v) for k, v in values.items() if v is not None)
        return replace(self, **values) if values else self


_ASSIGNMENT = r'^\s*%s\s*='


def _locate(path, key):
    """Line of the assignment of ``key`` in ``path``, if any."""
    if path is None or key is None:
        return None
    try:
        with open(path) as f:
            for number, line in enumerate(f, 1):
                if re.match(_ASSIGNMENT % re.escape(key), line):
                    return number
    except OSError:
        pass
    return None


def _convert(config, key, path):
    try:
        return _CONVERTERS[key](config[key])
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e), path=path, line=_locate(path, key), key=key)


def _slot_lengths(values, path):
    scenario = values['SCENARIO_SLOT_SCENARIO']
    if scenario == EXPLICIT:
        keys = ('SCENARIO_SIGMA_IDLE', 'SCENARIO_SIGMA_SUCCESS', 'SCENARIO_SIGMA_COLLISION')
        for key in keys:
            if values[key] is None:
                raise ConfigError('required by the explicit slot scenario', path=path,
                                  line=_locate(path, 'SCENARIO_SLOT_SCENARIO'), key=key)
        return SlotLengths(*(values[key] for key in keys))
    return SlotLengths.from_beta(values['SCENARIO_BETA'], SLOT_SCENARIOS[scenario])


def build_config(config, path=None):
    """Validate a populated :class:`flask.Config` into an :class:`ExperimentConfig`."""
    for key, value in _default_config().items():
        config.setdefault(key, value)
    unknown = sorted(key for key in config if key not in _CONVERTERS)
    if unknown:
        raise ConfigError('unknown setting', path=path, line=_locate(path, unknown[0]),
                          key=unknown[0])
    values = dict((key, _convert(config, key, path)) for key in _CONVERTERS)

    try:
        slots = _slot_lengths(values, path)
        scenario = ScenarioParams(
            sizes=NetworkSizes(values['SCENARIO_N_AON'], values['SCENARIO_N_TON']),
            slots=slots,
            rate=values['SCENARIO_RATE'],
            alpha=values['SCENARIO_ALPHA'],
            p_r=values['SCENARIO_P_R'],
            initial_age=values['SCENARIO_INITIAL_AGE'],
        )
    except ParameterError as e:
        raise ConfigError(str(e), path=path)

    return ExperimentConfig(
        scenario=scenario,
        slot_scenario=values['SCENARIO_SLOT_SCENARIO'],
        beta=values['SCENARIO_BETA'],
        mode=Mode(values['SIM_MODE']),
        n_runs=values['SIM_RUNS'],
        n_stages=values['SIM_STAGES'],
        master_seed=values['SIM_SEED'],
        threads=values['SIM_THREADS'],
        chunk_runs=values['SIM_CHUNK_RUNS'],
        accumulate=values['SIM_ACCUMULATE'],
        ages=values['SWEEP_AGES'],
        alphas=values['SWEEP_ALPHAS'],
        prs=values['SWEEP_PRS'],
        pr_step=values['SWEEP_PR_STEP'],
        sizes=values['SWEEP_SIZES'],
        freq_sizes=values['SWEEP_FREQ_SIZES'],
        output=values['OUTPUT_PATH'],
        experiments=values['EXPERIMENTS'],
        explicit_initial_age=values['SCENARIO_INITIAL_AGE'],
    )


def config_from_mapping(mapping):
    config = Config(os.getcwd())
    config.from_mapping(mapping)
    return build_config(config)


def load_config(path=None):
    """Read ``path`` (or the file named by ``COEXISTSIM_SETTINGS``) over the defaults."""
    config = Config(os.getcwd())
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is not None:
        try:
            config.from_pyfile(os.path.abspath(path))
        except SyntaxError as e:
            raise ConfigError(e.msg, path=path, line=e.lineno)
        except OSError as e:
            raise ConfigError(e.strerror or str(e), path=path)
        except Exception as e:
            raise ConfigError('%s: %s' % (type(e).__name__, e), path=path)
        logger.debug('loaded configuration from %s', path)
    return build_config(config, path)


def to_mapping(config):
    """Settings that reproduce ``config`` when read back."""
    scenario = config.scenario
    explicit = config.slot_scenario == EXPLICIT
    slots = scenario.slots
    return {
        'SCENARIO_N_AON': scenario.sizes.n_aon,
        'SCENARIO_N_TON': scenario.sizes.n_ton,
        'SCENARIO_SLOT_SCENARIO': config.slot_scenario,
        'SCENARIO_BETA': config.beta,
        'SCENARIO_SIGMA_IDLE': slots.sigma_idle if explicit else None,
        'SCENARIO_SIGMA_SUCCESS': slots.sigma_success if explicit else None,
        'SCENARIO_SIGMA_COLLISION': slots.sigma_collision if explicit else None,
        'SCENARIO_RATE': scenario.rate,
        'SCENARIO_ALPHA': scenario.alpha,
        'SCENARIO_P_R': scenario.p_r,
        'SCENARIO_INITIAL_AGE': config.explicit_initial_age,
        'SIM_MODE': config.mode.value,
        'SIM_RUNS': config.n_runs,
        'SIM_STAGES': config.n_stages,
        'SIM_SEED': config.master_seed,
        'SIM_THREADS': config.threads,
        'SIM_CHUNK_RUNS': config.chunk_runs,
        'SIM_ACCUMULATE': config.accumulate,
        'SWEEP_AGES': config.ages,
        'SWEEP_ALPHAS': config.alphas,
        'SWEEP_PRS': config.prs,
        'SWEEP_PR_STEP': config.pr_step,
        'SWEEP_SIZES': config.sizes,
        'SWEEP_FREQ_SIZES': config.freq_sizes,
        'OUTPUT_PATH': config.output,
        'EXPERIMENTS': config.experiments,
    }


def _sections(mapping):
    for title, prefix in _SECTIONS:
        items = [(key, value) for key, value in mapping.items() if key.startswith(prefix)]
        yield title, items


jinja_env = Environment(
    loader=PackageLoader('coexistsim', 'templates'),
    keep_trailing_newline=True,
    autoescape=False,
)
jinja_env.filters['pyrepr'] = repr


def dump_config(config):
    """Canonical echo of ``config`` in the configuration file syntax."""
    template = jinja_env.get_template('config.cfg')
    return template.render(sections=list(_sections(to_mapping(config))))
