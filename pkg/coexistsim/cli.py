"""Command line interface.

Every experiment listed in the ``EXPERIMENTS`` setting becomes a subcommand
writing CSV to ``--out`` (default stdout)::

    coexistsim --config run.cfg --seed 7 --threads 4 region --out region.csv
"""
import contextlib
import functools
import inspect
import logging
import sys

import click

from . import signals
from .config import FULL_SCALE, dump_config, load_config
from .exceptions import ConfigError, OutOfRange, ParameterError
from .instrument import Profiler, Timer
from .registry import ExperimentRegistry

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_OUT_OF_RANGE = 3
EXIT_IO = 4


def _log_chunk(sender, index, runs):
    logger.debug('chunk %d finished (%d runs)', index, runs)


def _log_cell(sender, alpha, p_r, feasibility):
    logger.debug('cell alpha=%g P_R=%g: %s', alpha, p_r, feasibility.value)


signals.chunk_finished.connect(_log_chunk)
signals.cell_evaluated.connect(_log_cell)


def configure_logging(verbose, quiet):
    level = logging.INFO
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    logging.getLogger().setLevel(level)


def handle_errors(f):
    """Map package errors onto the documented exit codes."""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return f(*args, **kwargs)
        except (ConfigError, ParameterError) as e:
            click.echo('error: %s' % e, err=True)
            ctx.exit(EXIT_CONFIG)
        except OutOfRange as e:
            click.echo('error: %s (network age %r)' % (e, e.network_age), err=True)
            ctx.exit(EXIT_OUT_OF_RANGE)
        except OSError as e:
            click.echo('error: %s' % e, err=True)
            ctx.exit(EXIT_IO)
    return wrapper


def experiment_config(ctx):
    """Configuration with the command line overrides applied, loaded once."""
    obj = ctx.ensure_object(dict)
    if 'config' not in obj:
        params = ctx.find_root().params
        try:
            config = load_config(params.get('config_path'))
        except ConfigError as e:
            click.echo('error: %s' % e, err=True)
            ctx.exit(EXIT_CONFIG)
        if params.get('full_scale'):
            config = config.with_overrides(n_runs=FULL_SCALE['SIM_RUNS'],
                                           n_stages=FULL_SCALE['SIM_STAGES'])
        obj['config'] = config.with_overrides(
            master_seed=params.get('seed'),
            n_runs=params.get('runs'),
            n_stages=params.get('stages'),
            threads=params.get('threads'),
        )
    return obj['config']


@contextlib.contextmanager
def open_output(path):
    if path in (None, '-'):
        yield click.get_text_stream('stdout')
    else:
        with open(path, 'w', newline='') as stream:
            yield stream


def _experiment_command(experiment_class):
    params = [click.Option(['--out', 'out'], default=None, metavar='PATH',
                           help='CSV destination (default OUTPUT_PATH, "-" for stdout).')]
    for flag, help_text in experiment_class.flags:
        params.append(click.Option(['--%s' % flag.replace('_', '-'), flag], is_flag=True,
                                   help=help_text))

    @click.pass_context
    @handle_errors
    def callback(ctx, out, **flags):
        config = experiment_config(ctx)
        experiment = experiment_class(config, **flags)
        logger.info('%s: %s', experiment.name, experiment.title())
        if experiment.uses_simulation:
            logger.info('seed %d, %d runs x %d stages, %d threads', config.master_seed,
                        config.n_runs, config.n_stages, config.threads)
        root = ctx.find_root().params
        path = out or config.output
        run = experiment.write
        profiler = None
        if root.get('profile'):
            profiler = Profiler()
            run = profiler.wrap(run)
        with Timer(experiment.name):
            with open_output(path) as stream:
                run(stream)
        if profiler is not None:
            profiler.log()
        logger.info(experiment.summary())

    return click.Command(experiment_class.name, callback=callback, params=params,
                         help=inspect.cleandoc(experiment_class.__doc__ or ""))


@click.command('config')
@click.pass_context
@handle_errors
def config_command(ctx):
    """Print the effective configuration in file syntax."""
    click.echo(dump_config(experiment_config(ctx)), nl=False)


class ExperimentGroup(click.Group):
    """Subcommands come from the ``EXPERIMENTS`` setting of the loaded configuration."""

    def _registry(self, ctx):
        return ExperimentRegistry(experiment_config(ctx).experiments)

    def list_commands(self, ctx):
        names = super(ExperimentGroup, self).list_commands(ctx)
        return names + sorted(self._registry(ctx).names())

    def get_command(self, ctx, name):
        command = super(ExperimentGroup, self).get_command(ctx, name)
        if command is not None:
            return command
        registry = self._registry(ctx)
        if name not in registry.names():
            return None
        return _experiment_command(registry.get(name))


@click.group(cls=ExperimentGroup)
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='Settings file (default: $COEXISTSIM_SETTINGS, then built-in defaults).')
@click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), default=None,
              help='Master seed.')
@click.option('--runs', type=click.IntRange(min=1), default=None, help='Monte Carlo runs.')
@click.option('--stages', type=click.IntRange(min=1), default=None, help='Stages per run.')
@click.option('--threads', type=click.IntRange(min=1), default=None, help='Worker threads.')
@click.option('--paper-scale', '--full-scale', 'full_scale', is_flag=True,
              help='%d runs x %d stages unless --runs/--stages are given.'
                   % (FULL_SCALE['SIM_RUNS'], FULL_SCALE['SIM_STAGES']))
@click.option('-v', '--verbose', is_flag=True, help='Log at DEBUG level.')
@click.option('-q', '--quiet', is_flag=True, help='Log warnings and errors only.')
@click.option('--profile', is_flag=True, help='Log the top functions by cumulative time.')
def cli(config_path, seed, runs, stages, threads, full_scale, verbose, quiet, profile):
    """Coexistence of an age-optimizing and a throughput-optimizing network."""
    configure_logging(verbose, quiet)


cli.add_command(config_command)


def main():
    cli(prog_name='coexistsim')


if __name__ == '__main__':
    main()
