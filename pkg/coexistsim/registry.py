import functools
import logging

from werkzeug.utils import import_string

from .exceptions import ConfigError
from .experiment import Experiment

logger = logging.getLogger(__name__)


@functools.lru_cache(maxsize=None)
def load_experiment(path):
    """Experiment class at the dotted ``path``, or None when it cannot be used."""
    try:
        experiment_class = import_string(path)
    except ImportError as e:
        logger.warning('Disabled %s due to ImportError: %s', path, e)
        return None
    if not (isinstance(experiment_class, type) and issubclass(experiment_class, Experiment)):
        logger.warning('Disabled %s: not an Experiment subclass', path)
        return None
    return experiment_class


class ExperimentRegistry(object):
    """Experiment classes named by the ``EXPERIMENTS`` setting, keyed by subcommand."""

    def __init__(self, paths):
        self.paths = tuple(paths)
        self._by_name = {}
        for path in self.paths:
            experiment_class = load_experiment(path)
            if experiment_class is None:
                continue
            if experiment_class.name in self._by_name:
                raise ConfigError('experiment name %r is used twice' % experiment_class.name,
                                  key='EXPERIMENTS')
            self._by_name[experiment_class.name] = experiment_class

    def iter_experiments(self):
        return iter(self._by_name.values())

    def names(self):
        return list(self._by_name)

    def get(self, name):
        try:
            return self._by_name[name]
        except KeyError:
            raise ConfigError('no experiment named %r (available: %s)'
                              % (name, ', '.join(self._by_name)), key='EXPERIMENTS')
