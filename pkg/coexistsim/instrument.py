try:
    import resource
except ImportError:
    resource = None  # Will fail on Win32 systems
try:
    import cProfile as profile
except ImportError:
    import profile
import functools
import logging
import os.path
import pstats
import time

logger = logging.getLogger(__name__)

PACKAGE_PARENT = os.path.dirname(os.path.dirname(os.path.abspath(__file__))) + os.sep


class Timer(object):
    """
    Wall clock and CPU time of a block, logged at INFO when it exits.
    """
    has_resource = resource is not None

    def __init__(self, name):
        self.name = name
        self.total_time = None
        self.user_time = None
        self.system_time = None

    def __enter__(self):
        self._start_time = time.time()
        if self.has_resource:
            self._start_rusage = resource.getrusage(resource.RUSAGE_SELF)
        return self

    def __exit__(self, *exc_info):
        self.total_time = (time.time() - self._start_time) * 1000
        if self.has_resource:
            self._end_rusage = resource.getrusage(resource.RUSAGE_SELF)
            self.user_time = 1000 * self._elapsed_ru('ru_utime')
            self.system_time = 1000 * self._elapsed_ru('ru_stime')
        logger.info('%s: %s', self.name, self.summary())
        return False

    def _elapsed_ru(self, name):
        return getattr(self._end_rusage, name) - getattr(self._start_rusage, name)

    def rows(self):
        rows = [('Elapsed time', '%0.3f msec' % self.total_time)]
        if self.user_time is not None:
            rows[:0] = [
                ('User CPU time', '%0.3f msec' % self.user_time),
                ('System CPU time', '%0.3f msec' % self.system_time),
                ('Total CPU time', '%0.3f msec' % (self.user_time + self.system_time)),
            ]
        return rows

    def summary(self):
        if self.user_time is not None:
            return 'CPU: %0.2fms (%0.2fms)' % (self.user_time + self.system_time, self.total_time)
        return 'TOTAL: %0.2fms' % self.total_time


class Profiler(object):
    """
    Runs a callable under cProfile and keeps the per-function statistics.
    """

    def __init__(self, limit=20):
        self.limit = limit
        self.profiler = profile.Profile()
        self.stats = None
        self.function_calls = []

    def wrap(self, func):
        wrapped = functools.partial(self.runcall, func)
        functools.update_wrapper(wrapped, func)
        return wrapped

    def runcall(self, func, *args, **kwargs):
        try:
            return self.profiler.runcall(func, *args, **kwargs)
        finally:
            self.profiler.disable()
            self._collect()

    def _collect(self):
        try:
            stats = pstats.Stats(self.profiler)
        except TypeError:
            # nothing was recorded
            return
        function_calls = []
        for func in stats.sort_stats('cumulative').fcn_list[:self.limit]:
            info = stats.stats[func]
            current = {}

            # Number of calls
            if info[0] != info[1]:
                current['ncalls'] = '%d/%d' % (info[1], info[0])
            else:
                current['ncalls'] = str(info[1])

            current['tottime'] = info[2] * 1000
            current['cumtime'] = info[3] * 1000
            if info[0]:
                current['percall_cum'] = info[3] * 1000 / info[0]
            else:
                current['percall_cum'] = 0

            # package functions are shown as coexistsim/module.py:line(name)
            current['filename'] = pstats.func_std_string(func).replace(PACKAGE_PARENT, '')
            function_calls.append(current)
        self.stats = stats
        self.function_calls = function_calls

    def log(self):
        if self.stats is None:
            logger.info('profiler recorded nothing')
            return
        logger.info('profile: %.2fms total', float(self.stats.total_tt) * 1000)
        for row in self.function_calls:
            logger.info('%10s %10.3f %10.3f %10.3f  %s', row['ncalls'], row['tottime'],
                        row['cumtime'], row['percall_cum'], row['filename'])
