import numpy as np


def format_float(value):
    """Full-precision decimal rendering used in every CSV cell."""
    return format(float(value), '.17g')


def format_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return '1' if value else '0'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if value is None:
        return ''
    return str(value)


def probability_grid(step):
    """Grid {0, step, ..., 1} with exact end points."""
    count = int(round(1.0 / step))
    return np.linspace(0.0, 1.0, count + 1)


def merge_intervals(points, mask):
    """Collapse the runs of ``True`` in ``mask`` into ``(first, last)`` point pairs."""
    points = np.asarray(points, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    intervals = []
    start = None
    for index, flag in enumerate(mask):
        if flag and start is None:
            start = index
        elif not flag and start is not None:
            intervals.append((float(points[start]), float(points[index - 1])))
            start = None
    if start is not None:
        intervals.append((float(points[start]), float(points[-1])))
    return tuple(intervals)


def format_intervals(intervals):
    if not intervals:
        return ''
    return ' '.join('[%s,%s]' % (format_float(lo), format_float(hi))
                    for lo, hi in intervals)
