from blinker import Namespace

_signals = Namespace()

#: sent by the Monte Carlo engine after each chunk of runs, with ``index`` and ``runs``
chunk_finished = _signals.signal('chunk-finished')

#: sent by the region sweep per (alpha, P_R) cell, with ``alpha``, ``p_r`` and ``feasibility``
cell_evaluated = _signals.signal('cell-evaluated')
