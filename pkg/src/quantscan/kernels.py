"""Hot evaluation kernel for the witness solver.

``first_sat`` sweeps a contiguous window of candidate values and returns
the first one satisfying every conjunct, under unsigned 64-bit wrapping
arithmetic.  The numba build is used when available; setting
``QUANTSCAN_NO_NUMBA=1`` (or not having numba installed) selects the pure
numpy fallback.  Both paths are exact and interchangeable; see
``benchmarks/bench_kernel.py`` for a comparison.
"""

from __future__ import annotations

import os

import numpy as np

# opcodes for the comparison column
OP_LT, OP_LE, OP_GE, OP_GT, OP_EQ = 0, 1, 2, 3, 4

_OPCODES = {"<": OP_LT, "<=": OP_LE, ">=": OP_GE, ">": OP_GT, "==": OP_EQ}


def opcode(op: str) -> int:
    return _OPCODES[op]


def _first_sat_numpy(lc, lb, rc, rb, ops, start, length):
    ns = np.arange(length, dtype=np.uint64) + np.uint64(start)
    sat = np.ones(length, dtype=bool)
    with np.errstate(over="ignore"):
        for j in range(lc.shape[0]):
            lv = lc[j] * ns + lb[j]
            rv = rc[j] * ns + rb[j]
            op = ops[j]
            if op == OP_LT:
                sat &= lv < rv
            elif op == OP_LE:
                sat &= lv <= rv
            elif op == OP_GE:
                sat &= lv >= rv
            elif op == OP_GT:
                sat &= lv > rv
            else:
                sat &= lv == rv
            if not sat.any():
                return -1
    hits = np.flatnonzero(sat)
    return int(hits[0]) if hits.size else -1


def _build_numba():
    from numba import njit

    @njit(cache=True)
    def _first_sat(lc, lb, rc, rb, ops, start, length):  # pragma: no cover
        for off in range(length):
            n = start + np.uint64(off)  # stays uint64; wraps like the hardware
            ok = True
            for j in range(lc.shape[0]):
                lv = lc[j] * n + lb[j]
                rv = rc[j] * n + rb[j]
                op = ops[j]
                if op == OP_LT:
                    good = lv < rv
                elif op == OP_LE:
                    good = lv <= rv
                elif op == OP_GE:
                    good = lv >= rv
                elif op == OP_GT:
                    good = lv > rv
                else:
                    good = lv == rv
                if not good:
                    ok = False
                    break
            if ok:
                return off
        return -1

    return _first_sat


USING_NUMBA = False
_impl = _first_sat_numpy
if os.environ.get("QUANTSCAN_NO_NUMBA", "") != "1":
    try:
        _impl = _build_numba()
        USING_NUMBA = True
    except ImportError:
        pass


def first_sat(lc, lb, rc, rb, ops, start: int, length: int) -> int:
    """First offset in [0, length) with all conjuncts true at n=start+offset.

    Returns -1 when the window holds no satisfying value.  Array columns
    are one row per conjunct: lhs/rhs coefficient and constant (uint64)
    plus an opcode.
    """
    return int(_impl(lc, lb, rc, rb, ops, np.uint64(start), length))
