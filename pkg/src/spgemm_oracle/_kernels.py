"""Compiled row kernels. They release the GIL so row blocks can run on threads."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

EMPTY = -1


@njit(nogil=True, cache=True)
def flop_range(a_rpt, a_col, b_rpt, lo, hi, out):
    total = 0
    for i in range(lo, hi):
        local = 0
        for j in range(a_rpt[i], a_rpt[i + 1]):
            k = a_col[j]
            local += b_rpt[k + 1] - b_rpt[k]
        out[i] = local
        total += local
    return total


@njit(nogil=True, cache=True)
def row_nnz_kernel(a_rpt, a_col, b_rpt, b_col, row, table, tsize, hash_scale):
    if tsize == 0:
        return 0
    for s in range(tsize):
        table[s] = EMPTY
    nnz = 0
    for i in range(a_rpt[row], a_rpt[row + 1]):
        b_row = a_col[i]
        for j in range(b_rpt[b_row], b_rpt[b_row + 1]):
            key = np.int64(b_col[j])
            h = (key * hash_scale) % tsize
            while True:
                slot = table[h]
                if slot == key:
                    break
                if slot == EMPTY:
                    table[h] = key
                    nnz += 1
                    break
                h += 1
                if h == tsize:
                    h = 0
    return nnz


@njit(nogil=True, cache=True)
def symbolic_range(a_rpt, a_col, b_rpt, b_col, flop, lo, hi, table, hash_scale, out):
    total = 0
    for i in range(lo, hi):
        n = row_nnz_kernel(a_rpt, a_col, b_rpt, b_col, i, table, flop[i], hash_scale)
        out[i] = n
        total += n
    return total


@njit(nogil=True, cache=True)
def symbolic_list(a_rpt, a_col, b_rpt, b_col, flop, rows, lo, hi, table, hash_scale, out):
    total = 0
    for k in range(lo, hi):
        r = rows[k]
        n = row_nnz_kernel(a_rpt, a_col, b_rpt, b_col, r, table, flop[r], hash_scale)
        out[k] = n
        total += n
    return total


def blocks(n: int, n_threads: int) -> list[tuple[int, int]]:
    """Split ``[0, n)`` into at most ``n_threads`` contiguous, near-equal blocks."""
    n_threads = max(1, min(int(n_threads), n)) if n else 1
    bounds = [(n * t) // n_threads for t in range(n_threads + 1)]
    return [(bounds[t], bounds[t + 1]) for t in range(n_threads)]


def run_blocks(n: int, n_threads: int, fn) -> list:
    """Run ``fn(lo, hi)`` over the static blocks of ``[0, n)``; results in block order."""
    parts = blocks(n, n_threads)
    if len(parts) == 1:
        return [fn(*parts[0])]
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        return list(pool.map(lambda b: fn(*b), parts))
