"""Numeric inner loops, compiled with numba when available.

Set ``KPSC_DISABLE_JIT=1`` to force the pure-numpy implementations (also
used automatically when numba cannot be imported). Both paths return
identical results; ``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

JIT_DISABLED = os.environ.get("KPSC_DISABLE_JIT", "").strip().lower() not in ("", "0", "false", "no")

try:
    if JIT_DISABLED:
        raise ImportError("disabled by KPSC_DISABLE_JIT")
    from numba import njit
except ImportError:
    njit = None

USING_NUMBA = njit is not None

MODE_T, MODE_ST, MODE_TRAJ = 0, 1, 2


# ---------------------------------------------------------------- numpy path

def _pack_fields_np(values, widths):
    values = np.asarray(values, dtype=np.uint64)
    widths = np.asarray(widths, dtype=np.int64)
    total = int(widths.sum())
    if total == 0:
        return np.zeros(0, dtype=np.uint8)
    field = np.repeat(np.arange(len(widths)), widths)
    starts = np.cumsum(widths) - widths
    offset = np.arange(total, dtype=np.int64) - starts[field]
    shift = (widths[field] - 1 - offset).astype(np.uint64)
    bits = (values[field] >> shift) & np.uint64(1)
    return np.packbits(bits.astype(np.uint8))


def _se_lengths_np(v):
    v = np.asarray(v, dtype=np.int64)
    u = np.where(v > 0, 2 * v - 1, -2 * v)
    _, exp = np.frexp((u + 1).astype(np.float64))
    return (2 * exp.astype(np.int64) - 1)


def _bit_tables_np(cur, prev1, prev2, vis0, vis1, vis2, parent, central):
    n = cur.shape[0]
    out = np.full((3, n), -1, dtype=np.int64)
    vis0 = vis0.astype(bool)
    vis1 = vis1.astype(bool)
    vis2 = vis2.astype(bool)
    if central >= 0:
        mv = cur[central] - prev1[central]
        r_t = cur - prev1 - mv
        ok_t = vis0 & vis1
        len_t = _se_lengths_np(r_t).sum(axis=1)
        out[MODE_T] = np.where(ok_t, len_t, -1)
        has_par = parent >= 0
        par = np.where(has_par, parent, 0)
        ok_st = ok_t & has_par & vis0[par] & vis1[par]
        len_st = _se_lengths_np(r_t - r_t[par]).sum(axis=1)
        out[MODE_ST] = np.where(ok_st, len_st, -1)
    ok_tr = vis0 & vis1 & vis2
    len_tr = _se_lengths_np(cur - 2 * prev1 + prev2).sum(axis=1)
    out[MODE_TRAJ] = np.where(ok_tr, len_tr, -1)
    return out


def _decode_se_run_py(buf, bitpos, count, out):
    # Sequential by nature; this is the interpreter fallback.
    buf = bytes(buf)
    nbits = len(buf) * 8
    for k in range(count):
        zeros = 0
        while True:
            if bitpos >= nbits:
                return -1
            if (buf[bitpos >> 3] >> (7 - (bitpos & 7))) & 1:
                break
            zeros += 1
            bitpos += 1
        if bitpos + zeros + 1 > nbits:
            return -1
        val = 0
        for _ in range(zeros + 1):
            val = (val << 1) | ((buf[bitpos >> 3] >> (7 - (bitpos & 7))) & 1)
            bitpos += 1
        u = val - 1
        out[k] = (u + 1) // 2 if u & 1 else -(u // 2)
    return bitpos


# ---------------------------------------------------------------- numba path

if USING_NUMBA:

    @njit(cache=True)
    def _pack_fields_nb(values, widths):
        total = 0
        for w in widths:
            total += w
        out = np.zeros((total + 7) // 8, dtype=np.uint8)
        acc = np.uint64(0)
        nacc = 0
        j = 0
        for k in range(values.shape[0]):
            w = widths[k]
            if w == 0:
                continue
            acc = (acc << np.uint64(w)) | values[k]
            nacc += w
            while nacc >= 8:
                nacc -= 8
                out[j] = np.uint8((acc >> np.uint64(nacc)) & np.uint64(0xFF))
                j += 1
            acc &= (np.uint64(1) << np.uint64(nacc)) - np.uint64(1)
        if nacc > 0:
            out[j] = np.uint8((acc << np.uint64(8 - nacc)) & np.uint64(0xFF))
        return out

    @njit(cache=True)
    def _se_len1(v):
        u = 2 * v - 1 if v > 0 else -2 * v
        x = u + 1
        n = 0
        while x:
            x >>= 1
            n += 1
        return 2 * n - 1

    @njit(cache=True)
    def _se_lengths_nb(v):
        out = np.empty(v.shape[0], dtype=np.int64)
        for k in range(v.shape[0]):
            out[k] = _se_len1(v[k])
        return out

    @njit(cache=True)
    def _bit_tables_nb(cur, prev1, prev2, vis0, vis1, vis2, parent, central):
        n, d = cur.shape
        out = np.full((3, n), -1, dtype=np.int64)
        for i in range(n):
            if not vis0[i] or not vis1[i]:
                continue
            if central >= 0:
                bt = 0
                for j in range(d):
                    mv = cur[central, j] - prev1[central, j]
                    bt += _se_len1(cur[i, j] - prev1[i, j] - mv)
                out[MODE_T, i] = bt
                p = parent[i]
                if p >= 0 and vis0[p] and vis1[p]:
                    bst = 0
                    for j in range(d):
                        mv = cur[central, j] - prev1[central, j]
                        rt_i = cur[i, j] - prev1[i, j] - mv
                        rt_p = cur[p, j] - prev1[p, j] - mv
                        bst += _se_len1(rt_i - rt_p)
                    out[MODE_ST, i] = bst
            if vis2[i]:
                btr = 0
                for j in range(d):
                    btr += _se_len1(cur[i, j] - 2 * prev1[i, j] + prev2[i, j])
                out[MODE_TRAJ, i] = btr
        return out

    @njit(cache=True)
    def _decode_se_run_nb(buf, bitpos, count, out):
        nbits = buf.shape[0] * 8
        for k in range(count):
            zeros = 0
            while True:
                if bitpos >= nbits:
                    return -1
                if (buf[bitpos >> 3] >> (7 - (bitpos & 7))) & 1:
                    break
                zeros += 1
                bitpos += 1
            if bitpos + zeros + 1 > nbits:
                return -1
            val = 0
            for _ in range(zeros + 1):
                val = (val << 1) | ((buf[bitpos >> 3] >> (7 - (bitpos & 7))) & 1)
                bitpos += 1
            u = val - 1
            if u & 1:
                out[k] = (u + 1) // 2
            else:
                out[k] = -(u // 2)
        return bitpos


def pack_fields(values, widths) -> np.ndarray:
    """Concatenate ``(value, width)`` bit fields MSB-first into zero-padded bytes.

    Each width must be at most 63.
    """
    values = np.ascontiguousarray(values, dtype=np.uint64)
    widths = np.ascontiguousarray(widths, dtype=np.int64)
    if USING_NUMBA:
        return _pack_fields_nb(values, widths)
    return _pack_fields_np(values, widths)


def se_lengths(values) -> np.ndarray:
    """Signed exp-Golomb codeword length of every element."""
    values = np.ascontiguousarray(values, dtype=np.int64)
    if USING_NUMBA:
        return _se_lengths_nb(values)
    return _se_lengths_np(values)


def bit_tables(cur, prev1, prev2, vis0, vis1, vis2, parent, central) -> np.ndarray:
    """Per-point bit cost under temporal, spatial-temporal and trajectory modes.

    Arrays describe one object at frames t, t-1, t-2 (``cur``/``prev*`` are
    (N, D) int64, ``vis*`` are (N,) bool, ``parent`` is (N,) int64 with -1 for
    no parent). ``central`` is the frame's central index or -1. Returns a
    (3, N) int64 table where -1 marks an unavailable mode.
    """
    if USING_NUMBA:
        return _bit_tables_nb(cur, prev1, prev2, vis0, vis1, vis2, parent, central)
    return _bit_tables_np(cur, prev1, prev2, vis0, vis1, vis2, parent, central)


def decode_se_run(buf: np.ndarray, bitpos: int, count: int, out: np.ndarray) -> int:
    """Decode ``count`` signed codewords starting at ``bitpos`` into ``out``.

    Returns the new bit position, or -1 if the data ends first.
    """
    if USING_NUMBA:
        return _decode_se_run_nb(buf, bitpos, count, out)
    return _decode_se_run_py(buf, bitpos, count, out)
