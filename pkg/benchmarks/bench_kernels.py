"""Compare the numba kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 20] [--frames 60]

Kernel timings call both implementations in-process. The end-to-end row
runs encode + decode in a fresh interpreter per backend, with
KPSC_DISABLE_JIT toggled, so each side uses exactly what a user would get.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from kpsc import _kernels
from kpsc.bitio import BitWriter
from kpsc.profiles import FACE68

E2E = """
import json, time
from kpsc import _kernels
from kpsc.codec import decode_sequence, encode_sequence
from kpsc.synth import synth_generate
seq = synth_generate("articulated", "face68", n_objects=4, n_frames={frames}, seed=1)
decode_sequence(encode_sequence(seq))  # warm-up (and JIT compile)
t = time.perf_counter()
stream = encode_sequence(seq)
t_enc = time.perf_counter() - t
t = time.perf_counter()
assert decode_sequence(stream) == seq
t_dec = time.perf_counter() - t
print(json.dumps({{"numba": _kernels.USING_NUMBA, "points": seq.n_visible, "enc": t_enc, "dec": t_dec}}))
"""


def best_of(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def kernel_cases(rng):
    n = FACE68.n_points
    widths = rng.integers(1, 20, size=200_000)
    values = (rng.integers(0, 2**62, size=widths.size, dtype=np.uint64) >> (64 - widths).astype(np.uint64))
    residuals = rng.integers(-500, 500, size=400_000)
    w = BitWriter()
    for v in residuals[:100_000]:
        w.write_se(int(v))
    buf = np.frombuffer(w.getvalue(), dtype=np.uint8)
    out = np.empty(100_000, dtype=np.int64)
    objs = [rng.integers(0, 1000, size=(n, 2)) for _ in range(3)]
    vis = [rng.random(n) < 0.9 for _ in range(3)]
    parents = np.array([-1 if p is None else p for p in FACE68.parents], dtype=np.int64)

    def tables(fn):
        return lambda: [fn(*objs, *vis, parents, FACE68.central) for _ in range(1000)]

    return [
        ("pack_fields (200k fields)", lambda: _kernels._pack_fields_np(values, widths),
         lambda: _kernels._pack_fields_nb(values, widths)),
        ("se_lengths (400k values)", lambda: _kernels._se_lengths_np(residuals),
         lambda: _kernels._se_lengths_nb(residuals)),
        ("bit_tables (1000 face68 objects)", tables(_kernels._bit_tables_np),
         tables(_kernels._bit_tables_nb) if _kernels.USING_NUMBA else None),
        ("decode_se_run (100k values)", lambda: _kernels._decode_se_run_py(buf, 0, out.size, out),
         lambda: _kernels._decode_se_run_nb(buf, 0, out.size, out)),
    ]


def end_to_end(frames, disable):
    env = dict(os.environ)
    env.pop("KPSC_DISABLE_JIT", None)
    if disable:
        env["KPSC_DISABLE_JIT"] = "1"
    proc = subprocess.run([sys.executable, "-c", E2E.format(frames=frames)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--frames", type=int, default=60)
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    print(f"{'kernel':36s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, np_fn, nb_fn in kernel_cases(rng):
        t_np = best_of(np_fn, args.repeat) * 1e3
        if not _kernels.USING_NUMBA or nb_fn is None:
            print(f"{name:36s} {t_np:10.3f} {'n/a':>10s}")
            continue
        t_nb = best_of(nb_fn, args.repeat) * 1e3
        print(f"{name:36s} {t_np:10.3f} {t_nb:10.3f} {t_np / t_nb:7.1f}x")

    print()
    rows = [end_to_end(args.frames, disable) for disable in (True, False)]
    for r in rows:
        label = "numba" if r["numba"] else "numpy"
        us = 1e6 * (r["enc"] + r["dec"]) / r["points"]
        print(f"end to end ({label}): {r['points']} points, encode {r['enc']:.3f}s, "
              f"decode {r['dec']:.3f}s, {us:.1f} us/point")


if __name__ == "__main__":
    main()
