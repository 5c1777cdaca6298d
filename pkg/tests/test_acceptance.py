"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (collected again in the
terminal summary) before asserting.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import record
from kpsc.bench import bits_per_point, run_matrix
from kpsc.bitio import BitReader, BitWriter, bit_length_se
from kpsc.codec import Policy, decode_stream, encode_sequence
from kpsc.ingest import parse_kpjson, write_kpjson
from kpsc.modesel import ModeWeights
from kpsc.predict import Mode
from kpsc.synth import scramble, synth_generate

pytestmark = pytest.mark.acceptance

DATA = Path(__file__).parent / "data"
PROFILES = ("bbox2d", "box3d", "skeleton15", "face68")


def _random_sequence(k):
    rng = np.random.default_rng(k)
    profile = PROFILES[k % 4]
    kind = ("random_walk", "articulated", "constant_velocity", "static")[int(rng.integers(0, 4))]
    big = profile == "face68"
    base = synth_generate(
        kind,
        profile,
        n_objects=int(rng.integers(1, 3 if big else 5)),
        n_frames=int(rng.integers(1, 6 if big else 10)),
        step_std=float(rng.uniform(0.5, 8.0)),
        seed=k,
    )
    return scramble(
        base,
        seed=k,
        p_occlude=float(rng.uniform(0.0, 0.4)),
        p_absent=float(rng.uniform(0.0, 0.4)),
        max_id_gap=int(rng.integers(0, 50)),
        max_frame_gap=int(rng.integers(0, 4)),
    )


def test_criterion_1_losslessness():
    start = time.perf_counter()
    failures, points, counts = [], 0, dict.fromkeys(PROFILES, 0)
    for k in range(1000):
        seq = _random_sequence(k)
        counts[seq.profile.name] += 1
        points += seq.n_visible
        if decode_stream(encode_sequence(seq).to_bytes()).sequence != seq:
            failures.append(k)
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    record(1, ok, f"1000 sequences {counts}, {points} points, {len(failures)} mismatches, {elapsed:.1f}s (< 60s)")
    assert ok, failures[:10]


def test_criterion_2_bijectivity():
    start = time.perf_counter()
    ue_values = range(0, 2**17 + 1)
    se_values = range(-(2**16), 2**16 + 1)
    w = BitWriter()
    for n in ue_values:
        w.write_ue(n)
    for v in se_values:
        w.write_se(v)
    r = BitReader(w.getvalue())
    ue_ok = all(r.read_ue() == n for n in ue_values)
    mark = r.bitpos
    se_ok = all(r.read_se() == v for v in se_values)
    r.bitpos = mark
    se_kernel_ok = np.array_equal(r.read_se_array(len(se_values)), np.arange(-(2**16), 2**16 + 1))
    len_ok = all(bit_length_se(v) == BitWriter().write_se(v) for v in range(-10**4, 10**4 + 1))
    elapsed = time.perf_counter() - start
    ok = ue_ok and se_ok and se_kernel_ok and len_ok and elapsed < 5
    record(2, ok, f"ue {ue_ok}, se {se_ok}, se kernel {se_kernel_ok}, lengths {len_ok}, {elapsed:.2f}s (< 5s)")
    assert ok


def test_criterion_3_mode_symmetry():
    mismatches, records = 0, 0
    for k in range(100):
        seq = _random_sequence(10_000 + k)
        rng = np.random.default_rng(k)
        weights = ModeWeights(*(int(x) for x in rng.integers(1, 10, size=3)))
        stream = encode_sequence(seq, weights)
        dec = decode_stream(stream.to_bytes())
        enc_log, dec_log = stream.stats.modes(), dec.stats.modes()
        records += len(enc_log)
        mismatches += sum(a != b for a, b in zip(enc_log, dec_log)) + abs(len(enc_log) - len(dec_log))
    ok = mismatches == 0
    record(3, ok, f"100 sequences, {records} point modes compared, {mismatches} mismatches")
    assert ok


def test_criterion_4_zero_residuals():
    static_bad = static_n = 0
    for profile in PROFILES:
        seq = synth_generate("static", profile, n_objects=3, n_frames=8, seed=1)
        for policy in (Policy.MULTIMODAL, Policy.TEMPORAL):
            stats = encode_sequence(seq, policy=policy).stats
            d = seq.profile.dims
            later = [r for r in stats.log if r.frame >= 1]
            static_n += len(later)
            static_bad += sum(
                r.mode != Mode.TEMPORAL or any(r.residual) or sum(2 * abs(v) + 1 for v in r.residual) != d
                for r in later
            )
    traj_bad = traj_n = 0
    for profile in PROFILES:
        seq = synth_generate("constant_velocity", profile, n_objects=3, n_frames=8, seed=2)
        stream = encode_sequence(seq, policy=Policy.TRAJECTORY)
        central = seq.profile.central
        later = [r for r in stream.stats.log if r.frame >= 2 and r.point != central]
        traj_n += len(later)
        traj_bad += sum(r.mode != Mode.TRAJECTORY or any(r.residual) for r in later)
        multi = encode_sequence(seq).stats.log
        chosen = [r for r in multi if r.mode == Mode.TRAJECTORY]
        traj_n += len(chosen)
        traj_bad += sum(any(r.residual) for r in chosen)
    ok = static_bad == 0 and traj_bad == 0 and static_n and traj_n
    record(
        4,
        ok,
        f"static: {static_n - static_bad}/{static_n} temporal residuals zero at 1 bit per dimension; "
        f"constant velocity: {traj_n - traj_bad}/{traj_n} trajectory residuals zero",
    )
    assert ok


def test_criterion_5_beats_fixed_baseline():
    worst, total, bad = 0.0, 0, []
    for profile in PROFILES:
        for step in (1.0, 2.0, 4.0):
            for seed in range(20):
                seq = synth_generate("random_walk", profile, n_objects=3, n_frames=30, step_std=step, seed=seed)
                bpp = bits_per_point(encode_sequence(seq), seq)
                limit = 16 * seq.profile.dims
                worst = max(worst, bpp / limit)
                total += 1
                if not bpp < limit:
                    bad.append((profile, step, seed, bpp))
    ok = not bad
    record(5, ok, f"{total} random-walk sequences (step std 1,2,4), worst bits/point at {worst:.3f} of 16*D")
    assert ok, bad


def _average_bpp(profile, skips, sigmas):
    totals = {}
    for seed in range(10):
        seq = synth_generate("articulated", profile, n_objects=3, n_frames=60, seed=seed)
        for row in run_matrix([("s", seq)], skips, sigmas, seed=seed, verify=False):
            key = (row.skip, row.sigma)
            totals[key] = totals.get(key, 0.0) + row.bits_per_point / 10
    return totals


def test_criterion_6_trend():
    details, ok = [], True
    for profile in ("skeleton15", "face68", "bbox2d"):
        skip_avg = _average_bpp(profile, [0, 1, 2], [0.0])
        noise_avg = _average_bpp(profile, [0], [0.0, 2.0, 5.0])
        sk = [skip_avg[(s, 0.0)] for s in (0, 1, 2)]
        sg = [noise_avg[(0, s)] for s in (0.0, 2.0, 5.0)]
        mono = all(a <= b for a, b in zip(sk, sk[1:])) and all(a <= b for a, b in zip(sg, sg[1:]))
        ok &= mono
        details.append(
            f"{profile} skip " + "/".join(f"{v:.2f}" for v in sk) + " sigma " + "/".join(f"{v:.2f}" for v in sg)
        )
    record(6, ok, "bits/point non-decreasing over 10 seeds: " + "; ".join(details))
    assert ok


REFERENCE = {"KPSC_MOT17_KPJSON": ("MOT17", 14.73), "KPSC_POSETRACK_KPJSON": ("PoseTrack", 12.80)}


def test_criterion_7_dataset_soft_check():
    supplied = {k: v for k, v in REFERENCE.items() if os.environ.get(k)}
    if not supplied:
        record(7, "SKIP", "no dataset paths in KPSC_MOT17_KPJSON / KPSC_POSETRACK_KPJSON (non-blocking)")
        pytest.skip("dataset files not supplied")
    lines, inside = [], True
    for var, (name, ref) in supplied.items():
        bits = points = 0
        for path in os.environ[var].split(os.pathsep):
            seq = parse_kpjson(Path(path).read_text())
            bits += encode_sequence(seq).stats.total_bits
            points += seq.n_visible
        bpp = bits / points
        inside &= 0.5 * ref <= bpp <= 2 * ref
        lines.append(f"{name} {bpp:.2f} bits/point vs reference {ref}")
    record(7, inside, "; ".join(lines) + " (window 0.5x to 2x, non-blocking)")
    if not inside:
        pytest.xfail("outside the reference window; non-blocking")


def test_criterion_8_determinism_and_golden():
    seq = scramble(synth_generate("articulated", "face68", n_objects=2, n_frames=6, seed=8), seed=8)
    twice = encode_sequence(seq).to_bytes() == encode_sequence(seq).to_bytes()
    golden_ok = []
    for name in ("tiny", "skeleton_small"):
        data = (DATA / f"{name}.kpsc").read_bytes()
        expected = parse_kpjson((DATA / f"{name}.json").read_text())
        decoded = decode_stream(data).sequence
        golden_ok.append(
            decoded == expected
            and encode_sequence(decoded).to_bytes() == data
            and parse_kpjson(write_kpjson(decoded)) == expected
        )
    ok = twice and all(golden_ok)
    record(8, ok, f"repeat encode identical {twice}; golden streams tiny {golden_ok[0]}, skeleton_small {golden_ok[1]}")
    assert ok
