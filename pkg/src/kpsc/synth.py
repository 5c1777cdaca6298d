"""Synthetic key-point sequences and reproducible perturbations.

Gaussian noise is drawn from numpy's PCG64 bit generator (raw 64-bit
outputs, top 53 bits as uniforms) through the Box-Muller transform, so a
seed yields the same noise on every platform and numpy release.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .model import Frame, IncidenceProfile, KeypointSequence, ObjectInstance
from .profiles import get_profile

KINDS = ("static", "constant_velocity", "random_walk", "articulated")


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _resolve(profile) -> IncidenceProfile:
    return get_profile(profile) if isinstance(profile, str) else profile


def _limb_length(profile: IncidenceProfile) -> int:
    if profile.n_points <= 2:
        return 60
    if profile.n_points > 30:
        return 8
    return 25


def _base_shape(profile: IncidenceProfile, rng) -> np.ndarray:
    """Offsets of each point relative to the central point."""
    d = profile.dims
    limb = _limb_length(profile)
    shape = np.zeros((profile.n_points, d), dtype=np.int64)
    for node, parent in profile.order:
        if parent is None:
            if node != profile.central:
                shape[node] = rng.integers(-3 * limb, 3 * limb + 1, size=d)
            continue
        step = rng.integers(-limb, limb + 1, size=d)
        if profile.n_points == 2:
            step = np.abs(step) + limb // 3
        shape[node] = shape[parent] + step
    return shape


def synth_generate(
    kind: str,
    profile="skeleton15",
    *,
    n_objects: int = 3,
    n_frames: int = 50,
    step_std: float = 2.0,
    velocity=(4, 2),
    velocity_spread: int = 1,
    jitter: float = 0.7,
    seed: int = 0,
) -> KeypointSequence:
    """Deterministic synthetic sequence, all points visible.

    ``static``: every frame equal. ``constant_velocity``: each point moves by
    ``velocity`` plus a fixed per-point offset in [-spread, spread].
    ``random_walk``: every point takes an independent Gaussian step of
    ``step_std`` per frame. ``articulated``: a rigid body translation with
    slowly varying velocity, limb offsets that drift by ``step_std`` per
    frame, and per-frame ``jitter``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown synthetic kind {kind!r}; expected one of {KINDS}")
    if n_objects < 0 or n_frames < 0 or step_std < 0 or jitter < 0 or velocity_spread < 0:
        raise ValueError("object/frame counts, step_std, jitter and spread must be non-negative")
    profile = _resolve(profile)
    n, d = profile.n_points, profile.dims
    rng = _rng(seed)
    vel = np.zeros(d, dtype=np.int64)
    v_in = np.asarray(velocity, dtype=np.int64).ravel()
    vel[: min(d, len(v_in))] = v_in[:d]

    tracks = []
    for _ in range(n_objects):
        anchor = rng.integers(300, 1500, size=d)
        shape = _base_shape(profile, rng)
        pos = np.empty((n_frames, n, d), dtype=np.int64)
        if kind == "static":
            pos[:] = anchor + shape
        elif kind == "constant_velocity":
            v = vel + rng.integers(-velocity_spread, velocity_spread + 1, size=(n, d))
            t = np.arange(n_frames)[:, None, None]
            pos[:] = anchor + shape + t * v
        elif kind == "random_walk":
            steps = np.rint(rng.normal(0.0, step_std, size=(n_frames, n, d))).astype(np.int64)
            steps[0] = 0
            pos[:] = anchor + shape + np.cumsum(steps, axis=0)
        else:
            accel = rng.normal(0.0, 0.5, size=(n_frames, d))
            body_v = rng.normal(0.0, 3.0, size=d) + np.cumsum(accel, axis=0)
            body = np.cumsum(body_v, axis=0)
            twist = np.cumsum(rng.normal(0.0, step_std, size=(n_frames, n, d)), axis=0)
            noise = rng.normal(0.0, jitter, size=(n_frames, n, d))
            pos[:] = np.rint(anchor + shape + body[:, None, :] + twist + noise).astype(np.int64)
        tracks.append(pos)

    frames = []
    for t in range(n_frames):
        objs = tuple(
            ObjectInstance(tid, (1,) * n, tuple(tuple(int(c) for c in p) for p in tracks[tid][t]))
            for tid in range(n_objects)
        )
        frames.append(Frame(t, objs))
    return KeypointSequence(profile, tuple(frames))


def scramble(
    seq: KeypointSequence,
    seed: int,
    *,
    p_occlude: float = 0.1,
    p_absent: float = 0.15,
    max_id_gap: int = 5,
    max_frame_gap: int = 2,
) -> KeypointSequence:
    """Random occlusions, object births/deaths, id gaps and frame-index gaps."""
    rng = _rng(seed)
    ids = {}
    next_id = int(rng.integers(0, max_id_gap + 1))
    all_ids = sorted({o.track_id for f in seq.frames for o in f.objects})
    for tid in all_ids:
        ids[tid] = next_id
        next_id += 1 + int(rng.integers(0, max_id_gap + 1))
    frames = []
    index = int(rng.integers(0, 3))
    for f in seq.frames:
        objs = []
        for o in f.objects:
            if rng.random() < p_absent:
                continue
            vis = tuple(0 if rng.random() < p_occlude else 1 for _ in o.visibility)
            pts = tuple(p if v and o.visibility[k] else None for k, (p, v) in enumerate(zip(o.points, vis)))
            vis = tuple(int(p is not None) for p in pts)
            objs.append(ObjectInstance(ids[o.track_id], vis, pts))
        objs.sort(key=lambda o: o.track_id)
        frames.append(Frame(index, tuple(objs)))
        index += 1 + int(rng.integers(0, max_frame_gap + 1)) if max_frame_gap else 1
    return replace(seq, frames=tuple(frames))


def frame_skip(seq: KeypointSequence, skip: int) -> KeypointSequence:
    """Keep every ``skip + 1``-th frame starting from the first; reindex 0, 1, ..."""
    if skip < 0:
        raise ValueError("skip must be non-negative")
    kept = seq.frames[:: skip + 1]
    return replace(seq, frames=tuple(Frame(k, f.objects) for k, f in enumerate(kept)))


def gaussian_samples(count: int, seed: int) -> np.ndarray:
    """``count`` standard normal draws: PCG64 raw output, Box-Muller pairs."""
    if count <= 0:
        return np.zeros(0)
    pairs = (count + 1) // 2
    raw = np.random.PCG64(seed).random_raw(2 * pairs)
    u = (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
    u1, u2 = u[0::2], u[1::2]
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:count]


def _round_half_away(x: np.ndarray) -> np.ndarray:
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


def add_gaussian_noise(seq: KeypointSequence, sigma: float, seed: int) -> KeypointSequence:
    """Add rounded N(0, sigma^2) noise to every visible coordinate.

    Samples are consumed in frame, object, point, dimension order.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return seq
    d = seq.profile.dims
    count = seq.n_visible * d
    deltas = _round_half_away(sigma * gaussian_samples(count, seed))
    k = 0
    frames = []
    for f in seq.frames:
        objs = []
        for o in f.objects:
            pts = []
            for p in o.points:
                if p is None:
                    pts.append(None)
                else:
                    pts.append(tuple(int(c + deltas[k + j]) for j, c in enumerate(p)))
                    k += d
            objs.append(ObjectInstance(o.track_id, o.visibility, tuple(pts)))
        frames.append(Frame(f.index, tuple(objs)))
    return replace(seq, frames=tuple(frames))


def noise_deltas(sigma: float, count: int, seed: int) -> np.ndarray:
    """The integer offsets :func:`add_gaussian_noise` would apply to ``count`` coordinates."""
    return _round_half_away(sigma * gaussian_samples(count, seed))
