"""The four prediction modes and their exact inverses.

All arithmetic is on integer tuples. A context describes one object in
frame t together with its reconstructed positions in frames t-1 and t-2;
``cur`` may be partially filled while decoding (undecoded points are
``None``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ModeUnavailableError
from .model import IncidenceProfile, Point

Coords = Sequence[Optional[Point]]


class Mode(enum.IntEnum):
    INDEPENDENT = 0
    TEMPORAL = 1
    SPATIAL_TEMPORAL = 2
    TRAJECTORY = 3


REFERENCE_MODES = (Mode.TEMPORAL, Mode.SPATIAL_TEMPORAL, Mode.TRAJECTORY)


def _sub(a: Point, b: Point) -> Point:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return tuple(x - y for x, y in zip(a, b))


def _add(a: Point, b: Point) -> Point:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def frame_central(profile: IncidenceProfile, vis_t, vis_prev) -> Optional[int]:
    """Central point used for motion compensation of one object-frame.

    The profile's central point when visible in both frames, otherwise the
    visible-in-both point of largest out-degree (lowest index on ties).
    ``None`` when the object is absent from t-1 or no point qualifies.
    """
    if vis_prev is None:
        return None
    c = profile.central
    if vis_t[c] and vis_prev[c]:
        return c
    deg = profile.out_degree
    best = None
    for i in range(profile.n_points):
        if vis_t[i] and vis_prev[i] and (best is None or deg[i] > deg[best]):
            best = i
    return best


@dataclass(frozen=True)
class PredictionContext:
    profile: IncidenceProfile
    cur: Coords
    prev1: Optional[Coords] = None
    prev2: Optional[Coords] = None
    central: Optional[int] = None
    mv: Optional[Point] = None
    # context of the same object one frame earlier, for mode voting
    history: Optional["PredictionContext"] = None

    @classmethod
    def build(cls, profile, cur, prev1=None, prev2=None, history=None):
        """Context with the frame central and its motion vector filled in.

        Visibility is inferred from which coordinates are present, so ``cur``
        must be complete.
        """
        vis_t = [p is not None for p in cur]
        vis_p = None if prev1 is None else [p is not None for p in prev1]
        c = frame_central(profile, vis_t, vis_p)
        mv = None if c is None else _sub(cur[c], prev1[c])
        return cls(profile, cur, prev1, prev2, c, mv, history)

    @classmethod
    def chain(cls, profile, frames):
        """Contexts for every entry of ``frames`` (oldest first), linked by history.

        Each entry is an object's coordinate tuple or ``None`` when the object
        is absent from that frame. Returns the context of the last frame.
        """
        ctx = None
        for k, cur in enumerate(frames):
            if cur is None:
                ctx = None
                continue
            prev1 = frames[k - 1] if k >= 1 else None
            prev2 = frames[k - 2] if k >= 2 and prev1 is not None else None
            ctx = cls.build(profile, cur, prev1, prev2, ctx)
        return ctx

    def parent(self, i: int) -> Optional[int]:
        return self.profile.parents[i]

    def visible_prev1(self, i: int) -> bool:
        return self.prev1 is not None and self.prev1[i] is not None

    def visible_prev2(self, i: int) -> bool:
        return self.prev2 is not None and self.prev2[i] is not None


def independent_reference(ctx: PredictionContext, i: int) -> Optional[int]:
    """Nearest ancestor of ``i`` along the BFS tree that is already decoded."""
    a = ctx.parent(i)
    while a is not None:
        if ctx.cur[a] is not None:
            return a
        a = ctx.parent(a)
    return None


def independent_residual(k_i: Point, k_ref: Optional[Point]) -> Point:
    if k_ref is None:
        return tuple(k_i)
    return _sub(k_i, k_ref)


def temporal_predict(ctx: PredictionContext, i: int) -> Point:
    if ctx.mv is None or not ctx.visible_prev1(i):
        raise ModeUnavailableError(f"temporal prediction unavailable for point {i}")
    return _add(ctx.prev1[i], ctx.mv)


def temporal_residual(k_i_t: Point, prediction: Point) -> Point:
    return _sub(k_i_t, prediction)


def _spatial_parent(ctx: PredictionContext, i: int) -> int:
    p = ctx.parent(i)
    if p is None or ctx.cur[p] is None or not ctx.visible_prev1(p):
        raise ModeUnavailableError(f"spatial-temporal prediction unavailable for point {i}")
    return p


def spatial_temporal_predict(ctx: PredictionContext, i: int) -> Point:
    """Temporal prediction corrected by the parent's temporal residual."""
    p = _spatial_parent(ctx, i)
    pred_i = temporal_predict(ctx, i)
    ref_residual = _sub(ctx.cur[p], temporal_predict(ctx, p))
    return _add(pred_i, ref_residual)


def spatial_temporal_residual(ctx: PredictionContext, i: int) -> Point:
    return _sub(ctx.cur[i], spatial_temporal_predict(ctx, i))


def trajectory_predict(ctx: PredictionContext, i: int) -> Point:
    if not (ctx.visible_prev1(i) and ctx.visible_prev2(i)):
        raise ModeUnavailableError(f"trajectory prediction unavailable for point {i}")
    k1, k2 = ctx.prev1[i], ctx.prev2[i]
    return _add(k1, _sub(k1, k2))


def trajectory_residual(ctx: PredictionContext, i: int) -> Point:
    return _sub(ctx.cur[i], trajectory_predict(ctx, i))


def is_available(mode: Mode, ctx: PredictionContext, i: int) -> bool:
    if mode == Mode.INDEPENDENT:
        return True
    if not ctx.visible_prev1(i):
        return False
    if mode == Mode.TEMPORAL:
        return ctx.mv is not None
    if mode == Mode.SPATIAL_TEMPORAL:
        p = ctx.parent(i)
        return ctx.mv is not None and p is not None and ctx.cur[p] is not None and ctx.visible_prev1(p)
    return ctx.visible_prev2(i)


def predict(mode: Mode, ctx: PredictionContext, i: int) -> Point:
    """Prediction of point ``i`` under ``mode`` (zero vector for absolute coding)."""
    if mode == Mode.INDEPENDENT:
        ref = independent_reference(ctx, i)
        if ref is None:
            return (0,) * ctx.profile.dims
        return ctx.cur[ref]
    if mode == Mode.TEMPORAL:
        return temporal_predict(ctx, i)
    if mode == Mode.SPATIAL_TEMPORAL:
        return spatial_temporal_predict(ctx, i)
    return trajectory_predict(ctx, i)


def residual(mode: Mode, ctx: PredictionContext, i: int) -> Point:
    return _sub(ctx.cur[i], predict(mode, ctx, i))


def reconstruct(mode: Mode, res: Point, ctx: PredictionContext, i: int) -> Point:
    """Invert :func:`residual`; ``ctx.cur[i]`` is not read."""
    return _add(predict(mode, ctx, i), tuple(res))
