"""Decoder-replicable mode selection by weighted voting.

The mode of a point is the one that would have coded its already-decoded
references most cheaply: the same point one and two frames back, and its
BFS parent in the current frame. No mode flag is transmitted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .bitio import bit_length_se
from .predict import REFERENCE_MODES, Mode, PredictionContext, is_available, residual


@dataclass(frozen=True)
class ModeWeights:
    prev1: int = 2
    prev2: int = 1
    spatial: int = 2

    def __post_init__(self):
        for name in ("prev1", "prev2", "spatial"):
            w = getattr(self, name)
            if not isinstance(w, int) or not 0 < w < 256:
                raise ValueError(f"weight {name}={w!r} must be an integer in [1, 255]")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.prev1, self.prev2, self.spatial)

    def scaled(self, k: int) -> "ModeWeights":
        return ModeWeights(self.prev1 * k, self.prev2 * k, self.spatial * k)


DEFAULT_WEIGHTS = ModeWeights()

# (T, ST, Traj) bit counts of one reference; None or negative = unavailable
BitRow = Sequence[Optional[int]]


def candidate_modes(ctx: PredictionContext, i: int) -> frozenset:
    if ctx.prev1 is None or ctx.mv is None or not ctx.visible_prev1(i):
        return frozenset({Mode.INDEPENDENT})
    return frozenset(m for m in REFERENCE_MODES if is_available(m, ctx, i))


def reference_bitlength(ctx: Optional[PredictionContext], n: int, mode: Mode) -> Optional[int]:
    """Bits point ``n`` would cost under ``mode`` in its own frame context."""
    if ctx is None or ctx.cur[n] is None or not is_available(mode, ctx, n):
        return None
    return sum(bit_length_se(v) for v in residual(mode, ctx, n))


def reference_bits(ctx: Optional[PredictionContext], n: int) -> tuple:
    return tuple(reference_bitlength(ctx, n, m) for m in REFERENCE_MODES)


def vote(candidates: Iterable[Mode], refs: Iterable[tuple[int, BitRow]]) -> Mode:
    """Weighted-average bit cost argmin over ``candidates``.

    ``refs`` holds ``(weight, bits)`` pairs. Each mode is averaged over the
    references where it is available; a mode with no such reference loses
    to any scored mode. Ties, and the all-unscored case, go to the earliest
    of temporal, spatial-temporal, trajectory.
    """
    candidates = set(candidates)
    if not candidates & set(REFERENCE_MODES):
        return Mode.INDEPENDENT
    refs = list(refs)
    best = None
    best_num = best_den = 0
    for m in REFERENCE_MODES:
        if m not in candidates:
            continue
        num = den = 0
        for w, bits in refs:
            b = bits[m - 1]
            if b is not None and b >= 0:
                num += w * b
                den += w
        if den == 0:
            continue
        # exact rational comparison num/den < best_num/best_den
        if best is None or num * best_den < best_num * den:
            best, best_num, best_den = m, num, den
    if best is None:
        return next(m for m in REFERENCE_MODES if m in candidates)
    return best


def select_mode(ctx: PredictionContext, i: int, weights: ModeWeights = DEFAULT_WEIGHTS) -> Mode:
    """Mode for point ``i`` of the object described by ``ctx``.

    Uses only reconstructed data: the contexts chained through
    ``ctx.history`` and the already-decoded BFS parent in ``ctx.cur``.
    """
    cands = candidate_modes(ctx, i)
    if cands == {Mode.INDEPENDENT}:
        return Mode.INDEPENDENT
    refs = []
    h1 = ctx.history
    if h1 is not None and h1.cur[i] is not None:
        refs.append((weights.prev1, reference_bits(h1, i)))
        h2 = h1.history
        if h2 is not None and h2.cur[i] is not None:
            refs.append((weights.prev2, reference_bits(h2, i)))
    p = ctx.parent(i)
    if p is not None and ctx.cur[p] is not None:
        refs.append((weights.spatial, reference_bits(ctx, p)))
    return vote(cands, refs)
