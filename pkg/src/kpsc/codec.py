"""Stream encoder/decoder and the ``.kpsc`` container.

Container layout (big-endian, byte aligned up to the payload)::

    "KPSC" | version u8 | profile kind u8
           | builtin id u8
             or name_len u8, name, N u16, D u8, n_edges u16, edges (u16, u16)*
           | weights 3 x u8 | scale num u32, den u32 | frame count u32
           | payload

Payload (bit continuous, zero padded at the end)::

    frame indices: ue(first) then flag(1) if every step is +1,
                   else flag(0) and ue(step - 1) per later frame
    per frame:     ue(object count), ue(first id), ue(id delta - 1)...
                   per object: visibility, then coordinate residuals (se)
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .bitio import BitReader, BitWriter
from .errors import (
    BadMagicError,
    BitstreamError,
    ProfileError,
    SequenceError,
    TruncatedStreamError,
    UnsupportedVersionError,
)
from .model import Frame, IncidenceProfile, KeypointSequence, ObjectInstance, check_profile
from .modesel import DEFAULT_WEIGHTS, ModeWeights, candidate_modes, reference_bits, vote
from .predict import Mode, PredictionContext, frame_central, predict, residual
from .profiles import BUILTIN_BY_ID, builtin_id

MAGIC = b"KPSC"
VERSION = 1


class Policy(str, enum.Enum):
    """How prediction modes are chosen.

    ``MULTIMODAL`` is the adaptive vote and the only policy written by the
    CLI. The forced policies reproduce single-mode experiments; they fall
    back to independent coding wherever the forced mode is unavailable and
    must be passed to the decoder explicitly.
    """

    MULTIMODAL = "multimodal"
    INDEPENDENT = "independent"
    TEMPORAL = "temporal"
    SPATIAL_TEMPORAL = "spatial_temporal"
    TRAJECTORY = "trajectory"


_FORCED = {
    Policy.TEMPORAL: Mode.TEMPORAL,
    Policy.SPATIAL_TEMPORAL: Mode.SPATIAL_TEMPORAL,
    Policy.TRAJECTORY: Mode.TRAJECTORY,
}


# ------------------------------------------------------------------ header

@dataclass(frozen=True)
class StreamHeader:
    profile: IncidenceProfile
    weights: ModeWeights = DEFAULT_WEIGHTS
    frame_count: int = 0
    scale: tuple[int, int] = (1, 1)
    version: int = VERSION

    def to_bytes(self) -> bytes:
        out = bytearray(MAGIC)
        out += struct.pack(">B", self.version)
        bid = builtin_id(self.profile)
        if bid is not None:
            out += struct.pack(">BB", 0, bid)
        else:
            p = self.profile
            name = p.name.encode("utf-8")
            if len(name) > 255 or p.n_points > 0xFFFF or p.dims > 255 or len(p.edges) > 0xFFFF:
                raise ProfileError(f"profile {p.name!r} too large for the container")
            out += struct.pack(">BB", 1, len(name)) + name
            out += struct.pack(">HBH", p.n_points, p.dims, len(p.edges))
            for a, b in p.edges:
                out += struct.pack(">HH", a, b)
        out += struct.pack(">BBB", *self.weights.as_tuple())
        out += struct.pack(">III", self.scale[0], self.scale[1], self.frame_count)
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> tuple["StreamHeader", int]:
        """Parse a header; returns it with the payload's byte offset."""
        pos = 0

        def take(n):
            nonlocal pos
            if pos + n > len(data):
                raise TruncatedStreamError("truncated header")
            chunk = data[pos:pos + n]
            pos += n
            return chunk

        if take(4) != MAGIC:
            raise BadMagicError("bad magic: not a KPSC stream")
        (version,) = struct.unpack(">B", take(1))
        if version != VERSION:
            raise UnsupportedVersionError(f"unsupported version {version}")
        (kind,) = struct.unpack(">B", take(1))
        if kind == 0:
            (bid,) = struct.unpack(">B", take(1))
            try:
                profile = BUILTIN_BY_ID[bid]
            except KeyError:
                raise ProfileError(f"unknown builtin profile id {bid}") from None
        elif kind == 1:
            (name_len,) = struct.unpack(">B", take(1))
            name = take(name_len).decode("utf-8", errors="replace")
            n, d, n_edges = struct.unpack(">HBH", take(5))
            edges = tuple(struct.unpack(">HH", take(4)) for _ in range(n_edges))
            profile = check_profile(IncidenceProfile(name, n, d, edges))
        else:
            raise BitstreamError(f"unknown profile kind {kind}")
        try:
            weights = ModeWeights(*struct.unpack(">BBB", take(3)))
        except ValueError as exc:
            raise BitstreamError(str(exc)) from None
        num, den, frames = struct.unpack(">III", take(12))
        return cls(profile, weights, frames, (num, den), version), pos


# ------------------------------------------------------------------ stats

class PointRecord(NamedTuple):
    frame: int
    track_id: int
    point: int
    mode: Mode
    residual: tuple


@dataclass
class StreamStats:
    """Bit accounting for inspection; never needed to decode."""

    coord_bits: int = 0
    aux_bits: int = 0
    index_bits: int = 0
    mode_counts: list = field(default_factory=lambda: [0, 0, 0, 0])
    frame_bits: list = field(default_factory=list)
    padding_bits: int = 0
    log: list = field(default_factory=list)

    @property
    def total_bits(self) -> int:
        return self.coord_bits + self.aux_bits

    @property
    def points(self) -> int:
        return sum(self.mode_counts)

    def modes(self) -> list[tuple]:
        return [(r.frame, r.track_id, r.point, int(r.mode)) for r in self.log]


@dataclass(frozen=True)
class EncodedStream:
    header: StreamHeader
    payload: bytes
    stats: StreamStats

    def to_bytes(self) -> bytes:
        return self.header.to_bytes() + self.payload


class DecodeResult(NamedTuple):
    sequence: KeypointSequence
    header: StreamHeader
    stats: StreamStats


# ------------------------------------------------------------------ shared

@dataclass
class _ObjState:
    """Reconstructed object in one frame plus its reference bit table."""

    coords: tuple
    arr: np.ndarray
    vis: np.ndarray
    bits: Optional[np.ndarray] = None


class _Tracker:
    """Per-object reconstruction history shared by encoder and decoder."""

    def __init__(self, profile: IncidenceProfile, policy: Policy, weights: ModeWeights):
        self.profile = profile
        self.policy = policy
        self.weights = weights
        self.prev1: dict[int, _ObjState] = {}
        self.prev2: dict[int, _ObjState] = {}
        self.parents = np.array([-1 if p is None else p for p in profile.parents], dtype=np.int64)
        self._zeros = np.zeros((profile.n_points, profile.dims), dtype=np.int64)
        self._novis = np.zeros(profile.n_points, dtype=bool)

    def contexts(self, tid: int):
        s1 = self.prev1.get(tid)
        s2 = self.prev2.get(tid) if s1 is not None else None
        return s1, s2

    def refs(self, ctx: PredictionContext, i: int, s1, s2):
        w = self.weights
        out = []
        if s1 is not None and s1.vis[i]:
            out.append((w.prev1, s1.bits[:, i]))
            if s2 is not None and s2.vis[i]:
                out.append((w.prev2, s2.bits[:, i]))
        p = ctx.parent(i)
        if p is not None and ctx.cur[p] is not None:
            out.append((w.spatial, reference_bits(ctx, p)))
        return out

    def choose(self, ctx: PredictionContext, i: int, s1, s2) -> Mode:
        cands = candidate_modes(ctx, i)
        if self.policy == Policy.MULTIMODAL:
            return vote(cands, self.refs(ctx, i, s1, s2))
        forced = _FORCED[self.policy]
        return forced if forced in cands else Mode.INDEPENDENT

    def finish(self, tid: int, coords, s1, s2, central) -> _ObjState:
        arr = np.array([(0,) * self.profile.dims if p is None else p for p in coords], dtype=np.int64)
        vis = np.array([p is not None for p in coords], dtype=bool)
        state = _ObjState(coords, arr, vis)
        if self.policy != Policy.INDEPENDENT:
            state.bits = _kernels.bit_tables(
                arr,
                self._zeros if s1 is None else s1.arr,
                self._zeros if s2 is None else s2.arr,
                vis,
                self._novis if s1 is None else s1.vis,
                self._novis if s2 is None else s2.vis,
                self.parents,
                -1 if central is None else central,
            )
        return state

    def advance(self, states: dict[int, _ObjState]) -> None:
        self.prev2 = self.prev1
        self.prev1 = states


def _object_plan(profile, tracker, obj_vis, s1):
    """Frame central, or None when the object is coded independently."""
    if tracker.policy == Policy.INDEPENDENT or s1 is None:
        return None
    return frame_central(profile, obj_vis, s1.vis)


def _frame_index_bits(writer: BitWriter, indices) -> None:
    writer.write_ue(indices[0])
    steps = [b - a for a, b in zip(indices, indices[1:])]
    if all(s == 1 for s in steps):
        writer.write_bits(1, 1)
    else:
        writer.write_bits(0, 1)
        for s in steps:
            writer.write_ue(s - 1)


# ------------------------------------------------------------------ encoder

def encode_track_ids(writer: BitWriter, ids) -> None:
    prev = None
    for tid in ids:
        if tid < 0 or (prev is not None and tid <= prev):
            raise SequenceError(f"track ids must be strictly increasing and non-negative: {list(ids)}")
        writer.write_ue(tid if prev is None else tid - prev - 1)
        prev = tid


def decode_track_ids(reader: BitReader, count: int) -> list[int]:
    ids = []
    for _ in range(count):
        delta = reader.read_ue()
        ids.append(delta if not ids else ids[-1] + delta + 1)
    return ids


def encode_visibility(writer: BitWriter, flags, previous=None) -> None:
    flags = [int(f) for f in flags]
    if previous is None:
        writer.write_flags(flags)
        return
    previous = [int(f) for f in previous]
    if len(previous) != len(flags):
        raise SequenceError("visibility length mismatch")
    if flags == previous:
        writer.write_bits(0, 1)
    else:
        writer.write_bits(1, 1)
        writer.write_flags(a ^ b for a, b in zip(flags, previous))


def decode_visibility(reader: BitReader, n: int, previous=None) -> tuple[int, ...]:
    if previous is None:
        return reader.read_flags(n)
    if reader.read_bits(1) == 0:
        return tuple(int(f) for f in previous)
    mask = reader.read_flags(n)
    return tuple(int(a) ^ b for a, b in zip(previous, mask))


def _encode_object(writer, tracker, obj, pos, stats):
    profile = tracker.profile
    s1, s2 = tracker.contexts(obj.track_id)
    coords = obj.points
    central = _object_plan(profile, tracker, obj.visibility, s1)
    ctx = PredictionContext(
        profile,
        coords,
        None if s1 is None else s1.coords,
        None if s2 is None else s2.coords,
        central,
        None if central is None else tuple(a - b for a, b in zip(coords[central], s1.coords[central])),
    )

    def emit(i, mode, res):
        bits = 0
        for v in res:
            bits += writer.write_se(v)
        stats.coord_bits += bits
        stats.mode_counts[mode] += 1
        stats.log.append(PointRecord(pos, obj.track_id, i, mode, res))

    if central is None:
        for i in profile.visit:
            if coords[i] is not None:
                emit(i, Mode.INDEPENDENT, residual(Mode.INDEPENDENT, ctx, i))
    else:
        emit(central, Mode.TEMPORAL, ctx.mv)
        for i in profile.visit:
            if i == central or coords[i] is None:
                continue
            mode = tracker.choose(ctx, i, s1, s2)
            emit(i, mode, residual(mode, ctx, i))
    return tracker.finish(obj.track_id, coords, s1, s2, central)


def encode_frame(writer: BitWriter, frame: Frame, tracker: _Tracker, pos: int, stats: StreamStats) -> None:
    start = writer.bit_length
    aux0 = writer.bit_length
    objs = frame.objects
    writer.write_ue(len(objs))
    encode_track_ids(writer, [o.track_id for o in objs])
    stats.aux_bits += writer.bit_length - aux0
    states = {}
    for obj in objs:
        s1 = tracker.prev1.get(obj.track_id)
        aux0 = writer.bit_length
        encode_visibility(writer, obj.visibility, None if s1 is None else s1.vis)
        stats.aux_bits += writer.bit_length - aux0
        states[obj.track_id] = _encode_object(writer, tracker, obj, pos, stats)
    tracker.advance(states)
    stats.frame_bits.append(writer.bit_length - start)


def encode_sequence(
    seq: KeypointSequence,
    weights: ModeWeights = DEFAULT_WEIGHTS,
    policy: Policy = Policy.MULTIMODAL,
) -> EncodedStream:
    seq.validate()
    policy = Policy(policy)
    header = StreamHeader(seq.profile, weights, len(seq.frames), seq.scale)
    writer = BitWriter()
    stats = StreamStats()
    if seq.frames:
        _frame_index_bits(writer, [f.index for f in seq.frames])
        stats.index_bits = stats.aux_bits = writer.bit_length
    tracker = _Tracker(seq.profile, policy, weights)
    for pos, frame in enumerate(seq.frames):
        encode_frame(writer, frame, tracker, pos, stats)
    payload = writer.getvalue()
    stats.padding_bits = len(payload) * 8 - writer.bit_length
    return EncodedStream(header, payload, stats)


# ------------------------------------------------------------------ decoder

def _decode_object(reader, tracker, tid, vis, pos, stats):
    profile = tracker.profile
    dims = profile.dims
    s1, s2 = tracker.contexts(tid)
    central = _object_plan(profile, tracker, vis, s1)
    cur: list = [None] * profile.n_points
    ctx = PredictionContext(
        profile,
        cur,
        None if s1 is None else s1.coords,
        None if s2 is None else s2.coords,
        central,
        None,
    )

    def take(i, mode, pred):
        b0 = reader.bitpos
        res = tuple(int(v) for v in reader.read_se_array(dims))
        stats.coord_bits += reader.bitpos - b0
        stats.mode_counts[mode] += 1
        stats.log.append(PointRecord(pos, tid, i, mode, res))
        cur[i] = tuple(a + b for a, b in zip(pred, res))

    if central is None:
        for i in profile.visit:
            if vis[i]:
                take(i, Mode.INDEPENDENT, predict(Mode.INDEPENDENT, ctx, i))
    else:
        take(central, Mode.TEMPORAL, s1.coords[central])
        mv = tuple(a - b for a, b in zip(cur[central], s1.coords[central]))
        ctx = PredictionContext(profile, cur, ctx.prev1, ctx.prev2, central, mv)
        for i in profile.visit:
            if i == central or not vis[i]:
                continue
            mode = tracker.choose(ctx, i, s1, s2)
            take(i, mode, predict(mode, ctx, i))
    coords = tuple(cur)
    return ObjectInstance(tid, vis, coords), tracker.finish(tid, coords, s1, s2, central)


def decode_frame(reader: BitReader, index: int, tracker: _Tracker, pos: int, stats: StreamStats) -> Frame:
    reader.frame = index
    start = reader.bitpos
    n_obj = reader.read_ue()
    ids = decode_track_ids(reader, n_obj)
    stats.aux_bits += reader.bitpos - start
    n = tracker.profile.n_points
    objects = []
    states = {}
    for tid in ids:
        s1 = tracker.prev1.get(tid)
        b0 = reader.bitpos
        vis = decode_visibility(reader, n, None if s1 is None else tuple(int(v) for v in s1.vis))
        stats.aux_bits += reader.bitpos - b0
        obj, states[tid] = _decode_object(reader, tracker, tid, vis, pos, stats)
        objects.append(obj)
    tracker.advance(states)
    stats.frame_bits.append(reader.bitpos - start)
    return Frame(index, tuple(objects))


def decode_stream(data, policy: Policy = Policy.MULTIMODAL) -> DecodeResult:
    """Decode container bytes (or an :class:`EncodedStream`) with statistics."""
    if isinstance(data, EncodedStream):
        data = data.to_bytes()
    data = bytes(data)
    policy = Policy(policy)
    header, offset = StreamHeader.from_bytes(data)
    reader = BitReader(data[offset:])
    stats = StreamStats()
    frames = []
    if header.frame_count:
        indices = [reader.read_ue()]
        if reader.read_bits(1):
            indices += [indices[0] + k for k in range(1, header.frame_count)]
        else:
            for _ in range(header.frame_count - 1):
                indices.append(indices[-1] + reader.read_ue() + 1)
        stats.index_bits = stats.aux_bits = reader.bitpos
        tracker = _Tracker(header.profile, policy, header.weights)
        for pos, index in enumerate(indices):
            frames.append(decode_frame(reader, index, tracker, pos, stats))
    reader.frame = None
    if reader.remaining >= 8 or (reader.remaining and reader.read_bits(reader.remaining)):
        raise BitstreamError("trailing data after last frame")
    stats.padding_bits = len(data[offset:]) * 8 - stats.total_bits
    seq = KeypointSequence(header.profile, tuple(frames), header.scale)
    return DecodeResult(seq, header, stats)


def decode_sequence(data, policy: Policy = Policy.MULTIMODAL) -> KeypointSequence:
    return decode_stream(data, policy).sequence


def read_file(path) -> DecodeResult:
    with open(path, "rb") as fh:
        return decode_stream(fh.read())


def write_file(path, stream: EncodedStream) -> None:
    with open(path, "wb") as fh:
        fh.write(stream.to_bytes())
