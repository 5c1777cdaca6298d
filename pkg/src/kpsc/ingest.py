"""Readers and writers for external key-point data.

kpjson document::

    {"profile": "skeleton15" | {"name": ..., "N": ..., "D": ..., "edges": [[a, b], ...]},
     "scale": [num, den],
     "frames": [{"index": 0,
                 "objects": [{"track_id": 3,
                              "visibility": [1, 0, ...],
                              "points": [[x, y], ...]}]}]}

``points`` lists the coordinates of visible points only, in point order.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from numbers import Integral, Real

from .errors import ParseError, ProfileError
from .model import (
    INT32_MAX,
    INT32_MIN,
    Frame,
    IncidenceProfile,
    KeypointSequence,
    ObjectInstance,
    validate_profile,
)
from .profiles import BBOX2D, builtin_id, get_profile


@dataclass(frozen=True)
class QuantSpec:
    """Grid units per input unit, as a positive fraction."""

    num: int = 1
    den: int = 1

    def __post_init__(self):
        if self.num <= 0 or self.den <= 0:
            raise ValueError(f"scale must be positive, got {self.num}/{self.den}")

    @classmethod
    def parse(cls, text: str) -> "QuantSpec":
        num, _, den = str(text).partition("/")
        try:
            return cls(int(num), int(den) if den else 1)
        except ValueError:
            raise ValueError(f"bad scale {text!r}; expected N or N/D") from None

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.num, self.den)


def _exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        try:
            return Fraction(Decimal(value.strip()))
        except (InvalidOperation, ValueError):
            raise ValueError(f"not a number: {value!r}") from None
    if isinstance(value, Real):
        # shortest repr is the decimal the producer most likely wrote
        return Fraction(Decimal(repr(float(value))))
    raise TypeError(f"cannot quantize {type(value).__name__}")


def quantize(value, spec: QuantSpec = QuantSpec()) -> int:
    """Nearest integer of ``value * scale``, halves rounded away from zero."""
    x = _exact(value) * spec.ratio
    mag = abs(x)
    q = int(mag + Fraction(1, 2))  # floor for non-negative values
    q = q if x >= 0 else -q
    if q < INT32_MIN or q > INT32_MAX:
        raise OverflowError(f"{value} at scale {spec.num}/{spec.den} exceeds 32 bits")
    return q


# ------------------------------------------------------------------ MOT

def parse_mot(text: str, spec: QuantSpec = QuantSpec()) -> KeypointSequence:
    """MOTChallenge ``frame,id,x,y,w,h,...`` lines to a bbox2d sequence."""
    boxes: dict[int, dict[int, ObjectInstance]] = defaultdict(dict)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        where = f"line {lineno}"
        if len(fields) < 6:
            raise ParseError(f"expected at least 6 fields, got {len(fields)}", where)
        try:
            frame = int(Decimal(fields[0]))
            tid = int(Decimal(fields[1]))
            x, y, w, h = (_exact(f) for f in fields[2:6])
        except (ValueError, InvalidOperation):
            raise ParseError("non-numeric field", where) from None
        if frame < 0 or tid < 0:
            raise ParseError("negative frame or id", where)
        if w < 0 or h < 0:
            raise ParseError("negative width or height", where)
        if tid in boxes[frame]:
            raise ParseError(f"duplicate id {tid} in frame {frame}", where)
        try:
            corners = (
                (quantize(x, spec), quantize(y, spec)),
                (quantize(x + w, spec), quantize(y + h, spec)),
            )
        except OverflowError as exc:
            raise ParseError(str(exc), where) from None
        boxes[frame][tid] = ObjectInstance(tid, (1, 1), corners)
    frames = tuple(
        Frame(f, tuple(objs[t] for t in sorted(objs))) for f, objs in sorted(boxes.items())
    )
    return KeypointSequence(BBOX2D, frames, (spec.num, spec.den))


# ------------------------------------------------------------------ kpjson

def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _profile_from_doc(doc, where="$.profile") -> IncidenceProfile:
    if isinstance(doc, str):
        try:
            return get_profile(doc)
        except ProfileError as exc:
            raise ParseError(str(exc), where) from None
    if not isinstance(doc, dict):
        raise ParseError("profile must be a name or an inline graph", where)
    for key in ("name", "N", "D", "edges"):
        if key not in doc:
            raise ParseError(f"missing key {key!r}", where)
    if not isinstance(doc["name"], str) or not _is_int(doc["N"]) or not _is_int(doc["D"]):
        raise ParseError("name must be a string, N and D integers", where)
    edges = doc["edges"]
    if not isinstance(edges, list) or not all(
        isinstance(e, list) and len(e) == 2 and all(_is_int(v) for v in e) for e in edges
    ):
        raise ParseError("edges must be a list of [from, to] integer pairs", f"{where}.edges")
    profile = IncidenceProfile(doc["name"], doc["N"], doc["D"], tuple(tuple(e) for e in edges))
    problems = validate_profile(profile)
    if problems:
        raise ParseError("; ".join(problems), where)
    return profile


def parse_kpjson(document, profile: IncidenceProfile = None) -> KeypointSequence:
    """Parse a kpjson document (text or already-loaded dict).

    ``profile`` overrides the document's own profile entry.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}", "$") from None
    if not isinstance(document, dict):
        raise ParseError("top level must be an object", "$")
    if profile is None:
        if "profile" not in document:
            raise ParseError("missing key 'profile'", "$")
        profile = _profile_from_doc(document["profile"])
    n, d = profile.n_points, profile.dims

    scale = document.get("scale", [1, 1])
    if not (isinstance(scale, list) and len(scale) == 2 and all(_is_int(v) and v > 0 for v in scale)):
        raise ParseError("scale must be [num, den] with positive integers", "$.scale")

    frames_doc = document.get("frames", [])
    if not isinstance(frames_doc, list):
        raise ParseError("frames must be a list", "$.frames")
    frames = []
    last_index = None
    for fi, fdoc in enumerate(frames_doc):
        fw = f"$.frames[{fi}]"
        if not isinstance(fdoc, dict) or not _is_int(fdoc.get("index")) or fdoc["index"] < 0:
            raise ParseError("frame needs a non-negative integer 'index'", fw)
        if last_index is not None and fdoc["index"] <= last_index:
            raise ParseError("frame indices must be strictly increasing", f"{fw}.index")
        last_index = fdoc["index"]
        objs_doc = fdoc.get("objects", [])
        if not isinstance(objs_doc, list):
            raise ParseError("objects must be a list", f"{fw}.objects")
        objects = []
        for oi, odoc in enumerate(objs_doc):
            ow = f"{fw}.objects[{oi}]"
            objects.append(_object_from_doc(odoc, n, d, ow))
        objects.sort(key=lambda o: o.track_id)
        for a, b in zip(objects, objects[1:]):
            if a.track_id == b.track_id:
                raise ParseError(f"duplicate track_id {a.track_id}", f"{fw}.objects")
        frames.append(Frame(fdoc["index"], tuple(objects)))
    return KeypointSequence(profile, tuple(frames), tuple(scale))


def _object_from_doc(odoc, n, d, ow) -> ObjectInstance:
    if not isinstance(odoc, dict):
        raise ParseError("object must be a mapping", ow)
    tid = odoc.get("track_id")
    if not _is_int(tid) or tid < 0:
        raise ParseError("track_id must be a non-negative integer", f"{ow}.track_id")
    vis = odoc.get("visibility", [1] * n)
    if not isinstance(vis, list) or len(vis) != n or any(v not in (0, 1) or isinstance(v, bool) for v in vis):
        raise ParseError(f"visibility must be {n} flags of 0 or 1", f"{ow}.visibility")
    pts = odoc.get("points")
    if not isinstance(pts, list):
        raise ParseError("points must be a list", f"{ow}.points")
    n_vis = sum(vis)
    if len(pts) > n_vis:
        raise ParseError(
            f"{len(pts)} coordinates for {n_vis} visible points (coordinate present for an invisible point)",
            f"{ow}.points",
        )
    if len(pts) < n_vis:
        raise ParseError(f"missing coordinates: {len(pts)} given, {n_vis} visible", f"{ow}.points")
    for pi, p in enumerate(pts):
        if not (isinstance(p, list) and len(p) == d and all(_is_int(c) for c in p)):
            raise ParseError(f"expected {d} integers", f"{ow}.points[{pi}]")
        if any(c < INT32_MIN or c > INT32_MAX for c in p):
            raise ParseError("coordinate exceeds signed 32-bit range", f"{ow}.points[{pi}]")
    return ObjectInstance.from_visible(tid, vis, [tuple(p) for p in pts])


def _profile_to_doc(profile: IncidenceProfile):
    if builtin_id(profile) is not None:
        return profile.name
    return {
        "name": profile.name,
        "N": profile.n_points,
        "D": profile.dims,
        "edges": [list(e) for e in profile.edges],
    }


def to_kpjson(seq: KeypointSequence) -> dict:
    return {
        "profile": _profile_to_doc(seq.profile),
        "scale": list(seq.scale),
        "frames": [
            {
                "index": f.index,
                "objects": [
                    {
                        "track_id": o.track_id,
                        "visibility": list(o.visibility),
                        "points": [list(p) for p in o.visible_points],
                    }
                    for o in f.objects
                ],
            }
            for f in seq.frames
        ],
    }


def write_kpjson(seq: KeypointSequence, indent=None) -> str:
    return json.dumps(to_kpjson(seq), indent=indent, separators=None if indent else (",", ":"))

