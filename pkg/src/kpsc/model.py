"""Domain types for key-point sequences and their incidence profiles."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

from .errors import ProfileError, SequenceError

Point = tuple[int, ...]

INT32_MIN = -(1 << 31)
INT32_MAX = (1 << 31) - 1


@dataclass(frozen=True)
class IncidenceProfile:
    """Directed reference graph over the N key points of one object.

    An edge ``(a, b)`` means point ``a`` may serve as the reference of ``b``.
    """

    name: str
    n_points: int
    dims: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))

    @cached_property
    def out_degree(self) -> tuple[int, ...]:
        deg = [0] * self.n_points
        for a, _ in self.edges:
            deg[a] += 1
        return tuple(deg)

    @cached_property
    def central(self) -> int:
        return central_point(self)

    @cached_property
    def order(self) -> tuple[tuple[int, Optional[int]], ...]:
        return tuple(traversal_order(self))

    @cached_property
    def parents(self) -> tuple[Optional[int], ...]:
        par: list[Optional[int]] = [None] * self.n_points
        for node, ref in self.order:
            par[node] = ref
        return tuple(par)

    @cached_property
    def visit(self) -> tuple[int, ...]:
        return tuple(node for node, _ in self.order)


def validate_profile(profile: IncidenceProfile) -> list[str]:
    """Return every invariant violation of ``profile`` (empty when valid)."""
    problems = []
    if not isinstance(profile.name, str) or not profile.name:
        problems.append("empty name")
    if profile.n_points < 1:
        problems.append(f"point count must be positive, got {profile.n_points}")
    if profile.dims < 1:
        problems.append(f"dimension count must be positive, got {profile.dims}")
    seen = set()
    for a, b in profile.edges:
        if a == b:
            problems.append(f"self-loop at {a}")
        if not (0 <= a < profile.n_points) or not (0 <= b < profile.n_points):
            problems.append(f"index out of range in edge ({a}, {b})")
        if (a, b) in seen:
            problems.append(f"duplicate edge ({a}, {b})")
        seen.add((a, b))
    return problems


def check_profile(profile: IncidenceProfile) -> IncidenceProfile:
    problems = validate_profile(profile)
    if problems:
        raise ProfileError(f"invalid profile {profile.name!r}: " + "; ".join(problems))
    return profile


def central_point(profile: IncidenceProfile) -> int:
    """Index of the point with the largest out-degree, lowest index on ties."""
    deg = profile.out_degree
    best = 0
    for i in range(1, len(deg)):
        if deg[i] > deg[best]:
            best = i
    return best


def traversal_order(profile: IncidenceProfile) -> list[tuple[int, Optional[int]]]:
    """Breadth-first visit from the central point.

    Out-neighbours are visited in ascending index order and each vertex
    records its BFS parent. Unreachable vertices are appended in ascending
    order without a parent.
    """
    n = profile.n_points
    children: list[list[int]] = [[] for _ in range(n)]
    for a, b in profile.edges:
        children[a].append(b)
    for c in children:
        c.sort()

    start = central_point(profile)
    seen = [False] * n
    seen[start] = True
    out: list[tuple[int, Optional[int]]] = [(start, None)]
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in children[node]:
            if not seen[nxt]:
                seen[nxt] = True
                out.append((nxt, node))
                queue.append(nxt)
    out.extend((i, None) for i in range(n) if not seen[i])
    return out


@dataclass(frozen=True)
class ObjectInstance:
    """One tracked object in one frame.

    ``points`` has one entry per key point; invisible points hold ``None``.
    """

    track_id: int
    visibility: tuple[int, ...]
    points: tuple[Optional[Point], ...]

    def __post_init__(self):
        object.__setattr__(self, "visibility", tuple(int(v) for v in self.visibility))
        object.__setattr__(
            self,
            "points",
            tuple(None if p is None else tuple(int(c) for c in p) for p in self.points),
        )

    @classmethod
    def from_visible(cls, track_id: int, visibility: Iterable[int], visible_points: Iterable[Point]):
        """Build from the compact form: coordinates of visible points only."""
        vis = tuple(int(v) for v in visibility)
        it = iter(visible_points)
        pts = []
        for v in vis:
            pts.append(tuple(next(it)) if v else None)
        leftover = list(it)
        if leftover:
            raise SequenceError(f"object {track_id}: more coordinates than visible points")
        return cls(track_id, vis, tuple(pts))

    @property
    def visible_points(self) -> list[Point]:
        return [p for p in self.points if p is not None]

    @property
    def n_visible(self) -> int:
        return sum(self.visibility)


@dataclass(frozen=True)
class Frame:
    index: int
    objects: tuple[ObjectInstance, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))


@dataclass(frozen=True)
class KeypointSequence:
    """Ordered frames of object instances conforming to one profile.

    ``scale`` is the (numerator, denominator) quantization scale the integer
    coordinates were produced with; it is informational only.
    """

    profile: IncidenceProfile
    frames: tuple[Frame, ...] = ()
    scale: tuple[int, int] = (1, 1)

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        object.__setattr__(self, "scale", (int(self.scale[0]), int(self.scale[1])))

    @property
    def n_visible(self) -> int:
        return sum(o.n_visible for f in self.frames for o in f.objects)

    def validate(self) -> "KeypointSequence":
        """Raise :class:`SequenceError` on the first violated invariant."""
        check_profile(self.profile)
        n, d = self.profile.n_points, self.profile.dims
        if self.scale[0] <= 0 or self.scale[1] <= 0:
            raise SequenceError(f"scale must be positive, got {self.scale}")
        prev_index = None
        for f in self.frames:
            if f.index < 0:
                raise SequenceError(f"negative frame index {f.index}")
            if prev_index is not None and f.index <= prev_index:
                raise SequenceError(f"frame indices not strictly increasing at {f.index}")
            prev_index = f.index
            prev_id = None
            for obj in f.objects:
                where = f"frame {f.index}, object {obj.track_id}"
                if obj.track_id < 0:
                    raise SequenceError(f"{where}: negative track id")
                if prev_id is not None and obj.track_id <= prev_id:
                    raise SequenceError(f"{where}: track ids not strictly increasing")
                prev_id = obj.track_id
                if len(obj.visibility) != n or len(obj.points) != n:
                    raise SequenceError(f"{where}: expected {n} points")
                for k, (v, p) in enumerate(zip(obj.visibility, obj.points)):
                    if v not in (0, 1):
                        raise SequenceError(f"{where}: visibility flag {k} is {v}")
                    if (p is None) == bool(v):
                        raise SequenceError(f"{where}: coordinate presence disagrees with visibility at point {k}")
                    if p is not None:
                        if len(p) != d:
                            raise SequenceError(f"{where}: point {k} has {len(p)} dims, expected {d}")
                        if any(c < INT32_MIN or c > INT32_MAX for c in p):
                            raise SequenceError(f"{where}: point {k} exceeds the signed 32-bit range")
        return self
