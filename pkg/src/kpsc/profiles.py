"""Built-in incidence profiles and the plain-text profile file format.

Profile file grammar::

    # comment
    name N D
    from to
    from to
    ...
"""

from __future__ import annotations

from pathlib import Path

from .errors import ParseError, UnknownProfileError
from .model import IncidenceProfile, check_profile

BBOX2D = IncidenceProfile("bbox2d", 2, 2, ((0, 1),))
BOX3D = IncidenceProfile("box3d", 2, 3, ((0, 1),))

# 0 nose, 1 neck, 2 head top, 3/4 shoulders, 5/6 elbows, 7/8 wrists,
# 9/10 hips, 11/12 knees, 13/14 ankles (right/left).
SKELETON15 = IncidenceProfile(
    "skeleton15",
    15,
    2,
    (
        (1, 0), (1, 2), (1, 3), (1, 4),
        (3, 5), (3, 9), (4, 6), (4, 10),
        (5, 7), (6, 8),
        (9, 11), (10, 12), (11, 13), (12, 14),
    ),
)


def _chain(*idx):
    return [(a, b) for a, b in zip(idx, idx[1:])]


def _face68_edges():
    # 68-point landmark layout: jaw 0-16, brows 17-26, nose 27-35,
    # eyes 36-47, outer lip 48-59, inner lip 60-67.
    e = []
    e += [(27, 21), (27, 22), (27, 39), (27, 42)]
    e += _chain(27, 28, 29, 30, 33)
    e += _chain(33, 32, 31) + _chain(33, 34, 35)
    e += _chain(21, 20, 19, 18, 17) + _chain(22, 23, 24, 25, 26)
    e += _chain(39, 38, 37, 36, 41, 40) + _chain(42, 43, 44, 45, 46, 47)
    e += [(33, 51)]
    e += _chain(51, 50, 49, 48, 59, 58, 57) + _chain(51, 52, 53, 54, 55, 56)
    e += [(51, 62)] + _chain(62, 61, 60) + _chain(62, 63, 64)
    e += [(57, 66)] + _chain(66, 65) + _chain(66, 67)
    e += [(57, 8)] + _chain(8, 7, 6, 5, 4, 3, 2, 1, 0) + _chain(8, 9, 10, 11, 12, 13, 14, 15, 16)
    return tuple(e)


FACE68 = IncidenceProfile("face68", 68, 2, _face68_edges())

# Stable wire ids; never renumber.
BUILTIN_IDS = {"bbox2d": 0, "box3d": 1, "skeleton15": 2, "face68": 3}
BUILTINS = {p.name: p for p in (BBOX2D, BOX3D, SKELETON15, FACE68)}
BUILTIN_BY_ID = {i: BUILTINS[name] for name, i in BUILTIN_IDS.items()}


def get_profile(name: str) -> IncidenceProfile:
    try:
        return BUILTINS[name]
    except KeyError:
        raise UnknownProfileError(
            f"unknown profile {name!r} (builtins: {', '.join(sorted(BUILTINS))})"
        ) from None


def builtin_id(profile: IncidenceProfile):
    """Wire id if ``profile`` is identical to a built-in, else ``None``."""
    ref = BUILTINS.get(profile.name)
    if ref is not None and ref == profile:
        return BUILTIN_IDS[profile.name]
    return None


def parse_profile_text(text: str) -> IncidenceProfile:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise ParseError("empty profile file")
    lineno, head = rows[0]
    if len(head) != 3:
        raise ParseError("expected 'name N D'", f"line {lineno}")
    name = head[0]
    try:
        n, d = int(head[1]), int(head[2])
    except ValueError:
        raise ParseError("N and D must be integers", f"line {lineno}") from None
    edges = []
    for lineno, parts in rows[1:]:
        if len(parts) != 2:
            raise ParseError("expected 'from to'", f"line {lineno}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ParseError("edge endpoints must be integers", f"line {lineno}") from None
    return check_profile(IncidenceProfile(name, n, d, tuple(edges)))


def load_profile_file(path) -> IncidenceProfile:
    return parse_profile_text(Path(path).read_text())


def format_profile_text(profile: IncidenceProfile) -> str:
    lines = [f"{profile.name} {profile.n_points} {profile.dims}"]
    lines += [f"{a} {b}" for a, b in profile.edges]
    return "\n".join(lines) + "\n"
