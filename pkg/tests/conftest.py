import pytest

from kpsc.model import Frame, KeypointSequence, ObjectInstance
from kpsc.profiles import get_profile

ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    status = passed if isinstance(passed, str) else ("PASS" if passed else "FAIL")
    line = f"[{status}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_seq(profile, frames, scale=(1, 1)):
    """frames: list of (index, [(track_id, [point or None, ...]), ...])."""
    if isinstance(profile, str):
        profile = get_profile(profile)
    out = []
    for index, objs in frames:
        out.append(
            Frame(
                index,
                tuple(
                    ObjectInstance(tid, tuple(int(p is not None) for p in pts), tuple(pts))
                    for tid, pts in objs
                ),
            )
        )
    return KeypointSequence(profile, tuple(out), scale)


@pytest.fixture
def tiny_bbox():
    return make_seq("bbox2d", [(0, [(0, [(1, 2), (3, 5)])])])
