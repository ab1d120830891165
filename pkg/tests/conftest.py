import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from circlepack import build_pattern, enumerate_patterns, select_dependent_triple, solve_dependent_triple  # noqa: E402
from circlepack.solver import torus_pattern  # noqa: E402

SYM2 = 2 * math.cos(math.pi / 18)
SQRT3 = math.sqrt(3)
EXAMPLE_PAIRS = [(1, 10), (2, 5), (3, 7), (4, 8), (6, 9), (11, 14), (12, 16), (13, 17), (15, 18)]


@pytest.fixture(scope="session")
def genus2_patterns():
    return enumerate_patterns(2)


@pytest.fixture(scope="session")
def example_pattern():
    return build_pattern(2, EXAMPLE_PAIRS)


@pytest.fixture(scope="session")
def torus():
    return torus_pattern()


@pytest.fixture(scope="session")
def symmetric_point(example_pattern):
    layout = select_dependent_triple(example_pattern)
    return solve_dependent_triple(layout, [SYM2] * len(layout.free)).point


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
