"""Shared fixtures: the worked 1-bit example tables over cipher values 1..6.

None marks a cell the example leaves open (any value, or a range).
"""

import pytest

from abctables.forge import REFERENCE_DUAL_VARIANT, build_dual, reference_codebook

_ = None

SINGLE_ADD = [
    [_, _, 5, 6, _, _],
    [_, _, 6, 5, _, _],
    [_, _, _, _, 1, 2],
    [_, _, _, _, 2, 1],
    [3, 4, _, _, _, _],
    [4, 3, _, _, _, _],
]
SINGLE_MUL = [
    [_, _, 5, 5, _, _],
    [_, _, 5, 6, _, _],
    [_, _, _, _, 1, 1],
    [_, _, _, _, 1, 2],
    [3, 3, _, _, _, _],
    [3, 4, _, _, _, _],
]
DUAL_ADD = [
    [_, _, 5, 6, 3, 4],
    [_, _, 6, 5, 4, 3],
    [5, 6, _, _, 1, 2],
    [6, 5, _, _, 2, 1],
    [3, 4, 1, 2, _, _],
    [4, 3, 2, 1, _, _],
]
# as printed; cells (6,3) and (6,4) read 2 and 1
DUAL_MUL_PRINTED = [
    [_, _, 5, 5, 4, 3],
    [_, _, 5, 6, 4, 4],
    [6, 5, _, _, 1, 1],
    [5, 5, _, _, 1, 2],
    [3, 3, 2, 2, _, _],
    [3, 4, 2, 1, _, _],
]
FORCED_CELLS = {(6, 3): (2, 1), (6, 4): (1, 2)}  # cell: (printed, forced)


def golden_cells(grid):
    """(c1, c2, value) for every fixed cell, cipher values starting at 1."""
    return [(r + 1, c + 1, v) for r, row in enumerate(grid) for c, v in enumerate(row) if v is not None]


@pytest.fixture
def ref_cb():
    return reference_codebook()


@pytest.fixture
def ref_dual():
    ts, secondary = build_dual(reference_codebook(), REFERENCE_DUAL_VARIANT, seed=0)
    return ts, reference_codebook(), secondary


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
