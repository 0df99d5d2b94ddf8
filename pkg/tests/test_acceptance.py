"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

Run directly (``python tests/test_acceptance.py``) or through pytest; the
lines are also printed in the pytest terminal summary.
"""

import functools

import pytest

from pgtoeplitz.acceptance import CRITERIA, format_line, run_criterion

LINES: dict[int, str] = {}

UNSTABLE_PARITY = (
    "pointwise Toeplitz kernel parity is not invariant under gapped compatible "
    "perturbations of U_p: kernel and cokernel pair off at every k_x"
)


@functools.lru_cache(maxsize=None)
def result(number: int):
    r = run_criterion(number)
    line = format_line(r)
    LINES[number] = line
    print(line)
    return r


@pytest.mark.parametrize("number", [n for n in sorted(CRITERIA) if n != 11])
def test_criterion(number):
    r = result(number)
    assert r.passed, r.detail


@pytest.mark.xfail(strict=True, reason=UNSTABLE_PARITY)
def test_criterion_11_stability():
    r = result(11)
    assert r.passed, r.detail


def test_criterion_11_parts_that_hold():
    d = result(11).detail
    assert d["winding_additivity"]
    assert d["seeds"] == 50 and d["amplitude"] == 0.3
    assert all(row["mod2"] == 1 for row in d["crossing_diagnostic"])


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        result(n)
