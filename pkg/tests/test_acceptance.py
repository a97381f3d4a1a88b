"""Acceptance criteria 1-9, one test each.

Every test prints a single PASS/FAIL line with the measured numbers and their
limits; the checks themselves live in ``quasiflow.acceptance`` so that
``quasiflow verify --criteria`` reproduces them.
"""

import pytest

from quasiflow.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + result.line())
    failed = [c for c in result.checks if not c.ok]
    assert not failed, "; ".join(f"{c.name}={c.value:.6g} violates {c.limit}" for c in failed)
