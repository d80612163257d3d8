"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The same checks back ``nexpansive all-acceptance``; tolerances live in
:mod:`nexpansive.acceptance`.
"""
import pytest

from nexpansive import acceptance as A

CASES = [
    (A.criterion_1, "inversion involution"),
    (A.criterion_2, "seam consistency"),
    (A.criterion_3, "cat map expansivity"),
    (A.criterion_4, "Rolle chain"),
    (A.criterion_5, "cubic census"),
    (A.criterion_6, "quartic census"),
    (A.criterion_7, "inversion model tangencies"),
    (A.criterion_8, "local scaling perturbation"),
    (A.criterion_9, "tangency flattening"),
    (A.criterion_10, "genus-two witness"),
    (A.criterion_11, "determinism"),
]


@pytest.mark.parametrize("check", [c for c, _ in CASES], ids=[n for _, n in CASES])
def test_criterion(check, capsys):
    result = check()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
