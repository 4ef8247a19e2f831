"""The twelve acceptance criteria, one pass/fail line each."""

import pytest

from psl22w.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, recs = run_criterion(number)
    failing = [r for r in recs if r["status"] != "pass"]
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({CRITERIA[number][0]})")
    assert ok, failing
    assert recs
