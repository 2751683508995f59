"""One pass/fail line per acceptance criterion, at the stated tolerances."""

import pytest

from stabletrace.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"{c.number:02d}-{c.__name__}" for c in CRITERIA])
def test_criterion(criterion, capsys):
    result = criterion()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
