"""One PASS/FAIL line per acceptance criterion, collected in the terminal summary."""

import pytest

from conftest import ACCEPTANCE_LINES
from kgalmod.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize(
    "number",
    [c[0] for c in CRITERIA],
    ids=[f"criterion_{c[0]:02d}_{c[1].replace(' ', '_')}" for c in CRITERIA],
)
def test_criterion(number):
    res = run_criterion(number)
    print(res.line())
    ACCEPTANCE_LINES.append(res.line())
    assert res.passed, res.line()
