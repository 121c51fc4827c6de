"""The twelve acceptance criteria, each at its stated tolerance and time budget.

Every criterion prints one ``[PASS]``/``[FAIL]`` line, visible with or without
``-s``.
"""

import pytest

from ncoscillator.harness.checks import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, capsys):
    res = run_criterion(number)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()
