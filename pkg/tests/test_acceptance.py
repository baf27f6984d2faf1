"""Acceptance gate: every criterion runs at its stated tolerance and
prints one pass/fail line."""

import pytest

from cfpde import acceptance


@pytest.mark.parametrize("number", range(1, len(acceptance.CRITERIA) + 1))
def test_criterion(number, capsys):
    result = acceptance.CRITERIA[number - 1]()
    with capsys.disabled():
        print(flush=True)
        print(result.line(), flush=True)
    assert result.passed, result.line()
