"""Acceptance criteria 1-9: one pass/fail line each (also listed in the terminal summary)."""
import time

import pytest

from zeromb.verify import CHECKS, Check, _growth_all, format_check

_GROWTH = {}


def _growth():
    if "r" not in _GROWTH:
        _GROWTH["r"] = _growth_all()
    return _GROWTH["r"]


@pytest.mark.slow
@pytest.mark.parametrize("number,name,fn", CHECKS, ids=[f"criterion{c[0]}" for c in CHECKS])
def test_criterion(number, name, fn, acceptance_log):
    t0 = time.perf_counter()
    ok, detail = fn(_growth()) if number in (3, 4) else fn()
    line = format_check(Check(number, name, ok, detail, time.perf_counter() - t0))
    print(line)
    acceptance_log.append(line)
    assert ok, line
