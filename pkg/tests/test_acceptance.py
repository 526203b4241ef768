"""Acceptance criteria 1-12.  Each test prints exactly one PASS/FAIL line.

Criterion 3 is split: 3a (links are flag) and 3b (links split as a join of
the ascending simplex with the descending link).  3b fails on the computed
complexes and is left failing.
"""

import json

import pytest

from neretin.acceptance import CRITERIA, DEFAULT_SEED, run_criterion

# wall-clock budgets in seconds, where one is stated
RUNTIME = {"1": 30, "2": 60, "4": 300, "7": 10, "8": 60, "10": 180}

# collected for the terminal summary (see conftest.py)
LINES: list = []


def _run(key: str):
    result = run_criterion(key, DEFAULT_SEED)
    budget = RUNTIME.get(key)
    in_time = budget is None or result.seconds < budget
    passed = result.passed and in_time
    timing = f"{result.seconds:.2f}s" + (f" (budget {budget}s)" if budget else "")
    line = f"{'PASS' if passed else 'FAIL'} criterion {key}: {result.title} [{timing}]"
    print(line)
    LINES.append(line)
    return result, passed, in_time


@pytest.mark.parametrize("key", list(CRITERIA))
def test_criterion(key):
    result, passed, in_time = _run(key)
    assert in_time, f"criterion {key} exceeded its runtime budget"
    assert result.passed, json.dumps(result.detail, sort_keys=True, default=str)[:4000]
    assert passed
