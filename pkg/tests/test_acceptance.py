"""Acceptance suite: one test per criterion, with its time budget.

Each run prints a line "PASS|FAIL <criterion>: <detail> (<time>s, budget <b>s)".
Run directly (python3 tests/test_acceptance.py) for the bare matrix.
"""

import pytest

from qdiffcalc.acceptance import CRITERIA, run

# wall-clock budgets in seconds; criteria without one are only checked for correctness
BUDGETS = {0: 1, 1: 10, 2: 10, 4: 30, 8: 120, 10: 60}


def line(index):
    name, ok, detail, secs = run(index)
    budget = BUDGETS.get(index)
    in_time = budget is None or secs < budget
    verdict = "PASS" if ok and in_time else "FAIL"
    limit = f", budget {budget}s" if budget is not None else ""
    return verdict, ok, in_time, f"{verdict} {name}: {detail} ({secs:.2f}s{limit})"


@pytest.mark.parametrize("index", range(len(CRITERIA)), ids=[name for name, _ in CRITERIA])
def test_criterion(index, capsys):
    verdict, ok, in_time, text = line(index)
    with capsys.disabled():
        print("\n" + text)
    assert ok, text
    assert in_time, text


if __name__ == "__main__":
    import sys

    results = [line(i) for i in range(len(CRITERIA))]
    for r in results:
        print(r[3])
    sys.exit(0 if all(r[0] == "PASS" for r in results) else 1)
