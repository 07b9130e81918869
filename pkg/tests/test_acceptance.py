"""Acceptance criteria, one PASS/FAIL line each, at the stated limits."""
import pytest

from locfac.suites import BRANCHES, run_all

# criterion number -> (suite index in run_all order, time limit in seconds, minimum case count)
CRITERIA = {
    1: (0, 10, 1),
    2: (1, 60, 1),
    3: (2, None, 1),
    4: (3, 120, 20),
    5: (4, 120, 1),
    6: (5, None, 1),
    7: (6, None, 1),
    8: (7, None, 4),
    9: (8, 60, 1),
    10: (9, None, 10),
}


@pytest.fixture(scope="module")
def acceptance():
    return run_all("acceptance")


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(acceptance, number):
    results, _ = acceptance
    index, limit, min_cases = CRITERIA[number]
    res = results[index]
    ok = res.passed and res.cases >= min_cases and (limit is None or res.seconds < limit)
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {res.line()}")
    assert res.passed, res.failures[:5]
    assert res.cases >= min_cases
    if limit is not None:
        assert res.seconds < limit


def test_pair_exponents_recorded(acceptance):
    res = acceptance[0][4]
    print("\n", {k: v for k, v in res.details.items() if "w" in k})
    assert any("w" in k for k in res.details)


def test_branch_coverage(acceptance):
    _, cov = acceptance
    print("\nbranches", cov.counts)
    assert all(cov.counts[b] > 0 for b in BRANCHES)
