"""One assertion per acceptance criterion.

The suite runs once per session (several minutes, mostly the Fourier
certificates).  The PASS/FAIL lines are printed in the terminal summary.
"""
import pytest

from conftest import ACCEPTANCE_LINES

from d4eigen.acceptance import CRITERIA, SuiteConfig, run_criteria


@pytest.fixture(scope="module")
def results():
    res = {r.number: r for r in run_criteria(SuiteConfig())}
    ACCEPTANCE_LINES.extend(res[n].line() for n in sorted(res))
    return res


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(results, number):
    r = results[number]
    assert r.passed, f"{r.line()}: {r.detail}"
