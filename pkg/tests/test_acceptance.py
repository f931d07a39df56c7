"""Acceptance gate: the ten primary criteria at their stated sizes and tolerances."""
import pytest

from pwlab.suite import CHECKS, SuiteConfig, run_suite

@pytest.mark.parametrize("name", list(CHECKS))
def test_acceptance(name, capsys):
    (result,) = run_suite([name], SuiteConfig(seed=0))
    worst = ", ".join(f"{k}={m['value']}/{m['tol']}" for k, m in result.metrics.items()) or result.details
    with capsys.disabled():
        print(f"\nACCEPTANCE {result.criterion:2d} {name:<12} {'PASS' if result.passed else 'FAIL'}  {worst}")
    assert result.passed, result.to_dict()
