"""Acceptance gate: one test per verification check, each printing its
pass/fail line, plus an end-to-end run of the `verify` subcommand.

Stated runtime budgets are asserted where the contract names one.
"""

import subprocess
import sys

import pytest

from evzoom import verify

RUNTIME_BUDGETS_S = {
    "interpolation_endpoints_and_linearity": 1.0,
    "label_simplex": 10.0,
    "coverage_oracle_equivalence": 5.0,
    "domain_equivalence": 30.0,
    "pipeline_determinism": 60.0,
    "monotone_mixing_strength": 10.0,
}


@pytest.mark.parametrize("name,fn", verify.ALL_CHECKS, ids=[c[0] for c in verify.ALL_CHECKS])
def test_acceptance_criterion(name, fn):
    result = verify.run_check(name, fn)
    print(result.line())
    assert result.passed, result.detail
    budget = RUNTIME_BUDGETS_S.get(name)
    if budget is not None:
        assert result.seconds < budget, f"{name} took {result.seconds:.1f}s (budget {budget}s)"


def test_verify_command_exits_zero_on_pristine_checkout():
    proc = subprocess.run(
        [sys.executable, "-m", "evzoom", "verify"],
        capture_output=True,
        text=True,
        timeout=600,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    lines = [ln for ln in proc.stdout.splitlines() if ln.startswith(("PASS", "FAIL"))]
    assert len(lines) == len(verify.ALL_CHECKS)
    assert all(ln.startswith("PASS") for ln in lines)
