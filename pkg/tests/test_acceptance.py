"""Acceptance criteria, one test per criterion.

Each test prints one pass/fail line per check (visible with `pytest -s` or
via `jacbif verify all`) and fails if any check in its criterion fails.
The fold runs are shared between criteria 7 and 8 through a module fixture.
"""

import pytest

from jacbif.verification import (
    run_endpoints,
    run_folds,
    run_gasper,
    run_hygiene,
    run_kernel,
    run_quadrature,
    run_theorem21,
    run_theorem31,
)


def _report(results):
    for res in results:
        print(res.line())
    failed = [res for res in results if not res.passed]
    assert not failed, "\n".join(res.line() for res in failed)


@pytest.fixture(scope="module")
def fold_results():
    return run_folds()


def test_criterion_1_orthogonality_and_quadrature():
    _report(run_quadrature())


def test_criterion_2_endpoint_formulas():
    _report(run_endpoints())


def test_criterion_3_product_sign_structure():
    _report(run_theorem21())


def test_criterion_4_quartic_identity():
    _report(run_gasper())


def test_criterion_5_branch_slope():
    _report(run_theorem31())


def test_criterion_6_discrete_bifurcation_points():
    _report(run_kernel())


def test_criterion_7_fold_realization(fold_results):
    _report([res for res in fold_results if res.name.startswith("fold:")])


def test_criterion_8_branch_invariants(fold_results):
    _report([res for res in fold_results if res.name.startswith("branch invariants:")])


def test_criterion_9_numerical_hygiene():
    _report(run_hygiene(seed=0))
