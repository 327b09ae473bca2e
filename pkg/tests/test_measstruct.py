import numpy as np
import pytest

from evqc.engine import expectation
from evqc.funcspace import BoolFunc, imbalance, permute
from evqc.measstruct import (
    FEASIBILITY_TOL,
    InvariantForm,
    NotInvariantFormError,
    check_permutation_invariance,
    decompose_invariant,
    find_permutation_witness,
    necessary_conditions,
    search_max_c_ratio,
)
from evqc.spinops import Operator, total_spin, unitarily_equivalent, w_projector
from evqc.states import demo_system, pseudopure, thermal_state


def readout_prediction(form, alpha, f):
    """Closed form from (c, D) and the imbalance; the antisymmetric part drops out."""
    size = form.dim
    tr = form.c + form.d.sum()
    quad = 4.0 * form.c * imbalance(f) ** 2 / size + form.d.sum()
    return (1.0 - alpha / size) * tr / size + (alpha / size**2) * quad


def test_invariant_form_validation():
    with pytest.raises(ValueError):
        InvariantForm(c=1.0, d=np.array([1.0]), a_upper=np.array([]))
    with pytest.raises(ValueError):
        InvariantForm(c=1.0, d=np.array([1.0, 2.0]), a_upper=np.array([0.1, 0.2]))


def test_decompose_frozen_exact():
    d = np.array([0.5, -0.5, 0.25, -0.25])
    a = np.array([0.1, -0.2, 0.3, 0.4, -0.5, 0.6])
    m = InvariantForm(c=2.0, d=d, a_upper=a).reconstruct()
    form = decompose_invariant(m)
    assert form.c == 2.0
    np.testing.assert_array_equal(form.d, d)
    np.testing.assert_array_equal(form.a_upper, a)


def test_decompose_reconstruct_roundtrip(rng):
    for _ in range(30):
        size = int(rng.integers(2, 9))
        form = InvariantForm(
            c=float(rng.standard_normal()) * 3.0,
            d=rng.standard_normal(size),
            a_upper=rng.standard_normal(size * (size - 1) // 2),
        )
        back = decompose_invariant(form.reconstruct())
        assert abs(back.c - form.c) < 1e-12
        np.testing.assert_allclose(back.d, form.d, atol=1e-12)
        np.testing.assert_allclose(back.a_upper, form.a_upper, atol=1e-12)


def test_decompose_rejects_total_spin():
    with pytest.raises(NotInvariantFormError) as err:
        decompose_invariant(total_spin(2, "x"))
    assert "(" in str(err.value) and "spread" in str(err.value)


def test_decompose_rejects_nonhermitian():
    with pytest.raises(ValueError):
        decompose_invariant(Operator(np.array([[0.0, 1.0], [0.0, 0.0]])))


def test_decompose_accepts_projector():
    form = decompose_invariant(w_projector(2))
    assert abs(form.c - 1.0) < 1e-15
    np.testing.assert_allclose(form.d, 0.0, atol=1e-15)
    np.testing.assert_allclose(form.a_upper, 0.0, atol=1e-15)


def test_readout_ignores_antisymmetric_part(rng):
    alpha = 0.7
    rho = pseudopure(2, alpha)
    d = rng.standard_normal(4)
    base = InvariantForm(c=1.3, d=d, a_upper=np.zeros(6))
    twisted = InvariantForm(c=1.3, d=d, a_upper=rng.standard_normal(6))
    for mask in range(16):
        f = BoolFunc(2, mask)
        e1 = expectation(base.reconstruct(), rho, f)
        e2 = expectation(twisted.reconstruct(), rho, f)
        assert abs(e1 - e2) < 1e-12
        assert abs(e1 - readout_prediction(base, alpha, f)) < 1e-12


def test_readout_survives_transpositions(rng):
    alpha = 0.4
    rho = pseudopure(2, alpha)
    form = InvariantForm(c=-0.8, d=rng.standard_normal(4), a_upper=rng.standard_normal(6))
    m = form.reconstruct()
    for mask in range(16):
        f = BoolFunc(2, mask)
        for l in range(4):
            for k in range(l + 1, 4):
                assert abs(expectation(m, rho, f) - expectation(m, rho, permute(f, l, k))) < 1e-12


def test_check_invariance_accepts_invariant_form(rng):
    form = InvariantForm(c=2.0, d=rng.standard_normal(8), a_upper=rng.standard_normal(28))
    assert check_permutation_invariance(form.reconstruct(), pseudopure(3, 0.9), trials=50, seed=3)


def test_check_invariance_flags_total_spin():
    assert not check_permutation_invariance(total_spin(2, "x"), pseudopure(2, 1.0), trials=200, seed=1)


def test_witness_for_total_spin():
    rho = pseudopure(2, 1.0)
    m = total_spin(2, "x")
    hit = find_permutation_witness(m, rho)
    assert hit is not None
    f, l, k = hit
    assert abs(expectation(m, rho, f) - expectation(m, rho, permute(f, l, k))) > 1e-10


def test_witness_absent_for_invariant_form(rng):
    form = InvariantForm(c=1.0, d=rng.standard_normal(4), a_upper=rng.standard_normal(6))
    assert find_permutation_witness(form.reconstruct(), pseudopure(2, 0.5)) is None


def test_invariance_check_requires_pseudopure_family():
    with pytest.raises(ValueError):
        check_permutation_invariance(total_spin(2, "x"), thermal_state(demo_system(2)), trials=5, seed=0)


def test_necessary_conditions_pass_for_rotated_spectrum():
    report = necessary_conditions(total_spin(2, "y"), total_spin(2, "x"), tol=1e-8)
    assert report.passed
    assert report.trace_ok
    assert all(ok for _, _, ok in report.det_checks)


def test_necessary_conditions_fail_for_projector():
    report = necessary_conditions(w_projector(2), total_spin(2, "x"), tol=1e-8)
    assert not report.passed
    assert not report.trace_ok
    assert not all(ok for _, _, ok in report.det_checks)


def test_search_single_spin_reaches_unity():
    result = search_max_c_ratio(1, budget=20_000, seed=0, restarts=10)
    assert result.feasible
    assert abs(result.ratio - 1.0) < 1e-6
    assert result.penalty_residual < FEASIBILITY_TOL
    assert unitarily_equivalent(result.form.reconstruct(), total_spin(1, "x"), tol=1e-5)


def test_search_is_deterministic():
    a = search_max_c_ratio(1, budget=5_000, seed=11, restarts=4)
    b = search_max_c_ratio(1, budget=5_000, seed=11, restarts=4)
    assert a.to_record() == b.to_record()
    assert a.evaluations == b.evaluations


def test_search_record_shape():
    result = search_max_c_ratio(1, budget=2_000, seed=2, restarts=2)
    rec = result.to_record()
    assert set(rec) == {
        "n", "ratio", "c", "D", "A_upper", "penalty_residual", "budget", "seed", "feasible",
    }
    assert rec["n"] == 1
    assert len(rec["D"]) == 2
    assert len(rec["A_upper"]) == 1


def test_search_guards():
    with pytest.raises(ValueError):
        search_max_c_ratio(4)
    with pytest.raises(ValueError):
        search_max_c_ratio(1, budget=50)
    with pytest.raises(ValueError):
        search_max_c_ratio(1, restarts=0)
