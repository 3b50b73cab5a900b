import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistlab.errors import ValidationError
from twistlab.standard_subspace import (
    AntilinearMap,
    conjugation,
    diagonal_subspace,
    generic_subspace,
    in_subspace,
    make_standard,
    modular_relation_residual,
    rotate,
    subspace_from_spec,
    swap_conjugation,
    symplectic_complement,
    symplectic_residual,
    tensor_power,
)
from twistlab.tensor_core import positive_spectral

from conftest import cvec, haar_unitary


def test_antilinear_composition_rules(rng):
    U = haar_unitary(rng, 3)
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    A = AntilinearMap(U)
    v = cvec(rng, 3)
    assert np.allclose(A.after_linear(M)(v), A(M @ v))
    assert np.allclose(A.before_linear(M)(v), M @ A(v))
    assert np.allclose(A.after_antilinear(A) @ v, A(A(v)))
    assert np.allclose(A.inverse()(A(v)), v)
    assert np.allclose(A.conjugate_linear(M) @ v, A(M @ A.inverse()(v)))


def test_antilinear_adjoint(rng):
    A = AntilinearMap(haar_unitary(rng, 2) @ np.diag([1.0, 2.0]))
    x, y = cvec(rng, 2), cvec(rng, 2)
    assert np.vdot(A.adjoint()(x), y) == pytest.approx(np.conj(np.vdot(x, A(y))))


def test_trivial_subspace_is_real_part():
    H = make_standard(positive_spectral([1.0, 1.0]), conjugation(2))
    assert in_subspace(H, np.array([1.0, -2.0])) < 1e-14
    assert in_subspace(H, np.array([1j, 0])) == pytest.approx(2.0)


def test_modular_relation_and_fix(H_generic):
    assert modular_relation_residual(H_generic.delta, H_generic.j) < 1e-12
    for h in H_generic.basis_vectors():
        assert in_subspace(H_generic, h) < 1e-12
    B = H_generic.real_basis
    assert np.linalg.matrix_rank(B, tol=1e-10) == 2


def test_modular_relation_violation_rejected():
    with pytest.raises(ValidationError):
        make_standard(positive_spectral([4.0, 0.25]), conjugation(2))


def test_non_involution_rejected():
    with pytest.raises(ValidationError):
        make_standard(positive_spectral([1.0, 1.0]), AntilinearMap(2 * np.eye(2)))


def test_symplectic_complement(H_generic):
    Hc = symplectic_complement(H_generic)
    assert symplectic_residual(H_generic, Hc) < 1e-12
    J = H_generic.j
    for h in H_generic.basis_vectors():
        assert in_subspace(Hc, J(h)) < 1e-12


def test_tensor_power_relation(H_generic):
    S2, D2, J2 = tensor_power(H_generic, 2)
    assert modular_relation_residual(D2, J2) < 1e-11
    assert np.allclose(S2.unitary_part, np.kron(H_generic.tomita.unitary_part, H_generic.tomita.unitary_part))


def test_spec_parsing():
    H = subspace_from_spec({"dim": 2, "delta_eigenvalues": [4.0, 0.25], "j": {"kind": "swap_conjugation"}})
    assert np.allclose(H.delta_matrix, np.diag([4.0, 0.25]))
    with pytest.raises(ValidationError):
        subspace_from_spec({"dim": 3, "delta_eigenvalues": [1.0]})
    with pytest.raises(ValidationError):
        subspace_from_spec({"dim": 2, "delta_eigenvalues": [1.0, 1.0], "j": {"kind": "nope"}})


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 10.0), st.integers(0, 2**31 - 1))
def test_rotated_subspace_is_standard(lam, seed):
    V = haar_unitary(np.random.default_rng(seed), 2)
    H = generic_subspace(lam, V)
    assert modular_relation_residual(H.delta, H.j) < 1e-9 * (lam + 1 / lam)
    for h in H.basis_vectors():
        assert in_subspace(H, h) < 1e-9 * (1 + lam)
    S = H.tomita
    assert S.after_antilinear(S) == pytest.approx(np.eye(2), abs=1e-9 * (lam + 1 / lam))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 5.0), st.integers(0, 2**31 - 1))
def test_rotation_covariance(lam, seed):
    H = diagonal_subspace([lam, 1.0, 1 / lam], swap_conjugation(3))
    V = haar_unitary(np.random.default_rng(seed), 3)
    HV = rotate(H, V)
    for h in H.basis_vectors():
        assert in_subspace(HV, V @ h) < 1e-9 * (1 + lam + 1 / lam)
