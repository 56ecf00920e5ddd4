import numpy as np
import pytest

from qreservoir.basis import blockaded_ring, full_basis
from qreservoir.operators import JumpOperator, SpinOperator, build_pauli, site_transition
from qreservoir.superop import (
    SuperOperator,
    hamiltonian_commutator,
    liouvillian,
    superop_eigendecomposition,
    unvec,
    vec,
)


def test_vec_unvec_column_stacking():
    m = np.arange(4).reshape(2, 2).astype(complex)
    v = vec(m)
    assert np.allclose(v, [0, 2, 1, 3])  # columns stacked
    assert np.allclose(unvec(v, 2), m)


def test_vec_kron_identity():
    rng = np.random.default_rng(5)
    a, x, b = (rng.normal(size=(3, 3)) for _ in range(3))
    assert np.allclose(np.kron(b.T, a) @ vec(x), vec(a @ x @ b))


def test_zero_generator_spectrum():
    b = full_basis(2)
    s = SuperOperator(b, np.zeros((16, 16), dtype=complex))
    eigs = superop_eigendecomposition(s)
    assert len(eigs) == 16
    assert all(abs(lam) == 0 for lam, _ in eigs)


def test_commutator_generator_spectrum_matches_bohr_frequencies(rng):
    b = full_basis(2)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = SpinOperator(b, a + a.conj().T, hermitian_hint=True)
    s = hamiltonian_commutator(h)
    lam = np.array([l for l, _ in superop_eigendecomposition(s)])
    assert np.abs(lam.real).max() < 1e-8  # spectrum is purely imaginary
    w = np.linalg.eigvalsh(h.dense())
    expected = np.array([-1j * (wi - wj) for wi in w for wj in w])
    assert np.abs(np.sort(lam.imag) - np.sort(expected.imag)).max() < 1e-8


def test_liouvillian_matches_direct_action_on_matrix_units():
    b = full_basis(1)
    h = 1.3 * build_pauli(b, 0, "x")
    j = JumpOperator(np.sqrt(0.7) * site_transition(b, 0, 0, 1))
    s = liouvillian(h, [j])
    hm, lm = h.dense(), j.dense()
    kd = lm.conj().T @ lm
    for i in range(2):
        for k in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, k] = 1.0
            direct = -1j * (hm @ e - e @ hm) + lm @ e @ lm.conj().T - 0.5 * (kd @ e + e @ kd)
            assert np.abs(s.apply(e) - direct).max() < 1e-10


def test_liouvillian_trace_preservation():
    b = full_basis(2)
    h = build_pauli(b, 0, "x") + 0.5 * build_pauli(b, 1, "z")
    jumps = [JumpOperator(np.sqrt(0.3) * site_transition(b, i, 0, 1)) for i in range(2)]
    s = liouvillian(h, jumps)
    assert s.trace_defect() < 1e-8


def test_eigendecomposition_sorted_by_real_part():
    b = full_basis(1)
    j = JumpOperator(np.sqrt(2.0) * site_transition(b, 0, 0, 1))
    s = liouvillian(None, [j])
    eigs = superop_eigendecomposition(s)
    reals = [lam.real for lam, _ in eigs]
    assert reals == sorted(reals, reverse=True)
    assert abs(eigs[0][0]) < 1e-12  # steady state present


def test_dimension_cap():
    # cap is d <= 50 vectorized side length (superop matrix <= 2500^2 entries)
    b = blockaded_ring(10)  # dim 123 > 50
    fake = SuperOperator.__new__(SuperOperator)
    object.__setattr__(fake, "basis", b)
    object.__setattr__(fake, "matrix", None)
    with pytest.raises(ValueError):
        superop_eigendecomposition(fake)
