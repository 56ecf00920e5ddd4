"""Superoperators on vectorized density matrices.

Vectorization uses the column-stacking convention: vec(A X B) = (B^T kron A) vec(X),
with vec(X) = X.flatten(order='F'). Superoperator matrices act on d^2-vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import HilbertBasis
from .operators import JumpOperator, SpinOperator

SUPEROP_ENTRIES_CAP = 2500 ** 2  # matrix entry count cap: d^2 x d^2 <= 2500^2, i.e. d <= 50


def vec(mat: np.ndarray) -> np.ndarray:
    return np.asarray(mat).flatten(order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


@dataclass(frozen=True)
class SuperOperator:
    basis: HilbertBasis
    matrix: np.ndarray  # (d^2, d^2) complex, column-stacking convention

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.basis.dim
        if m.shape != (d * d, d * d):
            raise ValueError(f"superoperator shape {m.shape} does not match basis dim {d}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.dim
        return unvec(self.matrix @ vec(rho), d)

    def trace_defect(self) -> float:
        """Max |Tr L(E_ij)| over matrix units; 0 for trace-preserving generators."""
        d = self.dim
        row = vec(np.eye(d)) @ self.matrix
        return float(np.abs(row).max())


def _lr(a: np.ndarray, d: int) -> np.ndarray:
    return np.kron(np.eye(d), a)  # left multiplication A rho


def _rr(a: np.ndarray, d: int) -> np.ndarray:
    return np.kron(a.T, np.eye(d))  # right multiplication rho A


def hamiltonian_commutator(h: SpinOperator) -> SuperOperator:
    """-i[H, .] as a superoperator."""
    hm = h.dense()
    d = h.dim
    return SuperOperator(h.basis, -1j * (_lr(hm, d) - _rr(hm, d)))


def liouvillian(h: SpinOperator | None, jumps: list[JumpOperator],
                basis: HilbertBasis | None = None) -> SuperOperator:
    """GKLS generator -i[H,.] + sum_k (L . L^dag - 1/2 {L^dag L, .})."""
    if h is None and not jumps:
        raise ValueError("need at least a Hamiltonian or one jump operator")
    if basis is None:
        basis = h.basis if h is not None else jumps[0].basis
    d = basis.dim
    m = np.zeros((d * d, d * d), dtype=complex)
    if h is not None:
        hm = h.dense()
        m += -1j * (_lr(hm, d) - _rr(hm, d))
    for j in jumps:
        lm = j.dense()
        ldl = lm.conj().T @ lm
        m += np.kron(lm.conj(), lm) - 0.5 * (_lr(ldl, d) + _rr(ldl, d))
    return SuperOperator(basis, m)


def superop_eigendecomposition(s: SuperOperator):
    """Full complex spectrum with right eigenvectors reshaped to matrices,
    sorted by real part descending."""
    d = s.dim
    if (d * d) ** 2 > SUPEROP_ENTRIES_CAP:
        raise ValueError(
            f"superoperator dimension {d * d} exceeds the practical cap "
            f"({int(SUPEROP_ENTRIES_CAP ** 0.5)} vectorized entries)"
        )
    lam, v = np.linalg.eig(s.matrix)
    order = np.argsort(-lam.real, kind="stable")
    return [(lam[i], unvec(v[:, i], d)) for i in order]
