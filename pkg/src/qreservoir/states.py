"""Quantum states on a declared basis: pure vectors and density matrices.

States are immutable after construction and validated against normalization,
trace, Hermiticity and positivity tolerances at build time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import HilbertBasis, full_basis

NORM_TOL = 1e-10
EIG_TOL = 1e-9


@dataclass(frozen=True)
class QuantumState:
    basis: HilbertBasis
    data: np.ndarray  # (d,) complex for pure, (d, d) complex for mixed
    # positivity validation bound; evolution outputs use the looser runtime
    # guarantee (1e-6) since fixed-step integration monitors, not enforces,
    # positivity
    eig_tol: float = EIG_TOL

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=complex)
        d = self.basis.dim
        if arr.ndim == 1:
            if arr.shape != (d,):
                raise ValueError(f"state vector has shape {arr.shape}, basis dim {d}")
            norm2 = float(np.vdot(arr, arr).real)
            if abs(norm2 - 1.0) > NORM_TOL:
                raise ValueError(f"pure state norm^2 = {norm2} deviates from 1 beyond {NORM_TOL}")
        elif arr.ndim == 2:
            if arr.shape != (d, d):
                raise ValueError(f"density matrix has shape {arr.shape}, basis dim {d}")
            tr = complex(np.trace(arr))
            if abs(tr - 1.0) > NORM_TOL:
                raise ValueError(f"density matrix trace = {tr} deviates from 1 beyond {NORM_TOL}")
            herm = np.abs(arr - arr.conj().T).max()
            if herm > NORM_TOL:
                raise ValueError(f"density matrix non-Hermitian by {herm}")
            wmin = float(np.linalg.eigvalsh(0.5 * (arr + arr.conj().T)).min())
            if wmin < -self.eig_tol:
                raise ValueError(f"density matrix has eigenvalue {wmin} below -{self.eig_tol}")
        else:
            raise ValueError("state data must be a vector or a square matrix")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def dim(self) -> int:
        return self.basis.dim

    def vector(self) -> np.ndarray:
        if not self.is_pure:
            raise ValueError("state is mixed; no underlying vector")
        return self.data

    def density_matrix(self) -> np.ndarray:
        """Density-matrix view (projector for pure states)."""
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def to_mixed(self) -> "QuantumState":
        if self.is_pure:
            return QuantumState(self.basis, self.density_matrix(), self.eig_tol)
        return self


def pure_state(basis: HilbertBasis, amplitudes: np.ndarray, normalize: bool = False) -> QuantumState:
    amp = np.asarray(amplitudes, dtype=complex)
    if normalize:
        amp = amp / np.linalg.norm(amp)
    return QuantumState(basis, amp)


def mixed_state(basis: HilbertBasis, rho: np.ndarray) -> QuantumState:
    return QuantumState(basis, np.asarray(rho, dtype=complex))


def basis_state(basis: HilbertBasis, config: int) -> QuantumState:
    """Computational basis state |config> as a pure state."""
    v = np.zeros(basis.dim, dtype=complex)
    v[basis.index_of(config)] = 1.0
    return QuantumState(basis, v)


def all_ground(basis: HilbertBasis) -> QuantumState:
    return basis_state(basis, 0)


def product_state(single_site: list[np.ndarray]) -> QuantumState:
    """Tensor product of per-site 2-vectors on the full basis (site 0 leftmost)."""
    v = np.array([1.0 + 0j])
    for a in single_site:
        a = np.asarray(a, dtype=complex)
        if a.shape != (2,):
            raise ValueError("each site state must be a 2-vector")
        v = np.kron(v, a)
    v = v / np.linalg.norm(v)
    return QuantumState(full_basis(len(single_site)), v)


def embed_blockaded(state: QuantumState) -> QuantumState:
    """Embed a blockaded-basis state into the full 2^n basis."""
    fb = full_basis(state.basis.n_sites)
    idx = state.basis.embedding_indices()
    if state.is_pure:
        v = np.zeros(fb.dim, dtype=complex)
        v[idx] = state.data
        return QuantumState(fb, v)
    rho = np.zeros((fb.dim, fb.dim), dtype=complex)
    rho[np.ix_(idx, idx)] = state.data
    return QuantumState(fb, rho)


def random_pure_state(basis: HilbertBasis, rng: np.random.Generator) -> QuantumState:
    v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return pure_state(basis, v, normalize=True)
