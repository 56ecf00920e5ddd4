"""Partial trace, entropies, and state fidelity."""

from __future__ import annotations

import numpy as np

from .basis import BasisKind, HilbertBasis, full_basis
from .states import QuantumState, embed_blockaded

ENTROPY_EIG_FLOOR = 1e-12


def _to_full(state: QuantumState) -> QuantumState:
    if state.basis.kind != BasisKind.FULL:
        return embed_blockaded(state)
    return state


def partial_trace(state: QuantumState, keep: set[int] | list[int]) -> QuantumState:
    """Reduced density matrix on the kept sites (ascending site order).

    Blockaded-basis states are embedded into the full basis first.
    """
    keep_sorted = sorted(set(int(k) for k in keep))
    st = _to_full(state)
    n = st.basis.n_sites
    if not keep_sorted:
        raise ValueError("keep set must be nonempty")
    if keep_sorted[0] < 0 or keep_sorted[-1] >= n:
        raise ValueError(f"keep sites {keep_sorted} out of range for {n} sites")
    drop = [i for i in range(n) if i not in keep_sorted]
    rho = st.density_matrix().reshape((2,) * (2 * n))
    # trace over dropped sites: contract row index i with column index n + i
    for count, site in enumerate(drop):
        ax_row = site - sum(1 for d in drop[:count] if d < site)
        ndim_half = rho.ndim // 2
        rho = np.trace(rho, axis1=ax_row, axis2=ndim_half + ax_row)
    k = len(keep_sorted)
    rho = rho.reshape(2 ** k, 2 ** k)
    rho = 0.5 * (rho + rho.conj().T)
    return QuantumState(full_basis(k), rho, eig_tol=max(1e-6, state.eig_tol))


def subsystem_entropy(state: QuantumState, sites: set[int] | list[int]) -> float:
    """Von Neumann entropy (nats) of the reduced state on `sites`.

    Accepts mixed global states; for pure global states this equals the
    entanglement entropy of the bipartition.
    """
    red = partial_trace(state, sites)
    w = np.linalg.eigvalsh(red.data)
    w = w[w > ENTROPY_EIG_FLOOR]
    return float(-(w * np.log(w)).sum())


def entanglement_entropy(state: QuantumState, subsystem: set[int] | list[int]) -> float:
    """Entanglement entropy (nats) of a pure global state across a bipartition."""
    if not state.is_pure:
        raise ValueError("entanglement entropy requires a pure global state")
    return subsystem_entropy(state, subsystem)


def _psd_sqrt(rho: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    if w.min() < -tol:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w.min()})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def state_fidelity(a: QuantumState, b: QuantumState) -> float:
    """Uhlmann fidelity F = (Tr sqrt(sqrt(a) b sqrt(a)))^2, clipped to [0, 1]."""
    if a.basis.dim != b.basis.dim:
        raise ValueError("states live on different bases")
    ra, rb = a.density_matrix(), b.density_matrix()
    sq = _psd_sqrt(ra)
    m = sq @ rb @ sq
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    if w.min() < -1e-8:
        raise ValueError(f"inner fidelity matrix not PSD (min eigenvalue {w.min()})")
    w = np.clip(w, 0.0, None)
    # eigensolver noise of order eps*||m|| turns into sqrt-scale errors; floor it
    w[w < 1e-13 * max(w.max(), 1e-300)] = 0.0
    f = float(np.sqrt(w).sum() ** 2)
    if f > 1.0 + 1e-8:
        raise ValueError(f"fidelity {f} exceeds 1 beyond tolerance")
    return float(np.clip(f, 0.0, 1.0))
