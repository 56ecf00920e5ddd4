"""Propagation engines shared by the experiment drivers.

Two regimes: short stimulus segments with sample-specific Hamiltonians use the
split-step integrator; long constant-Hamiltonian segments (relaxation, delays)
use a one-time eigendecomposition of the Lindblad superoperator so that
arbitrary evolution times cost one mode-space multiply per sample.
"""

from __future__ import annotations

import numpy as np

from ..errors import ToleranceError
from ..evolution import SiteChannelSet, SplitStepLindblad
from ..operators import JumpOperator, SpinOperator
from ..rydberg import DissipationSpec, dissipation_channels_2x2, effective_jumps
from ..superop import liouvillian, vec


def site_channel_set(n_sites: int, spec: DissipationSpec,
                     split_channels: bool = True) -> SiteChannelSet:
    mats = dissipation_channels_2x2(spec, split_channels) if spec.gamma > 0 else []
    return SiteChannelSet(n_sites, {i: list(mats) for i in range(n_sites)} if mats else {})


class FreeFlightEngine:
    """Spectral Lindblad propagator for one constant Hamiltonian.

    Computes L = -i[H, .] + dissipators once, eigendecomposes it, and then
    evolves vectorized density matrices to arbitrary times via the mode basis.
    A reconstruction residual above tolerance raises (defective or
    ill-conditioned eigenbasis would silently corrupt results).
    """

    def __init__(self, h: SpinOperator, jumps: list[JumpOperator],
                 validate_tol: float = 1e-8):
        self.basis = h.basis
        d = self.basis.dim
        lsup = liouvillian(h, jumps, basis=self.basis).matrix if jumps else \
            liouvillian(h, [], basis=self.basis).matrix
        self.dim2 = d * d
        self.lam, self.v = np.linalg.eig(lsup)
        self.vinv = np.linalg.inv(self.v)
        # spot-check the spectral reconstruction on random vectors
        rng = np.random.default_rng(0)
        x = rng.normal(size=(self.dim2, 2)) + 1j * rng.normal(size=(self.dim2, 2))
        resid = np.abs(self.v @ (self.lam[:, None] * (self.vinv @ x)) - lsup @ x).max()
        scale = max(np.abs(lsup).max(), 1e-300)
        if resid > validate_tol * scale * self.dim2:
            raise ToleranceError(
                f"superoperator eigenbasis reconstruction residual {resid:.2e} "
                "exceeds tolerance; eigendecomposition unreliable"
            )
        del lsup

    def to_modes(self, vecs: np.ndarray) -> np.ndarray:
        """vecs: (D,) or (D, B) vectorized density matrices -> mode amplitudes."""
        return self.vinv @ vecs

    def from_modes(self, modes: np.ndarray) -> np.ndarray:
        return self.v @ modes

    def evolve_modes(self, modes: np.ndarray, times) -> np.ndarray:
        """Multiply mode amplitudes by exp(lambda * t); times scalar or (B,)."""
        t = np.asarray(times, dtype=float)
        if t.ndim == 0:
            e = np.exp(self.lam * float(t))
            return modes * (e[:, None] if modes.ndim == 2 else e)
        if modes.ndim != 2 or modes.shape[1] != t.size:
            raise ValueError("per-column times require matching batch size")
        return modes * np.exp(np.outer(self.lam, t))

    def evolve(self, vecs: np.ndarray, times) -> np.ndarray:
        return self.from_modes(self.evolve_modes(self.to_modes(vecs), times))

    def observable_row(self, op_dense: np.ndarray) -> np.ndarray:
        """Row r with Tr(O rho(t)) = r @ (exp(lam t) * modes) for one sample."""
        w = vec(op_dense.conj().T).conj()
        return w @ self.v


def stimulus_propagator(h: SpinOperator, channels: SiteChannelSet,
                        dt: float) -> SplitStepLindblad:
    return SplitStepLindblad(h, channels, dt)


def sigma_y_observables(basis, sites) -> list[np.ndarray]:
    from ..operators import build_pauli
    return [build_pauli(basis, s, "y").dense() for s in sites]
