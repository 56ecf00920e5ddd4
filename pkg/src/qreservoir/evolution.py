"""Time evolution: exact eigendecomposition paths, fixed-step RK4 integrators
for the Schroedinger and Lindblad equations, and a split-step engine for
piecewise-constant dissipative dynamics.

Units: hbar = 1, rates in rad/us, times in us. Default fixed step dt = 1e-3 us.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import ToleranceError
from .operators import HamiltonianProvider, JumpOperator, SpinOperator, as_provider
from .states import QuantumState

DEFAULT_DT = 1e-3
EIG_PATH_DIM_MAX = 1024
TRACE_ABORT = 1e-5
TRACE_SOFT = 1e-7
POSITIVITY_ABORT = 1e-5


def _check_hermitian(op: SpinOperator):
    if op.hermitian_hint:
        return
    m = op.dense() if op.dim <= 2048 else None
    if m is None:
        return
    err = np.abs(m - m.conj().T).max()
    if err > 1e-10:
        raise ValueError(f"Hamiltonian is non-Hermitian (||H - H^dag||_max = {err})")


class UnitaryPropagator:
    """exp(-i H t) for a fixed Hermitian H, reusable over many times/states."""

    def __init__(self, h: SpinOperator):
        _check_hermitian(h)
        self.basis = h.basis
        self._w, self._v = np.linalg.eigh(h.dense())

    def matrix(self, t: float) -> np.ndarray:
        return (self._v * np.exp(-1j * self._w * t)) @ self._v.conj().T

    def apply(self, psi: np.ndarray, t: float) -> np.ndarray:
        c = self._v.conj().T @ psi
        return self._v @ (np.exp(-1j * self._w * t) * c)


def evolve_unitary(
    state: QuantumState,
    h,
    duration: float,
    dt: float = DEFAULT_DT,
    diagnostics: dict | None = None,
) -> QuantumState:
    """Integrate i dpsi/dt = H(t) psi over `duration`.

    Time-independent dense Hamiltonians of dimension <= 1024 use an exact
    eigendecomposition; otherwise fixed-step RK4 with per-step renormalization.
    """
    if not state.is_pure:
        raise ValueError("evolve_unitary expects a pure state")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if duration < 0:
        raise ValueError("duration must be nonnegative")
    provider = as_provider(h)
    if duration == 0:
        return state
    if dt >= duration and not provider.is_static:
        raise ValueError("dt must be smaller than the evolution duration")

    if provider.is_static:
        op = provider.static_operator()
        if op.dim <= EIG_PATH_DIM_MAX:
            prop = UnitaryPropagator(op)
            return QuantumState(state.basis, prop.apply(state.data.astype(complex), duration))

    psi = state.data.astype(complex).copy()
    max_drift = 0.0
    for a, b, op in provider.segments(0.0, duration):
        _check_hermitian(op)
        m = op.matrix
        nsteps = max(1, int(np.ceil((b - a) / dt - 1e-12)))
        step = (b - a) / nsteps
        for _ in range(nsteps):
            k1 = -1j * (m @ psi)
            k2 = -1j * (m @ (psi + 0.5 * step * k1))
            k3 = -1j * (m @ (psi + 0.5 * step * k2))
            k4 = -1j * (m @ (psi + step * k3))
            psi = psi + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            nrm = np.linalg.norm(psi)
            max_drift = max(max_drift, abs(nrm - 1.0))
            psi /= nrm
    if diagnostics is not None:
        diagnostics["max_norm_drift"] = max_drift
    return QuantumState(state.basis, psi)


def _lindblad_rhs(rho, hm, jump_mats, kdag):
    out = -1j * (hm @ rho - rho @ hm)
    for lm in jump_mats:
        out += lm @ rho @ lm.conj().T
    out -= 0.5 * (kdag @ rho + rho @ kdag)
    return out


def evolve_lindblad(
    state: QuantumState,
    h,
    jumps: list[JumpOperator],
    duration: float,
    dt: float = DEFAULT_DT,
    diagnostics: dict | None = None,
    positivity_check: bool = True,
) -> QuantumState:
    """Integrate the GKLS master equation with fixed-step RK4.

    The density matrix is re-Hermitized each step. Trace drift beyond 1e-5
    aborts (step too large); positivity is monitored at the end of the run,
    not enforced.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if duration < 0:
        raise ValueError("duration must be nonnegative")
    provider = as_provider(h)
    st = state.to_mixed()
    for j in jumps:
        if j.basis.dim != st.basis.dim:
            raise ValueError("jump operator dimension mismatch")
    rho = st.data.astype(complex).copy()
    if duration == 0:
        return st

    jump_mats = [j.dense() for j in jumps]
    kdag = np.zeros_like(rho)
    for lm in jump_mats:
        kdag = kdag + lm.conj().T @ lm

    max_trace_drift = 0.0
    for a, b, op in provider.segments(0.0, duration):
        _check_hermitian(op)
        hm = op.dense()
        nsteps = max(1, int(np.ceil((b - a) / dt - 1e-12)))
        step = (b - a) / nsteps
        for _ in range(nsteps):
            k1 = _lindblad_rhs(rho, hm, jump_mats, kdag)
            k2 = _lindblad_rhs(rho + 0.5 * step * k1, hm, jump_mats, kdag)
            k3 = _lindblad_rhs(rho + 0.5 * step * k2, hm, jump_mats, kdag)
            k4 = _lindblad_rhs(rho + step * k3, hm, jump_mats, kdag)
            rho = rho + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            rho = 0.5 * (rho + rho.conj().T)
            drift = abs(float(np.trace(rho).real) - 1.0)
            max_trace_drift = max(max_trace_drift, drift)
            if drift > TRACE_ABORT:
                raise ToleranceError(
                    f"trace drift {drift:.2e} exceeds {TRACE_ABORT}; decrease dt"
                )
    if positivity_check:
        wmin = float(np.linalg.eigvalsh(rho).min())
        if wmin < -POSITIVITY_ABORT:
            raise ToleranceError(
                f"positivity violation {wmin:.2e} beyond {POSITIVITY_ABORT}; decrease dt"
            )
        if diagnostics is not None:
            diagnostics["min_eigenvalue"] = wmin
    if diagnostics is not None:
        diagnostics["max_trace_drift"] = max_trace_drift
    return QuantumState(st.basis, rho, eig_tol=1e-6)


def lindblad_rhs_matrix(rho: np.ndarray, h: SpinOperator, jumps: list[JumpOperator]) -> np.ndarray:
    """Direct generator action L(rho) for a constant Hamiltonian (oracle use)."""
    hm = h.dense()
    jump_mats = [j.dense() for j in jumps]
    kdag = np.zeros_like(hm)
    for lm in jump_mats:
        kdag = kdag + lm.conj().T @ lm
    return _lindblad_rhs(np.asarray(rho, dtype=complex), hm, jump_mats, kdag)


def lindblad_rk4_batch(
    rhos: np.ndarray,
    h: SpinOperator,
    jumps: list[JumpOperator],
    duration: float,
    dt: float = DEFAULT_DT,
) -> np.ndarray:
    """RK4-evolve a stack of density matrices (B, d, d) under a constant H."""
    _check_hermitian(h)
    hm = h.dense()
    jump_mats = [j.dense() for j in jumps]
    kdag = np.zeros_like(hm)
    for lm in jump_mats:
        kdag = kdag + lm.conj().T @ lm

    def rhs(r):
        out = -1j * (hm @ r - r @ hm)
        for lm in jump_mats:
            out += lm @ r @ lm.conj().T
        out -= 0.5 * (kdag @ r + r @ kdag)
        return out

    rho = np.asarray(rhos, dtype=complex).copy()
    nsteps = max(1, int(np.ceil(duration / dt - 1e-12)))
    step = duration / nsteps
    for _ in range(nsteps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * step * k1)
        k3 = rhs(rho + 0.5 * step * k2)
        k4 = rhs(rho + step * k3)
        rho = rho + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))
        tr = np.trace(rho, axis1=-2, axis2=-1).real
        if np.abs(tr - 1.0).max() > TRACE_ABORT:
            raise ToleranceError("trace drift in batched Lindblad evolution; decrease dt")
    return rho


class SiteChannelSet:
    """Per-site dissipative channels given as 2x2 jump matrices with embedded
    sqrt(rate), applied exactly as single-site channel exponentials."""

    def __init__(self, n_sites: int, site_jumps: dict[int, list[np.ndarray]]):
        self.n_sites = n_sites
        self.site_jumps = {s: [np.asarray(m, dtype=complex) for m in ms]
                           for s, ms in site_jumps.items()}

    def generator_4x4(self, site: int) -> np.ndarray:
        """Single-site Lindblad generator as a 4x4 superoperator (column stacking)."""
        g = np.zeros((4, 4), dtype=complex)
        i2 = np.eye(2)
        for lm in self.site_jumps.get(site, []):
            ldl = lm.conj().T @ lm
            g += np.kron(lm.conj(), lm) - 0.5 * (np.kron(i2, ldl) + np.kron(ldl.T, i2))
        return g

    def channel_tensors(self, dt: float) -> dict[int, np.ndarray]:
        """exp(dt * generator) per site, reshaped to (2, 2, 2, 2) as [a', b', a, b]."""
        out = {}
        for site in self.site_jumps:
            e = sla.expm(dt * self.generator_4x4(site))
            # column-stacked vec index = a + 2*b, so reshape axes are (b, a); want [a', b', a, b]
            out[site] = e.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2)
        return out


def apply_site_channel(rho: np.ndarray, site: int, chan: np.ndarray, n_sites: int) -> np.ndarray:
    """Apply a (2,2,2,2) single-site channel tensor to site `site` of rho."""
    d = rho.shape[0]
    dl = 1 << site
    dr = 1 << (n_sites - 1 - site)
    r6 = rho.reshape(dl, 2, dr, dl, 2, dr).transpose(1, 4, 0, 2, 3, 5).reshape(4, -1)
    out = chan.reshape(4, 4) @ r6
    return out.reshape(2, 2, dl, dr, dl, dr).transpose(2, 0, 3, 4, 1, 5).reshape(d, d)


class SplitStepLindblad:
    """Strang split-step propagator for a constant Hamiltonian plus weak
    per-site dissipation: exact unitary substeps (via eigendecomposition of H)
    interleaved with exact single-site channel half-steps.

    Accuracy is second order in dt times the dissipator/Hamiltonian commutator;
    validated against RK4 in the test suite. Intended for task workloads where
    the Hamiltonian norm makes RK4 steps prohibitively small.
    """

    def __init__(self, h: SpinOperator, channels: SiteChannelSet, dt: float):
        _check_hermitian(h)
        self.dt = dt
        self.n_sites = channels.n_sites
        self._w, self._v = np.linalg.eigh(h.dense())
        self._u = (self._v * np.exp(-1j * self._w * dt)) @ self._v.conj().T
        self._chans_half = channels.channel_tensors(dt / 2.0)
        self._channels = channels

    def _unitary(self, rho: np.ndarray, u: np.ndarray) -> np.ndarray:
        return u @ rho @ u.conj().T

    def _dissipate(self, rho: np.ndarray, chans) -> np.ndarray:
        for site, chan in chans.items():
            rho = apply_site_channel(rho, site, chan, self.n_sites)
        return rho

    def evolve(self, rho: np.ndarray, duration: float, record=None, record_every: int = 1):
        """Evolve for `duration`; optionally call `record(t, rho)` along the way.

        The duration is split into whole dt steps plus one exact partial step.
        """
        rho = np.asarray(rho, dtype=complex).copy()
        nfull = int(np.floor(duration / self.dt + 1e-12))
        rem = duration - nfull * self.dt
        t = 0.0
        if record is not None:
            record(t, rho)
        for k in range(nfull):
            rho = self._dissipate(rho, self._chans_half)
            rho = self._unitary(rho, self._u)
            rho = self._dissipate(rho, self._chans_half)
            t += self.dt
            if record is not None and (k + 1) % record_every == 0:
                record(t, rho)
        if rem > 1e-12:
            upart = (self._v * np.exp(-1j * self._w * rem)) @ self._v.conj().T
            half = self._channels.channel_tensors(rem / 2.0)
            rho = self._dissipate(rho, half)
            rho = self._unitary(rho, upart)
            rho = self._dissipate(rho, half)
            t += rem
            if record is not None:
                record(t, rho)
        return rho

    def _adjoint_half(self, op: np.ndarray) -> np.ndarray:
        """Heisenberg-picture half channel: Tr(O D_half(rho)) = Tr(O' rho)."""
        out = op.astype(complex)
        for site, chan in self._chans_half.items():
            adj = chan.reshape(4, 4).conj().T.reshape(2, 2, 2, 2)
            out = apply_site_channel(out, site, adj, self.n_sites)
        return out

    def trajectory_observables(self, rho: np.ndarray, duration: float,
                               observables: list[np.ndarray]):
        """Expectation values of `observables` after every whole step.

        Uses the merged-half-step form of the Strang composition,
        D_h (U D_f)^(k-1) U D_h, with the trailing half channel folded into the
        observables (exact identity, no extra cost). Returns (times, values)
        with values of shape (n_steps + 1, n_observables); the trajectory ends
        at the last whole step not exceeding `duration`.
        """
        rho = np.asarray(rho, dtype=complex).copy()
        nsteps = int(np.floor(duration / self.dt + 1e-9))
        obs_adj = [self._adjoint_half(o) for o in observables]
        times = np.arange(nsteps + 1) * self.dt
        vals = np.empty((nsteps + 1, len(observables)))
        vals[0] = [float(np.sum(o * rho.T).real) for o in observables]
        if nsteps == 0:
            return times, vals
        full = self._channels.channel_tensors(self.dt)
        rho = self._dissipate(rho, self._chans_half)
        for k in range(1, nsteps + 1):
            rho = self._unitary(rho, self._u)
            vals[k] = [float(np.sum(o * rho.T).real) for o in obs_adj]
            if k < nsteps:
                rho = self._dissipate(rho, full)
        return times, vals
