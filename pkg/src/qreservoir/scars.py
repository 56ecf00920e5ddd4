"""Kicked blockaded-ring dynamics: the half-cycle operator chi, noisy kick
cycles, fidelity-revival runs, the noise-averaged effective generator, kernel
counting, and empirical steady-state preparation.

The drive between kicks is the blockade-projected Rabi term with the standard
(Omega/2) prefactor, i.e. chi = exp(-i pi N) exp(-i tau (Omega/2) sum P sx P).
With Omega normalized to 1 and tau = 1.51 pi this operator approximately
exchanges the two alternating (Neel) configurations; because exp(-i pi N)
anticommutes with the drive, chi is Hermitian and chi^2 = 1 exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import BasisKind, HilbertBasis
from .operators import SpinOperator, total_number
from .quantum_info import state_fidelity, subsystem_entropy
from .rydberg import pxp_hamiltonian
from .states import QuantumState, basis_state
from .superop import SuperOperator, unvec, vec

TAU_DEFAULT = 1.51 * np.pi
KERNEL_TOL_DEFAULT = 1e-9


@dataclass(frozen=True)
class KickSchedule:
    """Kick period, kick-angle error statistics, and cycle count.

    Kick angles are theta_k = pi + eps_k with eps_k ~ N(eps_mean, eps_std^2).
    """

    tau: float = TAU_DEFAULT
    eps_mean: float = 0.0
    eps_std: float = 0.0
    n_cycles: int = 0

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.n_cycles < 0:
            raise ValueError("n_cycles must be nonnegative")
        if self.eps_std < 0:
            raise ValueError("eps_std must be nonnegative")


def chi_tau(basis: HilbertBasis, tau: float = TAU_DEFAULT, omega: float = 1.0) -> SpinOperator:
    """Half-cycle operator exp(-i pi N) exp(-i tau (omega/2) H_PXP(1))."""
    if basis.kind != BasisKind.BLOCKADED_RING:
        raise ValueError("chi_tau requires a blockaded ring basis")
    h = pxp_hamiltonian(basis, omega / 2.0)
    w, v = np.linalg.eigh(h.dense())
    u = (v * np.exp(-1j * tau * w)) @ v.conj().T
    kick = np.exp(-1j * np.pi * basis.occupation_numbers())
    return SpinOperator(basis, kick[:, None] * u, hermitian_hint=False)


def _number_diag(basis: HilbertBasis) -> np.ndarray:
    return basis.occupation_numbers()


def noisy_cycle(state: QuantumState, tau: float, eps1: float, eps2: float,
                chi: SpinOperator | None = None) -> QuantumState:
    """One full cycle exp(-i eps2 N) chi exp(-i eps1 N) chi applied to a state."""
    basis = state.basis
    if chi is None:
        chi = chi_tau(basis, tau)
    cm = chi.dense()
    nd = _number_diag(basis)
    k1 = np.exp(-1j * eps1 * nd)
    k2 = np.exp(-1j * eps2 * nd)
    if state.is_pure:
        psi = k2 * (cm @ (k1 * (cm @ state.data)))
        psi = psi / np.linalg.norm(psi)
        return QuantumState(basis, psi)
    u = (k2[:, None] * cm) @ (k1[:, None] * cm)
    return QuantumState(basis, u @ state.data @ u.conj().T)


def cycle_unitary(basis: HilbertBasis, tau: float, eps1: float, eps2: float,
                  chi: SpinOperator | None = None) -> np.ndarray:
    if chi is None:
        chi = chi_tau(basis, tau)
    cm = chi.dense()
    nd = _number_diag(basis)
    return (np.exp(-1j * eps2 * nd)[:, None] * cm) @ (np.exp(-1j * eps1 * nd)[:, None] * cm)


@dataclass
class KickedRun:
    """Per-cycle record of a noisy kicked evolution (cycle 0 = initial state)."""

    fidelities: np.ndarray          # (n_cycles + 1,)
    populations: np.ndarray         # (n_cycles + 1, 2): (P_g, P_r) of site 0
    entropies: np.ndarray           # (n_cycles + 1,) von Neumann entropy of site 0
    states: list = field(default_factory=list)
    kick_errors: np.ndarray | None = None


def run_kicked(state0: QuantumState, schedule: KickSchedule,
               rng: np.random.Generator, keep_states: bool = False,
               chi: SpinOperator | None = None) -> KickedRun:
    """Apply n_cycles noisy cycles with fresh eps per kick; record the return
    fidelity, site-0 populations, and site-0 entanglement entropy per cycle."""
    basis = state0.basis
    if chi is None:
        chi = chi_tau(basis, schedule.tau)
    cm = chi.dense()
    nd = _number_diag(basis)
    n = schedule.n_cycles
    eps = rng.normal(schedule.eps_mean, schedule.eps_std, size=(n, 2)) \
        if schedule.eps_std > 0 else np.full((n, 2), schedule.eps_mean)

    psi0 = state0.data.astype(complex)
    psi = psi0.copy()
    fids = np.empty(n + 1)
    pops = np.empty((n + 1, 2))
    ents = np.empty(n + 1)
    states: list[QuantumState] = []
    p_r_diag = basis.site_occupation(0)

    def record(k, ps):
        fids[k] = abs(np.vdot(psi0, ps)) ** 2
        pr = float((p_r_diag * np.abs(ps) ** 2).sum())
        pops[k] = (1.0 - pr, pr)
        ents[k] = subsystem_entropy(QuantumState(basis, ps), {0})
        if keep_states:
            states.append(QuantumState(basis, ps))

    record(0, psi)
    for k in range(n):
        psi = cm @ psi
        psi = np.exp(-1j * eps[k, 0] * nd) * psi
        psi = cm @ psi
        psi = np.exp(-1j * eps[k, 1] * nd) * psi
        psi = psi / np.linalg.norm(psi)
        record(k + 1, psi)
    return KickedRun(fids, pops, ents, states, eps)


@dataclass(frozen=True)
class EffectiveGenerator:
    """Noise-averaged generator of the kicked dynamics with its Hermitian
    building blocks H+ = N + chi N chi and H- = N - chi N chi."""

    superop: SuperOperator
    h_plus: SpinOperator
    h_minus: SpinOperator
    tau: float
    eps: float
    sigma: float

    @property
    def basis(self) -> HilbertBasis:
        return self.superop.basis

    def scale(self) -> float:
        """Magnitude scale of the generator: max |matrix entry|."""
        return float(np.abs(self.superop.matrix).max())

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return self.superop.apply(rho)


def effective_lindbladian(basis: HilbertBasis, tau: float, eps: float, sigma: float,
                          chi: SpinOperator | None = None) -> EffectiveGenerator:
    """Build L(rho) = -i (eps/2tau) [H+, rho]
    + (sigma^2/2tau) (D+(rho) + D-(rho)), D+-(X) = H X H - 1/2 {H H, X}."""
    if chi is None:
        chi = chi_tau(basis, tau)
    cm = chi.dense()
    nmat = np.diag(_number_diag(basis)).astype(complex)
    b = cm @ nmat @ cm
    hp = nmat + b
    hm = nmat - b
    herm = max(np.abs(hp - hp.conj().T).max(), np.abs(hm - hm.conj().T).max())
    if herm > 1e-10:
        raise ValueError(f"H+- lost Hermiticity ({herm})")
    hp = 0.5 * (hp + hp.conj().T)
    hm = 0.5 * (hm + hm.conj().T)
    d = basis.dim
    eye = np.eye(d)

    def lmul(a):
        return np.kron(eye, a)

    def rmul(a):
        return np.kron(a.T, eye)

    def dissipator(hx):
        h2 = hx @ hx
        return np.kron(hx.T, hx) - 0.5 * (lmul(h2) + rmul(h2))

    mat = -1j * (eps / (2.0 * tau)) * (lmul(hp) - rmul(hp))
    mat = mat + (sigma ** 2 / (2.0 * tau)) * (dissipator(hp) + dissipator(hm))
    return EffectiveGenerator(
        SuperOperator(basis, mat),
        SpinOperator(basis, hp, hermitian_hint=True),
        SpinOperator(basis, hm, hermitian_hint=True),
        tau, eps, sigma,
    )


def kernel_count(g: EffectiveGenerator, tol: float = KERNEL_TOL_DEFAULT):
    """Number of zero eigenvalues of the generator, |lambda| < tol * scale,
    with scale = max |superoperator entry|. Returns (count, kernel matrices)."""
    d = g.basis.dim
    scale = g.scale()
    if scale == 0.0:
        eye = np.eye(d * d)
        return d * d, [unvec(eye[:, i], d) for i in range(d * d)]
    lam, v = np.linalg.eig(g.superop.matrix)
    idx = np.where(np.abs(lam) < tol * scale)[0]
    return len(idx), [unvec(v[:, i], d) for i in idx]


@dataclass
class SteadyStateResult:
    initial_configs: list
    steady_states: list
    residuals: np.ndarray
    fidelity_matrix: np.ndarray
    representatives: list          # indices of cluster representatives
    labels: np.ndarray             # cluster index per initial config

    @property
    def n_memories(self) -> int:
        return len(self.representatives)


def empirical_steady_states(
    basis: HilbertBasis,
    schedule: KickSchedule,
    t_ss_cycles: int,
    fidelity_threshold: float = 0.99,
    stationarity_tol: float = 1e-6,
    max_doublings: int = 0,
) -> SteadyStateResult:
    """Evolve every blockade-admissible configuration projector under the
    effective generator for t_ss_cycles * 2 tau, then cluster the resulting
    states by pairwise fidelity (distinct below `fidelity_threshold`).

    If max_doublings > 0, the time is doubled until all stationarity residuals
    ||L(rho)||_max fall below `stationarity_tol` (or the budget is exhausted).
    """
    gen = effective_lindbladian(basis, schedule.tau, schedule.eps_mean, schedule.eps_std)
    lam, v = np.linalg.eig(gen.superop.matrix)
    vinv = np.linalg.inv(v)
    d = basis.dim
    t_total = t_ss_cycles * 2.0 * schedule.tau

    def propagate_all(t):
        rhos, residuals = [], []
        for config in basis.states:
            e = np.zeros(d, dtype=complex)
            e[basis.index_of(config)] = 1.0
            r0 = vec(np.outer(e, e.conj()))
            rt = v @ (np.exp(lam * t) * (vinv @ r0))
            rho = unvec(rt, d)
            rho = 0.5 * (rho + rho.conj().T)
            rho = rho / np.trace(rho).real
            rhos.append(rho)
            residuals.append(float(np.abs(gen.apply(rho)).max()))
        return rhos, np.asarray(residuals)

    rhos, residuals = propagate_all(t_total)
    for _ in range(max_doublings):
        if residuals.max() < stationarity_tol:
            break
        t_total *= 2.0
        rhos, residuals = propagate_all(t_total)

    nstates = len(rhos)
    states = [QuantumState(basis, r, eig_tol=1e-6) for r in rhos]
    fid = np.eye(nstates)
    for i in range(nstates):
        for j in range(i + 1, nstates):
            fid[i, j] = fid[j, i] = state_fidelity(states[i], states[j])

    reps: list[int] = []
    labels = np.empty(nstates, dtype=int)
    for i in range(nstates):
        for ci, r in enumerate(reps):
            if fid[i, r] >= fidelity_threshold:
                labels[i] = ci
                break
        else:
            labels[i] = len(reps)
            reps.append(i)
    return SteadyStateResult(list(basis.states), states, residuals, fid, reps, labels)
