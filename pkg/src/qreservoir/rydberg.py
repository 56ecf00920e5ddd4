"""Physical Hamiltonians and dissipators for arrays of driven two-level atoms:
van-der-Waals interaction matrices from geometry and species tags, the
spin-1/2 network Hamiltonian (sigma-z form), the atom-array Hamiltonian
(number-operator form), effective photon-scattering jump operators, and the
blockade-constrained kicked-ring Hamiltonian.

Units: rad/us and us throughout; quantities quoted in MHz are multiplied by
2 pi at the configuration boundary, not here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .basis import BasisKind, HilbertBasis
from .operators import (
    JumpOperator,
    HamiltonianProvider,
    SpinOperator,
    build_pauli,
    ground_projector,
    number_operator,
    site_transition,
)

TWO_PI = 2.0 * np.pi

# van der Waals coefficients, rad/us * um^6 (from 862.9 and -836.6 GHz um^6);
# the cross coefficient couples the two principal-quantum-number classes.
C6_SAME = TWO_PI * 862.9e3
C6_CROSS = -TWO_PI * 836.6e3

OMEGA_DEFAULT = TWO_PI * 4.2          # Rabi drive, rad/us
GAMMA_DEFAULT = TWO_PI / 20.0         # effective scattering rate, rad/us
ALPHA_DEFAULT = 0.05
BETA_DEFAULT = 0.16

SPECIES = ("r70", "r73")


@dataclass(frozen=True)
class RydbergGeometry:
    """Atom positions (um) with per-atom species tags.

    Optional Gaussian position jitter is applied once at construction from the
    provided generator; the unjittered coordinates remain available.
    """

    positions: np.ndarray
    species: tuple[str, ...] = ()
    jitter_sigma: float = 0.0
    base_positions: np.ndarray = field(init=False, repr=False)

    def __init__(self, positions, species=None, jitter_sigma: float = 0.0,
                 rng: np.random.Generator | None = None):
        pos = np.atleast_2d(np.asarray(positions, dtype=float))
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError("positions must be (n, 2) coordinates in um")
        n = pos.shape[0]
        if species is None:
            species = ("r70",) * n
        species = tuple(species)
        if len(species) != n:
            raise ValueError("one species tag per atom required")
        for s in species:
            if s not in SPECIES:
                raise ValueError(f"unknown species {s!r}; expected one of {SPECIES}")
        object.__setattr__(self, "base_positions", pos.copy())
        if jitter_sigma > 0:
            if rng is None:
                raise ValueError("jitter requires an explicit random generator")
            pos = pos + rng.normal(0.0, jitter_sigma, size=pos.shape)
        d = pos[:, None, :] - pos[None, :, :]
        r = np.sqrt((d ** 2).sum(-1))
        if np.any(r[np.triu_indices(n, 1)] <= 0):
            raise ValueError("atoms must sit at distinct positions")
        pos = pos.copy(); pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "species", species)
        object.__setattr__(self, "jitter_sigma", float(jitter_sigma))

    @property
    def n_atoms(self) -> int:
        return self.positions.shape[0]

    def distances(self) -> np.ndarray:
        d = self.positions[:, None, :] - self.positions[None, :, :]
        return np.sqrt((d ** 2).sum(-1))


def chain_geometry(n: int, spacing: float, inhibitory: tuple[int, ...] = (),
                   jitter_sigma: float = 0.0,
                   rng: np.random.Generator | None = None) -> RydbergGeometry:
    """Open 1D chain along x; `inhibitory` atoms carry the second species tag."""
    pos = np.stack([np.arange(n) * spacing, np.zeros(n)], axis=1)
    species = tuple("r73" if i in set(inhibitory) else "r70" for i in range(n))
    return RydbergGeometry(pos, species, jitter_sigma, rng)


def lattice_geometry(n_cols: int, n_rows: int, spacing: float,
                     jitter_sigma: float = 0.0,
                     rng: np.random.Generator | None = None) -> RydbergGeometry:
    """Open rectangular lattice, row-major atom order (top row first)."""
    pts = []
    for r in range(n_rows - 1, -1, -1):
        for c in range(n_cols):
            pts.append((c * spacing, r * spacing))
    return RydbergGeometry(np.asarray(pts), None, jitter_sigma, rng)


@dataclass(frozen=True)
class InteractionTable:
    """C6 coefficients in rad/us um^6; cross-species pairs attract."""

    c6_same: float = C6_SAME
    c6_cross: float = C6_CROSS

    def __post_init__(self):
        if self.c6_same <= 0 or self.c6_cross >= 0:
            raise ValueError("same-species C6 must be positive, cross-species negative")
        if abs(abs(self.c6_cross) - self.c6_same) > 0.05 * self.c6_same:
            raise ValueError("cross C6 should approximate -C6 within 5%")

    def coefficient(self, species_a: str, species_b: str) -> float:
        return self.c6_same if species_a == species_b else self.c6_cross


@dataclass(frozen=True)
class DriveProfile:
    """Piecewise-constant global Rabi drive and per-site detunings.

    Each segment is (start, end, omega, deltas) with deltas an (n,) vector in
    rad/us. Segments must be non-overlapping and cover [0, total_duration].
    """

    segments: tuple

    def __post_init__(self):
        segs = []
        for start, end, omega, deltas in self.segments:
            deltas = np.asarray(deltas, dtype=float)
            if end <= start:
                raise ValueError("segment end must exceed start")
            segs.append((float(start), float(end), float(omega), deltas))
        segs.sort(key=lambda s: s[0])
        for (a, b, _, _), (c, _, _, _) in zip(segs, segs[1:]):
            if b > c + 1e-12:
                raise ValueError("drive segments overlap")
        object.__setattr__(self, "segments", tuple(segs))

    @classmethod
    def constant(cls, omega: float, deltas, duration: float) -> "DriveProfile":
        return cls(((0.0, duration, omega, np.asarray(deltas, dtype=float)),))

    @property
    def total_duration(self) -> float:
        return self.segments[-1][1]

    @property
    def n_sites(self) -> int:
        return len(self.segments[0][3])


@dataclass(frozen=True)
class DissipationSpec:
    """Effective decay channel: rate gamma with branch amplitudes alpha
    (excited -> ground decay) and beta (ground-state scattering)."""

    gamma: float = GAMMA_DEFAULT
    alpha: float = ALPHA_DEFAULT
    beta: float = BETA_DEFAULT

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if not (0 <= self.alpha <= 1 and 0 <= self.beta <= 1):
            raise ValueError("alpha and beta must lie in [0, 1]")


def interaction_matrix(g: RydbergGeometry, t: InteractionTable | None = None) -> np.ndarray:
    """All-to-all couplings J_nm = C6(species_n, species_m) / R_nm^6 (rad/us)."""
    if t is None:
        t = InteractionTable()
    n = g.n_atoms
    r = g.distances()
    j = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            j[a, b] = j[b, a] = t.coefficient(g.species[a], g.species[b]) / r[a, b] ** 6
    return j


def _diag_operator(basis: HilbertBasis, diag: np.ndarray) -> SpinOperator:
    if basis.dim <= 256:
        return SpinOperator(basis, np.diag(diag).astype(complex), hermitian_hint=True)
    return SpinOperator(basis, sp.diags(diag).tocsr(), hermitian_hint=True)


def _pair_diag_sum(basis: HilbertBasis, j: np.ndarray, site_diags: list[np.ndarray]) -> SpinOperator:
    n = basis.n_sites
    diag = np.zeros(basis.dim)
    for a in range(n):
        for b in range(a + 1, n):
            if j[a, b] != 0.0:
                diag += j[a, b] * site_diags[a] * site_diags[b]
    return _diag_operator(basis, diag)


def _zz_sum(basis: HilbertBasis, j: np.ndarray) -> SpinOperator:
    zdiags = [2.0 * basis.site_occupation(i) - 1.0 for i in range(basis.n_sites)]
    return _pair_diag_sum(basis, j, zdiags)


def _nn_sum(basis: HilbertBasis, j: np.ndarray) -> SpinOperator:
    ndiags = [basis.site_occupation(i) for i in range(basis.n_sites)]
    return _pair_diag_sum(basis, j, ndiags)


def _segment_op(basis: HilbertBasis, interaction: SpinOperator, omega: float,
                deltas: np.ndarray, x_sum: SpinOperator,
                site_diag: list[np.ndarray], sign: float) -> SpinOperator:
    """sign * sum_n delta_n D_n + (omega/2) sum_n sx_n + interaction, where D is
    sigma-z (sign=-1) or n-hat (sign=+1)."""
    diag = np.zeros(basis.dim)
    for i, dlt in enumerate(deltas):
        if dlt != 0.0:
            diag += sign * dlt * site_diag[i]
    m = interaction.matrix + (omega / 2.0) * x_sum.matrix
    m = m + (np.diag(diag) if basis.dim <= 256 else sp.diags(diag))
    return SpinOperator(basis, m, hermitian_hint=True)


def build_qrnn_hamiltonian(j: np.ndarray, drive: DriveProfile,
                           basis: HilbertBasis) -> HamiltonianProvider:
    """H(t) = -sum_n Delta_n(t) sz_n + sum_{n<m} J_nm sz_n sz_m + (Omega(t)/2) sum_n sx_n.

    Pair sums count each pair once.
    """
    n = basis.n_sites
    if drive.n_sites != n:
        raise ValueError("drive profile size does not match basis")
    zz = _zz_sum(basis, np.asarray(j, dtype=float))
    x_sum = sum((build_pauli(basis, i, "x") for i in range(1, n)), build_pauli(basis, 0, "x"))
    zdiag = [2.0 * basis.site_occupation(i) - 1.0 for i in range(n)]
    segs = [(a, b, _segment_op(basis, zz, om, dl, x_sum, zdiag, sign=-1.0))
            for a, b, om, dl in drive.segments]
    return HamiltonianProvider(segs)


def build_rydberg_hamiltonian(g: RydbergGeometry, t: InteractionTable | None,
                              drive: DriveProfile, basis: HilbertBasis) -> HamiltonianProvider:
    """H(t) = sum_n Delta_n(t) nhat_n + (Omega(t)/2) sum_n sx_n
    + sum_{n<m} (C6 / R_nm^6) nhat_n nhat_m."""
    n = basis.n_sites
    if g.n_atoms != n or drive.n_sites != n:
        raise ValueError("geometry, drive, and basis sizes must agree")
    j = interaction_matrix(g, t)
    nn = _nn_sum(basis, j)
    x_sum = sum((build_pauli(basis, i, "x") for i in range(1, n)), build_pauli(basis, 0, "x"))
    ndiag = [basis.site_occupation(i) for i in range(n)]
    segs = [(a, b, _segment_op(basis, nn, om, dl, x_sum, ndiag, sign=+1.0))
            for a, b, om, dl in drive.segments]
    return HamiltonianProvider(segs)


def dissipation_channels_2x2(d: DissipationSpec, split_channels: bool = True) -> list[np.ndarray]:
    """Single-site jump matrices (basis order g, r) with sqrt(rate) embedded.

    split_channels=True returns two independent channels per site,
    sqrt(gamma) alpha |g><r| (decay) and sqrt(gamma) beta |g><g| (ground-state
    scattering); False returns the single composite operator
    sqrt(gamma) |g>(alpha <r| + beta <g|). The composite form supports a dark
    state (a coherent-population-trapping superposition), so its excited-state
    population does not decay purely exponentially; the split form does and is
    the package default.
    """
    sg = np.sqrt(d.gamma)
    if split_channels:
        out = []
        if d.alpha > 0:
            out.append(sg * d.alpha * np.array([[0, 1], [0, 0]], dtype=complex))
        if d.beta > 0:
            out.append(sg * d.beta * np.array([[1, 0], [0, 0]], dtype=complex))
        return out
    return [sg * np.array([[d.beta, d.alpha], [0, 0]], dtype=complex)]


def effective_jumps(basis: HilbertBasis, d: DissipationSpec,
                    split_channels: bool = True) -> list[JumpOperator]:
    """Per-site effective decay channels embedded in the many-body basis."""
    if d.gamma == 0:
        return []
    out = []
    sg = np.sqrt(d.gamma)
    for site in range(basis.n_sites):
        if split_channels:
            if d.alpha > 0:
                out.append(JumpOperator(sg * d.alpha * site_transition(basis, site, 0, 1)))
            if d.beta > 0:
                out.append(JumpOperator(sg * d.beta * site_transition(basis, site, 0, 0)))
        else:
            comp = (d.alpha * site_transition(basis, site, 0, 1)
                    + d.beta * site_transition(basis, site, 0, 0))
            out.append(JumpOperator(sg * comp))
    return out


def pxp_hamiltonian(basis: HilbertBasis, omega: float) -> SpinOperator:
    """Blockade-constrained ring Hamiltonian Omega sum_n P_{n-1} sx_n P_{n+1}.

    Within the ring-blockaded basis the site flip is admissible exactly when
    both neighbors are in the ground state, so the projected sx matrix already
    carries the P factors.
    """
    if basis.kind != BasisKind.BLOCKADED_RING:
        raise ValueError("PXP Hamiltonian requires a blockaded ring basis")
    n = basis.n_sites
    h = sum((build_pauli(basis, i, "x") for i in range(1, n)), build_pauli(basis, 0, "x"))
    return omega * h
