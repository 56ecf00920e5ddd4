"""Operators on spin bases: Pauli/number/projector builders, jump operators,
expectation values, and piecewise-constant time-dependent Hamiltonians.

Storage convention: dense ndarray for dimension <= 256, scipy CSR above.
Single-site basis order is (g, r), so sigma^z = diag(-1, +1) and
sigma^y = [[0, i], [-i, 0]] (i.e. i|g><r| - i|r><g|).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .basis import HilbertBasis, bit_at

DENSE_DIM_MAX = 256
HERM_TOL = 1e-10


def _as_matrix(m, dim: int):
    if sp.issparse(m):
        return m.tocsr()
    arr = np.asarray(m, dtype=complex)
    if arr.shape != (dim, dim):
        raise ValueError(f"operator shape {arr.shape} does not match basis dim {dim}")
    return arr


@dataclass(frozen=True)
class SpinOperator:
    """A (possibly sparse) complex matrix acting on a declared basis."""

    basis: HilbertBasis
    matrix: object  # ndarray or scipy sparse
    hermitian_hint: bool = False

    def __post_init__(self):
        m = _as_matrix(self.matrix, self.basis.dim)
        if m.shape[0] != m.shape[1] or m.shape[0] != self.basis.dim:
            raise ValueError("operator must be square and match the basis dimension")
        if self.hermitian_hint:
            delta = m - m.conj().T
            err = np.abs(delta.toarray() if sp.issparse(delta) else delta).max()
            if err > HERM_TOL:
                raise ValueError(f"hermitian_hint set but ||A - A^dag||_max = {err}")
        if isinstance(m, np.ndarray):
            m = m.copy()
            m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def is_dense(self) -> bool:
        return isinstance(self.matrix, np.ndarray)

    def dense(self) -> np.ndarray:
        return self.matrix if self.is_dense else self.matrix.toarray()

    def csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.matrix)

    def dagger(self) -> "SpinOperator":
        m = self.matrix.conj().T if self.is_dense else self.matrix.conjugate().T
        return SpinOperator(self.basis, m, self.hermitian_hint)

    def __add__(self, other: "SpinOperator") -> "SpinOperator":
        self._check(other)
        return SpinOperator(self.basis, self.matrix + other.matrix,
                            self.hermitian_hint and other.hermitian_hint)

    def __sub__(self, other: "SpinOperator") -> "SpinOperator":
        self._check(other)
        return SpinOperator(self.basis, self.matrix - other.matrix,
                            self.hermitian_hint and other.hermitian_hint)

    def __mul__(self, scalar: complex) -> "SpinOperator":
        herm = self.hermitian_hint and abs(complex(scalar).imag) == 0.0
        return SpinOperator(self.basis, self.matrix * scalar, herm)

    __rmul__ = __mul__

    def __matmul__(self, other: "SpinOperator") -> "SpinOperator":
        self._check(other)
        return SpinOperator(self.basis, self.matrix @ other.matrix, False)

    def _check(self, other: "SpinOperator"):
        if other.basis is not self.basis and other.basis != self.basis:
            raise ValueError("operators act on different bases")


def _storage(mat: np.ndarray, dim: int):
    if dim > DENSE_DIM_MAX:
        return sp.csr_matrix(mat)
    return mat


def build_pauli(basis: HilbertBasis, site: int, axis: str) -> SpinOperator:
    """Single-site Pauli operator in the given basis.

    On blockade-constrained bases, x/y are the blockade-projected matrix
    elements (transitions leaving the constrained space are dropped).
    """
    n = basis.n_sites
    if not 0 <= site < n:
        raise IndexError(f"site {site} out of range for {n} sites")
    d = basis.dim
    if axis == "z":
        diag = 2.0 * basis.site_occupation(site) - 1.0
        mat = sp.diags(diag).tocsr() if d > DENSE_DIM_MAX else np.diag(diag).astype(complex)
        return SpinOperator(basis, mat, hermitian_hint=True)
    if axis not in ("x", "y"):
        raise ValueError("axis must be one of 'x', 'y', 'z'")

    mask = 1 << (n - 1 - site)
    rows, cols, vals = [], [], []
    for i, s in enumerate(basis.states):
        s2 = s ^ mask
        if not basis.contains(s2):
            continue  # blockade-projected element vanishes
        j = basis.index_of(s2)
        if axis == "x":
            v = 1.0 + 0j
        else:
            # sigma^y = i|g><r| - i|r><g|: target bit of s2 tells the column side
            v = 1j if bit_at(s, site, n) else -1j
        rows.append(j)
        cols.append(i)
        vals.append(v)
    if d > DENSE_DIM_MAX:
        mat = sp.csr_matrix((vals, (rows, cols)), shape=(d, d), dtype=complex)
    else:
        mat = np.zeros((d, d), dtype=complex)
        mat[rows, cols] = vals
    return SpinOperator(basis, mat, hermitian_hint=True)


def number_operator(basis: HilbertBasis, site: int) -> SpinOperator:
    """n-hat = |r><r| on one site (diagonal in any configuration basis)."""
    diag = basis.site_occupation(site)
    d = basis.dim
    mat = sp.diags(diag).tocsr() if d > DENSE_DIM_MAX else np.diag(diag).astype(complex)
    return SpinOperator(basis, mat, hermitian_hint=True)


def total_number(basis: HilbertBasis) -> SpinOperator:
    diag = basis.occupation_numbers()
    d = basis.dim
    mat = sp.diags(diag).tocsr() if d > DENSE_DIM_MAX else np.diag(diag).astype(complex)
    return SpinOperator(basis, mat, hermitian_hint=True)


def ground_projector(basis: HilbertBasis, site: int) -> SpinOperator:
    diag = 1.0 - basis.site_occupation(site)
    d = basis.dim
    mat = sp.diags(diag).tocsr() if d > DENSE_DIM_MAX else np.diag(diag).astype(complex)
    return SpinOperator(basis, mat, hermitian_hint=True)


def identity_operator(basis: HilbertBasis) -> SpinOperator:
    d = basis.dim
    mat = sp.identity(d, dtype=complex, format="csr") if d > DENSE_DIM_MAX else np.eye(d, dtype=complex)
    return SpinOperator(basis, mat, hermitian_hint=True)


def site_transition(basis: HilbertBasis, site: int, to_bit: int, from_bit: int) -> SpinOperator:
    """|to><from| on one site embedded in the many-body basis (e.g. |g><r|)."""
    n = basis.n_sites
    d = basis.dim
    rows, cols, vals = [], [], []
    for i, s in enumerate(basis.states):
        if bit_at(s, site, n) != from_bit:
            continue
        s2 = s if to_bit == from_bit else s ^ (1 << (n - 1 - site))
        if not basis.contains(s2):
            continue
        rows.append(basis.index_of(s2))
        cols.append(i)
        vals.append(1.0 + 0j)
    if d > DENSE_DIM_MAX:
        mat = sp.csr_matrix((vals, (rows, cols)), shape=(d, d), dtype=complex)
    else:
        mat = np.zeros((d, d), dtype=complex)
        mat[rows, cols] = vals
    return SpinOperator(basis, mat, hermitian_hint=False)


@dataclass(frozen=True)
class JumpOperator:
    """Lindblad jump operator with the sqrt(rate) folded into the matrix."""

    op: SpinOperator
    rate_sqrt_embedded: bool = True

    def __post_init__(self):
        if not self.rate_sqrt_embedded:
            raise ValueError("single convention: sqrt(rate) must be embedded in the matrix")

    @property
    def basis(self) -> HilbertBasis:
        return self.op.basis

    def dense(self) -> np.ndarray:
        return self.op.dense()


def expectation(state, op: SpinOperator):
    """<A> = Tr(A rho); real part returned for hermitian-hinted operators.

    For Hermitian operators an imaginary residue above 1e-8 raises.
    """
    if state.basis.dim != op.dim:
        raise ValueError("state and operator bases do not match")
    if state.is_pure:
        v = state.data
        val = complex(np.vdot(v, op.matrix @ v))
    else:
        rho = state.data
        m = op.matrix
        if sp.issparse(m):
            val = complex((m.multiply(rho.T)).sum())
        else:
            val = complex(np.sum(m * rho.T))
    if op.hermitian_hint:
        if abs(val.imag) > 1e-8:
            raise ValueError(f"imaginary residue {val.imag} on Hermitian expectation")
        return float(val.real)
    return val


class HamiltonianProvider:
    """Piecewise-constant time-dependent Hamiltonian H(t).

    Callable at any t; exposes its constant segments so integrators can use
    exact propagation within each segment.
    """

    def __init__(self, segments: Sequence[tuple[float, float, SpinOperator]]):
        if not segments:
            raise ValueError("at least one segment required")
        segs = sorted(segments, key=lambda s: s[0])
        for (a, b, _), (c, _, _) in zip(segs, segs[1:]):
            if b > c + 1e-12:
                raise ValueError("segments overlap")
        for a, b, _ in segs:
            if b <= a:
                raise ValueError("segment end must exceed start")
        self._segments = segs

    @classmethod
    def static(cls, op: SpinOperator, duration: float = np.inf) -> "HamiltonianProvider":
        return cls([(0.0, duration, op)])

    @property
    def is_static(self) -> bool:
        return len(self._segments) == 1

    def static_operator(self) -> SpinOperator:
        if not self.is_static:
            raise ValueError("provider is not static")
        return self._segments[0][2]

    def __call__(self, t: float) -> SpinOperator:
        for a, b, op in self._segments:
            if a - 1e-12 <= t <= b + 1e-12:
                return op
        raise ValueError(f"t={t} outside provider domain")

    def segments(self, t0: float, t1: float):
        """Constant pieces covering [t0, t1] as (start, end, SpinOperator)."""
        out = []
        for a, b, op in self._segments:
            lo, hi = max(a, t0), min(b, t1)
            if hi > lo + 1e-15:
                out.append((lo, hi, op))
        covered = sum(hi - lo for lo, hi, _ in out)
        if abs(covered - (t1 - t0)) > 1e-9:
            raise ValueError(f"provider does not cover [{t0}, {t1}]")
        return out


def as_provider(h) -> HamiltonianProvider:
    """Accept a SpinOperator, a callable t->SpinOperator, or a provider."""
    if isinstance(h, HamiltonianProvider):
        return h
    if isinstance(h, SpinOperator):
        return HamiltonianProvider.static(h)
    raise TypeError("expected SpinOperator or HamiltonianProvider")
