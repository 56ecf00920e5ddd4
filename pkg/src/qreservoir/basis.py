"""Spin-configuration bases: full tensor-product space and blockade-constrained subspaces.

Configurations are bitstrings over sites 0..n-1 with bit values 0 = ground (spin -1)
and 1 = excited (spin +1). A configuration is encoded as an integer with site 0 in
the most-significant position, so the full basis in index order is the lexicographic
order gg...g, gg...r, ..., rr...r and agrees with Kronecker-product operator
construction (site 0 = leftmost factor).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class BasisKind(str, Enum):
    FULL = "full"
    BLOCKADED_RING = "blockaded-ring"
    BLOCKADED_CHAIN = "blockaded-chain"


def bit_at(config: int, site: int, n_sites: int) -> int:
    """Occupation (0=g, 1=r) of `site` in configuration `config`."""
    return (config >> (n_sites - 1 - site)) & 1


def config_bits(config: int, n_sites: int) -> tuple[int, ...]:
    return tuple(bit_at(config, i, n_sites) for i in range(n_sites))


def config_str(config: int, n_sites: int) -> str:
    """Render a configuration as a g/r string, site 0 first."""
    return "".join("r" if bit_at(config, i, n_sites) else "g" for i in range(n_sites))


def config_from_str(s: str) -> int:
    """Parse a g/r (or 0/1) string, site 0 first."""
    out = 0
    for ch in s:
        out <<= 1
        if ch in ("r", "1"):
            out |= 1
        elif ch not in ("g", "0"):
            raise ValueError(f"invalid configuration character {ch!r}")
    return out


def _blockade_ok(config: int, n_sites: int, ring: bool) -> bool:
    bits = config_bits(config, n_sites)
    last = n_sites if ring else n_sites - 1
    return all(not (bits[i] and bits[(i + 1) % n_sites]) for i in range(last))


@dataclass(frozen=True)
class HilbertBasis:
    """Ordered basis of admissible spin configurations.

    `index_of` maps configuration integer -> basis index. Construction is
    deterministic: states are listed in increasing integer order, which is the
    lexicographic order of the g/r strings.
    """

    n_sites: int
    kind: BasisKind
    states: tuple[int, ...] = field(init=False)
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        if self.kind == BasisKind.FULL:
            states = tuple(range(1 << self.n_sites))
        else:
            ring = self.kind == BasisKind.BLOCKADED_RING
            if ring and self.n_sites < 3:
                raise ValueError("blockaded ring needs at least 3 sites")
            states = tuple(
                s for s in range(1 << self.n_sites)
                if _blockade_ok(s, self.n_sites, ring)
            )
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(states)})

    @property
    def dim(self) -> int:
        return len(self.states)

    def index_of(self, config: int) -> int:
        try:
            return self._index[config]
        except KeyError:
            raise KeyError(
                f"configuration {config:0{self.n_sites}b} not admissible in {self.kind.value} basis"
            ) from None

    def contains(self, config: int) -> bool:
        return config in self._index

    def occupation_numbers(self) -> np.ndarray:
        """Excitation count per basis state (diagonal of the total number operator)."""
        return np.array([bin(s).count("1") for s in self.states], dtype=float)

    def site_occupation(self, site: int) -> np.ndarray:
        """Diagonal of n-hat on `site` in this basis (0/1 per state)."""
        if not 0 <= site < self.n_sites:
            raise IndexError(f"site {site} out of range for {self.n_sites} sites")
        return np.array(
            [bit_at(s, site, self.n_sites) for s in self.states], dtype=float
        )

    def embedding_indices(self) -> np.ndarray:
        """Indices of this basis's states inside the full 2^n basis."""
        return np.asarray(self.states, dtype=np.intp)

    def neel_state(self, offset: int = 1) -> int:
        """Alternating configuration; offset 1 puts g on site 0 (grgr...),
        offset 0 puts r on site 0 (rgrg...)."""
        return sum(
            1 << (self.n_sites - 1 - i)
            for i in range(self.n_sites)
            if i % 2 == offset % 2
        )


def full_basis(n_sites: int) -> HilbertBasis:
    return HilbertBasis(n_sites, BasisKind.FULL)


def blockaded_ring(n_sites: int) -> HilbertBasis:
    return HilbertBasis(n_sites, BasisKind.BLOCKADED_RING)


def blockaded_chain(n_sites: int) -> HilbertBasis:
    return HilbertBasis(n_sites, BasisKind.BLOCKADED_CHAIN)
