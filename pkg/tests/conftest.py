import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def kron_chain(ops):
    """Independent Kronecker-product oracle for multi-site operators."""
    out = np.array([[1.0 + 0j]])
    for o in ops:
        out = np.kron(out, o)
    return out


SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, 1j], [-1j, 0]], dtype=complex)  # basis order (g, r)
SZ = np.diag([-1.0 + 0j, 1.0 + 0j])
I2 = np.eye(2, dtype=complex)
NHAT = np.diag([0.0 + 0j, 1.0 + 0j])
