"""Classical RNN baseline: discrete sign-rule updates, the continuous relaxation
limit, the induced Markov chain over spin configurations, embeddability checks
for stochastic matrices, and the mean-field integrate-and-fire ODEs.

Configuration indexing matches the quantum full basis: index = sum of
2^(N-1-i) over sites i with s_i = +1 (site 0 most significant), so columns of a
StochasticMatrix are source configurations in lexicographic g/r order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .basis import HilbertBasis
from .states import QuantumState

SIGN_ZERO = 1.0  # sign(0) resolved to +1 for determinism


def sign_pm(x: np.ndarray) -> np.ndarray:
    """Sign with sign(0) = +1."""
    return np.where(np.asarray(x) >= 0.0, 1.0, -1.0)


def as_binary_config(s) -> np.ndarray:
    arr = np.asarray(s, dtype=float)
    if not np.all(np.abs(arr) == 1.0):
        raise ValueError("binary configuration entries must be exactly +-1")
    return arr


def config_to_index(s: np.ndarray) -> int:
    """Map a +-1 configuration to its basis index (site 0 most significant)."""
    bits = (np.asarray(s) > 0).astype(int)
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def index_to_config(idx: int, n: int) -> np.ndarray:
    return np.array([1.0 if (idx >> (n - 1 - i)) & 1 else -1.0 for i in range(n)])


@dataclass(frozen=True)
class RnnParams:
    """Symmetric couplings (rad/us), biases (rad/us), input noise and the
    neuron relaxation time (us)."""

    couplings: np.ndarray
    biases: np.ndarray
    input_noise: float = 0.0
    tau: float = 1.0

    def __post_init__(self):
        j = np.asarray(self.couplings, dtype=float)
        if j.ndim != 2 or j.shape[0] != j.shape[1]:
            raise ValueError("couplings must be a square matrix")
        if np.abs(j - j.T).max() > 1e-12:
            raise ValueError("couplings must be symmetric within 1e-12")
        if np.any(np.diag(j) != 0.0):
            raise ValueError("coupling diagonal must be exactly zero")
        u = np.asarray(self.biases, dtype=float)
        if u.shape != (j.shape[0],):
            raise ValueError("biases must be a vector matching the coupling size")
        if self.input_noise < 0:
            raise ValueError("input noise must be nonnegative")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        j = j.copy(); j.setflags(write=False)
        u = u.copy(); u.setflags(write=False)
        object.__setattr__(self, "couplings", j)
        object.__setattr__(self, "biases", u)

    @property
    def n(self) -> int:
        return self.couplings.shape[0]


@dataclass(frozen=True)
class StochasticMatrix:
    """Column-stochastic matrix over the 2^N spin configurations."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("stochastic matrix must be square")
        if m.min() < -1e-12:
            raise ValueError(f"negative entry {m.min()} in stochastic matrix")
        colsum = m.sum(axis=0)
        if np.abs(colsum - 1.0).max() > 1e-10:
            raise ValueError("columns must sum to 1 within 1e-10")
        m = m.copy(); m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def discrete_step(s, p: RnnParams, rng: np.random.Generator) -> np.ndarray:
    """One parallel update s' = sign(h s) with h = -(u + xi) + J s."""
    sv = as_binary_config(s)
    if sv.shape != (p.n,):
        raise ValueError("configuration size does not match parameters")
    xi = rng.normal(0.0, p.input_noise, size=p.n) if p.input_noise > 0 else 0.0
    h = -(p.biases + xi) + p.couplings @ sv
    return sign_pm(h * sv)


def continuous_integrate(
    s0,
    p: RnnParams,
    duration: float,
    dt: float,
    rng: np.random.Generator | None = None,
):
    """Euler integration of tau ds/dt = -s + sign(h s), clipped to [-1, 1].

    Euler (not RK4) because the sign nonlinearity is discontinuous.
    Returns (times, trajectory) with trajectory[k] the state at times[k].
    """
    if dt >= p.tau:
        raise ValueError("dt must be well below the relaxation time tau")
    s = np.clip(np.asarray(s0, dtype=float), -1.0, 1.0)
    if s.shape != (p.n,):
        raise ValueError("state size does not match parameters")
    nsteps = max(1, int(round(duration / dt)))
    traj = np.empty((nsteps + 1, p.n))
    traj[0] = s
    for k in range(nsteps):
        xi = rng.normal(0.0, p.input_noise, size=p.n) if (rng is not None and p.input_noise > 0) else 0.0
        h = -(p.biases + xi) + p.couplings @ s
        s = s + (dt / p.tau) * (-s + sign_pm(h * s))
        s = np.clip(s, -1.0, 1.0)
        traj[k + 1] = s
    times = np.arange(nsteps + 1) * dt
    return times, traj


def _all_configs(n: int) -> np.ndarray:
    """(2^n, n) array of +-1 configurations in basis index order."""
    idx = np.arange(1 << n)[:, None]
    shifts = n - 1 - np.arange(n)[None, :]
    return np.where((idx >> shifts) & 1, 1.0, -1.0)


def transition_matrix(p: RnnParams, formula: str = "derived") -> StochasticMatrix:
    """Markov kernel of the noisy discrete update.

    formula="derived" (default): per-site flip probabilities derived from the
    update rule under Gaussian bias noise,
        P(s_i | s') = 1/2 (1 + s_i s'_i erf(h_i(s') / (sqrt(2) sigma))).
    formula="paper-literal": the printed appendix expression
        P(s_i | s') = 1/2 (1 + s_i erf((h_i(s')/sigma^2 - 1) / sqrt(2))),
    shipped for comparison only.
    """
    n = p.n
    if n > 12:
        raise ValueError("transition matrix limited to N <= 12")
    if p.input_noise <= 0:
        raise ValueError(
            "sigma_in must be positive; use deterministic_transition_matrix for sigma = 0"
        )
    if formula not in ("derived", "paper-literal"):
        raise ValueError(f"unknown formula {formula!r}")
    configs = _all_configs(n)  # (2^n, n)
    dim = 1 << n
    m = np.empty((dim, dim))
    for col in range(dim):
        sp = configs[col]
        h = -p.biases + p.couplings @ sp
        if formula == "derived":
            g = erf(h / (np.sqrt(2.0) * p.input_noise))
            q_plus = 0.5 * (1.0 + sp * g)  # P(s_i = +1 | s')
        else:
            g = erf((h / p.input_noise ** 2 - 1.0) / np.sqrt(2.0))
            q_plus = 0.5 * (1.0 + g)
        col_probs = np.array([1.0])
        for i in range(n):
            col_probs = np.kron(col_probs, np.array([1.0 - q_plus[i], q_plus[i]]))
        m[:, col] = col_probs
    return StochasticMatrix(m)


def deterministic_transition_matrix(p: RnnParams) -> StochasticMatrix:
    """0/1 kernel of the noiseless update (permutation-like, sign(0) = +1)."""
    n = p.n
    if n > 12:
        raise ValueError("transition matrix limited to N <= 12")
    configs = _all_configs(n)
    dim = 1 << n
    m = np.zeros((dim, dim))
    for col in range(dim):
        sp = configs[col]
        h = -p.biases + p.couplings @ sp
        target = config_to_index(sign_pm(h * sp))
        m[target, col] = 1.0
    return StochasticMatrix(m)


def embeddable_necessary(l: StochasticMatrix, slack: float = 1e-12) -> bool:
    """Necessary condition for classical embeddability:
    prod_s L_{s|s} >= det L >= 0 (within slack)."""
    det = float(np.linalg.det(l.entries))
    diag_prod = float(np.prod(np.diag(l.entries)))
    return (det >= -slack) and (diag_prod >= det - slack)


def spin_flip_matrix(n: int) -> StochasticMatrix:
    """Permutation matrix of the global spin flip s -> -s."""
    dim = 1 << n
    m = np.zeros((dim, dim))
    mask = dim - 1
    for col in range(dim):
        m[col ^ mask, col] = 1.0
    return StochasticMatrix(m)


def channel_to_stochastic(channel, basis: HilbertBasis, tol: float = 1e-8) -> StochasticMatrix:
    """Diagonal transition probabilities L_{s'|s} = <s'| E(|s><s|) |s'> of a
    quantum channel acting on configuration projectors."""
    from .states import basis_state

    dim = basis.dim
    m = np.empty((dim, dim))
    for col, config in enumerate(basis.states):
        out: QuantumState = channel(basis_state(basis, config))
        probs = np.abs(out.data) ** 2 if out.is_pure else np.diag(out.density_matrix()).real
        if probs.min() < -tol:
            raise ValueError(f"channel produced negative population {probs.min()}")
        probs = np.clip(probs, 0.0, None)
        colsum = probs.sum()
        if abs(colsum - 1.0) > tol:
            raise ValueError(f"channel is not trace-preserving (column sum {colsum})")
        m[:, col] = probs / colsum  # strip numerical residue below tol
    return StochasticMatrix(m)


def integrate_meanfield_ifrnn(
    x0,
    y0,
    p: RnnParams,
    omega: float,
    gamma: float,
    duration: float,
    dt: float,
):
    """Euler integration of the mean-field integrate-and-fire closure,

        dx_n/dt = -x_n / tau_I - u_n y_n - (omega / 2 gamma) sum_m J_nm y_n y_m
        dy_n/dt = -y_n / tau_s + u_n x_n - (omega / 2 gamma) sum_m J_nm x_n y_m

    with tau_I^-1 = gamma/2 and tau_s^-1 = gamma/2 + omega^2/(4 gamma); x is the
    current-like and y the rate-like variable. Two-point expectations are
    factorized into products of single-site means. Intended regime gamma*t >> 1.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive (relaxation constants divide by gamma)")
    x = np.asarray(x0, dtype=float).copy()
    y = np.asarray(y0, dtype=float).copy()
    if x.shape != (p.n,) or y.shape != (p.n,):
        raise ValueError("initial vectors must match the parameter size")
    inv_tau_i = gamma / 2.0
    inv_tau_s = gamma / 2.0 + omega ** 2 / (4.0 * gamma)
    c = omega / (2.0 * gamma)
    nsteps = max(1, int(round(duration / dt)))
    xs = np.empty((nsteps + 1, p.n))
    ys = np.empty((nsteps + 1, p.n))
    xs[0], ys[0] = x, y
    u = p.biases
    for k in range(nsteps):
        jy = p.couplings @ y
        dx = -inv_tau_i * x - u * y - c * (y * jy)
        dy = -inv_tau_s * y + u * x - c * (x * jy)
        x = x + dt * dx
        y = y + dt * dy
        xs[k + 1], ys[k + 1] = x, y
    times = np.arange(nsteps + 1) * dt
    return times, xs, ys
