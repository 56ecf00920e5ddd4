"""Readout-layer training and evaluation: feature extraction with a bias
entry, ridge-regularized least squares, square loss, a Nelder-Mead simplex
optimizer for scalar timing parameters, squared Pearson correlation, and
Gaussian input perturbation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import build_pauli, expectation, number_operator
from .states import QuantumState

RIDGE_DEFAULT = 1e-8


def make_feature_vector(values) -> np.ndarray:
    """Append the fixed bias entry 1 to measured values."""
    v = np.asarray(values, dtype=float).ravel()
    return np.concatenate([v, [1.0]])


def extract_features(state: QuantumState, sites, observable: str = "y") -> np.ndarray:
    """Single-site readout features plus bias.

    observable 'y'/'z': one Pauli expectation per listed site;
    'population': the pair (P_g, P_r) per listed site.
    """
    basis = state.basis
    vals: list[float] = []
    for site in sites:
        if observable in ("y", "z"):
            vals.append(expectation(state, build_pauli(basis, site, observable)))
        elif observable == "population":
            p_r = expectation(state, number_operator(basis, site))
            vals.extend([1.0 - p_r, p_r])
        else:
            raise ValueError(f"unknown observable {observable!r}")
    return make_feature_vector(vals)


@dataclass(frozen=True)
class ReadoutMap:
    """Trained linear readout W (outputs x features+bias)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.weights, dtype=float))
        if not np.all(np.isfinite(w)):
            raise ValueError("readout weights must be finite")
        w = w.copy(); w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def predict(self, features: np.ndarray) -> np.ndarray:
        """features: (n_samples, n_features) or (n_features,)."""
        f = np.asarray(features, dtype=float)
        if f.ndim == 1:
            return self.weights @ f
        return f @ self.weights.T


@dataclass(frozen=True)
class Dataset:
    """Sample features (with bias column) and targets; rows are samples."""

    features: np.ndarray
    targets: np.ndarray
    inputs: tuple = ()

    def __post_init__(self):
        f = np.atleast_2d(np.asarray(self.features, dtype=float))
        t = np.asarray(self.targets, dtype=float)
        if t.ndim == 1:
            t = t[:, None]
        if f.shape[0] != t.shape[0]:
            raise ValueError("feature and target row counts differ")
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "targets", t)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]


def fit_readout(d: Dataset, ridge: float = RIDGE_DEFAULT) -> ReadoutMap:
    """Least-squares readout via normal equations with Tikhonov term ridge*I."""
    x, y = d.features, d.targets
    gram = x.T @ x
    if ridge > 0:
        gram = gram + ridge * np.eye(gram.shape[0])
    elif np.linalg.cond(gram) > 1e12:
        raise np.linalg.LinAlgError(
            "degenerate feature matrix; use a positive ridge parameter"
        )
    wt = np.linalg.solve(gram, x.T @ y)
    return ReadoutMap(wt.T)


def square_loss(y_out, y_targ) -> float:
    """(1/N_s) sum_i ||y_targ_i - y_out_i||^2."""
    a = np.atleast_1d(np.asarray(y_out, dtype=float))
    b = np.atleast_1d(np.asarray(y_targ, dtype=float))
    if a.shape != b.shape:
        raise ValueError("prediction and target shapes differ")
    if a.ndim == 1:
        a = a[:, None]; b = b[:, None]
    return float(np.sum((b - a) ** 2) / a.shape[0])


def nelder_mead(objective, x0, x_tol: float = 1e-4, max_iter: int = 500,
                initial_step: float = 0.1):
    """Nelder-Mead simplex minimization (reflection 1, expansion 2,
    contraction 1/2, shrink 1/2). Terminates when the simplex diameter drops
    below x_tol or after max_iter iterations. Returns (x_best, f_best)."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    dim = x0.size
    simplex = [x0.copy()]
    for i in range(dim):
        xi = x0.copy()
        xi[i] += initial_step if x0[i] == 0 else initial_step * max(1.0, abs(x0[i]))
        simplex.append(xi)
    fvals = [float(objective(x)) for x in simplex]

    for _ in range(max_iter):
        order = np.argsort(fvals, kind="stable")
        simplex = [simplex[i] for i in order]
        fvals = [fvals[i] for i in order]
        diam = max(
            np.linalg.norm(simplex[i] - simplex[j])
            for i in range(dim + 1) for j in range(i + 1, dim + 1)
        )
        if diam < x_tol:
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = float(objective(xr))
        if fr < fvals[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = float(objective(xe))
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            xc = centroid + 0.5 * (worst - centroid)
            fc = float(objective(xc))
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
            else:
                best = simplex[0]
                for i in range(1, dim + 1):
                    simplex[i] = best + 0.5 * (simplex[i] - best)
                    fvals[i] = float(objective(simplex[i]))
    ib = int(np.argmin(fvals))
    x_best = simplex[ib]
    return (x_best if x_best.size > 1 else float(x_best[0])), float(fvals[ib])


def pearson_r_squared(m, y) -> float:
    """Squared Pearson correlation cov^2 / (var var); 0 when either variance
    is degenerate (constant predictors carry no information)."""
    a = np.asarray(m, dtype=float).ravel()
    b = np.asarray(y, dtype=float).ravel()
    if a.size != b.size:
        raise ValueError("input vectors must have equal length")
    va = a.var()
    vb = b.var()
    if va < 1e-14 or vb < 1e-14:
        return 0.0
    cov = ((a - a.mean()) * (b - b.mean())).mean()
    return float(np.clip(cov ** 2 / (va * vb), 0.0, 1.0))


def gaussian_perturb(value, sigma: float, rng: np.random.Generator):
    """Add zero-mean Gaussian noise of standard deviation sigma."""
    if sigma == 0:
        return value
    val = np.asarray(value, dtype=float)
    noise = rng.normal(0.0, sigma, size=val.shape if val.ndim else None)
    out = val + noise
    return float(out) if out.ndim == 0 else out


def train_test_split(n_samples: int, test_fraction: float, rng: np.random.Generator):
    """Shuffled index split; returns (train_idx, test_idx)."""
    perm = rng.permutation(n_samples)
    n_test = int(round(n_samples * test_fraction))
    return perm[n_test:], perm[:n_test]
