"""Parametric working-memory driver: the decision-task lattice receives the
two stimuli sequentially (stimulus 1, delay, stimulus 2, relaxation) and the
readout must compare the first stimulus against the second from memory.

All segment durations carry Gaussian jitter. Delay and relaxation segments
run through the spectral free-flight engine; per-sample durations are applied
column-wise in mode space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..basis import full_basis
from ..evolution import SplitStepLindblad
from ..operators import SpinOperator, build_pauli
from ..quantum_info import subsystem_entropy
from ..rng import substream
from ..states import QuantumState, all_ground
from ..superop import unvec, vec
from ..training import Dataset, fit_readout, square_loss, train_test_split
from .decision import DecisionConfig, _lattice_engine
from .engine import site_channel_set

TWO_PI = 2.0 * np.pi
DEFAULT_DELAY_GRID = (0.1, 0.4, 0.7, 1.0, 1.4, 1.8, 2.2, 2.6)


@dataclass
class WorkingMemoryConfig(DecisionConfig):
    dt_mean: float = 0.15            # per-stimulus duration, us
    t_out_mean: float = 0.5          # relaxation before readout, us
    t_delay_grid: tuple = DEFAULT_DELAY_GRID
    time_sigma: float = 0.1          # jitter on dt, t_out, t_delay, us
    n_samples_per_point: int = 300   # per (t_delay, realization)


@dataclass
class WorkingMemoryResult:
    config: WorkingMemoryConfig
    t_delay_grid: np.ndarray
    accuracy: np.ndarray             # pooled test accuracy per delay point
    accuracy_stderr: np.ndarray
    n_test: np.ndarray
    test_loss: np.ndarray


@dataclass
class InputScanResult:
    config: WorkingMemoryConfig
    dt_grid: np.ndarray
    total_input_time: np.ndarray     # 2 dt + t_delay
    test_loss: np.ndarray
    input_entropy: np.ndarray        # mean entropy of the input pair, nats


def _wm_samples(cfg, basis, ndiags, h_base, channels, engine, rho0,
                realization, label, count, dt_mean, t_delay, t_out_mean,
                want_entropy=False):
    """Run `count` samples of the four-segment protocol; returns targets,
    feature matrix (with bias), and optionally mean input-pair entropy."""
    d = basis.dim
    levels = np.asarray(cfg.input_levels_mhz, dtype=float)
    in1, in2 = cfg.input_sites
    targets = np.empty(count)
    vecs = np.empty((d * d, count), dtype=complex)
    delays = np.empty(count)
    touts = np.empty(count)
    stim2_params = []
    for i in range(count):
        rs = substream(cfg.seed, label, realization, i)
        lv = levels[rs.integers(0, levels.size, size=2)]
        noisy = lv + rs.normal(0.0, cfg.sigma_in, size=2)
        dt1 = max(0.0, dt_mean + rs.normal(0.0, cfg.time_sigma))
        dt2 = max(0.0, dt_mean + rs.normal(0.0, cfg.time_sigma))
        delays[i] = max(0.0, t_delay + rs.normal(0.0, cfg.time_sigma))
        touts[i] = max(0.0, t_out_mean + rs.normal(0.0, cfg.time_sigma))
        t = np.sign(lv[0] - lv[1])
        targets[i] = t if t != 0 else (1.0 if rs.random() < 0.5 else -1.0)
        h1 = h_base + np.diag(TWO_PI * noisy[0] * ndiags[in1])
        rho = rho0
        if dt1 > 0:
            rho = SplitStepLindblad(SpinOperator(basis, h1, hermitian_hint=True),
                                    channels, dt=cfg.stim_dt).evolve(rho0, dt1)
        vecs[:, i] = vec(rho)
        stim2_params.append((noisy[1], dt2))

    # delay segment in mode space with per-sample durations
    modes = engine.evolve_modes(engine.to_modes(vecs), delays)
    vecs = engine.from_modes(modes)

    entropy = 0.0
    for i in range(count):
        noisy2, dt2 = stim2_params[i]
        rho = unvec(vecs[:, i], d)
        rho = 0.5 * (rho + rho.conj().T)
        h2 = h_base + np.diag(TWO_PI * noisy2 * ndiags[in2])
        if dt2 > 0:
            rho = SplitStepLindblad(SpinOperator(basis, h2, hermitian_hint=True),
                                    channels, dt=cfg.stim_dt).evolve(rho, dt2)
        if want_entropy:
            st = QuantumState(basis, rho / np.trace(rho).real, eig_tol=1e-5)
            entropy += subsystem_entropy(st, set(cfg.input_sites))
        vecs[:, i] = vec(rho)

    modes = engine.evolve_modes(engine.to_modes(vecs), touts)
    rows = [engine.observable_row(build_pauli(basis, s, "y").dense())
            for s in cfg.output_sites]
    f = np.stack([np.real(row @ modes) for row in rows], axis=1)
    feats = np.column_stack([f, np.ones(count)])
    return targets, feats, (entropy / count if want_entropy else None)


def run_working_memory(cfg: WorkingMemoryConfig) -> WorkingMemoryResult:
    n = cfg.n_cols * cfg.n_rows
    channels = site_channel_set(n, cfg.dissipation)
    grid = np.asarray(cfg.t_delay_grid, dtype=float)
    correct = np.zeros(grid.size)
    totals = np.zeros(grid.size, dtype=int)
    losses = np.zeros(grid.size)

    for r in range(cfg.geometry_realizations):
        basis, ndiags, h_base, engine = _lattice_engine(cfg, r, "wm-geometry")
        rho0 = all_ground(basis).density_matrix()
        for gi, t_delay in enumerate(grid):
            label = f"wm-sample-{gi}"
            targets, feats, _ = _wm_samples(
                cfg, basis, ndiags, h_base, channels, engine, rho0,
                r, label, cfg.n_samples_per_point, cfg.dt_mean, t_delay,
                cfg.t_out_mean)
            tr, te = train_test_split(len(targets), cfg.test_fraction,
                                      substream(cfg.seed, f"wm-split-{gi}", r))
            w = fit_readout(Dataset(feats[tr], targets[tr]), ridge=cfg.ridge)
            pred = w.predict(feats[te]).ravel()
            correct[gi] += int(((pred > 0) == (targets[te] > 0)).sum())
            totals[gi] += len(te)
            losses[gi] += square_loss(pred, targets[te])
        del engine

    acc = correct / totals
    se = np.sqrt(np.clip(acc * (1 - acc), 1e-12, None) / totals)
    return WorkingMemoryResult(
        config=cfg,
        t_delay_grid=grid,
        accuracy=acc,
        accuracy_stderr=se,
        n_test=totals,
        test_loss=losses / cfg.geometry_realizations,
    )


def run_working_memory_input_scan(cfg: WorkingMemoryConfig,
                                  dt_grid=(0.02, 0.05, 0.1, 0.15, 0.25, 0.4),
                                  t_delay: float = 0.1,
                                  t_out_mean: float = 0.1) -> InputScanResult:
    """Loss and input-pair entropy versus the total input time 2 dt + t_delay."""
    n = cfg.n_cols * cfg.n_rows
    channels = site_channel_set(n, cfg.dissipation)
    grid = np.asarray(dt_grid, dtype=float)
    losses = np.zeros(grid.size)
    ents = np.zeros(grid.size)

    for r in range(cfg.geometry_realizations):
        basis, ndiags, h_base, engine = _lattice_engine(cfg, r, "wm-geometry")
        rho0 = all_ground(basis).density_matrix()
        for gi, dt_mean in enumerate(grid):
            targets, feats, ent = _wm_samples(
                cfg, basis, ndiags, h_base, channels, engine, rho0,
                r, f"wm-scan-{gi}", cfg.n_samples_per_point, dt_mean, t_delay,
                t_out_mean, want_entropy=True)
            tr, te = train_test_split(len(targets), cfg.test_fraction,
                                      substream(cfg.seed, f"wm-scan-split-{gi}", r))
            w = fit_readout(Dataset(feats[tr], targets[tr]), ridge=cfg.ridge)
            losses[gi] += square_loss(w.predict(feats[te]).ravel(), targets[te])
            ents[gi] += ent
        del engine

    n_real = cfg.geometry_realizations
    return InputScanResult(
        config=cfg,
        dt_grid=grid,
        total_input_time=2 * grid + t_delay,
        test_loss=losses / n_real,
        input_entropy=ents / n_real,
    )
