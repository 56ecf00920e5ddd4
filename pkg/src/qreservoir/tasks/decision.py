"""Decision-making driver: a 3x2 atom lattice receives two detuning stimuli on
the top-left atom pair, relaxes for a trained readout delay, and a linear map
of the two bottom-right atoms' <sigma_y> decides which stimulus was larger.

The relaxation propagation reuses one spectral decomposition of the
no-stimulus Lindbladian per geometry realization, so the readout delay can be
optimized continuously at negligible cost per candidate value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..basis import full_basis
from ..evolution import SplitStepLindblad
from ..operators import SpinOperator, build_pauli
from ..rng import substream
from ..rydberg import (
    C6_SAME,
    DissipationSpec,
    DriveProfile,
    build_rydberg_hamiltonian,
    interaction_matrix,
    lattice_geometry,
)
from ..states import all_ground
from ..training import (
    Dataset,
    fit_readout,
    nelder_mead,
    pearson_r_squared,
    square_loss,
    train_test_split,
)
from .engine import FreeFlightEngine, site_channel_set
from ..superop import vec

TWO_PI = 2.0 * np.pi
INPUT_LEVELS_MHZ = (0.0, 0.25, 0.5, 0.75, 1.0)  # = {0, pi/2, pi, 3pi/2, 2pi} rad/us


@dataclass
class DecisionConfig:
    n_cols: int = 3
    n_rows: int = 2
    input_sites: tuple = (0, 1)     # top row, left pair (row-major order)
    output_sites: tuple = (4, 5)    # bottom row, right pair
    v_mhz: float = 10.0             # nearest-neighbor strength, MHz
    omega: float = TWO_PI * 4.2
    dissipation: DissipationSpec = field(default_factory=DissipationSpec)
    input_levels_mhz: tuple = INPUT_LEVELS_MHZ
    sigma_in: float = 0.1           # input noise, MHz (pre-2pi)
    dt_mean: float = 0.1            # stimulus duration, us
    dt_sigma: float = 0.1           # stimulus duration jitter, us
    t_out_init: float = 0.5         # optimizer start for the readout delay
    t_out_max: float = 4.0
    n_samples: int = 4000           # total over realizations
    geometry_realizations: int = 2
    jitter_sigma: float = 0.05
    stim_dt: float = 0.002          # split-step resolution during stimuli
    test_fraction: float = 0.3
    ridge: float = 1e-8
    seed: int = 0


@dataclass
class DecisionResult:
    config: DecisionConfig
    t_out: float                     # mean trained readout delay
    t_out_per_realization: list
    train_loss: float
    test_loss: float
    accuracy_by_contrast: dict       # c1 (MHz) -> (accuracy, stderr, n)
    response_by_contrast: dict       # c1 (MHz) -> (P(decide +1), stderr, n)
    sigmoid_midpoint: float
    sigmoid_scale: float
    psychometric_rows: list = field(default_factory=list)


def _lattice_engine(cfg: DecisionConfig, realization: int, seed_label: str):
    """Geometry, base Hamiltonian pieces, and the free-flight engine."""
    n = cfg.n_cols * cfg.n_rows
    a0 = (C6_SAME / (TWO_PI * cfg.v_mhz)) ** (1.0 / 6.0)
    geo = lattice_geometry(cfg.n_cols, cfg.n_rows, a0,
                           jitter_sigma=cfg.jitter_sigma,
                           rng=substream(cfg.seed, seed_label, realization))
    basis = full_basis(n)
    j = interaction_matrix(geo)
    ndiags = [basis.site_occupation(i) for i in range(n)]
    diag_int = np.zeros(basis.dim)
    for a in range(n):
        for b_ in range(a + 1, n):
            diag_int += j[a, b_] * ndiags[a] * ndiags[b_]
    x_sum = sum((build_pauli(basis, i, "x").dense() for i in range(1, n)),
                build_pauli(basis, 0, "x").dense())
    h_base = np.diag(diag_int).astype(complex) + (cfg.omega / 2.0) * x_sum
    from ..rydberg import effective_jumps
    jumps = effective_jumps(basis, cfg.dissipation)
    engine = FreeFlightEngine(SpinOperator(basis, h_base, hermitian_hint=True), jumps)
    return basis, ndiags, h_base, engine


def _simulate_stimuli(cfg, basis, ndiags, h_base, channels, rho0, realization, count):
    """Per-sample stimulus evolution; returns clean inputs, targets, and the
    post-stimulus density matrices (vectorized)."""
    d = basis.dim
    levels = np.asarray(cfg.input_levels_mhz, dtype=float)
    cleans = np.empty((count, 2))
    targets = np.empty(count)
    vecs = np.empty((d * d, count), dtype=complex)
    for i in range(count):
        rs = substream(cfg.seed, "decision-sample", realization, i)
        lv = levels[rs.integers(0, levels.size, size=2)]
        noisy = lv + rs.normal(0.0, cfg.sigma_in, size=2)
        dt_i = max(0.0, cfg.dt_mean + rs.normal(0.0, cfg.dt_sigma))
        target = np.sign(lv[0] - lv[1])
        if target == 0:
            target = 1.0 if rs.random() < 0.5 else -1.0
        h = h_base + np.diag(TWO_PI * (noisy[0] * ndiags[cfg.input_sites[0]]
                                       + noisy[1] * ndiags[cfg.input_sites[1]]))
        if dt_i > 0:
            stim = SplitStepLindblad(SpinOperator(basis, h, hermitian_hint=True),
                                     channels, dt=cfg.stim_dt)
            rho = stim.evolve(rho0, dt_i)
        else:
            rho = rho0.copy()
        cleans[i] = lv
        targets[i] = target
        vecs[:, i] = vec(rho)
    return cleans, targets, vecs


def run_decision(cfg: DecisionConfig) -> DecisionResult:
    n = cfg.n_cols * cfg.n_rows
    n_real = cfg.geometry_realizations
    counts = [cfg.n_samples // n_real + (1 if r < cfg.n_samples % n_real else 0)
              for r in range(n_real)]
    channels = site_channel_set(n, cfg.dissipation)

    test_pred, test_targ, test_clean = [], [], []
    t_outs, train_losses, test_losses = [], [], []

    for r, count in enumerate(counts):
        if count == 0:
            continue
        basis, ndiags, h_base, engine = _lattice_engine(cfg, r, "decision-geometry")
        rho0 = all_ground(basis).density_matrix()
        cleans, targets, vecs = _simulate_stimuli(
            cfg, basis, ndiags, h_base, channels, rho0, r, count)
        modes = engine.to_modes(vecs)                    # (D, count)
        rows = [engine.observable_row(build_pauli(basis, s, "y").dense())
                for s in cfg.output_sites]

        def features_at(t_out: float) -> np.ndarray:
            em = modes * np.exp(engine.lam * t_out)[:, None]
            f = np.stack([np.real(row @ em) for row in rows], axis=1)
            return np.column_stack([f, np.ones(len(targets))])

        tr, te = train_test_split(count, cfg.test_fraction,
                                  substream(cfg.seed, "decision-split", r))

        def objective(v) -> float:
            t_out = float(np.atleast_1d(v)[0])
            if not 0.0 <= t_out <= cfg.t_out_max:
                return 1e6 + abs(t_out)
            f = features_at(t_out)
            w = fit_readout(Dataset(f[tr], targets[tr]), ridge=cfg.ridge)
            return square_loss(w.predict(f[tr]), targets[tr])

        t_opt, f_opt = nelder_mead(objective, np.array([cfg.t_out_init]),
                                   initial_step=0.3)
        t_opt = float(np.atleast_1d(t_opt)[0])
        feats = features_at(t_opt)
        w = fit_readout(Dataset(feats[tr], targets[tr]), ridge=cfg.ridge)
        pred_te = w.predict(feats[te]).ravel()
        t_outs.append(t_opt)
        train_losses.append(f_opt)
        test_losses.append(square_loss(pred_te, targets[te]))
        test_pred.append(pred_te)
        test_targ.append(targets[te])
        test_clean.append(cleans[te])
        del engine

    pred = np.concatenate(test_pred)
    targ = np.concatenate(test_targ)
    clean = np.vstack(test_clean)
    c1 = np.round(clean[:, 0] - clean[:, 1], 6)
    decided_plus = pred > 0.0

    acc, resp, rows_out = {}, {}, []
    for level in np.unique(c1):
        m = c1 == level
        nn = int(m.sum())
        p_plus = float(decided_plus[m].mean())
        se_resp = float(np.sqrt(max(p_plus * (1 - p_plus), 1e-12) / nn))
        resp[float(level)] = (p_plus, se_resp, nn)
        if level != 0:
            correct = decided_plus[m] == (level > 0)
            a = float(correct.mean())
            se = float(np.sqrt(max(a * (1 - a), 1e-12) / nn))
            acc[float(level)] = (a, se, nn)
        rows_out.append((float(level), p_plus, se_resp, nn))

    # logistic fit P(+1 | c1) = 1 / (1 + exp(-(c1 - m) / s)) by least squares
    lv = np.array(sorted(resp))
    pv = np.array([resp[l][0] for l in lv])

    def sig_loss(params):
        m0, s0 = params
        if abs(s0) < 1e-6:
            return 1e9
        z = 1.0 / (1.0 + np.exp(-(lv - m0) / s0))
        return float(np.sum((z - pv) ** 2))

    (m_fit, s_fit), _ = nelder_mead(sig_loss, np.array([0.0, 0.3]), initial_step=0.2)

    return DecisionResult(
        config=cfg,
        t_out=float(np.mean(t_outs)),
        t_out_per_realization=t_outs,
        train_loss=float(np.mean(train_losses)),
        test_loss=float(np.mean(test_losses)),
        accuracy_by_contrast=acc,
        response_by_contrast=resp,
        sigmoid_midpoint=float(m_fit),
        sigmoid_scale=float(s_fit),
        psychometric_rows=rows_out,
    )
