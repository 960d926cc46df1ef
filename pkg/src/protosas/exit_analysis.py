"""Protograph EXIT analysis.

Two recursions over edge classes (check i, variable j) of a base matrix:

* ``awgn_pexit_*``: the closed-form multi-edge recursion driven by the
  J-function, valid for the AWGN channel;
* ``sas_pexit_*``: the simulation-based recursion for SaS noise.  Channel LLRs
  are sampled exactly from the noise law, the CN-to-VN a-priori messages are
  consistent Gaussians with sigma = J^-1(edge MI), and every outgoing edge MI
  is measured from M samples with the time-average estimator.  The check-node
  inputs are, by default, the VN output samples themselves (independently
  permuted per operand), so the impulsive shape of the channel reaches the
  box-plus; ``cn_input="gaussian"`` replaces them by consistent Gaussians too.

``alpha == 2`` in the simulation-based path is the Gaussian channel, with
LLR 2y/sigma^2.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .boxplus import phi
from .channel import db_to_linear, gamma_from_ebn0, llr_table, standard_sas
from .protograph import BaseMatrix, PunctureMask, design_rate

CONVERGENCE_MI = 0.9999
MAX_ITERATIONS = 500
# the simulation-based recursion gets the decoder's budget: punctured irregular
# ensembles crawl through a narrow tunnel near threshold, and a longer budget
# reports convergence that a 100-iteration decoder never sees
SAS_MAX_ITERATIONS = 100
DEFAULT_SAMPLES = 30000
COARSE_STEP_DB = 0.25
# a probe is abandoned once the worst a-posteriori MI has not improved by
# STALL_DELTA over STALL_WINDOW iterations
STALL_WINDOW = 60
STALL_DELTA = 1e-3
CN_INPUTS = ("samples", "gaussian")

LN2 = math.log(2.0)


class ExitError(RuntimeError):
    pass


class WindowExhaustedError(ExitError):
    def __init__(self, message, trajectories=None):
        super().__init__(message)
        self.trajectories = trajectories or []


# --------------------------------------------------------------------------
# J-function

_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)
_U_LIMIT = 12.0


def _one_minus_j(sigma: np.ndarray) -> np.ndarray:
    """E[log2(1 + exp(-L))] for L ~ N(sigma^2/2, sigma^2), sigma > 0.

    Composite Gauss-Legendre in the standard-normal variable, with panel edges
    around the point where the LLR crosses zero."""
    s = sigma[:, None]
    u0 = -s / 2.0
    w = np.minimum(40.0 / s, _U_LIMIT)
    edges = np.concatenate([-np.full_like(s, _U_LIMIT), u0 - w, u0, u0 + w, np.full_like(s, _U_LIMIT)], axis=1)
    edges = np.clip(edges, -_U_LIMIT, _U_LIMIT)
    a, b = edges[:, :-1, None], edges[:, 1:, None]
    half = (b - a) / 2.0
    u = a + half * (_GL_X + 1.0)
    t = s[:, :, None] ** 2 / 2.0 + s[:, :, None] * u
    f = np.exp(-(u**2) / 2.0) / math.sqrt(2.0 * math.pi) * np.logaddexp(0.0, -t) / LN2
    return np.sum(half * f * _GL_W, axis=(1, 2))


def j_function(sigma):
    """Mutual information of a consistent-Gaussian LLR with std ``sigma``."""
    arr = np.asarray(sigma, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("sigma must be non-negative")
    flat = arr.ravel()
    out = np.zeros_like(flat)
    pos = flat > 0
    if np.any(pos):
        out[pos] = 1.0 - _one_minus_j(flat[pos])
    out = np.clip(out, 0.0, 1.0).reshape(arr.shape)
    return float(out) if np.ndim(sigma) == 0 else out


@lru_cache(maxsize=1)
def _j_table():
    sig = np.concatenate([np.linspace(0.0, 1.0, 401)[1:], np.linspace(1.0, 30.0, 5801)[1:]])
    omj = _one_minus_j(sig)
    keep = omj > 1e-300
    sig, logomj = sig[keep], np.log(omj[keep])
    # log(1 - J) falls strictly with sigma; store increasing for interp
    return sig[::-1].copy(), logomj[::-1].copy()


SIGMA_CAP = 16.5


def j_inverse(mi):
    """sigma with j_function(sigma) == mi, for mi in [0, 1)."""
    arr = np.asarray(mi, dtype=float)
    if np.any(arr < 0) or np.any(arr >= 1) or np.any(np.isnan(arr)):
        raise ValueError("mutual information must lie in [0, 1)")
    flat = arr.ravel()
    out = np.zeros_like(flat)
    pos = flat > 0
    if np.any(pos):
        target = np.log1p(-flat[pos])
        sig_t, logomj_t = _j_table()
        s = np.interp(target, logomj_t, sig_t)
        # Newton in log(1 - J) with a centred-difference slope
        for _ in range(4):
            h = np.maximum(1e-6, 1e-6 * s)
            g = np.log(_one_minus_j(s))
            gp = (np.log(_one_minus_j(s + h)) - np.log(_one_minus_j(np.maximum(s - h, 1e-12)))) / (s + h - np.maximum(s - h, 1e-12))
            s = np.maximum(s - (g - target) / gp, 1e-12)
        out[pos] = s
    out = out.reshape(arr.shape)
    return float(out) if np.ndim(mi) == 0 else out


def sigma_for_mi(mi):
    """j_inverse with MI values at (or numerically at) 1 mapped to SIGMA_CAP."""
    mi = np.clip(np.asarray(mi, dtype=float), 0.0, 1.0)
    cap = _mi_cap()
    out = np.where(mi >= cap, SIGMA_CAP, j_inverse(np.minimum(mi, cap)))
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=1)
def _mi_cap() -> float:
    return j_function(SIGMA_CAP)


# --------------------------------------------------------------------------
# time-average MI estimator


def estimate_mi(llrs) -> float:
    """1 - mean(log2(1 + exp(-L))) over LLR samples conditioned on bit 0, clamped to [0, 1]."""
    llrs = np.asarray(llrs, dtype=float)
    if llrs.size == 0:
        raise ValueError("no samples")
    raw = 1.0 - float(np.mean(np.logaddexp(0.0, -llrs))) / LN2
    return min(1.0, max(0.0, raw))


def consistent_gaussian(sigma: float, size: int, rng: np.random.Generator) -> np.ndarray:
    return sigma * sigma / 2.0 + sigma * rng.standard_normal(size)


# --------------------------------------------------------------------------
# shared result types


@dataclass
class ExitState:
    i_v2c: np.ndarray
    i_c2v: np.ndarray
    i_app: np.ndarray
    channel_gammas: np.ndarray
    iteration: int = 0

    @classmethod
    def initial(cls, base: BaseMatrix, channel_gammas) -> "ExitState":
        shape = base.entries.shape
        return cls(np.zeros(shape), np.zeros(shape), np.zeros(base.n_vars), np.asarray(channel_gammas, dtype=float), 0)


@dataclass
class Probe:
    ebn0_db: float
    converged: bool
    iterations: int
    min_iapp: float
    history: list[float] = field(default_factory=list, repr=False)


@dataclass
class ThresholdResult:
    threshold_db: float
    resolution_db: float
    trajectories: list[Probe]
    samples_m: int | None = None
    seed: int | None = None

    def monotone(self) -> bool:
        """True when no probe converges below a probe that fails."""
        probes = sorted(self.trajectories, key=lambda p: p.ebn0_db)
        seen_ok = False
        for p in probes:
            if p.converged:
                seen_ok = True
            elif seen_ok:
                return False
        return True

    def trajectory_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["ebn0_db", "iteration", "min_iapp", "converged"])
        for p in sorted(self.trajectories, key=lambda p: p.ebn0_db):
            for k, v in enumerate(p.history, start=1):
                w.writerow([f"{p.ebn0_db:.6g}", k, f"{v:.6g}", int(p.converged and k == len(p.history))])
        return buf.getvalue()


def _check_base(base: BaseMatrix, punctures: PunctureMask):
    if len(punctures.flags) != base.n_vars:
        raise ValueError("puncture mask length does not match the base matrix")
    if punctures.n_transmitted == 0:
        raise ExitError("cannot converge: every variable node is punctured")


def search_threshold(probe, window: tuple[float, float], resolution_db: float, coarse_step: float = COARSE_STEP_DB):
    """Lowest converging Eb/N0 on ``window``: a coarse upward scan brackets the
    transition, then bisection narrows it to ``resolution_db``."""
    lo_db, hi_db = window
    if not lo_db < hi_db:
        raise ValueError("empty window")
    if resolution_db <= 0:
        raise ValueError("resolution must be positive")
    probes: list[Probe] = []
    fail, ok = None, None
    x = lo_db
    while x <= hi_db + 1e-12:
        p = probe(x)
        probes.append(p)
        if p.converged:
            ok = x
            break
        fail = x
        x = round(x + coarse_step, 10)
    if ok is None:
        raise WindowExhaustedError(f"no convergence on [{lo_db}, {hi_db}] dB", probes)
    if fail is None:
        return ok, probes
    while ok - fail > resolution_db * (1 + 1e-9):
        mid = round((ok + fail) / 2.0, 10)
        p = probe(mid)
        probes.append(p)
        if p.converged:
            ok = mid
        else:
            fail = mid
    return ok, probes


# --------------------------------------------------------------------------
# closed-form AWGN P-EXIT


def awgn_pexit_probe(base: BaseMatrix, punctures: PunctureMask, ebn0_db: float, max_iter: int = MAX_ITERATIONS) -> Probe:
    _check_base(base, punctures)
    b = base.entries.astype(float)
    mask = b > 0
    rate = float(design_rate(base, punctures))
    sig_ch2 = np.where(punctures.as_array(), 0.0, 8.0 * rate * float(db_to_linear(ebn0_db)))
    i_c2v = np.zeros_like(b)
    history = []
    for it in range(1, max_iter + 1):
        s2_c2v = np.where(mask, sigma_for_mi(i_c2v) ** 2, 0.0)
        col = (b * s2_c2v).sum(axis=0)
        # VN -> CN: all incoming but one copy of the target edge
        v_arg = np.where(mask, sig_ch2[None, :] + col[None, :] - s2_c2v, 0.0)
        i_v2c = np.where(mask, j_function(np.sqrt(np.maximum(v_arg, 0.0))), 0.0)
        s2_v = np.where(mask, sigma_for_mi(1.0 - i_v2c) ** 2, 0.0)
        row = (b * s2_v).sum(axis=1)
        c_arg = np.where(mask, row[:, None] - s2_v, 0.0)
        i_c2v = np.where(mask, 1.0 - j_function(np.sqrt(np.maximum(c_arg, 0.0))), 0.0)
        s2_app = (b * np.where(mask, sigma_for_mi(i_c2v) ** 2, 0.0)).sum(axis=0)
        i_app = j_function(np.sqrt(sig_ch2 + s2_app))
        history.append(float(i_app.min()))
        if history[-1] >= CONVERGENCE_MI:
            return Probe(ebn0_db, True, it, history[-1], history)
        if it > STALL_WINDOW and history[-1] - history[-1 - STALL_WINDOW] < 1e-9:
            break
    return Probe(ebn0_db, False, len(history), history[-1], history)


def awgn_pexit_threshold(
    base: BaseMatrix,
    punctures: PunctureMask | None = None,
    resolution_db: float = 0.01,
    window: tuple[float, float] = (-2.0, 10.0),
    max_iter: int = MAX_ITERATIONS,
) -> ThresholdResult:
    if punctures is None:
        punctures = PunctureMask.none(base.n_vars)
    _check_base(base, punctures)
    thr, probes = search_threshold(lambda x: awgn_pexit_probe(base, punctures, x, max_iter), window, resolution_db)
    return ThresholdResult(thr, resolution_db, probes)


# --------------------------------------------------------------------------
# simulation-based P-EXIT


def _rng(seed: int, iteration: int, kind: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, iteration, kind, index])


_KIND_CHANNEL, _KIND_V2C, _KIND_C2V, _KIND_APP = 0, 1, 2, 3


def sample_channel_llrs(alpha: float, gamma: float, m: int, rng: np.random.Generator) -> np.ndarray:
    """Channel LLRs for the +1 symbol over SaS(alpha, gamma) noise (zeros when gamma == 0)."""
    if gamma == 0.0:
        return np.zeros(m)
    z = standard_sas(alpha, m, rng)
    if alpha == 2.0:
        # Gaussian: variance 2 gamma^2, LLR = 2y / variance
        return (1.0 + gamma * z) / (gamma * gamma)
    return llr_table(float(alpha), float(gamma))(1.0 + gamma * z)


def sas_pexit_iteration(
    state: ExitState,
    base: BaseMatrix,
    punctures: PunctureMask,
    alpha: float,
    m: int = DEFAULT_SAMPLES,
    seed: int = 0,
    threads: int = 1,
    cn_input: str = "samples",
) -> ExitState:
    """One round of VN update, CN update and a-posteriori accumulation."""
    b = base.entries
    if state.i_v2c.shape != b.shape or state.i_c2v.shape != b.shape or state.channel_gammas.shape != (base.n_vars,):
        raise ValueError("state shapes do not match the base matrix")
    if cn_input not in CN_INPUTS:
        raise ValueError(f"cn_input must be one of {CN_INPUTS}")
    it = state.iteration + 1
    gammas = np.where(punctures.as_array(), 0.0, state.channel_gammas)
    edges = base.edge_classes()
    edge_id = {e: k for k, e in enumerate(edges)}
    n_vars = base.n_vars

    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    run = (lambda fn, items: list(pool.map(fn, items))) if pool else (lambda fn, items: [fn(x) for x in items])
    try:
        ch = run(lambda j: sample_channel_llrs(alpha, float(gammas[j]), m, _rng(seed, it, _KIND_CHANNEL, j)), range(n_vars))

        s2_c2v = np.zeros(b.shape)
        for i, j in edges:
            s2_c2v[i, j] = sigma_for_mi(state.i_c2v[i, j]) ** 2

        def v2c(e):
            i, j = e
            s2 = float((b[:, j] * s2_c2v[:, j]).sum() - s2_c2v[i, j])
            rng = _rng(seed, it, _KIND_V2C, edge_id[e])
            out = ch[j] + consistent_gaussian(math.sqrt(max(s2, 0.0)), m, rng)
            return estimate_mi(out), out

        i_v2c = np.zeros(b.shape)
        v2c_llrs = {}
        for e, (v, out) in zip(edges, run(v2c, edges)):
            i_v2c[e] = v
            v2c_llrs[e] = out

        sig_v2c = np.zeros(b.shape)
        for i, j in edges:
            sig_v2c[i, j] = sigma_for_mi(i_v2c[i, j])

        def c2v(e):
            i, j = e
            rng = _rng(seed, it, _KIND_C2V, edge_id[e])
            sign = np.ones(m)
            total = np.zeros(m)
            for x in np.nonzero(b[i])[0]:
                for _ in range(int(b[i, x]) - (1 if x == j else 0)):
                    if cn_input == "samples":
                        llr = v2c_llrs[(i, int(x))][rng.permutation(m)]
                    else:
                        llr = consistent_gaussian(float(sig_v2c[i, x]), m, rng)
                    sign *= np.where(llr < 0, -1.0, 1.0)
                    total += phi(llr)
            return estimate_mi(sign * phi(total))

        i_c2v = np.zeros(b.shape)
        for e, v in zip(edges, run(c2v, edges)):
            i_c2v[e] = v

        s2_new = np.zeros(b.shape)
        for i, j in edges:
            s2_new[i, j] = sigma_for_mi(i_c2v[i, j]) ** 2

        def app(j):
            s2 = float((b[:, j] * s2_new[:, j]).sum())
            return estimate_mi(ch[j] + consistent_gaussian(math.sqrt(s2), m, _rng(seed, it, _KIND_APP, j)))

        i_app = np.array(run(app, range(n_vars)))
    finally:
        if pool:
            pool.shutdown()
    return ExitState(i_v2c, i_c2v, i_app, state.channel_gammas.copy(), it)


def channel_gammas(base: BaseMatrix, punctures: PunctureMask, ebn0_db: float, alpha: float) -> np.ndarray:
    rate = float(design_rate(base, punctures))
    return np.array([gamma_from_ebn0(ebn0_db, rate, alpha, punctured=p) for p in punctures.flags])


def sas_pexit_probe(
    base: BaseMatrix,
    punctures: PunctureMask,
    alpha: float,
    ebn0_db: float,
    m: int = DEFAULT_SAMPLES,
    seed: int = 0,
    max_iter: int = SAS_MAX_ITERATIONS,
    threads: int = 1,
    cn_input: str = "samples",
) -> Probe:
    _check_base(base, punctures)
    state = ExitState.initial(base, channel_gammas(base, punctures, ebn0_db, alpha))
    history = []
    best = -1.0
    best_at = 0
    for it in range(1, max_iter + 1):
        state = sas_pexit_iteration(state, base, punctures, alpha, m, seed, threads, cn_input)
        cur = float(state.i_app.min())
        history.append(cur)
        if cur >= CONVERGENCE_MI:
            return Probe(ebn0_db, True, it, cur, history)
        if cur > best + STALL_DELTA:
            best, best_at = cur, it
        elif it - best_at >= STALL_WINDOW:
            break
    return Probe(ebn0_db, False, len(history), history[-1], history)


def sas_pexit_threshold(
    base: BaseMatrix,
    punctures: PunctureMask | None = None,
    alpha: float = 1.8,
    m: int = DEFAULT_SAMPLES,
    window: tuple[float, float] = (-2.0, 10.0),
    resolution_db: float = 0.01,
    seed: int = 0,
    max_iter: int = SAS_MAX_ITERATIONS,
    threads: int = 1,
    cn_input: str = "samples",
) -> ThresholdResult:
    """Decoding threshold (dB) of the protograph ensemble over SaS noise."""
    if punctures is None:
        punctures = PunctureMask.none(base.n_vars)
    _check_base(base, punctures)
    if m < 1000:
        raise ValueError("at least 1000 samples per edge are required")
    thr, probes = search_threshold(
        lambda x: sas_pexit_probe(base, punctures, alpha, x, m, seed, max_iter, threads, cn_input), window, resolution_db
    )
    result = ThresholdResult(thr, resolution_db, probes, m, seed)
    if not result.monotone():
        raise ExitError("non-monotone convergence across probes; increase the sample count")
    return result


# --------------------------------------------------------------------------
# VND EXIT curves


def vnd_exit_curve(d_v: int, alpha: float, gamma: float, ia_grid, m: int = DEFAULT_SAMPLES, seed: int = 0):
    """(I_A, I_E) pairs for a degree-``d_v`` VN decoder with SaS channel
    (``alpha == 2`` for AWGN) and Gaussian a-priori input."""
    if d_v < 2:
        raise ValueError("d_v must be >= 2")
    out = []
    for k, ia in enumerate(ia_grid):
        rng = np.random.default_rng([seed, k])
        ch = sample_channel_llrs(alpha, gamma, m, rng)
        s = float(sigma_for_mi(ia))
        apri = consistent_gaussian(s * math.sqrt(d_v - 1), m, rng)
        out.append((float(ia), estimate_mi(ch + apri)))
    return out


def channel_mi(alpha: float, gamma: float, m: int = DEFAULT_SAMPLES, seed: int = 0) -> float:
    return estimate_mi(sample_channel_llrs(alpha, gamma, m, np.random.default_rng(seed)))
