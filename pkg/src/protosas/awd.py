"""Asymptotic weight distribution of protograph ensembles.

For lift size N, the ensemble-average number of codewords with N*delta_j ones
on the copies of each variable node j is

    prod_i A_i(delta) / prod_j C(N, N delta_j)^(d_j - 1),

where A_i counts the configurations of N copies of check i (a single parity
check over all its edges, parallel edges included) with the given column
weights.  ``check_node_exponent`` is lim (1/N) ln A_i, computed as the
Legendre transform of the even-weight enumerator; ``r_delta`` maximises the
total exponent over the per-VN weights and normalises by transmitted VNs.
"""

from __future__ import annotations

import functools
import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from .protograph import BaseMatrix, PunctureMask

PIN_TOL = 1e-12
_T_BOX = 60.0
_FEAS_TOL = 1e-12
_LN2 = math.log(2.0)
_SCREEN_ITER = 6
_POLISH = 3


def binary_entropy(p):
    """Natural-log binary entropy with 0 ln 0 = 0."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p > 0, p * np.log(p), 0.0) - np.where(p < 1, (1 - p) * np.log1p(-p), 0.0)
    return float(h) if h.ndim == 0 else h


@functools.lru_cache(maxsize=None)
def _facets(mult: tuple, odd: bool):
    """Coefficients and right-hand sides of the parity-polytope facets.

    For every choice S of edges with |S| of the wrong parity,
    sum_S delta - sum_{not S} delta <= |S| - 1.  With equal weights inside a
    bundle only the number of edges taken from each bundle matters."""
    rows, rhs = [], []
    for counts in itertools.product(*(range(w + 1) for w in mult)):
        size = sum(counts)
        if (size % 2 == 1) != odd:
            rows.append([2 * c - w for c, w in zip(counts, mult)])
            rhs.append(size - 1)
    return np.array(rows, dtype=float).reshape(-1, len(mult)), np.array(rhs, dtype=float)


def _feasible(deltas: np.ndarray, mult: np.ndarray, odd: bool) -> bool:
    coef, rhs = _facets(tuple(int(w) for w in mult), odd)
    return bool(np.all(coef @ deltas <= rhs + _FEAS_TOL))


@functools.lru_cache(maxsize=None)
def _masks(k: int):
    eye = np.eye(k, dtype=bool)
    return eye, eye[:, None, :] | eye[None, :, :]


def _objective(t, deltas, mult, sign):
    """ln g(e^t) - sum w delta t with gradient and Hessian."""
    k = len(t)
    th = np.tanh(t / 2.0)
    q = -th
    dq = -0.5 * (1.0 - th * th)
    d2q = 0.5 * th * (1.0 - th * th)
    sig = 0.5 * (1.0 + th)  # logistic(t)
    powers = q**mult
    first = mult * q ** (mult - 1) * dq
    qm2 = np.where(mult >= 2, q ** np.maximum(mult - 2, 0), 0.0)
    second = mult * (mult - 1) * qm2 * dq**2 + mult * q ** (mult - 1) * d2q
    eye, pair = _masks(k)
    rest = np.where(eye, 1.0, powers).prod(axis=1)
    rest2 = np.where(pair, 1.0, powers).prod(axis=2)
    p = sign * np.prod(powers)
    dp = sign * first * rest
    d2p = sign * np.outer(first, first) * rest2
    d2p[eye] = sign * second * rest
    onep = 1.0 + p
    if onep <= 0.0:
        return math.inf, None, None
    f = float(np.sum(mult * np.logaddexp(0.0, t)) + math.log1p(p) - _LN2 - np.sum(mult * deltas * t))
    g = mult * sig + dp / onep - mult * deltas
    h = d2p / onep - (dp[:, None] * dp[None, :]) / (onep * onep)
    h[eye] += mult * sig * (1.0 - sig)
    return f, g, h


def _legendre_min(deltas: np.ndarray, mult: np.ndarray, odd: bool, t0=None):
    """min_t [ln g(e^t) - sum w delta t] by damped Newton inside a box."""
    sign = -1.0 if odd else 1.0
    k = len(deltas)
    mult = mult.astype(float)
    t = np.clip(np.log(deltas / (1 - deltas)), -20, 20) if t0 is None else np.array(t0, dtype=float)
    ridge = 1e-12 * np.eye(k)
    f, g, h = _objective(t, deltas, mult, sign)
    if not math.isfinite(f):
        t = np.zeros(k)
        f, g, h = _objective(t, deltas, mult, sign)
    for _ in range(200):
        try:
            step = -np.linalg.solve(h + ridge, g)
        except np.linalg.LinAlgError:
            step = -g
        if g @ step > 0:
            step = -g
        lam = 1.0
        while lam > 1e-12:
            tn = np.clip(t + lam * step, -_T_BOX, _T_BOX)
            fn, gn, hn = _objective(tn, deltas, mult, sign)
            if fn <= f + 1e-4 * lam * (g @ (tn - t)) or fn < f:
                break
            lam *= 0.5
        else:
            break
        done = abs(f - fn) < 1e-15 * max(1.0, abs(f)) and np.max(np.abs(tn - t)) < 1e-10
        t, f, g, h = tn, fn, gn, hn
        # gradient components pinned against the box are not required to vanish
        free = ~(((t >= _T_BOX) & (g < 0)) | ((t <= -_T_BOX) & (g > 0)))
        if np.max(np.abs(g[free]), initial=0.0) < 1e-13 or done:
            break
    return f, t


def _bundle_exponent(deltas: Sequence[float], mult: Sequence[int], warm: dict | None = None):
    """Exponent and per-bundle slope d a / d delta_k (per edge) for a check
    whose bundle k has ``mult[k]`` edges each carrying weight ``deltas[k]``.
    ``warm`` caches the last saddle point per active pattern."""
    deltas = np.asarray(deltas, dtype=float)
    mult = np.asarray(mult, dtype=int)
    if np.any(deltas < -PIN_TOL) or np.any(deltas > 1 + PIN_TOL):
        raise ValueError("normalised weights must lie in [0, 1]")
    odd = False
    keep = []
    for k, (d, w) in enumerate(zip(deltas, mult)):
        if w == 0 or d <= PIN_TOL:
            continue
        if d >= 1 - PIN_TOL:
            odd ^= bool(w % 2)
            continue
        keep.append(k)
    slopes = np.zeros(len(deltas))
    if not keep:
        return (-math.inf if odd else 0.0), slopes
    dk, wk = deltas[keep], mult[keep]
    if not _feasible(dk, wk, odd):
        return -math.inf, slopes
    key = (tuple(keep), odd)
    t0 = warm.get(key) if warm is not None else None
    val, t = _legendre_min(dk, wk, odd, t0)
    if warm is not None:
        warm[key] = t
    slopes[keep] = -t
    return val, slopes


def check_node_exponent(edge_deltas: Sequence[float]) -> float:
    """lim (1/N) ln #{N x d binary arrays, rows of even weight, column e of
    weight N * edge_deltas[e]}; -inf when no such array exists."""
    edge_deltas = [float(d) for d in edge_deltas]
    if len(edge_deltas) < 2:
        raise ValueError("a check node needs degree >= 2")
    if any(d < 0 or d > 1 for d in edge_deltas):
        raise ValueError("normalised weights must lie in [0, 1]")
    values = sorted(set(edge_deltas))
    mult = [edge_deltas.count(v) for v in values]
    return _bundle_exponent(values, mult)[0]


# --------------------------------------------------------------------------
# ensemble exponent


class _Ensemble:
    def __init__(self, base: BaseMatrix, punctures: PunctureMask):
        self.b = base.entries
        self.deg = base.var_degrees.astype(float)
        self.punct = punctures.as_array()
        self.tx = ~self.punct
        self.s_t = int(self.tx.sum())
        self.rows = [(np.nonzero(self.b[i])[0], self.b[i][np.nonzero(self.b[i])[0]]) for i in range(base.n_checks)]
        self.warm = [dict() for _ in self.rows]

    def value_grad(self, x: np.ndarray):
        x = np.clip(x, 0.0, 1.0)
        total = -float(np.sum((self.deg - 1.0) * binary_entropy(x)))
        with np.errstate(divide="ignore"):
            dh = np.log((1.0 - x) / x)
        grad = -(self.deg - 1.0) * dh
        for (cols, mult), warm in zip(self.rows, self.warm):
            val, slopes = _bundle_exponent(x[cols], mult, warm)
            if not math.isfinite(val):
                return -math.inf, np.zeros_like(x)
            total += val
            grad[cols] += mult * slopes
        return total, grad


def _maximise(ens: _Ensemble, delta: float, rng: np.random.Generator, restarts: int):
    lo, hi = 1e-9, 1.0 - 1e-9
    target = ens.s_t * delta
    n = len(ens.deg)
    starts = [np.full(n, delta)]
    for r in range(restarts):
        x = np.empty(n)
        w = rng.dirichlet(np.ones(ens.s_t)) * target
        x[ens.tx] = np.minimum(w, hi)
        spread = 1.0 if r % 2 else min(1.0, 4.0 * delta)
        x[ens.punct] = rng.uniform(0.0, spread, size=int(ens.punct.sum()))
        starts.append(x)

    def fun(x):
        v, g = ens.value_grad(x)
        if not math.isfinite(v):
            return 1e6, np.zeros_like(x)
        return -v, -g

    cons = {"type": "eq", "fun": lambda x: float(np.sum(x[ens.tx]) - target), "jac": lambda x: ens.tx.astype(float)}
    bounds = [(lo, hi)] * n

    def run(x0, maxiter):
        # SLSQP warns when a line search steps outside the box; fun clips anyway
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = optimize.minimize(fun, x0, jac=True, method="SLSQP", bounds=bounds, constraints=[cons], options={"ftol": 1e-12, "maxiter": maxiter})
        return np.clip(res.x, lo, hi)

    # short runs from every start, full polish of the most promising ones
    screened = []
    for x0 in starts:
        x0 = np.clip(x0, lo, hi)
        # restore the weight constraint after clipping
        x0[ens.tx] *= target / x0[ens.tx].sum()
        x = run(x0, _SCREEN_ITER)
        screened.append((ens.value_grad(x)[0], x))
    order = sorted(range(len(screened)), key=lambda k: (-screened[k][0], k))
    best = -math.inf
    best_x = None
    for k in order[:_POLISH]:
        x = run(screened[k][1], 300)
        if abs(np.sum(x[ens.tx]) - target) > 1e-9:
            continue
        v, _ = ens.value_grad(x)
        if v > best:
            best, best_x = v, x
    return best, best_x


def r_delta(base: BaseMatrix, punctures: PunctureMask | None = None, delta: float = 0.01, restarts: int = 20, seed: int = 0, return_weights: bool = False):
    """Normalised log asymptotic weight enumerator at transmitted weight ratio ``delta``."""
    if punctures is None:
        punctures = PunctureMask.none(base.n_vars)
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    ens = _Ensemble(base, punctures)
    if ens.s_t == 0:
        raise ValueError("no transmitted variable nodes")
    if delta * ens.s_t > ens.s_t:
        raise ValueError("infeasible weight constraint")
    best, x = _maximise(ens, delta, np.random.default_rng([seed, int(round(delta * 1e12))]), restarts)
    r = best / ens.s_t
    return (r, x) if return_weights else r


@dataclass
class WeightSpectrum:
    deltas: np.ndarray
    r_values: np.ndarray
    delta2c: float | None
    s_t: int

    def to_csv(self) -> str:
        lines = ["delta,r_delta"] + [f"{d:.6g},{r:.6g}" for d, r in zip(self.deltas, self.r_values)]
        lines.append(f"# delta2c={'none' if self.delta2c is None else format(self.delta2c, '.6g')}")
        return "\n".join(lines) + "\n"


def typical_min_distance_ratio(
    base: BaseMatrix,
    punctures: PunctureMask | None = None,
    grid_step: float = 1e-3,
    delta_max: float = 0.5,
    restarts: int = 20,
    seed: int = 0,
    spectrum: bool = False,
):
    """Second zero crossing of r(delta), or None when r is non-negative from the
    first grid point (no linear minimum-distance growth)."""
    if not 0.0 < grid_step <= 1e-2:
        raise ValueError("grid_step must lie in (0, 0.01]")
    if punctures is None:
        punctures = PunctureMask.none(base.n_vars)
    ev = lambda d: r_delta(base, punctures, d, restarts, seed)
    deltas, values = [], []
    crossing = None
    k = 1
    while k * grid_step <= delta_max + 1e-12:
        d = k * grid_step
        r = ev(d)
        deltas.append(d)
        values.append(r)
        if r >= 0.0:
            if k > 1:
                lo, hi = d - grid_step, d
                while hi - lo > grid_step / 10.0:
                    mid = 0.5 * (lo + hi)
                    rm = ev(mid)
                    deltas.append(mid)
                    values.append(rm)
                    if rm >= 0.0:
                        hi = mid
                    else:
                        lo = mid
                crossing = 0.5 * (lo + hi)
            break
        k += 1
    if spectrum:
        order = np.argsort(deltas)
        return WeightSpectrum(np.array(deltas)[order], np.array(values)[order], crossing, int(punctures.n_transmitted))
    return crossing


def weight_spectrum(base: BaseMatrix, punctures: PunctureMask | None, deltas, restarts: int = 20, seed: int = 0) -> WeightSpectrum:
    if punctures is None:
        punctures = PunctureMask.none(base.n_vars)
    deltas = np.asarray(deltas, dtype=float)
    vals = np.array([r_delta(base, punctures, d, restarts, seed) for d in deltas])
    crossing = None
    neg = False
    for d, r in zip(deltas, vals):
        if r < 0:
            neg = True
        elif neg:
            crossing = float(d)
            break
    return WeightSpectrum(deltas, vals, crossing, int(punctures.n_transmitted))
