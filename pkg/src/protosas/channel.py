"""Additive white symmetric alpha-stable noise (AWSaSN) channel.

Densities of the standard SaS law exp(-|l|^alpha) are obtained numerically:
a cosine-transform quadrature of the characteristic function in the body of
the law, Zolotarev's integral representation in the tails (log domain, so the
Gaussian limit stays accurate far out), and the convergent/asymptotic power
series beyond ``_SERIES_Z``.  Everything else scales by the dispersion gamma.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special
from scipy.interpolate import CubicSpline

C_G = 1.78

# grid of the cached standard log-density spline, in s = log1p(z)
_SPLINE_ZMAX = 200.0
_SPLINE_NODES = 1600
# beyond this the tail series is used directly
_SERIES_Z = 200.0
_SERIES_TERMS = 6
# cosine transform is trusted up to here; Zolotarev takes over
_FOURIER_Z = 2.0
_CAUCHY_FOURIER_Z = 1000.0

LLR_GRID_HALFWIDTH = 40.0
LLR_GRID_STEP = 1e-3


class InvalidParameterError(ValueError):
    pass


@dataclass(frozen=True)
class SAlphaSParams:
    """Characteristic exponent ``alpha`` and dispersion ``gamma``.

    ``gamma == 0`` is the punctured-node sentinel (no channel observation).
    """

    alpha: float
    gamma: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise InvalidParameterError(f"alpha must lie in (0, 2], got {self.alpha}")
        if self.gamma < 0.0 or not math.isfinite(self.gamma):
            raise InvalidParameterError(f"gamma must be finite and >= 0, got {self.gamma}")

    @property
    def punctured(self) -> bool:
        return self.gamma == 0.0


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


# --------------------------------------------------------------------------
# standard density (gamma = 1), z >= 0


def _quad(*args, **kw):
    # tolerances sit near double precision on purpose; quad's roundoff notices
    # are expected there and the achieved accuracy is checked in the tests
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(*args, **kw)


def _pdf_fourier(z: float, alpha: float) -> float:
    """(1/pi) * int_0^inf exp(-l^alpha) cos(l z) dl, truncated where the
    characteristic function drops below 1e-16."""
    lmax = (-math.log(1e-16)) ** (1.0 / alpha)
    f = lambda l: math.exp(-(l**alpha))
    if z == 0.0:
        return special.gamma(1.0 + 1.0 / alpha) / math.pi
    val, _ = _quad(f, 0.0, lmax, weight="cos", wvar=z, epsabs=1e-15, epsrel=1e-13, limit=2000)
    return val / math.pi


def _logu(theta, alpha, logc):
    # log of u(theta) = z^(alpha/(alpha-1)) * V(theta), symmetric case
    with np.errstate(divide="ignore", invalid="ignore"):
        logv = (
            (math.log(math.cos(theta)) if theta < math.pi / 2 else -math.inf) / (alpha - 1.0)
            + math.log(math.cos((alpha - 1.0) * theta))
            - alpha / (alpha - 1.0) * math.log(math.sin(alpha * theta))
        )
    return logc + logv


def _logpdf_zolotarev(z: float, alpha: float) -> float:
    """log f(z) for z > 0, alpha != 1, via Zolotarev's representation
    f(z) = alpha / (pi |alpha-1| z) * int_0^{pi/2} u exp(-u) dtheta."""
    logc = alpha / (alpha - 1.0) * math.log(z)
    eps = 1e-15
    lo, hi = eps, math.pi / 2 - eps
    lu_lo = _logu(lo, alpha, logc)
    lu_hi = _logu(hi, alpha, logc) if alpha != 2.0 else logc - math.log(4.0)
    # u is monotone in theta, minimal at one end (zero unless alpha == 2)
    umin = math.exp(min(lu_lo, lu_hi, 700.0))

    def logu(theta):
        if alpha == 2.0 and theta >= hi:
            return lu_hi
        return _logu(theta, alpha, logc)

    def integrand(theta):
        lu = logu(theta)
        if lu > 700.0:
            return 0.0
        return math.exp(lu - (math.exp(lu) - umin))

    # the integrand is negligible outside umin*[e^-50, ...] .. umin + 60; split
    # at level sets of u so quad sees the (possibly very narrow) peak
    if umin < 1e-300:
        levels = [-50.0, -20.0, -8.0, -3.0, -1.0, 0.0, 1.0, 2.0, math.log(60.0)]
    else:
        levels = [math.log(umin + v) for v in (1e-3, 0.1, 1.0, 3.0, 10.0, 60.0)]
    cuts = []
    span = sorted((lu_lo, lu_hi))
    for lev in levels:
        if span[0] < lev < span[1]:
            cuts.append(optimize.brentq(lambda t: logu(t) - lev, lo, hi, xtol=1e-15, rtol=1e-15))
    if umin >= 1e-300:
        cuts.append(lo if lu_lo < lu_hi else hi)
    cuts = sorted(set(cuts))
    if len(cuts) < 2:
        cuts = [0.0, math.pi / 2]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, _ = _quad(integrand, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
        total += val
    if total <= 0.0:
        return -math.inf
    return math.log(alpha / (math.pi * abs(alpha - 1.0) * z)) - umin + math.log(total)


def _logpdf_series(z, alpha: float, terms: int = _SERIES_TERMS):
    """Tail series (1/pi) sum_k (-1)^(k+1) Gamma(alpha k + 1)/k! sin(k pi alpha/2) z^(-alpha k - 1)."""
    z = np.asarray(z, dtype=float)
    k = np.arange(1, terms + 1)
    coef = (-1.0) ** (k + 1) * np.exp(special.gammaln(alpha * k + 1) - special.gammaln(k + 1)) * np.sin(k * np.pi * alpha / 2)
    lead = coef[0]
    zz = z[..., None] ** (-alpha * (k - 1))
    rel = (coef / lead * zz).sum(axis=-1)
    return np.log(lead / np.pi) - (alpha + 1.0) * np.log(z) + np.log(rel)


def std_logpdf_exact(z: float, alpha: float) -> float:
    """log of the standard SaS density at ``z`` by direct quadrature."""
    z = abs(float(z))
    if alpha == 1.0:
        if z <= _CAUCHY_FOURIER_Z:
            return math.log(_pdf_fourier(z, alpha))
        return float(_logpdf_series(z, alpha))
    if z <= _FOURIER_Z:
        return math.log(_pdf_fourier(z, alpha))
    if z > _SERIES_Z and alpha < 2.0:
        return float(_logpdf_series(z, alpha))
    return _logpdf_zolotarev(z, alpha)


@lru_cache(maxsize=32)
def _std_logpdf_spline(alpha: float) -> CubicSpline:
    s = np.linspace(0.0, math.log1p(_SPLINE_ZMAX), _SPLINE_NODES)
    vals = np.array([std_logpdf_exact(z, alpha) for z in np.expm1(s)])
    # log f is even in z, so its derivative in s vanishes at the origin
    return CubicSpline(s, vals, bc_type=((1, 0.0), "not-a-knot"))


def std_logpdf(z, alpha: float):
    """Vectorised log standard density from the cached spline + tail series."""
    z = np.abs(np.asarray(z, dtype=float))
    out = np.empty_like(z)
    body = z <= _SPLINE_ZMAX
    if np.any(body):
        out[body] = _std_logpdf_spline(float(alpha))(np.log1p(z[body]))
    if np.any(~body):
        if alpha == 2.0:
            out[~body] = -z[~body] ** 2 / 4.0 - math.log(2.0 * math.sqrt(math.pi))
        else:
            out[~body] = _logpdf_series(z[~body], alpha)
    return out


# --------------------------------------------------------------------------
# public density / sampling / LLR


def sas_pdf(x, params: SAlphaSParams):
    """SaS density f_alpha(x; gamma) by numeric inversion of the characteristic function."""
    if params.gamma == 0.0:
        raise InvalidParameterError("density is undefined for gamma = 0")
    g = params.gamma
    if np.ndim(x) == 0:
        return math.exp(std_logpdf_exact(float(x) / g, params.alpha)) / g
    return np.array([math.exp(std_logpdf_exact(float(v) / g, params.alpha)) / g for v in np.ravel(x)]).reshape(np.shape(x))


def sas_logpdf(x, params: SAlphaSParams) -> float:
    if params.gamma == 0.0:
        raise InvalidParameterError("density is undefined for gamma = 0")
    return std_logpdf_exact(float(x) / params.gamma, params.alpha) - math.log(params.gamma)


def sas_sample(params: SAlphaSParams, count: int, seed=None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Chambers-Mallows-Stuck draws from SaS(alpha, gamma)."""
    if count < 1:
        raise InvalidParameterError("count must be >= 1")
    if rng is None:
        rng = np.random.default_rng(seed)
    return params.gamma * standard_sas(params.alpha, count, rng)


def standard_sas(alpha: float, count: int, rng: np.random.Generator) -> np.ndarray:
    phi = rng.uniform(-np.pi / 2, np.pi / 2, size=count)
    w = rng.standard_exponential(size=count)
    if alpha == 1.0:
        return np.tan(phi)
    if alpha == 2.0:
        return 2.0 * np.sqrt(w) * np.sin(phi)
    return np.sin(alpha * phi) / np.cos(phi) ** (1.0 / alpha) * (np.cos((1.0 - alpha) * phi) / w) ** ((1.0 - alpha) / alpha)


def channel_llr(y: float, params: SAlphaSParams) -> float:
    """log f(y-1)/f(y+1) for BPSK over SaS noise, evaluated in the log domain."""
    if params.gamma == 0.0:
        return 0.0
    y = float(y)
    if y == 0.0:
        return 0.0
    sign = 1.0 if y > 0 else -1.0
    a = abs(y)
    g = params.gamma
    return sign * (std_logpdf_exact((a - 1.0) / g, params.alpha) - std_logpdf_exact((a + 1.0) / g, params.alpha))


@dataclass(frozen=True)
class LlrTable:
    """Channel LLR on a uniform grid, linearly interpolated; outside the grid
    the LLR is evaluated from the tail-extended log-density."""

    params: SAlphaSParams
    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, params: SAlphaSParams, halfwidth: float = LLR_GRID_HALFWIDTH, step: float = LLR_GRID_STEP) -> "LlrTable":
        n = int(round(halfwidth / step))
        grid = np.arange(-n, n + 1) * step
        if params.gamma == 0.0:
            return cls(params, grid, np.zeros_like(grid))
        pos = grid[n:]
        vals = _llr_from_spline(pos, params)
        values = np.concatenate([-vals[:0:-1], vals])
        return cls(params, grid, values)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if self.params.gamma == 0.0:
            return np.zeros_like(y)
        out = np.interp(y, self.grid, self.values)
        outside = np.abs(y) > self.grid[-1]
        if np.any(outside):
            out[outside] = _llr_from_spline(y[outside], self.params)
        return out


def _llr_from_spline(y, params: SAlphaSParams):
    y = np.asarray(y, dtype=float)
    g = params.gamma
    return std_logpdf((y - 1.0) / g, params.alpha) - std_logpdf((y + 1.0) / g, params.alpha)


@lru_cache(maxsize=64)
def llr_table(alpha: float, gamma: float) -> LlrTable:
    return LlrTable.build(SAlphaSParams(alpha, gamma))


# --------------------------------------------------------------------------
# SNR bookkeeping


def dispersion_factor(alpha: float) -> float:
    return C_G ** (2.0 / alpha - 1.0)


def gamma_from_ebn0(ebn0_db: float, rate: float, alpha: float, punctured: bool = False) -> float:
    """Dispersion giving the requested Eb/N0 at code rate ``rate``."""
    if punctured:
        return 0.0
    if not (0.0 < rate < 1.0):
        raise InvalidParameterError(f"rate must lie in (0, 1), got {rate}")
    if not (0.0 < alpha <= 2.0):
        raise InvalidParameterError(f"alpha must lie in (0, 2], got {alpha}")
    ebn0 = float(db_to_linear(ebn0_db))
    if not ebn0 > 0.0:
        raise InvalidParameterError("Eb/N0 must be positive")
    return math.sqrt(1.0 / (4.0 * rate * dispersion_factor(alpha) * ebn0))


def gsnr_from_gamma(gamma: float, alpha: float) -> float:
    if gamma <= 0.0:
        raise InvalidParameterError("gamma must be positive")
    return 1.0 / (2.0 * dispersion_factor(alpha) * gamma**2)


def gamma_from_gsnr(gsnr: float, alpha: float) -> float:
    if gsnr <= 0.0:
        raise InvalidParameterError("G-SNR must be positive")
    return math.sqrt(1.0 / (2.0 * dispersion_factor(alpha) * gsnr))


@dataclass(frozen=True)
class ChannelConfig:
    rate: float
    ebn0_db: float | None = None
    gsnr: float | None = None
    euler_const: float = C_G

    def __post_init__(self):
        if not (0.0 < self.rate < 1.0):
            raise InvalidParameterError(f"rate must lie in (0, 1), got {self.rate}")

    @property
    def ebn0_linear(self) -> float:
        return float(db_to_linear(self.ebn0_db))


def gsnr_ebn0_convert(config: ChannelConfig, direction: str = "to_gsnr") -> ChannelConfig:
    """Fill in G-SNR from Eb/N0 (``to_gsnr``) or the reverse (``to_ebn0``)."""
    if direction == "to_gsnr":
        if config.ebn0_db is None:
            raise InvalidParameterError("ebn0_db is required")
        return replace(config, gsnr=2.0 * config.rate * config.ebn0_linear)
    if direction == "to_ebn0":
        if config.gsnr is None or config.gsnr <= 0.0:
            raise InvalidParameterError("a positive gsnr is required")
        return replace(config, ebn0_db=float(linear_to_db(config.gsnr / (2.0 * config.rate))))
    raise ValueError(f"unknown direction {direction!r}")
