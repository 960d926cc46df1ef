import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

import oracle_values as ov
from protosas.channel import (
    C_G,
    ChannelConfig,
    InvalidParameterError,
    SAlphaSParams,
    channel_llr,
    gamma_from_ebn0,
    gamma_from_gsnr,
    gsnr_ebn0_convert,
    gsnr_from_gamma,
    llr_table,
    sas_pdf,
    sas_sample,
)


def test_params_validation():
    with pytest.raises(InvalidParameterError):
        SAlphaSParams(0.0)
    with pytest.raises(InvalidParameterError):
        SAlphaSParams(2.1)
    with pytest.raises(InvalidParameterError):
        SAlphaSParams(1.5, -1.0)
    assert SAlphaSParams(1.5, 0.0).punctured


def test_pdf_closed_forms_at_origin():
    assert sas_pdf(0.0, SAlphaSParams(1.0, 1.0)) == pytest.approx(1 / math.pi, rel=1e-12)
    assert sas_pdf(0.0, SAlphaSParams(2.0, 1.0)) == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-12)


def test_pdf_frozen_oracle():
    assert sas_pdf(1.0, SAlphaSParams(1.5, 1.0)) == pytest.approx(ov.PDF_ALPHA15_X1, rel=1e-8)


def test_pdf_gamma_zero_rejected():
    with pytest.raises(InvalidParameterError):
        sas_pdf(0.3, SAlphaSParams(1.2, 0.0))


@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_pdf_matches_closed_forms(alpha):
    g = 0.7
    xs = np.linspace(-20, 20, 161)
    got = sas_pdf(xs, SAlphaSParams(alpha, g))
    if alpha == 1.0:
        ref = g / (math.pi * (g * g + xs**2))
    else:
        ref = np.exp(-(xs**2) / (4 * g * g)) / (2 * g * math.sqrt(math.pi))
    mask = ref > 1e-300
    assert np.max(np.abs(got[mask] / ref[mask] - 1)) < 1e-8


@pytest.mark.parametrize("alpha", [0.7, 1.3, 1.8])
def test_pdf_integrates_to_one(alpha):
    p = SAlphaSParams(alpha, 1.0)
    body, _ = integrate.quad(lambda x: sas_pdf(x, p), -50, 50, limit=400)
    # tails beyond 50 from the first terms of the asymptotic series
    tail = sum(
        (2 / math.pi) * (-1) ** (k + 1) * math.gamma(alpha * k + 1) / math.factorial(k) * math.sin(k * math.pi * alpha / 2) * 50.0 ** (-alpha * k) / (alpha * k)
        for k in (1, 2, 3)
    )
    assert body + tail == pytest.approx(1.0, abs=2e-4)


def test_pdf_agrees_with_scipy_levy_stable():
    # scipy's stable law with beta=0, scale=gamma is the same SaS family
    for alpha, x in [(1.2, 0.4), (1.5, 3.0), (1.9, -2.5)]:
        ref = stats.levy_stable.pdf(x, alpha, 0.0)
        assert sas_pdf(x, SAlphaSParams(alpha, 1.0)) == pytest.approx(ref, rel=1e-5)


def test_sampler_cauchy_median():
    z = sas_sample(SAlphaSParams(1.0, 1.0), 1_000_000, seed=11)
    assert abs(np.median(z)) < 0.01


def test_sampler_gaussian_variance():
    z = sas_sample(SAlphaSParams(2.0, 1.0), 1_000_000, seed=12)
    assert np.var(z) == pytest.approx(2.0, rel=0.02)


def test_sampler_ks_against_quadrature_cdf():
    p = SAlphaSParams(1.5, 1.0)
    z = np.sort(sas_sample(p, 100_000, seed=13))
    grid = np.linspace(-15, 15, 601)
    dens = sas_pdf(grid, p)
    cdf = integrate.cumulative_trapezoid(dens, grid, initial=0.0)
    # mass below -15 from the tail asymptotic
    cdf += math.gamma(1.5) * math.sin(math.pi * 0.75) / (1.5 * math.pi) * 15.0**-1.5
    inside = (z > grid[0]) & (z < grid[-1])
    emp = np.searchsorted(z, grid, side="right") / z.size
    d = np.max(np.abs(emp - cdf))
    assert inside.mean() > 0.98
    assert d < 1.63 / math.sqrt(z.size)


def test_sampler_deterministic():
    p = SAlphaSParams(1.3, 2.0)
    assert np.array_equal(sas_sample(p, 10, seed=5), sas_sample(p, 10, seed=5))


def test_llr_examples():
    assert channel_llr(0.0, SAlphaSParams(1.4, 0.9)) == 0.0
    assert channel_llr(1.0, SAlphaSParams(1.0, 1.0)) == pytest.approx(math.log(5), abs=1e-10)
    assert channel_llr(0.5, SAlphaSParams(1.8, 0.8)) == pytest.approx(ov.LLR_ALPHA18_G08_Y05, abs=1e-9)
    assert channel_llr(3.0, SAlphaSParams(1.5, 0.0)) == 0.0


@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_llr_matches_closed_forms(alpha):
    g = 0.6
    p = SAlphaSParams(alpha, g)
    ys = np.linspace(-20, 20, 201)
    got = np.array([channel_llr(y, p) for y in ys])
    if alpha == 1.0:
        ref = np.log((g * g + (ys + 1) ** 2) / (g * g + (ys - 1) ** 2))
    else:
        ref = ys / (g * g)  # 2y / sigma^2 with sigma^2 = 2 gamma^2
    assert np.max(np.abs(got - ref)) < 1e-6


def test_llr_extreme_inputs_finite():
    p = SAlphaSParams(1.7, 0.5)
    for y in [1e3, 1e6, 1e12, -1e9]:
        v = channel_llr(y, p)
        assert math.isfinite(v)
    # for alpha < 2 the LLR decays back to zero far out
    assert abs(channel_llr(1e6, p)) < 1e-3


@given(st.floats(0.3, 2.0), st.floats(0.1, 3.0), st.floats(-60, 60))
def test_llr_odd(alpha, gamma, y):
    p = SAlphaSParams(alpha, gamma)
    assert channel_llr(-y, p) == -channel_llr(y, p)


@given(st.floats(1.0, 2.0), st.floats(0.2, 1.5))
def test_llr_table_odd_and_close(alpha, gamma):
    tab = llr_table(round(alpha, 2), round(gamma, 2))
    p = SAlphaSParams(round(alpha, 2), round(gamma, 2))
    ys = np.array([0.013, 0.5, 1.7, 7.25, 33.3, 95.0])
    vals = tab(ys)
    assert np.array_equal(tab(-ys), -vals)
    ref = np.array([channel_llr(y, p) for y in ys])
    assert np.max(np.abs(vals - ref)) < 1e-4 * max(1.0, np.max(np.abs(ref)))


def test_gamma_from_ebn0_formula():
    for alpha in [1.0, 1.5, 2.0]:
        g = gamma_from_ebn0(1.5, 0.5, alpha)
        lin = 10 ** 0.15
        assert g == pytest.approx(math.sqrt(1 / (4 * 0.5 * C_G ** (2 / alpha - 1) * lin)), rel=1e-14)
        # the G-SNR of that gamma maps back to the same Eb/N0
        assert gsnr_from_gamma(g, alpha) / (2 * 0.5) == pytest.approx(lin, rel=1e-12)
        assert gamma_from_gsnr(gsnr_from_gamma(g, alpha), alpha) == pytest.approx(g, rel=1e-12)


def test_gamma_from_ebn0_punctured_and_errors():
    assert gamma_from_ebn0(2.0, 0.5, 1.2, punctured=True) == 0.0
    with pytest.raises(InvalidParameterError):
        gamma_from_ebn0(-math.inf, 0.5, 1.2)
    with pytest.raises(InvalidParameterError):
        gamma_from_ebn0(1.0, 1.5, 1.2)


def test_alpha_two_is_gaussian_awgn():
    # alpha = 2 must reproduce BPSK-AWGN: sigma^2 = 2 gamma^2 = 1/(2 R Eb/N0)
    g = gamma_from_ebn0(2.0, 0.5, 2.0)
    assert 2 * g * g == pytest.approx(1 / (2 * 0.5 * 10**0.2), rel=1e-14)


@given(st.fractions(min_value=0.05, max_value=0.95), st.floats(-5, 15))
def test_channel_config_roundtrip(rate, ebn0_db):
    cfg = gsnr_ebn0_convert(ChannelConfig(rate=rate, ebn0_db=ebn0_db), "to_gsnr")
    assert cfg.gsnr == pytest.approx(2 * float(rate) * 10 ** (ebn0_db / 10), rel=1e-12)
    back = gsnr_ebn0_convert(ChannelConfig(rate=rate, gsnr=cfg.gsnr), "to_ebn0")
    assert back.ebn0_db == pytest.approx(ebn0_db, abs=1e-9)
    assert cfg.euler_const == C_G == 1.78


def test_gamma_and_gsnr_examples():
    assert gamma_from_ebn0(0.0, 0.5, 2.0) == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    assert gamma_from_ebn0(0.0, 0.5, 1.0) == pytest.approx(0.52999, abs=1e-5)
    g = gsnr_from_gamma(1.0, 1.0)
    assert g == pytest.approx(1 / (2 * 1.78), rel=1e-12)
    assert 10 * math.log10(g) == pytest.approx(-5.514, abs=1e-3)


def test_heavier_tails_as_alpha_drops():
    alphas = [2.0, 1.5, 1.0, 0.5]
    peak = [sas_pdf(0.0, SAlphaSParams(a, 1.0)) for a in alphas]
    assert all(b > a for a, b in zip(peak, peak[1:]))
    tail = []
    for a in alphas:
        p = SAlphaSParams(a, 1.0)
        inner, _ = integrate.quad(lambda x: sas_pdf(x, p), -5, 5, limit=200)
        tail.append(1 - inner)
    assert all(b > a for a, b in zip(tail, tail[1:]))


@pytest.mark.parametrize("alpha", [1.0, 1.5, 1.9])
def test_mass_on_truncated_window(alpha):
    p = SAlphaSParams(alpha, 1.0)
    mass, _ = integrate.quad(lambda x: sas_pdf(x, p), -200, 200, limit=500, points=[-5, 0, 5])
    assert 0.99 <= mass <= 1.0 + 1e-9
