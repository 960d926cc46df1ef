import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from protosas.channel import gamma_from_ebn0
from protosas.decoder import BerPoint, ber_csv, ber_simulate, block_llrs, bp_decode
from protosas.protograph import BaseMatrix, LiftedCode, ar4ja, designed, lift


def k6_cycle_code():
    # one variable per edge of the complete graph on 6 checks: n=15, k=10, d_min=3
    pairs = list(itertools.combinations(range(6), 2))
    h = np.zeros((6, 15), dtype=np.uint8)
    for j, (a, b) in enumerate(pairs):
        h[a, j] = h[b, j] = 1
    return LiftedCode.from_dense(h)


def codewords(code):
    h = code.h.toarray().astype(np.int64)
    return np.array([w for w in itertools.product((0, 1), repeat=code.n) if not ((h @ np.array(w)) % 2).any()])


@pytest.fixture(scope="module")
def small_designed():
    base, p = designed()
    return lift(base, 24, seed=1, punctures=p)


def test_noiseless_input(small_designed):
    code = small_designed
    llr = np.where(code.transmitted_mask, 50.0, 0.0)
    res = bp_decode(code, llr)
    assert res.converged and res.iterations_used <= 5
    assert not res.hard_decisions.any()


def test_adversarial_input_is_flagged(small_designed):
    code = small_designed
    res = bp_decode(code, np.full(code.n, -50.0))
    wrong = res.hard_decisions.any()
    assert (not res.converged) or wrong
    if res.converged:
        assert not code.syndrome(res.hard_decisions).any()


def test_dimension_mismatch(small_designed):
    with pytest.raises(ValueError):
        bp_decode(small_designed, np.zeros(small_designed.n + 1))


def test_converged_implies_zero_syndrome(small_designed):
    code = small_designed
    g = gamma_from_ebn0(1.5, code.design_rate, 1.2)
    for b in range(20):
        res = bp_decode(code, block_llrs(code, 1.2, g, 3, b), max_iter=30)
        if res.converged:
            assert not code.syndrome(res.hard_decisions).any()


@given(st.integers(0, 10_000))
@settings(max_examples=15)
def test_sign_symmetry(seed):
    # every check has even degree, so the all-one word is a codeword and the flip is a symmetry
    code = lift(BaseMatrix([[3, 3]]), 16, seed=seed % 3)
    rng = np.random.default_rng(seed)
    llr = rng.normal(0.8, 1.5, code.n)
    a = bp_decode(code, llr, max_iter=20)
    b = bp_decode(code, -llr, max_iter=20)
    assert a.iterations_used == b.iterations_used and a.converged == b.converged
    assert np.array_equal(a.hard_decisions, 1 - b.hard_decisions)


@pytest.mark.parametrize("alpha,ebn0", [(2.0, 4.5), (1.5, 10.0)])
def test_bp_agrees_with_exhaustive_ml(alpha, ebn0):
    code = k6_cycle_code()
    words = codewords(code)
    assert len(words) == 2**10 and words.sum(axis=1)[1:].min() == 3
    g = gamma_from_ebn0(ebn0, code.design_rate, alpha)
    trials, agree, ml_errors = 1000, 0, 0
    for b in range(trials):
        llr = block_llrs(code, alpha, g, 5, b)
        ml_wrong = words[np.argmin(words @ llr)].any()
        res = bp_decode(code, llr, 100)
        bp_wrong = (not res.converged) or res.hard_decisions.any()
        agree += ml_wrong == bp_wrong
        ml_errors += ml_wrong
    # the operating point is where ML fails on roughly one block in a hundred
    assert 0.002 < ml_errors / trials < 0.05
    assert agree / trials >= 0.95


def test_stop_rule_is_exact(small_designed):
    code = small_designed
    pts = ber_simulate(code, 1.0, [0.0], max_block_errors=7, seed=2, batch=5)
    p = pts[0]
    assert p.block_errors == 7
    # replaying block by block confirms the last simulated block is the 7th failure
    g = gamma_from_ebn0(0.0, code.design_rate, 1.0)
    fails = 0
    for b in range(p.blocks_simulated):
        res = bp_decode(code, block_llrs(code, 1.0, g, 2, b), 100)
        fails += (not res.converged) or res.hard_decisions[code.transmitted_mask].any()
        if b < p.blocks_simulated - 1:
            assert fails < 7
    assert fails == 7


def test_batch_size_does_not_change_counts(small_designed):
    a = ber_simulate(small_designed, 1.3, [1.0], max_block_errors=5, seed=4, batch=1)
    b = ber_simulate(small_designed, 1.3, [1.0], max_block_errors=5, seed=4, batch=32)
    assert a == b


def test_high_snr_runs_to_block_cap():
    code = k6_cycle_code()
    (p,) = ber_simulate(code, 1.5, [30.0], max_blocks=200, seed=0)
    assert p.bit_errors == 0 and p.ber == 0.0 and p.blocks_simulated == 200


def test_ber_decreases_with_snr():
    base, p = ar4ja()
    code = lift(base, 32, seed=0, punctures=p)
    lo, hi = ber_simulate(code, 1.5, [0.5, 1.5], max_block_errors=40, seed=1)
    assert hi.ber <= lo.ber or hi.ber_interval()[0] <= lo.ber_interval()[1]


def test_punctured_bits_are_not_counted(small_designed):
    code = small_designed
    (p,) = ber_simulate(code, 1.0, [-3.0], max_block_errors=3, seed=0)
    assert p.bits_simulated == p.blocks_simulated * code.n_transmitted


def test_ber_point_interval_and_csv():
    p = BerPoint(3.4, 50, 10, 10_000, 100)
    lo, hi = p.ber_interval()
    assert lo < p.ber < hi
    assert BerPoint(1.0, 0, 0, 1000, 10).ber_interval()[0] == 0.0
    text = ber_csv([p])
    assert text.splitlines() == ["ebn0_db,ber,fer,bit_errors,block_errors,blocks", "3.4,0.005,0.1,50,10,100"]


def test_invalid_limits():
    with pytest.raises(ValueError):
        ber_simulate(k6_cycle_code(), 1.5, [1.0], max_block_errors=0)
