"""Flooding sum-product decoding and the Monte-Carlo BER harness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse, stats

from .boxplus import LLR_SATURATION, phi
from .channel import gamma_from_ebn0, llr_table, standard_sas
from .protograph import LiftedCode

# |LLR| above this carries no extra information through phi in float64
MESSAGE_CAP = 40.0
DEFAULT_MAX_BLOCKS = 10_000_000
_BATCH = 32


@dataclass
class DecodeResult:
    hard_decisions: np.ndarray
    converged: bool
    iterations_used: int


@dataclass
class BerPoint:
    ebn0_db: float
    bit_errors: int
    block_errors: int
    bits_simulated: int
    blocks_simulated: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_simulated if self.bits_simulated else 0.0

    @property
    def fer(self) -> float:
        return self.block_errors / self.blocks_simulated if self.blocks_simulated else 0.0

    def ber_interval(self, level: float = 0.95) -> tuple[float, float]:
        """Clopper-Pearson interval on the bit error rate."""
        k, n = self.bit_errors, self.bits_simulated
        a = 1.0 - level
        lo = 0.0 if k == 0 else float(stats.beta.ppf(a / 2, k, n - k + 1))
        hi = 1.0 if k == n else float(stats.beta.ppf(1 - a / 2, k + 1, n - k))
        return lo, hi


class _Graph:
    """Edge-indexed view of H; edges are ordered by check (CSR order)."""

    def __init__(self, code: LiftedCode):
        h = code.h.tocsr()
        h.sort_indices()
        self.m, self.n = h.shape
        self.h = h
        self.edge_var = h.indices.astype(np.int64)
        self.edge_chk = np.repeat(np.arange(self.m), np.diff(h.indptr))
        e = len(self.edge_var)
        ones = np.ones(e)
        # E x m and E x n incidence, used as right-multipliers on (batch, E) arrays
        self.to_chk = sparse.csr_matrix((ones, (np.arange(e), self.edge_chk)), shape=(e, self.m))
        self.to_var = sparse.csr_matrix((ones, (np.arange(e), self.edge_var)), shape=(e, self.n))

    def syndrome_ok(self, bits: np.ndarray) -> np.ndarray:
        s = (self.h @ bits.T.astype(np.int64)) % 2
        return ~np.any(s, axis=0)


def _decode_batch(g: _Graph, llrs: np.ndarray, max_iter: int):
    """Decode a (batch, n) array of channel LLRs; returns decisions,
    convergence flags and iteration counts per frame."""
    llrs = np.clip(np.asarray(llrs, dtype=float), -LLR_SATURATION, LLR_SATURATION)
    batch = llrs.shape[0]
    hard = (llrs < 0).astype(np.uint8)
    converged = g.syndrome_ok(hard)
    iters = np.zeros(batch, dtype=np.int64)
    active = np.nonzero(~converged)[0]
    ch = llrs[active]
    v2c = ch[:, g.edge_var]
    for it in range(1, max_iter + 1):
        if active.size == 0:
            break
        mag = phi(np.minimum(np.abs(v2c), MESSAGE_CAP))
        neg = (v2c < 0).astype(float)
        tot = (g.to_chk.T @ mag.T).T
        par = (g.to_chk.T @ neg.T).T
        ext = tot[:, g.edge_chk] - mag
        sgn = 1.0 - 2.0 * ((par[:, g.edge_chk] - neg) % 2)
        c2v = sgn * phi(np.maximum(ext, 0.0))
        app = ch + (g.to_var.T @ c2v.T).T
        bits = (app < 0).astype(np.uint8)
        ok = g.syndrome_ok(bits)
        hard[active] = bits
        iters[active] = it
        converged[active] = ok
        keep = ~ok
        active, ch, app, c2v = active[keep], ch[keep], app[keep], c2v[keep]
        v2c = np.clip(app[:, g.edge_var] - c2v, -LLR_SATURATION, LLR_SATURATION)
    return hard, converged, iters


def bp_decode(code: LiftedCode, llrs, max_iter: int = 100) -> DecodeResult:
    """Flooding sum-product with early exit on a zero syndrome."""
    llrs = np.asarray(llrs, dtype=float)
    if llrs.shape != (code.n,):
        raise ValueError(f"expected {code.n} channel LLRs, got shape {llrs.shape}")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    hard, conv, iters = _decode_batch(_Graph(code), llrs[None, :], max_iter)
    return DecodeResult(hard[0], bool(conv[0]), int(iters[0]))


def block_llrs(code: LiftedCode, alpha: float, gamma: float, seed: int, block: int) -> np.ndarray:
    """Channel LLRs of one all-zero block sent as +1 symbols; punctured bits get 0.
    The noise stream depends only on (seed, block)."""
    rng = np.random.default_rng([seed, block])
    z = standard_sas(alpha, code.n, rng)
    y = 1.0 + gamma * z
    out = llr_table(float(alpha), float(gamma))(y)
    out[~code.transmitted_mask] = 0.0
    return out


def ber_simulate(
    code: LiftedCode,
    alpha: float,
    ebn0_list,
    max_block_errors: int = 100,
    max_iter: int = 100,
    max_blocks: int = DEFAULT_MAX_BLOCKS,
    seed: int = 0,
    batch: int = _BATCH,
) -> list[BerPoint]:
    """BER/FER of the all-zero codeword at each Eb/N0 (dB).

    Each point stops at the block that brings the error count to
    ``max_block_errors`` or after ``max_blocks`` blocks.  Bit errors are
    counted on transmitted bits only.  ``batch`` only affects speed."""
    if max_block_errors < 1 or max_blocks < 1 or max_iter < 1 or batch < 1:
        raise ValueError("stopping limits and batch size must be positive")
    g = _Graph(code)
    tx = code.transmitted_mask
    n_tx = int(tx.sum())
    rate = code.design_rate
    points = []
    for ebn0 in ebn0_list:
        gamma = gamma_from_ebn0(float(ebn0), rate, alpha)
        bit_err = blk_err = blocks = 0
        while blocks < max_blocks and blk_err < max_block_errors:
            size = min(batch, max_blocks - blocks)
            llrs = np.stack([block_llrs(code, alpha, gamma, seed, blocks + k) for k in range(size)])
            hard, conv, _ = _decode_batch(g, llrs, max_iter)
            errs = hard[:, tx].sum(axis=1)
            failed = (~conv) | (errs > 0)
            for k in range(size):
                blocks += 1
                bit_err += int(errs[k])
                blk_err += int(failed[k])
                if blk_err >= max_block_errors:
                    break
        points.append(BerPoint(float(ebn0), bit_err, blk_err, blocks * n_tx, blocks))
    return points


def ber_csv(points: list[BerPoint]) -> str:
    lines = ["ebn0_db,ber,fer,bit_errors,block_errors,blocks"]
    for p in points:
        lines.append(f"{p.ebn0_db:.6g},{p.ber:.6g},{p.fer:.6g},{p.bit_errors},{p.block_errors},{p.blocks_simulated}")
    return "\n".join(lines) + "\n"
