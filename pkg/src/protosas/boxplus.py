"""Check-node LLR arithmetic shared by the EXIT analysis and the decoder."""

import numpy as np

LLR_SATURATION = 700.0
# phi(1e-30) ~ 69.8; large enough to act as "infinite" in sums
_PHI_FLOOR = 1e-30


def phi(x):
    """phi(x) = -ln tanh(x/2) for x >= 0; an involution."""
    x = np.clip(np.abs(x), _PHI_FLOOR, LLR_SATURATION)
    return np.log1p(2.0 / np.expm1(x))


def boxplus(*llrs):
    """2 atanh(prod tanh(L_k/2)) evaluated as sign * phi(sum phi(|L_k|))."""
    if not llrs:
        raise ValueError("boxplus needs at least one operand")
    if len(llrs) == 1:
        return np.asarray(llrs[0], dtype=float)
    sign = np.ones(np.broadcast(*llrs).shape)
    total = np.zeros_like(sign)
    for llr in llrs:
        llr = np.asarray(llr, dtype=float)
        sign = sign * np.where(llr < 0, -1.0, 1.0)
        total = total + phi(llr)
    return sign * phi(total)
