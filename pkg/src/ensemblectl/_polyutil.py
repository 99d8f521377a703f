"""Internal helpers for univariate polynomial coefficient arrays.

Coefficient arrays are ascending (``c[j]`` multiplies ``s**j``) and complex
unless stated otherwise.  All integrals are evaluated from antiderivatives,
so the only rounding comes from the final sums; the single non-polynomial
case, ``s**-1``, integrates to a logarithm.
"""

from __future__ import annotations

import numpy as np

_ZERO = np.zeros(0, dtype=complex)


def trim(c) -> np.ndarray:
    """Drop trailing coefficients that are exactly zero."""
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    n = len(c)
    while n > 0 and c[n - 1] == 0:
        n -= 1
    return c[:n].copy() if n != len(c) else c


def padd(a, b) -> np.ndarray:
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if len(a) < len(b):
        a, b = b, a
    out = a.copy()
    out[: len(b)] += b
    return trim(out)


def pmul(a, b) -> np.ndarray:
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if len(a) == 0 or len(b) == 0:
        return _ZERO
    return np.convolve(a, b)


def peval(c, x):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if len(c) == 0:
        return np.zeros_like(np.asarray(x, dtype=complex))
    return np.polynomial.polynomial.polyval(x, c)


def affine_compose(c, c0, c1) -> np.ndarray:
    """Coefficients of ``p(c0 + c1*u)`` given the coefficients of ``p(s)``."""
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if len(c) == 0:
        return _ZERO
    out = np.array([c[-1]], dtype=complex)
    lin = np.array([c0, c1], dtype=complex)
    for j in range(len(c) - 2, -1, -1):
        out = padd(pmul(out, lin), [c[j]])
    return out


def integrate_interval(c, lo: float, hi: float) -> complex:
    """Exact ``\\int_lo^hi q(s) ds`` for a coefficient array ``q``."""
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if len(c) == 0:
        return 0j
    j = np.arange(1, len(c) + 1, dtype=float)
    return complex(np.sum(c * (hi**j - lo**j) / j))


def integrate_spower(c, power: float, lo: float, hi: float) -> complex:
    """Exact ``\\int_lo^hi q(s) s**power ds`` with ``0 < lo < hi``.

    ``power`` may be any integer or half-integer (both are exact binary
    floats), so negative and fractional radial moments stay closed-form.
    """
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    total = 0j
    for j, cj in enumerate(c):
        if cj == 0:
            continue
        q = j + power
        if q == -1.0:
            total += cj * np.log(hi / lo)
        else:
            total += cj * (hi ** (q + 1) - lo ** (q + 1)) / (q + 1)
    return complex(total)
