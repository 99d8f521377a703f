"""Orthonormal polynomial basis on an interval with exact inner products.

The basis elements are shifted Legendre polynomials

    p_n(s) = sqrt((2n+1)/(s2-s1)) * P_n((2s - s1 - s2)/(s2 - s1)),

which are degree-``n`` real-coefficient polynomials orthonormal in
``L2([s1, s2])``; closed-form Legendre replaces numerical Gram-Schmidt on the
monomials, which is hopelessly ill-conditioned.  Inner products are computed
from antiderivatives in coordinates centered at the interval midpoint, where
the shifted Legendre coefficients are pure scalings of the classical ones and
no cancellation blowup occurs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _polyutil as pu

__all__ = ["OrthonormalBasis", "build_basis", "inner"]


def _centered(c, center: float) -> np.ndarray:
    """Rewrite ``p(s)`` as a polynomial in ``u = s - center``."""
    return pu.affine_compose(c, center, 1.0)


def inner(p, q, interval) -> complex:
    """Exact ``int_s1^s2 conj(p(s)) q(s) ds`` for coefficient arrays.

    Conjugate-symmetric: ``inner(p, q) == conj(inner(q, p))``.
    """
    s1, s2 = float(interval[0]), float(interval[1])
    center = 0.5 * (s1 + s2)
    prod = pu.pmul(np.conj(_centered(p, center)), _centered(q, center))
    half = 0.5 * (s2 - s1)
    return pu.integrate_interval(prod, -half, half)


@dataclass(frozen=True)
class OrthonormalBasis:
    """Shifted Legendre elements ``p_0 .. p_N`` on ``[s1, s2]``.

    Coefficients are stored in midpoint-centered coordinates; ``poly`` converts
    to plain monomial coefficients when a raw representation is needed.
    """

    interval: tuple
    centered_polys: tuple

    def __len__(self) -> int:
        return len(self.centered_polys)

    @property
    def center(self) -> float:
        return 0.5 * (self.interval[0] + self.interval[1])

    def poly(self, n: int) -> np.ndarray:
        """Monomial (ascending, real) coefficients of ``p_n`` in ``s``."""
        return pu.affine_compose(self.centered_polys[n], -self.center, 1.0).real

    def eval(self, n: int, s):
        u = np.asarray(s, dtype=float) - self.center
        return pu.peval(self.centered_polys[n], u).real

    def inner_with(self, n: int, q) -> complex:
        """Exact ``<p_n, q>`` for a raw coefficient array ``q``."""
        s1, s2 = self.interval
        prod = pu.pmul(self.centered_polys[n], _centered(q, self.center))
        half = 0.5 * (s2 - s1)
        return pu.integrate_interval(prod, -half, half)

    def gram(self) -> np.ndarray:
        n = len(self)
        g = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                g[i, j] = self.inner_with(i, self.poly(j))
        return g


def build_basis(s1: float, s2: float, degree: int) -> OrthonormalBasis:
    """Orthonormal basis of degrees ``0 .. degree`` on ``[s1, s2]``.

    Requires ``0 < s1 < s2``.  Leading coefficients are positive.
    """
    s1, s2 = float(s1), float(s2)
    if not (0 < s1 < s2):
        raise ValueError("interval must satisfy 0 < s1 < s2")
    width = s2 - s1
    polys = []
    for n in range(int(degree) + 1):
        e = np.zeros(n + 1)
        e[n] = 1.0
        leg = np.polynomial.legendre.leg2poly(e)  # P_n, ascending in t
        # centered coords: t = (2/width) * u, a pure scaling of each power
        scale = math.sqrt((2 * n + 1) / width)
        c = leg * (2.0 / width) ** np.arange(n + 1) * scale
        polys.append(np.asarray(c, dtype=complex))
    return OrthonormalBasis((s1, s2), tuple(polys))
