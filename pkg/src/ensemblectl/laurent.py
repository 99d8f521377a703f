"""Finitely supported Laurent polynomials and the series-to-Laurent map.

``LaurentPoly`` is the computable subring of functions holomorphic on an
annulus that the witness construction works in.  ``phi`` sends a bivariate
series to the Laurent polynomial whose coefficient at ``z**k`` is the basis
projection ``<p_n, xi_{-k}(g)>``; ``cofactor_nullvector`` produces a
ring-valued null vector of a rows-by-(rows+1) matrix from its signed maximal
minors, which annihilates every row exactly because the defining sums are
cofactor expansions of determinants with a duplicated row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import BivariateSeries
from .basis import OrthonormalBasis

__all__ = ["LaurentPoly", "DegenerateMatrixError", "phi", "cofactor_nullvector"]

PRUNE_TOL = 1e-12  # coefficients below this are dropped to keep supports tight


class DegenerateMatrixError(ValueError):
    """All maximal minors vanish; rows are dependent over the Laurent ring."""

    def __init__(self, message, dependent_rows=()):
        super().__init__(message)
        self.dependent_rows = tuple(dependent_rows)


@dataclass(frozen=True)
class LaurentPoly:
    """Finite coefficient map ``k -> c`` for ``sum c * z**k``, ``k`` in Z."""

    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, c in self.coeffs.items():
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("non-finite coefficient")
            if abs(c) >= PRUNE_TOL:
                clean[int(k)] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls({})

    @classmethod
    def unit(cls, k: int = 0, c=1.0) -> "LaurentPoly":
        return cls({k: c})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def support(self):
        return sorted(self.coeffs)

    def __getitem__(self, k: int) -> complex:
        return self.coeffs.get(k, 0j)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0j) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            out = {}
            for k1, c1 in self.coeffs.items():
                for k2, c2 in other.coeffs.items():
                    out[k1 + k2] = out.get(k1 + k2, 0j) + c1 * c2
            return LaurentPoly(out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> "LaurentPoly":
        c = complex(c)
        return LaurentPoly({k: v * c for k, v in self.coeffs.items()})

    def __call__(self, z) -> complex:
        z = complex(z)
        return complex(sum(c * z**k for k, c in self.coeffs.items()))

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def allclose(self, other: "LaurentPoly", tol: float = 1e-12) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self[k] - other[k]) <= tol for k in keys)


def phi(g: BivariateSeries, n: int, basis: OrthonormalBasis) -> LaurentPoly:
    """Laurent polynomial with coefficient ``<p_n, xi_{-k}(g)>`` at ``z**k``.

    The basis interval must be the squared-radius interval of the working
    annulus.  Support is contained in ``[-D, D]`` for ``D = g.degree_bound``,
    since all higher angular modes of ``g`` vanish.
    """
    if n >= len(basis):
        raise ValueError("basis too short for requested index")
    out = {}
    for k in range(-g.degree_bound, g.degree_bound + 1):
        xi = g.xi(-k)
        if len(xi) == 0:
            continue
        out[k] = basis.inner_with(n, xi)
    return LaurentPoly(out)


def _minor_det(rows, cols, _memo, start=0):
    # expansion along the top remaining row; memoised on the column subset
    if len(cols) == 1:
        return rows[start][cols[0]]
    key = (start, cols)
    cached = _memo.get(key)
    if cached is not None:
        return cached
    total = LaurentPoly.zero()
    sign = 1.0
    for j, col in enumerate(cols):
        entry = rows[start][col]
        if not entry.is_zero:
            sub = _minor_det(rows, cols[:j] + cols[j + 1 :], _memo, start + 1)
            total = total + entry * sub * sign
        sign = -sign
    _memo[key] = total
    return total


def _dependent_rows(rows):
    """Rows lying in the span of the others at a generic evaluation point."""
    z = 0.9273 + 0.3412j  # arbitrary generic point, fixed for determinism
    mat = np.array([[entry(z) for entry in row] for row in rows])
    dep = []
    for i in range(len(rows)):
        others = np.delete(mat, i, axis=0)
        if others.size == 0:
            continue
        sol, *_ = np.linalg.lstsq(others.T, mat[i], rcond=None)
        resid = np.linalg.norm(others.T @ sol - mat[i])
        if resid <= 1e-9 * (1 + np.linalg.norm(mat[i])):
            dep.append(i)
    return dep


def cofactor_nullvector(phi_rows) -> list:
    """Null vector of an ``m x (m+1)`` Laurent matrix from signed minors.

    Entry ``n`` of the result is ``(-1)**n`` times the determinant of the
    matrix with column ``n`` deleted, so ``sum_n rows[i][n] * psi[n]`` is the
    expansion of a determinant with row ``i`` duplicated and vanishes exactly
    in the ring.  Raises :class:`DegenerateMatrixError` when every minor is
    zero (rows dependent over the ring); no division is ever performed.
    """
    m = len(phi_rows)
    if m == 0:
        raise ValueError("need at least one row")
    if any(len(row) != m + 1 for row in phi_rows):
        raise ValueError("matrix must have one more column than rows")
    memo = {}
    cols = tuple(range(m + 1))
    psi = []
    for n in range(m + 1):
        minor = _minor_det(phi_rows, cols[:n] + cols[n + 1 :], memo)
        psi.append(minor if n % 2 == 0 else -minor)
    if all(p.is_zero for p in psi):
        dep = _dependent_rows(phi_rows)
        raise DegenerateMatrixError(
            f"all maximal minors vanish; ring-dependent rows: {dep}", dep
        )
    return psi
