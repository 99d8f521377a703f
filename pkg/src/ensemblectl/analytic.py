"""Truncated bivariate series on disks and their Fourier-radial form on annuli.

A real-analytic scalar function on a disk is represented here by the finite
coefficient map of its truncated Maclaurin expansion in ``sigma`` and
``conj(sigma)``.  Splitting such a function into angular Fourier modes gives,
for each integer mode ``k``, a radius component of the shape
``q(r**2) * r**e`` with a polynomial ``q`` and an integer exponent ``e``; a
finite collection of those components on an annulus is the second
representation used throughout the package.  Everything in this module is
immutable after construction and every operation is pure, so values can be
shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _polyutil as pu

__all__ = ["BivariateSeries", "RadialFunction", "FourierRadialFunction"]

COEFF_EQ_TOL = 1e-12


def _as_complex(z) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("non-finite coefficient")
    return z


@dataclass(frozen=True)
class BivariateSeries:
    """Finite map ``(k, l) -> c`` for ``sum c * sigma**k * conj(sigma)**l``.

    ``radius`` is the declared radius of validity (``inf`` for polynomial
    data); evaluation outside it is refused.  ``degree_bound`` is the largest
    stored total degree ``k + l``.
    """

    coeffs: dict = field(default_factory=dict)
    radius: float = math.inf
    degree_bound: int = field(init=False)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        clean = {}
        for (k, l), c in self.coeffs.items():
            k, l = int(k), int(l)
            if k < 0 or l < 0:
                raise ValueError("powers must be nonnegative")
            c = _as_complex(c)
            if c != 0:
                clean[(k, l)] = c
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(
            self, "degree_bound", max((k + l for k, l in clean), default=0)
        )

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, c, radius: float = math.inf) -> "BivariateSeries":
        return cls({(0, 0): c}, radius)

    @classmethod
    def monomial(cls, k: int, l: int, c=1.0, radius: float = math.inf) -> "BivariateSeries":
        return cls({(k, l): c}, radius)

    @classmethod
    def sigma(cls) -> "BivariateSeries":
        return cls.monomial(1, 0)

    @classmethod
    def sigma_bar(cls) -> "BivariateSeries":
        return cls.monomial(0, 1)

    @classmethod
    def from_triples(cls, triples, radius: float = math.inf) -> "BivariateSeries":
        """Build from ``[k, l, [re, im]]`` triples (the CLI literal format)."""
        coeffs = {}
        for k, l, (re, im) in triples:
            key = (int(k), int(l))
            coeffs[key] = coeffs.get(key, 0j) + complex(re, im)
        return cls(coeffs, radius)

    def to_triples(self):
        return [
            [k, l, [c.real, c.imag]]
            for (k, l), c in sorted(self.coeffs.items())
        ]

    # -- algebra -----------------------------------------------------------

    def __call__(self, sigma) -> complex:
        sigma = complex(sigma)
        if abs(sigma) > self.radius * (1 + 1e-12):
            raise ValueError(
                f"|sigma| = {abs(sigma):g} outside declared radius {self.radius:g}"
            )
        sbar = sigma.conjugate()
        return complex(sum(c * sigma**k * sbar**l for (k, l), c in self.coeffs.items()))

    def conj(self) -> "BivariateSeries":
        """Series of the complex conjugate: swaps indices, conjugates values."""
        return BivariateSeries(
            {(l, k): c.conjugate() for (k, l), c in self.coeffs.items()}, self.radius
        )

    def __add__(self, other) -> "BivariateSeries":
        if not isinstance(other, BivariateSeries):
            other = BivariateSeries.constant(other)
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0j) + c
        return BivariateSeries(out, min(self.radius, other.radius))

    __radd__ = __add__

    def __neg__(self) -> "BivariateSeries":
        return BivariateSeries({key: -c for key, c in self.coeffs.items()}, self.radius)

    def __sub__(self, other):
        if not isinstance(other, BivariateSeries):
            other = BivariateSeries.constant(other)
        return self + (-other)

    def __mul__(self, other) -> "BivariateSeries":
        if not isinstance(other, BivariateSeries):
            other = BivariateSeries.constant(other)
        out = {}
        for (k1, l1), c1 in self.coeffs.items():
            for (k2, l2), c2 in other.coeffs.items():
                key = (k1 + k2, l1 + l2)
                out[key] = out.get(key, 0j) + c1 * c2
        return BivariateSeries(out, min(self.radius, other.radius))

    __rmul__ = __mul__

    def allclose(self, other: "BivariateSeries", tol: float = COEFF_EQ_TOL) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(
            abs(self.coeffs.get(k, 0j) - other.coeffs.get(k, 0j)) <= tol for k in keys
        )

    # -- Fourier-radial decomposition ---------------------------------------

    def eta(self, k: int) -> "RadialFunction":
        """Angular Fourier mode ``k`` as a function of the radius.

        The mode collects the coefficients ``c(l + (|k|+k)/2, l + (|k|-k)/2)``
        against ``r**(2l + |k|)``, i.e. a polynomial in ``r**2`` times
        ``r**|k|``.  Modes vanish for ``|k| > degree_bound``.
        """
        a = (abs(k) + k) // 2
        b = (abs(k) - k) // 2
        out = {}
        for (p, q), c in self.coeffs.items():
            if p - q == k:
                out[p - a] = out.get(p - a, 0j) + c
        if not out:
            return RadialFunction(abs(k), ())
        deg = max(out)
        arr = np.zeros(deg + 1, dtype=complex)
        for l, c in out.items():
            arr[l] = c
        return RadialFunction(abs(k), arr)

    def xi(self, k: int) -> np.ndarray:
        """Coefficients of ``eta_k`` after ``s = r**2`` and the ``s**(k/2)`` twist.

        Always a true polynomial in ``s`` for series data: mode ``k`` carries
        ``s**(l + (|k|+k)/2)``.
        """
        rf = self.eta(k)
        if rf.is_zero:
            return np.zeros(0, dtype=complex)
        shift = (rf.exponent + k) // 2
        return np.concatenate([np.zeros(shift, dtype=complex), rf.coeffs])

    def fourier_radial(self, annulus) -> "FourierRadialFunction":
        comps = {}
        for k in range(-self.degree_bound, self.degree_bound + 1):
            rf = self.eta(k)
            if not rf.is_zero:
                comps[k] = rf
        return FourierRadialFunction(comps, tuple(annulus))


@dataclass(frozen=True)
class RadialFunction:
    """One radius component: value at ``r`` is ``q(r**2) * r**exponent``."""

    exponent: int
    coeffs: tuple = ()

    def __post_init__(self):
        arr = pu.trim(np.asarray(self.coeffs, dtype=complex))
        e = int(self.exponent)
        # canonical form: polynomial part with nonzero constant term
        while len(arr) and arr[0] == 0:
            arr = arr[1:]
            e += 2
        if len(arr) == 0:
            e = 0
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite coefficient")
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "exponent", e)

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.is_zero:
            return np.zeros_like(r, dtype=complex)
        return pu.peval(self.coeffs, r**2) * r**self.exponent

    def __add__(self, other: "RadialFunction") -> "RadialFunction":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if (self.exponent - other.exponent) % 2 != 0:
            raise ValueError("cannot combine radial parts of mixed parity")
        e = min(self.exponent, other.exponent)
        a = np.concatenate(
            [np.zeros((self.exponent - e) // 2, dtype=complex), self.coeffs]
        )
        b = np.concatenate(
            [np.zeros((other.exponent - e) // 2, dtype=complex), other.coeffs]
        )
        return RadialFunction(e, pu.padd(a, b))

    def __mul__(self, other) -> "RadialFunction":
        if isinstance(other, RadialFunction):
            if self.is_zero or other.is_zero:
                return RadialFunction(0, ())
            return RadialFunction(
                self.exponent + other.exponent, pu.pmul(self.coeffs, other.coeffs)
            )
        return RadialFunction(self.exponent, np.asarray(self.coeffs) * complex(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def conj(self) -> "RadialFunction":
        return RadialFunction(self.exponent, np.conj(self.coeffs))

    def allclose(self, other: "RadialFunction", tol: float = COEFF_EQ_TOL) -> bool:
        diff = self + (other * (-1.0))
        if diff.is_zero:
            return True
        return bool(np.max(np.abs(diff.coeffs)) <= tol)


@dataclass(frozen=True)
class FourierRadialFunction:
    """Finite map ``k -> RadialFunction`` living on a fixed annulus.

    This is the computable finite-support form of the doubly infinite angular
    series ``sum_k rho_k(r) e^(i k theta)``; with finitely many nonzero modes
    every exponential-weight summability requirement holds trivially, so only
    the support bound is recorded.
    """

    components: dict = field(default_factory=dict)
    annulus: tuple = (0.7, 0.8)

    def __post_init__(self):
        r1, r2 = (float(x) for x in self.annulus)
        if not (0 < r1 < r2):
            raise ValueError("annulus radii must satisfy 0 < R1 < R2")
        comps = {
            int(k): rf for k, rf in self.components.items() if not rf.is_zero
        }
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "annulus", (r1, r2))

    def _check_same_annulus(self, other):
        if not np.allclose(self.annulus, other.annulus, rtol=1e-12, atol=0):
            raise ValueError("annulus mismatch")

    @property
    def support(self):
        return sorted(self.components)

    def component(self, k: int) -> RadialFunction:
        return self.components.get(k, RadialFunction(0, ()))

    def __call__(self, r, theta) -> complex:
        return complex(
            sum(rf(r) * np.exp(1j * k * theta) for k, rf in self.components.items())
        )

    def __add__(self, other: "FourierRadialFunction") -> "FourierRadialFunction":
        self._check_same_annulus(other)
        out = dict(self.components)
        for k, rf in other.components.items():
            out[k] = out[k] + rf if k in out else rf
        return FourierRadialFunction(out, self.annulus)

    def __mul__(self, other):
        if isinstance(other, FourierRadialFunction):
            self._check_same_annulus(other)
            out = {}
            for k1, rf1 in self.components.items():
                for k2, rf2 in other.components.items():
                    k = k1 + k2
                    term = rf1 * rf2
                    out[k] = out[k] + term if k in out else term
            return FourierRadialFunction(out, self.annulus)
        return FourierRadialFunction(
            {k: rf * other for k, rf in self.components.items()}, self.annulus
        )

    __rmul__ = __mul__

    def conj(self) -> "FourierRadialFunction":
        return FourierRadialFunction(
            {-k: rf.conj() for k, rf in self.components.items()}, self.annulus
        )

    def xi(self, k: int):
        """Pair ``(coeffs, power)`` meaning ``q(s) * s**power`` on [R1^2, R2^2].

        ``power`` is integer or half-integer; for components produced by the
        witness pipeline (exponent ``-k``) it is zero.
        """
        rf = self.component(k)
        if rf.is_zero:
            return np.zeros(0, dtype=complex), 0.0
        return rf.coeffs, (rf.exponent + k) / 2.0

    def radial_moment(self, k: int) -> complex:
        """Exact ``int_R1^R2 eta_k(f)(r) r**(k+1) dr``."""
        rf = self.component(k)
        if rf.is_zero:
            return 0j
        s1, s2 = self.annulus[0] ** 2, self.annulus[1] ** 2
        return 0.5 * pu.integrate_spower(rf.coeffs, (rf.exponent + k) / 2.0, s1, s2)

    def inner(self, other: "FourierRadialFunction") -> complex:
        """L2 inner product over the annulus (conjugate-linear in self)."""
        self._check_same_annulus(other)
        s1, s2 = self.annulus[0] ** 2, self.annulus[1] ** 2
        total = 0j
        for k, rf in self.components.items():
            og = other.components.get(k)
            if og is None:
                continue
            prod = pu.pmul(np.conj(rf.coeffs), og.coeffs)
            total += np.pi * pu.integrate_spower(
                prod, (rf.exponent + og.exponent) / 2.0, s1, s2
            )
        return total

    def norm(self) -> float:
        """L2 norm over the annulus with the area measure."""
        return math.sqrt(max(self.inner(self).real, 0.0))
