"""Construction and verification of non-controllability witness certificates.

Given input functions ``b_1 .. b_m`` of a scalar normal-form system
``dx/dt = sigma x + b(sigma) u`` on a disk of radius ``R``, this module builds
a nonzero annulus-supported function ``f0`` orthogonal to every
``b_i * sigma**k`` (``k >= 0``) and packages the result, together with the
exactly integrated residual table proving the orthogonality, into a
serializable certificate.  Orthogonality is re-derived by direct polynomial
integration and never trusted from the construction alone, so a failed
assembly can never pass silently.

Two independent verification routes are provided: the radial-moment route
(one exact integral per power ``k``) and the null-condition route (a finite
convolution of squared-radius projections); they agree up to the exact
factor-of-two normalization relating them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _polyutil as pu
from .analytic import BivariateSeries, FourierRadialFunction, RadialFunction
from .basis import OrthonormalBasis, build_basis
from .laurent import DegenerateMatrixError, LaurentPoly, cofactor_nullvector, phi

__all__ = [
    "AnnulusConfig",
    "WitnessCertificate",
    "DegenerateInputsError",
    "select_annulus",
    "regularize",
    "build_witness",
    "verify_orthogonality",
    "radial_condition_values",
    "null_condition_values",
    "null_condition_check",
    "extend_and_bound",
    "annulus_norm",
    "certificate_payload",
]

DEFAULT_TOLERANCE = 1e-9
DEFAULT_K_MAX = 25
_ZERO_AT_ORIGIN = 1e-12


class DegenerateInputsError(RuntimeError):
    """Raised when no usable null vector remains after all retries."""

    def __init__(self, message, dropped=()):
        super().__init__(message)
        self.dropped = list(dropped)


@dataclass(frozen=True)
class AnnulusConfig:
    """Disk radius ``R`` and working annulus ``[R1, R2]`` inside it.

    Validity requires ``0 < R1 < R2 < R`` and ``R * R1 > R2**2``; the second
    inequality is what makes the constructed witness series convergent.
    """

    R: float
    R1: float
    R2: float

    def __post_init__(self):
        if not (0 < self.R1 < self.R2 < self.R):
            raise ValueError("need 0 < R1 < R2 < R")
        if not self.R * self.R1 > self.R2**2:
            raise ValueError("need R * R1 > R2**2")

    @property
    def annulus(self):
        return (self.R1, self.R2)

    @property
    def s_interval(self):
        return (self.R1**2, self.R2**2)


def select_annulus(R: float) -> AnnulusConfig:
    """Fixed annulus rule ``R1 = 0.7 R``, ``R2 = 0.8 R``.

    Any choice with ``R * R1 > R2**2`` works; a fixed rule keeps certificates
    reproducible (``0.7 R**2 > 0.64 R**2`` always holds).
    """
    if not R > 0:
        raise ValueError("R must be positive")
    return AnnulusConfig(R, 0.7 * R, 0.8 * R)


def regularize(b, R: float):
    """Prepend the constant one and shift away zeros at the origin.

    Entries with ``b_i(0) = 0`` are replaced by ``b_i + 1``; the span of
    ``{sigma**k b_i}`` only grows, so a witness for the regularized list is a
    witness for the original.  Polynomial inputs keep ``R`` unchanged; declared
    finite radii shrink it.
    """
    out = [BivariateSeries.constant(1.0)]
    r_eff = float(R)
    for bi in b:
        r_eff = min(r_eff, bi.radius)
        if abs(bi.coeffs.get((0, 0), 0j)) < _ZERO_AT_ORIGIN:
            out.append(bi + 1.0)
        else:
            out.append(bi)
    return out, r_eff


@dataclass(frozen=True)
class WitnessCertificate:
    """Constructed witness plus the residual table that proves it.

    ``residuals[(i, k)]`` is ``|<f0, b_i sigma**k>|`` over the annulus for the
    ``i``-th regularized entry (the disk extension of ``f0`` by zero changes
    nothing), and ``norms[(i, k)]`` the exact annulus norm of
    ``b_i sigma**k`` used for the relative soundness bound.
    """

    config: AnnulusConfig
    f0: FourierRadialFunction
    f0_norm: float
    residuals: dict
    norms: dict
    k_max: int
    alpha: dict
    tolerance: float
    dropped_inputs: list = field(default_factory=list)
    inputs: list = field(default_factory=list)

    def residual_bound(self, i: int, k: int) -> float:
        scale = self.norms.get((i, k), 0.0)
        if scale == 0.0:
            return self.tolerance * self.f0_norm
        return self.tolerance * self.f0_norm * scale

    @property
    def max_relative_residual(self) -> float:
        worst = 0.0
        for key, val in self.residuals.items():
            bound = self.residual_bound(*key)
            worst = max(worst, val / bound * self.tolerance)
        return worst

    @property
    def sound(self) -> bool:
        return self.f0_norm > 0 and all(
            val <= self.residual_bound(*key) for key, val in self.residuals.items()
        )


def _witness_from_nullvector(psi, basis: OrthonormalBasis, config: AnnulusConfig):
    """Assemble ``f0`` with components ``sum_n alpha[n,-k] p_n(r**2) r**-k``."""
    alpha = {}
    for n, pn in enumerate(psi):
        for k, c in pn.coeffs.items():
            alpha[(n, k)] = c
    comps = {}
    modes = sorted({-k for (_, k) in alpha})
    for mode in modes:
        q = np.zeros(1, dtype=complex)
        for n in range(len(psi)):
            c = alpha.get((n, -mode))
            if c:
                q = pu.padd(q, c * basis.poly(n).astype(complex))
        rf = RadialFunction(-mode, q)
        if not rf.is_zero:
            comps[mode] = rf
    return FourierRadialFunction(comps, config.annulus), alpha


def annulus_norm(b: BivariateSeries, k: int, annulus) -> float:
    """Exact L2 norm of ``b * sigma**k`` over the annulus."""
    return (b * BivariateSeries.monomial(k, 0)).fourier_radial(annulus).norm()


def verify_orthogonality(f0: FourierRadialFunction, b: BivariateSeries, k: int) -> float:
    """``|<f0, b sigma**k>|`` over the annulus by exact radial integration.

    Every integrand is a polynomial in ``r**2`` times an integer power of
    ``r``, so the value is an antiderivative evaluation, not a quadrature.
    """
    h = f0 * b.conj().fourier_radial(f0.annulus)
    return 2 * math.pi * abs(h.radial_moment(k))


def radial_condition_values(
    f0: FourierRadialFunction, b: BivariateSeries, k_max: int
) -> np.ndarray:
    """Signed radial moments of ``f0 * conj(b)`` for ``k = 0 .. k_max``."""
    h = f0 * b.conj().fourier_radial(f0.annulus)
    return np.array([h.radial_moment(k) for k in range(k_max + 1)])


def null_condition_values(
    f0: FourierRadialFunction, g: BivariateSeries, k_max: int
) -> np.ndarray:
    """``sum_l <conj(xi_l(f0)), xi_{k-l}(conj(g))>`` for ``k = 0 .. k_max``.

    The independent verification route: each term is a plain polynomial
    integral over the squared-radius interval, and the total equals twice the
    corresponding radial moment.
    """
    gbar = g.conj()
    s1, s2 = f0.annulus[0] ** 2, f0.annulus[1] ** 2
    out = np.zeros(k_max + 1, dtype=complex)
    for k in range(k_max + 1):
        total = 0j
        for ell in f0.support:
            if abs(k - ell) > gbar.degree_bound:
                continue
            xi_f, power = f0.xi(ell)
            xi_g = gbar.xi(k - ell)
            if len(xi_g) == 0:
                continue
            total += pu.integrate_spower(pu.pmul(xi_f, xi_g), power, s1, s2)
        out[k] = total
    return out


def null_condition_check(
    f0: FourierRadialFunction, g: BivariateSeries, k_max: int = DEFAULT_K_MAX
) -> float:
    return float(np.max(np.abs(null_condition_values(f0, g, k_max))))


def extend_and_bound(cert: WitnessCertificate, target: BivariateSeries) -> float:
    """Lower bound on the L2(disk) distance from ``target`` to the span.

    With ``f0`` extended by zero outside the annulus, the best-approximation
    bound is ``|<f0~, target>| / ||f0||``; only the annulus contributes.
    """
    if target.radius < cert.config.R * (1 - 1e-12):
        raise ValueError("target not defined on the full disk")
    t = target.fourier_radial(cert.config.annulus)
    return abs(cert.f0.inner(t)) / cert.f0_norm


def _residual_row(f0, entry, k_max, annulus):
    h = f0 * entry.conj().fourier_radial(annulus)
    res = {k: 2 * math.pi * abs(h.radial_moment(k)) for k in range(k_max + 1)}
    nrm = {k: annulus_norm(entry, k, annulus) for k in range(k_max + 1)}
    return res, nrm


def build_witness(
    b,
    R: float,
    k_max: int = DEFAULT_K_MAX,
    tolerance: float = DEFAULT_TOLERANCE,
    workers: int | None = None,
) -> WitnessCertificate:
    """Full pipeline from an input list to a verified certificate.

    Regularize, fix the annulus, build the basis, assemble the Laurent matrix
    of basis projections of the conjugated entries, take the cofactor null
    vector, and write down ``f0``.  Exact duplicates are removed before
    assembly; on a degenerate (all-minors-zero) signal the highest-index entry
    is dropped and the construction retried, with every drop recorded.  The
    residual table is computed for the complete regularized list, dropped
    entries included, so an unsound drop shows up as a failing certificate.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    reg, r_eff = regularize(b, R)
    config = select_annulus(r_eff)
    s1, s2 = config.s_interval

    active = []
    drops = []
    for i, entry in enumerate(reg):
        dup = next((j for j in active if entry.allclose(reg[j])), None)
        if dup is None:
            active.append(i)
        else:
            drops.append({"index": i, "reason": f"duplicate of entry {dup}"})

    while True:
        m_eff = len(active)
        bas = build_basis(s1, s2, m_eff)
        rows = [
            [phi(reg[i].conj(), n, bas) for n in range(m_eff + 1)] for i in active
        ]
        try:
            psi = cofactor_nullvector(rows)
            break
        except DegenerateMatrixError as err:
            if m_eff <= 1:
                raise DegenerateInputsError(
                    f"degenerate construction with a single entry: {err}", drops
                ) from err
            dep = [active[r] for r in err.dependent_rows]
            victim = active.pop()
            drops.append(
                {"index": victim, "reason": f"ring-dependent entries {dep}"}
            )

    f0, alpha = _witness_from_nullvector(psi, bas, config)
    f0_norm = f0.norm()
    psi_scale = max(p.norm() for p in psi)
    if f0_norm < 1e-8 * psi_scale:
        raise DegenerateInputsError(
            "assembled witness vanishes relative to its null vector", drops
        )

    residuals = {}
    norms = {}
    indices = list(range(len(reg)))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows_out = list(
                pool.map(
                    lambda i: _residual_row(f0, reg[i], k_max, config.annulus), indices
                )
            )
    else:
        rows_out = [_residual_row(f0, reg[i], k_max, config.annulus) for i in indices]
    for i, (res, nrm) in zip(indices, rows_out):
        for k, val in res.items():
            residuals[(i, k)] = val
            norms[(i, k)] = nrm[k]

    return WitnessCertificate(
        config=config,
        f0=f0,
        f0_norm=f0_norm,
        residuals=residuals,
        norms=norms,
        k_max=k_max,
        alpha=alpha,
        tolerance=tolerance,
        dropped_inputs=drops,
        inputs=reg,
    )


def certificate_payload(cert: WitnessCertificate) -> dict:
    """Plain-data form of a certificate matching the documented JSON schema."""
    f0_entries = []
    for k in cert.f0.support:
        rf = cert.f0.components[k]
        f0_entries.append(
            [k, rf.exponent, [[c.real, c.imag] for c in rf.coeffs]]
        )
    return {
        "R": cert.config.R,
        "R1": cert.config.R1,
        "R2": cert.config.R2,
        "alpha": [
            [n, k, c.real, c.imag] for (n, k), c in sorted(cert.alpha.items())
        ],
        "f0": f0_entries,
        "f0_norm": cert.f0_norm,
        "residuals": [
            [i, k, val] for (i, k), val in sorted(cert.residuals.items())
        ],
        "dropped_inputs": [
            [d["index"], d["reason"]] for d in cert.dropped_inputs
        ],
        "tolerance": cert.tolerance,
    }
