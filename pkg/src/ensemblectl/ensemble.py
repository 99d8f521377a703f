"""Ensemble-system model on quadrature grids: probes, realification, simulation.

A parameterized family of linear systems sharing one input is stored as
per-node coefficient samples over a quadrature grid (Gauss-Legendre tensor
grids for intervals and boxes, Gauss-Legendre in ``r**2`` times uniform angles
for disks and annuli, so monomial angular orthogonality is exact to machine
precision).  Functional coefficient entries (series or callables) are kept
alongside the samples when available, which is what allows pullbacks and the
reduction pipeline to re-evaluate on new grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import BivariateSeries

__all__ = [
    "ParamSpace",
    "interval_space",
    "box_space",
    "disk_space",
    "annulus_space",
    "EnsembleSystem",
    "ensemble_system",
    "scalar_system",
    "realify",
    "pullback",
    "gram_residual",
    "simulate",
    "SimulationResult",
]

DEFAULT_INTERVAL_NODES = 256
DEFAULT_POLAR_GRID = (128, 256)


@dataclass(frozen=True)
class ParamSpace:
    """Sampled parameterization space: nodes with positive quadrature weights.

    ``nodes`` is ``(N,)`` real for intervals, ``(N,)`` complex for disks and
    annuli, ``(N, d)`` real for boxes.  ``lattice`` gives the tensor-grid
    shape used for neighbor relations; polar grids are radius-major.
    """

    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    bounds: tuple
    lattice: tuple

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        total = float(np.sum(self.weights))
        if abs(total - self.measure) > 1e-8 * max(1.0, self.measure):
            raise ValueError("weights do not sum to the measure of the space")

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return 1 if self.kind == "interval" else (len(self.bounds) if self.kind == "box" else 2)

    @property
    def measure(self) -> float:
        if self.kind == "interval":
            a, b = self.bounds
            return b - a
        if self.kind == "box":
            return float(np.prod([b - a for a, b in self.bounds]))
        if self.kind == "disk":
            return math.pi * self.bounds[0] ** 2
        if self.kind == "annulus":
            r1, r2 = self.bounds
            return math.pi * (r2**2 - r1**2)
        raise ValueError(f"unknown kind {self.kind!r}")

    def contains(self, point, tol: float = 1e-9) -> bool:
        if self.kind == "interval":
            a, b = self.bounds
            x = float(np.real(point))
            return a - tol <= x <= b + tol
        if self.kind == "box":
            p = np.atleast_1d(np.asarray(point, dtype=float))
            return all(
                a - tol <= x <= b + tol for x, (a, b) in zip(p, self.bounds)
            )
        r = abs(complex(point))
        if self.kind == "disk":
            return r <= self.bounds[0] + tol
        r1, r2 = self.bounds
        return r1 - tol <= r <= r2 + tol

    def complex_nodes(self) -> np.ndarray:
        """Nodes as complex numbers (requires a 2-D or polar space)."""
        if self.kind in ("disk", "annulus"):
            return self.nodes
        if self.kind == "box" and len(self.bounds) == 2:
            return self.nodes[:, 0] + 1j * self.nodes[:, 1]
        raise ValueError("complex coordinates need a two-dimensional space")


def _gauss_legendre(a: float, b: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def interval_space(a: float, b: float, n: int = DEFAULT_INTERVAL_NODES) -> ParamSpace:
    if not b > a:
        raise ValueError("need a < b")
    x, w = _gauss_legendre(a, b, n)
    return ParamSpace("interval", x, w, (float(a), float(b)), (n,))


def box_space(bounds, counts=None) -> ParamSpace:
    bounds = tuple((float(a), float(b)) for a, b in bounds)
    d = len(bounds)
    if counts is None:
        counts = (48,) * d
    if np.isscalar(counts):
        counts = (int(counts),) * d
    axes = [_gauss_legendre(a, b, n) for (a, b), n in zip(bounds, counts)]
    grids = np.meshgrid(*[ax[0] for ax in axes], indexing="ij")
    wgrids = np.meshgrid(*[ax[1] for ax in axes], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([w.ravel() for w in wgrids], axis=1), axis=1)
    return ParamSpace("box", nodes, weights, bounds, tuple(counts))


def _polar(r1: float, r2: float, nr: int, ntheta: int):
    # Gauss-Legendre in s = r**2 makes radial monomial moments exact
    s, ws = _gauss_legendre(r1**2, r2**2, nr)
    theta = -np.pi + 2 * np.pi * np.arange(ntheta) / ntheta
    wt = 2 * np.pi / ntheta
    rr = np.sqrt(s)
    nodes = (rr[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = np.repeat(0.5 * ws * wt, ntheta)
    return nodes, weights


def disk_space(R: float, nr: int = DEFAULT_POLAR_GRID[0], ntheta: int = DEFAULT_POLAR_GRID[1]) -> ParamSpace:
    if not R > 0:
        raise ValueError("R must be positive")
    nodes, weights = _polar(0.0, R, nr, ntheta)
    return ParamSpace("disk", nodes, weights, (float(R),), (nr, ntheta))


def annulus_space(R1: float, R2: float, nr: int = DEFAULT_POLAR_GRID[0], ntheta: int = DEFAULT_POLAR_GRID[1]) -> ParamSpace:
    if not 0 < R1 < R2:
        raise ValueError("need 0 < R1 < R2")
    nodes, weights = _polar(R1, R2, nr, ntheta)
    return ParamSpace("annulus", nodes, weights, (float(R1), float(R2)), (nr, ntheta))


def _entry_values(entry, space: ParamSpace) -> np.ndarray:
    """Per-node samples of one coefficient entry."""
    if isinstance(entry, BivariateSeries):
        pts = space.complex_nodes() if space.kind != "interval" else space.nodes
        return np.array([entry(complex(p)) for p in np.atleast_1d(pts)])
    if callable(entry):
        if space.kind == "box":
            return np.array([entry(p) for p in space.nodes])
        return np.array([entry(p) for p in np.atleast_1d(space.nodes)])
    arr = np.asarray(entry)
    if arr.ndim == 0:
        return np.full(space.size, complex(arr))
    if arr.shape != (space.size,):
        raise ValueError("grid entry length does not match the space")
    return arr.astype(complex)


def _normalize_entries(entries, rows: int, cols: int):
    if isinstance(entries, (list, tuple)) and entries and isinstance(entries[0], (list, tuple)):
        grid = [list(r) for r in entries]
    else:
        if rows != 1 or cols != 1:
            raise ValueError("matrix coefficients must be nested lists")
        grid = [[entries]]
    if len(grid) != rows or any(len(r) != cols for r in grid):
        raise ValueError("coefficient shape mismatch")
    return grid


@dataclass
class EnsembleSystem:
    """``dx/dt = A(sigma) x + B(sigma) u`` sampled on a parameter grid."""

    space: ParamSpace
    n: int
    m: int
    A: np.ndarray  # (N, n, n)
    B: np.ndarray  # (N, n, m)
    field_tag: str = "complex"
    A_entries: list | None = None
    B_entries: list | None = None

    def __post_init__(self):
        N = self.space.size
        if self.A.shape != (N, self.n, self.n) or self.B.shape != (N, self.n, self.m):
            raise ValueError("sample arrays do not match declared dimensions")
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.B))):
            raise ValueError("non-finite coefficient samples")

    @property
    def functional(self) -> bool:
        return self.A_entries is not None and self.B_entries is not None

    def scalar_values(self) -> np.ndarray:
        if self.n != 1:
            raise ValueError("not a scalar ensemble")
        return self.A[:, 0, 0]


def ensemble_system(space: ParamSpace, A, B, field_tag: str = "complex", n=None, m=None) -> EnsembleSystem:
    """Build a system from nested coefficient entries (series, callables,
    constants, or per-node sample arrays)."""
    if n is None:
        n = len(A) if isinstance(A, (list, tuple)) and isinstance(A[0], (list, tuple)) else 1
    if m is None:
        if isinstance(B, (list, tuple)) and B and isinstance(B[0], (list, tuple)):
            m = len(B[0])
        else:
            m = 1
    A_grid = _normalize_entries(A, n, n)
    B_grid = _normalize_entries(B, n, m)
    N = space.size
    A_s = np.empty((N, n, n), dtype=complex)
    B_s = np.empty((N, n, m), dtype=complex)
    for i in range(n):
        for j in range(n):
            A_s[:, i, j] = _entry_values(A_grid[i][j], space)
        for j in range(m):
            B_s[:, i, j] = _entry_values(B_grid[i][j], space)
    if field_tag == "real":
        if np.max(np.abs(A_s.imag)) > 0 or np.max(np.abs(B_s.imag)) > 0:
            raise ValueError("real system with complex coefficients")
        return EnsembleSystem(space, n, m, A_s.real, B_s.real, "real", A_grid, B_grid)
    return EnsembleSystem(space, n, m, A_s, B_s, "complex", A_grid, B_grid)


def scalar_system(space: ParamSpace, a, b, field_tag: str = "complex") -> EnsembleSystem:
    b_list = b if isinstance(b, (list, tuple)) else [b]
    return ensemble_system(space, [[a]], [list(b_list)], field_tag, n=1, m=len(b_list))


def realify(sys: EnsembleSystem) -> EnsembleSystem:
    """Equivalent real system of twice the dimensions.

    Splitting ``A = A1 + i A2`` and ``B = B1 + i B2`` gives the block pattern
    ``[[A1, -A2], [A2, A1]]`` and ``[[B1, -B2], [B2, B1]]``; the two halves of
    the state carry the real and imaginary parts.
    """
    if sys.field_tag != "complex":
        raise ValueError("realify expects a complex system")
    N, n, m = sys.space.size, sys.n, sys.m
    A1, A2 = sys.A.real, sys.A.imag
    B1, B2 = sys.B.real, sys.B.imag
    A = np.zeros((N, 2 * n, 2 * n))
    B = np.zeros((N, 2 * n, 2 * m))
    A[:, :n, :n] = A1
    A[:, :n, n:] = -A2
    A[:, n:, :n] = A2
    A[:, n:, n:] = A1
    B[:, :n, :m] = B1
    B[:, :n, m:] = -B2
    B[:, n:, :m] = B2
    B[:, n:, m:] = B1
    return EnsembleSystem(sys.space, 2 * n, 2 * m, A, B, "real")


def pullback(sys: EnsembleSystem, rho, new_space: ParamSpace) -> EnsembleSystem:
    """Compose the coefficients with a map from a new grid into the old space.

    Needs functional coefficient entries; every mapped node must land inside
    the original space.
    """
    if not sys.functional:
        raise ValueError("pullback requires functional coefficient entries")
    for node in (new_space.nodes if new_space.kind != "box" else list(new_space.nodes)):
        img = rho(node)
        if not sys.space.contains(img):
            raise ValueError(f"rho image {img!r} falls outside the base space")

    def composed(entry):
        if isinstance(entry, BivariateSeries):
            return lambda p, e=entry: e(complex(rho(p)))
        if callable(entry):
            return lambda p, e=entry: e(rho(p))
        # constants survive composition; sampled grids do not
        arr = np.asarray(entry)
        if arr.ndim == 0:
            return entry
        raise ValueError("pullback of per-node samples is not defined")

    A_new = [[composed(e) for e in row] for row in sys.A_entries]
    B_new = [[composed(e) for e in row] for row in sys.B_entries]
    return ensemble_system(new_space, A_new, B_new, sys.field_tag, n=sys.n, m=sys.m)


def _profile_values(target, sys: EnsembleSystem) -> np.ndarray:
    if isinstance(target, BivariateSeries) or callable(target):
        vals = _entry_values(target, sys.space)
    else:
        vals = np.asarray(target)
    if vals.ndim == 1:
        vals = vals[:, None] if sys.n == 1 else vals.reshape(sys.space.size, sys.n)
    if vals.shape != (sys.space.size, sys.n):
        raise ValueError("target profile does not match the grid")
    return vals.astype(complex)


def gram_residual(sys: EnsembleSystem, target, K: int) -> np.ndarray:
    """Distances from ``target`` to the spans of columns of ``A**j B``.

    Entry ``k`` of the result is the weighted-grid L2 distance from the target
    profile to the span of all columns of ``A**j B`` with ``j <= k``, computed
    by least squares on the weighted samples (never through an explicit Gram
    matrix).  The curve is nonincreasing by construction.
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    y_prof = _profile_values(target, sys)
    sw = np.sqrt(sys.space.weights)
    y = (y_prof * sw[:, None]).ravel()
    cols = []
    Mj = sys.B.astype(complex)
    for _ in range(K + 1):
        cols.append((Mj * sw[:, None, None]).reshape(sys.space.size * sys.n, sys.m))
        Mj = np.einsum("nij,njk->nik", sys.A, Mj)
    X = np.concatenate(cols, axis=1)
    out = np.empty(K + 1)
    for j in range(K + 1):
        sub = X[:, : sys.m * (j + 1)]
        sol, *_ = np.linalg.lstsq(sub, y, rcond=None)
        out[j] = np.linalg.norm(y - sub @ sol)
    return out


@dataclass(frozen=True)
class SimulationResult:
    times: np.ndarray
    states: np.ndarray  # (steps + 1, N, n)
    step_warning: bool

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _input_function(u, m: int, T: float):
    if callable(u):
        return lambda t: np.atleast_1d(np.asarray(u(t)))
    arr = np.asarray(u, dtype=complex)
    if arr.ndim == 1:
        arr = arr[:, None]
    times = np.linspace(0.0, T, len(arr))

    def interp(t):
        out = np.empty(arr.shape[1], dtype=arr.dtype)
        for j in range(arr.shape[1]):
            out[j] = np.interp(t, times, arr[:, j].real) + 1j * np.interp(
                t, times, arr[:, j].imag
            )
        return out

    return interp


def simulate(sys: EnsembleSystem, u, x0, T: float, dt: float | None = None) -> SimulationResult:
    """Classical fixed-step RK4 integration of the whole profile.

    All nodes evolve independently under the common input.  The default step
    is ``1e-2 / (1 + max ||A||)``; passing a larger step sets the warning flag
    on the result instead of failing.
    """
    norm_a = float(max(np.max(np.linalg.norm(sys.A, axis=(1, 2))), 0.0))
    bound = 1e-2 / (1.0 + norm_a)
    if dt is None:
        dt = bound
    warning = dt > bound * (1 + 1e-12)
    nsteps = max(1, int(math.ceil(T / dt - 1e-12)))
    h = T / nsteps

    dtype = complex if sys.field_tag == "complex" else float
    N = sys.space.size
    if np.isscalar(x0):
        x = np.full((N, sys.n), x0, dtype=dtype)
    elif callable(x0):
        x = np.array([np.atleast_1d(x0(p)) for p in sys.space.nodes], dtype=dtype)
    else:
        x = np.asarray(x0, dtype=dtype).reshape(N, sys.n).copy()

    ufun = _input_function(u, sys.m, T)
    A, B = sys.A, sys.B

    def rhs(t, state):
        ut = np.asarray(ufun(t), dtype=complex)
        if sys.field_tag == "real":
            ut = ut.real
        return np.einsum("nij,nj->ni", A, state) + np.einsum("nij,j->ni", B, ut)

    times = np.linspace(0.0, T, nsteps + 1)
    states = np.empty((nsteps + 1, N, sys.n), dtype=dtype)
    states[0] = x
    for s in range(nsteps):
        t = times[s]
        k1 = rhs(t, x)
        k2 = rhs(t + h / 2, x + h / 2 * k1)
        k3 = rhs(t + h / 2, x + h / 2 * k2)
        k4 = rhs(t + h, x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        states[s + 1] = x
    return SimulationResult(times, states, warning)
