"""Position-space constructions for H0 = p^2 and H1 = i v(x).

For a piecewise-constant real v with compact support, the first-order kernel
solves a (1+1)-dimensional wave equation with a delta source on the line
x = y. In characteristic coordinates s = x+y, t = x-y the operator
-dxx + dyy factors as -4 ds dt, which gives the closed-form particular
solution

    Q1(x, y) = (i/2) V((x+y)/2) sign(x-y),      V(x) = int_0^x v,

with the convention sign(0) = 0 on the singular line. General solutions add
f(x-y) + g(x+y); Hermiticity of the kernel pins f and g up to the constraints
enforced by HomogeneousPair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _backend
from .errors import DomainError, StructureError
from .operators import Operator, max_norm
from .perturbation import SplitHamiltonian

CONSTRAINT_TOL = 1e-10


@dataclass(frozen=True)
class PiecewisePotential:
    """Piecewise-constant v: values[i] on (breakpoints[i-1], breakpoints[i]).

    The outermost values must be 0 (compact support), which keeps the
    antiderivative bounded. At a breakpoint the two-sided average is used.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.array(self.breakpoints, dtype=float)
        v = np.array(self.values, dtype=float)
        if b.ndim != 1 or b.size == 0:
            raise DomainError("breakpoints must be a non-empty 1-D sequence")
        if v.shape != (b.size + 1,):
            raise DomainError(
                f"need {b.size + 1} interval values for {b.size} breakpoints, got {v.size}"
            )
        if not np.all(np.diff(b) > 0):
            raise DomainError("breakpoints must be strictly increasing")
        if v[0] != 0.0 or v[-1] != 0.0:
            raise DomainError("outermost values must be 0 (compact support)")
        b.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def __call__(self, x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = _backend.potential_values(np.ascontiguousarray(arr), self.breakpoints, self.values)
        return out if np.ndim(x) else float(out[0])


def step_potential() -> PiecewisePotential:
    """v = -sign(x) on [-1, 1], zero outside."""
    return PiecewisePotential(np.array([-1.0, 0.0, 1.0]), np.array([0.0, 1.0, -1.0, 0.0]))


def _antider_knots(v: PiecewisePotential) -> np.ndarray:
    """V at each breakpoint, anchored so that V(0) = 0."""
    b, vals = v.breakpoints, v.values
    w = np.concatenate(([0.0], np.cumsum(vals[1:-1] * np.diff(b))))
    if 0.0 <= b[0]:
        v0 = w[0] + vals[0] * (0.0 - b[0])
    else:
        i = int(np.searchsorted(b, 0.0, side="right") - 1)
        v0 = w[i] + vals[i + 1] * (0.0 - b[i])
    return w - v0


def potential_antiderivative(v: PiecewisePotential) -> Callable:
    """Continuous piecewise-linear V(x) = int_0^x v(u) du with V(0) = 0."""
    knots = _antider_knots(v)

    def V(x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = _backend.antiderivative_values(
            np.ascontiguousarray(arr), v.breakpoints, knots, v.values
        )
        return out if np.ndim(x) else float(out[0])

    return V


@dataclass(frozen=True)
class KernelFunction:
    """Two-variable kernel with optional fast grid fill.

    evaluator maps broadcastable (x, y) to complex values; singular_line
    marks a sign(x-y) discontinuity; domain_box is the half-width of the
    box the kernel is meant to be sampled on.
    """

    evaluator: Callable
    singular_line: bool
    domain_box: float
    grid: Callable | None = field(default=None, compare=False)

    def __call__(self, x, y):
        return self.evaluator(x, y)

    def on_grid(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        if self.grid is not None:
            return self.grid(xs, ys)
        return self.evaluator(xs[:, None], ys[None, :])


def particular_kernel_q1(v: PiecewisePotential) -> KernelFunction:
    """(i/2) V((x+y)/2) sign(x-y); particular solution with sign(0) = 0."""
    knots = _antider_knots(v)
    box = max(3.0, abs(v.breakpoints[0]) + 2.0, abs(v.breakpoints[-1]) + 2.0)

    def ev(x, y):
        xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        s2 = np.ascontiguousarray(0.5 * (xb + yb)).ravel()
        vv = _backend.antiderivative_values(s2, v.breakpoints, knots, v.values)
        sgn = np.sign(xb - yb).ravel()
        out = (0.5j * (vv * sgn)).reshape(xb.shape)
        return out if out.shape else complex(out)

    def fill(xs, ys):
        return _backend.q1_matrix(
            np.ascontiguousarray(np.asarray(xs, dtype=float)),
            np.ascontiguousarray(np.asarray(ys, dtype=float)),
            v.breakpoints,
            knots,
            v.values,
        )

    return KernelFunction(ev, singular_line=True, domain_box=box, grid=fill)


@dataclass(frozen=True)
class HomogeneousPair:
    """Additive solution f(x-y) + g(x+y) of the source-free wave equation.

    Kernel Hermiticity forces, for all x:
        Re f(-x) = Re f(x)
        Im g(x) = c
        Im f(-x) = -Im f(x) - 2c
    f and g must accept ndarray arguments.
    """

    f: Callable
    g: Callable
    c: float = 0.0

    @classmethod
    def zero(cls) -> "HomogeneousPair":
        return cls(f=lambda t: np.zeros_like(t, dtype=complex),
                   g=lambda s: np.zeros_like(s, dtype=complex), c=0.0)

    def constraint_defects(self, box: float = 3.0, n: int = 201) -> tuple[float, float, float]:
        """Max violation of each Hermiticity constraint on a symmetric grid."""
        x = np.linspace(-box, box, n)
        fx = np.asarray(self.f(x), dtype=complex)
        fmx = np.asarray(self.f(-x), dtype=complex)
        gx = np.asarray(self.g(x), dtype=complex)
        d1 = float(np.abs(fmx.real - fx.real).max())
        d2 = float(np.abs(gx.imag - self.c).max())
        d3 = float(np.abs(fmx.imag + fx.imag + 2.0 * self.c).max())
        return d1, d2, d3

    def is_valid(self, tol: float = CONSTRAINT_TOL, box: float = 3.0) -> bool:
        return max(self.constraint_defects(box=box)) <= tol


def general_kernel(
    particular: KernelFunction, hom: HomogeneousPair, validate: bool = True
) -> KernelFunction:
    """particular(x,y) + f(x-y) + g(x+y), validated to stay Hermitian.

    validate=False skips the constraint check, e.g. to measure the
    hermiticity_defect a broken pair actually produces.
    """
    if validate:
        d1, d2, d3 = hom.constraint_defects(box=particular.domain_box)
        if max(d1, d2, d3) > CONSTRAINT_TOL:
            raise StructureError(
                "homogeneous pair breaks kernel Hermiticity: "
                f"Re-f-even defect {d1:.3e}, Im-g-const defect {d2:.3e}, "
                f"Im-f-reflection defect {d3:.3e}"
            )

    def ev(x, y):
        xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = (
            np.asarray(particular.evaluator(xb, yb), dtype=complex)
            + np.asarray(hom.f(xb - yb), dtype=complex)
            + np.asarray(hom.g(xb + yb), dtype=complex)
        )
        return out if out.shape else complex(out)

    def fill(xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return (
            particular.on_grid(xs, ys)
            + np.asarray(hom.f(xs[:, None] - ys[None, :]), dtype=complex)
            + np.asarray(hom.g(xs[:, None] + ys[None, :]), dtype=complex)
        )

    return KernelFunction(ev, particular.singular_line, particular.domain_box, grid=fill)


def hermiticity_defect(K: KernelFunction, samples: int, rng=None) -> float:
    """Max |K(x,y)* - K(y,x)| over random off-diagonal sample pairs."""
    if samples < 100:
        raise DomainError(f"samples must be >= 100, got {samples}")
    if rng is None:
        rng = np.random.default_rng(0)
    b = K.domain_box
    x = rng.uniform(-b, b, samples)
    y = rng.uniform(-b, b, samples)
    keep = x != y
    x, y = x[keep], y[keep]
    return float(np.abs(np.conj(K(x, y)) - K(y, x)).max())


def jump_condition_defect(
    K: KernelFunction, v: PiecewisePotential, delta: float, xs: np.ndarray
) -> float:
    """Max over xs of |[K(x+d, x-d) - K(x-d, x+d)] - i V(x)|.

    The antisymmetric difference across the line x = y must reproduce the
    jump i V(x) that encodes the -2i v(x) delta(x-y) source.
    """
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    xs = np.asarray(xs, dtype=float)
    V = potential_antiderivative(v)
    jump = K(xs + delta, xs - delta) - K(xs - delta, xs + delta)
    return float(np.abs(jump - 1j * np.asarray(V(xs))).max())


def discretize_schroedinger(
    v: PiecewisePotential, L: float, N: int, epsilon: float = 1.0
) -> SplitHamiltonian:
    """Uniform Dirichlet grid: H0 = -dxx (central differences), H1 = i diag(v)."""
    if N < 16:
        raise DomainError(f"N must be >= 16, got {N}")
    lo, hi = v.support
    if not (-L < lo and hi < L):
        raise DomainError(f"potential support [{lo}, {hi}] must lie inside (-{L}, {L})")
    x = np.linspace(-L, L, N)
    dx = 2.0 * L / (N - 1)
    h0 = (
        np.diag(np.full(N, 2.0)) + np.diag(np.full(N - 1, -1.0), 1) + np.diag(np.full(N - 1, -1.0), -1)
    ) / dx**2
    h1 = 1j * np.diag(v(x))
    return SplitHamiltonian(Operator(h0, label="p^2"), Operator(h1, label="i v(x)"), epsilon)


def grid_points(L: float, N: int) -> np.ndarray:
    return np.linspace(-L, L, N)


def kernel_to_matrix(K: KernelFunction, L: float, N: int) -> Operator:
    """Quadrature bridge M_ij = K(x_i, x_j) dx on the discretization grid."""
    xs = grid_points(L, N)
    dx = 2.0 * L / (N - 1)
    return Operator(K.on_grid(xs, xs) * dx)


def offdiagonal_commutator_check(
    split: SplitHamiltonian, M: Operator, band_exclude: int
) -> float:
    """Max-norm of [H0, M] + 2 H1 away from the singular band and boundary rows.

    Entries with |i-j| <= band_exclude, min(i,j) <= 2 or max(i,j) >= N-3 are
    excluded: the delta source lives on the diagonal band and Dirichlet
    truncation pollutes the outermost rows.
    """
    if band_exclude < 2:
        raise DomainError(f"band_exclude must be >= 2, got {band_exclude}")
    h0, h1, m = split.H0.mat, split.H1.mat, M.mat
    n = m.shape[0]
    defect = h0 @ m - m @ h0 + 2.0 * h1
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    mask = (np.abs(i - j) > band_exclude) & (np.minimum(i, j) > 2) & (np.maximum(i, j) < n - 3)
    return max_norm(defect[mask])
