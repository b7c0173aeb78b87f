"""Perturbative metric eta = e^(-Q) for H = H0 + eps*H1.

Two independent routes produce the order-by-order equations [H0, Q_m] = R_m:

* the verbatim master-formula triple sum (master_formula_rhs), whose
  collected scalar weights of [H0,Q]_k are exposed separately, and
* an exact multinomial expansion of e^(-Q) H e^(Q) - H^dagger
  (order_residual), which needs at most m commutator slots at order m and
  therefore carries no truncation error.

The equations are solved in the H0 eigenbasis (sylvester_solve) under the
minimal-norm gauge; H0-commuting Hermitian gauge terms may be injected per
order and are recorded in the gauge log.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConsistencyError,
    DomainError,
    GaugeError,
    ObstructionError,
    ShapeError,
    StructureError,
)
from .operators import (
    DEFAULT_TOL,
    Operator,
    Tolerance,
    commutator,
    herm_exp,
    max_norm,
)
from .spectral import MetricOperator, Provenance, pseudo_hermiticity_residual

NOISE_FLOOR = 1e-13


@dataclass(frozen=True)
class SplitHamiltonian:
    """H = H0 + epsilon * H1 with Hermitian H0 and anti-Hermitian H1."""

    H0: Operator
    H1: Operator
    epsilon: float

    def __post_init__(self):
        if self.H0.dim != self.H1.dim:
            raise ShapeError(f"dimension mismatch: {self.H0.dim} vs {self.H1.dim}")
        h0, h1 = self.H0.mat, self.H1.mat
        if max_norm(h0 - h0.conj().T) > DEFAULT_TOL.bound(max_norm(h0)):
            raise StructureError("H0 must be Hermitian")
        if max_norm(h1 + h1.conj().T) > DEFAULT_TOL.bound(max_norm(h1)):
            raise StructureError("H1 must be anti-Hermitian")

    @property
    def dim(self) -> int:
        return self.H0.dim

    def total(self, epsilon: float | None = None) -> Operator:
        e = self.epsilon if epsilon is None else epsilon
        return Operator(self.H0.mat + e * self.H1.mat)


@dataclass(frozen=True)
class QSeries:
    """Hermitian coefficients Q_1 ... Q_l of Q = sum_j Q_j eps^j."""

    terms: tuple
    gauge_log: tuple = field(default=(), compare=False)

    def __post_init__(self):
        terms = tuple(self.terms)
        for j, q in enumerate(terms):
            m = q.mat
            if max_norm(m - m.conj().T) > DEFAULT_TOL.bound(max_norm(m)):
                raise StructureError(f"Q_{j + 1} is not Hermitian within tolerance")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "gauge_log", tuple(self.gauge_log))

    @property
    def order(self) -> int:
        return len(self.terms)

    def summed(self, epsilon: float) -> Operator:
        acc = np.zeros_like(self.terms[0].mat)
        for j, q in enumerate(self.terms):
            acc = acc + q.mat * epsilon ** (j + 1)
        return Operator(acc)


def master_formula_coefficients(ell: int) -> np.ndarray:
    """Collected scalar weight of [H0,Q]_k (k = 1..ell) in the triple sum.

    Entry k-1 is sum over m <= k <= ell and j <= m of
    (-1)^j j^k / (k! 2^m) * C(m, j).
    """
    if ell < 1:
        raise DomainError(f"ell must be >= 1, got {ell}")
    c = np.zeros(ell)
    for m in range(1, ell + 1):
        for k in range(m, ell + 1):
            for j in range(1, m + 1):
                c[k - 1] += ((-1) ** j * j**k / (math.factorial(k) * 2**m)) * math.comb(m, j)
    return c


def master_formula_rhs(H0: Operator, Q: Operator, ell: int) -> Operator:
    """The triple sum sum_m sum_{k=m..ell} sum_j (-1)^j j^k/(k! 2^m) C(m,j) [H0,Q]_k.

    Evaluated term by term as written; equals eps*H1 up to O(eps^{ell+1})
    when Q solves the order equations.
    """
    if ell < 1:
        raise DomainError(f"ell must be >= 1, got {ell}")
    h0, q = H0.mat, Q.mat
    if h0.shape != q.shape:
        raise ShapeError(f"dimension mismatch: {h0.shape} vs {q.shape}")
    nc = {}
    x = h0
    for k in range(1, ell + 1):
        x = commutator(x, q)
        nc[k] = x
    acc = np.zeros_like(h0)
    for m in range(1, ell + 1):
        for k in range(m, ell + 1):
            for j in range(1, m + 1):
                coef = ((-1) ** j * j**k / (math.factorial(k) * 2**m)) * math.comb(m, j)
                acc = acc + coef * nc[k]
    return Operator(acc)


def _compositions(n: int):
    """All tuples of positive integers summing to n (the empty tuple for 0)."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def order_residual(split: SplitHamiltonian, q: QSeries, m: int) -> Operator:
    """Coefficient of eps^m in e^(-Q) H e^(Q) - H^dagger, expanded exactly.

    H - H^dagger contributes 2*H1 at m = 1; each [H,Q]_k / k! contributes
    chained commutators [..[head, Q_{j1}], ..., Q_{jk}] over compositions
    j1 + ... + jk of m (head H0) or m - 1 (head H1). Zero means the order-m
    equation holds.
    """
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if m > q.order:
        raise DomainError(f"order {m} exceeds available terms ({q.order})")
    terms = [t.mat for t in q.terms]
    h0, h1 = split.H0.mat, split.H1.mat
    res = 2.0 * h1 if m == 1 else np.zeros_like(h0)
    for head, budget in ((h0, m), (h1, m - 1)):
        for comp in _compositions(budget):
            k = len(comp)
            if k == 0:
                continue
            x = head
            for j in comp:
                x = commutator(x, terms[j - 1])
            res = res + x / math.factorial(k)
    return Operator(res)


def order_equation_rhs(
    split: SplitHamiltonian, q_lower: QSeries | None, m: int, tol: Tolerance = DEFAULT_TOL
) -> Operator:
    """R_m with [H0, Q_m] = R_m, isolated by zeroing the Q_m slot.

    Q_m enters the order-m residual only through [H0, Q_m], so
    R_m = -order_residual evaluated with Q_m = 0. R_m must come out
    anti-Hermitian for the equation to admit a Hermitian solution.
    """
    lower = () if q_lower is None else q_lower.terms
    if len(lower) != m - 1:
        raise DomainError(f"need {m - 1} lower-order terms for order {m}, got {len(lower)}")
    zero = Operator(np.zeros((split.dim, split.dim), dtype=complex))
    padded = QSeries(lower + (zero,))
    r = -order_residual(split, padded, m).mat
    defect = max_norm(r + r.conj().T)
    if defect > tol.bound(max(max_norm(r), max_norm(split.H1.mat))):
        raise ConsistencyError(
            f"order-{m} source fails anti-Hermiticity (defect {defect:.3e}); "
            "the equation would have no Hermitian solution"
        )
    return Operator(r)


def sylvester_solve(H0: Operator, R: Operator, tol: Tolerance = DEFAULT_TOL) -> Operator:
    """Minimal-norm Hermitian Q with [H0, Q] = R, solved in the H0 eigenbasis.

    Q_mn = R_mn / (E_m - E_n) off the degenerate pairs; gaps at or below
    abs_tol count as degenerate and their entries are gauged to zero, which
    is only consistent when the source vanishes there (Fredholm condition).
    """
    h0, r = H0.mat, R.mat
    if h0.shape != r.shape:
        raise ShapeError(f"dimension mismatch: {h0.shape} vs {r.shape}")
    if max_norm(h0 - h0.conj().T) > tol.bound(max_norm(h0)):
        raise StructureError("H0 must be Hermitian")
    if max_norm(r + r.conj().T) > tol.bound(max_norm(r)):
        raise StructureError("source R must be anti-Hermitian")
    e, u = np.linalg.eigh((h0 + h0.conj().T) / 2)
    rt = u.conj().T @ r @ u
    gaps = e[:, None] - e[None, :]
    degenerate = np.abs(gaps) <= tol.abs_tol
    blocked = degenerate & (np.abs(rt) > tol.bound(max_norm(r)))
    if blocked.any():
        i, j = np.argwhere(blocked)[0]
        raise ObstructionError(
            f"order equation unsolvable: source element {abs(rt[i, j]):.3e} on the "
            f"degenerate pair (m={i}, n={j}) with E_m = E_n = {e[i]:.12g}"
        )
    qt = np.where(degenerate, 0.0, rt / np.where(degenerate, 1.0, gaps))
    qm = u @ qt @ u.conj().T
    return Operator((qm + qm.conj().T) / 2)


def solve_q_series(
    split: SplitHamiltonian,
    ell: int,
    gauge: dict[int, Operator] | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> QSeries:
    """Iterate order_equation_rhs / sylvester_solve for m = 1..ell.

    gauge maps an order m to a Hermitian H0-commuting addition to Q_m
    (validated; recorded in the gauge log). On return every order residual
    1..ell vanishes within tolerance.
    """
    if ell < 1:
        raise DomainError(f"ell must be >= 1, got {ell}")
    gauge = gauge or {}
    h0 = split.H0.mat
    terms: tuple = ()
    glog = []
    for m in range(1, ell + 1):
        rm = order_equation_rhs(split, QSeries(terms) if terms else None, m, tol)
        qm = sylvester_solve(split.H0, rm, tol)
        entry = {"order": m, "gauge": "minimal", "rhs_norm": max_norm(rm.mat)}
        if m in gauge:
            g = gauge[m].mat
            if max_norm(g - g.conj().T) > tol.bound(max_norm(g)):
                raise GaugeError(f"order-{m} gauge term is not Hermitian")
            if max_norm(commutator(h0, g)) > tol.bound(max_norm(h0) * max(1.0, max_norm(g))):
                raise GaugeError(f"order-{m} gauge term does not commute with H0")
            qm = Operator(qm.mat + g)
            entry["gauge"] = "minimal+custom"
            entry["custom_norm"] = max_norm(g)
        terms = terms + (qm,)
        glog.append(entry)
    series = QSeries(terms, tuple(glog))
    scale = max(1.0, max_norm(h0) + max_norm(split.H1.mat))
    qscale = max(1.0, max(max_norm(t.mat) for t in series.terms))
    for m in range(1, ell + 1):
        res = max_norm(order_residual(split, series, m).mat)
        if res > tol.bound(scale * qscale**m):
            raise ConsistencyError(f"order-{m} residual {res:.3e} after solve")
    return series


def metric_from_series(q: QSeries, epsilon: float) -> MetricOperator:
    """eta = e^(-sum_j Q_j eps^j): Hermitian positive definite by construction."""
    op = herm_exp(q.summed(epsilon))
    return MetricOperator(op, Provenance("perturbative", order=q.order, epsilon=epsilon))


def scaling_exponent(split: SplitHamiltonian, q: QSeries, eps_list) -> float:
    """Least-squares slope of log residual vs log eps; expected >= order + 1.

    Warns (and still returns the slope) when any residual sits at the noise
    floor, where the fit is indeterminate.
    """
    eps = np.asarray(eps_list, dtype=float)
    if eps.size < 3:
        raise DomainError(f"need at least 3 epsilon values, got {eps.size}")
    if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise DomainError("eps_list must be strictly decreasing and positive")
    residuals = []
    for e in eps:
        eta = metric_from_series(q, e)
        residuals.append(pseudo_hermiticity_residual(split.total(e), eta))
    residuals = np.asarray(residuals)
    if np.any(residuals < NOISE_FLOOR):
        warnings.warn(
            f"residuals reach the noise floor (min {residuals.min():.3e}); "
            "scaling slope is indeterminate",
            RuntimeWarning,
            stacklevel=2,
        )
    slope, _ = np.polyfit(np.log(eps), np.log(np.maximum(residuals, 1e-300)), 1)
    return float(slope)


def residual_curve(split: SplitHamiltonian, q: QSeries, eps_list) -> list[tuple[float, float]]:
    """(epsilon, pseudo-Hermiticity residual) pairs for reporting."""
    out = []
    for e in np.asarray(eps_list, dtype=float):
        eta = metric_from_series(q, e)
        out.append((float(e), pseudo_hermiticity_residual(split.total(e), eta)))
    return out


def random_admissible_split(
    dim: int,
    rng: np.random.Generator,
    parity: bool = False,
    epsilon: float = 0.1,
    h1_scale: float = 0.5,
) -> SplitHamiltonian:
    """Random split with the order-1 solvability condition built in.

    Default: H0 with well-separated eigenvalues in a random unitary frame and
    H1 anti-Hermitian with its H0-eigenbasis diagonal projected out (the
    Fredholm condition for Q_1). With parity=True the pair additionally
    satisfies [H0, P] = 0 and {H1, P} = 0 for a diagonal-signs P, which makes
    every odd-order equation solvable.
    """
    if dim < 2:
        raise DomainError(f"dim must be >= 2, got {dim}")
    eigs = np.linspace(1.0, float(dim), dim) + rng.uniform(-0.2, 0.2, dim)
    if parity:
        signs = np.ones(dim)
        signs[rng.choice(dim, size=dim // 2, replace=False)] = -1.0
        same = (signs[:, None] * signs[None, :]) > 0
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        h0 = ((a + a.conj().T) / 2) * same * 0.3 + np.diag(eigs)
        b = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        h1 = ((b - b.conj().T) / 2) * (~same) * h1_scale
        return SplitHamiltonian(Operator(h0), Operator(h1), epsilon)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    u, _ = np.linalg.qr(z)
    h0 = (u * eigs) @ u.conj().T
    h0 = (h0 + h0.conj().T) / 2
    b = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h1 = (b - b.conj().T) / 2 * h1_scale
    h1t = u.conj().T @ h1 @ u
    np.fill_diagonal(h1t, 0.0)
    h1 = u @ h1t @ u.conj().T
    h1 = (h1 - h1.conj().T) / 2
    return SplitHamiltonian(Operator(h0), Operator(h1), epsilon)
