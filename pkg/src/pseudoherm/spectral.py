"""Metric operators from biorthonormal eigensystems.

For diagonalizable H with real spectrum, the right/left eigenvector families
{psi_n}, {phi_n} with <phi_m|psi_n> = delta_mn give the positive-definite
metric eta = sum_n |phi_n><phi_n|, which satisfies H^dagger eta = eta H. All
derived objects (equivalent Hermitian h, C = eta^{-1} P, Cholesky factor,
intertwiners between metrics, rescaled metric families) live here.

Normalization gauge: each psi_n has unit Euclidean norm with its first
nonzero component rotated positive real; phi_n is then fixed by the
biorthonormality condition. The metric is not unique; the remaining freedom
is exposed through symmetry_rescaled_metric instead of being hidden.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    DiagonalizabilityError,
    DomainError,
    InvertibilityError,
    PositivityError,
    RealityError,
    ResidualError,
    ShapeError,
    StructureError,
)
from .operators import DEFAULT_TOL, Operator, Tolerance, herm_sqrt_inv, max_norm

log = logging.getLogger(__name__)

COND_CAP = 1e8


@dataclass(frozen=True)
class BiorthonormalSystem:
    """Eigenvalues with right (psi) and left (phi) eigenvector columns."""

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def gram_defect(self) -> float:
        g = self.left_vectors.conj().T @ self.right_vectors
        return max_norm(g - np.eye(self.dim))

    def completeness_defect(self) -> float:
        s = self.right_vectors @ self.left_vectors.conj().T
        return max_norm(s - np.eye(self.dim))


@dataclass(frozen=True)
class Provenance:
    kind: str  # spectral | perturbative | user
    order: int | None = None
    epsilon: float | None = None

    def describe(self) -> str:
        if self.kind == "perturbative":
            return f"perturbative(order={self.order}, epsilon={self.epsilon})"
        return self.kind


@dataclass(frozen=True)
class MetricOperator:
    op: Operator
    provenance: Provenance

    @property
    def mat(self) -> np.ndarray:
        return self.op.mat


def _metric_matrix(eta) -> np.ndarray:
    if isinstance(eta, MetricOperator):
        return eta.op.mat
    if isinstance(eta, Operator):
        return eta.mat
    return np.asarray(eta, dtype=complex)


def biorthonormal_eigensystem(
    H: Operator, tol: Tolerance = DEFAULT_TOL, cond_cap: float = COND_CAP
) -> BiorthonormalSystem:
    """Diagonalize H; sort by (Re E, Im E, original index); gauge-fix psi.

    The left family is phi = inv(psi)^dagger, so the Gram identity and
    completeness hold by construction, degenerate blocks included.
    """
    h = H.mat
    w, v = np.linalg.eig(h)
    order = np.lexsort((np.arange(w.size), w.imag, w.real))
    w, v = w[order], v[:, order]
    v = v / np.linalg.norm(v, axis=0)
    for n in range(w.size):
        col = v[:, n]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * np.abs(col).max())[0]
        phase = col[nz] / abs(col[nz])
        v[:, n] = col / phase
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > cond_cap:
        raise DiagonalizabilityError(
            f"eigenvector matrix condition number {cond:.3e} exceeds cap {cond_cap:.1e}; "
            "operator treated as defective"
        )
    phi = np.linalg.inv(v).conj().T
    return BiorthonormalSystem(w, v, phi)


def spectrum_is_real(H: Operator, tol: Tolerance = DEFAULT_TOL) -> bool:
    w = np.linalg.eigvals(H.mat)
    return bool(np.abs(w.imag).max() <= tol.bound(np.abs(w).max()))


def spectral_metric(sys: BiorthonormalSystem, tol: Tolerance = DEFAULT_TOL) -> MetricOperator:
    """eta = sum_n |phi_n><phi_n|; requires a real spectrum."""
    scale = np.abs(sys.eigenvalues).max()
    for n, e in enumerate(sys.eigenvalues):
        if abs(e.imag) > tol.bound(scale):
            raise RealityError(f"eigenvalue E_{n} = {e:.12g} is not real within tolerance")
    phi = sys.left_vectors
    eta = phi @ phi.conj().T
    return MetricOperator(Operator((eta + eta.conj().T) / 2), Provenance("spectral"))


def pseudo_hermiticity_residual(H: Operator, eta) -> float:
    """||H^dagger eta - eta H|| in max-norm (multiplied-through form)."""
    h = H.mat
    e = _metric_matrix(eta)
    if e.shape != h.shape:
        raise ShapeError(f"dimension mismatch: {e.shape} vs {h.shape}")
    sv = np.linalg.svd(e, compute_uv=False)
    if sv[-1] <= DEFAULT_TOL.bound(sv[0]):
        raise InvertibilityError(f"metric is numerically singular (smallest sv {sv[-1]:.3e})")
    return max_norm(h.conj().T @ e - e @ h)


def equivalent_hermitian(
    H: Operator,
    eta,
    tol: Tolerance = DEFAULT_TOL,
    residual_threshold: float | None = None,
) -> tuple[Operator, Operator]:
    """h = rho H rho^{-1} with rho = eta^{1/2}; Hermitian, isospectral with H."""
    e = _metric_matrix(eta)
    res = pseudo_hermiticity_residual(H, e)
    if residual_threshold is None:
        residual_threshold = 1e-8 * max(1.0, max_norm(H.mat) * max_norm(e))
    if res > residual_threshold:
        raise ResidualError(
            f"pseudo-Hermiticity residual {res:.3e} exceeds threshold {residual_threshold:.3e}"
        )
    rho, rho_inv = herm_sqrt_inv(Operator(e), tol)
    h = rho.mat @ H.mat @ rho_inv.mat
    return Operator(h), rho


def c_operator(eta, P: Operator, H: Operator | None = None, tol: Tolerance = DEFAULT_TOL):
    """C = eta^{-1} P with diagnostics.

    Returns (C, commutation_residual, involution_defect). The commutation
    residual ||[C, H]|| needs H and is None when H is omitted; it is only
    meaningful when H is P-pseudo-Hermitian. The involution defect
    ||C^2 - I|| is diagnostic only: it vanishes just for restricted metric
    choices, so it is reported and never asserted.
    """
    p = P.mat
    scale = max_norm(p)
    if max_norm(p @ p - np.eye(p.shape[0])) > tol.bound(scale * scale):
        raise StructureError("P is not an involution (P^2 != I within tolerance)")
    if max_norm(p - p.conj().T) > tol.bound(scale):
        raise StructureError("P is not Hermitian within tolerance")
    e = _metric_matrix(eta)
    c = np.linalg.solve(e, p)
    comm = None
    if H is not None:
        comm = max_norm(c @ H.mat - H.mat @ c)
    invol = max_norm(c @ c - np.eye(c.shape[0]))
    return Operator(c), comm, invol


def metric_factorization(eta, tol: Tolerance = DEFAULT_TOL) -> Operator:
    """Upper-triangular O with O^dagger O = eta (Cholesky factor)."""
    e = _metric_matrix(eta)
    try:
        lower = np.linalg.cholesky((e + e.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise PositivityError(f"metric is not positive definite: {exc}") from exc
    return Operator(lower.conj().T)


def metric_intertwiner(eta1, eta2, H: Operator, tol: Tolerance = DEFAULT_TOL) -> Operator:
    """A = eta1^{-1/2} M^{1/2} eta1^{1/2} with M = eta1^{-1/2} eta2 eta1^{-1/2}.

    Realizes eta2 = A^dagger eta1 A; for metrics of the same Hamiltonian the
    construction commutes with H. Both postcondition residuals are logged.
    """
    e1 = _metric_matrix(eta1)
    e2 = _metric_matrix(eta2)
    scale = max_norm(H.mat)
    for name, e in (("eta1", e1), ("eta2", e2)):
        res = pseudo_hermiticity_residual(H, e)
        if res > 1e-8 * max(1.0, scale * max_norm(e)):
            raise ResidualError(f"{name} is not a valid metric for H: residual {res:.3e}")
    s1, is1 = herm_sqrt_inv(Operator(e1), tol)
    m = is1.mat @ e2 @ is1.mat
    ms, _ = herm_sqrt_inv(Operator((m + m.conj().T) / 2), tol)
    a = is1.mat @ ms.mat @ s1.mat
    intertwine = max_norm(a.conj().T @ e1 @ a - e2)
    commute = max_norm(a @ H.mat - H.mat @ a)
    log.info(
        "metric_intertwiner: ||A^+ eta1 A - eta2|| = %.3e, ||[A, H]|| = %.3e",
        intertwine,
        commute,
    )
    return Operator(a)


def symmetry_rescaled_metric(
    sys: BiorthonormalSystem, scales, tol: Tolerance = DEFAULT_TOL
) -> MetricOperator:
    """sum_n s_n |phi_n><phi_n| for positive s_n: another valid metric for H."""
    s = np.asarray(scales, dtype=float)
    if s.shape != (sys.dim,):
        raise DomainError(f"need {sys.dim} scales, got shape {s.shape}")
    if np.any(s <= 0):
        raise DomainError(f"scales must be positive, got min {s.min()}")
    phi = sys.left_vectors
    eta = (phi * s) @ phi.conj().T
    return MetricOperator(Operator((eta + eta.conj().T) / 2), Provenance("spectral"))
