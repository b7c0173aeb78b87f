"""Task orchestration: model spec in, verification report out.

Tasks run sequentially in spec order; a failing task yields a failure record
and never suppresses the others. Later tasks may reference earlier results
(scaling consumes the perturbative series). Every boolean verdict carries
the numeric residual and threshold it came from. Given the same spec and
seed the report is byte-identical across runs: no timestamps, a fixed RNG
stream, and canonical serialization downstream.
"""

from __future__ import annotations

import numpy as np

from . import __version__
from .config import (
    MatrixModel,
    ModelSpec,
    PerturbativeTask,
    ScalingTask,
    SchroedingerModel,
    SpectralTask,
    SplitMatrixModel,
    WaveTask,
)
from .errors import PseudohermError
from .operators import Operator, Tolerance, classify, max_norm
from .perturbation import (
    SplitHamiltonian,
    metric_from_series,
    order_residual,
    residual_curve,
    scaling_exponent,
    solve_q_series,
)
from .spectral import (
    biorthonormal_eigensystem,
    c_operator,
    equivalent_hermitian,
    pseudo_hermiticity_residual,
    spectral_metric,
    spectrum_is_real,
)
from .wavekernel import (
    discretize_schroedinger,
    grid_points,
    hermiticity_defect,
    jump_condition_defect,
    kernel_to_matrix,
    offdiagonal_commutator_check,
    particular_kernel_q1,
    potential_antiderivative,
)

RESIDUAL_REL = 1e-8
JUMP_TOL = 1e-10
KERNEL_HERM_TOL = 1e-12


def _verdict(name: str, value: float, threshold: float) -> dict:
    return {
        "name": name,
        "ok": bool(value <= threshold),
        "value": float(value),
        "threshold": float(threshold),
    }


def _pairs(z: np.ndarray) -> list:
    return [[float(v.real), float(v.imag)] for v in z]


class _RunContext:
    def __init__(self, spec: ModelSpec, seed: int, tol: Tolerance):
        self.spec = spec
        self.tol = tol
        self.rng = np.random.default_rng(seed)
        self.split = None  # SplitHamiltonian for split-capable models
        self.solved = None  # (order, QSeries) from the perturbative task

    def hamiltonian(self) -> Operator:
        m = self.spec.model
        if isinstance(m, MatrixModel):
            return m.H
        return self.get_split().total()

    def get_split(self) -> SplitHamiltonian:
        if self.split is None:
            m = self.spec.model
            if isinstance(m, SplitMatrixModel):
                self.split = SplitHamiltonian(m.H0, m.H1, m.epsilon)
            elif isinstance(m, SchroedingerModel):
                self.split = discretize_schroedinger(m.potential, m.L, m.N, m.epsilon)
            else:
                raise PseudohermError(
                    "this task needs an H0 + eps*H1 split; the model is a plain matrix"
                )
        return self.split

    def parity_matrix(self) -> Operator | None:
        p = self.spec.parity
        if p is None:
            return None
        if isinstance(p, Operator):
            return p
        m = self.spec.model
        return Operator(np.eye(m.N)[::-1].copy(), label="grid reflection")


def _spectral_task(ctx: _RunContext) -> dict:
    H = ctx.hamiltonian()
    sys = biorthonormal_eigensystem(H, ctx.tol)
    eta = spectral_metric(sys, ctx.tol)
    scale = max(1.0, max_norm(H.mat) * max_norm(eta.mat))
    residual = pseudo_hermiticity_residual(H, eta)
    h, _rho = equivalent_hermitian(H, eta, ctx.tol)
    herm_defect = max_norm(h.mat - h.mat.conj().T)
    completeness = sys.completeness_defect()
    verdicts = [
        _verdict("pseudo_hermiticity_residual", residual, RESIDUAL_REL * scale),
        _verdict("equivalent_hermitian_defect", herm_defect,
                 RESIDUAL_REL * max(1.0, max_norm(h.mat))),
        _verdict("completeness_defect", completeness, RESIDUAL_REL * scale),
    ]
    data = {
        "spectrum": _pairs(sys.eigenvalues),
        "spectrum_is_real": bool(spectrum_is_real(H, ctx.tol)),
        "gram_defect": float(sys.gram_defect()),
    }
    P = ctx.parity_matrix()
    if P is not None:
        C, comm, invol = c_operator(eta, P, H, ctx.tol)
        p_residual = max_norm(H.mat.conj().T @ P.mat - P.mat @ H.mat)
        data["c_operator"] = {
            "parity_pseudo_hermiticity_residual": float(p_residual),
            "commutation_residual": float(comm),
            "involution_defect": float(invol),
        }
        if p_residual <= 1e-10 * max(1.0, max_norm(H.mat) * max_norm(P.mat)):
            verdicts.append(_verdict("c_commutes_with_H", comm,
                                     RESIDUAL_REL * max(1.0, max_norm(H.mat))))
    return {"data": data, "verdicts": verdicts}


def _perturbative_task(ctx: _RunContext, task: PerturbativeTask) -> dict:
    split = ctx.get_split()
    q = solve_q_series(split, task.order, tol=ctx.tol)
    ctx.solved = (task.order, q)
    scale = max(1.0, max_norm(split.H0.mat) + max_norm(split.H1.mat))
    qscale = max(1.0, max(max_norm(t.mat) for t in q.terms))
    verdicts = []
    residuals = []
    for m in range(1, task.order + 1):
        rm = max_norm(order_residual(split, q, m).mat)
        residuals.append(rm)
        verdicts.append(_verdict(f"order_{m}_residual", rm, ctx.tol.bound(scale * qscale**m)))
    herm = max(max_norm(t.mat - t.mat.conj().T) for t in q.terms)
    verdicts.append(_verdict("q_terms_hermitian", herm, 1e-12 * max(1.0, qscale)))
    eta = metric_from_series(q, split.epsilon)
    flags = classify(eta.op, ctx.tol)
    verdicts.append(
        {
            "name": "metric_positive_definite",
            "ok": bool(flags.positive_definite),
            "value": float(np.linalg.eigvalsh(eta.mat)[0]),
            "threshold": float(ctx.tol.abs_tol),
        }
    )
    data = {
        "order": task.order,
        "order_residuals": [float(r) for r in residuals],
        "metric_residual_at_epsilon": float(
            pseudo_hermiticity_residual(split.total(), eta)
        ),
        "epsilon": float(split.epsilon),
        "gauge_log": [dict(g) for g in q.gauge_log],
        "q_term_norms": [float(max_norm(t.mat)) for t in q.terms],
    }
    return {"data": data, "verdicts": verdicts}


def _scaling_task(ctx: _RunContext, task: ScalingTask) -> dict:
    if ctx.solved is None:
        raise PseudohermError("scaling requires a perturbative task earlier in the task list")
    order, q = ctx.solved
    split = ctx.get_split()
    curve = residual_curve(split, q, task.eps_list)
    slope = scaling_exponent(split, q, task.eps_list)
    expected_min = order + 1 - 0.4
    data = {
        "order": order,
        "curve": [[float(e), float(r)] for e, r in curve],
        "slope": float(slope),
        "expected_min_slope": float(expected_min),
    }
    verdict = {
        "name": "residual_order_contract",
        "ok": bool(slope >= expected_min),
        "value": float(slope),
        "threshold": float(expected_min),
    }
    return {"data": data, "verdicts": [verdict]}


def _wave_task(ctx: _RunContext) -> dict:
    model = ctx.spec.model
    if not isinstance(model, SchroedingerModel):
        raise PseudohermError("the wave task applies only to schroedinger models")
    v = model.potential
    split = ctx.get_split()
    K = particular_kernel_q1(v)
    herm = hermiticity_defect(K, samples=400, rng=ctx.rng)
    M = kernel_to_matrix(K, model.L, model.N)
    offdiag = offdiagonal_commutator_check(split, M, band_exclude=2)
    xs = np.linspace(-(model.L - 1.0), model.L - 1.0, 41)
    jump = jump_condition_defect(K, v, 1e-3, xs)
    V = potential_antiderivative(v)
    vmax = float(np.abs(V(grid_points(model.L, model.N))).max())
    grid = grid_points(model.L, model.N)
    slice_vals = np.asarray(K(grid, 0.0))
    verdicts = [
        _verdict("kernel_hermiticity_defect", herm, KERNEL_HERM_TOL * max(1.0, vmax)),
        _verdict("jump_condition_defect", jump, JUMP_TOL),
        _verdict(
            "offdiagonal_commutator_defect",
            offdiag,
            RESIDUAL_REL * max(1.0, max_norm(split.H0.mat) * max_norm(M.mat)),
        ),
    ]
    data = {
        "kernel_slice": {
            "y0": 0.0,
            "rows": [
                [float(x), float(z.real), float(z.imag)]
                for x, z in zip(grid, slice_vals)
            ],
        },
        "antiderivative_max": vmax,
    }
    return {"data": data, "verdicts": verdicts}


def run_model_spec(spec: ModelSpec, seed: int = 0, abs_tol: float | None = None) -> dict:
    """Execute the spec's tasks and assemble the report dict."""
    tol = spec.tolerance if abs_tol is None else Tolerance(abs_tol, spec.tolerance.rel_tol)
    ctx = _RunContext(spec, seed, tol)
    records = []
    for task in spec.tasks:
        record = {"task": task.kind, "ok": True, "error": None, "data": {}, "verdicts": []}
        try:
            if isinstance(task, SpectralTask):
                result = _spectral_task(ctx)
            elif isinstance(task, PerturbativeTask):
                result = _perturbative_task(ctx, task)
            elif isinstance(task, ScalingTask):
                result = _scaling_task(ctx, task)
            elif isinstance(task, WaveTask):
                result = _wave_task(ctx)
            else:  # pragma: no cover
                raise PseudohermError(f"unknown task {task!r}")
            record["data"] = result["data"]
            record["verdicts"] = result["verdicts"]
            record["ok"] = all(v["ok"] for v in result["verdicts"])
        except PseudohermError as exc:
            record["ok"] = False
            record["error"] = f"{type(exc).__name__}: {exc}"
        records.append(record)
    return {
        "name": spec.name,
        "provenance": {
            "spec_sha256": spec.sha256,
            "seed": int(seed),
            "version": __version__,
            "tolerance": {"abs_tol": tol.abs_tol, "rel_tol": tol.rel_tol},
        },
        "tasks": records,
        "all_passed": all(r["ok"] for r in records),
    }
