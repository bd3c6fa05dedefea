"""Coherence and entanglement diagnostics for density matrices."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import DimensionMismatch, EigensolverFailure


@dataclass(frozen=True)
class MetricRecord:
    x: float
    coherence_power: float
    negativity: float
    trace_error: float
    min_eigenvalue: float
    purity: float

    def as_dict(self) -> dict:
        return asdict(self)


FIELDS = ("coherence_power", "negativity", "trace_error", "min_eigenvalue", "purity")


def _elements(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "elements", rho))


def _mode_size(mat: np.ndarray) -> int:
    size = math.isqrt(mat.shape[0])
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or size * size != mat.shape[0]:
        raise DimensionMismatch(f"not a two-mode (N+1)^2 square matrix: shape {mat.shape}")
    return size


def hermitian_eigenvalues(mat: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (LAPACK ``heevd``)."""
    try:
        return np.linalg.eigvalsh(mat)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc), dim=mat.shape[0]) from exc


def coherence_power(rho) -> float:
    """Sum of ``|rho_ij|^2`` over all off-diagonal entries ``i != j``."""
    mat = np.array(_elements(rho))
    # not ||rho||_F^2 - sum |rho_ii|^2: that form bottoms out near 1e-16
    np.fill_diagonal(mat, 0.0)
    return float(np.sum(np.abs(mat) ** 2))


def partial_transpose_a(rho) -> np.ndarray:
    """Transpose the mode-a indices: ``out[(p,q),(p',q')] = rho[(p',q),(p,q')]``."""
    mat = _elements(rho)
    k = _mode_size(mat)
    t = mat.reshape(k, k, k, k).transpose(2, 1, 0, 3)
    return t.reshape(k * k, k * k).copy()


def negativity(rho, eps: float | None = None) -> float:
    """Sum of ``|lambda|`` over eigenvalues of the partial transpose below ``-eps``.

    ``eps`` defaults to ``1e-12 * dim`` so eigensolver noise on separable
    states reads as exactly zero.
    """
    pt = partial_transpose_a(rho)
    if eps is None:
        eps = 1e-12 * pt.shape[0]
    evals = hermitian_eigenvalues(pt)
    neg = evals[evals < -eps]
    return float(np.abs(neg).sum())


def purity(rho) -> float:
    mat = _elements(rho)
    return float(np.real(np.vdot(mat.conj().T, mat)))


def trace_error(rho) -> float:
    return float(abs(np.trace(_elements(rho)) - 1.0))


def min_eigenvalue(rho) -> float:
    return float(hermitian_eigenvalues(_elements(rho))[0])


def mean_photon_numbers(rho) -> tuple[float, float]:
    """``(<n_a>, <n_b>)`` of a two-mode density matrix."""
    mat = _elements(rho)
    k = _mode_size(mat)
    diag = mat.diagonal().real.reshape(k, k)
    n = np.arange(k)
    return float(n @ diag.sum(axis=1)), float(n @ diag.sum(axis=0))


def metric_record(rho, x: float) -> MetricRecord:
    return MetricRecord(
        x=float(x),
        coherence_power=coherence_power(rho),
        negativity=negativity(rho),
        trace_error=trace_error(rho),
        min_eigenvalue=min_eigenvalue(rho),
        purity=purity(rho),
    )
