"""Eigenvalue machinery: Perron power iteration with Collatz-Wielandt
certificates, dense nonsymmetric spectra, and operator 2-norm estimation.

The power iteration is the positive-operator route; the dense solve
(balanced Hessenberg QR via LAPACK) is the independent cross-check.  The
two must agree or the caller aborts, so neither silently wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeEntry, NonPositiveVector, NotConverged, QRNotConverged

SPECTRUM_ORDER_CAP = 4096


def _as_array(mat) -> np.ndarray:
    data = getattr(mat, "data", mat)
    return np.asarray(data, dtype=float)


@dataclass(frozen=True)
class PerronResult:
    """Dominant eigenpair of a nonnegative matrix with a certificate.

    The Collatz-Wielandt bounds sandwich the spectral radius; their gap at
    convergence is at most the requested tolerance.
    """

    rho: float
    vector: np.ndarray
    cw_lower: float
    cw_upper: float
    iterations: int


def _start_vector(order: int, seed: int) -> np.ndarray:
    # strictly positive start: convergence for every primitive matrix
    rng = np.random.default_rng(seed)
    return rng.uniform(0.5, 1.5, size=order)


def perron(mat, tol: float = 1e-11, max_iter: int = 100_000, seed: int = 0) -> PerronResult:
    """Power iteration for the Perron root of a nonnegative primitive matrix.

    Converges when the Collatz-Wielandt gap max_i (Av)_i/v_i - min_i (Av)_i/v_i
    drops to ``tol``; the returned value is the Rayleigh ratio at the final
    iterate, which the certificate brackets.
    """
    a = _as_array(mat)
    if np.any(a < 0):
        raise NegativeEntry("matrix has a negative entry")
    v = _start_vector(a.shape[0], seed)
    v /= np.linalg.norm(v)
    for iteration in range(1, max_iter + 1):
        w = a @ v
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            raise NotConverged("iterate vanished; matrix is not primitive")
        if v.min() > 0.0:
            ratios = w / v
            lower = float(ratios.min())
            upper = float(ratios.max())
            if upper - lower <= tol:
                rho = float(v @ w / (v @ v))
                return PerronResult(rho, v, lower, upper, iteration)
        v = w / norm_w
    raise NotConverged(f"certificate gap above {tol} after {max_iter} iterations")


def adjoint_perron(mat, tol: float = 1e-11, max_iter: int = 100_000, seed: int = 0) -> PerronResult:
    """Perron iteration on the transpose (same root, adjoint eigenvector)."""
    return perron(_as_array(mat).T, tol=tol, max_iter=max_iter, seed=seed)


def collatz_wielandt_bounds(mat, v: np.ndarray) -> tuple[float, float]:
    """min/max of (Av)_i / v_i over a positive vector: brackets the Perron root."""
    a = _as_array(mat)
    if np.any(a < 0):
        raise NegativeEntry("matrix has a negative entry")
    v = np.asarray(v, dtype=float).ravel()
    if v.min() <= 0:
        raise NonPositiveVector("certificate vector must be entrywise positive")
    ratios = (a @ v) / v
    return float(ratios.min()), float(ratios.max())


def full_spectrum(mat, order_cap: int = SPECTRUM_ORDER_CAP) -> np.ndarray:
    """All eigenvalues by balanced Hessenberg QR with deflation (LAPACK).

    Ordered by descending real part, ties by ascending imaginary part;
    complex eigenvalues of real input come in conjugate pairs.
    """
    a = _as_array(mat)
    if a.shape[0] > order_cap:
        raise ValueError(f"matrix order {a.shape[0]} exceeds the cap {order_cap}")
    try:
        values = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise QRNotConverged(str(exc)) from exc
    order = np.lexsort((values.imag, -values.real))
    return values[order]


def operator_norm_2(mat, tol: float = 1e-10, max_iter: int = 100_000, seed: int = 0) -> float:
    """Largest singular value via power iteration on A^T A.

    The Gram matrix is symmetric positive semidefinite, so the Rayleigh
    estimate increases monotonically; iteration stops when its relative
    change drops below ``tol``.
    """
    a = _as_array(mat)
    v = _start_vector(a.shape[1], seed)
    v /= np.linalg.norm(v)
    sigma_sq = 0.0
    for _ in range(max_iter):
        g = a.T @ (a @ v)
        new_sigma_sq = float(v @ g)
        norm_g = np.linalg.norm(g)
        if norm_g == 0.0:
            return 0.0
        v = g / norm_g
        if abs(new_sigma_sq - sigma_sq) <= tol * max(new_sigma_sq, 1e-300):
            return float(np.sqrt(max(new_sigma_sq, 0.0)))
        sigma_sq = new_sigma_sq
    raise NotConverged(f"singular-value estimate not settled after {max_iter} iterations")
