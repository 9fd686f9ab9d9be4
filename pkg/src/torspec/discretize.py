"""Dense collocation matrices for the torus operators, and Fourier symbols.

Assembly convention: off-diagonal entries hold h^d b(x_i, y_j); the diagonal
of a generator carries V(x_i) minus the serial sum of the off-diagonal row.
The kernel's own diagonal sample never enters, mirroring the difference
structure b(x,y)(u(y) - u(x)) where it cancels identically.  With the
matching serial reduction in ``apply`` the assembled generator annihilates
constant vectors exactly, not merely to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, GridMismatch, MuBelowEdge
from .grid import TorusGrid
from .kernels import (
    GenericKernel,
    Potential,
    WoundKernel,
    convolution_kernel,
    jump_rate,
    serial_row_sums,
)

MU_EDGE_MARGIN = 1e-12


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense square matrix for one of the torus operators.

    Roles: "M" (generator, generic kernel), "L" (generator, convolution
    kernel), "B" (kernel part alone), "Q" (edge-shifted ratio operator),
    or "custom".  ``edge_sup`` records sup(W - V) when the assembly knows it.
    """

    data: np.ndarray
    role: str
    grid: TorusGrid
    shift: float = 0.0
    edge_sup: float | None = None

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=float)
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DimensionMismatch("operator matrix must be square")
        if data.shape[0] != self.grid.size:
            raise DimensionMismatch(
                f"matrix order {data.shape[0]} does not match grid size {self.grid.size}"
            )
        if self.role in ("B", "Q"):
            if np.any(data < 0):
                raise ValueError(f"role {self.role} requires entrywise nonnegative data")
        elif self.role in ("M", "L"):
            off = data.copy()
            np.fill_diagonal(off, 0.0)
            if np.any(off < 0):
                raise ValueError(f"role {self.role} requires nonnegative off-diagonal entries")

    @property
    def order(self) -> int:
        return self.data.shape[0]

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Matrix-vector product with serial per-row reduction.

        Off-diagonal terms accumulate left to right, the diagonal term is
        added last; this matches the assembly-time row sums bit for bit.
        """
        u = np.asarray(u, dtype=float).ravel()
        if u.size != self.order:
            raise DimensionMismatch(f"vector of length {u.size} against order {self.order}")
        diag = np.diagonal(self.data)
        off = self.data.copy()
        np.fill_diagonal(off, 0.0)
        return serial_row_sums(off * u[None, :]) + diag * u

    def matvec(self, u: np.ndarray) -> np.ndarray:
        """Fast BLAS product for inner iteration loops (still deterministic)."""
        return self.data @ u

    def transpose(self) -> "OperatorMatrix":
        return OperatorMatrix(self.data.T.copy(), self.role, self.grid, self.shift, self.edge_sup)

    def shifted(self, k: float) -> "OperatorMatrix":
        """Add k to the diagonal, tracking the accumulated shift."""
        data = self.data.copy()
        np.fill_diagonal(data, np.diagonal(data) + k)
        return OperatorMatrix(data, "custom", self.grid, self.shift + k)

    def to_csv(self, path: str) -> None:
        np.savetxt(path, self.data, delimiter=",", fmt="%.17g")


def _check_pair(b, potential: Potential | None, grid: TorusGrid) -> None:
    for obj in (b, potential):
        if obj is None:
            continue
        if obj.dimension != grid.dimension or obj.n != grid.n:
            raise GridMismatch(
                f"operand with d={obj.dimension}, n={obj.n} against grid d={grid.dimension}, n={grid.n}"
            )


def assemble_B(b: GenericKernel, grid: TorusGrid) -> OperatorMatrix:
    """Kernel part alone: (Bu)(x_i) = h^d sum_j b(x_i, y_j) u(y_j)."""
    _check_pair(b, None, grid)
    return OperatorMatrix(grid.weight * b.samples, "B", grid)


def _generator_data(b: GenericKernel, potential: Potential, grid: TorusGrid) -> np.ndarray:
    scaled = grid.weight * b.samples
    off = scaled.copy()
    np.fill_diagonal(off, 0.0)
    row = serial_row_sums(off)
    data = off
    np.fill_diagonal(data, potential.samples - row)
    return data


def assemble_generator(b: GenericKernel, potential: Potential, grid: TorusGrid) -> OperatorMatrix:
    """Jump generator with a generic kernel: kernel part plus (V - W) on the diagonal."""
    _check_pair(b, potential, grid)
    w = jump_rate(b)
    return OperatorMatrix(
        _generator_data(b, potential, grid),
        "M",
        grid,
        edge_sup=float((w - potential.samples).max()),
    )


def assemble_convolution_generator(
    wound: WoundKernel, potential: Potential, grid: TorusGrid
) -> OperatorMatrix:
    """Jump generator whose kernel part is the circulant of a wound kernel."""
    _check_pair(wound, potential, grid)
    b = convolution_kernel(wound, grid)
    w = jump_rate(b)
    return OperatorMatrix(
        _generator_data(b, potential, grid),
        "L",
        grid,
        edge_sup=float((w - potential.samples).max()),
    )


def assemble_birman_schwinger(
    b: GenericKernel,
    potential: Potential,
    mu: float,
    grid: TorusGrid,
    adjoint: bool = False,
) -> OperatorMatrix:
    """Ratio operator h^d b(x_i, y_j) / (U(x_i) + W(x_i) + mu), U = -V.

    Its spectral radius crosses one exactly at the maximum eigenvalue of the
    generator.  ``adjoint`` transposes the kernel while keeping the same
    row denominators, yielding the adjoint-generator counterpart.
    """
    _check_pair(b, potential, grid)
    u = -potential.samples
    w = jump_rate(b)
    alpha1 = float((u + w).min())
    if mu <= -alpha1 + MU_EDGE_MARGIN:
        raise MuBelowEdge(f"shift {mu!r} at or below admissible edge {-alpha1!r}")
    denom = u + w + mu
    samples = b.samples.T if adjoint else b.samples
    return OperatorMatrix(grid.weight * samples / denom[:, None], "Q", grid, shift=mu)


# ---------------------------------------------------------------------------
# Fourier symbols of convolution kernels


@dataclass(frozen=True)
class FourierSymbol:
    """Fourier coefficients of a wound kernel on the resolved band |k_a| < n/2.

    ``coefficients`` is shaped (len(wavenumbers),)*d with axes ordered like
    ``wavenumbers`` (ascending, symmetric about zero).
    """

    dimension: int
    n: int
    wavenumbers: np.ndarray
    coefficients: np.ndarray

    @property
    def mass(self) -> float:
        """Zeroth coefficient: the quadrature mass of the kernel."""
        return float(np.real(self.coefficient((0,) * self.dimension)))

    def coefficient(self, k) -> complex:
        k = np.atleast_1d(np.asarray(k, dtype=int))
        if k.size != self.dimension:
            raise DimensionMismatch("wavevector length must equal the dimension")
        half = (len(self.wavenumbers) - 1) // 2
        if np.any(np.abs(k) > half):
            raise ValueError("wavevector outside the resolved band")
        return complex(self.coefficients[tuple(k + half)])

    def max_offzero_modulus(self) -> float:
        """Largest |a_k| over nonzero wavevectors in the resolved band."""
        mods = np.abs(self.coefficients).copy()
        half = (len(self.wavenumbers) - 1) // 2
        mods[(half,) * self.dimension] = -1.0
        return float(mods.max())


def fourier_symbol(wound: WoundKernel) -> FourierSymbol:
    """Quadrature Fourier coefficients a_k = h^d sum_i a(z_i) exp(-2 pi i k.z_i)."""
    n = wound.n
    d = wound.dimension
    full = np.fft.fftn(wound.samples) * float(n) ** (-d)
    half = (n - 1) // 2  # excludes the unmatched Nyquist mode for even n
    order = np.arange(-half, half + 1) % n
    coeff = full[np.ix_(*([order] * d))] if d > 1 else full[order]
    coeff = np.ascontiguousarray(coeff)
    coeff.flags.writeable = False
    waves = np.arange(-half, half + 1)
    waves.flags.writeable = False
    return FourierSymbol(d, n, waves, coeff)
