"""Kernels and potentials on the torus: winding, sampling, validation, statistics.

Two kernel representations coexist.  A convolution kernel lives on the torus
as samples of a single function of the displacement (wound from a kernel on
the full space when necessary); a generic two-point kernel is a dense array
of samples b(x_i, y_j).  Potentials are nonpositive node samples.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np

from .errors import (
    DegenerateKernel,
    NotPrimitive,
    ParseError,
    PositivePotential,
    TailNotResolved,
    ValidationError,
)
from .grid import TorusGrid

WIND_CAP = 64  # largest one-sided shift radius tried while winding


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


def serial_row_sums(a: np.ndarray) -> np.ndarray:
    """Left-to-right serial sum along the last axis (deterministic order)."""
    return np.cumsum(a, axis=-1)[..., -1]


# ---------------------------------------------------------------------------
# kernels on the full space, to be wound onto the torus


@dataclass(frozen=True)
class ContinuousKernel:
    """Nonnegative integrable kernel a(z) on R^d.

    ``evaluate`` maps an array of points with trailing axis of length d to
    kernel values.  ``tail_mass_bound(N)`` must bound the total mass omitted
    when winding is truncated to integer shifts with |m|_inf <= N; the
    builtin constructors supply analytic bounds, custom kernels must bring
    their own.
    """

    dimension: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    decay_radius: float
    tag: str = "custom"
    tail_mass_bound: Callable[[int], float] | None = None


def tophat_kernel(dimension: int = 1, width: float = 1.0) -> ContinuousKernel:
    """Uniform density (2w)^-d on the half-open box [-w, w)^d.

    The half-open support makes winding exact on left-endpoint grids: no
    boundary node is double counted.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    value = (2.0 * width) ** (-dimension)

    def evaluate(pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        inside = np.all((pts >= -width) & (pts < width), axis=-1)
        return np.where(inside, value, 0.0)

    def tail(n_shift: int) -> float:
        return 0.0 if n_shift >= width else math.inf

    return ContinuousKernel(dimension, evaluate, width, "tophat", tail)


def gaussian_kernel(dimension: int = 1, sigma: float = 0.2) -> ContinuousKernel:
    """Product Gaussian density with per-axis standard deviation sigma."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    norm = (2.0 * math.pi * sigma**2) ** (-dimension / 2.0)

    def evaluate(pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        sq = np.sum(pts**2, axis=-1)
        return norm * np.exp(-sq / (2.0 * sigma**2))

    def tail(n_shift: int) -> float:
        # union bound over axes; per-axis omitted mass beyond |t| >= N
        return dimension * math.erfc(n_shift / (sigma * math.sqrt(2.0)))

    return ContinuousKernel(dimension, evaluate, 4.0 * sigma, "gaussian", tail)


def exponential_kernel(dimension: int = 1, scale: float = 0.2) -> ContinuousKernel:
    """Product Laplace density with per-axis scale parameter."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    norm = (2.0 * scale) ** (-dimension)

    def evaluate(pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        l1 = np.sum(np.abs(pts), axis=-1)
        return norm * np.exp(-l1 / scale)

    def tail(n_shift: int) -> float:
        return dimension * math.exp(-n_shift / scale)

    return ContinuousKernel(dimension, evaluate, 8.0 * scale, "exponential", tail)


# ---------------------------------------------------------------------------
# kernels on the torus


@dataclass(frozen=True)
class WoundKernel:
    """Convolution kernel on the torus: samples of sum_m a(z + m) at grid nodes.

    ``samples`` is shaped (n,)*d in axis order, so displacement lookups use
    integer index arithmetic.
    """

    dimension: int
    n: int
    samples: np.ndarray
    wind_truncation: int = 0
    tail_estimate: float = 0.0

    def __post_init__(self) -> None:
        samples = _freeze(np.asarray(self.samples, dtype=float))
        object.__setattr__(self, "samples", samples)
        if samples.shape != (self.n,) * self.dimension:
            raise ValueError("samples must be shaped (n,)*d")
        if np.any(samples < 0):
            raise ValueError("wound kernel samples must be nonnegative")
        if self.quadrature_mass() <= 0:
            raise DegenerateKernel("wound kernel has zero quadrature mass")

    def quadrature_mass(self) -> float:
        return float(self.samples.sum()) * float(self.n) ** (-self.dimension)


def wound_from_function(f: Callable[[np.ndarray], np.ndarray], grid: TorusGrid) -> WoundKernel:
    """Sample a function already periodic on the torus as a convolution kernel."""
    values = np.asarray(f(grid.node_mesh()), dtype=float)
    return WoundKernel(grid.dimension, grid.n, values)


def wind_kernel(a: ContinuousKernel, n: int, tail_tol: float = 1e-12) -> WoundKernel:
    """Wind a kernel on R^d onto the torus by summing integer translates.

    The truncation radius grows until the kernel's analytic tail bound drops
    below ``tail_tol``; the omitted mass estimate is recorded on the result.
    """
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    if not math.isfinite(a.decay_radius) or a.decay_radius < 0:
        raise ValueError("kernel decay_radius must be finite and nonnegative")
    if a.tail_mass_bound is None:
        raise TailNotResolved("kernel supplies no tail mass bound; cannot wind")

    n_wind = 0
    while a.tail_mass_bound(n_wind) > tail_tol:
        n_wind += 1
        if n_wind > WIND_CAP:
            raise TailNotResolved(
                f"tail bound still {a.tail_mass_bound(WIND_CAP):.3e} at shift radius {WIND_CAP}"
            )

    grid = TorusGrid(a.dimension, n)
    mesh = grid.node_mesh()
    acc = np.zeros((n,) * a.dimension)
    for shift in product(range(-n_wind, n_wind + 1), repeat=a.dimension):
        acc = acc + a.evaluate(mesh + np.asarray(shift, dtype=float))
    return WoundKernel(a.dimension, n, acc, n_wind, float(a.tail_mass_bound(n_wind)))


@dataclass(frozen=True)
class GenericKernel:
    """Two-point kernel b(x, y) on the tensor grid as an (n^d, n^d) array.

    Row index is the x node, column index the y node, both in the grid's
    row-major node order.
    """

    dimension: int
    n: int
    samples: np.ndarray
    tag: str = "custom-tabulated"

    def __post_init__(self) -> None:
        samples = _freeze(np.asarray(self.samples, dtype=float))
        object.__setattr__(self, "samples", samples)
        size = self.n ** self.dimension
        if samples.shape != (size, size):
            raise ValueError("samples must be an (n^d, n^d) array")
        if np.any(samples < 0):
            raise DegenerateKernel("kernel samples must be nonnegative")
        if not np.any(samples > 0):
            raise DegenerateKernel("kernel is identically zero")

    @property
    def weight(self) -> float:
        return float(self.n) ** (-self.dimension)

    def transpose(self) -> "GenericKernel":
        return GenericKernel(self.dimension, self.n, self.samples.T.copy(), self.tag)


def constant_kernel(grid: TorusGrid, value: float = 1.0) -> GenericKernel:
    return GenericKernel(
        grid.dimension, grid.n, np.full((grid.size, grid.size), float(value)), "constant"
    )


def separable_kernel(grid: TorusGrid, row_profile: np.ndarray, col_profile: np.ndarray) -> GenericKernel:
    """b(x, y) = f(x) g(y) from per-node profiles."""
    f = np.asarray(row_profile, dtype=float).ravel()
    g = np.asarray(col_profile, dtype=float).ravel()
    if f.size != grid.size or g.size != grid.size:
        raise ValueError("profiles must have one value per grid node")
    return GenericKernel(grid.dimension, grid.n, np.outer(f, g), "separable")


def displacement_index(grid: TorusGrid) -> tuple[np.ndarray, ...]:
    """Index arrays mapping (x node, y node) to the torus displacement node.

    Pure integer arithmetic mod n; no floating-point wraparound.
    """
    idx = grid.index_grid()
    return tuple(
        (idx[:, axis][:, None] - idx[:, axis][None, :]) % grid.n
        for axis in range(grid.dimension)
    )


def convolution_kernel(wound: WoundKernel, grid: TorusGrid) -> GenericKernel:
    """Generic form b(x, y) = a(x - y) of a convolution kernel."""
    _require_same_grid(wound, grid)
    samples = wound.samples[displacement_index(grid)]
    return GenericKernel(grid.dimension, grid.n, samples, "modulated_convolution")


def modulated_convolution(
    wound: WoundKernel,
    grid: TorusGrid,
    modulation: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> GenericKernel:
    """b(x, y) = a(x - y) * mu(x, y) for a positive symmetric modulation mu."""
    _require_same_grid(wound, grid)
    base = wound.samples[displacement_index(grid)]
    coords = grid.coordinates()
    mu = np.asarray(modulation(coords[:, None, :], coords[None, :, :]), dtype=float)
    if mu.shape != (grid.size, grid.size):
        raise ValueError("modulation must produce an (n^d, n^d) array")
    if np.any(mu <= 0):
        raise DegenerateKernel("modulation must be strictly positive")
    if not np.allclose(mu, mu.T, rtol=0.0, atol=1e-12):
        raise ValueError("modulation must be symmetric in (x, y)")
    return GenericKernel(grid.dimension, grid.n, base * mu, "modulated_convolution")


def _require_same_grid(obj, grid: TorusGrid) -> None:
    if obj.dimension != grid.dimension or obj.n != grid.n:
        from .errors import GridMismatch

        raise GridMismatch(
            f"object sampled at d={obj.dimension}, n={obj.n}; grid has d={grid.dimension}, n={grid.n}"
        )


# ---------------------------------------------------------------------------
# potentials


@dataclass(frozen=True)
class Potential:
    """Nonpositive potential samples in grid node order (flat, length n^d)."""

    dimension: int
    n: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = _freeze(np.asarray(self.samples, dtype=float).ravel())
        object.__setattr__(self, "samples", samples)
        if samples.size != self.n ** self.dimension:
            raise ValueError("potential needs one sample per grid node")
        if np.any(samples > 0):
            raise PositivePotential(
                f"potential has a positive sample (max {samples.max():.6g})"
            )

    @property
    def fraction_negative(self) -> float:
        return float(np.count_nonzero(self.samples < 0)) / self.samples.size


def potential_from_function(f: Callable[[np.ndarray], np.ndarray], grid: TorusGrid) -> Potential:
    values = np.asarray(f(grid.coordinates()), dtype=float).ravel()
    return Potential(grid.dimension, grid.n, values)


def constant_potential(grid: TorusGrid, depth: float) -> Potential:
    return Potential(grid.dimension, grid.n, np.full(grid.size, -float(depth)))


def zero_potential(grid: TorusGrid) -> Potential:
    return Potential(grid.dimension, grid.n, np.zeros(grid.size))


def step_potential(grid: TorusGrid, depth: float = 1.0, width: float = 0.5) -> Potential:
    """-depth where the first coordinate lies in [0, width), zero elsewhere."""
    x0 = grid.coordinates()[:, 0]
    return Potential(grid.dimension, grid.n, np.where(x0 < width, -float(depth), 0.0))


def cosine_potential(grid: TorusGrid, depth: float = 1.0) -> Potential:
    """Smooth well -depth * prod_axes (1 + cos(2 pi x_a)) / 2, zero only at x_a = 1/2."""
    coords = grid.coordinates()
    prof = np.prod((1.0 + np.cos(2.0 * np.pi * coords)) / 2.0, axis=1)
    return Potential(grid.dimension, grid.n, -float(depth) * prof)


@dataclass(frozen=True)
class PotentialDiagnostics:
    """Quadrature norms and strict-negativity eligibility of a potential."""

    max_sample: float
    fraction_negative: float
    norm_l1: float
    norm_l2: float
    eligible: bool


def check_potential(potential: Potential) -> PotentialDiagnostics:
    """Norms by grid quadrature plus eligibility for guaranteed-regime analysis.

    Eligible means every sample is nonpositive and at least one node is
    strictly negative (the discrete reading of negativity on a set of
    positive measure).
    """
    v = potential.samples
    if np.any(v > 0):
        raise PositivePotential("potential has a positive sample")
    weight = float(potential.n) ** (-potential.dimension)
    frac = potential.fraction_negative
    return PotentialDiagnostics(
        max_sample=float(v.max()),
        fraction_negative=frac,
        norm_l1=float(np.abs(v).sum() * weight),
        norm_l2=float(math.sqrt((v**2).sum() * weight)),
        eligible=bool(frac > 0),
    )


# ---------------------------------------------------------------------------
# kernel statistics


def jump_rate(b: GenericKernel) -> np.ndarray:
    """Row quadrature of the kernel: W(x_i) = h^d * sum_j b(x_i, y_j).

    Uses a serial per-row reduction; operator assembly reuses the same
    quadrature so that the assembled generator annihilates constants.
    """
    return serial_row_sums(b.samples * b.weight)


@dataclass(frozen=True)
class KernelStats:
    """Row/column integral bounds and the primitivity certificate.

    ``primitive_power`` is the smallest k for which the k-th power of the
    quadrature matrix h^d b is entrywise positive; ``iterated_kernel_min``
    is the minimum of that power rescaled back to kernel normalization.
    """

    row_integral_min: float
    row_integral_max: float
    col_integral_max: float
    primitive_power: int
    iterated_kernel_min: float

    def as_dict(self) -> dict:
        return {
            "row_integral_min": self.row_integral_min,
            "row_integral_max": self.row_integral_max,
            "col_integral_max": self.col_integral_max,
            "primitive_power": self.primitive_power,
            "iterated_kernel_min": self.iterated_kernel_min,
        }


def kernel_stats(b: GenericKernel, n_max: int = 16) -> KernelStats:
    """Integral bounds, primitivity power, and iterated-kernel floor.

    Raises DegenerateKernel when some row integral vanishes, NotPrimitive
    when no power up to ``n_max`` is entrywise positive at this resolution.
    """
    rows = jump_rate(b)
    cols = serial_row_sums(b.samples.T * b.weight)
    gamma1 = float(rows.min())
    if gamma1 <= 0:
        raise DegenerateKernel("kernel row integral vanishes somewhere")

    quad = b.weight * b.samples
    power = quad
    n_prim = 0
    for k in range(1, max(1, n_max) + 1):
        if np.all(power > 0):
            n_prim = k
            break
        power = power @ quad
    else:
        raise NotPrimitive(f"no power up to {n_max} is entrywise positive at this resolution")

    return KernelStats(
        row_integral_min=gamma1,
        row_integral_max=float(rows.max()),
        col_integral_max=float(cols.max()),
        primitive_power=n_prim,
        iterated_kernel_min=float(power.min() / b.weight),
    )


def tail_mass(b: GenericKernel, level: float) -> float:
    """Worst-row quadrature mass carried by samples exceeding ``level``.

    Diagnostic for uniform integrability: non-increasing in the level and at
    most the largest row integral as the level vanishes.
    """
    if level <= 0:
        raise ValueError("level must be positive")
    clipped = np.where(b.samples > level, b.samples, 0.0)
    return float(serial_row_sums(clipped * b.weight).max())


# ---------------------------------------------------------------------------
# CSV ingestion (tabulated kernels and potentials)


def _node_index(value: str, n: int, path: str, line: int) -> int:
    try:
        x = float(value)
    except ValueError as exc:
        raise ParseError(f"{path}:{line}: not a number: {value!r}") from exc
    i = int(round(x * n))
    if not (0 <= i < n) or abs(x - i / n) > 1e-12:
        raise ValidationError(f"{path}:{line}: coordinate {x!r} is not a grid node of n={n}")
    return i


def _read_rows(path: str, expected_header: list[str]) -> list[tuple[int, list[str]]]:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != expected_header:
            raise ParseError(
                f"{path}: expected header {','.join(expected_header)!r}, got {','.join(header)!r}"
            )
        rows = []
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise ParseError(f"{path}:{line}: expected {len(expected_header)} fields")
            rows.append((line, row))
    return rows


def kernel_from_csv(path: str, grid: TorusGrid) -> GenericKernel:
    """Read a tabulated two-point kernel; every grid node pair must appear once."""
    header = ["x", "y", "value"] if grid.dimension == 1 else ["x1", "x2", "y1", "y2", "value"]
    rows = _read_rows(path, header)
    n = grid.n
    samples = np.full((grid.size, grid.size), np.nan)
    for line, row in rows:
        if grid.dimension == 1:
            i = _node_index(row[0], n, path, line)
            j = _node_index(row[1], n, path, line)
        else:
            i = _node_index(row[0], n, path, line) * n + _node_index(row[1], n, path, line)
            j = _node_index(row[2], n, path, line) * n + _node_index(row[3], n, path, line)
        try:
            value = float(row[-1])
        except ValueError as exc:
            raise ParseError(f"{path}:{line}: not a number: {row[-1]!r}") from exc
        if value < 0:
            raise ValidationError(f"{path}:{line}: negative kernel value {value!r}")
        if not np.isnan(samples[i, j]):
            raise ValidationError(f"{path}:{line}: duplicate node pair")
        samples[i, j] = value
    if np.isnan(samples).any():
        missing = int(np.isnan(samples).sum())
        raise ValidationError(f"{path}: {missing} grid node pairs missing")
    return GenericKernel(grid.dimension, grid.n, samples, "custom-tabulated")


def potential_from_csv(path: str, grid: TorusGrid) -> Potential:
    """Read a tabulated potential; every grid node must appear exactly once."""
    header = ["x", "value"] if grid.dimension == 1 else ["x1", "x2", "value"]
    rows = _read_rows(path, header)
    n = grid.n
    samples = np.full(grid.size, np.nan)
    for line, row in rows:
        if grid.dimension == 1:
            i = _node_index(row[0], n, path, line)
        else:
            i = _node_index(row[0], n, path, line) * n + _node_index(row[1], n, path, line)
        try:
            value = float(row[-1])
        except ValueError as exc:
            raise ParseError(f"{path}:{line}: not a number: {row[-1]!r}") from exc
        if value > 0:
            raise ValidationError(f"{path}:{line}: positive potential value {value!r}")
        if not np.isnan(samples[i]):
            raise ValidationError(f"{path}:{line}: duplicate node")
        samples[i] = value
    if np.isnan(samples).any():
        raise ValidationError(f"{path}: {int(np.isnan(samples).sum())} grid nodes missing")
    return Potential(grid.dimension, grid.n, samples)
