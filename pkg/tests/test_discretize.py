"""Operator assembly, the ratio operator, Fourier symbols, apply semantics."""

import math

import numpy as np
import pytest

import torspec as ts
from conftest import make_f1, make_f2, sine_wound


def test_generator_conservative_exactly():
    # with zero potential the assembled generator annihilates constants
    # exactly, including for irrational kernel samples
    for n in (16, 50):
        grid = ts.TorusGrid(1, n)
        for kernel in (
            ts.constant_kernel(grid),
            ts.convolution_kernel(sine_wound(grid), grid),
        ):
            gen = ts.assemble_generator(kernel, ts.zero_potential(grid), grid)
            result = gen.apply(np.ones(grid.size))
            assert np.all(result == 0.0)


def test_generator_constant_kernel_matrix():
    grid = ts.TorusGrid(1, 4)
    gen = ts.assemble_generator(ts.constant_kernel(grid), ts.constant_potential(grid, 0.3), grid)
    expected = np.full((4, 4), 0.25)
    np.fill_diagonal(expected, 0.25 - 1.3)
    assert np.allclose(gen.data, expected, rtol=0, atol=1e-15)


def test_generator_step_diagonal_hand_evaluated():
    # hand evaluation of the assembly formula at n=8: diagonal h + V - W
    grid = ts.TorusGrid(1, 8)
    gen = ts.assemble_generator(ts.constant_kernel(grid), ts.step_potential(grid), grid)
    diag = np.diagonal(gen.data)
    assert np.all(diag[:4] == 0.125 - 1.0 - 1.0)
    assert np.all(diag[4:] == 0.125 - 1.0)
    off = gen.data.copy()
    np.fill_diagonal(off, 0.0)
    assert np.all(off[~np.eye(8, dtype=bool)] == 0.125)


def test_convolution_generator_matches_generic_assembly():
    grid = ts.TorusGrid(1, 32)
    ones = ts.wound_from_function(lambda mesh: np.ones(mesh.shape[:-1]), grid)
    potential = ts.constant_potential(grid, 0.3)
    from_wound = ts.assemble_convolution_generator(ones, potential, grid)
    from_generic = ts.assemble_generator(ts.constant_kernel(grid), potential, grid)
    assert np.array_equal(from_wound.data, from_generic.data)
    assert from_wound.role == "L"


def test_convolution_generator_rank_one_spectrum():
    grid = ts.TorusGrid(1, 32)
    ones = ts.wound_from_function(lambda mesh: np.ones(mesh.shape[:-1]), grid)
    gen = ts.assemble_convolution_generator(ones, ts.constant_potential(grid, 0.3), grid)
    values = np.sort(np.linalg.eigvals(gen.data).real)
    assert abs(values[-1] + 0.3) < 1e-12
    assert np.allclose(values[:-1], -1.3, rtol=0, atol=1e-12)


def test_birman_schwinger_rank_one_fixture():
    grid, kernel, potential = make_f1(n=4)
    q = ts.assemble_birman_schwinger(kernel, potential, 0.0, grid)
    assert np.allclose(q.data, 0.25 / 1.3, rtol=0, atol=1e-15)
    rho = ts.perron(q).rho
    assert abs(rho - 1.0 / 1.3) < 1e-11


def test_birman_schwinger_unit_radius_at_eigenvalue():
    grid, kernel, potential = make_f1(n=64)
    rho = ts.perron(ts.assemble_birman_schwinger(kernel, potential, -0.3, grid)).rho
    assert abs(rho - 1.0) < 1e-10


def test_birman_schwinger_rejects_edge_shift():
    grid, kernel, potential = make_f1(n=16)
    with pytest.raises(ts.MuBelowEdge):
        ts.assemble_birman_schwinger(kernel, potential, -1.3, grid)


def test_birman_schwinger_entries_are_scaled_kernel_rows():
    grid, kernel, potential = make_f2(n=16)
    mu = -0.4
    q = ts.assemble_birman_schwinger(kernel, potential, mu, grid)
    rates = ts.jump_rate(kernel)
    denom = -potential.samples + rates + mu
    recomputed = grid.weight * kernel.samples / denom[:, None]
    assert np.array_equal(q.data, recomputed)


def test_birman_schwinger_adjoint_spectrum_matches():
    grid = ts.TorusGrid(1, 32)
    kernel = ts.convolution_kernel(sine_wound(grid), grid)
    potential = ts.constant_potential(grid, 0.3)
    q = ts.assemble_birman_schwinger(kernel, potential, -0.1, grid)
    q_star = ts.assemble_birman_schwinger(kernel, potential, -0.1, grid, adjoint=True)
    rho = ts.perron(q).rho
    rho_star = ts.perron(q_star).rho
    assert abs(rho - rho_star) < 1e-10


# -- Fourier symbols ----------------------------------------------------------


def test_fourier_symbol_constant():
    grid = ts.TorusGrid(1, 16)
    symbol = ts.fourier_symbol(ts.wound_from_function(lambda m: np.ones(m.shape[:-1]), grid))
    assert symbol.mass == 1.0
    assert abs(symbol.coefficient(0) - 1.0) == 0.0
    for k in range(1, 8):
        assert abs(symbol.coefficient(k)) < 1e-15
    assert symbol.max_offzero_modulus() < 1e-15


def test_fourier_symbol_sine_modes():
    grid = ts.TorusGrid(1, 64)
    symbol = ts.fourier_symbol(sine_wound(grid))
    # analytic expansion: the sine contributes -+ i/4 at the first modes
    assert abs(symbol.coefficient(1) - (-0.25j)) < 1e-14
    assert abs(symbol.coefficient(-1) - (0.25j)) < 1e-14
    assert abs(symbol.max_offzero_modulus() - 0.25) < 1e-14
    for k in (2, 3, 5, 11):
        assert abs(symbol.coefficient(k)) < 1e-14


def test_fourier_symbol_wound_gaussian_against_heat_decay():
    wound = ts.wind_kernel(ts.gaussian_kernel(1, 0.2), 128, 1e-12)
    symbol = ts.fourier_symbol(wound)
    for k in (1, 2, 3):
        analytic = math.exp(-2.0 * math.pi**2 * 0.04 * k * k)
        assert abs(symbol.coefficient(k) - analytic) < 1e-12


def test_fourier_symbol_conjugate_symmetry():
    grid = ts.TorusGrid(1, 32)
    rng = np.random.default_rng(2)
    wound = ts.WoundKernel(1, 32, rng.uniform(0.1, 1.0, 32))
    symbol = ts.fourier_symbol(wound)
    for k in range(1, 16):
        assert abs(symbol.coefficient(-k) - np.conj(symbol.coefficient(k))) < 1e-14
    assert abs(symbol.mass - wound.quadrature_mass()) < 1e-14


def test_fourier_symbol_two_dimensional():
    grid = ts.TorusGrid(2, 8)
    wound = ts.wound_from_function(
        lambda mesh: 1.0 + 0.25 * np.cos(2 * np.pi * mesh[..., 0]), grid
    )
    symbol = ts.fourier_symbol(wound)
    assert abs(symbol.coefficient((0, 0)) - 1.0) < 1e-14
    assert abs(symbol.coefficient((1, 0)) - 0.125) < 1e-14
    assert abs(symbol.coefficient((0, 1))) < 1e-14


def test_circulant_eigenvalues_match_symbol():
    grid = ts.TorusGrid(1, 64)
    wound = sine_wound(grid)
    b_part = ts.assemble_B(ts.convolution_kernel(wound, grid), grid)
    eigenvalues = np.linalg.eigvals(b_part.data)
    # oracle: quadrature DFT of the kernel samples gives every circulant eigenvalue
    dft = np.fft.fft(wound.samples) / 64
    matched = sorted(eigenvalues, key=lambda z: (z.real, z.imag))
    expected = sorted(dft, key=lambda z: (z.real, z.imag))
    assert np.allclose(matched, expected, rtol=0, atol=1e-10)
    symbol = ts.fourier_symbol(wound)
    for k in (-2, -1, 0, 1, 2):
        nearest = min(abs(eigenvalues - symbol.coefficient(k)))
        assert nearest < 1e-10


# -- apply and housekeeping ---------------------------------------------------


def test_apply_identity_and_zero():
    grid = ts.TorusGrid(1, 8)
    u = np.arange(8, dtype=float) + 1.0
    identity = ts.OperatorMatrix(np.eye(8), "custom", grid)
    assert np.array_equal(identity.apply(u), u)
    zero = ts.OperatorMatrix(np.zeros((8, 8)), "custom", grid)
    assert np.all(zero.apply(u) == 0.0)


def test_apply_constant_fixture_row_sums():
    grid, kernel, potential = make_f1(n=128)
    gen = ts.assemble_generator(kernel, potential, grid)
    result = gen.apply(np.ones(128))
    assert np.max(np.abs(result + 0.3)) < 1e-14


def test_apply_dimension_mismatch():
    grid = ts.TorusGrid(1, 8)
    gen = ts.OperatorMatrix(np.eye(8), "custom", grid)
    with pytest.raises(ts.DimensionMismatch):
        gen.apply(np.ones(9))


def test_grid_mismatch_rejected():
    grid, kernel, _ = make_f1(n=16)
    other = ts.TorusGrid(1, 32)
    with pytest.raises(ts.GridMismatch):
        ts.assemble_generator(kernel, ts.constant_potential(other, 0.3), other)


def test_role_invariants_enforced():
    grid = ts.TorusGrid(1, 4)
    negative = -np.ones((4, 4))
    with pytest.raises(ValueError):
        ts.OperatorMatrix(negative, "Q", grid)
    metzler_violation = np.zeros((4, 4))
    metzler_violation[0, 1] = -1.0
    with pytest.raises(ValueError):
        ts.OperatorMatrix(metzler_violation, "M", grid)
    # negative diagonal is fine for generators
    ts.OperatorMatrix(np.diag([-1.0, -2.0, -3.0, -4.0]), "M", grid)


def test_matrix_csv_export(tmp_path):
    grid, kernel, potential = make_f1(n=8)
    gen = ts.assemble_generator(kernel, potential, grid)
    path = tmp_path / "matrix.csv"
    gen.to_csv(str(path))
    loaded = np.loadtxt(path, delimiter=",")
    assert np.array_equal(loaded, gen.data)


def test_edge_sup_metadata():
    grid, kernel, potential = make_f2(n=16)
    gen = ts.assemble_generator(kernel, potential, grid)
    assert abs(gen.edge_sup - 2.0) < 1e-14
