"""Time integration, decay-rate fits, positivity, extinction."""



import numpy as np
import pytest

import torspec as ts
from conftest import make_f1, make_f2, two_level_eigenvalue_oracle


def test_constant_fixture_exact_exponential():
    grid, kernel, potential = make_f1()
    gen = ts.assemble_generator(kernel, potential, grid)
    trace = ts.evolve(gen, np.ones(grid.size), t_max=10.0)
    assert np.max(np.abs(trace.l2_norms - np.exp(-0.3 * trace.times))) < 1e-9
    assert abs(trace.decay_rate_fit + 0.3) < 1e-9
    assert trace.min_value_seen >= 0.0


def test_zero_operator_constant_trace():
    grid = ts.TorusGrid(1, 16)
    zero = ts.OperatorMatrix(np.zeros((16, 16)), "custom", grid)
    trace = ts.evolve(zero, np.ones(16), t_max=5.0, dt=0.1)
    assert np.all(trace.l2_norms == trace.l2_norms[0])
    assert np.all(trace.masses == trace.masses[0])


def test_fit_exact_exponential_samples():
    times = np.linspace(0.0, 10.0, 50)
    trace = ts.EvolutionTrace(
        times=times,
        l2_norms=np.exp(-0.3 * times),
        sup_norms=np.exp(-0.3 * times),
        masses=np.exp(-0.3 * times),
        decay_rate_fit=float("nan"),
        fit_window=(0.0, 10.0),
        min_value_seen=0.0,
    )
    assert abs(ts.fit_decay_rate(trace, (0.0, 10.0)) + 0.3) < 1e-12


def test_fit_constant_trace_zero_slope():
    times = np.linspace(0.0, 4.0, 20)
    trace = ts.EvolutionTrace(times, np.ones(20), np.ones(20), np.ones(20),
                              0.0, (0.0, 4.0), 1.0)
    assert abs(ts.fit_decay_rate(trace, (0.0, 4.0))) < 1e-14


def test_fit_zero_norm_rejected():
    times = np.linspace(0.0, 4.0, 20)
    norms = np.ones(20)
    norms[-1] = 0.0
    trace = ts.EvolutionTrace(times, norms, norms, norms, 0.0, (0.0, 4.0), 0.0)
    with pytest.raises(ts.ZeroNorm):
        ts.fit_decay_rate(trace, (0.0, 4.0))
    with pytest.raises(ValueError):
        ts.fit_decay_rate(trace, (2.0, 9.0))


def test_two_level_fixture_decay_rate_window():
    lam = two_level_eigenvalue_oracle((-0.999, -1e-6))
    grid, kernel, potential = make_f2()
    gen = ts.assemble_generator(kernel, potential, grid)
    trace = ts.evolve(gen, np.ones(grid.size), t_max=20.0)
    assert abs(ts.fit_decay_rate(trace, (10.0, 20.0)) - lam) < 1e-3
    assert trace.min_value_seen >= -1e-10


def test_rk4_matches_eigenexpansion_oracle():
    for make in (make_f1, make_f2):
        grid, kernel, potential = make(n=64)
        gen = ts.assemble_generator(kernel, potential, grid)
        u0 = np.ones(grid.size)
        integrated = ts.evolve(gen, u0, t_max=20.0, method="rk4")
        exact = ts.evolve(gen, u0, t_max=20.0, method="eigenexpansion")
        for a, b in (
            (integrated.l2_norms, exact.l2_norms),
            (integrated.sup_norms, exact.sup_norms),
            (integrated.masses, exact.masses),
        ):
            assert np.max(np.abs(a - b)) < 1e-6


def test_positivity_preserved_from_nonnegative_start():
    grid, kernel, potential = make_f2(n=64)
    gen = ts.assemble_generator(kernel, potential, grid)
    rng = np.random.default_rng(1)
    u0 = rng.uniform(0.0, 2.0, grid.size)
    trace = ts.evolve(gen, u0, t_max=15.0)
    assert trace.min_value_seen >= -1e-10


def test_mass_derivative_identity_at_start():
    grid, kernel, potential = make_f2(n=64)
    gen = ts.assemble_generator(kernel, potential, grid)
    u0 = np.ones(grid.size)
    derivative = grid.weight * gen.apply(u0).sum()
    quadrature_v = grid.weight * potential.samples.sum()
    assert abs(derivative - quadrature_v) < 1e-13


def test_extinction_verdicts():
    grid, kernel, potential = make_f1()
    gen = ts.assemble_generator(kernel, potential, grid)
    trace = ts.evolve(gen, np.ones(grid.size), t_max=40.0 / 0.3, method="eigenexpansion")
    summary = ts.check_extinction(trace)
    assert summary.extinct
    assert summary.ratio < 1e-3

    grid2, kernel2, potential2 = make_f2(n=128)
    gen2 = ts.assemble_generator(kernel2, potential2, grid2)
    lam = two_level_eigenvalue_oracle((-0.999, -1e-6))
    trace2 = ts.evolve(gen2, np.ones(grid2.size), t_max=40.0 / abs(lam),
                       method="eigenexpansion")
    assert ts.check_extinction(trace2).extinct

    conservative = ts.assemble_generator(kernel, ts.zero_potential(grid), grid)
    flat = ts.evolve(conservative, np.ones(grid.size), t_max=10.0)
    summary_flat = ts.check_extinction(flat)
    assert not summary_flat.extinct
    assert abs(summary_flat.ratio - 1.0) < 1e-9


def test_unstable_step_size_detected():
    grid, kernel, potential = make_f1(n=32)
    gen = ts.assemble_generator(kernel, potential, grid)
    rng = np.random.default_rng(0)
    u0 = rng.uniform(0.5, 1.5, grid.size)
    with pytest.raises(ts.Unstable):
        ts.evolve(gen, u0, t_max=200.0, dt=10.0, snapshots=2)


def test_evolve_input_validation():
    grid, kernel, potential = make_f1(n=16)
    gen = ts.assemble_generator(kernel, potential, grid)
    with pytest.raises(ts.DimensionMismatch):
        ts.evolve(gen, np.ones(3), t_max=1.0)
    with pytest.raises(ValueError):
        ts.evolve(gen, np.zeros(16), t_max=1.0)
    with pytest.raises(ValueError):
        ts.evolve(gen, np.ones(16), t_max=1.0, method="verlet")
    bare = ts.OperatorMatrix(np.zeros((16, 16)), "custom", grid)
    with pytest.raises(ValueError):
        ts.evolve(bare, np.ones(16), t_max=1.0)  # no edge metadata, no dt


def test_default_step_from_edge_metadata():
    grid, kernel, potential = make_f1(n=32)
    gen = ts.assemble_generator(kernel, potential, grid)
    trace = ts.evolve(gen, np.ones(32), t_max=2.0)
    assert trace.times[0] == 0.0 and trace.times[-1] == 2.0
    assert len(trace.times) == 200
