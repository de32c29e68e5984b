import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import eigh_tridiagonal

from rindler_dirac.analytic import energy
from rindler_dirac.geometry import RindlerFrame
from rindler_dirac.numeric import (
    EigenSolution,
    Grid,
    SolverError,
    TridiagonalOperator,
    box_diagnosed,
    convergence_study,
    count_nodes,
    discretize,
    eigen_lowest_k,
    richardson,
    shoot,
    solve_exact_rindler,
)
from rindler_dirac.reduction import Kind, build_mass_function, effective_potential


def oscillator(y):
    return y**2


def test_grid_geometry():
    g = Grid(0.0, 4.0, 3)
    assert g.h == 1.0
    np.testing.assert_array_equal(g.points, [0, 1, 2, 3, 4])
    np.testing.assert_array_equal(g.interior, [1, 2, 3])
    wide = g.extended_left(0.5)
    assert wide.h == g.h and wide.x_max == g.x_max and wide.x_min == -2.0
    for bad in ((1.0, 0.0, 10), (0.0, 1.0, 2)):
        with pytest.raises(ValueError):
            Grid(*bad)


def test_auto_grid_covers_oscillator_box():
    fr = RindlerFrame(0.02)
    g = Grid.auto(fr, 100)
    k = math.sqrt(0.5 * fr.a * fr.m)
    assert k * (g.x_min + 2 / fr.a) == pytest.approx(-10.0)
    assert k * (g.x_max + 2 / fr.a) == pytest.approx(10.0)


def test_free_three_point_example():
    sols = eigen_lowest_k(discretize(lambda x: 0 * x, Grid(0.0, 4.0, 3)), 3)
    np.testing.assert_allclose([s.eigenvalue for s in sols], [2 - math.sqrt(2), 2, 2 + math.sqrt(2)], atol=1e-12)
    assert [s.nodes for s in sols] == [0, 1, 2]


def test_discretize_rejects_non_finite_potential():
    with pytest.raises(ValueError):
        discretize(lambda x: np.where(x > 0, np.inf, 0.0), Grid(-1, 1, 10))


def test_discretize_accepts_constant():
    op = discretize(2.5, Grid(0, 1, 9))
    assert op.diag.shape == (9,)
    np.testing.assert_allclose(op.diag, 2 / 0.01 + 2.5)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(3, 60))
def test_sturm_count_matches_dense(seed, n):
    rng = np.random.default_rng(seed)
    op = TridiagonalOperator(rng.normal(size=n), rng.normal(size=n - 1), Grid(0, 1, n))
    ev = np.linalg.eigvalsh(op.dense())
    shifts = rng.normal(scale=3, size=7)
    expected = [int(np.sum(ev < c)) for c in shifts]
    assert list(op.count_below(shifts)) == expected
    lo, hi = op.gershgorin()
    assert lo <= ev[0] and ev[-1] <= hi


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), k=st.integers(1, 6))
def test_lowest_k_matches_scipy(seed, k):
    rng = np.random.default_rng(seed)
    grid = Grid(-5, 5, 200)
    coeffs = rng.uniform(0.2, 3.0, size=3)
    op = discretize(lambda x: coeffs[0] * x**2 + coeffs[1] * np.cos(coeffs[2] * x), grid)
    ref = eigh_tridiagonal(op.diag, op.off, select="i", select_range=(0, k - 1))[0]
    sols = eigen_lowest_k(op, k)
    np.testing.assert_allclose([s.eigenvalue for s in sols], ref, rtol=1e-10, atol=1e-10)
    for j, s in enumerate(sols):
        assert s.nodes == j
        assert np.sqrt(grid.h) * np.linalg.norm(s.vector) == pytest.approx(1.0, rel=1e-12)
        assert np.linalg.norm(op.matvec(s.vector) - s.eigenvalue * s.vector) < 1e-6 * abs(op.diag).max()


def test_oscillator_levels():
    grid = Grid(-10.0, 10.0, 4000)
    sols = eigen_lowest_k(discretize(oscillator, grid), 3)
    np.testing.assert_allclose([s.eigenvalue for s in sols], [1, 3, 5], atol=1e-4)
    assert [s.nodes for s in sols] == [0, 1, 2]
    for j, s in enumerate(sols):
        np.testing.assert_allclose(s.vector[::-1], (-1) ** j * s.vector, atol=1e-9)


@pytest.mark.parametrize("shift", [-1.0, 1.0, 3.25])
def test_constant_shift_moves_every_level(shift):
    grid = Grid(-10.0, 10.0, 1000)
    base = eigen_lowest_k(discretize(oscillator, grid), 4)
    moved = eigen_lowest_k(discretize(lambda y: y**2 + shift, grid), 4)
    for b, m in zip(base, moved):
        assert m.eigenvalue - b.eigenvalue == pytest.approx(shift, abs=1e-9)


def test_square_well_box_levels():
    length, v0 = 3.0, 0.7
    grid = Grid(0.0, length, 3000)
    sols = eigen_lowest_k(discretize(v0, grid), 4)
    for k, s in enumerate(sols, start=1):
        exact = (k * math.pi / length) ** 2 + v0
        # 3-point stencil error is -h^2 p^4 / 12
        assert s.eigenvalue == pytest.approx(exact, abs=grid.h**2 * (k * math.pi / length) ** 4 / 10)


def test_sturm_count_with_shift_on_diagonal():
    # a shift equal to a constant diagonal gives an exact zero pivot
    op = discretize(0.7, Grid(0.0, 3.0, 3000))
    ev = eigh_tridiagonal(op.diag, op.off, eigvals_only=True)
    d = float(op.diag[0])
    assert int(op.count_below(d)[0]) == int(np.sum(ev < d))


def test_count_nodes():
    assert count_nodes(np.array([1.0, 2.0, -1.0, 3.0])) == 2
    assert count_nodes(np.zeros(5)) == 0
    # sign flips in numerical noise are ignored
    assert count_nodes(np.array([1.0, 1e-12, -1e-12, 1.0])) == 0


def test_shooting_oscillator_ground_state():
    sol = shoot(oscillator, Grid(-10.0, 10.0, 4000), (0.5, 1.5))
    assert sol.method == "numerov"
    assert sol.eigenvalue == pytest.approx(1.0, abs=1e-8)
    assert sol.nodes == 0


@pytest.mark.parametrize("n", range(4))
def test_shooting_agrees_with_matrix(n):
    grid = Grid(-10.0, 10.0, 4000)
    pot = lambda y: y**2 + 0.3 * y**4 / (1 + y**2)  # noqa: E731
    mat = eigen_lowest_k(discretize(pot, grid), n + 1)[n]
    lo = mat.eigenvalue - 0.5
    sol = shoot(pot, grid, (lo, mat.eigenvalue + 0.5))
    # Numerov is O(h^4); the matrix value carries the O(h^2) error
    assert sol.eigenvalue == pytest.approx(mat.eigenvalue, abs=5e-5)
    assert sol.nodes == n
    overlap = grid.h * float(sol.vector @ mat.vector)
    assert abs(overlap) == pytest.approx(1.0, abs=1e-4)


def test_shooting_truncated_rindler_level():
    fr = RindlerFrame(0.01)
    grid = Grid.auto(fr, 4000)
    pot = effective_potential(build_mass_function(fr, Kind.HARMONIC), -1)
    sol = shoot(pot, grid, (0.005, 0.015))
    assert sol.eigenvalue == pytest.approx(energy(1, -1, fr).eps ** 2, rel=1e-6)


def test_shooting_empty_bracket():
    with pytest.raises(SolverError, match="no eigenvalue"):
        shoot(oscillator, Grid(-10.0, 10.0, 2000), (1.5, 2.5))
    with pytest.raises(ValueError):
        shoot(oscillator, Grid(-10.0, 10.0, 2000), (2.0, 1.0))


def test_richardson_recovers_quadratic_limit():
    assert richardson(1.0 + 4e-4, 1.0 + 1e-4, 2.0) == pytest.approx(1.0, abs=1e-15)


def test_richardson_on_shifted_oscillator_ground_state():
    # y^2 - 1 has lambda_0 = 0; a single grid leaves an O(h^2) offset
    pot = lambda y: y**2 - 1.0  # noqa: E731
    fine = eigen_lowest_k(discretize(pot, Grid(-10, 10, 4001)), 1)[0].eigenvalue
    coarse = eigen_lowest_k(discretize(pot, Grid(-10, 10, 2000)), 1)[0].eigenvalue
    assert abs(fine) > 1e-7
    assert abs(richardson(coarse, fine, 2.0)) < 1e-9


def test_convergence_study():
    grids = [Grid(-10, 10, n) for n in (999, 1999, 3999)]
    study = convergence_study(oscillator, 3, grids)
    for lc, exact in zip(study, (1.0, 3.0, 5.0)):
        assert lc.observed_order == pytest.approx(2.0, abs=0.05)
        assert lc.monotone
        assert lc.extrapolated == pytest.approx(exact, abs=1e-7)
        assert abs(lc.extrapolated - exact) <= 10 * lc.error_bar + 1e-12
    with pytest.raises(ValueError):
        convergence_study(oscillator, 1, grids[:2])
    with pytest.raises(ValueError):
        convergence_study(oscillator, 1, [Grid(-10, 10, n) for n in (100, 300, 900)])


def test_box_diagnostics_flag_unconfined_levels():
    grid = Grid(-10.0, 10.0, 2000)
    confined = box_diagnosed(oscillator, grid, 3)
    assert all(s.box_artifact is False for s in confined)
    assert all(s.box_drift < 1e-9 for s in confined)
    free = box_diagnosed(0.0, Grid(0.0, 10.0, 500), 2)
    assert all(s.box_artifact for s in free)


def test_box_enlargement_stays_below_discretisation_error():
    fr = RindlerFrame(0.02)
    pot = effective_potential(build_mass_function(fr, Kind.HARMONIC), 1)
    grid = Grid.auto(fr, 2000)
    big = Grid.auto(fr, 2000, y_max=12.0)
    small = eigen_lowest_k(discretize(pot, grid), 3)
    wide = eigen_lowest_k(discretize(pot, big.refined(round((big.x_max - big.x_min) / grid.h) - 1)), 3)
    for a, b in zip(small, wide):
        disc = abs(a.eigenvalue - energy(a.nodes, 1, fr).eps ** 2)
        assert abs(a.eigenvalue - b.eigenvalue) < disc


def test_exact_rindler_levels_carry_box_flags():
    fr = RindlerFrame(0.01)
    sols = solve_exact_rindler(fr, -1, Grid.auto(fr, 2000), 3)
    assert len(sols) == 3
    for j, s in enumerate(sols):
        assert isinstance(s, EigenSolution)
        assert s.nodes == j
        assert s.box_drift is not None and s.box_artifact is not None
    assert [s.eigenvalue for s in sols] == sorted(s.eigenvalue for s in sols)


def test_exact_level_spacing_collapses_as_a_shrinks():
    spacings = []
    for a in (0.04, 0.02, 0.01, 0.005):
        fr = RindlerFrame(a)
        sols = solve_exact_rindler(fr, -1, Grid.auto(fr, 1500), 2)
        spacings.append(sols[1].eigenvalue - sols[0].eigenvalue)
    assert all(s1 < s0 for s0, s1 in zip(spacings, spacings[1:]))
    assert spacings[-1] < 0.5 * spacings[0]
