import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rindler_dirac.analytic import spinor
from rindler_dirac.geometry import RindlerFrame
from rindler_dirac.numeric import Grid
from rindler_dirac.reduction import (
    Kind,
    Sector,
    SpinorPair,
    apply_rescaling,
    barred_residual,
    build_mass_function,
    effective_potential,
    first_order_residual,
    partner_component,
    rescaling_factor,
    to_oscillator_form,
)


def test_parsers():
    assert Kind.parse("exact") is Kind.EXACT
    assert Kind.parse(Kind.HARMONIC) is Kind.HARMONIC
    with pytest.raises(ValueError):
        Kind.parse("quadratic")
    assert Sector.parse(-1) is Sector.LOWER
    assert Sector.parse("+1") is Sector.UPPER
    assert Sector.parse(1.0) is Sector.UPPER
    for bad in (0, 2, "x", True, 0.5):
        with pytest.raises(ValueError):
            Sector.parse(bad)


def test_mass_function_examples():
    fr = RindlerFrame(0.01, 1.0)
    exact = build_mass_function(fr, "exact")
    trunc = build_mass_function(fr, "harmonic")
    assert exact.z(10.0) == pytest.approx(math.exp(0.1), rel=1e-15)
    assert trunc.z(10.0) == pytest.approx(1.05, rel=1e-15)
    assert trunc.z(-200.0) == pytest.approx(0.0, abs=1e-15)
    # the linear form agrees with exp(a x) only to first order in a x
    mismatch = abs(trunc.z(10.0) - exact.z(10.0)) / exact.z(10.0)
    assert mismatch == pytest.approx(abs(1.05 - math.exp(0.1)) / math.exp(0.1), rel=1e-12)
    assert 0.049 < mismatch < 0.05


def test_truncation_error_is_first_order_in_ax():
    fr = RindlerFrame(0.01)
    exact = build_mass_function(fr, Kind.EXACT)
    trunc = build_mass_function(fr, Kind.HARMONIC)
    err = [abs(trunc.z(t / fr.a) - exact.z(t / fr.a)) / exact.z(t / fr.a) for t in (0.02, 0.01, 0.005)]
    ratios = [err[0] / err[1], err[1] / err[2]]
    np.testing.assert_allclose(ratios, 2.0, rtol=0.02)


def test_effective_potential_examples():
    fr = RindlerFrame(0.01)
    v = effective_potential(build_mass_function(fr, Kind.HARMONIC), +1)
    assert v(0.0) == pytest.approx(1.005, rel=1e-15)
    assert v.minimum() == pytest.approx(-200.0)
    vlow = effective_potential(build_mass_function(fr, Kind.EXACT), -1)
    x0 = vlow.minimum()
    assert math.exp(0.01 * x0) == pytest.approx(0.005, rel=1e-12)
    assert vlow(x0) < vlow(x0 + 1.0) and vlow(x0) < vlow(x0 - 1.0)
    assert effective_potential(build_mass_function(fr, Kind.EXACT), 1).minimum() == -math.inf


@settings(max_examples=100, deadline=None)
@given(a=st.floats(1e-3, 0.5), m=st.floats(0.1, 5.0), x=st.floats(-100, 100), kind=st.sampled_from(list(Kind)))
def test_partner_potentials_differ_by_twice_dz(a, m, x, kind):
    mf = build_mass_function(RindlerFrame(a, m), kind)
    vp, vm = effective_potential(mf, 1), effective_potential(mf, -1)
    # the subtraction cancels z^2, so the floor scales with it
    floor = 1e-14 * float(mf.z(x)) ** 2
    assert vp(x) - vm(x) == pytest.approx(2 * mf.dz(x), rel=1e-9, abs=floor + 1e-15)


def test_oscillator_form_example():
    fr = RindlerFrame(0.02, 1.0)
    osc = to_oscillator_form(fr, -1)
    assert osc.eta(0.1) == pytest.approx(1.0)
    # eta = 2 n + 1 + s with n = 1, s = +1  ->  eps^2 = 0.04
    eps = math.sqrt(to_oscillator_form(fr, 1).eps_squared(4.0))
    assert eps == pytest.approx(0.2)
    assert osc.y(-100.0) == 0.0
    assert osc.x(osc.y(3.7)) == pytest.approx(3.7)


@settings(max_examples=100, deadline=None)
@given(a=st.floats(1e-3, 0.5), m=st.floats(0.1, 5.0), x=st.floats(-300, 300), s=st.sampled_from([-1, 1]))
def test_oscillator_form_matches_truncated_potential(a, m, x, s):
    fr = RindlerFrame(a, m)
    osc = to_oscillator_form(fr, s)
    v = effective_potential(build_mass_function(fr, Kind.HARMONIC), s)
    # -F'' + V F = eps^2 F  maps to  -F_yy + (y^2 + s) F = eta F  when V scales by a m / 2
    lhs = v(x) / (0.5 * a * m)
    assert lhs == pytest.approx(osc.potential(osc.y(x)), rel=1e-9, abs=1e-9)


def test_rescaling_factor_example():
    assert rescaling_factor(100.0, RindlerFrame(0.01)) == pytest.approx(math.exp(0.5))


@settings(max_examples=50, deadline=None)
@given(a=st.floats(1e-3, 0.2), seed=st.integers(0, 2**31 - 1))
def test_rescaling_round_trip(a, seed):
    rng = np.random.default_rng(seed)
    x = np.linspace(-40, 40, 17)
    pair = SpinorPair(x, rng.normal(size=17), rng.normal(size=17), 0.3)
    fr = RindlerFrame(a)
    back = apply_rescaling(apply_rescaling(pair, fr, "inverse"), fr, "forward")
    np.testing.assert_allclose(back.upper, pair.upper, rtol=1e-14)
    np.testing.assert_allclose(back.lower, pair.lower, rtol=1e-14)
    assert apply_rescaling(pair, fr, "inverse").barred
    with pytest.raises(ValueError):
        apply_rescaling(pair, fr, "sideways")


def test_spinor_pair_shape_check():
    with pytest.raises(ValueError):
        SpinorPair(np.zeros(3), np.zeros(3), np.zeros(4), 0.0)


def test_residual_needs_three_points():
    pair = SpinorPair(np.array([0.0, 1.0]), np.zeros(2), np.zeros(2), 0.0)
    with pytest.raises(ValueError):
        first_order_residual(pair, build_mass_function(RindlerFrame(0.01), Kind.HARMONIC))


def test_residual_detects_mismatched_energy():
    fr = RindlerFrame(0.02)
    sp = spinor(1, fr, Grid.auto(fr, 4000))
    pair = sp.as_pair()
    mf = build_mass_function(fr, Kind.HARMONIC)
    assert max(first_order_residual(pair, mf)) < 1e-5
    wrong = SpinorPair(pair.x, pair.upper, pair.lower, pair.eps + 0.1)
    r1, r2 = first_order_residual(wrong, mf)
    # the defect is -0.1 f in the first equation and -0.1 g in the second
    assert r1 == pytest.approx(0.1 * np.max(np.abs(pair.upper)), rel=1e-2)
    assert r2 == pytest.approx(0.1 * np.max(np.abs(pair.lower)), rel=1e-2)


def test_barred_equations_match_rescaled_system():
    fr = RindlerFrame(0.05, 1.3)
    x = np.linspace(-10, 10, 8001)
    eps = 0.7
    g = np.exp(-0.5 * x**2)
    z = fr.m * np.exp(fr.a * x)
    f = (-x * g + z * g) / eps  # first equation holds exactly
    barred = apply_rescaling(SpinorPair(x, f, g, eps), fr, "inverse")
    r1, _ = barred_residual(barred, fr)
    assert r1 < 1e-5


def test_partner_component_reproduces_analytic_upper():
    fr = RindlerFrame(0.01)
    mf = build_mass_function(fr, Kind.HARMONIC)
    for n in (1, 2, 3):
        errs = []
        for size in (2000, 4000):
            sp = spinor(n, fr, Grid.auto(fr, size))
            f = partner_component(sp.lower, sp.eps, mf, sp.x)
            errs.append(np.max(np.abs(f - sp.upper)) / np.max(np.abs(sp.upper)))
        assert errs[1] < 5e-5
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_partner_component_rejects_zero_mode():
    fr = RindlerFrame(0.01)
    sp = spinor(0, fr, Grid.auto(fr, 400))
    with pytest.raises(ValueError, match="zero mode"):
        partner_component(sp.lower, 0.0, build_mass_function(fr, Kind.HARMONIC), sp.x)
