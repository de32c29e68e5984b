"""End-to-end check suite behind ``rindler-dirac validate``.

Each check returns a plain dict: name, passed, measured, tolerance, detail.
"""

from __future__ import annotations

import csv
import io
import math
import time
from fractions import Fraction

import numpy as np

from .analysis import (
    SPECTRUM_TOL,
    analytic_report,
    compare_spectra,
    expansion_window,
    figure_datasets,
    fmt,
    gaps_shrink,
    truncation_error_report,
    truncation_sweep,
)
from .analytic import energy, hermite, series_coefficients, spinor
from .geometry import (
    RindlerFrame,
    clifford_defect,
    conformal_to_proper,
    metric_tensor,
    proper_to_conformal,
    tetrad,
)
from .numeric import Grid, count_nodes
from .reduction import Kind, build_mass_function, first_order_residual

FIGURE_A = (0.01, 0.02, 0.03)
RESIDUAL_GRIDS = (2000, 4000, 8000)
SWEEP_A = (0.03, 0.02, 0.01, 0.005, 0.001)


def _check(name, passed, measured, tolerance, detail="") -> dict:
    return {"name": name, "passed": bool(passed), "measured": measured, "tolerance": tolerance, "detail": detail}


def check_spectrum_formula(a_values=FIGURE_A, m=1.0, n_max=5) -> dict:
    t0 = time.perf_counter()
    mismatches = 0
    for a in a_values:
        frame = RindlerFrame(a, m)
        for s in (-1, 1):
            text = analytic_report(frame, s, n_max).to_csv()
            body = [ln for ln in text.splitlines() if not ln.startswith("#")]
            for row in csv.DictReader(io.StringIO("\n".join(body))):
                n = int(row["n"])
                expected = math.sqrt(a * m * (n + (1 + s) // 2))
                if row["eps_plus"] != fmt(expected) or row["eps_minus"] != fmt(-expected):
                    mismatches += 1
    elapsed = time.perf_counter() - t0
    return _check("spectrum_formula", mismatches == 0 and elapsed < 1.0,
                  {"mismatches": mismatches, "seconds": elapsed}, {"mismatches": 0, "seconds": 1.0})


class _Reports:
    """Numeric spectrum reports shared between checks."""

    def __init__(self, tolerance: float):
        self.tolerance = tolerance
        self._cache: dict = {}

    def get(self, a: float, s: int, n_max: int):
        key = (a, s, n_max)
        if key not in self._cache:
            self._cache[key] = compare_spectra(RindlerFrame(a, 1.0), s, n_max, tolerance=self.tolerance)
        return self._cache[key]


def check_numeric_agreement(reports: _Reports, a_values=FIGURE_A) -> dict:
    t0 = time.perf_counter()
    worst_rel, worst_shoot, failures = 0.0, 0.0, []
    for a in a_values:
        for s in (-1, 1):
            rep = reports.get(a, s, 3)
            worst_rel = max(worst_rel, max(r.rel_diff for r in rep.rows))
            worst_shoot = max(worst_shoot, max(r.shoot_diff for r in rep.rows))
            failures += [f"a={a}, s={s}: {f}" for f in rep.failures]
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 30.0
    return _check("numeric_vs_analytic", ok, {"rel_diff": worst_rel, "shoot_diff": worst_shoot, "seconds": elapsed},
                  {"rel_diff": reports.tolerance, "shoot_diff": 1e-6, "seconds": 30.0}, "; ".join(failures))


def check_pm_symmetry(a_values=FIGURE_A, n_max=5) -> dict:
    frames = [RindlerFrame(a, 1.0) for a in a_values]
    bad = 0
    for fr in frames:
        for s in (-1, 1):
            e = sorted(analytic_report(fr, s, n_max).energies())
            bad += e != sorted(-v for v in e)
    points = figure_datasets(frames, n_max).spectrum
    bad += sorted(points) != sorted((a, n, s, -e) for a, n, s, e in points)
    return _check("pm_symmetry", bad == 0, {"asymmetric_datasets": bad}, {"asymmetric_datasets": 0})


def check_susy(a_values=FIGURE_A, n_max=5, rtol=2e-4) -> dict:
    closed_bad, worst = 0, 0.0
    for a in a_values:
        fr = RindlerFrame(a, 1.0)
        for n in range(n_max + 1):
            closed_bad += energy(n + 1, -1, fr).eps != energy(n, 1, fr).eps
        # matrix path only; the shooting oracle is covered by numeric_vs_analytic
        lower = compare_spectra(fr, -1, n_max + 1, with_shooting=False)
        upper = compare_spectra(fr, 1, n_max, with_shooting=False)
        for n in range(n_max + 1):
            e1, e2 = lower.rows[n + 1].eps_numeric, upper.rows[n].eps_numeric
            worst = max(worst, abs(e1 - e2) / abs(e2))
    return _check("susy_degeneracy", closed_bad == 0 and worst <= rtol,
                  {"closed_form_mismatches": closed_bad, "numeric_rel": worst},
                  {"closed_form_mismatches": 0, "numeric_rel": rtol})


def residual_sequence(frame: RindlerFrame, n: int, sign: int, sizes=RESIDUAL_GRIDS) -> list[float]:
    massfn = build_mass_function(frame, Kind.HARMONIC)
    out = []
    for size in sizes:
        pair = spinor(n, frame, Grid.auto(frame, n=size), sign).as_pair()
        out.append(max(first_order_residual(pair, massfn)))
    return out


def check_first_order_residual(a_values=FIGURE_A, levels=range(4)) -> dict:
    ratios, finest = [], 0.0
    for a in a_values:
        fr = RindlerFrame(a, 1.0)
        for n in levels:
            for sign in (1, -1):
                r = residual_sequence(fr, n, sign)
                ratios += [r[i] / r[i + 1] for i in range(len(r) - 1)]
                finest = max(finest, r[-1])
    ok = all(abs(q - 4.0) <= 0.5 for q in ratios) and finest < 1e-6
    return _check("first_order_residual", ok, {"ratio_min": min(ratios), "ratio_max": max(ratios), "residual_n8000": finest},
                  {"ratio": "4 +/- 0.5", "residual_n8000": 1e-6})


def decay_outside(y: np.ndarray, g: np.ndarray, y_cut: float = 6.0) -> float:
    """Largest |g| outside |y| <= y_cut relative to the peak."""
    outside = np.abs(y) > y_cut
    return float(np.max(np.abs(g[outside])) / np.max(np.abs(g)))


def check_nodes_and_decay(a_values=FIGURE_A, levels=range(4), level=1e-6) -> dict:
    node_bad, worst, failing = 0, 0.0, []
    for a in a_values:
        fr = RindlerFrame(a, 1.0)
        for n in levels:
            sp = spinor(n, fr, Grid.auto(fr))
            node_bad += count_nodes(sp.lower) != n
            ratio = decay_outside(sp.y, sp.lower)
            worst = max(worst, ratio)
            if ratio >= level:
                failing.append(f"a={a}, n={n}: |g| reaches {ratio:.2e} of its peak beyond |y|=6")
    return _check("nodes_and_decay", node_bad == 0 and not failing, {"node_mismatches": node_bad, "decay_ratio": worst},
                  {"node_mismatches": 0, "decay_ratio": level}, "; ".join(failing))


def check_geometry(a_values=FIGURE_A, tol=1e-12) -> dict:
    worst_metric = worst_cliff = worst_trip = 0.0
    for a in a_values:
        fr = RindlerFrame(a, 1.0)
        for x in np.linspace(-50.0, 50.0, 101):
            g = metric_tensor(x, fr)
            worst_metric = max(worst_metric, float(np.max(np.abs(tetrad(x, fr).metric() - g)) / np.max(np.abs(g))))
            worst_cliff = max(worst_cliff, clifford_defect(x, fr) * float(np.exp(2 * a * x)))
        xi = fr.horizon + np.geomspace(1e-3, 1e4, 101) / a
        back = conformal_to_proper(proper_to_conformal(xi, fr), fr)
        worst_trip = max(worst_trip, float(np.max(np.abs(back - xi) / np.maximum(np.abs(xi), 1.0 / a))))
    ok = max(worst_metric, worst_cliff, worst_trip) <= tol
    return _check("geometry_invariants", ok, {"tetrad": worst_metric, "clifford": worst_cliff, "round_trip": worst_trip},
                  {"all": tol})


def check_series_hermite(n_max=8) -> dict:
    bad = []
    for n in range(n_max + 1):
        seeds = (1, 0) if n % 2 == 0 else (0, 1)
        sol = series_coefficients(2 * n + 1 + -1, -1, *seeds, j_max=n + 4)
        h = [Fraction(c) for c in hermite(n).coeffs]
        poly = list(sol.polynomial())
        if not sol.terminated or sol.termination_index != n or len(poly) != len(h):
            bad.append(n)
            continue
        scale = h[n] / poly[n]
        if [scale * c for c in poly] != h:
            bad.append(n)
    return _check("series_hermite", not bad, {"failing_degrees": bad}, {"exact": True})


def check_truncation_envelope(s_values=(-1, 1), k=4) -> dict:
    fr = RindlerFrame(0.01, 1.0)
    produced = True
    for s in s_values:
        rep = truncation_error_report(fr, s, Grid.auto(fr), k)
        produced &= len(rep.exact) == k and len(rep.harmonic) == k
        produced &= all(sol.box_drift is not None and sol.box_artifact is not None for sol in rep.exact + rep.harmonic)
    shrink = {s: gaps_shrink(truncation_sweep(SWEEP_A, s, k)) for s in s_values}
    window = expansion_window(SWEEP_A)
    return _check("truncation_envelope", produced and all(shrink.values()),
                  {"report_produced": produced, "monotone": {str(s): v for s, v in shrink.items()}},
                  {"monotone": True},
                  f"gap sweep over a={list(SWEEP_A)} on x in [{window.x_min:g}, {window.x_max:g}]")


def run_all(tolerance: float = SPECTRUM_TOL) -> list[dict]:
    reports = _Reports(tolerance)
    return [
        check_spectrum_formula(),
        check_numeric_agreement(reports),
        check_pm_symmetry(),
        check_susy(),
        check_first_order_residual(),
        check_nodes_and_decay(),
        check_geometry(),
        check_series_hermite(),
        check_truncation_envelope(),
    ]
