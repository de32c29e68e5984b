"""Analytic vs numeric comparisons, truncation diagnostics and figure data."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .analytic import AnalyticLevel, energy, spinor
from .geometry import RindlerFrame, conformal_to_proper
from .numeric import (
    EigenSolution,
    Grid,
    SolverError,
    box_diagnosed,
    count_nodes,
    discretize,
    eigen_lowest_k,
    richardson,
    shoot,
)
from .reduction import Kind, Sector, build_mass_function, effective_potential

SPECTRUM_TOL = 1e-4
SHOOT_TOL = 1e-6
DECAY_LEVEL = 1e-6

SPECTRUM_HEADER = ["n", "s", "a", "m", "eps_plus", "eps_minus", "eps_numeric", "abs_diff", "rel_diff", "nodes"]


def fmt(value) -> str:
    """Locale-independent fixed 12-significant-digit rendering (empty for None)."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    # + 0.0 folds -0.0 into 0.0
    return f"{float(value) + 0.0:#.12g}"


def render_csv(header: list[str], rows: list[list], meta: dict) -> str:
    buf = io.StringIO()
    for key in sorted(meta):
        buf.write(f"# {key}: {json.dumps(meta[key], sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


@dataclass(frozen=True)
class SpectrumRow:
    n: int
    s: int
    a: float
    m: float
    eps_analytic: float
    eps_numeric: float | None
    abs_diff: float | None
    rel_diff: float | None
    nodes: int | None
    lam_fine: float | None = None
    lam_coarse: float | None = None
    lam_shoot: float | None = None
    shoot_diff: float | None = None

    def csv_row(self) -> list:
        return [self.n, self.s, self.a, self.m, self.eps_analytic, -self.eps_analytic,
                self.eps_numeric, self.abs_diff, self.rel_diff, self.nodes]


@dataclass
class SpectrumReport:
    frame: RindlerFrame
    s: Sector
    kind: Kind
    rows: list[SpectrumRow]
    meta: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def energies(self) -> list[float]:
        """Every emitted energy, both signs."""
        return [e for r in self.rows for e in (r.eps_analytic, -r.eps_analytic)]

    def to_csv(self, extra_meta: dict | None = None) -> str:
        meta = {**self.meta, "passed": self.passed, "failures": self.failures, **(extra_meta or {})}
        return render_csv(SPECTRUM_HEADER, [r.csv_row() for r in self.rows], meta)

    def to_dict(self) -> dict:
        return {
            "a": self.frame.a,
            "m": self.frame.m,
            "s": int(self.s),
            "kind": self.kind.value,
            "passed": self.passed,
            "failures": self.failures,
            "meta": self.meta,
            "rows": [asdict(r) for r in self.rows],
        }


def _signed_sqrt(lam: float) -> float:
    return math.copysign(math.sqrt(abs(lam)), lam)


def analytic_report(frame: RindlerFrame, s, n_max: int) -> SpectrumReport:
    """Closed-form rows only; numeric columns left empty."""
    s = Sector.parse(s)
    rows = [SpectrumRow(n, int(s), frame.a, frame.m, energy(n, s, frame).eps, None, None, None, None)
            for n in range(n_max + 1)]
    return SpectrumReport(frame, s, Kind.HARMONIC, rows, meta=_base_meta(frame, s, Kind.HARMONIC, None))


def _base_meta(frame, s, kind, grid: Grid | None) -> dict:
    meta = {"version": __version__, "a": frame.a, "m": frame.m, "s": int(s), "kind": kind.value}
    if grid is not None:
        meta["grid"] = {"x_min": grid.x_min, "x_max": grid.x_max, "n": grid.n}
    return meta


def coarse_partner(grid: Grid) -> Grid:
    """Same box with roughly twice the spacing, for one Richardson step."""
    return grid.refined(max(3, grid.n // 2))


def compare_spectra(frame: RindlerFrame, s, n_max: int, grid: Grid | None = None,
                    tolerance: float = SPECTRUM_TOL, with_shooting: bool = True) -> SpectrumReport:
    """Pair the closed-form levels with finite-difference eigenvalues of the truncated potential.

    The numeric eigenvalue is the Richardson combination of the given grid and
    a grid with about twice the spacing; the raw values are kept in each row.
    ``shoot_diff`` is the distance between the Numerov oracle and the raw
    matrix eigenvalue on the same grid.
    """
    s = Sector.parse(s)
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    grid = grid or Grid.auto(frame)
    coarse = coarse_partner(grid)
    pot = effective_potential(build_mass_function(frame, Kind.HARMONIC), s)
    k = n_max + 1
    fine_sols = eigen_lowest_k(discretize(pot, grid), k)
    coarse_sols = eigen_lowest_k(discretize(pot, coarse), k)
    if len(fine_sols) < k or len(coarse_sols) < k:
        raise SolverError(f"solver returned fewer than {k} levels")
    am = frame.a * frame.m
    floor = math.sqrt(am)
    ratio = coarse.h / grid.h
    rows, failures = [], []
    for n, (fs, cs) in enumerate(zip(fine_sols, coarse_sols)):
        level = energy(n, s, frame)
        lam = richardson(cs.eigenvalue, fs.eigenvalue, ratio)
        eps_num = _signed_sqrt(lam)
        diff = abs(eps_num - level.eps)
        rel = diff / max(level.eps, floor)
        lam_shoot = shoot_diff = None
        if with_shooting:
            lam_an = level.eps_squared
            sol = shoot(pot, grid, (lam_an - 0.45 * am, lam_an + 0.45 * am))
            lam_shoot = sol.eigenvalue
            shoot_diff = abs(lam_shoot - fs.eigenvalue)
            # Numerov is fourth order, so it is held against the extrapolated value
            if abs(lam_shoot - lam) > SHOOT_TOL * max(1.0, abs(lam)):
                failures.append(f"n={n}: shooting and matrix eigenvalues differ by {abs(lam_shoot - lam):.3e}")
        if rel > tolerance:
            failures.append(f"n={n}: rel_diff {rel:.3e} exceeds {tolerance:.1e}")
        if fs.nodes != n:
            failures.append(f"n={n}: eigenvector has {fs.nodes} nodes")
        rows.append(SpectrumRow(n, int(s), frame.a, frame.m, level.eps, eps_num, diff, rel, fs.nodes,
                                fs.eigenvalue, cs.eigenvalue, lam_shoot, shoot_diff))
    meta = _base_meta(frame, s, Kind.HARMONIC, grid)
    meta.update({"coarse_n": coarse.n, "tolerance": tolerance, "shoot_tolerance": SHOOT_TOL,
                 "eps_numeric": "richardson(N, N/2) of the 3-point finite-difference eigenvalue"})
    return SpectrumReport(frame, s, Kind.HARMONIC, rows, meta, failures)


# ---------------------------------------------------------------------------
# truncation envelope


TRUNCATION_HEADER = ["level", "lam_harmonic", "lam_exact", "gap", "drift_harmonic", "drift_exact",
                     "artifact_harmonic", "artifact_exact"]


@dataclass
class TruncationReport:
    frame: RindlerFrame
    s: Sector
    grid: Grid
    harmonic: list[EigenSolution]
    exact: list[EigenSolution]

    @property
    def gaps(self) -> np.ndarray:
        return np.array([abs(e.eigenvalue - h.eigenvalue) for h, e in zip(self.harmonic, self.exact)])

    def rows(self) -> list[list]:
        return [[j, h.eigenvalue, e.eigenvalue, abs(e.eigenvalue - h.eigenvalue), h.box_drift, e.box_drift,
                 h.box_artifact, e.box_artifact] for j, (h, e) in enumerate(zip(self.harmonic, self.exact))]

    def to_csv(self, extra_meta: dict | None = None) -> str:
        meta = _base_meta(self.frame, self.s, Kind.EXACT, self.grid)
        meta["kind"] = "exact vs harmonic"
        meta.update(extra_meta or {})
        return render_csv(TRUNCATION_HEADER, self.rows(), meta)

    def to_dict(self) -> dict:
        return {"a": self.frame.a, "m": self.frame.m, "s": int(self.s),
                "grid": {"x_min": self.grid.x_min, "x_max": self.grid.x_max, "n": self.grid.n},
                "rows": [dict(zip(TRUNCATION_HEADER, r)) for r in self.rows()]}


def truncation_error_report(frame: RindlerFrame, s, grid: Grid, k: int, other_kind: Kind = Kind.EXACT) -> TruncationReport:
    """Box eigenvalues of the truncated and the exact potential on one grid, with drift flags."""
    s = Sector.parse(s)
    scale = frame.a * frame.m
    sols = {}
    for kind in (Kind.HARMONIC, Kind.parse(other_kind)):
        pot = effective_potential(build_mass_function(frame, kind), s)
        sols[kind] = box_diagnosed(pot, grid, k, scale=scale)
    return TruncationReport(frame, s, grid, sols[Kind.HARMONIC], sols[Kind.parse(other_kind)])


def expansion_window(a_values, ax_max: float = 0.05, n: int = 1000) -> Grid:
    """Grid around x = 0 on which |a x| <= ax_max for every acceleration in the sweep."""
    half = ax_max / max(a_values)
    return Grid(-half, half, n)


def truncation_sweep(a_values, s, k: int = 4, m: float = 1.0, grid: Grid | None = None) -> dict[float, np.ndarray]:
    """Gap |lam_exact - lam_harmonic| per level for each a, all on one shared grid."""
    grid = grid or expansion_window(a_values)
    return {a: truncation_error_report(RindlerFrame(a, m), s, grid, k).gaps for a in a_values}


def gaps_shrink(sweep: dict[float, np.ndarray]) -> bool:
    """True when every level's gap decreases strictly as a decreases."""
    ordered = [sweep[a] for a in sorted(sweep, reverse=True)]
    return all(bool(np.all(b < a)) for a, b in zip(ordered, ordered[1:]))


# ---------------------------------------------------------------------------
# figure data


@dataclass(frozen=True)
class WavefunctionDataset:
    frame: RindlerFrame
    n: int
    x: np.ndarray
    xi: np.ndarray
    y: np.ndarray
    g: np.ndarray
    f: np.ndarray
    b_upper: float
    b_lower: float
    norm: float
    nodes: int
    decay_markers: tuple[float, float]  # outermost y with |g| above DECAY_LEVEL * peak, left and right

    def rows(self) -> list[list]:
        return [list(r) for r in zip(self.x, self.xi, self.y, self.g, self.f)]


def decay_markers(y: np.ndarray, g: np.ndarray, level: float = DECAY_LEVEL) -> tuple[float, float]:
    above = np.flatnonzero(np.abs(g) > level * np.max(np.abs(g)))
    return float(y[above[0]]), float(y[above[-1]])


def wavefunction_dataset(frame: RindlerFrame, n: int, grid: Grid | None = None) -> WavefunctionDataset:
    grid = grid or Grid.auto(frame)
    sp = spinor(n, frame, grid)
    x = sp.x
    norm = math.sqrt(np.trapezoid(sp.upper**2 + sp.lower**2, x))
    return WavefunctionDataset(frame, n, x, conformal_to_proper(x, frame), sp.y, sp.lower, sp.upper,
                               sp.b_upper, sp.b_lower, norm, count_nodes(sp.lower), decay_markers(sp.y, sp.lower))


@dataclass(frozen=True)
class FigureData:
    spectrum: list[tuple[float, int, int, float]]  # (a, n, s, eps), both signs
    wavefunctions: dict[tuple[float, int], WavefunctionDataset]
    meta: dict


def figure_datasets(frames, n_max: int = 3, s=Sector.LOWER, grid: Grid | None = None) -> FigureData:
    frames = list(frames)
    if not frames:
        raise ValueError("need at least one frame")
    s = Sector.parse(s)
    spectrum = []
    for frame in frames:
        for n in range(n_max + 1):
            lv: AnalyticLevel = energy(n, s, frame)
            spectrum.extend((frame.a, n, int(s), e) for e in lv.energies)
    waves = {(fr.a, n): wavefunction_dataset(fr, n, grid) for fr in frames for n in range(n_max + 1)}
    meta = {"m": sorted({fr.m for fr in frames}), "a": [fr.a for fr in frames], "n_max": n_max, "s": int(s),
            "note": "m is not given for the reference figures; the value used is recorded here"}
    return FigureData(spectrum, waves, meta)
