"""Finite-difference and shooting eigensolvers for -F'' + V(x) F = lam F.

Dirichlet walls at both ends of a uniform grid.  Two independent routes:

* ``eigen_lowest_k``: 3-point Laplacian, Sturm-sequence multisection for the
  eigenvalues and inverse iteration for the vectors.
* ``shoot``: Numerov integration from both walls, bisection on the
  Casoratian of the two solutions at a matching index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .geometry import RindlerFrame
from .reduction import EffectivePotential, Kind, OscillatorForm, Sector, build_mass_function, effective_potential

# Default box and resolution in oscillator units.
DEFAULT_Y_MAX = 10.0
DEFAULT_N = 4000

# Numerov renormalization threshold.
OVERFLOW = 1e100

# Samples per bracket per Sturm multisection pass.
_MULTISECTION = 31


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``n`` interior points; the walls sit at x_min and x_max."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.n < 3:
            raise ValueError(f"need at least 3 interior points, got {self.n}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n + 1)

    @property
    def points(self) -> np.ndarray:
        """All n + 2 nodes including both walls."""
        return self.x_min + self.h * np.arange(self.n + 2)

    @property
    def interior(self) -> np.ndarray:
        return self.points[1:-1]

    @classmethod
    def auto(cls, frame: RindlerFrame, n: int = DEFAULT_N, y_max: float = DEFAULT_Y_MAX) -> "Grid":
        """Box |y| <= y_max in oscillator units, mapped back to x."""
        osc = OscillatorForm(frame, Sector.LOWER)
        return cls(float(osc.x(-y_max)), float(osc.x(y_max)), n)

    def refined(self, n: int) -> "Grid":
        return Grid(self.x_min, self.x_max, n)

    def extended_left(self, fraction: float) -> "Grid":
        """Move x_min out by ``fraction`` of the width, keeping the spacing."""
        extra = int(round(fraction * (self.n + 1)))
        return Grid(self.x_min - extra * self.h, self.x_max, self.n + extra)


@dataclass(frozen=True)
class TridiagonalOperator:
    diag: np.ndarray
    off: np.ndarray
    grid: Grid

    def shifted(self, c: float) -> "TridiagonalOperator":
        return TridiagonalOperator(self.diag + c, self.off, self.grid)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros_like(self.diag)
        r[:-1] += np.abs(self.off)
        r[1:] += np.abs(self.off)
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))

    def count_below(self, shifts) -> np.ndarray:
        """Sturm count: number of eigenvalues strictly below each shift."""
        shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
        d, e2 = self.diag, self.off**2
        # tiny pivots become -pivmin before counting, so e2/q stays finite
        pivmin = np.finfo(float).tiny * max(1.0, float(np.max(e2, initial=0.0)))
        q = d[0] - shifts
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count = (q < 0).astype(int)
        for i in range(1, d.size):
            q = d[i] - shifts - e2[i - 1] / q
            q = np.where(np.abs(q) < pivmin, -pivmin, q)
            count += q < 0
        return count


@dataclass(frozen=True)
class EigenSolution:
    """One eigenpair. ``eigenvalue`` is eps^2; ``vector`` holds the interior samples."""

    eigenvalue: float
    vector: np.ndarray
    grid: Grid
    nodes: int
    residual: float
    uncertainty: float
    method: str = "matrix"
    box_drift: float | None = None
    box_artifact: bool | None = None

    def full(self) -> np.ndarray:
        return np.concatenate([[0.0], self.vector, [0.0]])


def _as_callable(potential) -> Callable:
    return potential if callable(potential) else (lambda x: np.asarray(potential))


def discretize(potential, grid: Grid) -> TridiagonalOperator:
    """d_i = 2/h^2 + V(x_i), e_i = -1/h^2 on the interior points (Dirichlet walls)."""
    v = np.asarray(_as_callable(potential)(grid.interior), dtype=float)
    if v.shape != (grid.n,):
        v = np.broadcast_to(v, (grid.n,)).astype(float)
    if not np.all(np.isfinite(v)):
        raise ValueError("potential has non-finite samples on the grid")
    h2 = grid.h**2
    return TridiagonalOperator(2.0 / h2 + v, np.full(grid.n - 1, -1.0 / h2), grid)


def count_nodes(v: np.ndarray, rel_floor: float = 1e-9) -> int:
    """Sign changes among samples above ``rel_floor`` of the peak magnitude."""
    v = np.asarray(v, dtype=float)
    peak = np.max(np.abs(v))
    if peak == 0:
        return 0
    signs = np.sign(v[np.abs(v) > rel_floor * peak])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _normalize(v: np.ndarray, h: float) -> np.ndarray:
    v = v / math.sqrt(h * float(v @ v))
    # leftmost significant lobe positive, for deterministic output
    first = np.flatnonzero(np.abs(v) > 1e-3 * np.max(np.abs(v)))[0]
    return v if v[first] > 0 else -v


def _sturm_eigenvalues(op: TridiagonalOperator, k: int, rtol: float, max_passes: int) -> tuple[np.ndarray, np.ndarray]:
    lo_b, hi_b = op.gershgorin()
    span = hi_b - lo_b
    lo_b -= 1e-12 * span + 1e-300
    hi_b += 1e-12 * span + 1e-300
    atol = 8.0 * np.finfo(float).eps * max(abs(lo_b), abs(hi_b))
    lo = np.full(k, lo_b)
    hi = np.full(k, hi_b)
    idx = np.arange(k)
    frac = np.arange(1, _MULTISECTION + 1) / (_MULTISECTION + 1)
    for _ in range(max_passes):
        width = hi - lo
        if np.all(width <= np.maximum(rtol * np.abs(0.5 * (lo + hi)), atol)):
            break
        samples = lo[:, None] + width[:, None] * frac[None, :]
        counts = op.count_below(samples.ravel()).reshape(samples.shape)
        below = counts <= idx[:, None]  # eigenvalue j lies above this sample
        for j in range(k):
            ok_lo = samples[j][below[j]]
            ok_hi = samples[j][~below[j]]
            if ok_lo.size:
                lo[j] = ok_lo.max()
            if ok_hi.size:
                hi[j] = ok_hi.min()
    else:
        raise SolverError(f"Sturm bisection did not converge in {max_passes} passes")
    return 0.5 * (lo + hi), hi - lo


def _inverse_iteration(op: TridiagonalOperator, lam: float, others: Sequence[np.ndarray], rng) -> np.ndarray:
    n = op.diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = op.off
    ab[1] = op.diag - lam
    ab[2, :-1] = op.off
    # keep the shifted matrix numerically nonsingular
    nudge = 64.0 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(op.diag))))
    ab[1] += nudge
    v = rng.standard_normal(n)
    for _ in range(4):
        for u in others:
            v -= (u @ v) * u
        v = solve_banded((1, 1), ab, v)
        v /= np.linalg.norm(v)
    for u in others:
        v -= (u @ v) * u
    return v / np.linalg.norm(v)


def eigen_lowest_k(op: TridiagonalOperator, k: int, rtol: float = 1e-10, max_passes: int = 80) -> list[EigenSolution]:
    """The k smallest eigenpairs, ascending, with node counts."""
    n = op.diag.size
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    lams, widths = _sturm_eigenvalues(op, k, rtol, max_passes)
    rng = np.random.default_rng(12345)
    scale = max(1.0, float(np.max(np.abs(op.diag))))
    unit: list[np.ndarray] = []
    out = []
    for lam, width in zip(lams, widths):
        cluster = [u for u, mu in zip(unit, lams) if abs(mu - lam) < 1e-8 * scale]
        v = _inverse_iteration(op, float(lam), cluster, rng)
        unit.append(v)
        resid = float(np.linalg.norm(op.matvec(v) - lam * v))
        vec = _normalize(v, op.grid.h)
        out.append(EigenSolution(float(lam), vec, op.grid, count_nodes(vec), resid, float(width)))
    # near-degenerate levels ordered by node count
    for i in range(len(out) - 1):
        a, b = out[i], out[i + 1]
        if b.eigenvalue - a.eigenvalue < 1e-12 and b.nodes < a.nodes:
            out[i], out[i + 1] = b, a
    return out


# ---------------------------------------------------------------------------
# Numerov shooting


def _numerov_sweep(q: list[float], h2: float, start: int, stop: int, step: int) -> tuple[float, float]:
    """Integrate w_{i+1} = 2 w_i - w_{i-1} + h^2 q_i u_i from a wall.

    Returns (w at ``stop``, w at ``stop + step``) up to a positive factor.
    """
    c = h2 / 12.0
    w_prev = 0.0
    i = start + step
    w = 1.0 - c * q[i]  # u = 1 next to the wall
    while i != stop + step:
        t = 1.0 - c * q[i]
        w_next = 2.0 * w - w_prev + h2 * q[i] * w / t
        w_prev, w = w, w_next
        i += step
        if abs(w) > OVERFLOW:
            w_prev /= OVERFLOW
            w /= OVERFLOW
    return w_prev, w


def _numerov_profile(q: np.ndarray, h2: float, start: int, stop: int, step: int) -> np.ndarray:
    """Full u-profile from wall ``start`` through ``stop`` (inclusive), renormalized on overflow."""
    c = h2 / 12.0
    idx = list(range(start, stop + step, step))
    u = np.zeros(len(idx))
    w_prev, w = 0.0, 1.0 - c * q[idx[1]]
    u[1] = 1.0
    for k in range(1, len(idx) - 1):
        i = idx[k]
        w_next = 2.0 * w - w_prev + h2 * q[i] * w / (1.0 - c * q[i])
        w_prev, w = w, w_next
        u[k + 1] = w / (1.0 - c * q[idx[k + 1]])
        if abs(w) > OVERFLOW:
            w_prev /= OVERFLOW
            w /= OVERFLOW
            u[: k + 2] /= OVERFLOW
    return u


@dataclass(frozen=True)
class _Shooter:
    v: np.ndarray  # potential on all nodes including walls
    h2: float
    match: int

    def defect(self, lam: float) -> float:
        q = (self.v - lam).tolist()
        last = len(q) - 1
        # left solution: w at match and match + 1
        wl0, wl1 = _numerov_sweep(q, self.h2, 0, self.match, 1)
        # right solution: w at match + 1 and match (marching leftwards)
        wr1, wr0 = _numerov_sweep(q, self.h2, last, self.match + 1, -1)
        cas = wl0 * wr1 - wl1 * wr0
        return cas / ((abs(wl0) + abs(wl1)) * (abs(wr0) + abs(wr1)))


def shoot(potential, grid: Grid, bracket: tuple[float, float], tol: float = 1e-13, max_iter: int = 200) -> EigenSolution:
    """Eigenvalue inside ``bracket`` by Numerov shooting and bisection on the matching defect."""
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    x = grid.points
    v = np.asarray(_as_callable(potential)(x), dtype=float) * np.ones_like(x)
    if not np.all(np.isfinite(v)):
        raise ValueError("potential has non-finite samples on the grid")
    mid = 0.5 * (lo + hi)
    allowed = np.flatnonzero(v[1:-1] <= mid) + 1
    match = int(allowed[-1]) if allowed.size else int(np.argmin(v[1:-1])) + 1
    match = min(max(match, 2), grid.n - 2)
    shooter = _Shooter(v, grid.h**2, match)
    d_lo, d_hi = shooter.defect(lo), shooter.defect(hi)
    if d_lo == 0.0:
        hi = lo
    elif d_hi == 0.0:
        lo = hi
    elif np.sign(d_lo) == np.sign(d_hi):
        raise SolverError(f"matching defect has the same sign at both ends of [{lo:g}, {hi:g}]; no eigenvalue bracketed")
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        d_mid = shooter.defect(mid)
        if d_mid == 0.0:
            lo = hi = mid
            break
        if np.sign(d_mid) == np.sign(d_lo):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    else:
        raise SolverError("shooting bisection did not converge")
    lam = 0.5 * (lo + hi)
    vec = _shoot_vector(v, grid, lam, match)
    return EigenSolution(lam, vec, grid, count_nodes(vec), abs(shooter.defect(lam)), hi - lo, method="numerov")


def _shoot_vector(v: np.ndarray, grid: Grid, lam: float, match: int) -> np.ndarray:
    q = v - lam
    h2 = grid.h**2
    last = v.size - 1
    left = _numerov_profile(q, h2, 0, match + 1, 1)
    right = _numerov_profile(q, h2, last, match, -1)[::-1]
    # least-squares join on the two overlapping nodes
    right = right * (left[-2:] @ right[:2]) / (right[:2] @ right[:2])
    full = np.concatenate([left[:-1], right[1:]])
    return _normalize(full[1:-1], grid.h)


# ---------------------------------------------------------------------------
# Box diagnostics and convergence


def box_diagnosed(potential, grid: Grid, k: int, shift_fraction: float = 0.2, drift_rtol: float = 1e-6,
                  scale: float = 1.0) -> list[EigenSolution]:
    """Lowest k levels with the eigenvalue drift when x_min moves ``shift_fraction`` further out.

    A level is flagged as a box artifact when the drift exceeds drift_rtol * max(|lam|, scale).
    """
    base = eigen_lowest_k(discretize(potential, grid), k)
    moved = eigen_lowest_k(discretize(potential, grid.extended_left(shift_fraction)), k)
    out = []
    for b, m in zip(base, moved):
        drift = abs(m.eigenvalue - b.eigenvalue)
        out.append(replace(b, box_drift=drift, box_artifact=bool(drift > drift_rtol * max(abs(b.eigenvalue), scale))))
    return out


def solve_exact_rindler(frame: RindlerFrame, s, grid: Grid, k: int, shift_fraction: float = 0.2,
                        drift_rtol: float = 1e-6) -> list[EigenSolution]:
    """Box levels of m^2 e^{2ax} + s a m e^{ax} with box-dependence flags."""
    pot = effective_potential(build_mass_function(frame, Kind.EXACT), s)
    return box_diagnosed(pot, grid, k, shift_fraction, drift_rtol, scale=frame.a * frame.m)


def richardson(coarse: float, fine: float, ratio: float, order: float = 2.0) -> float:
    """Extrapolate two estimates whose spacings differ by ``ratio`` (coarse/fine)."""
    r = ratio**order
    return (r * fine - coarse) / (r - 1.0)


@dataclass(frozen=True)
class LevelConvergence:
    level: int
    spacings: tuple[float, ...]
    eigenvalues: tuple[float, ...]
    observed_order: float
    extrapolated: float
    error_bar: float
    monotone: bool


def convergence_study(potential, k: int, grids: Sequence[Grid]) -> list[LevelConvergence]:
    """Observed order and Richardson-extrapolated eigenvalues from >= 3 successively halved grids."""
    if len(grids) < 3:
        raise ValueError("need at least three grids")
    hs = [g.h for g in grids]
    for h0, h1 in zip(hs, hs[1:]):
        if abs(h0 / h1 - 2.0) > 0.05:
            raise ValueError("grids must refine the spacing by a factor of 2")
    runs = [[sol.eigenvalue for sol in eigen_lowest_k(discretize(potential, g), k)] for g in grids]
    out = []
    for j in range(k):
        lam = [run[j] for run in runs]
        d1, d2 = lam[-3] - lam[-2], lam[-2] - lam[-1]
        r = hs[-2] / hs[-1]
        order = math.log(abs(d1 / d2)) / math.log(hs[-3] / hs[-2]) if d2 != 0 and d1 != 0 else float("nan")
        extrap = richardson(lam[-2], lam[-1], r)
        prev = richardson(lam[-3], lam[-2], hs[-3] / hs[-2])
        diffs = np.diff(lam)
        monotone = bool(np.all(np.sign(diffs) == np.sign(diffs[0])) and np.all(np.abs(diffs[1:]) < np.abs(diffs[:-1])))
        out.append(LevelConvergence(j, tuple(hs), tuple(lam), order, extrap, abs(extrap - prev), monotone))
    return out
