"""Closed-form levels and spinors of the small-acceleration problem.

In oscillator units the lower component solves -F'' + (y^2 - 1) F = eta F, so
the levels are labelled by the lower-component degree n:

    eps^2 = a m (n + (1 + s)/2),   g ~ exp(-y^2/2) H_n(y),   f ~ exp(-y^2/2) H_{n-1}(y).

The n = 0, eps = 0 zero mode has f = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .geometry import RindlerFrame
from .reduction import OscillatorForm, Sector, SpinorPair, to_oscillator_form

# Degree above which evaluation stops using the monomial coefficients.
EXACT_DEGREE_LIMIT = 20


@dataclass(frozen=True)
class HermitePolynomial:
    """Physicists' Hermite polynomial; ``coeffs[k]`` multiplies y**k."""

    degree: int
    coeffs: tuple[int, ...]

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if self.degree <= EXACT_DEGREE_LIMIT:
            out = np.zeros_like(y)
            for c in reversed(self.coeffs):
                out = out * y + float(c)
            return out
        return _hermite_recurrence(self.degree, y)


def _hermite_recurrence(n: int, y: np.ndarray) -> np.ndarray:
    prev, cur = np.ones_like(y), 2.0 * y
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, 2.0 * y * cur - 2.0 * k * prev
    return cur


def hermite(n: int) -> HermitePolynomial:
    """Exact integer coefficients from H_{k+1} = 2y H_k - 2k H_{k-1}."""
    if n < 0:
        raise ValueError("Hermite degree must be non-negative")
    prev, cur = [1], [0, 2]
    if n == 0:
        return HermitePolynomial(0, (1,))
    for k in range(1, n):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= 2 * k * c
        prev, cur = cur, nxt
    return HermitePolynomial(n, tuple(cur))


def hermite_norm(n: int) -> float:
    """1 / sqrt(2^n n! sqrt(pi)), the L2 normalization of exp(-y^2/2) H_n."""
    log = 0.5 * (n * math.log(2.0) + math.lgamma(n + 1) + 0.5 * math.log(math.pi))
    return math.exp(-log)


def hermite_function(n: int, y) -> np.ndarray:
    """Normalized exp(-y^2/2) H_n(y) / sqrt(2^n n! sqrt(pi)) via the stable recurrence."""
    y = np.asarray(y, dtype=float)
    psi_prev = np.zeros_like(y)
    psi = np.pi**-0.25 * np.exp(-0.5 * y**2)
    for k in range(n):
        psi_prev, psi = psi, np.sqrt(2.0 / (k + 1)) * y * psi - np.sqrt(k / (k + 1)) * psi_prev
    return psi


@dataclass(frozen=True)
class SeriesSolution:
    eta: object
    s: Sector
    coeffs: tuple
    terminated: bool
    termination_index: int | None

    def polynomial(self) -> tuple:
        """Coefficients up to the termination index (the whole list if it never terminates)."""
        if self.termination_index is None:
            return self.coeffs if not self.terminated else ()
        return self.coeffs[: self.termination_index + 1]


def series_coefficients(eta, s, a0=1, a1=0, j_max: int = 40) -> SeriesSolution:
    """Power-series coefficients of h(y) in F = exp(-y^2/2) h(y) for F'' + (eta - y^2 - s) F = 0.

        a_{j+2} = (2j + 1 - (eta - s)) a_j / ((j + 2)(j + 1))

    Rational inputs are carried exactly as Fractions. A parity chain with a
    nonzero seed terminates when its numerator vanishes; the series is
    reported terminated only when every live chain does.
    """
    if j_max < 2:
        raise ValueError("j_max must be at least 2")
    s = Sector.parse(s)
    exact = all(isinstance(v, Rational) for v in (eta, a0, a1))
    conv = Fraction if exact else float
    shift = conv(eta) - int(s)
    coeffs = [conv(a0), conv(a1)] + [conv(0)] * (j_max - 1)
    ends: dict[int, int | None] = {}
    for parity in (0, 1):
        if coeffs[parity] == 0:
            continue
        ends[parity] = None
        for j in range(parity, j_max - 1, 2):
            num = 2 * j + 1 - shift
            if num == 0:
                ends[parity] = j
                break
            coeffs[j + 2] = num * coeffs[j] / ((j + 2) * (j + 1))
    terminated = all(end is not None for end in ends.values())
    index = max(ends.values()) if ends and terminated else None
    return SeriesSolution(eta, s, tuple(coeffs[: j_max + 1]), terminated, index)


@dataclass(frozen=True)
class AnalyticLevel:
    """Level n of sector s; ``eps`` is the non-negative magnitude, both signs are physical."""

    n: int
    s: Sector
    eps: float
    frame: RindlerFrame

    @property
    def energies(self) -> tuple[float, float]:
        return self.eps, -self.eps

    @property
    def eps_squared(self) -> float:
        return self.frame.a * self.frame.m * (self.n + (1 + int(self.s)) // 2)

    @property
    def eta(self) -> float:
        return float(2 * self.n + 1 + int(self.s))


def energy(n: int, s, frame: RindlerFrame) -> AnalyticLevel:
    if n < 0:
        raise ValueError("level index must be non-negative")
    s = Sector.parse(s)
    eps = math.sqrt(frame.a * frame.m * (n + (1 + int(s)) // 2))
    return AnalyticLevel(n, s, eps, frame)


@dataclass(frozen=True)
class AnalyticSpinor:
    """Closed-form spinor of level n (lower-component degree) on a grid.

    ``b_upper`` and ``b_lower`` multiply exp(-y^2/2) H_{n-1}(y) and exp(-y^2/2) H_n(y).
    """

    n: int
    frame: RindlerFrame
    eps: float
    x: np.ndarray
    y: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    b_upper: float
    b_lower: float

    def as_pair(self) -> SpinorPair:
        return SpinorPair(self.x, self.upper, self.lower, self.eps)


def _grid_points(grid) -> np.ndarray:
    pts = getattr(grid, "points", grid)
    return np.asarray(pts, dtype=float)


def tail_mass(n: int, y_lo: float, y_hi: float) -> float:
    """Probability of the normalized Hermite function n outside [y_lo, y_hi]."""
    total = 0.0
    for start, sign in ((y_hi, 1.0), (y_lo, -1.0)):
        t = start + sign * np.linspace(0.0, 20.0, 4001)
        total += abs(np.trapezoid(hermite_function(n, t) ** 2, t))
    return total


def spinor(n: int, frame: RindlerFrame, grid, sign: int = 1) -> AnalyticSpinor:
    """Normalized spinor of level n on ``grid``; ``sign`` picks the sign of eps.

    The spinor is normalized so that the trapezoid rule gives int (f^2 + g^2) dx = 1.
    """
    if n < 0:
        raise ValueError("level index must be non-negative")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    osc: OscillatorForm = to_oscillator_form(frame, Sector.LOWER)
    x = _grid_points(grid)
    y = osc.y(x)
    mass = tail_mass(n, float(y[0]), float(y[-1]))
    if mass > 1e-8:
        raise ValueError(
            f"grid covers y in [{y[0]:.3g}, {y[-1]:.3g}]; level {n} loses {mass:.2e} of its norm outside"
        )
    eps = sign * energy(n, Sector.LOWER, frame).eps
    lower = hermite_function(n, y)
    if n == 0:
        upper = np.zeros_like(y)
        c_lower, c_upper = 1.0, 0.0
    else:
        # (d/dy + y) psi_n = sqrt(2n) psi_{n-1} and eps = sign sqrt(2n) * scale
        upper = sign * hermite_function(n - 1, y)
        c_lower, c_upper = 1.0, float(sign)
    norm = math.sqrt(np.trapezoid(upper**2 + lower**2, x))
    b_lower = c_lower * hermite_norm(n) / norm
    b_upper = c_upper * hermite_norm(n - 1) / norm if n > 0 else 0.0
    return AnalyticSpinor(n, frame, eps, x, y, upper / norm, lower / norm, b_upper, b_lower)


def spectrum_table(frames, n_max: int, s) -> list[AnalyticLevel]:
    """Levels n = 0..n_max of sector s for every frame, sorted by |eps| (ties keep input order)."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    levels = [energy(n, s, frame) for frame in frames for n in range(n_max + 1)]
    return sorted(levels, key=lambda lv: lv.eps)
