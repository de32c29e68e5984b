"""From the Rindler Dirac equation to decoupled Schrodinger-like problems.

With the stationary ansatz psi = exp(-i eps tau) (g_bar, f_bar) and the
rescaling (g, f) = exp(sigma/4) (g_bar, f_bar), the components obey

    ( d/dx + z) g = eps f
    (-d/dx + z) f = eps g,       z(x) = m exp(sigma/2) = m exp(a x),

and each component separately solves

    -F'' + (z^2 + s z') F = eps^2 F,    s = +1 for f, s = -1 for g.

The small-acceleration form replaces z by m (1 + a x / 2).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .geometry import RindlerFrame


class Kind(enum.Enum):
    EXACT = "exact"
    HARMONIC = "harmonic"

    @classmethod
    def parse(cls, value: "Kind | str") -> "Kind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown potential kind {value!r}; expected 'exact' or 'harmonic'") from None


class Sector(enum.IntEnum):
    UPPER = 1  # f
    LOWER = -1  # g

    @classmethod
    def parse(cls, value: "Sector | int | str") -> "Sector":
        if isinstance(value, cls):
            return value
        if not isinstance(value, bool):
            try:
                v = float(value)
            except (TypeError, ValueError):
                v = None
            if v in (1.0, -1.0):
                return cls(int(v))
        raise ValueError(f"invalid sector {value!r}; expected +1 or -1")


@dataclass(frozen=True)
class MassFunction:
    frame: RindlerFrame
    kind: Kind

    def z(self, x):
        x = np.asarray(x, dtype=float)
        a, m = self.frame.a, self.frame.m
        if self.kind is Kind.EXACT:
            return m * np.exp(a * x)
        return m * (1.0 + 0.5 * a * x)

    def dz(self, x):
        x = np.asarray(x, dtype=float)
        a, m = self.frame.a, self.frame.m
        if self.kind is Kind.EXACT:
            return a * m * np.exp(a * x)
        return np.full_like(x, 0.5 * a * m)


@dataclass(frozen=True)
class EffectivePotential:
    """V_s(x) = z(x)^2 + s z'(x)."""

    massfn: MassFunction
    s: Sector

    @property
    def frame(self) -> RindlerFrame:
        return self.massfn.frame

    @property
    def kind(self) -> Kind:
        return self.massfn.kind

    def __call__(self, x):
        return self.massfn.z(x) ** 2 + int(self.s) * self.massfn.dz(x)

    def minimum(self) -> float:
        """Location of the potential minimum (-inf for the exact s=+1 well, which has none)."""
        a, m = self.frame.a, self.frame.m
        if self.kind is Kind.HARMONIC:
            return -2.0 / a
        if self.s is Sector.LOWER:
            # d/dx (m^2 e^{2ax} - a m e^{ax}) = 0  ->  e^{ax} = a / (2m)
            return float(np.log(a / (2.0 * m)) / a)
        return -np.inf


@dataclass(frozen=True)
class OscillatorForm:
    """Dimensionless oscillator variables for the truncated problem.

    y = sqrt(a m / 2) (x + 2/a),  eta = 2 eps^2 / (a m),  V_ef(y) = y^2 + s.
    """

    frame: RindlerFrame
    s: Sector

    @property
    def scale(self) -> float:
        return float(np.sqrt(0.5 * self.frame.a * self.frame.m))

    @property
    def center(self) -> float:
        return -2.0 / self.frame.a

    def y(self, x):
        return self.scale * (np.asarray(x, dtype=float) - self.center)

    def x(self, y):
        return self.center + np.asarray(y, dtype=float) / self.scale

    def eta(self, eps):
        return 2.0 * np.asarray(eps, dtype=float) ** 2 / (self.frame.a * self.frame.m)

    def eps_squared(self, eta):
        return 0.5 * self.frame.a * self.frame.m * np.asarray(eta, dtype=float)

    def potential(self, y):
        y = np.asarray(y, dtype=float)
        return y**2 + int(self.s)


@dataclass(frozen=True)
class SpinorPair:
    """Two real components sampled on a uniform grid ``x`` at energy ``eps``."""

    x: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    eps: float
    barred: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.x.shape == self.upper.shape == self.lower.shape):
            raise ValueError("spinor components must share the grid shape")

    @property
    def f(self) -> np.ndarray:
        return self.upper

    @property
    def g(self) -> np.ndarray:
        return self.lower

    def norm(self) -> float:
        return float(np.sqrt(np.trapezoid(self.upper**2 + self.lower**2, self.x)))


def build_mass_function(frame: RindlerFrame, kind: Kind | str = Kind.EXACT) -> MassFunction:
    return MassFunction(frame, Kind.parse(kind))


def effective_potential(massfn: MassFunction, s) -> EffectivePotential:
    return EffectivePotential(massfn, Sector.parse(s))


def to_oscillator_form(frame: RindlerFrame, s) -> OscillatorForm:
    return OscillatorForm(frame, Sector.parse(s))


def rescaling_factor(x, frame: RindlerFrame):
    """Diagonal entry exp(sigma/4) = exp(a x / 2) of the rescaling matrix."""
    return np.exp(0.5 * frame.a * np.asarray(x, dtype=float))


def apply_rescaling(pair: SpinorPair, frame: RindlerFrame, direction: str = "forward") -> SpinorPair:
    """Forward maps (g_bar, f_bar) -> (g, f); inverse undoes it."""
    u = rescaling_factor(pair.x, frame)
    if direction == "forward":
        return SpinorPair(pair.x, pair.upper * u, pair.lower * u, pair.eps, barred=False, meta=pair.meta)
    if direction == "inverse":
        return SpinorPair(pair.x, pair.upper / u, pair.lower / u, pair.eps, barred=True, meta=pair.meta)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def _spacing(x: np.ndarray) -> float:
    if x.size < 3:
        raise ValueError("need at least 3 grid points for central differences")
    h = (x[-1] - x[0]) / (x.size - 1)
    return float(h)


def _central(u: np.ndarray, h: float) -> np.ndarray:
    return (u[2:] - u[:-2]) / (2.0 * h)


def first_order_residual(pair: SpinorPair, massfn: MassFunction) -> tuple[float, float]:
    """Sup-norm residuals of the coupled first-order system on the interior points.

    r1 = max |g' + z g - eps f|,  r2 = max |-f' + z f - eps g|.
    """
    h = _spacing(pair.x)
    xi = pair.x[1:-1]
    z = massfn.z(xi)
    g, f = pair.lower, pair.upper
    r1 = _central(g, h) + z * g[1:-1] - pair.eps * f[1:-1]
    r2 = -_central(f, h) + z * f[1:-1] - pair.eps * g[1:-1]
    return float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))


def barred_residual(pair: SpinorPair, frame: RindlerFrame) -> tuple[float, float]:
    """Residuals of the unrescaled component equations for (g_bar, f_bar).

    ( d/dx + sigma'/4 + m e^{sigma/2}) g_bar = eps f_bar
    (-d/dx - sigma'/4 + m e^{sigma/2}) f_bar = eps g_bar
    """
    h = _spacing(pair.x)
    xi = pair.x[1:-1]
    a, m = frame.a, frame.m
    mass = m * np.exp(a * xi)
    quarter = 0.5 * a
    g, f = pair.lower, pair.upper
    r1 = _central(g, h) + (quarter + mass) * g[1:-1] - pair.eps * f[1:-1]
    r2 = -_central(f, h) + (mass - quarter) * f[1:-1] - pair.eps * g[1:-1]
    return float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))


def partner_component(g, eps: float, massfn: MassFunction, x) -> np.ndarray:
    """Upper component f = (g' + z g) / eps from the lower one.

    Raises for eps == 0: the zero mode has no normalizable partner.
    """
    if eps == 0:
        raise ValueError("eps = 0 is the unpaired zero mode; its partner is not normalizable")
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    h = _spacing(x)
    dg = np.gradient(g, h, edge_order=2)
    return (dg + massfn.z(x) * g) / eps
