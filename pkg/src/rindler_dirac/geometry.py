"""Rindler metric, conformal coordinates, zweibein and spin connection.

Everything here is specialised to the 1+1 line element

    ds^2 = (1 + a xi)^2 dtau^2 - dxi^2 = exp(2 a x) (dtau^2 - dx^2)

with conformal factor sigma(x) = 2 a x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Local Lorentz metric eta_(a)(b), signature (+, -).
MINKOWSKI = np.diag([1.0, -1.0])

# Inputs closer than this (relative to 1/a) to the horizon xi = -1/a are rejected.
HORIZON_EPS = 1e-12


@dataclass(frozen=True)
class RindlerFrame:
    """Acceleration ``a`` and particle mass ``m``, both in inverse length units."""

    a: float
    m: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a > 0):
            raise ValueError(f"acceleration must be positive, got a={self.a!r}")
        if not (np.isfinite(self.m) and self.m > 0):
            raise ValueError(f"mass must be positive, got m={self.m!r}")

    @property
    def horizon(self) -> float:
        """Proper-coordinate position of the Rindler horizon, -1/a."""
        return -1.0 / self.a


@dataclass(frozen=True)
class ConformalFactor:
    a: float

    def sigma(self, x):
        return 2.0 * self.a * np.asarray(x, dtype=float)

    def dsigma(self, x):
        return np.full_like(np.asarray(x, dtype=float), 2.0 * self.a)


@dataclass(frozen=True)
class GammaPair:
    gamma0: np.ndarray
    gamma1: np.ndarray

    @classmethod
    def standard(cls) -> "GammaPair":
        """The 1+1 representation used throughout: gamma0 = sigma_x, gamma1 = i sigma_z."""
        g0 = np.array([[0, 1], [1, 0]], dtype=complex)
        g1 = np.array([[1j, 0], [0, -1j]], dtype=complex)
        return cls(g0, g1)

    def __getitem__(self, index: int) -> np.ndarray:
        return (self.gamma0, self.gamma1)[index]


@dataclass(frozen=True)
class Tetrad:
    """Diagonal zweibein at one point.

    ``forward[a, mu]`` is e^(a)_mu and ``inverse[a, mu]`` is e_(a)^mu.
    """

    forward: np.ndarray
    inverse: np.ndarray

    def metric(self) -> np.ndarray:
        # g_{mu nu} = e^(a)_mu e^(b)_nu eta_(a)(b)
        return np.einsum("am,bn,ab->mn", self.forward, self.forward, MINKOWSKI)

    def curved_gammas(self, gammas: GammaPair) -> list[np.ndarray]:
        """gamma^mu = e_(a)^mu gamma^(a)."""
        return [sum(self.inverse[a, mu] * gammas[a] for a in range(2)) for mu in range(2)]


@dataclass(frozen=True)
class SpinConnectionTerm:
    omega0: np.ndarray

    @property
    def components(self) -> tuple[np.ndarray, np.ndarray]:
        """(Omega_0, Omega_1); the spatial component vanishes for this tetrad."""
        return self.omega0, np.zeros((2, 2), dtype=complex)


def proper_to_conformal(xi, frame: RindlerFrame):
    """Map the proper distance ``xi`` to the conformal coordinate x = ln(1 + a xi) / a."""
    xi = np.asarray(xi, dtype=float)
    arg = 1.0 + frame.a * xi
    if np.any(arg <= HORIZON_EPS):
        raise ValueError(
            f"proper coordinate must satisfy xi > -1/a = {frame.horizon:g} (beyond the horizon)"
        )
    return np.log1p(frame.a * xi) / frame.a


def conformal_to_proper(x, frame: RindlerFrame):
    x = np.asarray(x, dtype=float)
    return np.expm1(frame.a * x) / frame.a


def conformal_factor(frame: RindlerFrame) -> ConformalFactor:
    return ConformalFactor(frame.a)


def metric_tensor(x, frame: RindlerFrame) -> np.ndarray:
    """Covariant metric diag(e^{2ax}, -e^{2ax}) at a single point."""
    w = np.exp(2.0 * frame.a * float(x))
    return np.diag([w, -w])


def inverse_metric(x, frame: RindlerFrame) -> np.ndarray:
    w = np.exp(-2.0 * frame.a * float(x))
    return np.diag([w, -w])


def tetrad(x, frame: RindlerFrame) -> Tetrad:
    half = 0.5 * float(conformal_factor(frame).sigma(x))
    return Tetrad(forward=np.exp(half) * np.eye(2), inverse=np.exp(-half) * np.eye(2))


def spin_connection(x, frame: RindlerFrame, gammas: GammaPair | None = None) -> SpinConnectionTerm:
    """Omega_0 = (i/4) sigma'(x) gamma^(0) gamma^(1); constant in x for the Rindler factor."""
    gammas = gammas or GammaPair.standard()
    dsigma = float(conformal_factor(frame).dsigma(x))
    return SpinConnectionTerm(0.25j * dsigma * gammas.gamma0 @ gammas.gamma1)


def clifford_defect(x, frame: RindlerFrame, gammas: GammaPair | None = None) -> float:
    """Max entry of |{gamma^mu, gamma^nu} - 2 g^{mu nu} 1| over all index pairs."""
    gammas = gammas or GammaPair.standard()
    gs = tetrad(x, frame).curved_gammas(gammas)
    ginv = inverse_metric(x, frame)
    worst = 0.0
    for mu in range(2):
        for nu in range(2):
            anti = gs[mu] @ gs[nu] + gs[nu] @ gs[mu]
            worst = max(worst, float(np.max(np.abs(anti - 2.0 * ginv[mu, nu] * np.eye(2)))))
    return worst
