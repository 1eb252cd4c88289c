"""Spectrum of the 1D attractive delta well -d^2/dx^2 - 2*alpha*delta(x).

The well is parametrized by the decay rate alpha of its single bound
state exp(-alpha|x|) (energy -alpha^2).  The matching condition
psi'(0+) - psi'(0-) = -g psi(0) then fixes the delta strength g = 2*alpha,
which is the convention used throughout this package: a potential column
of strength 2*alpha/dx in the finite-difference oracle, and the same
factor in the jump-defect diagnostics.

Scattering states at momentum p carry the amplitude pair
    A = i*alpha / (p - i*alpha)   (scattered, exp(-ipx) side)
    B = p / (p - i*alpha)         (transmitted, exp(ipx) side)
whose common denominator has a simple pole at p = i*alpha - the bound
state showing up as a pole of the scattering amplitudes on the positive
imaginary momentum axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DeltaWell",
    "ScatteringCoefficients",
    "psi0",
    "scattering_coeffs",
    "smatrix_pole",
    "pole_residue",
]


@dataclass(frozen=True)
class DeltaWell:
    alpha: float
    g: float = None  # type: ignore[assignment]  # filled from alpha

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.g is None:
            object.__setattr__(self, "g", 2.0 * self.alpha)
        elif abs(self.g - 2.0 * self.alpha) > 1e-14 * self.alpha:
            raise ValueError("delta strength must be g = 2*alpha in this convention")


@dataclass(frozen=True)
class ScatteringCoefficients:
    p: float
    A: complex
    B: complex


def psi0(well: DeltaWell, x) -> float:
    """Bound-state wave function exp(-alpha |x|) (unnormalized, psi0(0)=1)."""
    return np.exp(-well.alpha * np.abs(x))


def scattering_coeffs(well: DeltaWell, p: float) -> ScatteringCoefficients:
    """Amplitude pair (A, B) at real momentum p > 0."""
    if p <= 0:
        raise ValueError("continuum states require p > 0")
    denom = p - 1j * well.alpha
    return ScatteringCoefficients(p=p, A=1j * well.alpha / denom, B=p / denom)


def _denominator(well: DeltaWell, p: complex) -> complex:
    return p - 1j * well.alpha


def smatrix_pole(well: DeltaWell, p_start: complex = 1.0 + 0.1j,
                 tol: float = 1e-14, max_iter: int = 60) -> complex:
    """Root of the amplitude denominator by Newton iteration.

    The denominator is linear, so Newton lands in one step; the loop is
    kept so the routine doubles as a regression check of the closed
    form (a wrong denominator would show up as non-convergence).
    """
    p = complex(p_start)
    for _ in range(max_iter):
        f = _denominator(well, p)
        # derivative of (p - i*alpha) w.r.t. p
        step = f / 1.0
        p = p - step
        if abs(step) < tol * max(1.0, abs(p)):
            return p
    raise RuntimeError("pole search did not converge")


def pole_residue(well: DeltaWell, radius: float = 0.3, n: int = 256) -> complex:
    """Residue of A(p) at the pole, by a trapezoid contour integral.

    The trapezoid rule on a circle converges spectrally for analytic
    integrands, so n = 256 gives machine accuracy here.  Expected value:
    residue of i*alpha/(p - i*alpha) at p = i*alpha, i.e. i*alpha.
    """
    pole = smatrix_pole(well)
    th = 2.0 * math.pi * np.arange(n) / n
    z = pole + radius * np.exp(1j * th)
    a_vals = 1j * well.alpha / (z - 1j * well.alpha)
    # (1/2pi i) * contour integral of A dp
    dz = 1j * radius * np.exp(1j * th) * (2.0 * math.pi / n)
    return complex(np.sum(a_vals * dz) / (2j * math.pi))
