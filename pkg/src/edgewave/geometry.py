"""Parabolic double-cover coordinates about the barrier tip.

The physical plane carries a half-line barrier {y = 0, x >= a}.  Writing
z = y + i(x - a) = w^2 unfolds the cut plane into the w = xi + i*eta
plane, where the two faces of the barrier become genuinely distinct
lines.  The polar angle phi about the tip runs over the closed interval
[0, 2pi], with phi = 0 (approach from y > 0) and phi = 2pi (approach
from y < 0) kept as distinct sheets of the same ray.

With chi = phi - pi/2 the real chart is

    xi  =  sqrt(r) cos(chi/2),      eta = -sqrt(r) sin(chi/2),

so that y = xi^2 - eta^2 and x - a = 2 xi eta.  The guided-mode
("rotated") chart replaces phi by phi - i*lambda with a complex rotation
parameter lambda:

    xi  = sqrt(r/2) (cos A + sin A),  eta = sqrt(r/2) (cos A - sin A),
    A   = (phi - i*lambda) / 2,

which reduces to the real chart at lambda = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # only for annotations; avoids a runtime import cycle
    from .bound_edge import WaveguideParams

__all__ = [
    "PlanePoint",
    "ParabolicCoords",
    "to_parabolic",
    "from_parabolic",
    "bound_parabolic",
    "bound_pair",
    "laplacian_factor",
]


@dataclass(frozen=True)
class PlanePoint:
    x: float
    y: float
    a: float = 0.0

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("tip abscissa a must be >= 0")


@dataclass(frozen=True)
class ParabolicCoords:
    r: float
    phi: float
    xi: complex
    eta: complex


def _polar_about_tip(p: PlanePoint, side: str) -> tuple[float, float]:
    u = p.x - p.a
    v = p.y
    r = math.hypot(u, v)
    if r == 0.0:
        raise ValueError("the tip is a coordinate singularity")
    if v == 0.0 and u > 0.0:
        # on the barrier ray: the angle is 0 or 2pi depending on the face
        if side == "top":
            return r, 0.0
        if side == "bottom":
            return r, 2.0 * math.pi
        if side == "auto":
            # every IEEE zero is signed, so the sign bit decides the face
            return r, 0.0 if math.copysign(1.0, v) > 0 else 2.0 * math.pi
        raise ValueError(f"unknown side tag {side!r}")
    phi = math.atan2(v, u)
    if phi < 0.0:
        phi += 2.0 * math.pi
    return r, phi


def to_parabolic(p: PlanePoint, side: str = "auto") -> ParabolicCoords:
    """Real-chart coordinates (r, phi, xi, eta) of a plane point."""
    r, phi = _polar_about_tip(p, side)
    half = 0.5 * (phi - 0.5 * math.pi)
    root = math.sqrt(r)
    return ParabolicCoords(
        r=r, phi=phi,
        xi=root * math.cos(half),
        eta=-root * math.sin(half),
    )


def from_parabolic(xi: float, eta: float, a: float = 0.0) -> PlanePoint:
    """Inverse of the real chart: y = xi^2 - eta^2, x = 2 xi eta + a."""
    return PlanePoint(x=2.0 * xi * eta + a, y=xi * xi - eta * eta, a=a)


def bound_pair(r, phi, lam: complex):
    """Rotated-chart pair (xi, eta) for arrays of (r, phi).

    Vectorized core shared by :func:`bound_parabolic` and the field
    evaluators.  ``lam`` is the complex rotation parameter.
    """
    A = 0.5 * (np.asarray(phi) - 1j * lam)
    c, s = np.cos(A), np.sin(A)
    root = np.sqrt(np.asarray(r) / 2.0)
    return root * (c + s), root * (c - s)


def bound_parabolic(p: PlanePoint, params: "WaveguideParams",
                    side: str = "auto") -> ParabolicCoords:
    """Rotated-chart coordinates using the rotation parameter of ``params``."""
    if not np.isfinite(params.lam):
        raise ValueError("rotation parameter lambda must be finite")
    r, phi = _polar_about_tip(p, side)
    xi, eta = bound_pair(r, phi, params.lam)
    return ParabolicCoords(r=r, phi=phi, xi=complex(xi), eta=complex(eta))


def laplacian_factor(xi: complex, eta: complex) -> complex:
    """Conformal factor 1/(4(xi^2 + eta^2)) of the Laplacian in (xi, eta).

    On the real chart xi^2 + eta^2 = r, so the factor is 1/(4r); it
    vanishes nowhere except the tip, which raises.
    """
    d = xi * xi + eta * eta
    if d == 0:
        raise ValueError("tip: xi = eta = 0 is singular")
    return 1.0 / (4.0 * d)
