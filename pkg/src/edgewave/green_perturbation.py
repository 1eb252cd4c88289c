"""First-order (Born) response of the guided mode to a point impurity.

The unperturbed Hamiltonian is H = -d2/dx2 - 2*alpha*delta(x) - d2/dy2.
Its transverse spectrum consists of the single bound state

    phi0(x) = sqrt(alpha) exp(-alpha|x|),    energy -alpha^2,

and even/odd scattering states at transverse momentum p:

    phi_e(x) = [p cos(px) - alpha sin(p|x|)] / sqrt(pi (p^2 + alpha^2)),
    phi_o(x) = sin(px) / sqrt(pi),

normalized so that the completeness relation carries a plain dp measure.
The resolvent at total energy E, convention (E - H) G = delta, separates
channel by channel with the 1-D line kernel

    g1(y; mu) = exp(i sqrt(mu)|y|) / (2i sqrt(mu))        for mu > 0,
    g1(y; mu) = -exp(-sqrt(-mu)|y|) / (2 sqrt(-mu))       for mu < 0,

where mu is the energy left to the longitudinal motion (E + alpha^2 in
the bound channel, E - p^2 in the continuum).  Both branches solve
(mu + d2/dy2) g1 = delta(y); the sign of the mu < 0 branch is fixed by
that equation, and the operator-mass check in the tests pins it: summing
(E + Laplacian_h) G over a patch around the source must give +1.

Only energies below the continuum threshold (E < 0) are supported: every
continuum channel is then closed and the p-integral is a smooth decaying
integrand after the substitution p = sqrt(-E) sinh u, which cancels the
1/(2 sqrt(p^2 - E)) density exactly.  Gauss-Legendre nodes are doubled
until the value moves by less than the requested tolerance.

An impurity lam_imp * delta(x - a) delta(y) acting on the incoming guided
mode psi0 = exp(-alpha|x| + iky) produces, to first order,

    psi1(x, y) = lam_imp * G((x, y), (a, 0)) * exp(-alpha * a),

and the bound-channel factor of G contributes a second exp(-alpha*a), so
|psi1| at a fixed probe falls off as exp(-2*alpha*a).  tail_scan measures
that slope by least squares over a list of impurity offsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import PlanePoint

__all__ = [
    "ChannelGreen",
    "GreenValue",
    "TailScanResult",
    "make_green",
    "phi_bound",
    "phi_even",
    "phi_odd",
    "line_kernel",
    "green_eval",
    "born_correction",
    "tail_scan",
    "tail_scan_csv",
    "operator_mass",
]

_N_START = 64
_N_MAX = 65536


@dataclass(frozen=True)
class ChannelGreen:
    """Channel decomposition of the resolvent at fixed energy E < 0."""

    alpha: float
    E: float
    p_max: float
    tol: float = 1e-8

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.E >= 0:
            raise ValueError("only energies below the continuum threshold "
                             "(E < 0) are supported")
        if self.p_max <= 0 or self.tol <= 0:
            raise ValueError("p_max and tol must be positive")


def make_green(alpha: float, E: float, p_max: float | None = None,
               tol: float = 1e-8) -> ChannelGreen:
    if p_max is None:
        p_max = 20.0 * max(alpha, 1.0)
    return ChannelGreen(alpha=alpha, E=E, p_max=p_max, tol=tol)


def phi_bound(alpha: float, x) -> np.ndarray:
    return math.sqrt(alpha) * np.exp(-alpha * np.abs(x))


def phi_even(alpha: float, p, x) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return (p * np.cos(p * x) - alpha * np.sin(p * np.abs(x))) \
        / np.sqrt(math.pi * (p * p + alpha * alpha))


def phi_odd(p, x) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.sin(p * x) / math.sqrt(math.pi)


def line_kernel(y: float, mu: float) -> complex:
    """1-D resolvent kernel g1(y; mu) in the (E - H)G = delta convention."""
    if mu == 0.0:
        raise ValueError("mu = 0 is the channel branch point")
    if mu > 0:
        q = math.sqrt(mu)
        return np.exp(1j * q * abs(y)) / (2j * q)
    q = math.sqrt(-mu)
    return -math.exp(-q * abs(y)) / (2.0 * q)


@dataclass(frozen=True)
class GreenValue:
    """Green's function value with the quadrature convergence estimate.

    est_error reports the move of the last node-doubling step; the p_max
    truncation is a separate systematic, negligible at separated points
    because the integrand decays like exp(-sqrt(p^2 - E)|dy|).
    """

    value: complex
    est_error: float

    def __complex__(self) -> complex:
        return self.value


def _continuum_integral(g: ChannelGreen, x: float, xp: float,
                        dy: float) -> tuple[complex, float]:
    # p = sqrt(-E) sinh u turns dp/(2 sqrt(p^2 - E)) into du/2
    s = math.sqrt(-g.E)
    u_max = math.asinh(g.p_max / s)

    def total(n: int) -> float:
        u, w = np.polynomial.legendre.leggauss(n)
        u = 0.5 * u_max * (u + 1.0)
        w = 0.5 * u_max * w
        p = s * np.sinh(u)
        dens = (phi_even(g.alpha, p, x) * phi_even(g.alpha, p, xp)
                + phi_odd(p, x) * phi_odd(p, xp))
        rad = np.exp(-s * np.cosh(u) * abs(dy))
        return float(np.sum(w * dens * rad) * (-0.5))

    n = _N_START
    prev = total(n)
    while True:
        n *= 2
        cur = total(n)
        delta = abs(cur - prev)
        if delta < g.tol:
            return complex(cur), delta
        if n >= _N_MAX:
            raise RuntimeError(
                f"continuum quadrature did not converge: last move {delta:.3e} "
                f"at {n} nodes (tol {g.tol:.1e})")
        prev = cur


def green_eval(g: ChannelGreen, frm: PlanePoint, to: PlanePoint) -> GreenValue:
    """G(to, frm) at energy g.E, bound channel plus continuum quadrature."""
    if frm.x == to.x and frm.y == to.y:
        raise ValueError("coincident points: the kernel is log-singular")
    dy = to.y - frm.y
    cont, est = _continuum_integral(g, to.x, frm.x, dy)
    if g.alpha > 0:
        mu0 = g.E + g.alpha ** 2
        bound = (phi_bound(g.alpha, to.x) * phi_bound(g.alpha, frm.x)
                 * line_kernel(dy, mu0))
    else:
        bound = 0.0
    return GreenValue(value=complex(bound) + cont, est_error=est)


def born_correction(alpha: float, k: float, lambda_imp: float, a: float,
                    p: PlanePoint) -> complex:
    """First-order field of the impurity lam*delta(x-a)delta(y) at point p.

    The incident guided mode exp(-alpha|x| + iky) has energy
    E = k^2 - alpha^2, which must stay below the continuum threshold.
    """
    if a <= 0:
        raise ValueError("the impurity offset a must be positive")
    if p.x == a and p.y == 0.0:
        raise ValueError("probe coincides with the impurity")
    E = k * k - alpha * alpha
    g = make_green(alpha, E)
    gv = green_eval(g, PlanePoint(a, 0.0), p)
    return lambda_imp * gv.value * math.exp(-alpha * a)


@dataclass(frozen=True)
class TailScanResult:
    """Fitted decay of the Born amplitude with impurity offset."""

    a_values: np.ndarray
    amplitudes: np.ndarray
    slope: float
    residual: float
    alpha: float
    k: float

    def __post_init__(self):
        a = np.asarray(self.a_values, dtype=float)
        if len(a) < 2 or np.any(np.diff(a) <= 0):
            raise ValueError("impurity offsets must be strictly increasing")
        if np.any(np.asarray(self.amplitudes) <= 0):
            raise ValueError("amplitudes must be positive")

    def summary(self) -> dict:
        return {"slope": self.slope, "residual": self.residual,
                "alpha": self.alpha, "k": self.k}


def tail_scan(alpha: float, k: float, lambda_imp: float, a_list,
              probe: PlanePoint) -> TailScanResult:
    """Born amplitude |psi1(probe)| against impurity offset, with log fit."""
    a_arr = np.asarray(sorted(a_list), dtype=float)
    if len(a_arr) < 4:
        raise ValueError("need at least 4 impurity offsets for the fit")
    if a_arr[-1] - a_arr[0] < 2.0 / alpha:
        raise ValueError("offsets must span at least 2/alpha")
    amps = np.array([abs(born_correction(alpha, k, lambda_imp, a, probe))
                     for a in a_arr])
    if np.all(amps < 1e-300):
        raise ValueError("all amplitudes underflowed; fit is degenerate")
    design = np.vstack([a_arr, np.ones_like(a_arr)]).T
    sol, *_ = np.linalg.lstsq(design, np.log(amps), rcond=None)
    resid = float(np.sqrt(np.mean((np.log(amps) - design @ sol) ** 2)))
    return TailScanResult(a_values=a_arr, amplitudes=amps,
                          slope=float(sol[0]), residual=resid,
                          alpha=alpha, k=k)


def tail_scan_csv(res: TailScanResult) -> str:
    lines = ["a,amplitude"]
    for a, c in zip(res.a_values, res.amplitudes):
        lines.append(f"{a:.16e},{c:.16e}")
    return "\n".join(lines) + "\n"


def operator_mass(g: ChannelGreen, src: PlanePoint, x_range, y_range,
                  h: float) -> float:
    """Sum of (E + Laplacian_h - 2 alpha delta_h) G over a patch, times h^2.

    For the exact resolvent in the (E - H)G = delta convention this mass
    is +1 once the patch encloses the source; the discretization defect
    is dominated by the rows nearest the source and the x = 0 column.
    """
    xs = np.arange(x_range[0], x_range[1] + 0.5 * h, h)
    ys = np.arange(y_range[0], y_range[1] + 0.5 * h, h)
    nx, ny = len(xs), len(ys)
    G = np.empty((ny, nx), dtype=complex)
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            G[j, i] = green_eval(g, src, PlanePoint(x, y)).value
    mass = 0.0 + 0.0j
    on_axis = np.isclose(xs, 0.0, atol=1e-12)
    for j in range(1, ny - 1):
        for i in range(1, nx - 1):
            lap = (G[j, i - 1] + G[j, i + 1] + G[j - 1, i] + G[j + 1, i]
                   - 4.0 * G[j, i]) / (h * h)
            row = g.E * G[j, i] + lap
            if on_axis[i]:
                row += 2.0 * g.alpha * G[j, i] / h
            mass += row * h * h
    return float(abs(mass))
