"""Weakly nonlinear amplitude equation for the 1D symmetric model.

Near threshold, ``chi = chi_star + eps``, the critical mode
``cos(w x) (1, -1)`` evolves as ``dA/dt = eps * lambda2 * A + lambda1 * A**3``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Field
from .errors import (AmplitudeTooLarge, InvalidArgument,
                     SubcriticalUnsupported, UnsupportedConfiguration)
from .stability import chi_star as _chi_star
from .stability import ubar_symmetric


@dataclass(frozen=True)
class AmplitudeCoefficients:
    a: float
    L: float
    k_star: int
    w: float
    w2: float
    chi_star: float
    c1: float
    c2: float
    lambda1: float
    lambda2: float

    @property
    def ubar(self):
        return ubar_symmetric(self.a)


def amplitude_coefficients(a, L):
    value, modes = _chi_star(a, L, 1)
    if len(modes) != 1:
        raise UnsupportedConfiguration(
            f"threshold attained at two modes {modes}; the expansion assumes one")
    k = modes[0][0]
    ub = ubar_symmetric(a)
    w = k * math.pi / L
    w2 = 2 * k * math.pi / L
    ww, ww2 = w * w, w2 * w2
    c1 = value * ww / (1 + ww) + (a - 1) / 2
    c1_alt = (1 - a) / 2 + (1 + a) * ww
    if abs(c1 - c1_alt) > 1e-12 * max(1.0, abs(c1_alt)):
        raise ArithmeticError(f"inconsistent threshold: c1={c1} vs {c1_alt}")
    c2 = c1 / (value * ub * ww2 / (1 + ww2) + ww2 + 1)
    lambda1 = value * ((a - 1 - c2) * ww / (2 * (1 + ww))
                       - c2 * w * w2 / (2 * (1 + ww2))) - (c2 + a - 1)
    lambda2 = ub * ww / (1 + ww)
    return AmplitudeCoefficients(a, L, k, w, w2, value, c1_alt, c2, lambda1, lambda2)


def _rhs(A, alpha, beta):
    return alpha * A + beta * A ** 3


def solve_amplitude_ode(coeffs, eps, A0, t_end, dt_ode=1e-3, sample_dt=None):
    """Classical RK4 integration; returns ``(t, A)`` sampled every ``sample_dt``."""
    if not dt_ode > 0:
        raise InvalidArgument("dt_ode must be positive")
    alpha, beta = eps * coeffs.lambda2, coeffs.lambda1
    n = int(round(t_end / dt_ode))
    h = t_end / n if n else 0.0
    every = 1 if sample_dt is None else max(1, int(round(sample_dt / h)))
    ts = [0.0]
    As = [float(A0)]
    A = float(A0)
    for i in range(1, n + 1):
        k1 = _rhs(A, alpha, beta)
        k2 = _rhs(A + 0.5 * h * k1, alpha, beta)
        k3 = _rhs(A + 0.5 * h * k2, alpha, beta)
        k4 = _rhs(A + h * k3, alpha, beta)
        A += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if i % every == 0 or i == n:
            ts.append(i * h)
            As.append(A)
    return np.array(ts), np.array(As)


def bernoulli_solution(coeffs, eps, A0, t):
    """Closed-form solution of the amplitude ODE (substitution ``y = A**-2``)."""
    t = np.asarray(t, dtype=float)
    if A0 == 0:
        return np.zeros_like(t)
    alpha, beta = eps * coeffs.lambda2, coeffs.lambda1
    y0 = A0 ** -2
    if alpha == 0:
        y = y0 - 2 * beta * t
    else:
        y = (y0 + beta / alpha) * np.exp(-2 * alpha * t) - beta / alpha
    return math.copysign(1.0, A0) / np.sqrt(y)


def steady_amplitude(coeffs, eps):
    if coeffs.lambda1 >= 0:
        raise SubcriticalUnsupported(f"lambda1 = {coeffs.lambda1:.4g} >= 0 (subcritical)")
    if eps <= 0:
        return 0.0
    return math.sqrt(eps * coeffs.lambda2 / -coeffs.lambda1)


def reconstruct_solution(coeffs, A, grid):
    """Leading-order fields ``(u_bar, v_bar) + A cos(w x) (1, -1)``."""
    ub = coeffs.ubar
    mode = A * np.cos(coeffs.w * grid.mesh()[0])
    u, v = ub + mode, ub - mode
    if u.min() <= 0 or v.min() <= 0:
        raise AmplitudeTooLarge(f"|A|={abs(A)} gives a non-positive density")
    return Field(u, grid), Field(v, grid)


@dataclass
class ScanPoint:
    a: float
    L: float
    k_star: int | None
    lambda1: float
    tie: bool = False


def pitchfork_scan(a_values, L_values):
    """Sign of ``lambda1`` over a grid of ``(a, L)``; tie points are flagged, not evaluated."""
    out = []
    for a in a_values:
        for L in L_values:
            try:
                c = amplitude_coefficients(float(a), float(L))
            except UnsupportedConfiguration:
                out.append(ScanPoint(float(a), float(L), None, math.nan, tie=True))
                continue
            out.append(ScanPoint(float(a), float(L), c.k_star, c.lambda1))
    return out


def all_supercritical(points):
    return all(p.lambda1 < 0 for p in points if not p.tie)
