"""Linear stability of the constant coexistence state in the symmetric model.

With ``d1 = d2 = b1 = b2 = 1``, ``a1 = a2 = a`` and ``chi1 = chi2 = chi`` the
perturbation of Neumann mode ``k`` evolves under a symmetric 2x2 matrix whose
eigenvalues are ``c +/- d``; the ``(1, -1)`` direction destabilises once
``chi`` exceeds ``2 + (1 - a)/lam + lam (1 + a)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousMode, InvalidArgument, UnsupportedConfiguration

TIE_RTOL = 1e-12


def neumann_eigenvalue(k, L, dim=1, j=None):
    if k < 0 or (j is not None and j < 0):
        raise InvalidArgument("mode indices must be non-negative")
    if not L > 0:
        raise InvalidArgument("L must be positive")
    lam = (k * math.pi / L) ** 2
    if dim == 2:
        lam += ((j or 0) * math.pi / L) ** 2
    return lam


def ubar_symmetric(a):
    return 1.0 / (1.0 + a)


@dataclass
class ModeJacobian:
    matrix: np.ndarray
    eigenvalues: tuple      # (along (1, 1), along (1, -1))
    eigenvectors: tuple


def jacobian_mode(params, lam, chi=None):
    """Linearisation of mode ``lam`` about the coexistence state."""
    if not params.is_symmetric:
        raise UnsupportedConfiguration("mode Jacobian is only derived for symmetric parameters")
    a = params.a1
    chi = params.chi1 if chi is None else chi
    ub = ubar_symmetric(a)
    c = -lam - ub
    d = -chi * ub * lam / (1.0 + lam) - a * ub
    mat = np.array([[c, d], [d, c]])
    return ModeJacobian(mat, (c + d, c - d), (np.array([1.0, 1.0]), np.array([1.0, -1.0])))


def chi_star_k(a, lam):
    if lam <= 0:
        raise InvalidArgument("the constant mode has no threshold (lam must be > 0)")
    if not 0 < a < 1:
        raise InvalidArgument(f"threshold formula needs 0 < a < 1, got a={a}")
    return (1.0 + lam) / lam * (lam * (a + 1.0) + 1.0 - a)


def lam_opt(a):
    """Real minimiser of ``chi_star_k`` over ``lam > 0``."""
    return math.sqrt((1.0 - a) / (1.0 + a))


def scan_modes(a, L, dim=1):
    """Mode indices covering the integer minimum of ``chi_star_k``.

    Threshold is convex in ``lam``; the minimum sits at the lattice point just
    below or just above ``lam_opt``, both inside ``k, j <= K``.
    """
    if dim == 1:
        modes = []
        k = 1
        prev = None
        rising = 0
        while True:
            lam = neumann_eigenvalue(k, L)
            val = chi_star_k(a, lam)
            modes.append((k,))
            if lam > lam_opt(a) and prev is not None and val > prev:
                rising += 1
                if rising >= 2:
                    break
            prev = val
            k += 1
        modes.append((k + 1,))
        return modes
    K = int(math.ceil(L * math.sqrt(lam_opt(a)) / math.pi)) + 1
    return [(k, j) for k in range(K + 1) for j in range(K + 1) if (k, j) != (0, 0)]


@dataclass
class ModeEntry:
    mode: tuple
    lam: float
    chi_star: float
    eigenvalues: tuple = ()


@dataclass
class StabilityReport:
    a: float
    L: float
    dim: int
    chi_star: float
    critical_modes: list
    modes: list = field(default_factory=list)
    chi: float | None = None
    unstable_modes: list = field(default_factory=list)

    @property
    def classification(self):
        if self.chi is None:
            return None
        return "unstable" if self.unstable_modes else "stable"

    @property
    def critical_mode(self):
        if len(self.critical_modes) != 1:
            raise AmbiguousMode(f"threshold attained at {self.critical_modes}")
        return self.critical_modes[0]


def chi_star(a, L, dim=1):
    """Return ``(chi_star, critical modes)``; ties are reported as several modes."""
    rep = stability_report(a, L, dim)
    return rep.chi_star, rep.critical_modes


def stability_report(a, L, dim=1, chi=None):
    if not 0 < a < 1:
        raise InvalidArgument(f"stability analysis needs 0 < a < 1, got a={a}")
    if not L > 0:
        raise InvalidArgument("L must be positive")
    entries = []
    for mode in scan_modes(a, L, dim):
        lam = neumann_eigenvalue(mode[0], L, dim, mode[1] if dim == 2 else None)
        entries.append(ModeEntry(mode, lam, chi_star_k(a, lam)))
    best = min(e.chi_star for e in entries)
    crit = [e.mode for e in entries if e.chi_star - best <= TIE_RTOL * best]
    # larger first index first, so (7, 2) precedes (2, 7)
    crit.sort(reverse=True)
    unstable = []
    if chi is not None:
        from .core import Params
        params = Params.symmetric(a, chi, L, dim)
        for e in entries:
            jac = jacobian_mode(params, e.lam, chi)
            e.eigenvalues = jac.eigenvalues
            if max(jac.eigenvalues) > 0:
                unstable.append(e.mode)
    return StabilityReport(a, L, dim, best, crit, entries, chi, unstable)


def growth_rate_sigma(eps, a, L, dim=1):
    """Leading growth rate ``eps * u_bar * lam / (1 + lam)`` just above threshold."""
    rep = stability_report(a, L, dim)
    mode = rep.critical_mode
    lam = neumann_eigenvalue(mode[0], L, dim, mode[1] if dim == 2 else None)
    return eps * ubar_symmetric(a) * lam / (1.0 + lam)
