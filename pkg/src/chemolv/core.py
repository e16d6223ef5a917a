"""Parameters, grids, fields and the constant coexistence state."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidArgument, NoCoexistence


@dataclass(frozen=True)
class Params:
    """Model coefficients and domain edge length.

    ``u_t = d1 Lap u + chi1 div(u grad c[v]) + b1 u (1 - u - a1 v)`` and the
    mirrored equation for ``v``; both chemotaxis terms are repulsive.
    """

    a1: float = 0.2
    a2: float = 0.2
    chi1: float = 0.0
    chi2: float = 0.0
    d1: float = 1.0
    d2: float = 1.0
    b1: float = 1.0
    b2: float = 1.0
    L: float = 1.0
    dim: int = 1

    def __post_init__(self):
        for name in ("d1", "d2", "b1", "b2", "L"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be positive, got {getattr(self, name)}")
        # a = 0 (no competition) is allowed as a degenerate test case
        for name in ("a1", "a2", "chi1", "chi2"):
            if not getattr(self, name) >= 0:
                raise InvalidArgument(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.dim not in (1, 2):
            raise InvalidArgument(f"dim must be 1 or 2, got {self.dim}")

    @classmethod
    def symmetric(cls, a, chi, L, dim=1):
        return cls(a1=a, a2=a, chi1=chi, chi2=chi, L=L, dim=dim)

    @property
    def is_symmetric(self):
        return (self.d1 == self.d2 == 1.0 and self.b1 == self.b2 == 1.0
                and self.a1 == self.a2 and self.chi1 == self.chi2)

    def with_chi(self, chi1, chi2=None):
        return replace(self, chi1=chi1, chi2=chi1 if chi2 is None else chi2)


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centred mesh on ``[0, L]`` or ``[0, L]^2`` (square, N per axis)."""

    L: float
    N: int
    dim: int = 1

    @property
    def dx(self):
        return self.L / self.N

    @property
    def shape(self):
        return (self.N,) * self.dim

    @property
    def cell_volume(self):
        return self.dx ** self.dim

    @property
    def centers(self):
        return (np.arange(self.N) + 0.5) * self.dx

    @property
    def faces(self):
        return np.arange(self.N + 1) * self.dx

    def mesh(self):
        """Cell-centre coordinates broadcast to the grid shape (``x`` along axis 0)."""
        x = self.centers
        if self.dim == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))


def build_grid(L, N, dim=1):
    if N < 2:
        raise InvalidArgument(f"need at least 2 cells per axis, got N={N}")
    if not L > 0:
        raise InvalidArgument(f"domain length must be positive, got L={L}")
    if dim not in (1, 2):
        raise InvalidArgument(f"dim must be 1 or 2, got {dim}")
    return Grid(float(L), int(N), int(dim))


@dataclass
class Field:
    """Cell averages of one density on a grid."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise InvalidArgument(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}")

    def copy(self):
        return Field(self.values.copy(), self.grid)

    @classmethod
    def constant(cls, value, grid):
        return cls(np.full(grid.shape, float(value)), grid)


@dataclass
class State:
    u: Field
    v: Field
    cu: Field
    cv: Field
    t: float = 0.0

    @property
    def grid(self):
        return self.u.grid


def project(f, grid):
    """Midpoint-rule cell averages of a pointwise function ``f(x)`` or ``f(x, y)``."""
    vals = np.broadcast_to(np.asarray(f(*grid.mesh()), dtype=float), grid.shape)
    return Field(vals.copy(), grid)


def coexistence_state(params):
    """Constant positive steady state ``(u_bar, v_bar)`` of the kinetics."""
    a1, a2 = params.a1, params.a2
    det = 1.0 - a1 * a2
    if abs(det) < 1e-14:
        raise NoCoexistence(f"a1*a2 = 1 (a1={a1}, a2={a2}) is degenerate")
    ubar = (1.0 - a1) / det
    vbar = (1.0 - a2) / det
    if ubar <= 0 or vbar <= 0:
        raise NoCoexistence(f"no positive coexistence state for a1={a1}, a2={a2}")
    return ubar, vbar
