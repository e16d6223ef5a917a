"""Screened Poisson solves ``c - Lap c = rho`` with homogeneous Neumann boundaries.

Both 1D and 2D use the cell-centred five-point (three-point) stencil with a
mirrored ghost cell, so the operator is symmetric, its rows sum to one and
the discrete mass of ``c`` equals that of ``rho``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft

from .core import Field
from .errors import InvalidArgument, NoConvergence
from .kernels import tridiag_solve_batch


@dataclass
class TridiagonalSystem:
    """Row-wise tridiagonal system; ``sub[0]`` and ``sup[-1]`` are ignored."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        self.sub, self.diag, self.sup, self.rhs = (
            np.asarray(a, dtype=float) for a in (self.sub, self.diag, self.sup, self.rhs))
        n = self.diag.shape[-1]
        if any(a.shape[-1] != n for a in (self.sub, self.sup, self.rhs)):
            raise InvalidArgument("tridiagonal bands and rhs must have equal length")

    def _offdiag(self):
        lo = np.abs(self.sub).copy()
        hi = np.abs(self.sup).copy()
        lo[..., 0] = 0.0
        hi[..., -1] = 0.0
        return lo, hi

    @property
    def row_dominant(self):
        lo, hi = self._offdiag()
        return bool(np.all(np.abs(self.diag) > lo + hi))

    @property
    def column_dominant(self):
        lo, hi = self._offdiag()
        # column i collects sup[i-1] above and sub[i+1] below the diagonal
        col = np.zeros_like(self.diag)
        col[..., 1:] += hi[..., :-1]
        col[..., :-1] += lo[..., 1:]
        return bool(np.all(np.abs(self.diag) > col))

    @property
    def diagonally_dominant(self):
        """Strict dominance by rows or by columns; either keeps Thomas pivots safe."""
        return self.row_dominant or self.column_dominant

    def matvec(self, x):
        y = self.diag * x
        y[..., 1:] += self.sub[..., 1:] * x[..., :-1]
        y[..., :-1] += self.sup[..., :-1] * x[..., 1:]
        return y

    def dense(self):
        """Dense matrix of a single (1D-banded) system."""
        return np.diag(self.diag) + np.diag(self.sub[1:], -1) + np.diag(self.sup[:-1], 1)


def thomas_solve(system):
    """Solve a tridiagonal system (or a stack of them along the leading axes)."""
    diag = system.diag
    if diag.shape[-1] < 1:
        raise InvalidArgument("empty system")
    shape = np.broadcast_shapes(system.sub.shape, diag.shape, system.sup.shape, system.rhs.shape)
    n = shape[-1]
    flat = [np.broadcast_to(a, shape).reshape(-1, n)
            for a in (system.sub, diag, system.sup, system.rhs)]
    return tridiag_solve_batch(*flat).reshape(shape)


def helmholtz_system_1d(grid, rhs):
    """Assemble ``(I - D_xx)`` with mirrored ghost cells."""
    n = grid.N
    r = 1.0 / grid.dx ** 2
    off = np.full(n, -r)
    diag = np.full(n, 1.0 + 2.0 * r)
    diag[0] = diag[-1] = 1.0 + r
    return TridiagonalSystem(off, diag, off.copy(), rhs)


def solve_helmholtz_1d(rho):
    grid = rho.grid
    if grid.dim != 1:
        raise InvalidArgument("solve_helmholtz_1d needs a 1D grid")
    if not np.all(np.isfinite(rho.values)):
        raise InvalidArgument("density has non-finite entries")
    system = helmholtz_system_1d(grid, rho.values)
    return Field(thomas_solve(system), grid)


def apply_helmholtz_2d(c, dx):
    """Matrix-free ``(I - D_xx - D_yy) c`` with mirrored ghost cells."""
    p = np.pad(c, 1, mode="edge")
    lap = (p[2:, 1:-1] + p[:-2, 1:-1] + p[1:-1, 2:] + p[1:-1, :-2] - 4.0 * c) / dx ** 2
    return c - lap


def discrete_neumann_eigenvalues(n, dx):
    """Eigenvalues of ``-D_xx`` for the cell-centred Neumann stencil, modes 0..n-1."""
    k = np.arange(n)
    return 4.0 * np.sin(k * np.pi / (2 * n)) ** 2 / dx ** 2


def _spectral_inverse(r, dx):
    # DCT-II diagonalises the mirrored-ghost operator exactly
    n = r.shape[0]
    mu = discrete_neumann_eigenvalues(n, dx)
    rhat = fft.dctn(r, type=2, norm="ortho")
    rhat /= 1.0 + mu[:, None] + mu[None, :]
    return fft.idctn(rhat, type=2, norm="ortho")


def solve_helmholtz_2d(rho, tol=1e-10, x0=None, maxiter=None, precondition=True):
    """Conjugate-gradient solve of ``(I - D_xx - D_yy) c = rho``.

    The operator is symmetric positive definite. With ``precondition`` the
    exact DCT inverse is used as preconditioner. After convergence the
    constant-mode component of the residual is removed, which makes the
    discrete mass identity hold to round-off.
    """
    grid = rho.grid
    if grid.dim != 2:
        raise InvalidArgument("solve_helmholtz_2d needs a 2D grid")
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    b = rho.values
    if not np.all(np.isfinite(b)):
        raise InvalidArgument("density has non-finite entries")
    dx = grid.dx
    maxiter = 10 * grid.N ** 2 if maxiter is None else maxiter
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return Field(np.zeros_like(b), grid)

    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    r = b - apply_helmholtz_2d(x, dx)
    res = np.linalg.norm(r)
    it = 0
    if res > tol * bnorm:
        z = _spectral_inverse(r, dx) if precondition else r
        p = z.copy()
        rz = np.vdot(r, z)
        while True:
            ap = apply_helmholtz_2d(p, dx)
            alpha = rz / np.vdot(p, ap)
            x += alpha * p
            r -= alpha * ap
            it += 1
            res = np.linalg.norm(r)
            if res <= tol * bnorm:
                break
            if it >= maxiter:
                raise NoConvergence(
                    f"CG did not converge in {maxiter} iterations "
                    f"(relative residual {res / bnorm:.3e})", residual=res / bnorm)
            z = _spectral_inverse(r, dx) if precondition else r
            rz_new = np.vdot(r, z)
            p = z + (rz_new / rz) * p
            rz = rz_new
    # the constant vector is an eigenvector with eigenvalue 1
    x += r.mean()
    return Field(x, grid)


def solve_helmholtz(rho, tol=1e-10, x0=None):
    if rho.grid.dim == 1:
        return solve_helmholtz_1d(rho)
    return solve_helmholtz_2d(rho, tol=tol, x0=x0)
