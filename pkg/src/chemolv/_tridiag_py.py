"""Pure numpy Thomas solver, vectorised across a batch of systems."""
import numpy as np

from .errors import SingularSystem

PIVOT_RTOL = 1e-14


def solve_batch(sub, diag, sup, rhs):
    """Solve tridiagonal systems stored row-wise in ``(B, N)`` arrays.

    ``sub[:, 0]`` and ``sup[:, -1]`` are ignored.
    """
    B, N = rhs.shape
    cp = np.empty((B, N))
    dp = np.empty((B, N))
    x = np.empty((B, N))
    tiny = PIVOT_RTOL * np.abs(diag).max(axis=1)

    piv = diag[:, 0]
    if np.any(np.abs(piv) <= tiny):
        raise SingularSystem("zero pivot in row 0")
    cp[:, 0] = sup[:, 0] / piv
    dp[:, 0] = rhs[:, 0] / piv
    for i in range(1, N):
        piv = diag[:, i] - sub[:, i] * cp[:, i - 1]
        if np.any(np.abs(piv) <= tiny):
            raise SingularSystem(f"zero pivot in row {i}")
        cp[:, i] = sup[:, i] / piv
        dp[:, i] = (rhs[:, i] - sub[:, i] * dp[:, i - 1]) / piv
    x[:, N - 1] = dp[:, N - 1]
    for i in range(N - 2, -1, -1):
        x[:, i] = dp[:, i] - cp[:, i] * x[:, i + 1]
    return x
