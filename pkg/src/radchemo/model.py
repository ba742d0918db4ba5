"""Model parameters, initial data and the saturating regularization F_eps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import RadialGrid, integrate

# Radial fields are plain float arrays of cell-centre values; the grid is
# passed alongside and checks the length.
RadialField = np.ndarray


class InvalidInitialData(ValueError):
    """Raised by :func:`validate_initial`; ``violations`` names each failed check."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class ModelParams:
    n: int
    R: float
    v_star: float
    eps: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not self.R > 0:
            raise ValueError(f"R must be positive, got {self.R}")
        if not (np.isfinite(self.v_star) and self.v_star >= 0):
            raise ValueError(f"v_star must be >= 0, got {self.v_star}")
        if not 0.0 <= self.eps < 1.0:
            raise ValueError(f"eps must lie in [0,1), got {self.eps}")

    def grid(self, M: int) -> RadialGrid:
        return RadialGrid(self.n, self.R, M)


@dataclass
class InitialData:
    u0: RadialField
    v0: RadialField


def _check_xi(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("F_eps is only defined for xi >= 0")
    return xi


def f_eps(xi, eps: float):
    """F_eps(xi) = xi / (1 + eps*xi)."""
    xi = _check_xi(xi)
    out = xi / (1.0 + eps * xi)
    return float(out) if out.ndim == 0 else out


def f_eps_prime(xi, eps: float):
    """F_eps'(xi) = 1 / (1 + eps*xi)^2."""
    xi = _check_xi(xi)
    out = 1.0 / (1.0 + eps * xi) ** 2
    return float(out) if out.ndim == 0 else out


def boundary_extrapolate(grid: RadialGrid, f: RadialField) -> float:
    """Quadratic extrapolation of centre values to the face r = R."""
    f = grid.check(f)
    return float((15.0 * f[-1] - 10.0 * f[-2] + 3.0 * f[-3]) / 8.0)


def validate_initial(
    data: InitialData,
    params: ModelParams,
    grid: RadialGrid,
    boundary_tol: float = 1e-10,
) -> InitialData:
    """Return ``data`` if it is admissible, otherwise raise InvalidInitialData.

    The compatibility v0 = v_star on the boundary is checked on the
    extrapolated face value, since no cell centre sits at r = R.
    """
    if (grid.n, grid.R) != (params.n, params.R):
        raise ValueError("grid and parameters describe different balls")
    u0 = grid.check(data.u0, "u0")
    v0 = grid.check(data.v0, "v0")
    bad = []
    if not np.all(np.isfinite(u0)):
        bad.append("u0 must be finite")
    if not np.all(np.isfinite(v0)):
        bad.append("v0 must be finite")
    if np.any(u0 < 0):
        bad.append("u0 must be nonnegative")
    if not integrate(grid, u0) > 0:
        bad.append("u0 must not vanish identically")
    if not np.min(v0) > 0:
        bad.append("v0 must be positive")
    vb = boundary_extrapolate(grid, v0)
    if not abs(vb - params.v_star) <= boundary_tol:
        bad.append(f"v0 must equal v_star={params.v_star} on the boundary (got {vb:.12g})")
    if bad:
        raise InvalidInitialData(bad)
    return InitialData(u0.copy(), v0.copy())
