"""Radial finite-volume grid on the ball B_R(0) in R^n."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Uniform cell-centred grid in r with metric weight r^(n-1).

    ``face_areas[k]`` is the area of the sphere of radius ``cell_faces[k]``
    and ``cell_volumes[i]`` the volume of the shell between faces i and i+1,
    so sums over cells are exact integrals of piecewise constants.
    """

    n: int
    R: float
    M: int
    omega: float = field(init=False, repr=False)
    h: float = field(init=False, repr=False)
    cell_faces: np.ndarray = field(init=False, repr=False)
    cell_centers: np.ndarray = field(init=False, repr=False)
    cell_volumes: np.ndarray = field(init=False, repr=False)
    face_areas: np.ndarray = field(init=False, repr=False)
    dual_volumes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension n must be an integer >= 2, got {self.n}")
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValueError(f"radius R must be positive, got {self.R}")
        if int(self.M) != self.M or self.M < 8:
            raise ValueError(f"cell count M must be an integer >= 8, got {self.M}")
        n, R, M = int(self.n), float(self.R), int(self.M)
        omega = sphere_area(n)
        faces = R * np.arange(M + 1) / M
        faces[-1] = R
        centers = 0.5 * (faces[:-1] + faces[1:])
        vols = omega * np.diff(faces**n) / n
        # dual cells: [r_{i-1}, r_i] around interior faces, half cells at both ends
        dual_edges = np.concatenate(([0.0], centers, [R]))
        dual = omega * np.diff(dual_edges**n) / n
        for name, value in [
            ("n", n), ("R", R), ("M", M), ("omega", omega), ("h", R / M),
            ("cell_faces", faces), ("cell_centers", centers),
            ("cell_volumes", vols), ("face_areas", omega * faces ** (n - 1)),
            ("dual_volumes", dual),
        ]:
            if isinstance(value, np.ndarray):
                value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def volume(self) -> float:
        """|B_R(0)|."""
        return self.omega * self.R**self.n / self.n

    @property
    def boundary_area(self) -> float:
        """|dB_R(0)|."""
        return self.omega * self.R ** (self.n - 1)

    def check(self, f: np.ndarray, name: str = "field") -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.M,):
            raise ValueError(f"{name} has shape {f.shape}, grid expects ({self.M},)")
        return f

    def sample(self, func) -> np.ndarray:
        """Evaluate ``func(r)`` at the cell centres."""
        return np.asarray(func(self.cell_centers), dtype=float) * np.ones(self.M)

    def refine(self, factor: int = 2) -> "RadialGrid":
        return RadialGrid(self.n, self.R, self.M * factor)


def make_grid(n: int, R: float, M: int) -> RadialGrid:
    return RadialGrid(n, R, M)


def integrate(grid: RadialGrid, f) -> float:
    """Midpoint quadrature of a cell-centred field over the ball."""
    f = grid.check(f)
    return float(np.dot(f, grid.cell_volumes))


def integrate_faces(grid: RadialGrid, q) -> float:
    """Quadrature of a face-valued profile (length M+1) using dual cells."""
    q = np.asarray(q, dtype=float)
    if q.shape != (grid.M + 1,):
        raise ValueError(f"face profile has shape {q.shape}, grid expects ({grid.M + 1},)")
    return float(np.dot(q, grid.dual_volumes))
