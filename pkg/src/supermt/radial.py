"""Grids, quadrature, dimensional constants and pointwise bounds for radial
functions on the unit ball.

A radial profile u(r) on [0, 1] is stored by its nodal values on a fixed grid
and interpreted as the piecewise-linear interpolant, so the derivative is
piecewise constant and the Dirichlet n-energy

    E(u) = integral_B |grad u|^n dx
         = omega_{n-1} * integral_0^1 |u'(r)|^n r^{n-1} dr

is computed exactly cell by cell (the r^{n-1} monomial is integrated in
closed form; no sampling error near r = 0).

Profiles of Moser-Trudinger type vary on the -log r scale, so grids are
log-graded toward the origin by default.  Uniform grids are supported but
are a poor choice for concentration studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RadialGrid",
    "RadialFunction",
    "DimensionConstants",
    "make_grid",
    "constants_for",
    "dirichlet_energy",
    "dirichlet_energy_gradient",
    "normalize",
    "pointwise_bound",
]

MIN_GRID_COUNT = 16


def _gamma_half_integer(two_x: int) -> float:
    """Gamma(two_x / 2) for integer two_x >= 1, by the exact recursion
    Gamma(x+1) = x * Gamma(x) from Gamma(1) = 1 and Gamma(1/2) = sqrt(pi)."""
    if two_x < 1:
        raise ValueError("argument must be a positive half-integer")
    if two_x % 2 == 0:
        value = 1.0
        k = 2
    else:
        value = math.sqrt(math.pi)
        k = 1
    while k < two_x:
        value *= k / 2.0
        k += 2
    return value


def sphere_surface_measure(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / _gamma_half_integer(n)


@dataclass(frozen=True)
class DimensionConstants:
    """Dimension-dependent constants of the radial unit-ball setting.

    alpha is the sharp exponential-integrability constant
    n * omega^{1/(n-1)}; it equals n^{n/(n-1)} * ball_volume^{1/(n-1)}.
    concentration_level is ball_volume * (1 + exp(harmonic_partial)), the
    supremum of the exponential functional along normalized concentrating
    sequences.
    """

    n: int
    omega: float                # surface measure of S^{n-1}
    ball_volume: float          # |B| = omega / n
    alpha: float                # sharp constant n * omega^{1/(n-1)}
    harmonic_partial: float     # sum_{i=1}^{n-1} 1/i
    concentration_level: float  # |B| * (1 + e^{harmonic_partial})


def constants_for(n: int) -> DimensionConstants:
    """Compute all constants for dimension n >= 2.

    Raises ValueError if n < 2 or if the two closed forms of the sharp
    constant disagree beyond 1e-12 relative (cannot happen for sane n).
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"dimension n must be an integer >= 2, got {n!r}")
    om = sphere_surface_measure(n)
    vol = om / n
    alpha = n * om ** (1.0 / (n - 1))
    alpha_alt = n ** (n / (n - 1)) * vol ** (1.0 / (n - 1))
    if abs(alpha - alpha_alt) > 1e-12 * alpha:
        raise ValueError(f"inconsistent sharp-constant closed forms for n={n}")
    h = sum(1.0 / i for i in range(1, n))
    return DimensionConstants(
        n=int(n),
        omega=om,
        ball_volume=vol,
        alpha=alpha,
        harmonic_partial=h,
        concentration_level=vol * (1.0 + math.exp(h)),
    )


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing nodes on [0, 1] with nodes[0] = 0, nodes[-1] = 1."""

    nodes: np.ndarray
    grading: str = "custom"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < MIN_GRID_COUNT:
            raise ValueError(f"grid needs at least {MIN_GRID_COUNT} nodes")
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise ValueError("grid must start at 0 and end at 1")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("grid nodes must be strictly increasing")
        nodes = nodes.copy()
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def count(self) -> int:
        return self.nodes.size

    @property
    def cell_widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def cell_midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[1:] + self.nodes[:-1])

    def cell_volumes(self, n: int) -> np.ndarray:
        """omega_{n-1} * integral_cell r^{n-1} dr, exactly, per cell."""
        r = self.nodes
        return sphere_surface_measure(n) * (r[1:] ** n - r[:-1] ** n) / n


def make_grid(count: int, grading: str = "log", strength: float = 40.0,
              strength_boundary: float = 8.0) -> RadialGrid:
    """Build a grid of `count` nodes on [0, 1].

    grading:
      "uniform"  equally spaced nodes.
      "log"      node 0 plus a geometric ladder from exp(-strength) to 1,
                 so -log(nodes[1]) >= strength.
      "double"   log-graded at the origin and clustered toward r = 1 with
                 1 - r reaching exp(-strength_boundary); spacing near both
                 endpoints is finer than mid-interval spacing.
    """
    if count < MIN_GRID_COUNT:
        raise ValueError(f"count must be >= {MIN_GRID_COUNT}, got {count}")
    if grading == "uniform":
        nodes = np.linspace(0.0, 1.0, count)
        descr = "uniform"
    elif grading == "log":
        if strength <= 0:
            raise ValueError("strength must be positive")
        ladder = np.exp(np.linspace(-strength, 0.0, count - 1))
        nodes = np.concatenate([[0.0], ladder])
        nodes[-1] = 1.0
        descr = f"log-graded-origin({strength:g})"
    elif grading == "double":
        if strength <= 0 or strength_boundary <= 0:
            raise ValueError("grading strengths must be positive")
        # geometric toward 0 on [0, 1/2], geometric in (1 - r) on [1/2, 1]
        n_left = count - count // 2
        n_right = count - n_left          # nodes strictly right of 1/2
        left = np.exp(np.linspace(-strength, math.log(0.5), n_left - 1))
        right = 1.0 - np.exp(np.linspace(
            math.log(0.5), -strength_boundary, n_right + 1))[1:]
        nodes = np.concatenate([[0.0], left, right])
        nodes[-1] = 1.0
        descr = f"doubly-graded({strength:g},{strength_boundary:g})"
    else:
        raise ValueError(f"unknown grading {grading!r}")
    return RadialGrid(nodes=nodes, grading=descr)


@dataclass(frozen=True)
class RadialFunction:
    """Nodal values of a radial profile with Dirichlet boundary value 0 at r=1.

    The profile is the piecewise-linear interpolant of (grid.nodes, values);
    dim_n is the ambient dimension the profile lives in.
    """

    grid: RadialGrid
    values: np.ndarray
    dim_n: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.nodes.shape:
            raise ValueError("values must match the grid node count")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        if vals[-1] != 0.0:
            raise ValueError("boundary value u(1) must be exactly 0")
        if self.dim_n < 2:
            raise ValueError("dim_n must be >= 2")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def with_values(self, values: np.ndarray) -> "RadialFunction":
        return RadialFunction(grid=self.grid, values=values, dim_n=self.dim_n)

    def __call__(self, r):
        """Piecewise-linear evaluation at radii r in [0, 1]."""
        return np.interp(r, self.grid.nodes, self.values)


def zero_function(grid: RadialGrid, n: int) -> RadialFunction:
    return RadialFunction(grid=grid, values=np.zeros(grid.count), dim_n=n)


def dirichlet_energy(u: RadialFunction) -> float:
    """integral_B |grad u|^n dx for the piecewise-linear profile, exactly."""
    n = u.dim_n
    slopes = np.diff(u.values) / u.grid.cell_widths
    return float(np.sum(np.abs(slopes) ** n * u.grid.cell_volumes(n)))


def dirichlet_energy_gradient(u: RadialFunction) -> np.ndarray:
    """Gradient of dirichlet_energy with respect to all nodal values.

    The last entry is forced to 0 (the boundary node is pinned).
    """
    n = u.dim_n
    dr = u.grid.cell_widths
    slopes = np.diff(u.values) / dr
    t = n * u.grid.cell_volumes(n) * np.abs(slopes) ** (n - 2) * slopes / dr
    g = np.zeros_like(u.values)
    g[:-1] -= t
    g[1:] += t
    g[-1] = 0.0
    return g


def normalize(u: RadialFunction) -> RadialFunction:
    """Rescale u to the unit Dirichlet n-energy sphere.

    Exact by n-homogeneity: E(t u) = t^n E(u).  Raises on zero energy.
    """
    e = dirichlet_energy(u)
    if e <= 0.0:
        raise ValueError("cannot normalize a zero-energy function")
    return u.with_values(u.values / e ** (1.0 / u.dim_n))


def pointwise_bound(r, n: int):
    """Sharp radial growth bound (n/alpha)^{(n-1)/n} (-log r)^{(n-1)/n}.

    Every u with dirichlet_energy(u) <= 1 satisfies |u(r)| <= bound(r) for
    r in (0, 1); it follows from Hoelder applied to u(r) = -int_r^1 u'.
    Accepts a scalar or an array of radii.
    """
    consts = constants_for(n)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0.0) or np.any(r_arr >= 1.0):
        raise ValueError("radius must lie strictly inside (0, 1)")
    expo = (n - 1.0) / n
    out = (n / consts.alpha) ** expo * (-np.log(r_arr)) ** expo
    return float(out) if np.isscalar(r) else out
