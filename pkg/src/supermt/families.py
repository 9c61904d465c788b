"""Closed-form generators for the explicit radial test families.

Three families drive the experiments:

* moser_function: the piecewise-log profile that is constant
  omega^{-1/n} (log j)^{(n-1)/n} on r <= 1/j and proportional to -log r
  outside; its continuum Dirichlet n-energy is exactly 1 for every j > 1.

* concentrating_function: the normalized bubble-plus-log-tail profile
  u(r) = c + c^{-1/(n-1)} [ -((n-1)/alpha) log(1 + b (r/eps)^{n/(n-1)}) + A ]
  on r <= R*eps (R = -log eps, b = (omega/n)^{1/(n-1)}) matched to the tail
  c^{-1/(n-1)} (-(n/alpha) log r).  c and A are solved exactly on the grid:
  A is eliminated by continuity at R*eps and c is found by bisection on the
  discrete unit-energy condition (the asymptotic expansion of c is only used
  to bracket the root).  Exact feasibility is what the constrained maximizer
  requires; the expansion alone drifts at O(R^{-n/(n-1)}).

* mountain_pass_function: the concentrating profile at eps = 1/j.

All generators return exactly unit-energy nodal profiles (the Moser profile
is rescaled by the discrete energy, a 1 + O(h^2) correction; pass
normalized=False to get the raw closed-form samples for quadrature studies).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .radial import (RadialFunction, RadialGrid, constants_for,
                     dirichlet_energy, make_grid)
from .functionals import FunctionalSpec, eval_functional

__all__ = [
    "MoserParams",
    "ConcentratingParams",
    "BlowupRow",
    "default_family_grid",
    "moser_function",
    "concentrating_function",
    "c_power_expansion",
    "mountain_pass_function",
    "sharpness_lower_bound",
    "blowup_table",
    "write_blowup_csv",
]

EPS_MAX = math.exp(-math.e)   # admissible range of the concentration scale

ENERGY_BISECTION_TOL = 1e-12


@dataclass(frozen=True)
class MoserParams:
    """Index j > 1 (real-valued to allow smooth sweeps) and dimension n."""

    j: float
    n: int

    def __post_init__(self):
        if not self.j > 1.0:
            raise ValueError("Moser index j must exceed 1")
        if self.n < 2:
            raise ValueError("dimension must be >= 2")


@dataclass(frozen=True)
class ConcentratingParams:
    """Solved parameters of a concentrating profile.

    R = -log(eps); c and A are the constants of the inner bubble, solved so
    the profile is continuous at r = R*eps and has unit discrete energy.
    """

    eps: float
    n: int
    R: float
    c: float
    A: float


def default_family_grid(eps: float, count: int = 20000,
                        snap: Optional[float] = None) -> RadialGrid:
    """Log-graded grid resolving the concentration scale eps (strength
    -log(eps) + 10, so the inner region holds a fixed share of the nodes).

    One node is snapped exactly onto `snap` (default: eps itself): the Moser
    profile has a genuine kink at its plateau radius, and a mid-cell kink
    costs O(h) energy where everything else is O(h^2)."""
    grid = make_grid(count, "log", strength=-math.log(eps) + 10.0)
    target = eps if snap is None else snap
    nodes = grid.nodes.copy()
    if nodes[1] < target < 1.0:
        k = int(np.argmin(np.abs(nodes - target)))
        if 0 < k < count - 1:
            nodes[k] = target
            return RadialGrid(nodes=nodes, grading=grid.grading + "+snap")
    return grid


def _require_resolved(grid: RadialGrid, r_inner: float, what: str):
    inside = np.count_nonzero((grid.nodes > 0.0) & (grid.nodes < r_inner))
    if inside < 8:
        raise ValueError(
            f"grid does not resolve {what}: {inside} nodes below {r_inner:g} "
            "(need at least 8)")


def moser_function(params: MoserParams, grid: RadialGrid,
                   normalized: bool = True) -> RadialFunction:
    """Nodal samples of the Moser profile u_j.

    The continuum profile has unit energy exactly; the piecewise-linear
    samples carry an O(h^2) energy excess which the default rescaling
    removes, so the result sits on the constraint sphere to ~1e-15.
    """
    j, n = params.j, params.n
    _require_resolved(grid, 1.0 / j, f"the Moser plateau radius 1/j = {1.0 / j:g}")
    consts = constants_for(n)
    logj = math.log(j)
    r = grid.nodes
    plateau = consts.omega ** (-1.0 / n) * logj ** ((n - 1.0) / n)
    with np.errstate(divide="ignore"):
        tail = -consts.omega ** (-1.0 / n) * np.log(r) / logj ** (1.0 / n)
    values = np.where(r <= 1.0 / j, plateau, tail)
    values[-1] = 0.0
    u = RadialFunction(grid=grid, values=values, dim_n=n)
    if not normalized:
        return u
    e = dirichlet_energy(u)
    return u.with_values(values / e ** (1.0 / n))


def c_power_expansion(eps: float, n: int) -> float:
    """Leading expansion of c^{n/(n-1)} for the concentrating family:
    -(n/alpha) log(eps) + (1/alpha) log(omega/n) - ((n-1)/alpha) H_{n-1},
    accurate to O(R^{-n/(n-1)})."""
    consts = constants_for(n)
    a = consts.alpha
    return (-(n / a) * math.log(eps)
            + (1.0 / a) * math.log(consts.omega / n)
            - ((n - 1.0) / a) * consts.harmonic_partial)


def _concentrating_shape(eps: float, n: int, grid: RadialGrid):
    """c-independent shape s(r) with u = c^{-1/(n-1)} s; continuity folded in.

    Inner: -((n-1)/alpha) log(1 + b (r/eps)^{n/(n-1)}) + K,
    outer: -(n/alpha) log r, where K = c^{n/(n-1)} + A is fixed by matching
    the two branches at r = R*eps and does not depend on c.
    """
    consts = constants_for(n)
    a = consts.alpha
    R = -math.log(eps)
    r_match = R * eps
    b = (consts.omega / n) ** (1.0 / (n - 1.0))
    p = n / (n - 1.0)
    K = (-(n / a) * math.log(r_match)
         + ((n - 1.0) / a) * math.log1p(b * R ** p))
    r = grid.nodes
    with np.errstate(divide="ignore"):
        inner = -((n - 1.0) / a) * np.log1p(b * (r / eps) ** p) + K
        outer = -(n / a) * np.log(r)
    shape = np.where(r <= r_match, inner, outer)
    shape[-1] = 0.0
    return shape, K, r_match


def concentrating_function(eps: float, n: int, grid: RadialGrid):
    """Build the unit-energy concentrating profile on the given grid.

    Returns (RadialFunction, ConcentratingParams).  c is solved by bisection
    on the discrete energy residual (tolerance 1e-12) over the bracket
    [c_asym/2, 2 c_asym]; the energy is monotone in c on the bracket.
    """
    if not (0.0 < eps < EPS_MAX):
        raise ValueError(f"eps must lie in (0, {EPS_MAX:.6f}), got {eps!r}")
    R = -math.log(eps)
    if R * eps >= 0.5:
        raise ValueError("eps too large: the inner region must fit in r < 1/2")
    _require_resolved(grid, R * eps, f"the matching radius R*eps = {R * eps:g}")

    shape, K, r_match = _concentrating_shape(eps, n, grid)
    shape_energy = dirichlet_energy(
        RadialFunction(grid=grid, values=shape, dim_n=n))
    p = n / (n - 1.0)

    def residual(c):
        return c ** (-p) * shape_energy - 1.0

    c_asym = c_power_expansion(eps, n) ** (1.0 / p)
    lo, hi = 0.5 * c_asym, 2.0 * c_asym
    rlo, rhi = residual(lo), residual(hi)
    if not (rlo > 0.0 > rhi):
        raise RuntimeError(
            f"energy root-find bracket failed for eps={eps:g}: "
            f"residual({lo:g})={rlo:g}, residual({hi:g})={rhi:g}")
    c = 0.5 * (lo + hi)
    for _ in range(200):
        res = residual(c)
        if abs(res) <= ENERGY_BISECTION_TOL:
            break
        if res > 0.0:
            lo = c
        else:
            hi = c
        c = 0.5 * (lo + hi)

    values = shape * c ** (-1.0 / (n - 1.0))
    values[-1] = 0.0
    u = RadialFunction(grid=grid, values=values, dim_n=n)

    A = K - c ** p
    # continuity at the matching radius, by construction; guard anyway
    consts = constants_for(n)
    b = (consts.omega / n) ** (1.0 / (n - 1.0))
    inner_val = c + c ** (-1.0 / (n - 1.0)) * (
        -((n - 1.0) / consts.alpha) * math.log1p(b * R ** p) + A)
    outer_val = c ** (-1.0 / (n - 1.0)) * (-(n / consts.alpha) * math.log(r_match))
    if abs(inner_val - outer_val) > 1e-10 * max(1.0, abs(outer_val)):
        raise RuntimeError("concentrating profile lost continuity at R*eps")
    energy = dirichlet_energy(u)
    if abs(energy - 1.0) > 1e-8:
        raise RuntimeError(f"unit-energy solve failed: energy={energy!r}")

    return u, ConcentratingParams(eps=eps, n=n, R=R, c=c, A=A)


def mountain_pass_function(j: int, n: int, grid: RadialGrid) -> RadialFunction:
    """Concentrating profile at scale eps = 1/j (inner radius log(j)/j)."""
    if j < 8:
        raise ValueError("mountain-pass index j must be >= 8")
    return concentrating_function(1.0 / j, n, grid)[0]


def sharpness_lower_bound(j: float, gamma: float, n: int) -> float:
    """(omega/n) * exp(n (gamma/alpha - 1) log j): the inner-plateau value of
    the functional on the Moser profile, which every supercritical evaluation
    must dominate."""
    consts = constants_for(n)
    return consts.ball_volume * math.exp(
        n * (gamma / consts.alpha - 1.0) * math.log(j))


@dataclass(frozen=True)
class BlowupRow:
    j: float
    value: float
    lower_bound: float
    diverged: bool


def blowup_table(kind: str, gamma: float, alpha: float, n: int,
                 j_list: Sequence[float], count: int = 20000) -> list:
    """Functional values on the Moser sweep next to the analytic lower bound.

    Requires gamma >= alpha_n (the supercritical regime; equality gives the
    constant lower bound |B|).  Each j gets its own log-graded grid so the
    plateau radius 1/j stays resolved.  Divergent rows are kept, flagged.
    """
    consts = constants_for(n)
    if gamma < consts.alpha * (1.0 - 1e-12):
        raise ValueError("blowup_table needs gamma >= alpha_n")
    rows = []
    for j in j_list:
        grid = default_family_grid(1.0 / j, count=count)
        u = moser_function(MoserParams(j=j, n=n), grid)
        spec = FunctionalSpec(kind=kind, n=n, gamma=gamma, alpha=alpha)
        fv = eval_functional(u, spec)
        rows.append(BlowupRow(j=float(j), value=fv.value,
                              lower_bound=sharpness_lower_bound(j, gamma, n),
                              diverged=fv.diverged))
    return rows


def write_blowup_csv(rows: Sequence[BlowupRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "value", "lower_bound", "flag"])
        for row in rows:
            writer.writerow([f"{row.j:.12g}", f"{row.value:.12g}",
                             f"{row.lower_bound:.12g}",
                             "divergent" if row.diverged else "ok"])
