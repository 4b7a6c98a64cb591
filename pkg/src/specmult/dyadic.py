"""Dyadic analysis on one-dimensional model windows.

Generation averages, the dyadic maximal function, a fibered
Calderon-Zygmund decomposition by stopping-time cube selection, weak-L1
quasinorms, and atomic H1 bookkeeping.

The base space is a half-open interval carrying a uniform grid whose
size is a power of two, so every dyadic cube is an exact slice of grid
points.  Fibered data is an array whose last axis runs over the window
grid; leading axes index fibers and are never mixed by any operation
here.  A plain ``GridFunction`` is accepted wherever a single fiber is
meant and the result is returned in kind.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .spectral import GridFunction

__all__ = [
    "Atom",
    "AtomValidationError",
    "CZBad",
    "CZResult",
    "DyadicCube",
    "DyadicSystem",
    "cz_decompose",
    "dq_maximal",
    "dyadic_average",
    "dyadic_maximal",
    "dyadic_system",
    "l1_h1_norm",
    "validate_atom",
    "weak_quasinorm",
]


class AtomValidationError(ValueError):
    """An atom violates one of its defining clauses."""


@dataclass(frozen=True)
class DyadicCube:
    """One dyadic cube: a half-open subinterval holding a grid slice."""

    level: int
    index: int
    lo: float
    hi: float
    measure: float
    start: int
    stop: int

    @property
    def slice(self) -> slice:
        return slice(self.start, self.stop)

    def __repr__(self) -> str:
        return f"DyadicCube(level={self.level}, [{self.lo:g}, {self.hi:g}))"


@dataclass(frozen=True)
class DyadicSystem:
    """Dyadic cubes over a uniform midpoint grid on [lo, hi).

    Level l splits the window into 2**l half-open cubes; the finest
    level keeps at least four grid points per cube so cube averages
    stay meaningful.  Halving gives doubling constant 2 exactly.
    """

    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.hi <= self.lo:
            raise ValueError("window must have positive length")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError("grid size must be a power of two, at least 8")

    @property
    def l_max(self) -> int:
        return self.n.bit_length() - 1 - 2

    @property
    def levels(self) -> range:
        return range(0, self.l_max + 1)

    @property
    def doubling_constant(self) -> float:
        return 2.0

    @property
    def points(self) -> np.ndarray:
        h = (self.hi - self.lo) / self.n
        return self.lo + h * (np.arange(self.n) + 0.5)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n, (self.hi - self.lo) / self.n)

    def check_level(self, l: int) -> None:
        if l not in self.levels:
            raise ValueError(f"level {l} outside available range 0..{self.l_max}")

    def cube(self, level: int, index: int) -> DyadicCube:
        self.check_level(level)
        count = 1 << level
        if not 0 <= index < count:
            raise ValueError(f"cube index {index} outside level {level}")
        width = (self.hi - self.lo) / count
        pts = self.n >> level
        return DyadicCube(
            level=level,
            index=index,
            lo=self.lo + index * width,
            hi=self.lo + (index + 1) * width,
            measure=width,
            start=index * pts,
            stop=(index + 1) * pts,
        )

    def cubes(self, level: int) -> tuple[DyadicCube, ...]:
        self.check_level(level)
        return tuple(self.cube(level, k) for k in range(1 << level))

    def grid_function(self, values: np.ndarray) -> GridFunction:
        return GridFunction(self.points[:, None], self.weights, np.asarray(values))


def dyadic_system(n: int = 256, window: tuple[float, float] = (0.0, 1.0)) -> DyadicSystem:
    return DyadicSystem(lo=float(window[0]), hi=float(window[1]), n=int(n))


def _unpack(f) -> tuple[np.ndarray, bool]:
    """Return (array with grid on the last axis, came-as-GridFunction)."""
    if isinstance(f, GridFunction):
        return np.asarray(f.values), True
    return np.asarray(f), False


def _repack(values: np.ndarray, template, was_grid: bool):
    if was_grid:
        return template.with_values(values)
    return values


def dyadic_average(f, l: int, system: DyadicSystem):
    """Generation-l conditional expectation: the cube average, per fiber.

    Constant on each level-l cube; uniform weights make the mu-average
    a plain mean over the cube's grid slice.
    """
    system.check_level(l)
    arr, was_grid = _unpack(f)
    if arr.shape[-1] != system.n:
        raise ValueError("last axis of f must match the system grid")
    pts = system.n >> l
    block = arr.reshape(arr.shape[:-1] + (1 << l, pts)).mean(axis=-1)
    out = np.repeat(block, pts, axis=-1)
    return _repack(out, f, was_grid)


def dyadic_maximal(f, system: DyadicSystem):
    """Pointwise sup over levels of the averages of |f|."""
    arr, was_grid = _unpack(f)
    a = np.abs(arr)
    out = np.zeros_like(a, dtype=float)
    for l in system.levels:
        np.maximum(out, dyadic_average(a, l, system), out=out)
    return _repack(out, f, was_grid)


def dq_maximal(f, q: float, system: DyadicSystem):
    """The q-th power variant (D|f|^q)^(1/q); q = 1 is the maximal function."""
    if q < 1:
        raise ValueError("q must be at least 1")
    arr, was_grid = _unpack(f)
    out = dyadic_maximal(np.abs(arr) ** q, system) ** (1.0 / q)
    return _repack(out, f, was_grid)


@dataclass(frozen=True)
class CZBad:
    """One bad part: cube, the fibers that selected it, and b on them.

    ``values[i]`` holds b restricted to the cube's grid slice for fiber
    ``fibers[i]``; ``averages[i]`` is the stopping-time cube average of
    f there, so f = averages + values on the support.
    """

    cube: DyadicCube
    fibers: np.ndarray
    values: np.ndarray
    averages: np.ndarray

    def expand(self, n_fibers: int, n_grid: int) -> np.ndarray:
        out = np.zeros((n_fibers, n_grid))
        out[self.fibers[:, None], np.arange(self.cube.start, self.cube.stop)] = self.values
        return out


@dataclass(frozen=True)
class CZResult:
    """Decomposition f = good + sum of bad parts at a threshold."""

    good: object
    bads: tuple[CZBad, ...]
    threshold: float
    system: DyadicSystem
    n_fibers: int

    def selection_mask(self) -> np.ndarray:
        """Union of the supports S_j as a (fibers, grid) boolean mask."""
        mask = np.zeros((self.n_fibers, self.system.n), dtype=bool)
        for bad in self.bads:
            mask[bad.fibers[:, None], np.arange(bad.cube.start, bad.cube.stop)] = True
        return mask

    def bad_sum(self) -> np.ndarray:
        total = np.zeros((self.n_fibers, self.system.n))
        for bad in self.bads:
            total += bad.expand(self.n_fibers, self.system.n)
        return total


def cz_decompose(f, s: float, system: DyadicSystem) -> CZResult:
    """Stopping-time Calderon-Zygmund split of a non-negative f.

    Per fiber, walks levels coarse to fine and selects the maximal
    cubes whose average first exceeds s (strictly; equality leaves a
    cube unselected).  The good part replaces f by the cube average on
    each selected cube; each bad part is f minus that average there,
    hence mean-zero on its cube.

    Parameters
    ----------
    f : array or GridFunction
        Non-negative samples, grid on the last axis; leading axes are
        fibers.
    s : float
        Positive stopping threshold.
    system : DyadicSystem

    Returns
    -------
    CZResult
        With ``good`` matching the input container and bad parts merged
        by cube identity across fibers.
    """
    if s <= 0:
        raise ValueError("threshold s must be positive")
    arr, was_grid = _unpack(f)
    if arr.shape[-1] != system.n:
        raise ValueError("last axis of f must match the system grid")
    if not np.all(np.isfinite(arr)):
        raise ValueError("f must be finite")
    if np.any(arr < 0):
        raise ValueError("f must be non-negative")

    flat = arr.reshape(-1, system.n).astype(float)
    nf = flat.shape[0]
    good = flat.copy()
    bads: list[CZBad] = []
    covered = np.zeros((nf, 1), dtype=bool)
    for l in system.levels:
        pts = system.n >> l
        avg = flat.reshape(nf, 1 << l, pts).mean(axis=-1)
        if l > 0:
            covered = np.repeat(covered, 2, axis=1)
        selected = (avg > s) & ~covered
        covered |= selected
        for k in np.nonzero(selected.any(axis=0))[0]:
            fib = np.nonzero(selected[:, k])[0]
            cube = system.cube(l, int(k))
            a = avg[fib, k]
            b = flat[fib, cube.start : cube.stop] - a[:, None]
            good[fib, cube.start : cube.stop] = a[:, None]
            bads.append(CZBad(cube=cube, fibers=fib, values=b, averages=a))

    good_out = _repack(good.reshape(arr.shape), f, was_grid)
    return CZResult(
        good=good_out, bads=tuple(bads), threshold=float(s), system=system, n_fibers=nf
    )


def weak_quasinorm(f, weights=None) -> float:
    """The L^{1,inf} quasinorm sup_s s * measure{|f| > s} on a grid.

    The sup over continuous s of the piecewise-constant distribution
    function is approached just below each attained value, so it equals
    the max over distinct values v > 0 of v * measure{|f| >= v}.
    """
    if isinstance(f, GridFunction):
        values, weights = f.values, f.weights
    else:
        values = np.asarray(f)
        if weights is None:
            raise ValueError("weights are required unless f is a GridFunction")
    a = np.abs(np.asarray(values, dtype=float).ravel())
    w = np.asarray(weights, dtype=float).ravel()
    if a.shape != w.shape:
        raise ValueError("weights must be one per value")
    order = np.argsort(a)[::-1]
    a = a[order]
    cum = np.cumsum(w[order])
    positive = a > 0
    if not positive.any():
        return 0.0
    return float(np.max(a[positive] * cum[positive]))


@dataclass(frozen=True)
class Atom:
    """Candidate H1 atom: values on a grid, tied to a ball.

    The defining clauses (checked by ``validate_atom``): support inside
    the ball, sup bound 1/mu(B), and zero mean against the grid weights.
    """

    center: float
    radius: float
    values: GridFunction

    def ball_mask(self) -> np.ndarray:
        pts = self.values.points
        dist = np.linalg.norm(pts - np.atleast_1d(self.center), axis=-1)
        return dist <= self.radius

    def ball_measure(self) -> float:
        return float(self.values.weights[self.ball_mask()].sum())


def validate_atom(atom: Atom, tol: float = 1e-10) -> None:
    """Raise AtomValidationError naming every violated clause."""
    v = np.asarray(atom.values.values, dtype=float)
    w = atom.values.weights
    mask = atom.ball_mask()
    mu_b = atom.ball_measure()
    if mu_b <= 0:
        raise AtomValidationError("support: the ball contains no grid mass")
    sup = float(np.max(np.abs(v), initial=0.0))
    failures = []
    if np.any(np.abs(v[~mask]) > tol * max(sup, 1.0)):
        failures.append("support")
    if sup > (1.0 + tol) / mu_b:
        failures.append("size")
    if abs(float(w @ v)) > tol * max(sup * mu_b, 1e-30):
        failures.append("cancellation")
    if failures:
        raise AtomValidationError("atom violates: " + ", ".join(failures))


def l1_h1_norm(
    terms: Sequence[tuple[object, Atom]],
    x_weights: np.ndarray | None = None,
    validate: bool = True,
) -> float:
    """Atomic upper bound for the L1(gamma)-of-H1 norm.

    Each term is (coefficient, atom); a scalar coefficient means
    constant in the fiber variable.  With no fiber weights the fiber
    measure is taken to be a probability measure, so the bound is just
    the sum of |coefficient|.
    """
    if x_weights is not None:
        wx = np.asarray(x_weights, dtype=float)
        if np.any(wx < 0):
            raise ValueError("fiber weights must be non-negative")
    total = 0.0
    for coef, atom in terms:
        if validate:
            validate_atom(atom)
        c = np.abs(np.asarray(coef, dtype=complex))
        if x_weights is None:
            if c.ndim != 0:
                raise ValueError("fiber-dependent coefficients need x_weights")
            total += float(c)
        else:
            total += float(wx @ np.broadcast_to(c, wx.shape))
    return total
