"""Finite joint spectral calculus on truncated eigen-systems.

A :class:`SpectralSystem` bundles a finite orthonormal basis, a d-vector of
eigenvalue maps and a quadrature rule for the underlying measure.  Joint
multiplier operators m(L_1, ..., L_d) are diagonal in the basis, so applying
one is coefficient-wise multiplication by m evaluated on the joint spectrum.

Everything here is exact linear algebra on finite sums; the only analysis
lives in the quadrature rule a system is built with.  The L^2 domain
condition for m(L) is vacuous for finite systems and is not modeled.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

__all__ = [
    "MultiIndex",
    "GridFunction",
    "CoefficientVector",
    "MultiplierSpec",
    "SpectralSystem",
    "EvaluationError",
    "CapacityError",
    "decompose",
    "reconstruct",
    "apply_multiplier",
    "spectral_measure",
    "tensor",
]

#: Multi-indices are plain tuples of non-negative ints.
MultiIndex = tuple

TAU_ORTH = 1e-10  # orthonormality tolerance of shipped quadrature rules


class EvaluationError(ValueError):
    """A multiplier evaluated non-finite on a spectrum point."""


class CapacityError(ValueError):
    """A constructed basis would exceed the configured size cap."""


@dataclass(frozen=True)
class GridFunction:
    """A function sampled on a quadrature grid.

    Parameters
    ----------
    points : (n, dim) ndarray
        Grid nodes.
    weights : (n,) ndarray
        Positive quadrature weights of the underlying measure.
    values : (n,) ndarray
        Samples; real or complex.
    """

    points: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[0] == 1 and np.asarray(self.weights).size != 1:
            pts = pts.T
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values))
        if self.weights.ndim != 1 or len(self.weights) != len(self.points):
            raise ValueError("weights must be one per grid point")
        if self.values.shape != self.weights.shape:
            raise ValueError("values must be one per grid point")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")

    def norm_lp(self, p: float) -> float:
        """L^p norm with respect to the grid measure (p = inf allowed)."""
        a = np.abs(self.values)
        if np.isinf(p):
            return float(a.max(initial=0.0))
        if p <= 0:
            raise ValueError("p must be positive")
        return float((self.weights @ a**p) ** (1.0 / p))

    def inner(self, other: "GridFunction") -> complex:
        return complex(np.sum(self.weights * self.values * np.conj(other.values)))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.points, self.weights, values)


@dataclass(frozen=True)
class CoefficientVector:
    """Spectral coefficients, a finite map multi-index -> complex."""

    coeffs: Mapping[MultiIndex, complex]

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", {tuple(k): complex(v) for k, v in dict(self.coeffs).items()}
        )

    def get(self, k: MultiIndex) -> complex:
        return self.coeffs.get(tuple(k), 0.0 + 0.0j)

    def items(self):
        return self.coeffs.items()

    def norm(self) -> float:
        if not self.coeffs:
            return 0.0
        return float(np.linalg.norm(np.fromiter(self.coeffs.values(), dtype=complex)))

    def __add__(self, other: "CoefficientVector") -> "CoefficientVector":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return CoefficientVector(out)

    def __sub__(self, other: "CoefficientVector") -> "CoefficientVector":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) - v
        return CoefficientVector(out)

    def __len__(self) -> int:
        return len(self.coeffs)


@dataclass(frozen=True)
class MultiplierSpec:
    """A scalar multiplier function on (0, inf)^arity.

    ``evaluate`` is vectorized: it maps an (n, arity) array of spectral points
    to an (n,) complex array.  ``partials`` optionally maps a differentiation
    multi-order gamma to the analytic partial derivative (same calling
    convention); absent orders fall back to central differences.
    ``sector_evaluate`` accepts complex arguments for rotated rays.
    """

    arity: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    partials: Mapping[MultiIndex, Callable[[np.ndarray], np.ndarray]] | None = None
    sector_evaluate: Callable[[np.ndarray], np.ndarray] | None = None
    sup_norm_hint: float | None = None
    name: str = ""

    def __call__(self, lam: np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        if lam.ndim == 1:
            if self.arity == 1 and lam.shape != (1,):
                lam = lam[:, None]  # a batch of scalar arguments
            else:
                lam = lam[None, :]
        if lam.shape[-1] != self.arity:
            raise ValueError(f"multiplier arity {self.arity}, got points of length {lam.shape[-1]}")
        return np.asarray(self.evaluate(lam), dtype=complex).reshape(lam.shape[:-1])


class SpectralSystem:
    """Truncated joint eigen-system of d commuting operators.

    Parameters
    ----------
    dimension : int
        Number of eigenvalue maps d (= multiplier arity).
    basis_index_set : sequence of multi-indices
        All of one common length (``index_length``), not necessarily d.
    eigenvalue_maps : sequence of callables
        d maps multi-index -> eigenvalue >= 0.
    basis_evaluator : callable (multi-index, (n, space_dim) points) -> (n,) values
    points, weights : quadrature rule for the underlying measure
    atl : bool, optional
        "Away from the low end": no index carries an all-zero eigenvalue
        vector.  Computed from the spectrum when omitted.
    """

    def __init__(
        self,
        dimension: int,
        basis_index_set: Sequence[MultiIndex],
        eigenvalue_maps: Sequence[Callable[[MultiIndex], float]],
        basis_evaluator: Callable[[MultiIndex, np.ndarray], np.ndarray],
        points: np.ndarray,
        weights: np.ndarray,
        atl: bool | None = None,
        name: str = "",
        basis_matrix_builder: Callable[[], np.ndarray] | None = None,
    ):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        if len(eigenvalue_maps) != dimension:
            raise ValueError("need one eigenvalue map per dimension")
        self.dimension = int(dimension)
        self.basis_index_set = [tuple(int(e) for e in k) for k in basis_index_set]
        if not self.basis_index_set:
            raise ValueError("basis_index_set must be non-empty")
        lengths = {len(k) for k in self.basis_index_set}
        if len(lengths) != 1:
            raise ValueError("all multi-indices must share one length")
        self.index_length = lengths.pop()
        if any(e < 0 for k in self.basis_index_set for e in k):
            raise ValueError("multi-index entries must be >= 0")
        self.eigenvalue_maps = tuple(eigenvalue_maps)
        self.basis_evaluator = basis_evaluator
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.points.shape[0] == 1 and np.asarray(weights).size > 1:
            self.points = self.points.T
        self.weights = np.asarray(weights, dtype=float)
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")
        self.space_dim = self.points.shape[1]
        self.name = name

        lam = np.empty((len(self.basis_index_set), dimension))
        for i, k in enumerate(self.basis_index_set):
            for j, emap in enumerate(self.eigenvalue_maps):
                lam[i, j] = emap(k)
        if not np.all(np.isfinite(lam)) or np.any(lam < 0):
            raise ValueError("eigenvalues must be finite and >= 0")
        self._lam = lam
        self.atl = bool(np.all(lam.max(axis=1) > 0)) if atl is None else bool(atl)

        self._position = {k: i for i, k in enumerate(self.basis_index_set)}
        self._basis_matrix: np.ndarray | None = None
        self._basis_matrix_builder = basis_matrix_builder

    # -- derived structure ------------------------------------------------

    def __len__(self) -> int:
        return len(self.basis_index_set)

    def position(self, k: MultiIndex) -> int:
        k = tuple(k)
        if k not in self._position:
            raise KeyError(f"index {k} not in basis")
        return self._position[k]

    def eigenvalues(self, k: MultiIndex) -> np.ndarray:
        """The d-vector (lambda_1(k), ..., lambda_d(k))."""
        return self._lam[self.position(k)].copy()

    def eigenvalue_matrix(self) -> np.ndarray:
        """(n_basis, d) array of eigenvalue vectors in basis order."""
        return self._lam.copy()

    def basis_matrix(self) -> np.ndarray:
        """(n_basis, n_points) matrix of basis values on the grid (cached)."""
        if self._basis_matrix is None:
            if self._basis_matrix_builder is not None:
                B = np.asarray(self._basis_matrix_builder())
            else:
                B = np.empty((len(self), len(self.weights)))
                for i, k in enumerate(self.basis_index_set):
                    B[i] = self.basis_evaluator(k, self.points)
            if B.shape != (len(self), len(self.weights)):
                raise ValueError("basis matrix has wrong shape")
            self._basis_matrix = B
        return self._basis_matrix

    def orthonormality_defect(self) -> float:
        """max |Gram - I| under the quadrature inner product."""
        B = self.basis_matrix()
        gram = (B * self.weights) @ B.T
        return float(np.abs(gram - np.eye(len(self))).max())

    def grid_function(self, values: np.ndarray) -> GridFunction:
        return GridFunction(self.points, self.weights, values)

    def random_coefficients(self, rng: np.random.Generator, *, atl_safe: bool = False) -> CoefficientVector:
        """i.i.d. standard-normal coefficients on the basis index set.

        With ``atl_safe`` the coefficients vanish wherever any per-axis
        eigenvalue is zero.
        """
        draws = rng.standard_normal(len(self))
        out = {}
        for i, k in enumerate(self.basis_index_set):
            if atl_safe and np.any(self._lam[i] == 0.0):
                continue
            out[k] = complex(draws[i])
        return CoefficientVector(out)


# -- operations -----------------------------------------------------------


def decompose(f: GridFunction, sys: SpectralSystem) -> CoefficientVector:
    """Quadrature inner products of f with every basis element."""
    if f.values.shape != sys.weights.shape or f.points.shape != sys.points.shape:
        raise ValueError("grid mismatch: f is not sampled on the system quadrature")
    c = sys.basis_matrix() @ (sys.weights * f.values)
    return CoefficientVector(dict(zip(sys.basis_index_set, np.asarray(c, dtype=complex))))


def reconstruct(c: CoefficientVector, sys: SpectralSystem) -> GridFunction:
    """Sum of c_k * basis_k on the system grid."""
    vec = np.zeros(len(sys), dtype=complex)
    for k, v in c.items():
        vec[sys.position(k)] = v  # KeyError for unknown index
    values = vec @ sys.basis_matrix()
    if np.max(np.abs(values.imag), initial=0.0) == 0.0:
        values = values.real
    return sys.grid_function(values)


def apply_multiplier(m: MultiplierSpec, sys: SpectralSystem, c: CoefficientVector) -> CoefficientVector:
    """Coefficient-wise multiplication by m on the joint spectrum."""
    if m.arity != sys.dimension:
        raise ValueError(f"multiplier arity {m.arity} != system dimension {sys.dimension}")
    keys = list(c.coeffs)
    if not keys:
        return CoefficientVector({})
    lam = np.array([sys.eigenvalues(k) for k in keys])
    vals = m(lam)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        hint = ""
        if not sys.atl and np.all(lam[i] == 0.0):
            hint = " (zero eigenvalue vector on a non-ATL system)"
        point = tuple(float(v) for v in lam[i])
        raise EvaluationError(
            f"multiplier {m.name or 'm'} is not finite at lambda = {point}{hint}"
        )
    return CoefficientVector({k: c.coeffs[k] * vals[i] for i, k in enumerate(keys)})


def spectral_measure(c: CoefficientVector, sys: SpectralSystem) -> list[tuple[tuple, float]]:
    """The discrete measure sum |c_k|^2 delta_{lambda(k)}, aggregated by atom."""
    masses: dict[tuple, float] = {}
    for k, v in c.items():
        lam = tuple(sys.eigenvalues(k))
        masses[lam] = masses.get(lam, 0.0) + abs(v) ** 2
    return sorted(masses.items())


def tensor(sys_a: SpectralSystem, sys_b: SpectralSystem, max_basis: int = 100_000) -> SpectralSystem:
    """Tensor product of two systems on the product grid.

    Indices concatenate, eigenvalue maps concatenate (dimension adds), the
    basis evaluator is the product, the quadrature is the product rule.
    """
    n = len(sys_a) * len(sys_b)
    if n > max_basis:
        raise CapacityError(f"tensor basis would have {n} > {max_basis} elements")
    ia = sys_a.index_length
    indices = [ka + kb for ka in sys_a.basis_index_set for kb in sys_b.basis_index_set]

    def map_for(j: int):
        if j < sys_a.dimension:
            return lambda k, _m=sys_a.eigenvalue_maps[j]: _m(k[:ia])
        return lambda k, _m=sys_b.eigenvalue_maps[j - sys_a.dimension]: _m(k[ia:])

    maps = [map_for(j) for j in range(sys_a.dimension + sys_b.dimension)]
    sa = sys_a.space_dim

    def evaluator(k, pts):
        pts = np.atleast_2d(pts)
        return sys_a.basis_evaluator(k[:ia], pts[:, :sa]) * sys_b.basis_evaluator(k[ia:], pts[:, sa:])

    na, nb = len(sys_a.weights), len(sys_b.weights)
    pts = np.hstack(
        [np.repeat(sys_a.points, nb, axis=0), np.tile(sys_b.points, (na, 1))]
    )
    wts = np.kron(sys_a.weights, sys_b.weights)
    return SpectralSystem(
        sys_a.dimension + sys_b.dimension,
        indices,
        maps,
        evaluator,
        pts,
        wts,
        name=f"{sys_a.name}(x){sys_b.name}",
        basis_matrix_builder=lambda: np.kron(sys_a.basis_matrix(), sys_b.basis_matrix()),
    )
