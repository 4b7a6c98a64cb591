import numpy as np
import pytest

from specmult.ouhermite import ou_system
from specmult.products import torus_system
from specmult.spectral import (
    CapacityError,
    CoefficientVector,
    EvaluationError,
    GridFunction,
    MultiplierSpec,
    SpectralSystem,
    apply_multiplier,
    decompose,
    reconstruct,
    spectral_measure,
    tensor,
)

TAU_ORTH = 1e-10


@pytest.fixture(scope="module")
def ou1():
    return ou_system(1, 12)


def unit(k):
    return CoefficientVector({k: 1.0})


def test_grid_function_validation():
    with pytest.raises(ValueError, match="one per grid point"):
        GridFunction([[0.0], [1.0]], [1.0], [1.0, 2.0])
    with pytest.raises(ValueError, match="positive"):
        GridFunction([[0.0]], [0.0], [1.0])


def test_orthonormality_defect_below_tolerance(ou1):
    assert ou1.orthonormality_defect() < TAU_ORTH


def test_decompose_basis_element_gives_unit_vector(ou1):
    f = reconstruct(unit((5,)), ou1)
    c = decompose(f, ou1)
    assert abs(c.get((5,)) - 1.0) < TAU_ORTH
    others = [abs(v) for k, v in c.items() if k != (5,)]
    assert max(others) < TAU_ORTH


def test_decompose_zero(ou1):
    c = decompose(ou1.grid_function(np.zeros(len(ou1.weights))), ou1)
    assert all(v == 0 for _, v in c.items())


def test_decompose_coordinate_function(ou1):
    # x = H_1(x)/sqrt(2) in the normalized basis
    f = ou1.grid_function(ou1.points[:, 0])
    c = decompose(f, ou1)
    assert abs(c.get((1,)) - 1.0 / np.sqrt(2.0)) < TAU_ORTH
    assert max(abs(v) for k, v in c.items() if k != (1,)) < TAU_ORTH


def test_decompose_grid_mismatch(ou1):
    f = GridFunction(np.zeros((4, 1)), np.ones(4), np.ones(4))
    with pytest.raises(ValueError, match="grid mismatch"):
        decompose(f, ou1)


def test_reconstruct_round_trip(ou1):
    c = CoefficientVector({(2,): 1.0, (5,): 3.0})
    back = decompose(reconstruct(c, ou1), ou1)
    assert abs(back.get((2,)) - 1.0) < 1e-10
    assert abs(back.get((5,)) - 3.0) < 1e-10


def test_reconstruct_unknown_index(ou1):
    with pytest.raises(KeyError):
        reconstruct(unit((99,)), ou1)


def test_apply_identity_multiplier(ou1):
    m = MultiplierSpec(1, lambda lam: np.ones(len(np.atleast_2d(lam)), dtype=complex))
    c = CoefficientVector({(0,): 1.0, (3,): 2.0 - 1.0j})
    out = apply_multiplier(m, ou1, c)
    assert out.get((0,)) == 1.0 and out.get((3,)) == 2.0 - 1.0j


def test_apply_projection_multiplier(ou1):
    proj = MultiplierSpec(
        1, lambda lam: (np.atleast_2d(lam)[:, 0] == 3.0).astype(complex), name="P_3"
    )
    c = CoefficientVector({(3,): 1.0, (2,): 1.0})
    out = apply_multiplier(proj, ou1, c)
    assert out.get((3,)) == 1.0 and out.get((2,)) == 0.0
    # idempotence is exact: the indicator squares to itself
    twice = apply_multiplier(proj, ou1, out)
    assert all(twice.get(k) == out.get(k) for k in ou1.basis_index_set)


def test_apply_eigenvalue_multiplier(ou1):
    m = MultiplierSpec(1, lambda lam: np.atleast_2d(lam)[:, 0].astype(complex))
    out = apply_multiplier(m, ou1, unit((4,)))
    assert out.get((4,)) == 4.0


def test_apply_nonfinite_names_offending_point(ou1):
    def inv(lam):
        with np.errstate(divide="ignore"):
            return 1.0 / np.atleast_2d(lam)[:, 0]

    m = MultiplierSpec(1, inv, name="inv")
    with pytest.raises(EvaluationError, match=r"inv.*\(0\.0,\).*zero eigenvalue"):
        apply_multiplier(m, ou1, unit((0,)))


def test_apply_arity_mismatch(ou1):
    m = MultiplierSpec(2, lambda lam: np.ones(len(np.atleast_2d(lam)), dtype=complex))
    with pytest.raises(ValueError, match="arity"):
        apply_multiplier(m, ou1, unit((1,)))


def test_spectral_measure_single_atom(ou1):
    assert spectral_measure(unit((2,)), ou1) == [((2.0,), 1.0)]


def test_spectral_measure_aggregates_equal_eigenvalues():
    sys2 = ou_system(2, 4)
    amp = 1.0 / np.sqrt(2.0)
    c = CoefficientVector({(1, 0): amp, (0, 1): amp})
    atoms = spectral_measure(c, sys2)
    assert len(atoms) == 1
    lam, mass = atoms[0]
    assert lam == (1.0,) and abs(mass - 1.0) < 1e-15


def test_spectral_measure_four_atoms(ou1):
    c = CoefficientVector({(k,): 0.5 for k in range(4)})
    atoms = spectral_measure(c, ou1)
    assert [lam for lam, _ in atoms] == [(0.0,), (1.0,), (2.0,), (3.0,)]
    assert all(abs(mass - 0.25) < 1e-15 for _, mass in atoms)
    assert abs(sum(mass for _, mass in atoms) - c.norm() ** 2) < 1e-15


def test_tensor_of_singletons():
    def single(lam_value):
        return SpectralSystem(
            1,
            [(0,)],
            [lambda k, v=lam_value: v],
            lambda k, pts: np.ones(len(np.atleast_2d(pts))),
            [[0.0]],
            [1.0],
        )

    prod = tensor(single(1.0), single(2.0))
    assert len(prod) == 1 and prod.dimension == 2
    assert tuple(prod.eigenvalues((0, 0))) == (1.0, 2.0)


def test_tensor_ou_ou_counting():
    t = tensor(ou_system(1, 5), ou_system(1, 5))
    assert len(t) == 36
    assert tuple(t.eigenvalues((3, 4))) == (3.0, 4.0)
    assert t.orthonormality_defect() < TAU_ORTH


def test_tensor_capacity_error():
    with pytest.raises(CapacityError, match="36 > 10"):
        tensor(ou_system(1, 5), ou_system(1, 5), max_basis=10)


def test_tensor_parseval_product_function():
    t = tensor(ou_system(1, 6), ou_system(1, 6))
    c = CoefficientVector({(2, 3): 1.5, (0, 1): -0.5j})
    f = reconstruct(c, t)
    assert abs(f.norm_lp(2) ** 2 - c.norm() ** 2) < 1e-10


def test_parseval_band_limited(ou1):
    rng = np.random.default_rng(42)
    c = ou1.random_coefficients(rng)
    f = reconstruct(c, ou1)
    assert abs(decompose(f, ou1).norm() - f.norm_lp(2)) < TAU_ORTH


def test_contraction_by_sup_norm(ou1):
    rng = np.random.default_rng(1)
    c = ou1.random_coefficients(rng)
    m = MultiplierSpec(1, lambda lam: np.exp(-np.atleast_2d(lam)[:, 0]).astype(complex))
    sup = max(abs(m(ou1.eigenvalues(k)[None, :])[0]) for k in ou1.basis_index_set)
    out = apply_multiplier(m, ou1, c)
    assert out.norm() <= sup * c.norm() + 1e-15


def test_riesz_identity_on_tensor_system():
    t = tensor(ou_system(1, 8), torus_system(2, 32))
    lam_sum = lambda lam: np.atleast_2d(lam).sum(axis=1)
    first = MultiplierSpec(2, lambda lam: (np.atleast_2d(lam)[:, 0] / lam_sum(lam)).astype(complex))
    second = MultiplierSpec(2, lambda lam: (np.atleast_2d(lam)[:, 1] / lam_sum(lam)).astype(complex))
    rng = np.random.default_rng(3)
    c = t.random_coefficients(rng)
    a = apply_multiplier(first, t, c)
    b = apply_multiplier(second, t, c)
    resid = max(abs(a.get(k) + b.get(k) - c.get(k)) for k in t.basis_index_set)
    assert resid < 1e-12


def test_diagonal_multipliers_commute(ou1):
    # power-of-two multiplier values keep the float products associative,
    # so operator commutation can be asserted bit-exactly
    m1 = MultiplierSpec(1, lambda lam: 2.0 ** -np.atleast_2d(lam)[:, 0] + 0j)
    m2 = MultiplierSpec(
        1, lambda lam: np.where(np.atleast_2d(lam)[:, 0] % 2 == 0, 1.0, 0.5).astype(complex)
    )
    c = ou1.random_coefficients(np.random.default_rng(7))
    ab = apply_multiplier(m1, ou1, apply_multiplier(m2, ou1, c))
    ba = apply_multiplier(m2, ou1, apply_multiplier(m1, ou1, c))
    assert all(ab.get(k) == ba.get(k) for k in ou1.basis_index_set)


def test_random_coefficients_atl_safe(ou1):
    c = ou1.random_coefficients(np.random.default_rng(0), atl_safe=True)
    assert (0,) not in dict(c.items())
    assert all(ou1.eigenvalues(k).min() > 0 for k, _ in c.items())


def test_multi_index_entries_validated():
    with pytest.raises(ValueError, match=">= 0"):
        SpectralSystem(
            1,
            [(-1,)],
            [lambda k: 1.0],
            lambda k, pts: np.ones(len(np.atleast_2d(pts))),
            [[0.0]],
            [1.0],
        )
