import numpy as np
import pytest
from numpy.polynomial.hermite import hermval
from scipy import integrate
from scipy.special import factorial

from heisweyl.heisenberg import GroupElement, PhasePoint, multiply
from heisweyl.schrodinger import (
    GridFunction2D, HermiteBasisSpec, basis_vector, fourier_wigner, fourier_wigner_grid, gram,
    hermite_eval, hermite_function, hermite_table, projector, rank_one, rho_matrix,
    unitarity_leakage, weyl_transform,
)


def hermite_reference(k, t):
    """h_k from the physicists' polynomial, independent of the recurrence."""
    c = np.zeros(k + 1)
    c[k] = 1
    x = np.sqrt(2 * np.pi) * np.asarray(t)
    norm = (2 * np.pi) ** 0.25 / np.sqrt(2.0**k * factorial(k) * np.sqrt(np.pi))
    return norm * hermval(x, c) * np.exp(-x * x / 2)


def test_hermite_values(hspec16):
    assert hermite_eval(0, 0.0, hspec16) == pytest.approx(2**0.25, abs=1e-15)
    assert hermite_eval(1, 0.0, hspec16) == 0.0
    t = np.linspace(-3, 3, 41)
    for k in range(12):
        assert np.allclose(hermite_eval(k, t, hspec16), hermite_reference(k, t), atol=1e-12)


def test_hermite_index_rejected(hspec16):
    with pytest.raises(ValueError):
        hermite_eval(16, 0.0, hspec16)


def test_tail_rule(hspec64):
    edge = hermite_table(64, np.array([hspec64.T, -hspec64.T]))
    assert np.abs(edge).max() < 1e-14


def test_quadrature_orthonormality(hspec16):
    fine = hspec16.refined()
    G1, G2 = gram(hspec16), gram(fine)
    assert np.abs(G1 - np.eye(16)).max() < 1e-10
    assert np.abs(G1 - G2).max() < 1e-12


def test_rho_central_and_identity(hspec16):
    z = np.exp(0.7j)
    assert np.array_equal(rho_matrix(GroupElement(0, 0, z), hspec16), z * np.eye(16))
    assert np.array_equal(rho_matrix(GroupElement(0, 0), hspec16), np.eye(16))


@pytest.mark.parametrize("j,k", [(0, 0), (1, 3), (4, 2)])
def test_rho_entries_against_direct_integral(hspec16, j, k):
    x, y = 0.6, -0.35

    def integrand(t, part):
        v = np.exp(1j * np.pi * (x * y + 2 * y * t)) * hermite_reference(k, t + x) * hermite_reference(j, t)
        return v.real if part == 0 else v.imag

    ref = complex(integrate.quad(integrand, -8, 8, args=(0,), limit=200)[0],
                  integrate.quad(integrand, -8, 8, args=(1,), limit=200)[0])
    assert rho_matrix(GroupElement(x, y), hspec16)[j, k] == pytest.approx(ref, abs=1e-10)


def test_rho_product_refines_with_dimension():
    g, g2 = GroupElement(0.7, -0.4), GroupElement(-0.3, 0.9, np.exp(0.3j))
    errors = []
    for D in (8, 16, 32):
        spec = HermiteBasisSpec.for_dimension(D)
        diff = rho_matrix(g, spec) @ rho_matrix(g2, spec) - rho_matrix(multiply(g, g2), spec)
        errors.append(np.abs(diff[:8, :8]).max())
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-9


def test_unitarity_leakage_shrinks():
    g = GroupElement(0.8, 0.5)
    leak = [unitarity_leakage(g, HermiteBasisSpec.for_dimension(D)) for D in (16, 24, 32)]
    assert leak[0] > leak[1] > leak[2]


def test_fourier_wigner_gaussian_closed_form(hspec64):
    X = projector(1, 64)
    assert fourier_wigner(X, PhasePoint(0, 0), hspec64) == pytest.approx(1, abs=1e-14)
    xs = np.linspace(-2, 2, 9)
    grid = GridFunction2D(PhasePoint(-2.25, -2.25), 0.5, 0.5, np.zeros((9, 9)))
    a = fourier_wigner_grid(X, grid, hspec64)
    xx, yy = grid.mesh()
    assert np.allclose(grid.xs, xs)
    mask = xx**2 + yy**2 <= 4
    assert np.abs(a.samples - np.exp(-np.pi * (xx**2 + yy**2) / 2))[mask].max() < 1e-8


def test_fourier_wigner_against_direct_integral(hspec64):
    x, y = 1.1, -0.7

    def integrand(t, part):
        v = np.exp(-1j * np.pi * (x * y + 2 * y * t)) * hermite_reference(0, t + x) * hermite_reference(0, t)
        return v.real if part == 0 else v.imag

    ref = complex(integrate.quad(integrand, -10, 10, args=(0,), epsabs=1e-14, limit=400)[0],
                  integrate.quad(integrand, -10, 10, args=(1,), epsabs=1e-14, limit=400)[0])
    assert ref == pytest.approx(np.exp(-np.pi * (x * x + y * y) / 2), abs=1e-12)
    assert fourier_wigner(projector(1, 64), PhasePoint(x, y), hspec64) == pytest.approx(ref, abs=1e-12)


def test_fourier_wigner_orthogonal_pair(hspec16):
    X = rank_one(basis_vector(0, 16), basis_vector(1, 16))
    assert abs(fourier_wigner(X, PhasePoint(0, 0), hspec16)) < 1e-14


def test_fourier_wigner_linear(hspec16, rng):
    A = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    B = rng.normal(size=(16, 16))
    w = PhasePoint(0.3, 0.8)
    lhs = fourier_wigner(2 * A - 1j * B, w, hspec16)
    rhs = 2 * fourier_wigner(A, w, hspec16) - 1j * fourier_wigner(B, w, hspec16)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_weyl_transform_of_zero(hspec16):
    assert not np.any(weyl_transform(GridFunction2D.window(4, 16), hspec16))


def test_weyl_transform_of_gaussian(hspec32):
    grid = GridFunction2D.window(4, 64)
    xx, yy = grid.mesh()
    W = weyl_transform(grid.with_samples(np.exp(-np.pi * (xx**2 + yy**2) / 2)), hspec32)
    assert np.abs(W - projector(1, 32)).max() < 1e-10


def test_weyl_transform_linear(hspec16, rng):
    grid = GridFunction2D.window(3, 24)
    f = rng.normal(size=grid.shape)
    g = rng.normal(size=grid.shape) * 1j
    lhs = weyl_transform(grid.with_samples(f + 3 * g), hspec16)
    rhs = weyl_transform(grid.with_samples(f), hspec16) + 3 * weyl_transform(grid.with_samples(g), hspec16)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_round_trip_small(hspec32):
    grid = GridFunction2D.window(4, 64)
    X = rank_one(basis_vector(1, 32), (basis_vector(0, 32) + basis_vector(2, 32)) / np.sqrt(2))
    W = weyl_transform(fourier_wigner_grid(X, grid, hspec32), hspec32)
    assert np.linalg.norm(W - X) < 1e-6


def test_hermite_function_matches_table():
    c = np.array([0.5, -1j, 0.25])
    t = np.linspace(-1, 1, 7)
    assert np.allclose(hermite_function(c, t), sum(c[k] * hermite_reference(k, t) for k in range(3)))


def test_grid_csv_round_trip():
    grid = GridFunction2D.window(1.0, 4, np.arange(16).reshape(4, 4) * (1 + 0.5j))
    text = grid.to_csv()
    assert text.splitlines()[0] == "x,y,re,im"
    back = GridFunction2D.from_csv(text)
    assert np.allclose(back.samples, grid.samples)
    assert back.dx == pytest.approx(grid.dx)
    assert back.origin.x == pytest.approx(-1.0)


def test_grid_rejects_nonfinite():
    with pytest.raises(ValueError):
        GridFunction2D.window(1.0, 2, np.array([[np.nan, 0], [0, 0]]))
