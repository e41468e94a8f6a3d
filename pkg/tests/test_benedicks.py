import math
from fractions import Fraction

import numpy as np
import pytest

from heisweyl.benedicks import (
    Resources, default_shifts, nv_set, operator_rank, parseval_tail, phase_law_error,
    reconstruction_residual, rank_dichotomy_scan, reports_to_csv, run_pipeline,
    superlevel_measure, translate_op,
)
from heisweyl.heisenberg import PhasePoint
from heisweyl.induced import OmegaGrid, window_indices
from heisweyl.lattice import NPerpIndex, TauRep, make_lattice
from heisweyl.schrodinger import (
    GridFunction2D, HermiteBasisSpec, basis_vector, projector, rank_one,
)


def gaussian_grid(L=4.0, cells=128):
    grid = GridFunction2D.window(L, cells)
    xx, yy = grid.mesh()
    return grid.with_samples(np.exp(-np.pi * (xx**2 + yy**2) / 2))


def test_superlevel_zero_field():
    grid = GridFunction2D.window(2.0, 16)
    report = superlevel_measure(grid.with_samples(np.zeros((16, 16))), 1e-3)
    assert report.measure == 0 and report.cell_count == 0


def test_superlevel_above_max():
    assert superlevel_measure(gaussian_grid(), 1.5).measure == 0


def test_superlevel_rejects_nonpositive_epsilon():
    with pytest.raises(ValueError):
        superlevel_measure(gaussian_grid(), 0.0)


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
def test_superlevel_gaussian_area(eps):
    # |alpha| > eps on a disk of area 2 ln(1/eps); allow two boundary rings of cells
    grid = gaussian_grid()
    report = superlevel_measure(grid, eps)
    exact = 2 * math.log(1 / eps)
    radius = math.sqrt(exact / math.pi)
    ring = 2 * 2 * math.pi * radius * grid.dx * math.sqrt(2)
    assert abs(report.measure - exact) <= ring


def test_translate_identity_shift(hspec32):
    X = rank_one(basis_vector(0, 32), basis_vector(1, 32))
    assert np.allclose(translate_op(X, PhasePoint(0, 0), hspec32), X, atol=1e-13)


def test_translate_phase_law(hspec32):
    X = rank_one(basis_vector(0, 32), basis_vector(2, 32))
    grid = GridFunction2D.window(1.5, 12)
    assert phase_law_error(X, PhasePoint(0.25, -0.5), grid, hspec32) < 1e-8


def test_translate_keeps_rank():
    # singular values beyond the rank of X shrink as the truncation grows
    tails = []
    for D in (16, 32, 48):
        spec = HermiteBasisSpec.for_dimension(D)
        Xv = translate_op(projector(1, D), PhasePoint(0.5, 0.5), spec)
        s = np.linalg.svd(Xv, compute_uv=False)
        assert s[0] == pytest.approx(1, abs=1e-8)
        tails.append(s[1])
    assert tails[2] < 1e-12


def test_operator_rank():
    assert operator_rank(np.zeros((4, 4))) == 0
    assert operator_rank(projector(2, 8)) == 2


def test_nv_empty_support():
    grid = GridFunction2D.window(2.0, 16)
    report = superlevel_measure(grid.with_samples(np.zeros((16, 16))), 1e-3)
    assert nv_set(report, PhasePoint(0, 0), make_lattice(2, 1), 8) == []


def test_nv_single_cell():
    grid = GridFunction2D.window(2.0, 16)
    samples = np.zeros((16, 16))
    i, l = grid.xs.tolist().index(1.125), grid.ys.tolist().index(-0.375)
    samples[i, l] = 1.0
    report = superlevel_measure(grid.with_samples(samples), 0.5)
    # cell [1, 1.25) x [-0.5, -0.25) contains (1 + 0, -1/2 + 1/8)
    found = nv_set(report, PhasePoint(Fraction(0), Fraction(1, 8)), make_lattice(2, 1), 8)
    assert found == [NPerpIndex(1, -1)]


def test_nv_gaussian_matches_disk():
    spec = make_lattice(2, 1)
    report = superlevel_measure(gaussian_grid(), 1e-2)
    v = PhasePoint(Fraction(1, 4), Fraction(1, 8))
    found = set(nv_set(report, v, spec, 15))
    radius2 = 2 * math.log(100) / math.pi
    margin = 2 * math.sqrt(2) * 8 / 128
    for n in window_indices(15):
        x = n.j / float(spec.beta) + float(v.x)
        y = n.k / float(spec.alpha) + float(v.y)
        r = math.hypot(x, y)
        if r < math.sqrt(radius2) - margin:
            assert n in found
        elif r > math.sqrt(radius2) + margin:
            assert n not in found


@pytest.fixture(scope="module")
def small_resources():
    return Resources(HermiteBasisSpec.for_dimension(32), G=16, L=4.0, cells=64)


def test_reconstruction_zero_operator(small_resources):
    rep = TauRep(make_lattice(2, 1))
    report = reconstruction_residual(np.zeros((32, 32)), PhasePoint(0, 0), 1e-2, rep, small_resources)
    assert report.zero_operator and report.residual_rel == 0


def test_reconstruction_rank_must_be_below_area(small_resources):
    rep = TauRep(make_lattice(2, 1))
    with pytest.raises(ValueError, match="must exceed"):
        reconstruction_residual(projector(2, 32), PhasePoint(0, 0), 1e-2, rep, small_resources)


def test_reconstruction_positive_and_matches_oracle(small_resources):
    rep = TauRep(make_lattice(2, 1))
    reports = run_pipeline(projector(1, 32), rep, [1e-1, 1e-2], small_resources,
                           shifts=[PhasePoint(0, 0), PhasePoint(Fraction(1, 4), Fraction(1, 8))])
    assert [r.epsilon for r in reports] == [1e-1, 1e-2, 1e-1, 1e-2]
    for r in reports:
        assert r.residual_rel > 0
        assert r.max_field_rank <= 1
        assert abs(r.residual_rel - r.oracle_residual_rel) <= 0.1 * r.oracle_residual_rel
    assert reports[1].residual_rel <= reports[0].residual_rel


def test_reconstruction_stable_under_grid_refinement():
    rep = TauRep(make_lattice(2, 1))
    hspec = HermiteBasisSpec.for_dimension(32)
    v = PhasePoint(Fraction(1, 4), Fraction(1, 4))
    values = [reconstruction_residual(projector(1, 32), v, 1e-2, rep,
                                      Resources(hspec, G=G, cells=64)).residual_rel
              for G in (16, 32)]
    assert values[1] == pytest.approx(values[0], rel=0.1)


def test_parseval_tail_everything_kept(hspec32):
    spec = make_lattice(2, 1)
    nv = window_indices(8)
    assert parseval_tail(projector(1, 32), PhasePoint(0, 0), nv, spec, hspec32, 8) < 1e-7
    assert parseval_tail(projector(1, 32), PhasePoint(0, 0), [], spec, hspec32, 8) == 1


def test_rank_scan_examples():
    rep = TauRep(make_lattice(2, 1))
    grid = OmegaGrid(rep, 16)
    assert rank_dichotomy_scan({NPerpIndex(0, 0): 0.0}, grid, 1e-8) == 1.0
    assert rank_dichotomy_scan({NPerpIndex(1, 0): 1.0}, grid, 1e-8) == 0.0


@pytest.mark.parametrize("alpha", [2, 3])
def test_rank_scan_random_vectors(alpha):
    rng = np.random.default_rng(alpha)
    grid = OmegaGrid(TauRep(make_lattice(alpha, 1)), 16)
    worst = 0.0
    for _ in range(50):
        nv = [NPerpIndex(*rng.integers(-5, 6, size=2)) for _ in range(rng.integers(1, 6))]
        coeffs = {n: complex(*rng.normal(size=2)) for n in nv}
        worst = max(worst, rank_dichotomy_scan(coeffs, grid, 1e-8))
    assert worst <= 0.01


def test_rank_scan_singular_set_shrinks():
    # I + c Xi_(1,0) with |c| = 1 is singular on a line; a generic phase keeps it off the nodes
    coeffs = {NPerpIndex(0, 0): 1.0, NPerpIndex(1, 0): np.exp(0.37j)}
    grid = OmegaGrid(TauRep(make_lattice(2, 1)), 128)
    fractions = [rank_dichotomy_scan(coeffs, grid, tol) for tol in (1e-1, 3e-2, 1e-2, 1e-3)]
    assert fractions[0] > fractions[1] > fractions[2] > fractions[3] == 0
    assert fractions[0] <= 0.1


def test_default_shifts_cover_domain():
    spec = make_lattice("3/2", 2)
    shifts = default_shifts(spec)
    assert len(shifts) == 16
    wx, wy = spec.omega_domain
    assert all(0 <= s.x < wx and 0 <= s.y < wy for s in shifts)


def test_report_csv(small_resources):
    rep = TauRep(make_lattice(2, 1))
    reports = run_pipeline(projector(1, 32), rep, [1e-1], small_resources, shifts=[PhasePoint(0, 0)])
    lines = reports_to_csv(reports).splitlines()
    assert lines[0] == "rank,a,vx,vy,epsilon,nv_size,support_measure,residual_rel,min_sv_fraction"
    assert lines[1].startswith("1,2,0.0,0.0,0.1,")
