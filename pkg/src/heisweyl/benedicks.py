"""Numerical form of the finite-measure / finite-rank obstruction.

No nonzero operator can have alpha(X) supported on a set of finite measure,
so nothing here ends in "X = 0".  What gets measured is the obstruction
itself.  The lifted field F of a rank-r operator has pointwise rank <= r < a.
Any nonzero finite Xi-expansion is invertible off a null set.  So
reconstructing F from its coefficients on a finite N_v always leaves a
strictly positive residual.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .heisenberg import GroupElement, PhasePoint, cocycle_psi
from .induced import OmegaGrid, expand, fw_coefficient, lift
from .lattice import LatticeSpec, NPerpIndex, TauRep
from .schrodinger import GridFunction2D, HermiteBasisSpec, fourier_wigner_grid, fourier_wigner_points, rho_matrix

REPORT_HEADER = ["rank", "a", "vx", "vy", "epsilon", "nv_size", "support_measure",
                 "residual_rel", "min_sv_fraction"]
RANK_RTOL = 1e-10


@dataclass
class SupportReport:
    epsilon: float
    measure: float
    cell_count: int
    window: tuple[float, float, float, float]
    grid: GridFunction2D = field(repr=False)
    mask: np.ndarray = field(repr=False)


def superlevel_measure(alpha_grid: GridFunction2D, epsilon: float) -> SupportReport:
    """Area of B_eps = {|alpha| > eps} by counting grid cells."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    mask = np.abs(alpha_grid.samples) > epsilon
    count = int(mask.sum())
    nx, ny = alpha_grid.shape
    x0, y0 = alpha_grid.origin.x, alpha_grid.origin.y
    window = (x0, y0, x0 + nx * alpha_grid.dx, y0 + ny * alpha_grid.dy)
    return SupportReport(epsilon, count * alpha_grid.cell_area, count, window, alpha_grid, mask)


def operator_rank(X: np.ndarray, rtol: float = RANK_RTOL) -> int:
    s = np.linalg.svd(np.asarray(X), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def translate_op(X: np.ndarray, v: PhasePoint, spec: HermiteBasisSpec) -> np.ndarray:
    """X^v = X rho(s(v))^*."""
    return np.asarray(X) @ rho_matrix(GroupElement(v.x, v.y), spec).conj().T


def _cell(value: Fraction, origin: float, step: float) -> int:
    return math.floor((value - Fraction(origin)) / Fraction(step))


def nv_set(support: SupportReport, v: PhasePoint, spec: LatticeSpec, window: int) -> list[NPerpIndex]:
    """N_perp points n with max(|j|, |k|) <= window and n + v in a cell of B_eps."""
    grid, mask = support.grid, support.mask
    nx, ny = mask.shape
    vx, vy = Fraction(v.x), Fraction(v.y)
    out = []
    for j in range(-window, window + 1):
        i = _cell(Fraction(j) / spec.beta + vx, grid.origin.x, grid.dx)
        if not 0 <= i < nx or not mask[i].any():
            continue
        for k in range(-window, window + 1):
            l = _cell(Fraction(k) / spec.alpha + vy, grid.origin.y, grid.dy)
            if 0 <= l < ny and mask[i, l]:
                out.append(NPerpIndex(j, k))
    return out


def rank_dichotomy_scan(coeffs: dict, grid: OmegaGrid, tol: float) -> float:
    """Fraction of grid points where sum_n c_n Xi_n(s(w)) has smallest singular value < tol."""
    F = expand(coeffs, grid)
    smallest = np.linalg.svd(F.values, compute_uv=False)[..., -1]
    return float(np.mean(smallest < tol))


@dataclass
class Resources:
    """Numerical resolution shared by every pipeline run."""

    hermite: HermiteBasisSpec
    G: int = 64
    L: float = 4.0
    cells: int = 128
    J: int | None = None
    scan_tol: float = 1e-8


@dataclass
class PipelineReport:
    rank: int
    a: int
    v: PhasePoint
    epsilon: float
    nv_size: int
    residual_rel: float
    support_measure: float
    oracle_residual_rel: float = 0.0
    min_sv_fraction: float = 0.0
    max_field_rank: int = 0
    zero_operator: bool = False

    def row(self) -> list[str]:
        return [str(self.rank), str(self.a), repr(float(self.v.x)), repr(float(self.v.y)),
                repr(float(self.epsilon)), str(self.nv_size), repr(float(self.support_measure)),
                repr(float(self.residual_rel)), repr(float(self.min_sv_fraction))]


def default_shifts(spec: LatticeSpec, per_axis: int = 4) -> list[PhasePoint]:
    """A per_axis x per_axis sub-grid of the fundamental rectangle of N_perp."""
    wx, wy = spec.omega_domain
    return [PhasePoint(Fraction(p, per_axis) * wx, Fraction(q, per_axis) * wy)
            for p in range(per_axis) for q in range(per_axis)]


def parseval_tail(X: np.ndarray, v: PhasePoint, nv: list[NPerpIndex], spec: LatticeSpec,
                  hermite: HermiteBasisSpec, window: int) -> float:
    """Relative residual predicted from Schrödinger-side coefficients alone.

    With total = sum |alpha(X^v)(n)|^2 over a wide N_perp window and kept the
    same sum over N_v, the orthonormal expansion leaves sqrt((total - kept) / total).
    """
    Xv = translate_op(X, v, hermite)
    idx = np.arange(-window, window + 1)
    xs = idx / float(spec.beta)
    ys = idx / float(spec.alpha)
    coeff = np.abs(fourier_wigner_points(Xv, xs, ys, hermite)) ** 2
    total = float(coeff.sum())
    if total == 0.0:
        return 0.0
    kept = float(sum(coeff[n.j + window, n.k + window] for n in nv if max(abs(n.j), abs(n.k)) <= window))
    return math.sqrt(max(total - kept, 0.0) / total)


def reconstruction_residual(X: np.ndarray, v: PhasePoint, epsilon: float, rep: TauRep,
                            res: Resources, alpha_grid: GridFunction2D | None = None,
                            oracle_window: int | None = None) -> PipelineReport:
    """Reconstruct F_{X_N^v} from its coefficients on N_v and report what is left over."""
    spec = rep.spec
    r = operator_rank(X)
    if rep.a <= r:
        raise ValueError(f"lattice area a={rep.a} must exceed rank(X)={r}")
    grid = OmegaGrid(rep, res.G)
    if alpha_grid is None:
        alpha_grid = fourier_wigner_grid(X, GridFunction2D.window(res.L, res.cells), res.hermite)
    support = superlevel_measure(alpha_grid, epsilon)
    nv = nv_set(support, v, spec, grid.aliasing_bound - 1)
    if r == 0:
        return PipelineReport(0, rep.a, v, epsilon, len(nv), 0.0, support.measure,
                              min_sv_fraction=1.0, zero_operator=True)

    Xv = translate_op(X, v, res.hermite)
    F = lift(Xv, grid, res.J)
    coeffs = {n: fw_coefficient(F, n) for n in nv}
    F_hat = expand(coeffs, grid)
    norm = F.norm()
    residual = (F - F_hat).norm() / norm if norm > 0 else 0.0
    if oracle_window is None:
        oracle_window = int(math.ceil(8 * max(float(spec.alpha), float(spec.beta))))
    oracle = parseval_tail(X, v, nv, spec, res.hermite, oracle_window)
    fraction = rank_dichotomy_scan(coeffs, grid, res.scan_tol) if coeffs else 1.0
    return PipelineReport(r, rep.a, v, epsilon, len(nv), residual, support.measure,
                          oracle_residual_rel=oracle, min_sv_fraction=fraction,
                          max_field_rank=int(F.ranks(RANK_RTOL).max()))


def run_pipeline(X: np.ndarray, rep: TauRep, epsilons, res: Resources, shifts=None) -> list[PipelineReport]:
    """All (v, eps) runs, ordered by v then by decreasing epsilon."""
    if shifts is None:
        shifts = default_shifts(rep.spec)
    alpha_grid = fourier_wigner_grid(X, GridFunction2D.window(res.L, res.cells), res.hermite)
    reports = []
    for v in shifts:
        for eps in sorted(epsilons, reverse=True):
            reports.append(reconstruction_residual(X, v, eps, rep, res, alpha_grid))
    return reports


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for rep in reports:
        writer.writerow(rep.row())
    return buf.getvalue()


def phase_law_error(X: np.ndarray, v: PhasePoint, grid: GridFunction2D, spec: HermiteBasisSpec) -> float:
    """max over the grid of |alpha(X^v)(w) - conj(psi(w, v)) alpha(X)(w + v)|."""
    lhs = fourier_wigner_grid(translate_op(X, v, spec), grid, spec).samples
    xs, ys = grid.xs, grid.ys
    shifted = fourier_wigner_points(X, xs + float(v.x), ys + float(v.y), spec)
    xx, yy = grid.mesh()
    rhs = np.conj(cocycle_psi(PhasePoint(xx, yy), PhasePoint(float(v.x), float(v.y)))) * shifted
    return float(np.abs(lhs - rhs).max())
