"""The lattice-induced realization rho_N and its covariant fields.

Everything lives on the restriction to s(Omega), where Omega is the
fundamental rectangle [0, 1/beta) x [0, 1/alpha) of N_perp sampled by an
``OmegaGrid``.  Grid point (p, q) is w = (p / (beta G), q / (alpha G)), so the
N_perp generators are exactly G grid steps and every reduction is integer
arithmetic.  Integrals over Omega use the rectangle rule.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .heisenberg import GroupElement, PhasePoint, half_turns_ratio, multiply, pairing_e, psi_ratio, section
from .lattice import NPerpIndex, TauRep, tau_s
from .schrodinger import hermite_table, tail_radius

ZAK_TAIL = 1e-12


class AliasingError(ValueError):
    pass


@dataclass(frozen=True)
class OmegaGrid:
    rep: TauRep
    G: int

    def __post_init__(self):
        if self.G < 1:
            raise ValueError(f"grid size must be positive, got {self.G}")

    @property
    def spec(self):
        return self.rep.spec

    @property
    def a(self) -> int:
        return self.rep.a

    @property
    def dx(self) -> Fraction:
        return 1 / (self.spec.beta * self.G)

    @property
    def dy(self) -> Fraction:
        return 1 / (self.spec.alpha * self.G)

    @property
    def cell_area(self) -> float:
        return 1.0 / (self.a * self.G * self.G)

    @property
    def xs(self) -> np.ndarray:
        return np.arange(self.G) * float(self.dx)

    @property
    def ys(self) -> np.ndarray:
        return np.arange(self.G) * float(self.dy)

    def mesh(self):
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    @property
    def aliasing_bound(self) -> int:
        """Coefficient indices must satisfy max(|j|, |k|) < this bound."""
        return self.G if self.a >= 2 else (self.G + 1) // 2

    def check_index(self, n: NPerpIndex) -> None:
        bound = self.aliasing_bound
        if max(abs(n[0]), abs(n[1])) >= bound:
            raise AliasingError(
                f"index {tuple(n)} violates the aliasing bound max(|j|,|k|) < {bound} for G={self.G}")

    def pairing(self, n: NPerpIndex) -> np.ndarray:
        """e(w, n) at every grid point; exact root of unity of order a*G."""
        p = np.arange(self.G)[:, None]
        q = np.arange(self.G)[None, :]
        return half_turns_ratio(2 * (p * n[1] - q * n[0]), self.a * self.G)


@dataclass
class CovariantVectorField:
    """An element of H_N through its values phi(s(w)) in C^a."""

    grid: OmegaGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = self.grid
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (g.G, g.G, g.a):
            raise ValueError(f"vector field shape {self.values.shape} != {(g.G, g.G, g.a)}")

    def inner(self, other: CovariantVectorField) -> complex:
        _same_grid(self.grid, other.grid)
        return complex(np.sum(self.values * other.values.conj()) * self.grid.cell_area)

    def norm(self) -> float:
        return math.sqrt(self.inner(self).real)

    def __add__(self, other):
        _same_grid(self.grid, other.grid)
        return CovariantVectorField(self.grid, self.values + other.values)

    def scale(self, c) -> CovariantVectorField:
        return CovariantVectorField(self.grid, c * self.values)


@dataclass
class CovariantOperatorField:
    """A covariant B(H_tau)-valued field through its values F(s(w))."""

    grid: OmegaGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = self.grid
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (g.G, g.G, g.a, g.a):
            raise ValueError(f"operator field shape {self.values.shape} != {(g.G, g.G, g.a, g.a)}")

    def inner(self, other: CovariantOperatorField) -> complex:
        _same_grid(self.grid, other.grid)
        return complex(np.sum(self.values * other.values.conj()) * self.grid.cell_area)

    def norm(self, p: int = 2) -> float:
        pointwise = np.sqrt(np.sum(np.abs(self.values) ** 2, axis=(2, 3)))
        return float((np.sum(pointwise**p) * self.grid.cell_area) ** (1.0 / p))

    def __sub__(self, other):
        _same_grid(self.grid, other.grid)
        return CovariantOperatorField(self.grid, self.values - other.values)

    def ranks(self, rtol: float = 1e-10) -> np.ndarray:
        """Pointwise rank, counting singular values above rtol times the field's largest one."""
        sv = np.linalg.svd(self.values, compute_uv=False)
        top = sv.max()
        if top == 0:
            return np.zeros(sv.shape[:2], dtype=int)
        return np.sum(sv > rtol * top, axis=-1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["p", "q", "row", "col", "re", "im"])
        G, a = self.grid.G, self.grid.a
        for p in range(G):
            for q in range(G):
                for r in range(a):
                    for c in range(a):
                        v = self.values[p, q, r, c]
                        writer.writerow([p, q, r, c, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()


def _same_grid(g1: OmegaGrid, g2: OmegaGrid) -> None:
    if g1.G != g2.G or g1.spec != g2.spec:
        raise ValueError("fields live on different grids")


def xi(n: NPerpIndex, w: PhasePoint, rep: TauRep) -> np.ndarray:
    """Xi_n(s(w)) = e(w, n) tau(s(n))."""
    return pairing_e(w, rep.spec.embed(NPerpIndex(*n))) * tau_s(n, rep)


def xi_field(n: NPerpIndex, grid: OmegaGrid) -> CovariantOperatorField:
    phase = grid.pairing(n)
    return CovariantOperatorField(grid, phase[:, :, None, None] * tau_s(n, grid.rep)[None, None])


def zak_truncation(K: int, beta: Fraction, tail: float = ZAK_TAIL) -> int:
    """Number of periodisation terms J for Hermite content below index K."""
    b = float(beta)
    return max(math.ceil(8 * max(1.0, b)), math.ceil(b * tail_radius(K, tail)) + 2)


def zak_tail_bound(phi, J: int, beta: Fraction) -> float:
    """Bound on the discarded terms |phi(x + j/beta)|, |j| > J, over x in [-2/beta, 2/beta]."""
    phi = np.asarray(phi)
    start = (J - 2) / float(beta)
    probe = np.linspace(start, start + 8.0, 256)
    return float(np.abs(hermite_table(len(phi), np.concatenate([probe, -probe]))).max()
                 * np.sum(np.abs(phi)))


def zak_eval(phi, g: GroupElement, rep: TauRep, J: int) -> np.ndarray:
    """(Z phi)(g) in C^a for arrays of group elements ``g``.

    Stage one periodises over the M-direction (1/beta) Z,
        u(x, y, z) = beta^(-1/2) z e^{pi i x y} sum_{|j| <= J} e^{2 pi i j y / beta} phi(x + j / beta);
    stage two reads u along the cosets r_i of N_perp / M: component i is u(s(r_i) g).
    """
    phi = np.asarray(phi, dtype=complex)
    beta = float(rep.spec.beta)
    shifts = np.arange(-J, J + 1) / beta
    out = []
    for r in rep.coset_reps:
        gi = multiply(section(PhasePoint(float(r.x), float(r.y))), g)
        x = np.asarray(gi.x, dtype=float)
        y = np.asarray(gi.y, dtype=float)
        ux, inv = np.unique(x.ravel(), return_inverse=True)
        samples = hermite_table(len(phi), ux[:, None] + shifts[None, :]) @ phi
        rows = samples[inv].reshape(x.shape + (len(shifts),))
        periodic = np.einsum("...j,...j->...", rows,
                             np.exp(2j * np.pi * y[..., None] * shifts[None, :]))
        out.append(gi.z * np.exp(1j * np.pi * x * y) * periodic / math.sqrt(beta))
    return np.stack(out, axis=-1)


def zak(phi, grid: OmegaGrid, J: int | None = None) -> CovariantVectorField:
    """Weil-Brezin/Zak intertwiner from Hermite coefficients to H_N on the grid."""
    phi = np.asarray(phi)
    if J is None:
        J = zak_truncation(len(phi), grid.spec.beta)
    x, y = grid.mesh()
    g = GroupElement(x, y, np.ones_like(x, dtype=complex))
    return CovariantVectorField(grid, zak_eval(phi, g, grid.rep, J))


def _grid_steps(value, step: Fraction, name: str) -> int:
    ratio = Fraction(value) / step
    if ratio.denominator != 1:
        raise ValueError(f"{name}={value} is not a multiple of the grid step {step}")
    return int(ratio)


def rho_n_apply(g: GroupElement, phi: CovariantVectorField) -> CovariantVectorField:
    """(rho_N(g) phi)(s(w)) = phi(s(w) g), reduced back onto s(Omega) by covariance."""
    grid = phi.grid
    G, a = grid.G, grid.a
    P = _grid_steps(g.x, grid.dx, "x")
    Q = _grid_steps(g.y, grid.dy, "y")
    den = a * G * G  # dx * dy = 1 / den
    p = np.arange(G)[:, None]
    q = np.arange(G)[None, :]
    pt, qt = p + P, q + Q
    p0, q0 = pt % G, qt % G
    jn, kn = pt // G, qt // G
    # s(w) g = (w + pi(g), z psi(w, pi(g))) = z psi(w, pi(g)) psi(w + pi(g), -w0) s(n) s(w0)
    phase = complex(g.z) * psi_ratio(p * Q - q * P, den) * psi_ratio(-(pt * q0 - qt * p0), den)
    phase, p0, q0, jn, kn = np.broadcast_arrays(phase, p0, q0, jn, kn)
    out = np.empty_like(phi.values)
    for key in sorted(set(zip(jn.ravel().tolist(), kn.ravel().tolist()))):
        mask = (jn == key[0]) & (kn == key[1])
        U = tau_s(NPerpIndex(*key), grid.rep)
        out[mask] = phase[mask][:, None] * (phi.values[p0[mask], q0[mask]] @ U.T)
    return CovariantVectorField(grid, out)


def f_y(phis, psis) -> CovariantOperatorField:
    """F_Y(s(w)) = sum_j phi_j(s(w)) (x) conj(psi_j(s(w)))."""
    phis, psis = list(phis), list(psis)
    if len(phis) != len(psis) or not phis:
        raise ValueError("f_y needs two non-empty lists of equal length")
    grid = phis[0].grid
    total = np.zeros((grid.G, grid.G, grid.a, grid.a), dtype=complex)
    for u, v in zip(phis, psis):
        _same_grid(grid, u.grid)
        _same_grid(grid, v.grid)
        total += u.values[..., :, None] * v.values.conj()[..., None, :]
    return CovariantOperatorField(grid, total)


def rank_decomposition(X: np.ndarray, rtol: float = 1e-10):
    """Pairs (phi_j, psi_j) with X = sum phi_j (x) conj(psi_j), from the SVD."""
    U, s, Vh = np.linalg.svd(np.asarray(X))
    if s.size == 0 or s[0] == 0:
        return []
    keep = s > rtol * s[0]
    return [(s[i] * U[:, i], Vh[i].conj()) for i in np.flatnonzero(keep)]


def lift(X: np.ndarray, grid: OmegaGrid, J: int | None = None) -> CovariantOperatorField:
    """F_{X_N} for a finite-rank operator X given in the Hermite basis."""
    pairs = rank_decomposition(X)
    if not pairs:
        return CovariantOperatorField(grid, np.zeros((grid.G, grid.G, grid.a, grid.a), dtype=complex))
    return f_y([zak(u, grid, J) for u, _ in pairs], [zak(v, grid, J) for _, v in pairs])


def fw_coefficient(F: CovariantOperatorField, n: NPerpIndex) -> complex:
    """alpha(F)(n) = integral over Omega of <F(s(w)), Xi_n(s(w))>."""
    grid = F.grid
    n = NPerpIndex(*n)
    grid.check_index(n)
    weights = grid.pairing(n).conj()
    M = np.einsum("pq,pqrc->rc", weights, F.values)
    return complex(np.sum(M * tau_s(n, grid.rep).conj()) * grid.cell_area)


def window_indices(W: int) -> list[NPerpIndex]:
    return [NPerpIndex(j, k) for j in range(-W, W + 1) for k in range(-W, W + 1)]


def fw_coefficients(F: CovariantOperatorField, W: int) -> dict[NPerpIndex, complex]:
    """All coefficients with max(|j|, |k|) <= W, via two separable phase sums."""
    grid = F.grid
    grid.check_index(NPerpIndex(W, W))
    G, a = grid.G, grid.a
    idx = np.arange(-W, W + 1)
    p = np.arange(G)
    # conj e(w, n) = exp(-2 pi i (p k - q j) / (a G))
    Ep = half_turns_ratio(-2 * np.outer(idx, p), a * G)   # [k, p]
    Eq = half_turns_ratio(2 * np.outer(idx, p), a * G)    # [j, q]
    M = np.einsum("jq,kp,pqrc->jkrc", Eq, Ep, F.values, optimize=True)
    out = {}
    for jj, j in enumerate(idx):
        for kk, k in enumerate(idx):
            n = NPerpIndex(int(j), int(k))
            out[n] = complex(np.sum(M[jj, kk] * tau_s(n, grid.rep).conj()) * grid.cell_area)
    return out


def expand(coeffs: dict, grid: OmegaGrid) -> CovariantOperatorField:
    """sum_n c_n Xi_n on the grid."""
    total = np.zeros((grid.G, grid.G, grid.a, grid.a), dtype=complex)
    for n, c in coeffs.items():
        n = NPerpIndex(*n)
        grid.check_index(n)
        if c == 0:
            continue
        total += (c * grid.pairing(n))[:, :, None, None] * tau_s(n, grid.rep)[None, None]
    return CovariantOperatorField(grid, total)


def induced_trace(pairs, g: GroupElement) -> complex:
    """tr(X_N rho_N(g)^*) for X_N = sum phi_j (x) conj(psi_j) given as vector fields."""
    return sum(phi.inner(rho_n_apply(g, psi)) for phi, psi in pairs)
