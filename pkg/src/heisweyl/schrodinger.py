"""Hermite-truncated Schrödinger representation on L^2(R).

Functions are expanded in the Hermite functions normalised so that
``h_0(t) = 2**0.25 * exp(-pi t^2)``.  An operator X is the matrix
``X[j, k]`` with ``X = sum_jk X[j, k] h_j (x) conj(h_k)``; in particular the
rank-one operator ``phi (x) conj(psi)`` is ``np.outer(phi, psi.conj())``.

All integrals over t use composite Gauss-Legendre quadrature on [-T, T].
"""

from __future__ import annotations

import csv
import functools
import io
from dataclasses import dataclass, field

import numpy as np

from .heisenberg import GroupElement, PhasePoint

TAIL = 1e-14


def hermite_table(D: int, t) -> np.ndarray:
    """Values ``h_k(t)`` for ``k < D`` as an array of shape ``t.shape + (D,)``.

    Uses the three-term recurrence on the functions themselves, which never
    forms the (overflowing) Hermite polynomials.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape + (D,))
    out[..., 0] = 2.0**0.25 * np.exp(-np.pi * t * t)
    if D > 1:
        out[..., 1] = np.sqrt(4 * np.pi) * t * out[..., 0]
    for n in range(1, D - 1):
        out[..., n + 1] = (np.sqrt(4 * np.pi / (n + 1)) * t * out[..., n]
                           - np.sqrt(n / (n + 1)) * out[..., n - 1])
    return out


def tail_radius(D: int, tail: float = TAIL, step: float = 0.25) -> float:
    """Smallest multiple of ``step`` beyond which every h_k, k < D, stays below ``tail``."""
    t = step
    while True:
        probe = np.linspace(t, t + 4.0, 64)
        if np.abs(hermite_table(D, probe)).max() < tail:
            return t
        t += step


@dataclass(frozen=True)
class HermiteBasisSpec:
    """Truncation dimension and quadrature layout for L^2(R).

    ``T`` is the half-width of the integration interval, ``panels`` the
    number of Gauss-Legendre panels and ``Q`` the nodes per panel.
    """

    D: int
    T: float
    Q: int = 16
    panels: int = 64

    def __post_init__(self):
        if self.D < 1 or self.Q < 1 or self.panels < 1 or not self.T > 0:
            raise ValueError(f"invalid HermiteBasisSpec {self}")

    @classmethod
    def for_dimension(cls, D: int, Q: int = 16, panel_width: float = 0.25) -> HermiteBasisSpec:
        T = tail_radius(D)
        return cls(D=D, T=T, Q=Q, panels=int(np.ceil(2 * T / panel_width)))

    def refined(self) -> HermiteBasisSpec:
        return HermiteBasisSpec(self.D, self.T, self.Q, 2 * self.panels)


@functools.lru_cache(maxsize=32)
def quadrature(spec: HermiteBasisSpec) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite Gauss-Legendre rule on [-T, T]."""
    x, w = np.polynomial.legendre.leggauss(spec.Q)
    edges = np.linspace(-spec.T, spec.T, spec.panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@functools.lru_cache(maxsize=32)
def _node_table(spec: HermiteBasisSpec) -> np.ndarray:
    t, _ = quadrature(spec)
    table = hermite_table(spec.D, t)
    table.setflags(write=False)
    return table


def hermite_eval(k: int, t, spec: HermiteBasisSpec):
    if not 0 <= k < spec.D:
        raise ValueError(f"Hermite index {k} outside 0..{spec.D - 1}")
    return hermite_table(k + 1, t)[..., k]


def hermite_function(coeffs, t) -> np.ndarray:
    """Evaluate ``sum_k coeffs[k] h_k(t)`` pointwise, without quadrature."""
    coeffs = np.asarray(coeffs)
    return hermite_table(len(coeffs), t) @ coeffs


def gram(spec: HermiteBasisSpec) -> np.ndarray:
    """Quadrature Gram matrix of the basis, ideally the identity."""
    H = _node_table(spec)
    _, q = quadrature(spec)
    return H.T @ (q[:, None] * H)


def rho_matrix(g: GroupElement, spec: HermiteBasisSpec) -> np.ndarray:
    """Matrix ``R[j, k] = <rho(g) h_k, h_j>`` of rho(g) compressed to the Hermite span."""
    x, y = float(g.x), float(g.y)
    if x == 0.0 and y == 0.0:
        return complex(g.z) * np.eye(spec.D, dtype=complex)
    t, q = quadrature(spec)
    H = _node_table(spec)
    Hx = hermite_table(spec.D, t + x)
    weight = q * np.exp(2j * np.pi * y * t)
    return complex(g.z) * np.exp(1j * np.pi * x * y) * (H.T @ (weight[:, None] * Hx))


def unitarity_leakage(g: GroupElement, spec: HermiteBasisSpec, block: int = 8) -> float:
    """Spectral-norm defect of R R^* on the leading ``block`` modes.

    The last rows of a truncated rho always leak out of the span, so the
    defect is only meaningful away from the truncation edge.
    """
    R = rho_matrix(g, spec)
    b = min(block, spec.D)
    return float(np.linalg.norm((R @ R.conj().T)[:b, :b] - np.eye(b), 2))


@dataclass
class GridFunction2D:
    """Samples of a phase-plane function at the cell centres of a rectangle.

    ``origin`` is the lower-left corner; sample ``[i, l]`` sits at
    ``(origin.x + (i + 1/2) dx, origin.y + (l + 1/2) dy)``.
    """

    origin: PhasePoint
    dx: float
    dy: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 2 or not (self.dx > 0 and self.dy > 0):
            raise ValueError("GridFunction2D needs a 2-d sample array and positive steps")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("GridFunction2D samples must be finite")

    @classmethod
    def window(cls, L: float, n: int, samples=None) -> GridFunction2D:
        """An n x n grid on [-L, L]^2, zero-filled unless samples are given."""
        d = 2.0 * L / n
        if samples is None:
            samples = np.zeros((n, n), dtype=complex)
        return cls(PhasePoint(-L, -L), d, d, samples)

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape

    @property
    def xs(self) -> np.ndarray:
        return self.origin.x + (np.arange(self.shape[0]) + 0.5) * self.dx

    @property
    def ys(self) -> np.ndarray:
        return self.origin.y + (np.arange(self.shape[1]) + 0.5) * self.dy

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    def with_samples(self, samples) -> GridFunction2D:
        return GridFunction2D(self.origin, self.dx, self.dy, samples)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.cell_area))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y", "re", "im"])
        for i, x in enumerate(self.xs):
            for l, y in enumerate(self.ys):
                v = self.samples[i, l]
                writer.writerow([repr(float(x)), repr(float(y)),
                                 repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> GridFunction2D:
        rows = list(csv.DictReader(io.StringIO(text)))
        xs = sorted({float(r["x"]) for r in rows})
        ys = sorted({float(r["y"]) for r in rows})
        samples = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        samples = samples.reshape(len(xs), len(ys))
        dx = xs[1] - xs[0] if len(xs) > 1 else 1.0
        dy = ys[1] - ys[0] if len(ys) > 1 else 1.0
        return cls(PhasePoint(xs[0] - dx / 2, ys[0] - dy / 2), dx, dy, samples)


def weyl_transform(f: GridFunction2D, spec: HermiteBasisSpec) -> np.ndarray:
    """Midpoint-rule Weyl transform ``sum_w f(w) rho(s(w)) dx dy``."""
    t, q = quadrature(spec)
    H = _node_table(spec)
    ys = f.ys
    W = np.zeros((spec.D, spec.D), dtype=complex)
    for i, x in enumerate(f.xs):
        column = f.samples[i]
        if not np.any(column):
            continue
        # sum over y of f(x, y) exp(i pi y (x + 2t)) at every node t
        g = column @ np.exp(1j * np.pi * np.outer(ys, x + 2 * t))
        W += H.T @ ((q * g)[:, None] * hermite_table(spec.D, t + x))
    return W * f.cell_area


def fourier_wigner(X: np.ndarray, w: PhasePoint, spec: HermiteBasisSpec) -> complex:
    """alpha(X)(w) = tr(X rho(s(w))^*)."""
    R = rho_matrix(GroupElement(w.x, w.y), spec)
    return complex(np.sum(X * R.conj()))


def fourier_wigner_grid(X: np.ndarray, grid: GridFunction2D, spec: HermiteBasisSpec) -> GridFunction2D:
    """alpha(X) sampled at the cell centres of ``grid``."""
    return grid.with_samples(fourier_wigner_points(X, grid.xs, grid.ys, spec))


def fourier_wigner_points(X: np.ndarray, xs, ys, spec: HermiteBasisSpec) -> np.ndarray:
    """alpha(X) on the tensor grid ``xs x ys``; shape ``(len(xs), len(ys))``."""
    X = np.asarray(X)
    if X.shape != (spec.D, spec.D):
        raise ValueError(f"operator shape {X.shape} does not match D={spec.D}")
    t, q = quadrature(spec)
    H = _node_table(spec)
    HX = H @ X
    ys = np.asarray(ys, dtype=float)
    out = np.empty((len(xs), len(ys)), dtype=complex)
    phases = np.exp(-2j * np.pi * np.outer(t, ys)) * q[:, None]
    for i, x in enumerate(np.asarray(xs, dtype=float)):
        c = np.sum(HX * hermite_table(spec.D, t + x), axis=1)
        out[i] = np.exp(-1j * np.pi * x * ys) * (c @ phases)
    return out


def rank_one(phi, psi) -> np.ndarray:
    """Matrix of ``phi (x) conj(psi)``."""
    return np.outer(np.asarray(phi), np.conj(np.asarray(psi)))


def basis_vector(k: int, D: int) -> np.ndarray:
    e = np.zeros(D, dtype=complex)
    e[k] = 1.0
    return e


def projector(r: int, D: int) -> np.ndarray:
    """Orthogonal projector onto span(h_0, ..., h_{r-1})."""
    P = np.zeros((D, D), dtype=complex)
    P[:r, :r] = np.eye(r)
    return P
