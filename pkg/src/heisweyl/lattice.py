"""Rectangular isotropic lattices and the finite induced representation tau.

N = alpha Z x beta Z with alpha * beta = a an integer.  Points of the dual
lattice N_perp = (1/beta) Z x (1/alpha) Z are addressed by integer pairs
(j, k) <-> (j / beta, k / alpha).  In these units

* M = (1/beta) Z x beta Z  is  {(j, k) : a | k},
* N                          is  {(j, k) : a | j and a | k},

and S = {(j, k) : 0 <= j, k < a} represents N_perp / N.  Every membership
test and coset reduction below is integer or Fraction arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import _hooks
from .heisenberg import GroupElement, PhasePoint, cocycle_psi, inverse, multiply, pairing_e, section


class NPerpIndex(NamedTuple):
    j: int
    k: int

    def __add__(self, other):
        return NPerpIndex(self.j + other.j, self.k + other.k)

    def __sub__(self, other):
        return NPerpIndex(self.j - other.j, self.k - other.k)

    def __neg__(self):
        return NPerpIndex(-self.j, -self.k)


class LatticeError(ValueError):
    pass


def parse_rational(value) -> Fraction:
    """Accept ints, Fractions or strings like ``"3"`` and ``"3/2"``."""
    if isinstance(value, float):
        raise LatticeError(f"lattice parameters must be exact rationals, got float {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise LatticeError(f"cannot parse rational {value!r}") from exc


@dataclass(frozen=True)
class LatticeSpec:
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise LatticeError(f"alpha and beta must be positive, got {self.alpha}, {self.beta}")
        area = self.alpha * self.beta
        if area.denominator != 1:
            raise LatticeError(
                f"area alpha*beta = {area} is not an integer, so N = alpha Z x beta Z is not isotropic")

    @property
    def a(self) -> int:
        return int(self.alpha * self.beta)

    @property
    def n_generators(self) -> tuple[PhasePoint, PhasePoint]:
        return PhasePoint(self.alpha, Fraction(0)), PhasePoint(Fraction(0), self.beta)

    @property
    def m_generators(self) -> tuple[PhasePoint, PhasePoint]:
        return PhasePoint(1 / self.beta, Fraction(0)), PhasePoint(Fraction(0), self.beta)

    @property
    def nperp_generators(self) -> tuple[PhasePoint, PhasePoint]:
        return PhasePoint(1 / self.beta, Fraction(0)), PhasePoint(Fraction(0), 1 / self.alpha)

    @property
    def omega_domain(self) -> tuple[Fraction, Fraction]:
        """Side lengths of the fundamental rectangle [0, 1/beta) x [0, 1/alpha) of N_perp."""
        return 1 / self.beta, 1 / self.alpha

    def embed(self, n: NPerpIndex) -> PhasePoint:
        return PhasePoint(Fraction(n.j) / self.beta, Fraction(n.k) / self.alpha)

    def index_of(self, w: PhasePoint) -> NPerpIndex:
        """Inverse of :meth:`embed`; raises if w is not in N_perp."""
        j = Fraction(w.x) * self.beta
        k = Fraction(w.y) * self.alpha
        if j.denominator != 1 or k.denominator != 1:
            raise LatticeError(f"point ({w.x}, {w.y}) is not in N_perp")
        return NPerpIndex(int(j), int(k))

    def in_n(self, n: NPerpIndex) -> bool:
        return n.j % self.a == 0 and n.k % self.a == 0

    def in_m(self, n: NPerpIndex) -> bool:
        return n.k % self.a == 0

    def reduce(self, n: NPerpIndex) -> tuple[NPerpIndex, NPerpIndex]:
        """Split n = m + r with m in N and r in S."""
        r = NPerpIndex(n.j % self.a, n.k % self.a)
        return n - r, r

    def representatives(self) -> list[NPerpIndex]:
        a = self.a
        return [NPerpIndex(j, k) for j in range(a) for k in range(a)]

    def check(self) -> float:
        """Max deviation of the isotropy and duality pairings from 1."""
        gens_n = self.n_generators
        worst = abs(pairing_e(*gens_n) - 1)
        for nu in gens_n:
            for w in self.nperp_generators + self.m_generators:
                worst = max(worst, abs(pairing_e(nu, w) - 1))
        worst = max(worst, abs(pairing_e(*self.m_generators) - 1))
        return float(worst)


def make_lattice(alpha, beta) -> LatticeSpec:
    spec = LatticeSpec(parse_rational(alpha), parse_rational(beta))
    if spec.check() > 1e-12:
        raise LatticeError(f"pairing check failed for alpha={alpha}, beta={beta}")
    return spec


def _exact(h: GroupElement) -> GroupElement:
    return GroupElement(Fraction(h.x), Fraction(h.y), h.z)


def zeta(h: GroupElement, spec: LatticeSpec) -> complex:
    """Character of pi^{-1}(M) extending z -> z.

    With (x, y) = j m1 + k m2, m1 = (1/beta, 0), m2 = (0, beta), the value is
    z * (-1)^(j k); the sign cancels the cocycle between generators.
    """
    j = Fraction(h.x) * spec.beta
    k = Fraction(h.y) / spec.beta
    if j.denominator != 1 or k.denominator != 1:
        raise LatticeError(f"({h.x}, {h.y}) is not in M = (1/beta)Z x (beta)Z")
    sign = -1 if _hooks.ENABLED["zeta_correction"] and (int(j) * int(k)) % 2 else 1
    return complex(h.z) * sign


@dataclass(frozen=True)
class TauRep:
    """tau = Ind from pi^{-1}(M) to pi^{-1}(N_perp) of zeta, on the cosets r_i = (0, i / alpha)."""

    spec: LatticeSpec
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for n in self.spec.representatives():
            self.cache[n] = tau_matrix(section(self.spec.embed(n)), self)

    @property
    def a(self) -> int:
        return self.spec.a

    @property
    def coset_reps(self) -> list[PhasePoint]:
        return [PhasePoint(Fraction(0), Fraction(i) / self.spec.alpha) for i in range(self.a)]

    @property
    def S(self) -> list[NPerpIndex]:
        return self.spec.representatives()


def tau_matrix(h: GroupElement, rep: TauRep) -> np.ndarray:
    """Induced matrix: entry (i', i) is zeta(s(r_i') h s(r_i)^-1) if that lies over M, else 0."""
    spec = rep.spec
    h = _exact(h)
    spec.index_of(h.point)  # raises off N_perp
    cosets = [section(r) for r in rep.coset_reps]
    a = spec.a
    out = np.zeros((a, a), dtype=complex)
    for i, ci in enumerate(cosets):
        ci_inv = inverse(ci)
        hits = 0
        for i2, ci2 in enumerate(cosets):
            g = multiply(multiply(ci2, h), ci_inv)
            if spec.in_m(spec.index_of(g.point)):
                out[i2, i] = zeta(g, spec)
                hits += 1
        assert hits == 1
    return out


def tau_s(n: NPerpIndex, rep: TauRep) -> np.ndarray:
    """tau(s(n)) for any n in N_perp, reduced to S via s(m + r) = psi(m, r)^-1 s(m) s(r)."""
    n = NPerpIndex(*n)
    cached = rep.cache.get(n)
    if cached is not None:
        return cached
    spec = rep.spec
    m, r = spec.reduce(n)
    pm, pr = spec.embed(m), spec.embed(r)
    scale = zeta(section(pm), spec) / cocycle_psi(pm, pr)
    return scale * rep.cache[r]


def tau_stack(indices, rep: TauRep) -> np.ndarray:
    return np.stack([tau_s(n, rep) for n in indices])


def twirl(T: np.ndarray, rep: TauRep) -> np.ndarray:
    """sum over n in S of tau(s(n)) T tau(s(n))^-1."""
    T = np.asarray(T)
    if T.shape != (rep.a, rep.a):
        raise ValueError(f"twirl needs an {rep.a}x{rep.a} matrix, got {T.shape}")
    out = np.zeros_like(T, dtype=complex)
    for n in rep.S:
        U = rep.cache[n]
        out += U @ T @ U.conj().T
    return out


def trace_tau(n: NPerpIndex, rep: TauRep) -> complex:
    """tr tau(s(n)), computed from the induced-matrix definition."""
    return complex(np.trace(tau_matrix(section(rep.spec.embed(NPerpIndex(*n))), rep)))


def hs_inner(A: np.ndarray, B: np.ndarray) -> complex:
    """<A, B> = tr(A B^*)."""
    return complex(np.sum(A * np.conj(B)))


def tau_gram(rep: TauRep) -> np.ndarray:
    U = tau_stack(rep.S, rep)
    return np.einsum("nrc,mrc->nm", U, U.conj())
