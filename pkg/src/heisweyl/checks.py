"""Verification suites: one measured error against one tolerance per row."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import benedicks, heisenberg as hg, induced, lattice, schrodinger as sch
from .heisenberg import GroupElement, PhasePoint


@dataclass
class Check:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<52s} error={self.error:.3e}  tol={self.tolerance:.1e}"


def random_element(rng, scale=3.0) -> GroupElement:
    x, y = rng.uniform(-scale, scale, 2)
    return GroupElement(x, y, np.exp(2j * np.pi * rng.uniform()))


def group_algebra(rng, count: int = 1000) -> list[Check]:
    assoc = comm = split = psi_sq = alt = inv = 0.0
    for _ in range(count):
        g, g2, g3 = (random_element(rng) for _ in range(3))
        assoc = max(assoc, hg.distance((g * g2) * g3, g * (g2 * g3)))
        e = hg.pairing_e(g.point, g2.point)
        comm = max(comm, hg.distance(hg.commutator(g, g2), hg.central(e)))
        w, w2 = g.point, g2.point
        lhs = hg.section(w) * hg.section(w2)
        rhs = hg.central(hg.cocycle_psi(w, w2)) * hg.section(w + w2)
        split = max(split, hg.distance(lhs, rhs))
        psi_sq = max(psi_sq, abs(hg.cocycle_psi(w, w2) ** 2 - e))
        alt = max(alt, abs(hg.pairing_e(w, w) - 1), abs(e * hg.pairing_e(w2, w) - 1))
        inv = max(inv, hg.distance(g * hg.inverse(g), hg.IDENTITY))
    return [Check("group: associativity", assoc, 1e-12),
            Check("group: commutator = (0,0,e(pi g, pi g'))", comm, 1e-12),
            Check("group: s(w)s(w') = psi(w,w') s(w+w')", split, 1e-12),
            Check("group: psi^2 = e, e alternating", max(psi_sq, alt), 1e-12),
            Check("group: g g^-1 = identity", inv, 1e-12)]


def random_m_element(spec: lattice.LatticeSpec, rng) -> GroupElement:
    j, k = (int(v) for v in rng.integers(-7, 8, 2))
    z = np.exp(2j * np.pi * rng.uniform())
    return GroupElement(Fraction(j) / spec.beta, Fraction(k) * spec.beta, z)


def zeta_character(spec: lattice.LatticeSpec, rng, count: int = 200) -> Check:
    worst = 0.0
    for _ in range(count):
        h, h2 = random_m_element(spec, rng), random_m_element(spec, rng)
        worst = max(worst, abs(lattice.zeta(h * h2, spec) - lattice.zeta(h, spec) * lattice.zeta(h2, spec)))
    return Check("zeta: character on pi^-1(M)", worst, 1e-12)


def lemma_2_1(rep: lattice.TauRep, rng, count: int = 20) -> Check:
    a = rep.a
    worst = 0.0
    for _ in range(count):
        T = rng.normal(size=(a, a)) + 1j * rng.normal(size=(a, a))
        err = np.linalg.norm(lattice.twirl(T, rep) - a * np.trace(T) * np.eye(a))
        worst = max(worst, err / np.linalg.norm(T))
    return Check(f"Lemma 2.1 twirl = a tr(T) I (a={a})", worst, 1e-10)


def lemma_2_2(rep: lattice.TauRep) -> list[Check]:
    spec, a = rep.spec, rep.a
    trace_err = 0.0
    shifts = [lattice.NPerpIndex(a * p, a * q) for p in (-1, 0, 1, 2) for q in (-1, 0, 1)]
    for n in rep.S:
        for m in shifts:
            nn = n + m
            expected = a * lattice.zeta(hg.section(spec.embed(nn)), spec) if spec.in_n(nn) else 0.0
            trace_err = max(trace_err, abs(lattice.trace_tau(nn, rep) - expected))
    conj_err = 0.0
    for n in rep.S:
        U = rep.cache[n]
        for n2 in rep.S:
            e = hg.pairing_e(spec.embed(n), spec.embed(n2))
            conj_err = max(conj_err, np.abs(U @ rep.cache[n2] @ U.conj().T - e * rep.cache[n2]).max())
    law_err = 0.0
    for n in rep.S:
        for n2 in rep.S:
            for m in shifts[:4]:
                left = lattice.tau_matrix(hg.section(spec.embed(n + m)), rep) @ rep.cache[n2]
                psi = hg.cocycle_psi(spec.embed(n + m), spec.embed(n2))
                right = psi * lattice.tau_matrix(hg.section(spec.embed(n + m + n2)), rep)
                law_err = max(law_err, np.abs(left - right).max())
    return [Check(f"Lemma 2.2 trace dichotomy (a={a})", trace_err, 1e-10),
            Check(f"Lemma 2.2 conjugation by tau(s(n)) (a={a})", conj_err, 1e-10),
            Check(f"tau projective law (a={a})", law_err, 1e-10)]


def corollaries(rep: lattice.TauRep) -> list[Check]:
    spec, a = rep.spec, rep.a
    gram = lattice.tau_gram(rep)
    c24 = float(np.abs(gram / a - np.eye(a * a)).max())
    c23 = 0.0
    for n in rep.S:
        for n2 in rep.S:
            for m in (lattice.NPerpIndex(a, 0), lattice.NPerpIndex(0, -a), lattice.NPerpIndex(-a, 2 * a)):
                shifted = n2 + m
                value = lattice.hs_inner(lattice.tau_matrix(hg.section(spec.embed(n)), rep),
                                         lattice.tau_matrix(hg.section(spec.embed(shifted)), rep))
                d = n - shifted
                if spec.in_n(d):
                    pn, pd = spec.embed(n), spec.embed(d)
                    expected = a * hg.cocycle_psi(pn, -spec.embed(shifted)) * lattice.zeta(hg.section(pd), spec)
                else:
                    expected = 0.0
                c23 = max(c23, abs(value - expected))
    return [Check(f"Cor 2.3 <tau(s(n)),tau(s(n'))> (a={a})", c23, 1e-10),
            Check(f"Cor 2.4 Gram of a^-1/2 tau(s(S)) = I (a={a})", c24, 1e-10)]


def prop_2_5(grid: induced.OmegaGrid, D: int, kmax: int = 3) -> Check:
    worst = 0.0
    for k in range(kmax + 1):
        Z = induced.zak(sch.basis_vector(k, D), grid)
        for n in grid.rep.S:
            lhs = induced.rho_n_apply(hg.section(grid.spec.embed(n)), Z).values
            rhs = np.einsum("pqrc,pqc->pqr", induced.xi_field(n, grid).values, Z.values)
            worst = max(worst, np.abs(lhs - rhs).max())
    return Check("Prop 2.5 rho_N(s(n)) phi = Xi_n phi", worst, 1e-9)


def xi_gram_error(grid: induced.OmegaGrid, W: int) -> float:
    """Max deviation of <Xi_n, Xi_n'> from delta over max(|j|,|k|) <= W."""
    worst = 0.0
    for n2 in induced.window_indices(W):
        coeffs = induced.fw_coefficients(induced.xi_field(n2, grid), W)
        for n, c in coeffs.items():
            worst = max(worst, abs(c - (1.0 if n == n2 else 0.0)))
    return worst


def prop_2_8(grid: induced.OmegaGrid, W: int) -> Check:
    return Check(f"Prop 2.8 Xi orthonormality (|j|,|k|<={W})", xi_gram_error(grid, W), 1e-10)


def parseval_tails(grid: induced.OmegaGrid, D: int, windows=(1, 2, 4, 8)) -> list[float]:
    F = induced.f_y([induced.zak(sch.basis_vector(0, D), grid)], [induced.zak(sch.basis_vector(0, D), grid)])
    total = F.norm() ** 2
    tails = []
    for W in windows:
        if W >= grid.aliasing_bound:
            break
        c = induced.fw_coefficients(F, W)
        tails.append(max(total - sum(abs(v) ** 2 for v in c.values()), 0.0))
    return tails


def zak_checks(grid: induced.OmegaGrid, D: int, kmax: int = 5, J: int | None = None) -> list[Check]:
    if J is None:
        J = induced.zak_truncation(D, grid.spec.beta)
    norm_err = cov_err = 0.0
    x, y = grid.mesh()
    base = GroupElement(x, y, np.ones_like(x, dtype=complex))
    for k in range(kmax + 1):
        phi = sch.basis_vector(k, D)
        Z = induced.zak(phi, grid, J)
        norm_err = max(norm_err, abs(Z.norm() ** 2 - 1))
        for nu in grid.spec.nperp_generators:
            g = hg.section(PhasePoint(float(nu.x), float(nu.y))) * base
            moved = induced.zak_eval(phi, g, grid.rep, J)
            U = lattice.tau_s(grid.spec.index_of(nu), grid.rep)
            cov_err = max(cov_err, np.abs(moved - Z.values @ U.T).max())
    return [Check(f"Zak unitarity |‖Z h_k‖²-1|, k<={kmax}", norm_err, 1e-6),
            Check("Zak covariance phi(s(nu)g) = tau(s(nu)) phi(g)", cov_err, 1e-8)]


HERMITE_PAIRS = [(0, 0), (0, 1), (1, 2), (2, 0), (3, 3), (1, 5)]


def theorem_2_10(grid: induced.OmegaGrid, hspec: sch.HermiteBasisSpec, W: int = 4) -> Check:
    spec = grid.spec
    worst = 0.0
    for j1, j2 in HERMITE_PAIRS:
        phi, psi = sch.basis_vector(j1, hspec.D), sch.basis_vector(j2, hspec.D)
        F = induced.f_y([induced.zak(phi, grid)], [induced.zak(psi, grid)])
        idx = np.arange(-W, W + 1)
        alpha = sch.fourier_wigner_points(sch.rank_one(phi, psi), idx / float(spec.beta),
                                          idx / float(spec.alpha), hspec)
        for n, c in induced.fw_coefficients(F, W).items():
            worst = max(worst, abs(c - alpha[n.j + W, n.k + W]))
    return Check(f"Thm 2.10 alpha(F_XN)(n) = alpha(X)(n), |j|,|k|<={W}", worst, 1e-6)


def induced_trace_identity(grid: induced.OmegaGrid, hspec: sch.HermiteBasisSpec) -> Check:
    D = hspec.D
    phi = (sch.basis_vector(0, D) + sch.basis_vector(2, D)) / np.sqrt(2)
    psi = sch.basis_vector(1, D)
    pair = [(induced.zak(phi, grid), induced.zak(psi, grid))]
    X = sch.rank_one(phi, psi)
    worst = 0.0
    for P, Q in [(0, 0), (3, 5), (-7, 2), (grid.G + 1, -2)]:
        w = PhasePoint(P * grid.dx, Q * grid.dy)
        lhs = induced.induced_trace(pair, hg.section(w))
        rhs = sch.fourier_wigner(X, PhasePoint(float(w.x), float(w.y)), hspec)
        worst = max(worst, abs(lhs - rhs))
    return Check("tr(X_N rho_N(s(w))^*) = alpha(X)(w)", worst, 1e-6)


def round_trips(hspec: sch.HermiteBasisSpec, L: float = 4.0, cells: int = 128) -> list[Check]:
    grid = sch.GridFunction2D.window(L, cells)
    xx, yy = grid.mesh()
    f = grid.with_samples(np.exp(-np.pi * (xx**2 + yy**2) / 2))
    back = sch.fourier_wigner_grid(sch.weyl_transform(f, hspec), grid, hspec)
    e1 = np.linalg.norm(back.samples - f.samples) / np.linalg.norm(f.samples)
    D = hspec.D
    X = sch.rank_one((sch.basis_vector(0, D) + sch.basis_vector(3, D)) / np.sqrt(2),
                     (sch.basis_vector(1, D) + 1j * sch.basis_vector(2, D)) / np.sqrt(2))
    W = sch.weyl_transform(sch.fourier_wigner_grid(X, grid, hspec), hspec)
    e2 = np.linalg.norm(W - X) / np.linalg.norm(X)
    return [Check("round trip alpha(W(f)) = f", float(e1), 1e-3),
            Check("round trip W(alpha(X)) = X", float(e2), 1e-3)]


def phase_law(hspec: sch.HermiteBasisSpec) -> Check:
    D = hspec.D
    X = sch.rank_one(sch.basis_vector(0, D), (sch.basis_vector(1, D) + sch.basis_vector(2, D)) / np.sqrt(2))
    grid = sch.GridFunction2D.window(2.0, 24)
    worst = max(benedicks.phase_law_error(X, v, grid, hspec)
                for v in (PhasePoint(0.3, -0.2), PhasePoint(-0.6, 0.7)))
    return Check("alpha(X rho(s(v))^*) = conj(psi) alpha(X)(.+v)", worst, 1e-6)
