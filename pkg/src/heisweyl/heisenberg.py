"""Arithmetic in the Heisenberg group G = R^2 x U(1).

Coordinates may be floats, numpy arrays or :class:`fractions.Fraction`.
With Fractions the symplectic form is computed exactly and reduced modulo 2
before the phase is exponentiated, which is what the lattice code relies on.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from . import _hooks


@dataclass(frozen=True)
class PhasePoint:
    x: Any
    y: Any

    def __add__(self, other: PhasePoint) -> PhasePoint:
        return PhasePoint(self.x + other.x, self.y + other.y)

    def __sub__(self, other: PhasePoint) -> PhasePoint:
        return PhasePoint(self.x - other.x, self.y - other.y)

    def __neg__(self) -> PhasePoint:
        return PhasePoint(-self.x, -self.y)


@dataclass(frozen=True)
class GroupElement:
    """A point (x, y, z) of G with |z| = 1."""

    x: Any
    y: Any
    z: complex = 1.0 + 0.0j

    @property
    def point(self) -> PhasePoint:
        return PhasePoint(self.x, self.y)

    def __mul__(self, other: GroupElement) -> GroupElement:
        return multiply(self, other)


IDENTITY = GroupElement(0, 0, 1.0 + 0.0j)


def omega(w: PhasePoint, w2: PhasePoint):
    """Symplectic form x*y' - y*x'."""
    return w.x * w2.y - w.y * w2.x


def half_turns(r):
    """exp(i*pi*r); exact reduction mod 2 when ``r`` is a Fraction."""
    if isinstance(r, Fraction):
        r = r - 2 * (r.numerator // (2 * r.denominator))
        return cmath.exp(1j * np.pi * float(r))
    if isinstance(r, (int, np.integer)):
        return 1.0 + 0.0j if r % 2 == 0 else -1.0 + 0.0j
    return np.exp(1j * np.pi * np.asarray(r, dtype=float))


def half_turns_ratio(num, den: int):
    """exp(i*pi*num/den) for integer arrays ``num``, reduced mod 2*den first."""
    num = np.mod(np.asarray(num, dtype=np.int64), 2 * den)
    return np.exp(1j * np.pi * num / den)


def psi_ratio(num, den: int):
    """cocycle_psi for a symplectic form already known to equal num/den."""
    if not _hooks.ENABLED["psi_phase"]:
        return np.ones(np.shape(num), dtype=complex)
    return half_turns_ratio(num, den)


def _unit(z):
    return z / abs(z)


def cocycle_psi(w: PhasePoint, w2: PhasePoint):
    """Central phase of psi(w, w2) = (0, 0, exp(i*pi*omega(w, w2)))."""
    if not _hooks.ENABLED["psi_phase"]:
        return 1.0 + 0.0j
    return half_turns(omega(w, w2))


def pairing_e(w: PhasePoint, w2: PhasePoint):
    """The alternating bicharacter exp(2*pi*i*omega(w, w2))."""
    return half_turns(2 * omega(w, w2))


def multiply(g: GroupElement, g2: GroupElement) -> GroupElement:
    z = g.z * g2.z * cocycle_psi(g.point, g2.point)
    return GroupElement(g.x + g2.x, g.y + g2.y, _unit(z))


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(-g.x, -g.y, _unit(np.conj(g.z)))


def section(w: PhasePoint) -> GroupElement:
    return GroupElement(w.x, w.y, 1.0 + 0.0j)


def projection(g: GroupElement) -> PhasePoint:
    return PhasePoint(g.x, g.y)


def central(z) -> GroupElement:
    return GroupElement(0, 0, _unit(complex(z)))


def commutator(g: GroupElement, g2: GroupElement) -> GroupElement:
    return multiply(multiply(g, g2), multiply(inverse(g), inverse(g2)))


def distance(g: GroupElement, g2: GroupElement) -> float:
    """Component-wise max deviation, used by the algebra checks."""
    return float(max(abs(g.x - g2.x), abs(g.y - g2.y), abs(g.z - g2.z)))
