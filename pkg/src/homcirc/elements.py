"""Projective branch descriptions.

A linear branch is the locus of (i, v) pairs with p*v - q*i = s.  The
coefficient triple (p:q:s) only matters up to a common nonzero factor,
and (p, q) = (0, 0) is excluded.  Classical elements are the affine
corners of this description: impedances, admittances and both source
types, convertible back and forth where the relevant patch exists.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import CircuitError, DimensionMismatch
from .numerics import DEFAULT_TOL


@dataclass(frozen=True)
class Triad:
    p: complex
    q: complex
    s: complex = 0j

    def __post_init__(self):
        for name in ("p", "q", "s"):
            z = complex(getattr(self, name))
            if not (cmath.isfinite(z)):
                raise CircuitError(f"non-finite triad coordinate {name}={z}")
            object.__setattr__(self, name, z)
        if self.p == 0 and self.q == 0:
            raise CircuitError("excluded projective point (0:0:1)")

    def scaled(self, mu: complex) -> "Triad":
        if mu == 0:
            raise CircuitError("projective scaling factor must be nonzero")
        return Triad(self.p * mu, self.q * mu, self.s * mu)


SHORT = Triad(1, 0, 0)
OPEN = Triad(0, 1, 0)


def normalize(t: Triad) -> Triad:
    """Canonical representative: the largest of |p|, |q| is scaled to 1.

    Anchoring on (p, q) rather than s keeps the excluded point out of reach.
    """
    c = t.p if abs(t.p) >= abs(t.q) else t.q
    return Triad(t.p / c, t.q / c, t.s / c)


def project_source_free(t: Triad) -> tuple[complex, complex]:
    """Drop the excitation: (p:q:s) -> (p:q)."""
    return (t.p, t.q)


def in_z_patch(t: Triad, tol: float = DEFAULT_TOL) -> bool:
    """Current-controlled (impedance) patch: p != 0 at tolerance."""
    return abs(t.p) > tol * max(abs(t.p), abs(t.q))


def in_y_patch(t: Triad, tol: float = DEFAULT_TOL) -> bool:
    """Voltage-controlled (admittance) patch: q != 0 at tolerance."""
    return abs(t.q) > tol * max(abs(t.p), abs(t.q))


def patch(t: Triad, tol: float = DEFAULT_TOL) -> dict:
    return {"Z_patch": in_z_patch(t, tol), "Y_patch": in_y_patch(t, tol)}


@dataclass(frozen=True)
class ClassicalViews:
    z: complex | None = None
    v_s: complex | None = None
    y: complex | None = None
    i_s: complex | None = None


def classical_views(t: Triad, tol: float = DEFAULT_TOL) -> ClassicalViews:
    """Impedance/source and admittance/source views, where they exist.

    Both views are populated for regular elements; only one survives for
    ideal sources, shorts and opens.  The result does not depend on the
    triad representative.
    """
    z = v_s = y = i_s = None
    if in_z_patch(t, tol):
        z = t.q / t.p
        v_s = t.s / t.p
    if in_y_patch(t, tol):
        y = t.p / t.q
        i_s = t.s / t.q
    return ClassicalViews(z=z, v_s=v_s, y=y, i_s=i_s)


def from_impedance(z: complex, v_s: complex = 0) -> Triad:
    return Triad(1, z, v_s)


def from_admittance(y: complex, i_s: complex = 0) -> Triad:
    return Triad(y, 1, i_s)


def from_vsource(v: complex, z: complex = 0) -> Triad:
    return Triad(1, z, v)


def from_isource(i: complex, y: complex = 0) -> Triad:
    return Triad(y, 1, i)


@dataclass(frozen=True)
class Configuration:
    """One triad per branch, in branch order."""

    triads: tuple[Triad, ...]

    def __post_init__(self):
        object.__setattr__(self, "triads", tuple(self.triads))

    def __len__(self):
        return len(self.triads)

    def require_size(self, m: int):
        if len(self.triads) != m:
            raise DimensionMismatch(
                f"configuration has {len(self.triads)} triads for {m} branches"
            )

    def p_vector(self) -> np.ndarray:
        return np.array([t.p for t in self.triads], dtype=complex)

    def q_vector(self) -> np.ndarray:
        return np.array([t.q for t in self.triads], dtype=complex)

    def s_vector(self) -> np.ndarray:
        return np.array([t.s for t in self.triads], dtype=complex)

    def replace(self, branch: int, triad: Triad) -> "Configuration":
        """New configuration with the 1-based ``branch`` swapped out."""
        if not 1 <= branch <= len(self.triads):
            raise DimensionMismatch(f"branch {branch} out of range")
        triads = list(self.triads)
        triads[branch - 1] = triad
        return Configuration(tuple(triads))

    def extend(self, *triads: Triad) -> "Configuration":
        return Configuration(self.triads + tuple(triads))
