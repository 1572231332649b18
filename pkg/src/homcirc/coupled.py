"""Abstract controlled sources: one controlling branch, one controlled
branch, coupled through gains alpha (voltage) and beta (transimpedance).

The pair's characteristic is
    p1*v1 - q1*i1 = s1
    p2*v2 - q2*i2 + alpha*v1 + beta*i1 = s2,
covering all four ideal source types, non-ideal sources and ideal
switches by parameter choice.  The same two equations admit a two-seed
parametrization i = P_hat*u, v = Q_hat*u whose lower-triangular blocks
replace the diagonal entries in reduced circuit models.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CircuitError
from .numerics import DEFAULT_TOL, lu_solve_det


@dataclass(frozen=True)
class ControlledPair:
    controlling: int
    controlled: int
    p1: complex
    q1: complex
    p2: complex
    q2: complex
    alpha: complex
    beta: complex
    s1: complex = 0j
    s2: complex = 0j

    def __post_init__(self):
        if self.controlling == self.controlled:
            raise CircuitError("a branch cannot control itself")
        if self.p1 == 0 and self.q1 == 0:
            raise CircuitError("controlling branch at excluded point (0:0:1)")
        if self.p2 == 0 and self.q2 == 0:
            raise CircuitError("controlled branch at excluded point (0:0:1)")


def coupled_blocks(pair: ControlledPair):
    """2x2 blocks embedding the gains into the branch coefficient matrices:
    -Q*(i1,i2) + P*(v1,v2) reproduces the pair's characteristic."""
    p = np.array([[pair.p1, 0], [pair.alpha, pair.p2]], dtype=complex)
    q = np.array([[pair.q1, 0], [-pair.beta, pair.q2]], dtype=complex)
    return p, q


def hat_blocks(pair: ControlledPair):
    """Seed parametrization blocks: i = P_hat*u, v = Q_hat*u solves the
    source-free characteristic identically in u."""
    drive = pair.alpha * pair.q1 + pair.beta * pair.p1
    denom = pair.p2 * pair.p2 + pair.q2 * pair.q2
    if denom == 0:
        raise CircuitError(
            "controlled branch has p^2 + q^2 = 0; no symmetric seed "
            "parametrization exists for this complex-isotropic branch"
        )
    gamma = pair.q2 * drive / denom
    delta = -pair.p2 * drive / denom
    p_hat = np.array([[pair.p1, 0], [gamma, pair.p2]], dtype=complex)
    q_hat = np.array([[pair.q1, 0], [delta, pair.q2]], dtype=complex)
    return p_hat, q_hat


def validate_controls(controls, m: int):
    """Controls may not chain, share branches or point outside 1..m."""
    used = set()
    for c in controls:
        for b in (c.controlling, c.controlled):
            if not 1 <= b <= m:
                raise CircuitError(f"control references unknown branch {b}")
            if b in used:
                raise CircuitError(
                    f"branch {b} appears in more than one controlled pair"
                )
            used.add(b)


def embed_coupling(p_diag, q_diag, controls, hat: bool = False):
    """Full m x m coefficient matrices: diagonal from the branch triads,
    off-diagonal entries from the controlled pairs (plain or hat form)."""
    m = len(p_diag)
    validate_controls(controls, m)
    p_all = np.diag(np.asarray(p_diag, dtype=complex))
    q_all = np.diag(np.asarray(q_diag, dtype=complex))
    for c in controls:
        i, j = c.controlled - 1, c.controlling - 1
        if hat:
            p2, q2 = hat_blocks(c)
            p_all[i, j] = p2[1, 0]
            q_all[i, j] = q2[1, 0]
        else:
            p_all[i, j] = c.alpha
            q_all[i, j] = -c.beta
    return p_all, q_all


@dataclass(frozen=True)
class PiModel:
    """Three-element transistor small-signal stage: controlling input
    branch (p1:q1), controlled output branch (p2:q2) absorbing the shunt
    impedance, bridge branch (p3:q3)."""

    p1: complex
    q1: complex
    p2: complex
    q2: complex
    p3: complex
    q3: complex
    alpha: complex
    beta: complex


def zparam_system(pi: PiModel) -> np.ndarray:
    """6x6 coefficient matrix over (v1, v2, v3, i1, i2, i3): two port
    current balances, the outer voltage loop, three characteristics."""
    return np.array(
        [
            [0, 0, 0, 1, 0, 1],
            [0, 0, 0, 0, 1, -1],
            [1, -1, -1, 0, 0, 0],
            [pi.p1, 0, 0, -pi.q1, 0, 0],
            [pi.alpha, pi.p2, 0, pi.beta, -pi.q2, 0],
            [0, 0, pi.p3, 0, 0, -pi.q3],
        ],
        dtype=complex,
    )


def zparam_determinant(pi: PiModel) -> complex:
    """Closed form: p1*p2*q3 + p1*q2*p3 + q1*p2*p3 + alpha*q1*p3 + beta*p1*p3."""
    return (
        pi.p1 * pi.p2 * pi.q3
        + pi.p1 * pi.q2 * pi.p3
        + pi.q1 * pi.p2 * pi.p3
        + pi.alpha * pi.q1 * pi.p3
        + pi.beta * pi.p1 * pi.p3
    )


@dataclass(frozen=True)
class ZparamReport:
    exists: bool
    det: complex
    assembled_det: complex


def zparam_existence(pi: PiModel, tol: float = DEFAULT_TOL) -> ZparamReport:
    """Z-parameter description exists iff the stage determinant is nonzero.

    The closed form and the assembled 6x6 determinant are both computed;
    a disagreement beyond 1e-10 relative is reported as an error rather
    than silently trusted.
    """
    det = zparam_determinant(pi)
    assembled, _ = lu_solve_det(zparam_system(pi))
    scale = max(abs(det), abs(assembled), 1e-300)
    if abs(det - assembled) > 1e-10 * scale:
        raise CircuitError(
            f"closed-form determinant {det} disagrees with assembled {assembled}"
        )
    coeffs = [
        abs(pi.p1 * pi.p2 * pi.q3),
        abs(pi.p1 * pi.q2 * pi.p3),
        abs(pi.q1 * pi.p2 * pi.p3),
        abs(pi.alpha * pi.q1 * pi.p3),
        abs(pi.beta * pi.p1 * pi.p3),
    ]
    term_scale = sum(coeffs)
    exists = term_scale > 0 and abs(det) > tol * term_scale
    return ZparamReport(exists=exists, det=det, assembled_det=assembled)
