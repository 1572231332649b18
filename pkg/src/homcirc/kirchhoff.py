"""Tree-enumerator polynomial of a digraph in its two-variables-per-branch
form, its impedance/admittance dehomogenizations, and the scale-invariant
degeneracy test for circuit configurations.

The polynomial is kept structurally, one monomial per spanning tree:
tree branches contribute their p factor, cotree branches their q factor.
Evaluation works for any scalar type with * and + (floats, complex,
fractions), which the exact-arithmetic tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

from .elements import Configuration
from .errors import DimensionMismatch
from .graph import Digraph, spanning_trees, DEFAULT_TREE_CAP
from .numerics import DEFAULT_TOL


@dataclass(frozen=True)
class KirchhoffPolynomial:
    m: int
    trees: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "trees", tuple(tuple(t) for t in self.trees)
        )

    @property
    def tau(self) -> int:
        return len(self.trees)

    def cotrees(self) -> tuple[tuple[int, ...], ...]:
        full = set(range(1, self.m + 1))
        return tuple(
            tuple(sorted(full - set(t))) for t in self.trees
        )


def kirchhoff_polynomial(g: Digraph, cap: int = DEFAULT_TREE_CAP) -> KirchhoffPolynomial:
    return KirchhoffPolynomial(m=g.m, trees=tuple(spanning_trees(g, cap)))


def _check_length(k: KirchhoffPolynomial, seq, name):
    if len(seq) != k.m:
        raise DimensionMismatch(
            f"{name} has length {len(seq)}, expected {k.m}"
        )


def evaluate(k: KirchhoffPolynomial, p, q):
    """Sum over trees of prod(p[tree]) * prod(q[cotree])."""
    _check_length(k, p, "p")
    _check_length(k, q, "q")
    total = 0
    for tree in k.trees:
        in_tree = set(tree)
        term = 1
        for j in range(1, k.m + 1):
            term = term * (p[j - 1] if j in in_tree else q[j - 1])
        total = total + term
    return total


def magnitude(k: KirchhoffPolynomial, p, q) -> float:
    """Sum of monomial magnitudes; the scale against which a value of the
    polynomial counts as zero."""
    _check_length(k, p, "p")
    _check_length(k, q, "q")
    total = 0.0
    for tree in k.trees:
        in_tree = set(tree)
        term = 1.0
        for j in range(1, k.m + 1):
            term *= abs(p[j - 1]) if j in in_tree else abs(q[j - 1])
        total += term
    return total


def evaluate_tree_form(k: KirchhoffPolynomial, y):
    """Maxwell's tree form: sum over trees of prod(y[tree]); equals
    evaluate(k, y, ones)."""
    _check_length(k, y, "y")
    total = 0
    for tree in k.trees:
        term = 1
        for j in tree:
            term = term * y[j - 1]
        total = total + term
    return total


def evaluate_cotree_form(k: KirchhoffPolynomial, z):
    """Cotree (loop) form: sum over trees of prod(z[cotree]); equals
    evaluate(k, ones, z)."""
    _check_length(k, z, "z")
    total = 0
    for cotree in k.cotrees():
        term = 1
        for j in cotree:
            term = term * z[j - 1]
        total = total + term
    return total


@dataclass(frozen=True)
class DegeneracyReport:
    degenerate: bool
    value: complex
    scale: float


def is_degenerate(
    g: Digraph,
    cfg: Configuration,
    tol: float = DEFAULT_TOL,
    poly: KirchhoffPolynomial | None = None,
) -> DegeneracyReport:
    """Whether the circuit defined by (g, cfg) lacks a unique solution.

    Decided on the source-free projection only: the polynomial is
    evaluated at (p, q) and compared against the sum of monomial
    magnitudes, which makes the verdict invariant under per-branch
    rescaling.  Excitations never change the answer.
    """
    k = poly if poly is not None else kirchhoff_polynomial(g)
    cfg.require_size(k.m)
    p = cfg.p_vector()
    q = cfg.q_vector()
    value = complex(evaluate(k, p, q))
    scale = magnitude(k, p, q)
    if scale == 0.0:
        return DegeneracyReport(degenerate=True, value=value, scale=scale)
    return DegeneracyReport(
        degenerate=abs(value) < tol * scale, value=value, scale=scale
    )


def _monomial(indices, letter):
    return "*".join(f"{letter}{j}" for j in indices)


def format_homogeneous(k: KirchhoffPolynomial) -> str:
    """Render like ``p1*p2*q3 + p1*q2*p3 + q1*p2*p3``: per branch, p if it
    is in the tree and q otherwise, monomials sorted by tree."""
    if not k.trees:
        return "0"
    parts = []
    for tree in sorted(k.trees):
        in_tree = set(tree)
        factors = [
            f"p{j}" if j in in_tree else f"q{j}" for j in range(1, k.m + 1)
        ]
        parts.append("*".join(factors))
    return " + ".join(parts)


def format_tree_form(k: KirchhoffPolynomial) -> str:
    if not k.trees:
        return "0"
    parts = [_monomial(t, "y") or "1" for t in sorted(k.trees)]
    return " + ".join(parts)


def format_cotree_form(k: KirchhoffPolynomial) -> str:
    if not k.trees:
        return "0"
    parts = [_monomial(c, "z") or "1" for c in sorted(k.cotrees())]
    return " + ".join(parts)
