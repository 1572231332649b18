"""Dense linear algebra helpers: LU solves/determinants over R or C,
exact integer determinants, generalized Schur complements and the
combinatorial permutation signature used by the tree identities.

All functions are pure; matrices are never modified in place.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    CardinalityMismatch,
    DimensionMismatch,
    SingularMatrix,
    SingularPivotBlock,
)

DEFAULT_TOL = 1e-9


def as_matrix(mat) -> np.ndarray:
    a = np.asarray(mat, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got ndim={a.ndim}")
    return a


def row_scale(mat) -> float:
    """Product of per-row max moduli; the natural scale for |det|."""
    a = as_matrix(mat)
    if a.shape[0] == 0:
        return 1.0
    return float(np.prod(np.max(np.abs(a), axis=1)))


def lu_solve_det(mat, rhs=None, tol: float = DEFAULT_TOL):
    """Determinant (via LU with partial pivoting) and optional solve.

    Returns ``(det, solution)``; ``solution`` is None when no rhs is given.
    A solve is refused with SingularMatrix when |det| falls below
    ``tol`` times the product of row max moduli.  Determinant-only calls
    never raise: a tiny determinant is a legitimate answer there.
    """
    a = as_matrix(mat)
    n, m = a.shape
    if n != m:
        raise DimensionMismatch(f"matrix is {n}x{m}, expected square")
    if n == 0:
        det = 1.0 + 0j
    else:
        det = complex(np.linalg.det(a))
    if rhs is None:
        return det, None
    b = np.asarray(rhs, dtype=complex)
    if b.shape[0] != n:
        raise DimensionMismatch(f"rhs has {b.shape[0]} rows, expected {n}")
    scale = row_scale(a)
    ratio = abs(det) / scale if scale > 0 else 0.0
    if ratio < tol:
        raise SingularMatrix(
            f"matrix singular at tolerance {tol:g} (det ratio {ratio:.3e})",
            ratio=ratio,
        )
    if n == 0:
        return det, b.copy()
    return det, np.linalg.solve(a, b)


def _to_int(x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    f = float(x.real) if isinstance(x, complex) else float(x)
    if f != int(f):
        raise DimensionMismatch(f"non-integral entry {x!r} in integer matrix")
    return int(f)


def integer_det(mat) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Works on Python ints, so no overflow and no rounding; sign is exact.
    """
    a = np.asarray(mat)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return 1
    m = [[_to_int(a[i, j]) for j in range(n)] for i in range(n)]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # exact by the Bareiss identity: prev divides the numerator
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _check_index_set(sigma, m, name):
    s = tuple(int(j) for j in sigma)
    if any(s[i] >= s[i + 1] for i in range(len(s) - 1)):
        raise DimensionMismatch(f"{name} must be strictly increasing, got {s}")
    if s and (s[0] < 1 or s[-1] > m):
        raise DimensionMismatch(f"{name} entries must lie in 1..{m}, got {s}")
    return s


def permutation_signature(sigma1, sigma2, m: int) -> int:
    """Sign of the order-preserving permutation sending sigma1 onto sigma2
    (and the complement onto the complement): (-1)**(sum(sigma1)+sum(sigma2)).
    """
    s1 = _check_index_set(sigma1, m, "sigma1")
    s2 = _check_index_set(sigma2, m, "sigma2")
    if len(s1) != len(s2):
        raise CardinalityMismatch(
            f"index sets have sizes {len(s1)} and {len(s2)}"
        )
    return -1 if (sum(s1) + sum(s2)) % 2 else 1


def complement(sigma, m: int) -> tuple:
    s = set(sigma)
    return tuple(j for j in range(1, m + 1) if j not in s)


def _submatrix(a, rows, cols):
    ri = [r - 1 for r in rows]
    ci = [c - 1 for c in cols]
    return a[np.ix_(ri, ci)]


def schur_det(mat, alpha, omega, tol: float = DEFAULT_TOL) -> complex:
    """det M computed through the Schur complement of the (alpha, omega)
    block: sgn * det(M[alpha,omega]) * det(M/M[alpha,omega]).
    """
    a = as_matrix(mat)
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionMismatch("schur_det needs a square matrix")
    al = _check_index_set(alpha, n, "alpha")
    om = _check_index_set(omega, n, "omega")
    if len(al) != len(om):
        raise CardinalityMismatch(
            f"alpha and omega have sizes {len(al)} and {len(om)}"
        )
    al_c = complement(al, n)
    om_c = complement(om, n)
    block = _submatrix(a, al, om)
    try:
        det_block, x = lu_solve_det(block, _submatrix(a, al, om_c), tol=tol)
    except SingularMatrix as exc:
        raise SingularPivotBlock(
            f"pivot block M[{al},{om}] is singular", ratio=exc.ratio
        ) from exc
    comp = _submatrix(a, al_c, om_c) - _submatrix(a, al_c, om) @ x
    det_comp, _ = lu_solve_det(comp)
    sgn = permutation_signature(al, om, n)
    return sgn * det_block * det_comp
