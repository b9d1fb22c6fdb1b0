"""Dense complex linear algebra kernels.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``;
:func:`as_cmatrix` and :func:`as_cvector` validate shape and finiteness at
the boundaries of the public API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePair, NonFiniteInput, RankDeficient, SingularMatrix

PIVOT_TOL = 1e-14
RANK_TOL = 1e-14


def as_cvector(x, name="vector"):
    v = np.array(x, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput(f"{name} has non-finite entries")
    return v


def as_cmatrix(x, name="matrix", square=False):
    M = np.array(x, dtype=complex)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFiniteInput(f"{name} has non-finite entries")
    return M


def unit_vector(n, k):
    """Canonical basis vector e_k (zero-based index)."""
    e = np.zeros(n, dtype=complex)
    e[k] = 1.0
    return e


def lu_factor(A, singular_tol=PIVOT_TOL, strict=True):
    """LU factorization with partial pivoting, ``P A = L U``.

    Returns ``(LU, perm)`` with the unit lower factor stored below the
    diagonal.  With ``strict=False`` tiny pivots are replaced by
    ``singular_tol`` times the matrix scale instead of raising, which is
    what inverse iteration wants.
    """
    LU = as_cmatrix(A, "A", square=True).copy()
    n = LU.shape[0]
    scale = np.max(np.linalg.norm(LU, axis=0)) if n else 0.0
    thresh = singular_tol * scale
    perm = np.arange(n)
    for j in range(n):
        p = j + int(np.argmax(np.abs(LU[j:, j])))
        if p != j:
            LU[[j, p]] = LU[[p, j]]
            perm[[j, p]] = perm[[p, j]]
        piv = LU[j, j]
        if abs(piv) <= thresh or scale == 0.0:
            if strict:
                raise SingularMatrix(
                    f"pivot {abs(piv):.3e} at column {j} below {thresh:.3e}")
            LU[j, j] = piv = thresh if thresh > 0 else singular_tol
        LU[j + 1:, j] /= piv
        LU[j + 1:, j + 1:] -= np.outer(LU[j + 1:, j], LU[j, j + 1:])
    return LU, perm


def lu_solve(factors, b):
    LU, perm = factors
    x = np.array(b, dtype=complex)[perm]
    n = LU.shape[0]
    for i in range(1, n):
        x[i] -= LU[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - LU[i, i + 1:] @ x[i + 1:]) / LU[i, i]
    return x


def dense_solve(A, b):
    """Solve ``A x = b`` by LU with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides.  Raises
    :class:`SingularMatrix` when a pivot falls below ``1e-14`` times the
    largest initial column norm.
    """
    A = as_cmatrix(A, "A", square=True)
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"dimension mismatch: A is {A.shape}, b has {b.shape[0]} rows")
    return lu_solve(lu_factor(A), b)


def solve_upper_triangular(R, y):
    R = np.asarray(R)
    x = np.array(y, dtype=complex)
    for i in range(R.shape[0] - 1, -1, -1):
        x[i] = (x[i] - R[i, i + 1:] @ x[i + 1:]) / R[i, i]
    return x


@dataclass(frozen=True)
class GivensRotation:
    """Plane rotation acting on rows ``i < j``.

    The 2x2 block is ``[[c, s], [-conj(s), c]]`` with ``c`` real and
    nonnegative, so that ``G @ (a, b) = (rho, 0)``.
    """

    i: int
    j: int
    c: float
    s: complex

    def apply(self, x):
        """Rotate rows ``i`` and ``j`` of ``x`` in place and return ``x``."""
        xi = x[self.i]
        xj = x[self.j]
        x[self.i] = self.c * xi + self.s * xj
        x[self.j] = -self.s.conjugate() * xi + self.c * xj
        return x

    def apply_pair(self, a, b):
        return (self.c * a + self.s * b,
                -self.s.conjugate() * a + self.c * b)

    def matrix(self, n):
        G = np.eye(n, dtype=complex)
        G[self.i, self.i] = self.c
        G[self.i, self.j] = self.s
        G[self.j, self.i] = -self.s.conjugate()
        G[self.j, self.j] = self.c
        return G


def compute_givens(a, b, i=0, j=1):
    """Rotation annihilating ``b`` against ``a``.

    Returns ``(rotation, rho)`` where ``rho = (a/|a|) * hypot(|a|, |b|)``
    (or ``|b|`` when ``a == 0``).
    """
    a = complex(a)
    b = complex(b)
    m = max(abs(a.real), abs(a.imag), abs(b.real), abs(b.imag))
    if m == 0.0:
        raise DegeneratePair("cannot build a Givens rotation for (0, 0)")
    if b == 0:
        return GivensRotation(i, j, 1.0, 0j), a
    # scale first so tiny (subnormal) inputs keep full relative accuracy
    sa, sb = a / m, b / m
    abs_a, abs_b = abs(sa), abs(sb)
    if abs_a == 0.0:
        return GivensRotation(i, j, 0.0, sb.conjugate() / abs_b), complex(abs_b * m)
    r = math.hypot(abs_a, abs_b)
    pa = a / max(abs(a.real), abs(a.imag))
    phase = pa / abs(pa)
    return GivensRotation(i, j, abs_a / r, phase * sb.conjugate() / r), phase * (r * m)


def givens_qr_least_squares(M, rhs):
    """Minimize ``||rhs - M y||_2`` by Givens QR.

    Every subdiagonal entry is eliminated column by column, top to bottom.
    Returns ``(y, residual_norm)``.
    """
    R = as_cmatrix(M, "M").copy()
    g = as_cvector(rhs, "rhs").copy()
    m, k = R.shape
    if m < k:
        raise ValueError(f"need at least as many rows as columns, got {R.shape}")
    if g.shape[0] != m:
        raise ValueError("rhs length does not match M")
    thresh = RANK_TOL * np.linalg.norm(R)
    for col in range(k):
        for row in range(col + 1, m):
            if R[row, col] == 0:
                continue
            G, rho = compute_givens(R[col, col], R[row, col], col, row)
            top = R[col, col + 1:].copy()
            R[col, col + 1:] = G.c * top + G.s * R[row, col + 1:]
            R[row, col + 1:] = -G.s.conjugate() * top + G.c * R[row, col + 1:]
            R[col, col] = rho
            R[row, col] = 0
            G.apply(g)
        if abs(R[col, col]) < thresh or thresh == 0.0:
            raise RankDeficient(
                f"|R[{col},{col}]| = {abs(R[col, col]):.3e} below {thresh:.3e}")
    y = solve_upper_triangular(R[:k, :k], g[:k])
    return y, float(np.linalg.norm(g[k:]))


def householder_least_squares(M, rhs):
    """Minimize ``||rhs - M y||_2`` by a dense Householder QR.

    Structure is ignored: every column is reduced with one reflector applied
    to the whole trailing block.  Returns ``(y, residual_norm)``.
    """
    R = as_cmatrix(M, "M").copy()
    g = as_cvector(rhs, "rhs").copy()
    m, k = R.shape
    if m < k:
        raise ValueError(f"need at least as many rows as columns, got {R.shape}")
    if g.shape[0] != m:
        raise ValueError("rhs length does not match M")
    thresh = RANK_TOL * np.linalg.norm(R)
    for col in range(k):
        x = R[col:, col]
        alpha = np.linalg.norm(x)
        if alpha < thresh or thresh == 0.0:
            raise RankDeficient(f"column {col} is numerically dependent")
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        R[col:, col:] -= 2.0 * np.outer(v, v.conj() @ R[col:, col:])
        g[col:] -= 2.0 * v * np.vdot(v, g[col:])
        if abs(R[col, col]) < thresh:
            raise RankDeficient(f"|R[{col},{col}]| = {abs(R[col, col]):.3e} below {thresh:.3e}")
    y = solve_upper_triangular(R[:k, :k], g[:k])
    return y, float(np.linalg.norm(g[k:]))
