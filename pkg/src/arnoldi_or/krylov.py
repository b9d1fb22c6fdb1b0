"""Arnoldi iteration and Hessenberg power blocks."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import AlreadyBrokenDown, ZeroVector
from .linalg import as_cmatrix, as_cvector
from .mmio import write_matrix_market

BREAKDOWN_TOL = 1e-14


class ArnoldiDecomposition:
    """Orthonormal Krylov basis ``Q`` and Hessenberg ``H`` with ``A Q_m = Q_{m+1} H``.

    Storage for all ``n`` possible steps is allocated up front; the public
    ``Q`` and ``H`` properties return views trimmed to the steps done.  When
    the Krylov space becomes invariant (``breakdown_at`` is set) the last
    row of ``H`` is exactly zero and ``Q`` has only ``m`` columns.
    """

    def __init__(self, b, reorth=True, anorm=None):
        b = as_cvector(b, "b")
        n = b.shape[0]
        beta = np.linalg.norm(b)
        if beta == 0.0:
            raise ZeroVector("starting vector is zero")
        self.n = n
        self.reorth = reorth
        self.b_norm = float(beta)
        self.anorm = anorm
        self._Q = np.zeros((n, n + 1), dtype=complex)
        self._H = np.zeros((n + 1, n), dtype=complex)
        self._Q[:, 0] = b / beta
        self.steps_done = 0
        self.breakdown_at = None

    @property
    def invariant(self):
        return self.breakdown_at is not None

    @property
    def Q(self):
        m = self.steps_done
        return self._Q[:, : m if self.invariant else m + 1]

    @property
    def H(self):
        m = self.steps_done
        return self._H[: m + 1, :m]

    def basis(self, k):
        return self._Q[:, :k]

    def square(self, s=None):
        """Leading ``s x s`` block of ``H`` (default: all steps done)."""
        s = self.steps_done if s is None else s
        return self._H[:s, :s]

    def extend(self, A, extra_steps):
        return arnoldi_extend(self, A, extra_steps)

    def dump(self, directory):
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        write_matrix_market(d / "Q.mtx", self.Q)
        write_matrix_market(d / "H.mtx", self.H)


def arnoldi_start(A, b, reorth=True):
    A = as_cmatrix(A, "A", square=True)
    dec = ArnoldiDecomposition(b, reorth=reorth, anorm=float(np.linalg.norm(A)))
    if dec.n != A.shape[0]:
        raise ValueError("A and b have incompatible dimensions")
    return dec


def arnoldi_extend(dec, A, extra_steps):
    """Run ``extra_steps`` more Arnoldi steps (modified Gram-Schmidt).

    With ``dec.reorth`` one further full orthogonalization pass is made and
    its coefficients are folded into ``H``.  A subdiagonal entry below
    ``1e-14 ||A||_F`` marks an invariant subspace and stops the iteration;
    step ``n`` always ends that way.
    """
    if dec.invariant:
        raise AlreadyBrokenDown(f"Krylov space became invariant at step {dec.breakdown_at}")
    if dec.steps_done + extra_steps > dec.n:
        raise ValueError(f"cannot run {dec.steps_done + extra_steps} steps with n = {dec.n}")
    if dec.anorm is None:
        dec.anorm = float(np.linalg.norm(A))
    tol = BREAKDOWN_TOL * dec.anorm
    Q, H = dec._Q, dec._H
    for _ in range(extra_steps):
        j = dec.steps_done
        w = A @ Q[:, j]
        for i in range(j + 1):
            h = np.vdot(Q[:, i], w)
            H[i, j] = h
            w -= h * Q[:, i]
        if dec.reorth:
            for i in range(j + 1):
                h = np.vdot(Q[:, i], w)
                H[i, j] += h
                w -= h * Q[:, i]
        beta = np.linalg.norm(w)
        dec.steps_done = j + 1
        if beta <= tol or j + 1 == dec.n:
            H[j + 1, j] = 0.0
            dec.breakdown_at = j + 1
            break
        H[j + 1, j] = beta
        Q[:, j + 1] = w / beta
    return dec


def hessenberg_power_block(H, j, k):
    """Top-left ``s x k`` block of ``H_s^j``, ``s = H.shape[1]``.

    Only the structurally nonzero rows are multiplied, so rows below
    ``k + j`` come out as exact zeros.  ``j = 0`` gives ``[I_k; 0]``.
    """
    H = np.asarray(H)
    s = H.shape[1]
    Hs = H[:s, :s]
    X = np.zeros((s, k), dtype=complex)
    X[:k, :k] = np.eye(k)
    for i in range(1, j + 1):
        rows = min(k + i, s)
        prev = min(k + i - 1, s)
        Y = np.zeros((s, k), dtype=complex)
        Y[:rows] = Hs[:rows, :prev] @ X[:prev]
        X = Y
    return X


def polynomial_block(H, p, k):
    """``sum_j c_j H_s^j`` restricted to its first ``k`` columns (monomial ``p``)."""
    H = np.asarray(H)
    s = H.shape[1]
    Hs = H[:s, :s]
    c = p.shifted(0).coeffs
    X = np.zeros((s, k), dtype=complex)
    X[:k, :k] = np.eye(k)
    out = c[0] * X
    for i in range(1, len(c)):
        rows = min(k + i, s)
        prev = min(k + i - 1, s)
        Y = np.zeros((s, k), dtype=complex)
        Y[:rows] = Hs[:rows, :prev] @ X[:prev]
        X = Y
        out = out + c[i] * X
    return out


def polynomial_column(H, p, col):
    """Column ``col`` (zero-based) of ``p(H_s)``; cost grows with ``col + deg p``."""
    H = np.asarray(H)
    s = H.shape[1]
    c = p.shifted(0).coeffs
    x = np.zeros(s, dtype=complex)
    x[col] = 1.0
    out = c[0] * x
    top = col + 1
    for i in range(1, len(c)):
        rows = min(top + 1, s)
        x_new = np.zeros(s, dtype=complex)
        x_new[:rows] = H[:rows, :top] @ x[:top]
        x = x_new
        top = rows
        out = out + c[i] * x
    return out


class ArnoldiPolynomial:
    """Scalar polynomial ``p`` with ``Q_k y = p(A) q_1``, from the Arnoldi recurrence."""

    def __init__(self, H, y, scale=1.0):
        self.y = np.asarray(y, dtype=complex) * scale
        self.H = np.asarray(H)[: len(self.y), : len(self.y) - 1]

    @property
    def degree(self):
        return len(self.y) - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        k = len(self.y)
        pis = [np.ones_like(z)]
        for j in range(k - 1):
            acc = z * pis[j]
            for i in range(j + 1):
                acc = acc - self.H[i, j] * pis[i]
            pis.append(acc / self.H[j + 1, j])
        out = sum(yj * pj for yj, pj in zip(self.y, pis))
        return out if np.ndim(out) else complex(out)
