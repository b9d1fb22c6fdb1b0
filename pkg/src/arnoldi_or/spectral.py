"""Eigenvalues, condition numbers and the numerical range.

The field of values W(A) is traced by support lines: for each angle theta
the top eigenvector q of the Hermitian part of ``exp(i theta) A`` gives the
boundary point ``q^H A q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    ClusteredSpectrum,
    NoConvergence,
    NotHermitian,
    NotPositiveDefinite,
    SingularMatrix,
)
from .linalg import as_cmatrix, lu_factor, lu_solve

DEFAULT_ANGLES = 256
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None


@dataclass(frozen=True)
class RegionBoundary:
    points: np.ndarray
    angles: np.ndarray
    kind: str = "numerical_range"

    def to_csv(self, path):
        lines = ["theta,re,im"]
        for t, z in zip(self.angles, self.points):
            lines.append(f"{t:.17g},{z.real:.17g},{z.imag:.17g}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class HermitianSqrt:
    root: np.ndarray
    eigenvalues: np.ndarray = field(repr=False, default=None)
    eigenvectors: np.ndarray = field(repr=False, default=None)

    def inverse(self):
        """S^{-1/2}, from the stored eigendecomposition."""
        V = self.eigenvectors
        return (V / np.sqrt(self.eigenvalues)) @ V.conj().T


def hermitian_eigs(H, vectors=False):
    """Eigenvalues (ascending) and optionally eigenvectors of a Hermitian matrix."""
    H = as_cmatrix(H, "H", square=True)
    scale = np.linalg.norm(H)
    if np.linalg.norm(H - H.conj().T) > 1e-12 * scale:
        raise NotHermitian("matrix is not Hermitian to 1e-12 relative")
    Hs = 0.5 * (H + H.conj().T)
    if vectors:
        w, V = np.linalg.eigh(Hs)
        return Spectrum(w, V)
    return Spectrum(np.linalg.eigvalsh(Hs))


def _inverse_iteration(A, lam, rng, steps=3):
    n = A.shape[0]
    factors = lu_factor(A - lam * np.eye(n), strict=False)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    for _ in range(steps):
        x = lu_solve(factors, x)
        x /= np.linalg.norm(x)
    return x


def general_eigs(A, vectors=False, seed=0):
    """Eigenvalues of a general square matrix.

    Eigenvectors, when requested, come from inverse iteration started at a
    seeded random complex vector and have unit 2-norm.
    """
    A = as_cmatrix(A, "A", square=True)
    if A.shape[0] > 500:
        raise ValueError("dense eigensolver limited to n <= 500")
    try:
        lam = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    if not vectors:
        return Spectrum(lam)
    rng = np.random.default_rng(seed)
    V = np.column_stack([_inverse_iteration(A, l, rng) for l in lam])
    return Spectrum(lam, V)


def cond2(A):
    """2-norm condition number, sqrt(lambda_max / lambda_min) of A^H A."""
    A = as_cmatrix(A, "A", square=True)
    w = hermitian_eigs(A.conj().T @ A).eigenvalues
    lo, hi = w[0], w[-1]
    if lo <= 1e-28 * hi:
        raise SingularMatrix("matrix is numerically singular")
    return float(math.sqrt(hi / lo))


def eigenvector_condition(A, seed=0):
    """Condition number of a matrix of unit eigenvectors of ``A``."""
    A = as_cmatrix(A, "A", square=True)
    decomp = general_eigs(A, vectors=True, seed=seed)
    lam = decomp.eigenvalues
    tol = 1e-8 * np.linalg.norm(A)
    gaps = np.abs(lam[:, None] - lam[None, :]) + np.diag(np.full(len(lam), np.inf))
    if len(lam) > 1 and gaps.min() <= tol:
        raise ClusteredSpectrum(f"eigenvalues closer than {tol:.3e}")
    return cond2(decomp.eigenvectors)


def _rotated_hermitian_part(A, theta):
    E = np.exp(1j * theta) * A
    return 0.5 * (E + E.conj().T)


def support_point(A, theta):
    """Boundary point of W(A) in direction ``theta`` and its unit vector."""
    w, V = np.linalg.eigh(_rotated_hermitian_part(A, theta))
    q = V[:, -1]
    return complex(q.conj() @ A @ q), q, float(w[-1])


def numerical_range_boundary(A, m_angles=DEFAULT_ANGLES):
    A = as_cmatrix(A, "A", square=True)
    if m_angles < 8:
        raise ValueError("m_angles must be at least 8")
    angles = 2.0 * np.pi * np.arange(m_angles) / m_angles
    points = np.array([support_point(A, t)[0] for t in angles])
    return RegionBoundary(points, angles, "numerical_range")


def _top_eig(A, theta):
    return float(np.linalg.eigvalsh(_rotated_hermitian_part(A, theta))[-1])


def numerical_radius(A, m_angles=DEFAULT_ANGLES, window=1e-6):
    """Maximum modulus over W(A).

    Coarse grid over the angle, then golden-section refinement around the
    first grid maximizer until the bracket is narrower than ``window``.
    """
    A = as_cmatrix(A, "A", square=True)
    angles = 2.0 * np.pi * np.arange(m_angles) / m_angles
    vals = np.array([_top_eig(A, t) for t in angles])
    j = int(np.argmax(vals))
    best = vals[j]
    step = 2.0 * np.pi / m_angles
    lo, hi = angles[j] - step, angles[j] + step
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = _top_eig(A, x1), _top_eig(A, x2)
    while hi - lo > window:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = _top_eig(A, x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = _top_eig(A, x2)
    return float(max(best, f1, f2))


def matrix_sqrt_hermitian(S):
    decomp = hermitian_eigs(S, vectors=True)
    w, V = decomp.eigenvalues, decomp.eigenvectors
    if w[0] <= 0:
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3e} is not positive")
    root = (V * np.sqrt(w)) @ V.conj().T
    return HermitianSqrt(0.5 * (root + root.conj().T), w, V)


# -- planar geometry on boundary samples --------------------------------------

def convex_hull(points, tol=0.0):
    """Counter-clockwise hull vertices of complex points (monotone chain)."""
    pts = sorted(set((float(z.real), float(z.imag)) for z in np.asarray(points).ravel()))
    if len(pts) <= 2:
        return np.array([complex(x, y) for x, y in pts])

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return np.array([complex(x, y) for x, y in hull])


def is_convex_sequence(points, slack=1e-10):
    """True when consecutive turns of the closed sequence never change sign."""
    z = np.asarray(points)
    a = np.roll(z, -1) - z
    b = np.roll(z, -2) - np.roll(z, -1)
    turn = (a.conj() * b).imag
    return bool(np.all(turn <= slack) or np.all(turn >= -slack))


def inside_convex_polygon(hull, z, tol=1e-12):
    """Point-in-polygon for a CCW convex hull; degenerate hulls are segments."""
    hull = np.asarray(hull)
    scale = max(1.0, float(np.max(np.abs(hull)))) if len(hull) else 1.0
    if len(hull) == 0:
        return False
    if len(hull) == 1:
        return abs(z - hull[0]) <= tol * scale
    if len(hull) == 2:
        a, b = hull
        t = ((z - a) * np.conj(b - a)).real / abs(b - a) ** 2
        t = min(max(t, 0.0), 1.0)
        return abs(z - (a + t * (b - a))) <= tol * scale
    nxt = np.roll(hull, -1)
    cross = ((nxt - hull).conj() * (z - hull)).imag
    return bool(np.all(cross >= -tol * scale * np.abs(nxt - hull)))


def densify_polygon(vertices, total):
    """``total`` points spread along the closed polygon by arc length."""
    v = np.asarray(vertices, dtype=complex)
    if len(v) == 1:
        return np.repeat(v, total)
    nxt = np.roll(v, -1)
    lengths = np.abs(nxt - v)
    perim = lengths.sum()
    s = np.arange(total) * perim / total
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(v) - 1)
    frac = np.where(lengths[idx] > 0, (s - cum[idx]) / np.where(lengths[idx] > 0, lengths[idx], 1), 0)
    out = v[idx] + frac * (nxt[idx] - v[idx])
    return np.concatenate([v, out])
