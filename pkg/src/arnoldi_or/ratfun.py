"""Polynomials, rational functions, partial fractions and disk geometry.

A :class:`Polynomial` stores coefficients in ascending powers of
``(z - center)``.  Keeping the expansion point explicit lets truncated
Taylor series about a disk center be evaluated without re-expanding them
in monomials, which would be badly conditioned for off-origin centers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import PoleHit, PoleInsideDisk, RepeatedPoles
from .linalg import as_cmatrix, solve_upper_triangular
from .spectral import general_eigs

DISK_SAMPLES = 1024
# Lawson iteration stops after this many steps without a 0.1% improvement
LAWSON_PATIENCE = 10
LAWSON_PROGRESS = 1e-3


def _trim(c):
    c = np.array(c, dtype=complex).reshape(-1)
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1].copy()


@dataclass(frozen=True, eq=False)
class Polynomial:
    coeffs: np.ndarray
    center: complex = 0j

    def __post_init__(self):
        c = _trim(self.coeffs)
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "center", complex(self.center))

    @classmethod
    def from_roots(cls, roots, lead=1.0):
        c = np.array([complex(lead)])
        for r in roots:
            c = np.concatenate([[0], c]) - complex(r) * np.concatenate([c, [0]])
        return cls(c)

    @classmethod
    def constant(cls, value):
        return cls([value])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return self.degree == 0 and self.coeffs[0] == 0

    @property
    def lead(self):
        return complex(self.coeffs[-1])

    def __call__(self, z):
        return poly_eval(self, z)

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.center == other.center
                and np.array_equal(self.coeffs, other.coeffs))

    def __repr__(self):
        c = f", center={self.center}" if self.center else ""
        return f"Polynomial({self.coeffs.tolist()}{c})"

    def shifted(self, center):
        """Same polynomial re-expanded about ``center`` (Taylor shift)."""
        center = complex(center)
        if center == self.center:
            return self
        a = self.coeffs.copy()
        d = center - self.center
        n = len(a)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                a[j] += d * a[j + 1]
        return Polynomial(a, center)

    def _aligned(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other], self.center)
        return other.shifted(self.center)

    def __add__(self, other):
        other = self._aligned(other)
        n = max(len(self.coeffs), len(other.coeffs))
        c = np.zeros(n, dtype=complex)
        c[: len(self.coeffs)] += self.coeffs
        c[: len(other.coeffs)] += other.coeffs
        return Polynomial(c, self.center)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coeffs, self.center)

    def __sub__(self, other):
        return self + (-self._aligned(other))

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial(self.coeffs * complex(other), self.center)
        other = self._aligned(other)
        return Polynomial(np.convolve(self.coeffs, other.coeffs), self.center)

    __rmul__ = __mul__

    def matrix(self, A):
        return poly_matrix_eval(self, A)

    def apply(self, A, v):
        """``p(A) v`` by Horner with matrix-vector products."""
        A = np.asarray(A)
        v = np.asarray(v, dtype=complex)
        out = self.coeffs[-1] * v
        for c in self.coeffs[-2::-1]:
            out = A @ out - self.center * out + c * v
        return out

    def derivative(self):
        return poly_derivative(self)

    def roots(self):
        return poly_roots(self)


def poly_eval(p, z):
    z = np.asarray(z, dtype=complex) - p.center
    out = np.full(z.shape, p.coeffs[-1], dtype=complex)
    for c in p.coeffs[-2::-1]:
        out = out * z + c
    return out if out.ndim else complex(out)


def poly_matrix_eval(p, A):
    A = as_cmatrix(A, "A", square=True)
    n = A.shape[0]
    eye = np.eye(n, dtype=complex)
    As = A - p.center * eye
    P = p.coeffs[-1] * eye
    for c in p.coeffs[-2::-1]:
        P = P @ As + c * eye
    return P


def poly_derivative(p):
    if p.degree == 0:
        return Polynomial([0], p.center)
    return Polynomial(p.coeffs[1:] * np.arange(1, len(p.coeffs)), p.center)


def poly_roots(p):
    """Roots from the eigenvalues of the companion matrix."""
    if p.degree < 1:
        raise ValueError("polynomial of degree 0 has no roots")
    monic = p.coeffs[:-1] / p.coeffs[-1]
    d = p.degree
    C = np.zeros((d, d), dtype=complex)
    C[1:, :-1] = np.eye(d - 1)
    C[:, -1] = -monic
    return general_eigs(C).eigenvalues + p.center


def poly_long_division(num, den):
    """``(quotient, remainder)`` with ``num = quotient * den + remainder``."""
    if den.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    den = den.shifted(num.center)
    r = num.coeffs.copy()
    dd = den.degree
    if num.degree < dd:
        return Polynomial([0], num.center), num
    q = np.zeros(num.degree - dd + 1, dtype=complex)
    for i in range(num.degree - dd, -1, -1):
        q[i] = r[i + dd] / den.coeffs[-1]
        r[i: i + dd + 1] -= q[i] * den.coeffs
        r[i + dd] = 0
    rem = r[:dd] if dd > 0 else np.zeros(1)
    return Polynomial(q, num.center), Polynomial(rem, num.center)


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """``R(z) = N(z) / D(z)``; ``den_roots`` optionally caches the poles."""

    numerator: Polynomial
    denominator: Polynomial
    den_roots: Optional[tuple] = None

    def __post_init__(self):
        if self.denominator.is_zero:
            raise ValueError("denominator is the zero polynomial")
        # the Krylov solvers need monomial coefficients
        object.__setattr__(self, "numerator", self.numerator.shifted(0))
        object.__setattr__(self, "denominator", self.denominator.shifted(0))
        if self.den_roots is not None:
            object.__setattr__(self, "den_roots", tuple(complex(r) for r in self.den_roots))

    @classmethod
    def linear_system(cls, shift=0.0):
        """``1 / (z - shift)``, i.e. solving ``(A - shift I) x = b``."""
        return cls(Polynomial([1]), Polynomial([-complex(shift), 1]), (complex(shift),))

    @classmethod
    def from_factors(cls, gamma, poles, delta, zeros):
        """``delta prod(z - zeros) / (gamma prod(z - poles))``."""
        return cls(Polynomial.from_roots(zeros, delta),
                   Polynomial.from_roots(poles, gamma), tuple(poles))

    @property
    def J(self):
        return self.denominator.degree

    @property
    def L(self):
        return self.numerator.degree

    @property
    def nu(self):
        return max(self.J, self.L)

    def __call__(self, z):
        return poly_eval(self.numerator, z) / poly_eval(self.denominator, z)

    def poles(self):
        if self.J == 0:
            return np.zeros(0, dtype=complex)
        if self.den_roots is not None:
            return np.array(self.den_roots, dtype=complex)
        return poly_roots(self.denominator)

    def to_json(self):
        return {
            "num": [[float(c.real), float(c.imag)] for c in self.numerator.coeffs],
            "den": [[float(c.real), float(c.imag)] for c in self.denominator.coeffs],
        }

    @classmethod
    def from_json(cls, obj):
        def coeffs(key):
            return [complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in obj[key]]
        return cls(Polynomial(coeffs("num")), Polynomial(coeffs("den")))


@dataclass(frozen=True)
class PartialFractions:
    poles: np.ndarray
    weights: np.ndarray
    polynomial_part: Polynomial

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.asarray(poly_eval(self.polynomial_part, z), dtype=complex)
        for r, w in zip(self.poles, self.weights):
            out = out + w / (z - r)
        return out if out.ndim else complex(out)


def pole_cluster_tol(poles):
    return 1e-6 * max(1.0, float(np.max(np.abs(poles)))) if len(poles) else 0.0


def partial_fractions(R):
    quotient, rem = poly_long_division(R.numerator, R.denominator)
    poles = R.poles()
    tol = pole_cluster_tol(poles)
    for i in range(len(poles)):
        for j in range(i + 1, len(poles)):
            if abs(poles[i] - poles[j]) <= tol:
                raise RepeatedPoles(
                    f"poles {poles[i]:.6g} and {poles[j]:.6g} closer than {tol:.1e}")
    dprime = poly_derivative(R.denominator)
    weights = np.array([poly_eval(rem, r) / poly_eval(dprime, r) for r in poles],
                       dtype=complex)
    return PartialFractions(poles, weights, quotient)


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def boundary(self, m=DISK_SAMPLES):
        t = 2.0 * np.pi * np.arange(m) / m
        return self.center + self.radius * np.exp(1j * t)

    def contains(self, z, slack=1e-12):
        return abs(complex(z) - self.center) <= self.radius * (1 + slack) + slack


def taylor_near_best(R, disk, k):
    """First ``k`` Taylor terms of ``R`` about the disk center.

    On a disk the Faber polynomials are powers of ``(z - c)``, so the
    truncated Taylor series is a near-best uniform approximation there.
    Coefficients come from the partial fraction expansion, using
    ``1/(z - r) = -sum_m (z - c)^m / (r - c)^(m+1)``.
    """
    c = complex(disk.center)
    pf = partial_fractions(R)
    margin = disk.radius * (1 + 1e-8)
    for r in pf.poles:
        if abs(r - c) <= margin:
            raise PoleInsideDisk(f"pole {r:.6g} lies in disk {disk}")
    coeffs = np.zeros(k, dtype=complex)
    poly = pf.polynomial_part.shifted(c).coeffs
    m = min(k, len(poly))
    coeffs[:m] += poly[:m]
    powers = np.arange(k)
    for r, w in zip(pf.poles, pf.weights):
        coeffs -= w / (r - c) ** (powers + 1)
    return Polynomial(coeffs, c)


class DiscretePolynomial:
    """Polynomial stored in a basis orthonormal on a point set.

    The basis obeys ``t q_j = sum_i H[i, j] q_i`` with ``t = (z - center) / scale``,
    so evaluation never forms monomial coefficients.
    """

    def __init__(self, center, scale, H, coeffs, norm0):
        self.center = complex(center)
        self.scale = float(scale)
        self.H = H
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.norm0 = float(norm0)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def basis(self, z):
        t = (np.asarray(z, dtype=complex).ravel() - self.center) / self.scale
        k = len(self.coeffs)
        Q = np.zeros((len(t), k), dtype=complex)
        Q[:, 0] = 1.0 / self.norm0
        for j in range(1, k):
            w = t * Q[:, j - 1] - Q[:, :j] @ self.H[:j, j - 1]
            Q[:, j] = w / self.H[j, j - 1]
        return Q

    def __call__(self, z):
        shape = np.shape(z)
        out = self.basis(z) @ self.coeffs
        return out.reshape(shape) if shape else complex(out[0])


def near_best_on_points(R, points, k, iterations=100):
    """Near-minimax polynomial of degree ``k - 1`` for ``R`` on a point set.

    Weighted least squares in a discretely orthonormal basis, reweighted by
    Lawson's rule ``w <- w |error|`` until the maximum error stalls.  Used
    on regions that are not disks, where no simple closed form for a
    near-best series is available.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    if k < 1:
        raise ValueError("k must be at least 1")
    if len(pts) < k:
        raise ValueError("need at least k sample points")
    with np.errstate(divide="ignore", invalid="ignore"):
        f = R(pts)
    if not np.all(np.isfinite(f)):
        raise PoleHit("non-finite value of R on the sample points")
    center = complex(np.mean(pts))
    scale = float(np.max(np.abs(pts - center))) or 1.0
    t = (pts - center) / scale
    m = len(pts)
    Q = np.zeros((m, k), dtype=complex)
    H = np.zeros((k, max(k - 1, 0)), dtype=complex)
    Q[:, 0] = 1.0 / math.sqrt(m)
    for j in range(1, k):
        w = t * Q[:, j - 1]
        for _ in range(2):
            h = Q[:, :j].conj().T @ w
            H[:j, j - 1] += h
            w = w - Q[:, :j] @ h
        H[j, j - 1] = np.linalg.norm(w)
        Q[:, j] = w / H[j, j - 1]
    weights = np.full(m, 1.0 / m)
    best, best_err, since_best = None, np.inf, 0
    for _ in range(iterations + 1):
        sw = np.sqrt(weights)
        M = sw[:, None] * Q
        Qw, Rw = np.linalg.qr(M)
        diag = np.abs(np.diag(Rw))
        if diag.min() > 1e-12 * diag.max():
            c = solve_upper_triangular(Rw, Qw.conj().T @ (sw * f))
        else:
            c = np.linalg.lstsq(M, sw * f, rcond=None)[0]
        err = np.abs(f - Q @ c)
        emax = err.max()
        if emax < best_err * (1 - LAWSON_PROGRESS):
            since_best = 0
        else:
            since_best += 1
        if emax < best_err:
            best, best_err = c, emax
        if emax == 0.0 or since_best >= LAWSON_PATIENCE:
            break
        weights = weights * err
        weights /= weights.sum()
    return DiscretePolynomial(center, scale, H, best, math.sqrt(m))


def sup_on_points(R, p, points):
    """``max |R(z) - p(z)|`` over the sample points."""
    pts = np.asarray(points, dtype=complex).ravel()
    poles = R.poles()
    if len(poles) and np.min(np.abs(pts[:, None] - poles[None, :])) < 1e-12:
        raise PoleHit("a sample point coincides with a pole")
    vals = np.abs(R(pts) - np.asarray(p(pts)))
    if not np.all(np.isfinite(vals)):
        raise PoleHit("non-finite value of R on the sample points")
    return float(np.max(vals))


# -- smallest enclosing disk ---------------------------------------------------

def _disk2(a, b):
    c = 0.5 * (a + b)
    return Disk(c, abs(a - c))


def _disk3(a, b, c):
    ax, ay = a.real, a.imag
    bx, by = b.real - ax, b.imag - ay
    cx, cy = c.real - ax, c.imag - ay
    d = 2.0 * (bx * cy - by * cx)
    if d == 0.0:
        # collinear: the farthest pair spans the disk
        return max((_disk2(a, b), _disk2(a, c), _disk2(b, c)), key=lambda D: D.radius)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    center = complex(ux + ax, uy + ay)
    return Disk(center, max(abs(a - center), abs(b - center), abs(c - center)))


def _inside(D, z):
    return abs(z - D.center) <= D.radius * (1 + 1e-12) + 1e-15


def smallest_enclosing_disk(points: Sequence[complex], seed=0):
    """Minimal enclosing disk by Welzl's incremental move-to-front scheme.

    The input order is shuffled with a fixed seed so results are
    deterministic while keeping expected linear running time.
    """
    pts = [complex(z) for z in np.asarray(points).ravel()]
    if not pts:
        raise ValueError("need at least one point")
    random.Random(seed).shuffle(pts)
    D = Disk(pts[0], 0.0)
    i = 1
    while i < len(pts):
        p = pts[i]
        if not _inside(D, p):
            D = Disk(p, 0.0)
            for j in range(i):
                q = pts[j]
                if _inside(D, q):
                    continue
                D = _disk2(p, q)
                for l in range(j):
                    if not _inside(D, pts[l]):
                        D = _disk3(p, q, pts[l])
            # move the support point to the front
            pts.insert(0, pts.pop(i))
        i += 1
    return D


def disk_support_points(D, points, tol=1e-10):
    pts = np.asarray(points, dtype=complex).ravel()
    scale = max(D.radius, 1.0)
    return pts[np.abs(np.abs(pts - D.center) - D.radius) <= tol * scale]

