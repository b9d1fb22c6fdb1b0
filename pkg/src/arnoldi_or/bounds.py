"""Error bounds for Arnoldi-OR from K-spectral sets.

Each evaluator takes a caller-supplied polynomial ``p`` (for example a
truncated Taylor series, or the polynomial implied by an Arnoldi-OR
iterate) and returns ``constant * kappa_factor * max |R - p|`` where the
maximum is sampled over the relevant region.  Sampled maxima are lower
bounds of the true suprema.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PoleInRegion, PoleNotCovered, SingularShift
from .linalg import dense_solve
from .ratfun import Disk, sup_on_points
from .spectral import (
    RegionBoundary,
    convex_hull,
    densify_polygon,
    inside_convex_polygon,
    numerical_radius,
    numerical_range_boundary,
)

REGION_SAMPLES = 1024
DISK_ANGLES = 256
W_CONSTANT = 1.0 + math.sqrt(2.0)


def removed_disk_constant(m):
    """K-spectral constant of W(A) with ``m`` resolvent disks removed."""
    a = 1 + 2 * m
    return a + math.sqrt(a * a + 2 * m + 1)


@dataclass(frozen=True)
class BoundReport:
    kind: str
    k: int
    constant: float
    kappa_factor: float
    sup_term: float

    @property
    def value(self):
        return self.constant * self.kappa_factor * self.sup_term

    def csv_row(self):
        return (f"{self.k},{self.kind},{self.constant:.17g},{self.kappa_factor:.17g},"
                f"{self.sup_term:.17g},{self.value:.17g}")


CSV_HEADER = "k,kind,constant,kappa_factor,sup_term,value"


@dataclass(frozen=True)
class RemovedDiskSet:
    poles: np.ndarray
    radii: np.ndarray
    centers_inside: bool = True
    overlapping: bool = False

    @property
    def m(self):
        return len(self.poles)

    def disks(self):
        return [Disk(complex(c), float(r)) for c, r in zip(self.poles, self.radii)]


def _k_of(p):
    return int(p.degree) + 1


def bound_eig(R, p, eigenvalues, kappa_S_sqrt, kappa_V, k=None):
    sup = sup_on_points(R, p, eigenvalues)
    return BoundReport("eig", k or _k_of(p), 1.0, kappa_S_sqrt * kappa_V, sup)


def region_samples(boundary, total=REGION_SAMPLES):
    """Boundary vertices plus ``total`` points along the hull polygon."""
    hull = convex_hull(boundary.points)
    return hull, densify_polygon(hull, total)


def _check_poles_outside(R, hull):
    for r in R.poles():
        if inside_convex_polygon(hull, r):
            raise PoleInRegion(f"pole {r:.6g} lies inside the region")


def bound_W(R, p, boundary, kappa_S_sqrt, samples=REGION_SAMPLES, k=None):
    hull, pts = region_samples(boundary, samples)
    _check_poles_outside(R, hull)
    return BoundReport("W", k or _k_of(p), W_CONSTANT, kappa_S_sqrt, sup_on_points(R, p, pts))


def similarity_by_root(A, S_root):
    """``S^{1/2} A S^{-1/2}`` via a dense solve (``S^{1/2}`` is Hermitian)."""
    root = S_root.root
    left = root @ A
    return dense_solve(root, left.conj().T).conj().T


def bound_W_S(R, p, A, S_root, m_angles=256, samples=REGION_SAMPLES, k=None,
              boundary=None):
    """Bound on the S-norm relative error over ``W(S^{1/2} A S^{-1/2})``.

    ``boundary`` may carry a precomputed boundary of that numerical range.
    """
    if boundary is None:
        boundary = numerical_range_boundary(similarity_by_root(A, S_root), m_angles)
    hull, pts = region_samples(boundary, samples)
    _check_poles_outside(R, hull)
    return BoundReport("W_S", k or _k_of(p), W_CONSTANT, 1.0, sup_on_points(R, p, pts))


def removed_disks(A, poles, boundary=None):
    """Disks ``D(xi, 1 / w((xi I - A)^{-1}))`` about each pole ``xi``."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    eig = np.linalg.eigvals(A)
    scale = np.linalg.norm(A)
    poles = np.asarray(poles, dtype=complex).ravel()
    radii = []
    for xi in poles:
        if np.min(np.abs(eig - xi)) <= 1e-12 * scale:
            raise SingularShift(f"{xi:.6g} is an eigenvalue of A")
        inv = dense_solve(xi * np.eye(n) - A, np.eye(n, dtype=complex))
        radii.append(1.0 / numerical_radius(inv))
    radii = np.array(radii)
    inside = True
    if boundary is not None:
        hull = convex_hull(boundary.points)
        inside = all(inside_convex_polygon(hull, xi) for xi in poles)
    overlap = any(abs(poles[i] - poles[j]) < radii[i] + radii[j]
                  for i in range(len(poles)) for j in range(i + 1, len(poles)))
    return RemovedDiskSet(poles, radii, inside, overlap)


def region_minus_disks(boundary, disks, samples=REGION_SAMPLES, disk_angles=DISK_ANGLES):
    """Sample set of W(A) minus the removed disks, and the hull of W(A)."""
    hull, pts = region_samples(boundary, samples)
    keep = np.ones(len(pts), dtype=bool)
    for D in disks.disks():
        keep &= np.abs(pts - D.center) > D.radius
    parts = [pts[keep]]
    for D in disks.disks():
        circle = D.boundary(disk_angles)
        outside_others = np.ones(len(circle), dtype=bool)
        for E in disks.disks():
            if E is not D and (E.center != D.center or E.radius != D.radius):
                outside_others &= np.abs(circle - E.center) > E.radius
        inside_w = np.array([inside_convex_polygon(hull, z) for z in circle])
        parts.append(circle[inside_w & outside_others])
    return hull, np.concatenate(parts)


def region_minus_disks_boundary(boundary, disks, samples=REGION_SAMPLES,
                                disk_angles=DISK_ANGLES):
    _, pts = region_minus_disks(boundary, disks, samples, disk_angles)
    theta = np.angle(pts - np.mean(boundary.points))
    order = np.argsort(theta, kind="stable")
    return RegionBoundary(pts[order], theta[order], "numerical_range_minus_disks")


def bound_W_minus_disks(R, p, boundary, disks, kappa_S_sqrt, samples=REGION_SAMPLES, k=None):
    hull = convex_hull(boundary.points)
    for r in R.poles():
        if inside_convex_polygon(hull, r):
            if not any(abs(r - D.center) < D.radius for D in disks.disks()):
                raise PoleNotCovered(f"pole {r:.6g} in W(A) is not inside a removed disk")
    _, pts = region_minus_disks(boundary, disks, samples)
    m = disks.m
    kind = "W_minus_disk" if m == 1 else "W_minus_m_disks"
    return BoundReport(kind, k or _k_of(p), removed_disk_constant(m), kappa_S_sqrt,
                       sup_on_points(R, p, pts))


def write_bounds_csv(path, reports):
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in reports:
            fh.write(r.csv_row() + "\n")
