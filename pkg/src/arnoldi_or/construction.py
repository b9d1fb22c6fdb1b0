"""Matrices with prescribed eigenvalues and a prescribed Arnoldi-OR residual curve.

Given eigenvalues ``lambda_1..lambda_n``, a denominator ``D`` of degree
``J`` with roots ``gamma_1..gamma_J`` and a nonincreasing sequence
``phi(0) >= ... >= phi(n-J) > 0``, build ``(A, b)`` such that Arnoldi-OR
applied to ``D(A)^{-1} b`` has residual norms exactly ``phi(k)``.

The action of ``A`` is fixed on the basis ``[b, u_1..u_{J-1}, v_1..v_{n-J}]``:
``b -> u_1 -> ... -> u_{J-1} -> v_1`` with shifts ``gamma_j`` along the
chain, ``v_i -> v_{i+1}``, and a last column chosen so that the
characteristic polynomial is ``prod(z - lambda_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DependentVectors, NotNonincreasing
from .linalg import as_cvector, dense_solve
from .ratfun import Polynomial, RationalFunction, poly_eval
from .solvers import RationalKrylovProblem, arnoldi_or_incremental


@dataclass(frozen=True)
class PrescribedProblem:
    eigenvalues: np.ndarray
    D: Polynomial
    phi: np.ndarray
    den_roots: tuple = None

    def __post_init__(self):
        lam = as_cvector(self.eigenvalues, "eigenvalues")
        phi = np.asarray(self.phi, dtype=float)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "phi", phi)
        D = self.D.shifted(0)
        object.__setattr__(self, "D", D)
        n, J = len(lam), D.degree
        if J < 1:
            raise ValueError("D must have degree at least 1")
        if n <= J:
            raise ValueError(f"need n > deg D, got n = {n}, J = {J}")
        if len(phi) != n - J + 1:
            raise ValueError(f"phi must have n - J + 1 = {n - J + 1} entries, got {len(phi)}")
        if np.any(np.diff(phi) > 0):
            raise NotNonincreasing("phi must be nonincreasing")
        if phi[-1] <= 0:
            raise NotNonincreasing("phi must end with a positive value")
        if self.den_roots is None:
            object.__setattr__(self, "den_roots", tuple(D.roots()))
        scale = np.abs(D.coeffs).max() * max(1.0, float(np.abs(lam).max())) ** J
        if np.min(np.abs(poly_eval(D, lam))) <= 1e-14 * scale:
            raise ValueError("D vanishes at a prescribed eigenvalue")

    @property
    def n(self):
        return len(self.eigenvalues)

    @property
    def J(self):
        return self.D.degree


@dataclass
class ConstructionResult:
    A: np.ndarray
    b: np.ndarray
    basis_B: np.ndarray
    A_in_basis: np.ndarray
    beta: np.ndarray
    psi: np.ndarray


def psi_from_phi(phi):
    """``psi(k) = sqrt(phi(k-1)^2 - phi(k)^2)`` for ``k = 1..len(phi)-1``."""
    phi = np.asarray(phi, dtype=float)
    if np.any(np.diff(phi) > 0):
        raise NotNonincreasing("phi must be nonincreasing")
    if phi[-1] <= 0:
        raise NotNonincreasing("phi must end with a positive value")
    return np.sqrt(np.maximum(phi[:-1] ** 2 - phi[1:] ** 2, 0.0))


def construct_vectors(n, J, psi, phi0, phi_last, seed=None):
    """Orthonormal ``v``, chain vectors ``u`` and right-hand side ``b``.

    Defaults are canonical: ``v_k = e_k``, the leftover mass of ``b`` sits on
    ``e_{n-J+1}`` and ``u_i = e_{n-J+1+i}``.  A seed replaces the canonical
    frame by a random unitary one.
    """
    if not n > J >= 1:
        raise ValueError("need n > J >= 1")
    psi = np.asarray(psi, dtype=float)
    if len(psi) != n - J:
        raise ValueError("psi must have n - J entries")
    frame = np.eye(n, dtype=complex)
    if seed is not None:
        rng = np.random.default_rng(seed)
        Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        frame, _ = np.linalg.qr(Z)
    V = frame[:, : n - J]
    w = frame[:, n - J]
    U = frame[:, n - J + 1:]
    b = V @ psi + phi_last * w
    if not math.isclose(np.linalg.norm(b), phi0, rel_tol=1e-12):
        raise ValueError("psi and phi are inconsistent: ||b|| != phi(0)")
    M = np.column_stack([V, b, U])
    if np.linalg.matrix_rank(M) < n:
        raise DependentVectors("[v, b, u] does not span C^n")
    return V, U, b


def hessenberg_last_column(lam, diag_d):
    """Last column ``beta`` giving a unit-subdiagonal Hessenberg matrix spectrum ``lam``.

    With ``q_0 = 1`` and ``q_j = (z - d_j) q_{j-1}``, the characteristic
    polynomial is ``z q_{n-1} - sum_j beta_j q_j``; solve the triangular
    change of basis ``sum_j beta_j q_j = z q_{n-1} - prod(z - lam_i)``.
    """
    lam = as_cvector(lam, "eigenvalues")
    d = as_cvector(diag_d, "diagonal")
    n = len(lam)
    if len(d) != n - 1:
        raise ValueError("diag_d must have n - 1 entries")
    q = [Polynomial([1])]
    for dj in d:
        q.append(q[-1] * Polynomial([-dj, 1]))
    r = q[-1] * Polynomial([0, 1]) - Polynomial.from_roots(lam)
    rc = np.zeros(n, dtype=complex)
    rc[: len(r.coeffs)] = r.coeffs[:n]
    # q_j is monic of degree j: peel off from the top degree down
    beta = np.zeros(n, dtype=complex)
    for j in range(n - 1, -1, -1):
        beta[j] = rc[j]
        qc = q[j].coeffs
        rc[: len(qc)] -= beta[j] * qc
    return beta


def hessenberg_in_basis(diag_d, beta):
    n = len(beta)
    H = np.zeros((n, n), dtype=complex)
    H[np.arange(n - 1), np.arange(n - 1)] = diag_d
    H[np.arange(1, n), np.arange(n - 1)] = 1.0
    H[:, -1] = beta
    return H


def assemble(prescribed, seed=None):
    """Build ``A = B A^(B) B^{-1}`` and ``b`` for the prescribed problem."""
    n, J = prescribed.n, prescribed.J
    phi = prescribed.phi
    psi = psi_from_phi(phi)
    V, U, b = construct_vectors(n, J, psi, phi[0], phi[-1], seed)
    B = np.column_stack([b, U, V])
    gammas = np.asarray(prescribed.den_roots, dtype=complex)
    diag_d = np.concatenate([gammas, np.zeros(n - 1 - J)])
    beta = hessenberg_last_column(prescribed.eigenvalues, diag_d)
    AB = hessenberg_in_basis(diag_d, beta)
    # A B = B A^(B)  =>  A^H = B^{-H} (B A^(B))^H
    A = dense_solve(B.conj().T, (B @ AB).conj().T).conj().T
    return ConstructionResult(A, b, B, AB, beta, psi)


@dataclass
class CurveValidation:
    max_deviation: float
    prescribed: np.ndarray
    achieved: np.ndarray

    def to_csv(self, path):
        lines = ["k,phi_prescribed,residual_achieved"]
        for k, (p, a) in enumerate(zip(self.prescribed, self.achieved)):
            lines.append(f"{k},{p:.17g},{a:.17g}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def validate_curve(result, prescribed):
    """Run Arnoldi-OR on ``(A, b, 1/D)``; return the worst ``|r_k - phi(k)| / phi(0)``."""
    R = RationalFunction(Polynomial([1]), prescribed.D, prescribed.den_roots)
    prob = RationalKrylovProblem(result.A, result.b, R)
    kmax = prescribed.n - prescribed.J
    runs = arnoldi_or_incremental(prob, kmax, tol=0.0)
    achieved = np.array([prob.b_norm] + [r.residual_norm for r in runs])
    phi = prescribed.phi
    if len(achieved) != len(phi):
        raise RuntimeError(f"Arnoldi-OR stopped after {len(achieved) - 1} of {kmax} steps")
    dev = float(np.max(np.abs(achieved - phi)) / phi[0])
    return CurveValidation(dev, phi.copy(), achieved)
