"""Krylov approximations to ``R(A) b = D(A)^{-1} N(A) b``.

Four engines share one problem object:

* Arnoldi-OR, minimizing ``||N(A) b - D(A) x||_2`` over the Krylov space
  (equivalently the error in the ``D(A)^H D(A)`` norm).  A basic variant
  re-solves a ``(k + nu) x k`` least-squares problem from scratch at every
  step; the incremental variant reuses all previous Givens rotations.
* Arnoldi-FA, ``Q_k D(H_k)^{-1} N(H_k) e_1 ||b||``.
* OPT2, the orthogonal projection of the exact answer onto the Krylov space.
* PFRAC, shifted minimal-residual solves for each term of the partial
  fraction expansion on a single shared basis.

The starting vector is normalized once; every reported norm refers to the
caller's original ``b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    NotLinearSystem,
    RankDeficient,
    SingularMatrix,
    SingularProjectedDenominator,
)
from .krylov import (
    ArnoldiPolynomial,
    arnoldi_extend,
    arnoldi_start,
    hessenberg_power_block,
    polynomial_column,
)
from .linalg import (
    GivensRotation,
    as_cmatrix,
    as_cvector,
    compute_givens,
    dense_solve,
    givens_qr_least_squares,
    householder_least_squares,
    solve_upper_triangular,
)
from .ratfun import RationalFunction, partial_fractions, poly_matrix_eval
from .spectral import cond2

DEFAULT_TOL = 1e-10
STAGNATION_TOL = 1e-14
CONVERGED_TOL = 1e-12
METHODS = ("OR", "FA", "OPT2", "PFRAC")


class RationalKrylovProblem:
    """``A``, ``b`` and ``R = N / D``; dense reference quantities are cached."""

    def __init__(self, A, b, R: RationalFunction):
        self.A = as_cmatrix(A, "A", square=True)
        b = as_cvector(b, "b")
        if b.shape[0] != self.A.shape[0]:
            raise ValueError("A and b have incompatible dimensions")
        self.b = b
        self.b_norm = float(np.linalg.norm(b))
        self.b_unit = b / self.b_norm
        self.R = R
        self._cache = {}

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def nu(self):
        return self.R.nu

    def _cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def Nb(self):
        return self._cached("Nb", lambda: self.R.numerator.apply(self.A, self.b))

    @property
    def Nb_norm(self):
        return float(np.linalg.norm(self.Nb))

    @property
    def DA(self):
        return self._cached("DA", lambda: poly_matrix_eval(self.R.denominator, self.A))

    @property
    def reference(self):
        """Dense solution ``D(A)^{-1} N(A) b``."""
        return self._cached("ref", lambda: dense_solve(self.DA, self.Nb))

    def residual(self, x):
        return float(np.linalg.norm(self.Nb - self.DA @ x))

    def error(self, x):
        return float(np.linalg.norm(self.reference - x))


@dataclass
class ApproxResult:
    k: int
    method: str
    residual_norm: float
    x: Optional[np.ndarray] = None
    error_norm: Optional[float] = None
    s_norm_error: Optional[float] = None
    pole_solutions: Optional[list] = field(default=None, repr=False)


@dataclass
class SNormContext:
    S: np.ndarray
    kappa_S: float


def snorm_context(prob):
    DA = prob.DA
    return SNormContext(DA.conj().T @ DA, cond2(DA) ** 2)


def residual_and_error(prob, x):
    return prob.residual(x), prob.error(x)


def s_norm_error(prob, x, ctx=None):
    """``||R(A) b - x||_S`` with ``S = D(A)^H D(A)``, as ``||D(A)(R(A)b - x)||_2``."""
    e = prob.reference - x
    if ctx is None:
        return float(np.linalg.norm(prob.DA @ e))
    return float(math.sqrt(max(np.vdot(e, ctx.S @ e).real, 0.0)))


def _advance(prob, dec, target):
    target = min(target, prob.n)
    if not dec.invariant and dec.steps_done < target:
        arnoldi_extend(dec, prob.A, target - dec.steps_done)
    return dec


# -- Arnoldi-OR ---------------------------------------------------------------

@dataclass
class ORState:
    """Rotation-reduced least-squares system of the incremental Arnoldi-OR.

    ``Dcal`` is upper triangular in its leading ``k x k`` block; ``eta`` is
    the rotated right-hand side for a unit starting vector.
    """

    nu: int
    J: int
    dec: object
    Dcal: np.ndarray
    eta: np.ndarray
    rotations: list
    residual_history: list
    k: int = 0
    fro2: float = 0.0


class _ORSolver:
    method = "OR"

    def __init__(self, prob, reorth=True):
        self.prob = prob
        self.dec = arnoldi_start(prob.A, prob.b_unit, reorth=reorth)
        self.k = 0
        self.residual_history = [prob.Nb_norm]

    @property
    def exhausted(self):
        """No further step possible: the Krylov space is exhausted."""
        return self.dec.invariant and self.k >= self.dec.steps_done

    def _rows(self, k):
        prob, dec = self.prob, self.dec
        _advance(prob, dec, k + prob.nu)
        if dec.invariant and k > dec.steps_done:
            raise StopIteration
        return min(k + prob.nu, dec.steps_done)

    def step(self):
        raise NotImplementedError

    def coefficients(self):
        raise NotImplementedError

    def iterate(self):
        """``x_k = ||b|| Q_k y``."""
        return self.prob.b_norm * (self.dec.basis(self.k) @ self.coefficients())

    def polynomial(self):
        """Scalar polynomial ``p`` with ``x_k = p(A) b``."""
        return ArnoldiPolynomial(self.dec._H, self.coefficients())


class BasicOR(_ORSolver):
    """Arnoldi-OR re-solving the whole least-squares problem at every step.

    Each step rebuilds ``D(H_{k+nu})(:, 1:k)`` from Hessenberg power blocks
    and factors it with a dense QR that does not exploit its band structure.
    """

    def step(self):
        k = self.k + 1
        s = self._rows(k)
        Hs = self.dec.square(s)
        Dcal = np.zeros((s, k), dtype=complex)
        for j, d in enumerate(self.prob.R.denominator.coeffs):
            if d != 0:
                Dcal += d * hessenberg_power_block(Hs, j, k)
        eta = np.zeros(s, dtype=complex)
        for l, c in enumerate(self.prob.R.numerator.coeffs):
            if c != 0:
                eta += c * hessenberg_power_block(Hs, l, 1)[:, 0]
        if s == k:
            # invariant subspace: the projected problem is exact
            try:
                y = dense_solve(Dcal, eta)
            except SingularMatrix as exc:
                raise RankDeficient(str(exc)) from exc
            res = float(np.linalg.norm(eta - Dcal @ y))
        else:
            y, res = householder_least_squares(Dcal, eta)
        self.k = k
        self._y = y
        self.Dcal, self.eta = Dcal, eta
        r = res * self.prob.b_norm
        self.residual_history.append(r)
        return r

    def coefficients(self):
        return self._y


class IncrementalOR(_ORSolver):
    """Arnoldi-OR updating a Givens QR factorization one column at a time.

    Per step: one Arnoldi step, one new column of ``D(H)``, the logged
    rotations applied to that column, and ``J`` new rotations.
    """

    def __init__(self, prob, reorth=True):
        super().__init__(prob, reorth)
        R = prob.R
        size = prob.n
        self.state = ORState(
            nu=R.nu, J=R.J, dec=self.dec,
            Dcal=np.zeros((size, size), dtype=complex),
            eta=np.zeros(size, dtype=complex),
            rotations=[], residual_history=self.residual_history)
        self._rows_used = 0
        self._y = None

    def step(self):
        st = self.state
        k = self.k + 1
        s = self._rows(k)
        Hs = self.dec.square(s)
        R = self.prob.R
        if k == 1:
            st.eta[:s] = polynomial_column(Hs, R.numerator, 0)
        col = polynomial_column(Hs, R.denominator, k - 1)
        st.fro2 += float(np.vdot(col, col).real)
        for G in st.rotations:
            col[G.i], col[G.j] = G.apply_pair(col[G.i], col[G.j])
        d = k - 1
        for row in range(k, min(k + st.J, s)):
            if col[row] == 0:
                G = GivensRotation(d, row, 1.0, 0j)
            else:
                G, col[d] = compute_givens(col[d], col[row], d, row)
                col[row] = 0
                st.eta[d], st.eta[row] = G.apply_pair(st.eta[d], st.eta[row])
            st.rotations.append(G)
        if abs(col[d]) < 1e-14 * math.sqrt(st.fro2) or st.fro2 == 0.0:
            raise RankDeficient(f"projected denominator is singular at step {k}")
        st.Dcal[:s, d] = col[:s]
        self._rows_used = s
        self.k = st.k = k
        self._y = None
        res = float(np.linalg.norm(st.eta[k:s])) * self.prob.b_norm
        self.residual_history.append(res)
        return res

    def coefficients(self):
        if self._y is None:
            k = self.k
            self._y = solve_upper_triangular(self.state.Dcal[:k, :k], self.state.eta[:k])
        return self._y

    @property
    def Dcal(self):
        return self.state.Dcal[: self._rows_used, : self.k]

    @property
    def eta(self):
        return self.state.eta[: self._rows_used]


def _run_or(solver, kmax, tol, keep_iterates):
    prob = solver.prob
    target = tol * prob.Nb_norm
    results = []
    kmax = min(kmax, prob.n)
    while solver.k < kmax:
        try:
            res = solver.step()
        except StopIteration:
            break
        k = solver.k
        done = res <= target or k == kmax or solver.exhausted
        x = solver.iterate() if (keep_iterates or done) else None
        results.append(ApproxResult(k, "OR", res, x))
        if res <= target:
            break
    return results


def arnoldi_or_basic(prob, kmax, tol=DEFAULT_TOL, keep_iterates=False, reorth=True):
    """Arnoldi-OR, least squares re-solved from scratch at each step.

    ``x_k`` is formed only once the residual drops below ``tol ||N(A)b||``
    or at the last step, unless ``keep_iterates`` is set.
    """
    return _run_or(BasicOR(prob, reorth), kmax, tol, keep_iterates)


def arnoldi_or_incremental(prob, kmax, tol=DEFAULT_TOL, keep_iterates=False, reorth=True):
    return _run_or(IncrementalOR(prob, reorth), kmax, tol, keep_iterates)


arnoldi_or = arnoldi_or_incremental


# -- baselines ----------------------------------------------------------------

def _fill_norms(prob, result):
    if result.x is not None:
        result.residual_norm = prob.residual(result.x)
        result.error_norm = prob.error(result.x)
        result.s_norm_error = s_norm_error(prob, result.x)
    return result


def arnoldi_fa(prob, k, dec=None):
    """``Q_k D(H_k)^{-1} N(H_k) e_1 ||b||``.

    Raises :class:`SingularProjectedDenominator` when ``D(H_k)`` is singular.
    """
    if dec is None:
        dec = arnoldi_start(prob.A, prob.b_unit)
    _advance(prob, dec, k)
    if k > dec.steps_done:
        raise ValueError(f"Krylov space has dimension {dec.steps_done} < {k}")
    Hk = dec.square(k)
    Dk = poly_matrix_eval(prob.R.denominator, Hk)
    rhs = polynomial_column(Hk, prob.R.numerator, 0)
    try:
        y = dense_solve(Dk, rhs)
    except SingularMatrix as exc:
        raise SingularProjectedDenominator(f"D(H_{k}) is singular") from exc
    x = prob.b_norm * (dec.basis(k) @ y)
    return _fill_norms(prob, ApproxResult(k, "FA", 0.0, x))


def arnoldi_fa_sweep(prob, kmax):
    """FA at ``k = 1..kmax``; ``None`` marks steps where ``D(H_k)`` is singular."""
    dec = arnoldi_start(prob.A, prob.b_unit)
    out = []
    for k in range(1, min(kmax, prob.n) + 1):
        _advance(prob, dec, k)
        if k > dec.steps_done:
            break
        try:
            out.append(arnoldi_fa(prob, k, dec))
        except SingularProjectedDenominator:
            out.append(None)
    return out


def optimal_projection(prob, k, dec=None):
    """Orthogonal projection of the dense reference onto ``K_k(A, b)``."""
    if dec is None:
        dec = arnoldi_start(prob.A, prob.b_unit)
    _advance(prob, dec, k)
    Qk = dec.basis(min(k, dec.steps_done))
    x = Qk @ (Qk.conj().T @ prob.reference)
    return _fill_norms(prob, ApproxResult(k, "OPT2", 0.0, x))


def optimal_projection_sweep(prob, kmax):
    dec = arnoldi_start(prob.A, prob.b_unit)
    out = []
    for k in range(1, min(kmax, prob.n) + 1):
        _advance(prob, dec, k)
        if k > dec.steps_done:
            break
        out.append(optimal_projection(prob, k, dec))
    return out


def partial_fraction_solve(prob, kmax, tol=DEFAULT_TOL, keep_iterates=True):
    """Sum of shifted minimal-residual solves, one per pole, on one basis.

    For each pole ``r_i`` the correction ``z_i`` minimizes
    ``||b - (A - r_i I) z||_2`` over ``K_k`` using ``H_{k+1,k} - r_i [I; 0]``;
    then ``x_k = sum_i w_i z_i + P(A) b`` with ``P`` the polynomial part.
    """
    pf = partial_fractions(prob.R)
    poly_part = pf.polynomial_part.apply(prob.A, prob.b)
    dec = arnoldi_start(prob.A, prob.b_unit)
    target = tol * prob.Nb_norm
    out = []
    for k in range(1, min(kmax, prob.n) + 1):
        _advance(prob, dec, k + 1)
        if k > dec.steps_done:
            break
        s = min(k + 1, dec.steps_done)
        Hk = dec._H[:s, :k]
        rhs = np.zeros(s, dtype=complex)
        rhs[0] = prob.b_norm
        Qk = dec.basis(k)
        x = poly_part.copy()
        zs = []
        for r, w in zip(pf.poles, pf.weights):
            M = Hk - r * np.eye(s, k)
            if s == k:
                try:
                    zc = dense_solve(M, rhs)
                except SingularMatrix as exc:
                    raise RankDeficient(str(exc)) from exc
            else:
                zc, _ = givens_qr_least_squares(M, rhs)
            z = Qk @ zc
            zs.append(z)
            x = x + w * z
        res = _fill_norms(prob, ApproxResult(k, "PFRAC", 0.0, x, pole_solutions=zs))
        stop = res.residual_norm <= target
        if not keep_iterates and not stop and k < kmax:
            res.x = None
            res.pole_solutions = None
        out.append(res)
        if stop:
            break
    return out


# -- FA / OR relation for linear systems -------------------------------------

@dataclass
class RelationCheck:
    max_deviation: float
    deviations: dict
    skipped: list
    converged: list = field(default_factory=list)


def fa_or_relation_check(prob, kmax):
    """Compare FA residuals with the prediction from consecutive OR residuals.

    For ``D`` of degree one and constant ``N``,
    ``||r_FA_k|| = ||r_OR_k|| / sqrt(1 - (||r_OR_k|| / ||r_OR_{k-1}||)^2)``.
    Steps where OR stagnates (ratio >= 1 - 1e-14) or ``D(H_k)`` is singular
    are skipped and listed.  Steps where OR has converged to roundoff
    (residual below ``1e-12 ||b||``) compare noise with noise and are
    listed separately in ``converged``.
    """
    if prob.R.J != 1 or prob.R.L != 0:
        raise NotLinearSystem("relation only holds for deg D = 1 and constant N")
    or_res = arnoldi_or_incremental(prob, kmax, tol=0.0, keep_iterates=True)
    hist = [prob.Nb_norm] + [prob.residual(r.x) for r in or_res]
    dec = arnoldi_start(prob.A, prob.b_unit)
    deviations, skipped, converged = {}, [], []
    for r in or_res:
        k = r.k
        if hist[k] <= CONVERGED_TOL * hist[0]:
            converged.append(k)
            continue
        ratio = hist[k] / hist[k - 1] if hist[k - 1] > 0 else 1.0
        if ratio >= 1.0 - STAGNATION_TOL:
            skipped.append(k)
            continue
        try:
            fa = arnoldi_fa(prob, k, dec)
        except SingularProjectedDenominator:
            skipped.append(k)
            continue
        predicted = hist[k] / math.sqrt(1.0 - ratio ** 2)
        deviations[k] = abs(fa.residual_norm - predicted) / max(fa.residual_norm, 1e-300)
    worst = max(deviations.values()) if deviations else 0.0
    return RelationCheck(worst, deviations, skipped, converged)
