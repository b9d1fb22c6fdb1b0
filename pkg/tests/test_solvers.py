import numpy as np
import pytest

from arnoldi_or.errors import NotLinearSystem, SingularProjectedDenominator
from arnoldi_or.generators import gen_grcar
from arnoldi_or.krylov import arnoldi_extend, arnoldi_start
from arnoldi_or.ratfun import Polynomial, RationalFunction, poly_matrix_eval
from arnoldi_or.solvers import (
    BasicOR,
    IncrementalOR,
    RationalKrylovProblem,
    arnoldi_fa,
    arnoldi_fa_sweep,
    arnoldi_or_basic,
    arnoldi_or_incremental,
    fa_or_relation_check,
    optimal_projection,
    optimal_projection_sweep,
    partial_fraction_solve,
    residual_and_error,
    s_norm_error,
    snorm_context,
)

from conftest import crandn, gmres_oracle, relerr, seeded_problem


def test_linear_system_is_gmres(rng):
    A = gen_grcar(30)
    b = crandn(rng, 30)
    prob = RationalKrylovProblem(A, b, RationalFunction.linear_system())
    res = [r.residual_norm for r in arnoldi_or_basic(prob, 20, tol=0)]
    assert relerr(res, gmres_oracle(A, b, 20)) < 1e-8


def test_polynomial_target_reached_at_k3(rng):
    A = crandn(rng, 15, 15)
    R = RationalFunction(Polynomial(crandn(rng, 3)), Polynomial([1]))
    prob = RationalKrylovProblem(A, crandn(rng, 15), R)
    out = arnoldi_or_incremental(prob, 10, tol=1e-12)
    assert out[-1].k == 3 and out[-1].residual_norm <= 1e-12 * prob.Nb_norm
    assert relerr(out[-1].x, prob.reference) < 1e-10


@pytest.mark.parametrize("solver", [arnoldi_or_basic, arnoldi_or_incremental])
def test_full_space_exactness(solver):
    prob = seeded_problem(3, n=12)
    out = solver(prob, 12, tol=0)
    assert relerr(out[-1].x, prob.reference) < 1e-8


def test_basic_matches_incremental():
    prob = seeded_problem(5, n=30)
    a = arnoldi_or_basic(prob, 25, tol=0, keep_iterates=True)
    b = arnoldi_or_incremental(prob, 25, tol=0, keep_iterates=True)
    for ra, rb in zip(a, b):
        assert abs(ra.residual_norm - rb.residual_norm) <= 1e-10 * ra.residual_norm
        assert relerr(rb.x, ra.x) < 1e-10


def test_iterates_formed_only_at_the_end():
    prob = seeded_problem(1, n=20)
    out = arnoldi_or_incremental(prob, 8, tol=0)
    assert all(r.x is None for r in out[:-1]) and out[-1].x is not None


@pytest.mark.parametrize("J", [1, 3])
def test_rotation_log_length(J):
    prob = seeded_problem(2, n=20, degD=J, degN=0)
    s = IncrementalOR(prob)
    for k in range(1, 8):
        s.step()
        assert len(s.state.rotations) == k * J


def test_block_route_equals_dense_polynomial_route():
    prob = seeded_problem(4, n=20)
    s = BasicOR(prob)
    for _ in range(6):
        s.step()
    k, nu = 6, prob.nu
    Hs = s.dec.square(k + nu)
    ref = poly_matrix_eval(prob.R.denominator, Hs)[:, :k]
    assert relerr(s.Dcal, ref) < 1e-12
    ref_eta = poly_matrix_eval(prob.R.numerator, Hs)[:, 0]
    assert relerr(s.eta, ref_eta) < 1e-12


def test_fa_examples(rng):
    prob = RationalKrylovProblem(np.eye(3), [1, 2, 3], RationalFunction.linear_system())
    assert np.allclose(arnoldi_fa(prob, 1).x, [1, 2, 3])
    prob = seeded_problem(6, n=14)
    assert relerr(arnoldi_fa(prob, 14).x, prob.reference) < 1e-8


def test_fa_direct_formula():
    prob = seeded_problem(7, n=20)
    A, b = prob.A, prob.b
    dec = arnoldi_extend(arnoldi_start(A, b), A, 5)
    H5 = dec.square(5)
    Dk = poly_matrix_eval(prob.R.denominator, H5)
    Nk = poly_matrix_eval(prob.R.numerator, H5)
    x = np.linalg.norm(b) * dec.basis(5) @ np.linalg.solve(Dk, Nk[:, 0])
    assert relerr(arnoldi_fa(prob, 5).x, x) < 1e-10


def test_fa_singular_step():
    # D = z on [[0, 1], [1, 0]] with b = e1 has H_1 = [0]
    prob = RationalKrylovProblem([[0, 1], [1, 0]], [1, 0], RationalFunction.linear_system())
    with pytest.raises(SingularProjectedDenominator):
        arnoldi_fa(prob, 1)
    sweep = arnoldi_fa_sweep(prob, 2)
    assert sweep[0] is None and sweep[1] is not None


def test_optimal_projection(rng):
    A = crandn(rng, 10, 10)
    R = RationalFunction(Polynomial(crandn(rng, 3)), Polynomial([2.0]))
    prob = RationalKrylovProblem(A, crandn(rng, 10), R)
    assert relerr(optimal_projection(prob, 3).x, prob.reference) < 1e-12
    prob = seeded_problem(8, n=12)
    assert relerr(optimal_projection(prob, 12).x, prob.reference) < 1e-8


def test_cross_method_optimality():
    prob = seeded_problem(9, n=30)
    orr = arnoldi_or_incremental(prob, 20, tol=0, keep_iterates=True)
    fa = arnoldi_fa_sweep(prob, 20)
    opt = optimal_projection_sweep(prob, 20)
    slack = 1 + 1e-10
    for o, f, p in zip(orr, fa, opt):
        o_res, o_err = residual_and_error(prob, o.x)
        assert p.error_norm <= o_err * slack
        assert o_res <= p.residual_norm * slack
        assert s_norm_error(prob, o.x) <= p.s_norm_error * slack
        if f is not None:
            assert p.error_norm <= f.error_norm * slack
            assert o_res <= f.residual_norm * slack
            assert s_norm_error(prob, o.x) <= f.s_norm_error * slack


def test_pfrac_single_pole_equals_or(rng):
    A = crandn(rng, 20, 20) + 6 * np.eye(20)
    prob = RationalKrylovProblem(A, crandn(rng, 20), RationalFunction.linear_system(0.5))
    p = partial_fraction_solve(prob, 12, tol=0)
    o = arnoldi_or_incremental(prob, 12, tol=0, keep_iterates=True)
    for rp, ro in zip(p, o):
        assert relerr(rp.x, ro.x) < 1e-10


def test_pfrac_per_pole_gmres():
    prob = seeded_problem(10, n=25)
    out = partial_fraction_solve(prob, 10, tol=0)
    poles = prob.R.poles()
    for k in (3, 10):
        for r, z in zip(poles, out[k - 1].pole_solutions):
            M = prob.A - r * np.eye(prob.n)
            oracle = gmres_oracle(M, prob.b, k)[-1]
            assert abs(np.linalg.norm(prob.b - M @ z) - oracle) < 1e-8 * oracle


def test_pfrac_full_space():
    prob = seeded_problem(11, n=15)
    assert relerr(partial_fraction_solve(prob, 15, tol=0)[-1].x, prob.reference) < 1e-8


def test_residual_and_error_examples():
    prob = seeded_problem(12, n=10)
    r, e = residual_and_error(prob, prob.reference)
    assert r < 1e-10 * prob.Nb_norm and e < 1e-10 * np.linalg.norm(prob.reference)
    r, e = residual_and_error(prob, np.zeros(10))
    assert r == pytest.approx(prob.Nb_norm, rel=1e-15)
    assert e == pytest.approx(np.linalg.norm(prob.reference), rel=1e-15)


def test_internal_residual_identity():
    prob = seeded_problem(13, n=30)
    for r in arnoldi_or_incremental(prob, 20, tol=0, keep_iterates=True):
        assert abs(r.residual_norm - prob.residual(r.x)) <= 1e-8 * prob.Nb_norm


def test_s_norm_routes(rng):
    prob = seeded_problem(14, n=15)
    ctx = snorm_context(prob)
    assert np.allclose(ctx.S, ctx.S.conj().T)
    x = arnoldi_or_incremental(prob, 5, tol=0)[-1].x
    a, b = s_norm_error(prob, x), s_norm_error(prob, x, ctx)
    assert abs(a - b) <= 1e-8 * a
    assert abs(a - prob.residual(x)) <= 1e-8 * a
    assert s_norm_error(prob, prob.reference) < 1e-10 * prob.Nb_norm
    # D = const: S-norm is a scaled 2-norm
    R = RationalFunction(Polynomial(crandn(rng, 2)), Polynomial([1]))
    p2 = RationalKrylovProblem(prob.A, prob.b, R)
    x = crandn(rng, 15)
    assert abs(s_norm_error(p2, x) - p2.error(x)) < 1e-12 * p2.error(x)


def test_monotone_residuals():
    prob = seeded_problem(15, n=30)
    res = [r.residual_norm for r in arnoldi_or_incremental(prob, 25, tol=0)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(res, res[1:]))


def test_relation_check(rng):
    A = crandn(rng, 20, 20)
    prob = RationalKrylovProblem(A, crandn(rng, 20), RationalFunction.linear_system())
    assert fa_or_relation_check(prob, 15).max_deviation <= 1e-6
    D = np.diag(crandn(rng, 20))
    prob = RationalKrylovProblem(D, crandn(rng, 20), RationalFunction.linear_system(0.1))
    assert fa_or_relation_check(prob, 15).max_deviation <= 1e-6
    with pytest.raises(NotLinearSystem):
        fa_or_relation_check(seeded_problem(1, n=10), 5)


def test_relation_check_skips_stagnation():
    # cyclic shift: GMRES stagnates until the last step
    n = 6
    A = np.roll(np.eye(n), 1, axis=0)
    prob = RationalKrylovProblem(A, np.eye(n)[0], RationalFunction.linear_system())
    chk = fa_or_relation_check(prob, n)
    assert chk.skipped == list(range(1, n))
    assert chk.converged == [n]
