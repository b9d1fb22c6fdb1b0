import numpy as np
import pytest

# PASS/FAIL lines from the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def relerr(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    scale = np.linalg.norm(b)
    return np.linalg.norm(a - b) / (scale if scale > 0 else 1.0)


def match_multisets(a, b):
    """Largest distance after greedy nearest matching of two point sets."""
    a = list(np.asarray(a, dtype=complex))
    b = list(np.asarray(b, dtype=complex))
    assert len(a) == len(b)
    worst = 0.0
    for z in a:
        j = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b[j]))
        b.pop(j)
    return worst


def random_unit_vectors(rng, n, count):
    Z = crandn(rng, count, n)
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def seeded_problem(seed, n=40, degD=3, degN=2, shift=10.0):
    """Random problem from the package generators (matrix, rhs, rational streams)."""
    from arnoldi_or.generators import derive_seed, gen_randn_shift, gen_random_rational, gen_random_vector
    from arnoldi_or.solvers import RationalKrylovProblem

    A = gen_randn_shift(n, shift, derive_seed(seed, 0))
    b = gen_random_vector(n, derive_seed(seed, 1))
    R = gen_random_rational(degD, degN, derive_seed(seed, 2))
    return RationalKrylovProblem(A, b, R)


def gmres_oracle_mp(A, b, kmax, dps=100):
    """Extended-precision min_c ||b - A K_k c|| over the explicit Krylov matrix.

    Uses the normal equations in ``dps`` digits, which keeps full double
    accuracy even when ``K_k`` is far too ill-conditioned for double precision.
    """
    import mpmath as mp

    with mp.workdps(dps):
        n = len(b)
        Am = mp.matrix([[mp.mpc(complex(A[i, j])) for j in range(n)] for i in range(n)])
        bm = mp.matrix([mp.mpc(complex(v)) for v in b])
        cols = []
        v = bm
        for _ in range(kmax):
            v = Am * v
            cols.append(v)  # columns of A K_k
        G = mp.matrix(kmax, kmax)
        h = mp.matrix(kmax, 1)
        for i in range(kmax):
            ci = cols[i].H
            h[i] = (ci * bm)[0]
            for j in range(i, kmax):
                G[i, j] = (ci * cols[j])[0]
                G[j, i] = mp.conj(G[i, j])
        out = []
        for k in range(1, kmax + 1):
            c = mp.lu_solve(G[:k, :k], h[:k, 0])
            r = bm.copy()
            for j in range(k):
                r -= c[j] * cols[j]
            out.append(float(mp.norm(r)))
    return np.array(out)


def gmres_oracle(A, b, kmax):
    """min_c ||b - A K_k c|| by dense least squares on the explicit Krylov matrix.

    Double precision; trustworthy only while the Krylov matrix is well
    conditioned (roughly k <= 20 for the test matrices used here).
    """
    n = len(b)
    K = np.zeros((n, kmax), dtype=complex)
    v = np.asarray(b, dtype=complex)
    out = []
    for k in range(kmax):
        K[:, k] = v / np.linalg.norm(v)
        v = A @ K[:, k]
        M = A @ K[:, : k + 1]
        c = np.linalg.lstsq(M, b, rcond=None)[0]
        out.append(np.linalg.norm(b - M @ c))
    return np.array(out)


def random_prescribed(rng, n, J, flat_fraction=0.3):
    """Prescribed eigenvalues, denominator and residual curve for the construction.

    Eigenvalues are jittered around the unit circle and the denominator roots
    sit in the disk of radius 0.5, which keeps the assembled matrix only
    mildly nonnormal.  About ``flat_fraction`` of the curve steps are flat.
    """
    from arnoldi_or.construction import PrescribedProblem
    from arnoldi_or.ratfun import Polynomial

    ang = 2 * np.pi * (np.arange(n) + rng.uniform(-0.4, 0.4, n)) / n
    lam = rng.uniform(0.75, 1.25, n) * np.exp(1j * ang)
    gam = 0.5 * np.sqrt(rng.uniform(0, 1, J)) * np.exp(2j * np.pi * rng.uniform(0, 1, J))
    steps = rng.uniform(0.3, 1.0, n - J)
    steps[rng.uniform(0, 1, n - J) < flat_fraction] = 1.0
    phi = np.concatenate([[1.0], np.cumprod(steps)])
    return PrescribedProblem(lam, Polynomial.from_roots(gam), phi, tuple(gam))
