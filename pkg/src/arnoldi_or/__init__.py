"""Optimal Krylov approximation of ``R(A) b`` for rational ``R = N / D``.

Arnoldi-OR chooses ``x_k`` in the Krylov space to minimize
``||N(A) b - D(A) x_k||_2``.  The package also provides the usual
comparison methods, error-bound evaluators based on the numerical range,
a construction of matrices with a prescribed residual curve, and an
experiment/CLI layer that writes CSV data products.
"""

from .bounds import (
    BoundReport,
    RemovedDiskSet,
    bound_eig,
    bound_W,
    bound_W_minus_disks,
    bound_W_S,
    removed_disk_constant,
    removed_disks,
)
from .construction import (
    ConstructionResult,
    PrescribedProblem,
    assemble,
    construct_vectors,
    hessenberg_last_column,
    psi_from_phi,
    validate_curve,
)
from .errors import *  # noqa: F401,F403
from .experiment import ExperimentConfig, RunRecord, read_curves, run_experiment
from .generators import (
    Xoshiro256,
    derive_seed,
    gen_grcar,
    gen_random_rational,
    gen_random_vector,
    gen_randn_shift,
)
from .krylov import ArnoldiDecomposition, arnoldi_extend, arnoldi_start, hessenberg_power_block
from .linalg import GivensRotation, compute_givens, dense_solve, givens_qr_least_squares
from .mmio import read_matrix_market, write_matrix_market
from .ratfun import (
    Disk,
    Polynomial,
    RationalFunction,
    near_best_on_points,
    partial_fractions,
    smallest_enclosing_disk,
    sup_on_points,
    taylor_near_best,
)
from .solvers import (
    ApproxResult,
    RationalKrylovProblem,
    arnoldi_fa,
    arnoldi_or,
    arnoldi_or_basic,
    arnoldi_or_incremental,
    fa_or_relation_check,
    optimal_projection,
    partial_fraction_solve,
)
from .spectral import (
    cond2,
    general_eigs,
    hermitian_eigs,
    numerical_radius,
    numerical_range_boundary,
)

__version__ = "0.1.0"
