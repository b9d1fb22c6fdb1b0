"""Experiment configuration, pipelines and CSV data products.

A configuration is a JSON object::

    {
      "matrix":   {"type": "randn_shift", "n": 100, "shift": 15},
      "rhs":      {"type": "random"},
      "rational": {"type": "random_factored", "degD": 3, "degN": 2},
      "kmax": 40,
      "methods": ["OR", "FA", "OPT2", "PFRAC"],
      "bounds": ["eig", "W", "W_S", "W_minus_disks"]
    }

Matrix types are ``randn_shift`` (``n``, ``shift``, optional ``seed``),
``grcar`` (``n``) and ``file`` (``path`` to a Matrix Market file).  The
right-hand side is ``random`` (optional ``seed``) or ``file``.  Rational
functions are ``random_factored`` (``degD``, ``degN``, optional ``seed``),
``explicit`` (``num`` and ``den`` as ascending ``[re, im]`` coefficient
lists), ``linear_system`` (optional ``shift``) or ``file`` (a JSON file
holding ``num`` and ``den``).  Seeds not given explicitly are derived from
the run seed, one stream per component.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import (
    REGION_SAMPLES,
    bound_eig,
    bound_W,
    bound_W_minus_disks,
    bound_W_S,
    region_minus_disks,
    region_minus_disks_boundary,
    region_samples,
    removed_disks,
    similarity_by_root,
    write_bounds_csv,
)
from .errors import ArnoldiORError, ConfigError
from .generators import (
    derive_seed,
    gen_grcar,
    gen_random_rational,
    gen_random_vector,
    gen_randn_shift,
)
from .krylov import arnoldi_extend
from .mmio import read_matrix_market, read_vector
from .ratfun import (
    Polynomial,
    RationalFunction,
    near_best_on_points,
    poly_matrix_eval,
    smallest_enclosing_disk,
    sup_on_points,
    taylor_near_best,
)
from .solvers import (
    DEFAULT_TOL,
    METHODS,
    BasicOR,
    IncrementalOR,
    RationalKrylovProblem,
    arnoldi_fa_sweep,
    arnoldi_or_incremental,
    optimal_projection_sweep,
    partial_fraction_solve,
    s_norm_error,
)
from .spectral import (
    cond2,
    convex_hull,
    eigenvector_condition,
    general_eigs,
    inside_convex_polygon,
    matrix_sqrt_hermitian,
    numerical_radius,
    numerical_range_boundary,
)

BOUND_KINDS = ("eig", "W", "W_S", "W_minus_disks")
MATRIX_TYPES = ("randn_shift", "grcar", "file")
RHS_TYPES = ("random", "file")
RATIONAL_TYPES = ("random_factored", "explicit", "linear_system", "file")
CURVES_HEADER = ["k", "method", "residual_2norm", "error_2norm", "s_norm_error"]
STREAM_MATRIX, STREAM_RHS, STREAM_RATIONAL = 0, 1, 2


def _fmt(x):
    return "" if x is None else f"{x:.17g}"


def _line_of(text, key):
    """1-based line of the first ``"key"`` in the JSON source, if any."""
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


def _complex(v, what, line):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
            isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
        return complex(v[0], v[1])
    raise ConfigError(f"{what} must be a number or a [re, im] pair", line)


def _coeff_list(v, what, line):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{what} must be a non-empty list of coefficients", line)
    return [_complex(c, what, line) for c in v]


@dataclass
class ExperimentConfig:
    matrix: dict
    rhs: dict
    rational: dict
    kmax: int
    tol: float = DEFAULT_TOL
    methods: tuple = METHODS
    bounds: tuple = ()
    region_samples: int = REGION_SAMPLES
    output_dir: str = "out"
    seed: int = 0
    base_dir: Path = field(default_factory=Path)
    source: str = ""

    @classmethod
    def from_file(cls, path, seed=None):
        path = Path(path)
        return cls.from_text(path.read_text(), base_dir=path.parent, seed=seed)

    @classmethod
    def from_text(cls, text, base_dir=".", seed=None):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(exc.msg, exc.lineno) from None
        if not isinstance(obj, dict):
            raise ConfigError("configuration must be a JSON object", 1)
        known = {"matrix", "rhs", "rational", "kmax", "tol", "methods", "bounds",
                 "region_samples", "output_dir", "seed"}
        for key in obj:
            if key not in known:
                raise ConfigError(f"unknown key {key!r}", _line_of(text, key))
        for key in ("matrix", "rational", "kmax"):
            if key not in obj:
                raise ConfigError(f"missing required key {key!r}", 1)

        def line(key):
            return _line_of(text, key)

        matrix = obj["matrix"]
        if not isinstance(matrix, dict) or matrix.get("type") not in MATRIX_TYPES:
            raise ConfigError(f"matrix.type must be one of {MATRIX_TYPES}", line("matrix"))
        if matrix["type"] in ("randn_shift", "grcar"):
            n = matrix.get("n")
            if not isinstance(n, int) or isinstance(n, bool) or n < 1:
                raise ConfigError("matrix.n must be a positive integer", line("n"))
            if matrix["type"] == "grcar" and n < 5:
                raise ConfigError("grcar matrices need n >= 5", line("n"))
            if matrix["type"] == "randn_shift":
                _complex(matrix.get("shift", 0), "matrix.shift", line("shift"))
        elif not isinstance(matrix.get("path"), str):
            raise ConfigError("matrix.path must be a string", line("matrix"))

        rhs = obj.get("rhs", {"type": "random"})
        if not isinstance(rhs, dict) or rhs.get("type") not in RHS_TYPES:
            raise ConfigError(f"rhs.type must be one of {RHS_TYPES}", line("rhs"))
        if rhs["type"] == "file" and not isinstance(rhs.get("path"), str):
            raise ConfigError("rhs.path must be a string", line("rhs"))

        rational = obj["rational"]
        if not isinstance(rational, dict) or rational.get("type") not in RATIONAL_TYPES:
            raise ConfigError(f"rational.type must be one of {RATIONAL_TYPES}",
                              line("rational"))
        rt = rational["type"]
        if rt == "random_factored":
            for key, lo in (("degD", 1), ("degN", 0)):
                v = rational.get(key)
                if not isinstance(v, int) or isinstance(v, bool) or v < lo:
                    raise ConfigError(f"rational.{key} must be an integer >= {lo}", line(key))
        elif rt == "explicit":
            _coeff_list(rational.get("num"), "rational.num", line("num"))
            _coeff_list(rational.get("den"), "rational.den", line("den"))
        elif rt == "linear_system":
            _complex(rational.get("shift", 0), "rational.shift", line("shift"))
        elif not isinstance(rational.get("path"), str):
            raise ConfigError("rational.path must be a string", line("rational"))

        kmax = obj["kmax"]
        if not isinstance(kmax, int) or isinstance(kmax, bool) or kmax < 1:
            raise ConfigError("kmax must be a positive integer", line("kmax"))
        tol = obj.get("tol", DEFAULT_TOL)
        if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol < 0:
            raise ConfigError("tol must be a nonnegative number", line("tol"))
        methods = obj.get("methods", list(METHODS))
        if not isinstance(methods, list) or any(m not in METHODS for m in methods):
            raise ConfigError(f"methods must be a list drawn from {METHODS}", line("methods"))
        bounds = obj.get("bounds", [])
        if not isinstance(bounds, list) or any(b not in BOUND_KINDS for b in bounds):
            raise ConfigError(f"bounds must be a list drawn from {BOUND_KINDS}", line("bounds"))
        samples = obj.get("region_samples", REGION_SAMPLES)
        if not isinstance(samples, int) or isinstance(samples, bool) or samples < 8:
            raise ConfigError("region_samples must be an integer >= 8", line("region_samples"))
        out = obj.get("output_dir", "out")
        if not isinstance(out, str):
            raise ConfigError("output_dir must be a string", line("output_dir"))
        cfg_seed = obj.get("seed", 0)
        if not isinstance(cfg_seed, int) or isinstance(cfg_seed, bool) or cfg_seed < 0:
            raise ConfigError("seed must be a nonnegative integer", line("seed"))
        return cls(matrix, rhs, rational, kmax, float(tol), tuple(methods), tuple(bounds),
                   samples, out, cfg_seed if seed is None else int(seed),
                   Path(base_dir), text)

    def _seed(self, entry, stream):
        return int(entry["seed"]) if "seed" in entry else derive_seed(self.seed, stream)

    def _path(self, p):
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    def build_matrix(self):
        m = self.matrix
        if m["type"] == "randn_shift":
            return gen_randn_shift(m["n"], _complex(m.get("shift", 0), "shift", None),
                                   self._seed(m, STREAM_MATRIX))
        if m["type"] == "grcar":
            return gen_grcar(m["n"])
        return read_matrix_market(self._path(m["path"]))

    def build_rhs(self, n):
        r = self.rhs
        if r["type"] == "random":
            return gen_random_vector(n, self._seed(r, STREAM_RHS))
        b = read_vector(self._path(r["path"]))
        if b.shape[0] != n:
            raise ConfigError(f"rhs has length {b.shape[0]}, matrix has n = {n}",
                              _line_of(self.source, "rhs"))
        return b

    def build_rational(self):
        r = self.rational
        rt = r["type"]
        if rt == "random_factored":
            return gen_random_rational(r["degD"], r["degN"], self._seed(r, STREAM_RATIONAL))
        if rt == "linear_system":
            return RationalFunction.linear_system(_complex(r.get("shift", 0), "shift", None))
        if rt == "explicit":
            obj = r
        else:
            obj = json.loads(self._path(r["path"]).read_text())
        num = _coeff_list(obj.get("num"), "num", _line_of(self.source, "num"))
        den = _coeff_list(obj.get("den"), "den", _line_of(self.source, "den"))
        try:
            return RationalFunction(Polynomial(num), Polynomial(den))
        except ValueError as exc:
            raise ConfigError(str(exc), _line_of(self.source, "den")) from None

    def build(self):
        A = self.build_matrix()
        n = A.shape[0]
        b = self.build_rhs(n)
        R = self.build_rational()
        if self.kmax + R.nu > n:
            raise ConfigError(f"kmax + nu = {self.kmax + R.nu} exceeds n = {n}",
                              _line_of(self.source, "kmax"))
        return RationalKrylovProblem(A, b, R)


@dataclass
class RunRecord:
    curves: dict
    region: list = field(default_factory=list)
    eigenvalues: np.ndarray = None
    poles: np.ndarray = None
    bounds: list = field(default_factory=list)
    nearbest: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


# -- curves -------------------------------------------------------------------

def method_curves(prob, method, kmax, tol):
    """Rows ``(k, residual, error, s_norm_error)``; ``None`` for undefined steps."""
    if method == "OR":
        runs = arnoldi_or_incremental(prob, kmax, tol, keep_iterates=True)
        rows = []
        for r in runs:
            rows.append((r.k, prob.residual(r.x), prob.error(r.x), s_norm_error(prob, r.x)))
        return rows
    if method == "FA":
        sweep = arnoldi_fa_sweep(prob, kmax)
    elif method == "OPT2":
        sweep = optimal_projection_sweep(prob, kmax)
    else:
        sweep = partial_fraction_solve(prob, kmax, tol, keep_iterates=True)
    rows = []
    for k, r in enumerate(sweep, start=1):
        if r is None:
            rows.append((k, None, None, None))
        else:
            rows.append((r.k, r.residual_norm, r.error_norm, r.s_norm_error))
    return rows


def write_curves(path, curves):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVES_HEADER)
        for method, rows in curves.items():
            for k, res, err, sn in rows:
                w.writerow([k, method, _fmt(res), _fmt(err), _fmt(sn)])


def read_curves(path):
    """Inverse of :func:`write_curves`."""
    curves = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CURVES_HEADER:
            raise ValueError(f"unexpected header {header}")
        for row in reader:
            vals = tuple(None if v == "" else float(v) for v in row[2:])
            curves.setdefault(row[1], []).append((int(row[0]),) + vals)
    return curves


def _write_points(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (int, str)) else _fmt(v) for v in row])


# -- regions and bounds -------------------------------------------------------

def _surrogate(R, region_pts, k):
    """Near-best degree ``k - 1`` polynomial for ``R`` on a sampled region.

    The truncated Taylor series about the smallest disk enclosing the region
    is used when every pole lies outside that disk; otherwise a discrete
    near-minimax fit on the samples.
    """
    disk = smallest_enclosing_disk(region_pts)
    poles = R.poles()
    if not len(poles) or np.min(np.abs(poles - disk.center)) > disk.radius * (1 + 1e-8):
        return taylor_near_best(R, disk, k)
    return near_best_on_points(R, region_pts, k)


def _surrogate_sequence(R, pts, kmax, region, nearbest, make=None):
    """Surrogates for ``k = 1..kmax`` with nonincreasing sup error on ``pts``.

    A lower-degree polynomial is also admissible at degree ``k - 1``, so the
    previous one is kept whenever the fresh fit is worse on the samples.
    Sup errors are appended to ``nearbest`` as ``(k, region, error)``.
    """
    make = make or (lambda k: _surrogate(R, pts, k))
    out, prev, prev_err = [], None, np.inf
    for k in range(1, kmax + 1):
        p = make(k)
        err = sup_on_points(R, p, pts)
        if err > prev_err:
            p, err = prev, prev_err
        out.append(p)
        nearbest.append((k, region, err))
        prev, prev_err = p, err
    return out


def _disk_json(D):
    return {"center": [D.center.real, D.center.imag], "radius": D.radius}


def run_experiment(config, out_dir=None, parts=("curves", "region", "bounds")):
    """Run the configured pipeline and write its CSV/JSON products."""
    out = Path(out_dir if out_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    prob = config.build()
    A, R = prob.A, prob.R
    diag = {"n": prob.n, "nu": R.nu, "J": R.J, "L": R.L, "kmax": config.kmax,
            "seed": config.seed, "method_errors": {}, "bound_errors": {}}
    record = RunRecord(curves={})

    if "curves" in parts:
        for m in config.methods:
            try:
                record.curves[m] = method_curves(prob, m, config.kmax, config.tol)
            except ArnoldiORError as exc:
                diag["method_errors"][m] = f"{type(exc).__name__}: {exc}"
        write_curves(out / "curves.csv", record.curves)

    boundary = numerical_range_boundary(A)
    hull = convex_hull(boundary.points)
    eig = general_eigs(A).eigenvalues
    poles = R.poles()
    record.eigenvalues, record.poles = eig, poles
    inside = [bool(inside_convex_polygon(hull, r)) for r in poles]
    diag["poles_outside_W"] = not any(inside)
    diag["numerical_radius"] = numerical_radius(A)
    diag["kappa_DA"] = cond2(poly_matrix_eval(R.denominator, A))
    try:
        diag["kappa_V"] = eigenvector_condition(A)
    except ArnoldiORError as exc:
        diag["kappa_V"] = None
        diag["bound_errors"]["kappa_V"] = f"{type(exc).__name__}: {exc}"
    _, w_pts = region_samples(boundary, config.region_samples)
    disk = smallest_enclosing_disk(w_pts)
    diag["enclosing_disk"] = _disk_json(disk)

    region_rows = [(float(t), z.real, z.imag, boundary.kind)
                   for t, z in zip(boundary.angles, boundary.points)]
    region_rows += [(float(t), z.real, z.imag, "enclosing_disk")
                    for t, z in zip(np.linspace(0, 2 * np.pi, 256, endpoint=False),
                                    disk.boundary(256))]
    disks = None
    if any(inside):
        try:
            disks = removed_disks(A, poles[np.array(inside)], boundary)
            diag["removed_disks"] = [{"center": [c.real, c.imag], "radius": float(r)}
                                     for c, r in zip(disks.poles, disks.radii)]
            diag["removed_disks_overlap"] = disks.overlapping
            rb = region_minus_disks_boundary(boundary, disks, config.region_samples)
            region_rows += [(float(t), z.real, z.imag, rb.kind)
                            for t, z in zip(rb.angles, rb.points)]
        except ArnoldiORError as exc:
            diag["bound_errors"]["removed_disks"] = f"{type(exc).__name__}: {exc}"
            disks = None

    if "region" in parts:
        _write_points(out / "region.csv", ["theta", "re", "im", "kind"], region_rows)
        _write_points(out / "spectrum.csv", ["index", "re", "im"],
                      [(i, z.real, z.imag) for i, z in enumerate(eig)])
        _write_points(out / "poles.csv", ["index", "re", "im", "inside_W"],
                      [(i, z.real, z.imag, str(f).lower())
                       for i, (z, f) in enumerate(zip(poles, inside))])

    if "bounds" in parts:
        record.bounds, record.nearbest = _bounds(config, prob, boundary, w_pts, disk,
                                                  disks, diag)
        write_bounds_csv(out / "bounds.csv", record.bounds)
        _write_points(out / "nearbest.csv", ["k", "region", "sup_error"], record.nearbest)

    record.diagnostics = diag
    with open(out / "diagnostics.json", "w") as fh:
        json.dump(diag, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return record


def _bounds(config, prob, boundary, w_pts, disk, disks, diag):
    A, R = prob.A, prob.R
    kappa_S_sqrt = diag["kappa_DA"]
    reports, nearbest = [], []
    kinds = config.bounds
    kmax = config.kmax
    poles = R.poles()
    disk_ok = not len(poles) or np.min(np.abs(poles - disk.center)) > disk.radius * (1 + 1e-8)
    if disk_ok:
        _surrogate_sequence(R, disk.boundary(), kmax, "enclosing_disk", nearbest,
                            lambda k: taylor_near_best(R, disk, k))
    errors = diag["bound_errors"]

    def attempt(kind, fn):
        if kind in errors:
            return
        try:
            reports.extend(fn())
        except ArnoldiORError as exc:
            errors[kind] = f"{type(exc).__name__}: {exc}"

    if "eig" in kinds or "W" in kinds:
        if diag["poles_outside_W"]:
            ps = _surrogate_sequence(R, w_pts, kmax, "numerical_range", nearbest)
        if "eig" in kinds:
            if diag["kappa_V"] is None:
                errors["eig"] = "eigenvector condition number unavailable"
            elif not diag["poles_outside_W"]:
                errors["eig"] = "a pole lies inside W(A)"
            else:
                eig = general_eigs(A).eigenvalues
                attempt("eig", lambda: [bound_eig(R, p, eig, kappa_S_sqrt, diag["kappa_V"], k)
                                        for k, p in enumerate(ps, start=1)])
        if "W" in kinds:
            if not diag["poles_outside_W"]:
                errors["W"] = "a pole lies inside W(A)"
            else:
                attempt("W", lambda: [bound_W(R, p, boundary, kappa_S_sqrt,
                                              config.region_samples, k)
                                      for k, p in enumerate(ps, start=1)])
    if "W_S" in kinds:
        def ws():
            DA = prob.DA
            root = matrix_sqrt_hermitian(DA.conj().T @ DA)
            bd = numerical_range_boundary(similarity_by_root(A, root))
            _, pts = region_samples(bd, config.region_samples)
            ps = _surrogate_sequence(R, pts, kmax, "numerical_range_S", nearbest)
            return [bound_W_S(R, p, A, root, samples=config.region_samples, k=k, boundary=bd)
                    for k, p in enumerate(ps, start=1)]
        attempt("W_S", ws)
    if "W_minus_disks" in kinds:
        if disks is None:
            errors["W_minus_disks"] = "no removed disks (every pole lies outside W(A))"
        else:
            def wmd():
                _, pts = region_minus_disks(boundary, disks, config.region_samples)
                ps = _surrogate_sequence(R, pts, kmax, "numerical_range_minus_disks", nearbest,
                                         lambda k: near_best_on_points(R, pts, k))
                return [bound_W_minus_disks(R, p, boundary, disks, kappa_S_sqrt,
                                            config.region_samples, k)
                        for k, p in enumerate(ps, start=1)]
            attempt("W_minus_disks", wmd)
    reports.sort(key=lambda r: (r.k, r.kind))
    nearbest.sort(key=lambda row: (row[1], row[0]))
    return reports, nearbest


# -- timing -------------------------------------------------------------------

@dataclass
class BenchResult:
    k: np.ndarray
    basic: np.ndarray
    incremental: np.ndarray
    basic_exponent: float
    incremental_exponent: float

    def to_csv(self, path):
        _write_points(path, ["k", "basic_seconds", "incremental_seconds"],
                      [(int(k), b, i) for k, b, i in zip(self.k, self.basic, self.incremental)])


def _step_times(cls, prob, kmax, repeats):
    best = np.full(kmax, np.inf)
    for _ in range(repeats):
        solver = cls(prob)
        # the Arnoldi part is identical for both variants; time only the update
        arnoldi_extend(solver.dec, prob.A, min(kmax + prob.nu, prob.n) - solver.dec.steps_done)
        for i in range(kmax):
            t0 = time.perf_counter()
            solver.step()
            best[i] = min(best[i], time.perf_counter() - t0)
    return best


def bench(prob, kmax, repeats=5, fit_from=None):
    """Per-step least-squares update times of basic and incremental Arnoldi-OR.

    Each entry is the minimum over ``repeats`` runs.  Exponents are slopes
    of a log-log fit over ``k >= fit_from`` (default ``kmax / 2``, where
    fixed interpreter overhead matters least).
    """
    if kmax + prob.nu > prob.n:
        raise ValueError("kmax + nu exceeds n")
    basic = _step_times(BasicOR, prob, kmax, repeats)
    inc = _step_times(IncrementalOR, prob, kmax, repeats)
    ks = np.arange(1, kmax + 1)
    lo = max(2, kmax // 2) if fit_from is None else fit_from
    sel = ks >= lo
    logk = np.log(ks[sel])
    eb = float(np.polyfit(logk, np.log(basic[sel]), 1)[0])
    ei = float(np.polyfit(logk, np.log(inc[sel]), 1)[0])
    return BenchResult(ks, basic, inc, eb, ei)


def default_bench_problem(n=200, degD=3, seed=0):
    A = gen_randn_shift(n, 30.0, derive_seed(seed, STREAM_MATRIX))
    b = gen_random_vector(n, derive_seed(seed, STREAM_RHS))
    R = gen_random_rational(degD, 0, derive_seed(seed, STREAM_RATIONAL))
    return RationalKrylovProblem(A, b, R)
