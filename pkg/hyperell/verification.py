import logging
import math
import os
import time
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np
import toml
from tqdm import tqdm

from hyperell.elliptic import ParamPair, complete_K, landen_descend, modulus_pair
from hyperell.errors import HyperellError
from hyperell.formulae import continuation_pair, pi_estimate
from hyperell.lauricella import LauricellaSpec, fd_integral, fd_reduce, fd_series
from hyperell.quadrature import (
    IntegrandSpec,
    hyperelliptic_direct,
    hyperelliptic_integrand,
    integrate,
    legendre_showcase,
)
from hyperell.reduction import INDICES, elliptic_closed, reduced_u_form
from hyperell.report import Check, Report
from hyperell.singular import (
    IDENTITY_CASES,
    TABULATED_ORDERS,
    lambda_closed,
    lambda_solver,
    ratio_check,
    singular_identity,
    theta_modulus,
)

logger = logging.getLogger(__name__)

SUITES = ("legendre", "reduction", "pi", "continuation", "singular", "properties")

REDUCTION_GRID = [(a, b) for a in (1.5, 2.0, 3.0, 5.0, 10.0) for b in (0.3, 0.5, 1.0, 1.2) if a > b]
PI_GRID = [(a, b) for a in (1.5, 2.0, 3.0) for b in (0.5, 1.0, 1.3) if a > b]
CONTINUATION_PAIRS = [(2.0, 1.0), (3.0, 1.0), (5.0, 2.0), (1.5, 0.5)]


@dataclass
class VerifyParameters:
    """
    Data class holding the verification run parameters.

    Parameters
    ----------
    tol : float
        Acceptance tolerance applied to every check; 0 keeps each check's own.
    jobs : int
        Worker processes; 0 uses every logical core.
    seed : int
        Seed of the randomised property checks.
    output_format : str
        text, json or csv.
    output_path : str
        Report file; empty writes to standard output.
    quadrature_tol : float
        Relative tolerance requested from the quadrature engine.
    property_samples : int
        Random Lauricella specs compared across evaluation routes.
    reduction_samples : int
        Random specs checked for value preservation under the reduction.
    elliptic_samples : int
        Random moduli and pairs for the complementarity and Landen checks.
    """

    tol: float = 0.0
    jobs: int = 0
    seed: int = 42
    output_format: str = "text"
    output_path: str = ""
    quadrature_tol: float = 1e-12
    property_samples: int = 200
    reduction_samples: int = 20
    elliptic_samples: int = 1000

    @property
    def workers(self):
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)


def read_toml(path):
    """
    Read TOML file.

    Parameters
    ----------
    path : str
        Path to TOML file.

    Returns
    -------
    dict
        Dictionary of parameter:value pairs.
    """
    with open(path, "r", encoding="utf8") as stream:
        return toml.load(stream)


def load_verify_parameters(path):
    """Load `VerifyParameters` from a toml file."""
    return VerifyParameters(**read_toml(path))


def _pair_label(a, b):
    return f"a{a:g}-b{b:g}"


# Each task returns rows (check id, lhs, rhs, tol, relative)


def _legendre_tol(row_id):
    if row_id.startswith("X-"):
        return 1e-10
    if row_id.startswith("p192"):
        return 1e-11
    return 1e-9


def legendre_rows(quad_tol):
    showcase = legendre_showcase(quad_tol)
    return [
        (f"legendre-{row_id}", lhs, rhs, _legendre_tol(row_id), True)
        for row_id, lhs, rhs in showcase.rows()
    ]


def reduction_rows(a, b, quad_tol):
    pair = ParamPair(a, b)
    label = _pair_label(a, b)
    rows = []
    for index in INDICES:
        direct = hyperelliptic_direct(index, pair, quad_tol)
        rows.append(
            (f"reduction-{label}-I{index}-u-form", reduced_u_form(index, pair, quad_tol), direct, 1e-8, True)
        )
        rows.append((f"reduction-{label}-I{index}-closed", elliptic_closed(index, pair), direct, 1e-8, True))

    closed = {index: elliptic_closed(index, pair) for index in INDICES}
    root_ab = pair.sqrt_ab
    rows.extend(
        [
            (f"reduction-{label}-prefactor-I2", closed[2], root_ab * closed[1], 1e-13, True),
            (f"reduction-{label}-prefactor-I5", closed[5], closed[4] / root_ab, 1e-13, True),
            (f"reduction-{label}-prefactor-I6", closed[6], root_ab * closed[3], 1e-13, True),
        ]
    )
    return rows


def pi_rows(a, b, quad_tol):
    pair = ParamPair(a, b)
    return [
        (f"pi-{_pair_label(a, b)}-p{index}", pi_estimate(index, pair, quad_tol).pi_value, math.pi, 1e-7, False)
        for index in INDICES
    ]


def continuation_rows(a, b, quad_tol):
    result = continuation_pair(ParamPair(a, b), quad_tol)
    label = _pair_label(a, b)
    return [
        (f"continuation-{label}-conti1", result.lhs1, result.rhs1 * result.expected_factor1, 1e-7, True),
        (f"continuation-{label}-conti2", result.lhs2, result.rhs2 * result.expected_factor2, 1e-7, True),
        (f"continuation-{label}-factor1", result.factor1, result.expected_factor1, 1e-7, True),
        (f"continuation-{label}-factor2", result.factor2, result.expected_factor2, 1e-7, True),
        (f"continuation-{label}-modulus-ratio", abs(result.rhs1) / abs(result.rhs2), math.sqrt(a), 1e-12, True),
        (f"continuation-{label}-pivot-argument", result.reduced_arguments[2], 2.0, 1e-15, False),
    ]


def singular_order_rows(n, quad_tol):
    entry = lambda_closed(n)
    solved = lambda_solver(n).k
    rows = [
        (f"singular-n{n:02d}-solver", solved, entry.lambda_closed, 1e-11, False),
        (f"singular-n{n:02d}-theta", theta_modulus(n).k, solved, 1e-11, False),
    ]
    for beta in (1.0, 7.0):
        k_minus = modulus_pair(ParamPair(entry.ab_ratio * beta, beta)).k_minus.k
        rows.append((f"singular-n{n:02d}-table-beta{beta:g}", k_minus, entry.lambda_closed, 1e-12, False))

    ratios = ratio_check(entry.pair, quad_tol)
    root_n = math.sqrt(n)
    rows.extend(
        [
            (f"singular-n{n:02d}-ratio-direct", ratios.direct, root_n, 1e-8, True),
            (f"singular-n{n:02d}-ratio-quozi", ratios.via_quozi, ratios.direct, 1e-8, True),
            (f"singular-n{n:02d}-ratio-quozi2", ratios.via_quozi2, ratios.direct, 1e-8, True),
        ]
    )
    return rows


def identity_rows(order, family, quad_tol):
    result = singular_identity(order, family, quad_tol)
    return [(f"singular-identity-n{order:02d}-{family}", result.lhs, result.rhs, 1e-8, True)]


def elliptic_property_rows(ks, pairs):
    complementarity = 0.0
    for a, b in pairs:
        moduli = modulus_pair(ParamPair(a, b))
        complementarity = max(complementarity, abs(moduli.k_plus.k**2 + moduli.k_minus.k**2 - 1.0))

    landen = 0.0
    for k in ks:
        k_new, factor = landen_descend(k)
        value = complete_K(k)
        landen = max(landen, abs(value - factor * complete_K(k_new)) / value)

    values = [complete_K(k) for k in sorted(ks)]
    monotone_violations = sum(1 for low, high in zip(values, values[1:]) if not low <= high)
    below_floor = sum(1 for value in values if value < math.pi / 2)
    return [
        ("properties-elliptic-complementarity", complementarity, 0.0, 1e-14, False),
        ("properties-elliptic-landen", landen, 0.0, 1e-12, False),
        ("properties-elliptic-monotone", float(monotone_violations + below_floor), 0.0, 0.0, False),
    ]


def _first_kind_integrand(k):
    def evaluate(u, dl, dr):
        # 1 - u^2 = (1 - u)(1 + u)
        return 1.0 / np.sqrt((1.0 + u) * (1.0 - (k * u) ** 2))

    return IntegrandSpec(evaluate, 0.0, 1.0, exponents=(0.0, -0.5), offsets=True)


def agm_oracle_rows(quad_tol):
    rows = []
    for k in np.linspace(0.1, 0.9, 9):
        oracle = integrate(_first_kind_integrand(k), quad_tol).value
        rows.append((f"properties-agm-vs-quadrature-k{k:.1f}", complete_K(k), oracle, 1e-11, True))
    return rows


def solver_sweep_rows():
    rows = []
    moduli = []
    for n in range(1, 41):
        solved = lambda_solver(n).k
        moduli.append(solved)
        rows.append((f"properties-theta-n{n:02d}", theta_modulus(n).k, solved, 1e-11, False))
    violations = sum(1 for high, low in zip(moduli, moduli[1:]) if not high > low)
    rows.append(("properties-solver-decreasing", float(violations), 0.0, 0.0, False))
    return rows


def fd_route_rows(sample_id, a, b, c, x, quad_tol):
    spec = LauricellaSpec(a=a, b=tuple(b), c=c, x=tuple(x))
    return [
        (
            f"properties-fd-routes-{sample_id:03d}",
            fd_series(spec),
            fd_integral(spec, quad_tol),
            1e-9,
            True,
        )
    ]


def fd_symmetry_rows(sample_id, a, b, c, x, quad_tol):
    spec = LauricellaSpec(a=a, b=tuple(b), c=c, x=tuple(x))
    value = fd_integral(spec, quad_tol)
    permuted = fd_integral(spec.permuted(list(reversed(range(spec.n)))), quad_tol)
    merged = LauricellaSpec(a=a, b=tuple(b) + (b[0],), c=c, x=tuple(x) + (x[0],))
    collapsed = LauricellaSpec(a=a, b=(2.0 * b[0],) + tuple(b[1:]), c=c, x=tuple(x))
    return [
        (f"properties-fd-permutation-{sample_id:03d}", permuted, value, 1e-12, True),
        (
            f"properties-fd-collapse-{sample_id:03d}",
            fd_integral(merged, quad_tol),
            fd_integral(collapsed, quad_tol),
            1e-10,
            True,
        ),
    ]


def fd_conjugation_rows(sample_id, a, c, x, quad_tol):
    arguments = []
    for value in x:
        arguments.extend([value, value.conjugate()])
    spec = LauricellaSpec.with_common_exponent(a, 0.5, c, arguments)
    value = complex(fd_integral(spec, quad_tol))
    return [(f"properties-fd-conjugation-{sample_id:03d}", value.imag, 0.0, 1e-10 * max(1.0, abs(value)), False)]


def fd_reduce_rows(sample_id, a, b, x, quad_tol):
    spec = LauricellaSpec(a=a, b=tuple(b), c=float(sum(b)), x=tuple(x))
    prefactor, reduced = fd_reduce(spec)
    return [
        (
            f"properties-fd-reduce-{sample_id:03d}",
            prefactor * fd_integral(reduced, quad_tol),
            fd_integral(spec, quad_tol),
            1e-9,
            True,
        )
    ]


def quadrature_property_rows(a, b, quad_tol):
    pair = ParamPair(a, b)
    label = _pair_label(a, b)
    spec = hyperelliptic_integrand(1, pair)
    split = pair.sqrt_ab
    pieces = integrate(spec.restricted(0.0, split), quad_tol).value
    pieces += integrate(spec.restricted(split, math.inf), quad_tol).value
    rows = [(f"properties-split-{label}", pieces, integrate(spec, quad_tol).value, 2e-10, True)]

    for index in INDICES:
        power = -1.5 if index in (1, 3, 5) else -0.5
        for scale in (0.1, 10.0):
            rows.append(
                (
                    f"properties-scaling-{label}-I{index}-x{scale:g}",
                    hyperelliptic_direct(index, pair.scaled(scale), quad_tol),
                    scale**power * elliptic_closed(index, pair),
                    1e-9,
                    True,
                )
            )
    return rows


_TASKS = {
    "legendre": legendre_rows,
    "reduction": reduction_rows,
    "pi": pi_rows,
    "continuation": continuation_rows,
    "singular-order": singular_order_rows,
    "identity": identity_rows,
    "elliptic-properties": elliptic_property_rows,
    "agm-oracle": agm_oracle_rows,
    "solver-sweep": solver_sweep_rows,
    "fd-routes": fd_route_rows,
    "fd-symmetry": fd_symmetry_rows,
    "fd-conjugation": fd_conjugation_rows,
    "fd-reduce": fd_reduce_rows,
    "quadrature-properties": quadrature_property_rows,
}


def _random_spec(rng, n, complex_arguments):
    # parameters in (0, 3), |x_i| <= 0.8
    a = rng.uniform(0.25, 1.5)
    c = a + rng.uniform(0.5, 1.45)
    b = rng.uniform(0.1, 1.5, size=n)
    radius = rng.uniform(0.0, 0.8, size=n)
    if complex_arguments:
        x = radius * np.exp(1j * rng.uniform(-np.pi, np.pi, size=n))
        x = [complex(value) for value in x]
    else:
        x = [float(value) for value in radius * rng.choice([-1.0, 1.0], size=n)]
    return float(a), [float(value) for value in b], float(c), x


def _property_tasks(params):
    rng = np.random.default_rng(params.seed)
    quad_tol = params.quadrature_tol
    tasks = []

    ks = rng.uniform(0.0, 0.999, size=params.elliptic_samples).tolist()
    bs = rng.uniform(0.05, 5.0, size=params.elliptic_samples)
    ratios = rng.uniform(1.05, 50.0, size=params.elliptic_samples)
    pairs = [(float(b * r), float(b)) for b, r in zip(bs, ratios)]
    tasks.append(("elliptic-properties", (ks, pairs)))
    tasks.append(("agm-oracle", (quad_tol,)))
    tasks.append(("solver-sweep", ()))

    for sample_id in range(params.property_samples):
        n = int(rng.integers(1, 5))
        a, b, c, x = _random_spec(rng, n, complex_arguments=sample_id % 2 == 1)
        tasks.append(("fd-routes", (sample_id, a, b, c, x, quad_tol)))

    for sample_id in range(params.reduction_samples):
        a_param, b, c, x = _random_spec(rng, 3, complex_arguments=False)
        tasks.append(("fd-symmetry", (sample_id, a_param, b, c, x, quad_tol)))

        exponents = rng.uniform(0.3, 1.0, size=3).tolist()
        reduce_a = float(rng.uniform(0.1, sum(exponents) - 0.3))
        arguments = rng.uniform(-0.9, 0.9, size=3).tolist()
        tasks.append(("fd-reduce", (sample_id, reduce_a, exponents, arguments, quad_tol)))

        # imaginary parts kept away from the cut
        conjugates = [
            complex(re, im)
            for re, im in zip(rng.uniform(-2.0, 2.0, size=2), rng.uniform(0.5, 2.0, size=2))
        ]
        tasks.append(("fd-conjugation", (sample_id, a_param, c, conjugates, quad_tol)))

    for a, b in ((2.0, 1.0), (3.0, 1.0), (5.0, 0.5)):
        tasks.append(("quadrature-properties", (a, b, quad_tol)))
    return tasks


def suite_tasks(suite, params: VerifyParameters):
    """The list of (task name, args) making up `suite`."""
    quad_tol = params.quadrature_tol
    if suite == "legendre":
        return [("legendre", (quad_tol,))]
    if suite == "reduction":
        return [("reduction", (a, b, quad_tol)) for a, b in REDUCTION_GRID]
    if suite == "pi":
        return [("pi", (a, b, quad_tol)) for a, b in PI_GRID]
    if suite == "continuation":
        return [("continuation", (a, b, quad_tol)) for a, b in CONTINUATION_PAIRS]
    if suite == "singular":
        tasks = [("singular-order", (n, quad_tol)) for n in TABULATED_ORDERS]
        tasks.extend(("identity", (order, family, quad_tol)) for order, family in sorted(IDENTITY_CASES))
        return tasks
    if suite == "properties":
        return _property_tasks(params)
    if suite == "all":
        return [task for name in SUITES for task in suite_tasks(name, params)]
    raise ValueError(f"Unknown suite {suite!r}, expected one of {SUITES + ('all',)}")


def task_worker(args):
    """
    Run one task and turn its rows into checks.

    Parameters
    ----------
    args : tuple
        (task name, task arguments, tolerance override or 0).

    Returns
    -------
    list(Check)
    """
    name, task_args, override = args
    try:
        rows = _TASKS[name](*task_args)
    except (HyperellError, ArithmeticError, ValueError) as error:
        logger.error("Task %s%s failed: %s", name, task_args[:3], error)
        label = "-".join(str(arg) for arg in task_args[:3] if isinstance(arg, (int, float, str)))
        return [Check.failed(f"{name}-{label}-error", override or 0.0)]
    return [
        Check.compare(check_id, lhs, rhs, override or tol, relative=relative)
        for check_id, lhs, rhs, tol, relative in rows
    ]


def run_verification(suite, params: VerifyParameters, progress=True) -> Report:
    """
    Run a suite, fanning its tasks out over a worker pool.

    Checks are collected as they complete and sorted by id, so the report
    does not depend on scheduling.
    """
    start = time.perf_counter()
    tasks = [(name, args, params.tol) for name, args in suite_tasks(suite, params)]
    workers = min(params.workers, len(tasks))
    logger.info("Running suite %s: %d tasks on %d workers", suite, len(tasks), workers)

    checks = []
    if workers > 1:
        with Pool(workers) as pool:
            results = pool.imap_unordered(task_worker, tasks)
            for rows in tqdm(results, total=len(tasks), desc=f"verify {suite}", disable=not progress):
                checks.extend(rows)
    else:
        for task in tqdm(tasks, desc=f"verify {suite}", disable=not progress):
            checks.extend(task_worker(task))

    return Report(
        suite=suite,
        config={"tol": params.tol or None, "seed": params.seed, "jobs": params.workers},
        checks=checks,
        elapsed_ms=1000.0 * (time.perf_counter() - start),
    )
