import logging
import math
from dataclasses import replace
from pathlib import Path

import click
import toml

from hyperell.elliptic import ParamPair, complete_K, modulus_pair
from hyperell.errors import HyperellError
from hyperell.formulae import lauricella_form, pi_estimate
from hyperell.lauricella import LauricellaSpec, fd_integral, fd_series, gauss_2f1
from hyperell.quadrature import hyperelliptic_direct
from hyperell.reduction import elliptic_closed, reduced_u_form
from hyperell.singular import (
    SINGULAR_TABLE,
    lambda_solver,
    ratio_check,
    singular_identity,
    theta_modulus,
)
from hyperell.verification import (
    SUITES,
    VerifyParameters,
    load_verify_parameters,
    run_verification,
)

SIGNIFICANT_DIGITS = 15


def format_number(value):
    """15 significant digits; complex values as re+imj."""
    if isinstance(value, complex):
        return f"{value.real:.{SIGNIFICANT_DIGITS}g}{value.imag:+.{SIGNIFICANT_DIGITS}g}j"
    if isinstance(value, (int, float)):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def _parse_number(text):
    try:
        return float(text)
    except ValueError:
        value = complex(text.replace(" ", ""))
        return value.real if value.imag == 0.0 else value


def _parse_arguments(pairs):
    arguments = {}
    for pair in pairs:
        key, separator, text = pair.partition("=")
        if not separator or not key or not text:
            raise click.UsageError(f"Malformed argument {pair!r}, expected key=value")
        arguments[key] = text
    return arguments


def _number(arguments, key):
    try:
        return _parse_number(arguments[key])
    except ValueError:
        raise click.UsageError(f"{key}={arguments[key]!r} is not a number") from None


def _integer(arguments, key):
    value = _number(arguments, key)
    if isinstance(value, complex) or not math.isfinite(value) or value != int(value):
        raise click.UsageError(f"{key}={arguments[key]!r} is not an integer")
    return int(value)


def _numbers(arguments, key):
    try:
        return tuple(_parse_number(item) for item in arguments[key].split(","))
    except ValueError:
        raise click.UsageError(f"{key}={arguments[key]!r} is not a comma separated list of numbers") from None


def _pair(arguments):
    return ParamPair(_number(arguments, "a"), _number(arguments, "b"))


def _tol(arguments):
    return _number(arguments, "tol") if "tol" in arguments else None


def _eval_K(arguments):
    return [("value", complete_K(_number(arguments, "k")))]


def _eval_Kpair(arguments):
    moduli = modulus_pair(_pair(arguments))
    return [
        ("k_plus", moduli.k_plus.k),
        ("k_minus", moduli.k_minus.k),
        ("K_plus", moduli.K_plus),
        ("K_minus", moduli.K_minus),
        ("ratio", moduli.ratio),
    ]


def _quadrature_lines(result):
    lines = [("value", result.value), ("error_estimate", result.error_estimate)]
    lines.extend(("flag", flag) for flag in result.flags)
    return lines


def _eval_I_direct(arguments):
    tol = _tol(arguments)
    result = hyperelliptic_direct(
        _integer(arguments, "index"), _pair(arguments), tol=tol, full_output=True
    )
    return _quadrature_lines(result)


def _eval_I_closed(arguments):
    return [("value", elliptic_closed(_integer(arguments, "index"), _pair(arguments)))]


def _eval_I_u(arguments):
    result = reduced_u_form(
        _integer(arguments, "index"), _pair(arguments), tol=_tol(arguments), full_output=True
    )
    return _quadrature_lines(result)


def _eval_I_lauricella(arguments):
    value = lauricella_form(_integer(arguments, "index"), _pair(arguments), _tol(arguments) or 1e-12)
    return [("value", value)]


def _eval_fd(arguments):
    x = _numbers(arguments, "x")
    exponents = _numbers(arguments, "b")
    if len(exponents) == 1:
        exponents = exponents * len(x)
    spec = LauricellaSpec(a=_number(arguments, "a"), b=exponents, c=_number(arguments, "c"), x=x)
    method = arguments.get("method", "integral")
    if method == "series":
        result = fd_series(spec, full_output=True)
    elif method == "integral":
        result = fd_integral(spec, _tol(arguments), full_output=True)
    else:
        raise click.UsageError(f"method={method!r}, expected series or integral")
    return _quadrature_lines(result)


def _eval_2f1(arguments):
    value = gauss_2f1(
        _number(arguments, "a"), _number(arguments, "b"), _number(arguments, "c"), _number(arguments, "x")
    )
    return [("value", value)]


def _eval_pi(arguments):
    verdict = pi_estimate(_integer(arguments, "index"), _pair(arguments), _tol(arguments) or 1e-12)
    return [("value", verdict.pi_value), ("abs_error", verdict.abs_error)]


def _eval_lambda(arguments):
    n = _number(arguments, "n")
    lines = [("value", lambda_solver(n).k)]
    if n in SINGULAR_TABLE:
        lines.append(("closed_form", SINGULAR_TABLE[n].lambda_closed))
    return lines


def _eval_theta(arguments):
    modulus = theta_modulus(_number(arguments, "n"))
    return [("value", modulus.k), ("complement", modulus.kc)]


def _eval_ratio(arguments):
    ratios = ratio_check(_pair(arguments), _tol(arguments))
    return [
        ("direct", ratios.direct),
        ("via_quozi", ratios.via_quozi),
        ("via_quozi2", ratios.via_quozi2),
        ("spread", ratios.spread),
    ]


def _eval_identity(arguments):
    result = singular_identity(
        _integer(arguments, "n"), arguments.get("family", "H1"), _tol(arguments)
    )
    return [
        ("lhs", result.lhs),
        ("rhs", result.rhs),
        ("R", result.R),
        ("relative_error", result.relative_error),
        ("R_residual", result.R_residual),
    ]


# target -> (evaluator, required keys, optional keys)
EVAL_TARGETS = {
    "K": (_eval_K, ("k",), ()),
    "Kpair": (_eval_Kpair, ("a", "b"), ()),
    "I_direct": (_eval_I_direct, ("index", "a", "b"), ("tol",)),
    "I_closed": (_eval_I_closed, ("index", "a", "b"), ()),
    "I_u": (_eval_I_u, ("index", "a", "b"), ("tol",)),
    "I_lauricella": (_eval_I_lauricella, ("index", "a", "b"), ("tol",)),
    "fd": (_eval_fd, ("a", "b", "c", "x"), ("tol", "method")),
    "2f1": (_eval_2f1, ("a", "b", "c", "x"), ()),
    "pi": (_eval_pi, ("index", "a", "b"), ("tol",)),
    "lambda": (_eval_lambda, ("n",), ()),
    "theta": (_eval_theta, ("n",), ()),
    "ratio": (_eval_ratio, ("a", "b"), ("tol",)),
    "identity": (_eval_identity, ("n",), ("family", "tol")),
}


def evaluate_target(target, pairs):
    """
    Run one eval target on its key=value arguments.

    Returns
    -------
    list(tuple(str, object))
        (name, value) lines, the primary value first.
    """
    if target not in EVAL_TARGETS:
        raise click.UsageError(f"Unknown target {target!r}, expected one of {', '.join(EVAL_TARGETS)}")
    evaluator, required, optional = EVAL_TARGETS[target]
    arguments = _parse_arguments(pairs)

    missing = [key for key in required if key not in arguments]
    if missing:
        raise click.UsageError(f"{target} needs {', '.join(missing)}")
    unknown = sorted(set(arguments) - set(required) - set(optional))
    if unknown:
        raise click.UsageError(f"{target} does not take {', '.join(unknown)}")

    return evaluator(arguments)


@click.group()
def cli():
    # saving for toplevel options
    pass


@cli.command(name="eval")
@click.argument("target", required=True, type=str)
@click.argument("arguments", nargs=-1, type=str)
def eval_command(target, arguments):
    """Evaluate one quantity\n
    target = K, Kpair, I_direct, I_closed, I_u, I_lauricella, fd, 2f1, pi, lambda, theta, ratio or identity\n
    arguments = key=value pairs, e.g. index=1 a=2 b=1\n
    """
    try:
        lines = evaluate_target(target, arguments)
    except HyperellError as error:
        raise click.ClickException(str(error)) from error

    for name, value in lines:
        click.echo(f"{name} = {format_number(value)}")


@cli.command()
@click.argument("suite", required=True, type=click.Choice(SUITES + ("all",)))
@click.option("--tol", type=float, default=None, help="Tolerance applied to every check")
@click.option(
    "--format", "output_format", type=click.Choice(["text", "json", "csv"]), default=None,
    help="Report format, text by default",
)
@click.option("--out", "output_path", type=str, default=None, help="Write the report to this file")
@click.option("--jobs", "-j", type=int, default=None, help="Worker processes, all cores by default")
@click.option("--seed", type=int, default=None, help="Seed of the randomised property checks")
@click.option("--config", "-c", "config_path", type=str, default=None, help="toml file with verification parameters")
@click.option("--progress/--no-progress", default=True, help="Show a progress bar on stderr")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
def verify(suite, tol, output_format, output_path, jobs, seed, config_path, progress, verbose):
    """Run a verification suite\n
    suite = legendre, reduction, pi, continuation, singular, properties or all\n
    --config = toml file with verification parameters; explicit options override it\n
    Exits with status 1 when any check fails\n
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(levelname)s - %(message)s",
    )
    params = load_verify_parameters(config_path) if config_path else VerifyParameters()
    overrides = {
        "tol": tol,
        "output_format": output_format,
        "output_path": output_path,
        "jobs": jobs,
        "seed": seed,
    }
    params = replace(params, **{key: value for key, value in overrides.items() if value is not None})
    if params.output_format not in ("text", "json", "csv"):
        raise click.UsageError(f"Unknown report format {params.output_format!r}")

    click.echo(f"Running verification suite {suite}", err=True)
    report = run_verification(suite, params, progress=progress)
    rendered = report.render(params.output_format)

    if params.output_path:
        Path(params.output_path).write_text(rendered, encoding="utf8")
        click.echo(f"Report written to {params.output_path}", err=True)
    else:
        click.echo(rendered.rstrip("\n"))

    if not report.passed:
        for check in report.failures:
            click.echo(f"FAILED {check.id}: error={check.error} tol={check.tol}", err=True)
        raise SystemExit(1)


@cli.command(name="dump-verify-toml-template")
@click.argument("toml_file_name", required=True, type=str)
def dump_verify_toml_template(toml_file_name):
    """Dumps a toml file template
    to be used as the parameters input of the verify command
    """
    template_path = Path(toml_file_name).with_suffix(".toml")
    with open(template_path, "w") as verify_params:
        toml.dump(VerifyParameters().__dict__, verify_params)
