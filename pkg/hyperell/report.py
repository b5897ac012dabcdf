import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import pandas as pd

Number = Union[float, complex]

SIGNIFICANT_DIGITS = 15
CSV_COLUMNS = ["id", "lhs", "rhs", "error", "tol", "pass"]


def round_significant(value):
    """Round a float or complex to 15 significant digits; None passes through."""
    if value is None:
        return None
    if isinstance(value, complex):
        return complex(round_significant(value.real), round_significant(value.imag))
    value = float(value)
    if not math.isfinite(value):
        return value
    return float(f"{value:.{SIGNIFICANT_DIGITS - 1}e}")


def _to_json_number(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def _from_json_number(value):
    if isinstance(value, list):
        return complex(*value)
    return value


def _format_csv_number(value):
    if value is None:
        return ""
    if isinstance(value, complex):
        return f"{value.real:.14e}{value.imag:+.14e}j"
    return f"{value:.14e}"


def _format_text_number(value):
    if value is None:
        return "-"
    if isinstance(value, complex):
        return f"{value.real:.12g}{value.imag:+.12g}j"
    return f"{value:.12g}"


@dataclass(frozen=True)
class Check:
    """
    One comparison of a left side with a right side.

    Numbers are rounded to 15 significant digits on construction, so a
    check read back from its JSON form compares equal to the original.
    A check passes exactly when its error does not exceed its tolerance.
    """

    id: str
    lhs: Optional[Number]
    rhs: Optional[Number]
    error: Optional[float]
    tol: float

    def __post_init__(self):
        for name in ("lhs", "rhs", "error", "tol"):
            object.__setattr__(self, name, round_significant(getattr(self, name)))

    @classmethod
    def compare(cls, check_id, lhs, rhs, tol, relative=True):
        """Build a check with |lhs - rhs| (divided by |rhs| when relative and rhs != 0)."""
        error = abs(lhs - rhs)
        if relative and rhs != 0:
            error = error / abs(rhs)
        return cls(id=check_id, lhs=lhs, rhs=rhs, error=error, tol=tol)

    @classmethod
    def failed(cls, check_id, tol):
        """A check whose evaluation raised."""
        return cls(id=check_id, lhs=None, rhs=None, error=None, tol=tol)

    @property
    def passed(self):
        return self.error is not None and self.error <= self.tol

    def to_dict(self):
        return {
            "id": self.id,
            "lhs": _to_json_number(self.lhs),
            "rhs": _to_json_number(self.rhs),
            "error": self.error,
            "tol": self.tol,
            "pass": self.passed,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            id=data["id"],
            lhs=_from_json_number(data["lhs"]),
            rhs=_from_json_number(data["rhs"]),
            error=data["error"],
            tol=data["tol"],
        )


@dataclass
class Report:
    """
    Outcome of a verification suite.

    Attributes
    ----------
    suite : str
        Suite name.
    config : dict
        Echo of the run configuration: tol, seed and jobs.
    checks : list(Check)
        Kept sorted by id.
    elapsed_ms : float
        Wall time of the run.
    """

    suite: str
    config: dict
    checks: List[Check] = field(default_factory=list)
    elapsed_ms: float = 0.0

    def __post_init__(self):
        self.checks = sorted(self.checks, key=lambda check: check.id)
        self.elapsed_ms = round_significant(self.elapsed_ms)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    def to_dict(self):
        return {
            "suite": self.suite,
            "config": dict(self.config),
            "checks": [check.to_dict() for check in self.checks],
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(
            suite=data["suite"],
            config=data["config"],
            checks=[Check.from_dict(item) for item in data["checks"]],
            elapsed_ms=data["elapsed_ms"],
        )

    def to_dataframe(self):
        """One row per check with the CSV columns; numbers formatted as text."""
        rows = [
            {
                "id": check.id,
                "lhs": _format_csv_number(check.lhs),
                "rhs": _format_csv_number(check.rhs),
                "error": _format_csv_number(check.error),
                "tol": _format_csv_number(check.tol),
                "pass": "true" if check.passed else "false",
            }
            for check in self.checks
        ]
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

    def to_csv(self, path_or_buf=None):
        """Write (or return, when no target is given) the CSV form."""
        return self.to_dataframe().to_csv(path_or_buf, index=False)

    def to_text(self):
        lines = [f"suite: {self.suite}"]
        lines.append("config: " + ", ".join(f"{key}={value}" for key, value in self.config.items()))
        if self.checks:
            frame = pd.DataFrame(
                [
                    {
                        "id": check.id,
                        "lhs": _format_text_number(check.lhs),
                        "rhs": _format_text_number(check.rhs),
                        "error": "-" if check.error is None else f"{check.error:.3e}",
                        "tol": f"{check.tol:.1e}",
                        "pass": "PASS" if check.passed else "FAIL",
                    }
                    for check in self.checks
                ]
            )
            lines.append(frame.to_string(index=False))
        lines.append(
            f"{len(self.checks) - len(self.failures)}/{len(self.checks)} checks passed "
            f"in {self.elapsed_ms:.0f} ms"
        )
        return "\n".join(lines)

    def render(self, output_format):
        if output_format == "json":
            return self.to_json()
        if output_format == "csv":
            return self.to_csv()
        if output_format == "text":
            return self.to_text()
        raise ValueError(f"Unknown report format {output_format!r}, expected text, json or csv")
