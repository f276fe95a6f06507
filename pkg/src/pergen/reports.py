"""
Tabular results of verification runs.

Every experiment produces a `Report`: one `ReportRecord` per sweep point with the echoed inputs,
the named numeric outputs and a pass/fail flag decided only by the declared tolerance, plus
optional plot curves and summary values. Reports are written as CSV, with a JSON schema comment on
the first line, or as JSON.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Iterable, Mapping
from datetime import datetime, timezone
from logging import NullHandler, getLogger
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal

from attrs import define, field, frozen
from sortedcontainers import SortedDict

if TYPE_CHECKING:
    from attrs import Attribute
    from typing_extensions import TypeAlias

    AnyAttr: TypeAlias = Attribute[Any]

_logger = getLogger("pergen.reports")
_logger.addHandler(NullHandler())

OutputFormat = Literal["csv", "json"]


@frozen(slots=True)
class ReportRecord:
    """Result of one sweep point.

    :param experiment: The experiment identifier
    :param inputs: The parameters of the sweep point, in column order
    :param outputs: Named numeric outputs, in column order
    :param passed: Whether the point satisfies the declared tolerance
    :param wall_time: Seconds spent computing the point
    """

    experiment: str
    inputs: Mapping[str, Any] = field(converter=dict)
    outputs: Mapping[str, float] = field(converter=dict)
    passed: bool
    wall_time: float = 0.0

    def key(self) -> tuple[Any, ...]:
        return tuple(self.inputs.values())


@frozen(slots=True)
class Curve:
    """A named (x, y) series for plotting."""

    name: str
    x: tuple[float, ...] = field(converter=tuple)
    y: tuple[float, ...] = field(converter=tuple)

    @y.validator
    def _y(self, _: AnyAttr, y: tuple[float, ...]) -> None:
        if len(y) != len(self.x):
            raise ValueError(
                f"curve '{self.name}' has {len(self.x)} x values but {len(y)} y values"
            )


@define(slots=True)
class Report:
    """Records, curves and summary of one experiment.

    :param experiment: The experiment identifier
    :param tolerance: The declared tolerance
    :param records: Per sweep point records
    :param curves: Plot curves
    :param summary: Experiment level results written alongside the records
    :param checks: Experiment level declared checks, all of which must pass
    """

    experiment: str
    tolerance: float
    records: list[ReportRecord] = field(factory=list)
    curves: list[Curve] = field(factory=list)
    summary: dict[str, Any] = field(factory=dict)
    checks: dict[str, bool] = field(factory=dict)

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.records) and all(self.checks.values())

    @property
    def failures(self) -> list[ReportRecord]:
        return [record for record in self.records if not record.passed]

    @property
    def failed_checks(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]

    @property
    def columns(self) -> list[str]:
        if not self.records:
            return []

        first = self.records[0]
        return [*first.inputs, *first.outputs, "passed"]

    def sort(self) -> None:
        """Order records by their input values so that evaluation order never shows."""

        ordered: SortedDict = SortedDict()

        for record in self.records:
            key = record.key()

            if key in ordered:
                raise ValueError(f"duplicate sweep point {key} in '{self.experiment}'")

            ordered[key] = record

        self.records = list(ordered.values())


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"

    if isinstance(value, float):
        return repr(value)

    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)

    if isinstance(value, Mapping):
        return {str(k): _json_value(v) for k, v in value.items()}

    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]

    return value


def _timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _write_csv(report: Report, path: Path, *, timestamp: bool) -> None:
    schema = {
        "experiment": report.experiment,
        "tolerance": report.tolerance,
        "columns": report.columns,
    }

    with path.open("w", newline="", encoding="utf-8") as handle:
        handle.write(f"# schema: {json.dumps(schema, sort_keys=True)}\n")

        if timestamp:
            wall_time = sum(record.wall_time for record in report.records)
            handle.write(f"# generated: {_timestamp()} wall_time={wall_time:.3f}s\n")

        if report.summary or report.checks:
            summary = {**report.summary, "checks": report.checks, "passed": report.passed}
            handle.write(f"# summary: {json.dumps(_json_value(summary), sort_keys=True)}\n")

        writer = csv.writer(handle, lineterminator="\n")

        if report.records:
            writer.writerow(report.columns)

        for record in report.records:
            row = [*record.inputs.values(), *record.outputs.values(), record.passed]
            writer.writerow([_cell(value) for value in row])


def _write_json(report: Report, path: Path, *, timestamp: bool) -> None:
    document: dict[str, Any] = {
        "experiment": report.experiment,
        "tolerance": report.tolerance,
        "passed": report.passed,
        "summary": report.summary,
        "checks": report.checks,
        "records": [
            {"inputs": record.inputs, "outputs": record.outputs, "passed": record.passed}
            | ({"wall_time": record.wall_time} if timestamp else {})
            for record in report.records
        ],
    }

    if timestamp:
        document["generated"] = _timestamp()

    path.write_text(json.dumps(_json_value(document), indent=2) + "\n", encoding="utf-8")


def write_report(
    report: Report, path: Path, fmt: OutputFormat = "csv", *, timestamp: bool = True
) -> Path:
    """Write a report as CSV or JSON.

    :param report: The report to write
    :param path: Destination file, parent directories are created
    :param fmt: Either ``csv`` or ``json``
    :param timestamp: Whether to include the generation time and wall times
    :returns: The written path
    """

    path.parent.mkdir(parents=True, exist_ok=True)

    if fmt == "csv":
        _write_csv(report, path, timestamp=timestamp)
    elif fmt == "json":
        _write_json(report, path, timestamp=timestamp)
    else:
        raise ValueError(f"unknown output format '{fmt}'")

    _logger.debug(f"wrote {len(report.records)} records of '{report.experiment}' to {path}")
    return path


def emit_plot_data(report: Report | Iterable[Curve], path: Path) -> Path:
    """Write every curve as ``curve,x,y`` rows; a report without curves yields only the header."""

    curves = report.curves if isinstance(report, Report) else list(report)
    path.parent.mkdir(parents=True, exist_ok=True)

    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["curve", "x", "y"])

        for curve in curves:
            for x, y in zip(curve.x, curve.y):
                writer.writerow([curve.name, _cell(float(x)), _cell(float(y))])

    return path


__all__ = ["Curve", "Report", "ReportRecord", "emit_plot_data", "write_report"]
