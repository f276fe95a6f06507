"""
Definitions for the options that configure a verification run.

A `RunConfig` names the experiment to execute and carries every numeric parameter and declared
tolerance it uses. Values are normally assembled by the command line front-end from flags, an
optional JSON configuration file and the ``PERGEN_OUTPUT_DIR`` environment variable.

Examples
--------

.. code-block:: python

    from pergen.options import RunConfig

    config = RunConfig(
        subcommand="weyl-check",
        n_max=5,
        y_count=8,
        bandwidth=64,
        seed=7,
    )
"""

from __future__ import annotations

import math
import os
import random
from collections.abc import Iterable, Mapping
from logging import NullHandler, getLogger
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal, Union

from attrs import converters, define, field, fields, frozen, validators
from pathos import pools
from pathos.abstract_launcher import AbstractWorkerPool
from typing_extensions import TypeAlias

from .colombeau import DEFAULT_GRID, MONOTONE_ATOL, MONOTONE_RTOL, EpsGrid

if TYPE_CHECKING:
    from attrs import Attribute

    AnyAttr: TypeAlias = Attribute[Any]

_logger = getLogger("pergen.options")
_logger.addHandler(NullHandler())

OUTPUT_DIR_VARIABLE = "PERGEN_OUTPUT_DIR"

SUBCOMMANDS = (
    "coeffs",
    "pair",
    "sesquilinear",
    "weyl-check",
    "decompose",
    "classify-net",
    "associate",
    "min-uncertainty",
    "shift-check",
)

#: Declared tolerance of each experiment when none is given
DEFAULT_TOLERANCES: dict[str, float] = {
    "coeffs": 1e-10,
    "pair": 1e-12,
    "sesquilinear": 1e-12,
    "weyl-check": 1e-10,
    "decompose": 1e-8,
    "classify-net": 0.0,
    "associate": 1.0,
    "min-uncertainty": 0.05,
    "shift-check": 1e-6,
}

#: ε grid of each experiment when none is given
DEFAULT_GRIDS: dict[str, EpsGrid] = {
    "coeffs": EpsGrid((1.0, 0.5, 0.2)),
    "classify-net": DEFAULT_GRID,
    "associate": EpsGrid((0.2, 0.1, 0.05, 0.02, 0.01)),
    "min-uncertainty": EpsGrid((0.4, 0.2, 0.1, 0.05)),
    "shift-check": EpsGrid((0.1,)),
}

#: Net of each experiment when none is given
DEFAULT_NETS: dict[str, dict[str, Any]] = {
    "classify-net": {"kind": "residual"},
    "associate": {"kind": "wrapped_gaussian"},
}

DEFAULT_SHIFTS = tuple(
    (angle, momentum) for angle in (-2.0, 0.5, math.pi / 3.0) for momentum in (-1, 0, 2)
)

EpsLike: TypeAlias = Union[EpsGrid, str, Iterable[float]]
Parallelization: TypeAlias = Union[Literal["cores"], int, None]


def _seed_factory() -> int:
    return random.randint(0, 2**32 - 1)


def _to_grid(values: EpsLike) -> EpsGrid:
    if isinstance(values, EpsGrid):
        return values

    if isinstance(values, str):
        values = [float(part) for part in values.split(",") if part.strip()]

    return EpsGrid(sorted({float(value) for value in values}, reverse=True))


def _to_floats(values: str | Iterable[float]) -> tuple[float, ...]:
    if isinstance(values, str):
        return tuple(float(part) for part in values.split(",") if part.strip())

    return tuple(float(value) for value in values)


def _to_ints(values: str | Iterable[int]) -> tuple[int, ...]:
    if isinstance(values, str):
        return tuple(int(part) for part in values.split(",") if part.strip())

    return tuple(int(value) for value in values)


def _to_shifts(values: str | Iterable[Iterable[float]]) -> tuple[tuple[float, int], ...]:
    if isinstance(values, str):
        pairs = [part.split(":") for part in values.split(",") if part.strip()]
    else:
        pairs = [list(pair) for pair in values]

    shifts = []

    for pair in pairs:
        if len(pair) != 2:
            raise ValueError("shifts must be given as angle:momentum pairs")

        angle, momentum = float(pair[0]), float(pair[1])

        if momentum != int(momentum):
            raise ValueError(f"momentum shift must be an integer, got {momentum}")

        shifts.append((angle, int(momentum)))

    return tuple(shifts)


def _parallelization(_: Any, a: AnyAttr, value: Parallelization) -> None:
    if value is None:
        return

    if isinstance(value, int) and value < 1:
        raise ValueError(f"{a.name} must be greater than 0")

    if isinstance(value, str) and value != "cores":
        raise ValueError(f"{a.name} only supports literal option 'cores'")


def _positive_int() -> Any:
    return [validators.instance_of(int), validators.gt(0)]


@frozen(slots=True)
class SweepPool:
    """Worker pool evaluating the independent points of a sweep.

    :param workers: Number of workers, or ``"cores"`` for one per CPU core
    :param processes: Use processes instead of threads
    """

    workers: Literal["cores"] | int = field(validator=_parallelization)
    processes: bool = field(default=False, kw_only=True)

    def size(self) -> int:
        count = self.workers if isinstance(self.workers, int) else os.cpu_count()

        if not count:
            raise RuntimeError("Could not determine the number of CPU cores")

        return count

    def pool(self) -> AbstractWorkerPool:
        kind = pools.ProcessPool if self.processes else pools.ThreadPool
        return kind(nodes=self.size())


@define(kw_only=True)
class RunConfig:
    """Options for a single verification run.

    :param subcommand: The experiment to run
    :param eps: ε grid, defaults per experiment
    :param bandwidth: Bandwidth N of states and test functions
    :param quadrature: Quadrature size M, defaults per operation
    :param wrap: Wrap truncation K of Gaussian combs
    :param n_max: Largest ladder index of the Weyl sweep
    :param y_count: Number of rotation angles of the Weyl sweep
    :param trials: Number of random states per sweep point
    :param seed: The initial seed of the random number generator
    :param tolerance: Declared tolerance, defaults per experiment
    :param theta_tolerance: Tolerance of the angle eigen-relation check
    :param momentum_tolerance: Tolerance of the mean angular momentum check
    :param consistency_tolerance: Relative tolerance of the closed-form residual check
    :param schwartz_floor: Smallest admissible Schwartz slack, absorbing the rounding of both sides
    :param monotone_rtol: Relative slack of the non-increasing trend checks
    :param monotone_atol: Absolute slack of the non-increasing trend checks
    :param q_max: Largest power tested for negligibility
    :param j_max: Largest derivative order of the moderateness fit
    :param moment_max: Largest angle moment of the decomposition check
    :param theta: Angles of the pairing sweep
    :param theta_count: Grid size of the sesquilinear sweep
    :param net: Net description in JSON form, defaults per experiment
    :param distribution: Distribution description in JSON form
    :param tests: Basis indices k of the test functions e_k + e_{-k}
    :param shifts: (Θ̄, J̄) pairs of the shifted family check
    :param output: Output file, defaults to ``<subcommand>.<format>`` in the output directory
    :param output_format: Either ``csv`` or ``json``
    :param timestamp: Whether to write a timestamp header line
    :param plot: Whether to write plot data next to the report
    :param processes: Number of processes to use to parallelize sweeps
    :param threads: Number of threads to use to parallelize sweeps
    """

    subcommand: str = field(validator=validators.in_(SUBCOMMANDS))
    eps: EpsGrid | None = field(default=None, converter=converters.optional(_to_grid))
    bandwidth: int = field(default=32, validator=_positive_int())
    quadrature: int | None = field(
        default=None,
        validator=validators.optional(_positive_int()),
    )
    wrap: int = field(default=6, validator=[validators.instance_of(int), validators.ge(3)])
    n_max: int = field(default=5, validator=[validators.instance_of(int), validators.ge(0)])
    y_count: int = field(default=8, validator=_positive_int())
    trials: int = field(default=20, validator=_positive_int())
    seed: int = field(
        factory=_seed_factory,
        validator=[validators.instance_of(int), validators.ge(0)],
    )
    tolerance: float | None = field(
        default=None,
        converter=converters.optional(float),
        validator=validators.optional(validators.ge(0.0)),
    )
    theta_tolerance: float = field(default=1e-8, converter=float, validator=validators.gt(0.0))
    momentum_tolerance: float = field(default=1e-8, converter=float, validator=validators.gt(0.0))
    consistency_tolerance: float = field(
        default=1e-6,
        converter=float,
        validator=validators.gt(0.0),
    )
    schwartz_floor: float = field(default=-1e-10, converter=float, validator=validators.le(0.0))
    monotone_rtol: float = field(
        default=MONOTONE_RTOL,
        converter=float,
        validator=validators.ge(0.0),
    )
    monotone_atol: float = field(
        default=MONOTONE_ATOL,
        converter=float,
        validator=validators.ge(0.0),
    )
    q_max: int = field(default=8, validator=_positive_int())
    j_max: int = field(default=2, validator=[validators.instance_of(int), validators.ge(0)])
    moment_max: int = field(default=4, validator=_positive_int())
    theta: tuple[float, ...] = field(
        default=(-3.0, -1.5, 0.0, 0.5, 1.0, 2.0, 3.0),
        converter=_to_floats,
    )
    theta_count: int = field(default=16, validator=_positive_int())
    net: dict[str, Any] | None = field(default=None, converter=converters.optional(dict))
    distribution: dict[str, Any] = field(
        factory=lambda: {"kind": "dirac", "theta": 0.0},
        converter=dict,
    )
    tests: tuple[int, ...] = field(default=(1, 2, 3, 4), converter=_to_ints)
    shifts: tuple[tuple[float, int], ...] = field(default=DEFAULT_SHIFTS, converter=_to_shifts)
    output: Path | None = field(default=None, converter=converters.optional(Path))
    output_format: Literal["csv", "json"] = field(
        default="csv",
        validator=validators.in_(("csv", "json")),
    )
    timestamp: bool = field(default=True)
    plot: bool = field(default=False)
    processes: Parallelization = field(default=None, validator=_parallelization)
    threads: Parallelization = field(default=None, validator=_parallelization)

    @tests.validator
    def _tests(self, _: AnyAttr, tests: tuple[int, ...]) -> None:
        if not tests:
            raise ValueError("at least one test function is required")

    @property
    def grid(self) -> EpsGrid:
        """The ε grid in use, the experiment default when none was given."""

        if self.eps is not None:
            return self.eps

        return DEFAULT_GRIDS.get(self.subcommand, DEFAULT_GRID)

    @property
    def sweep_pool(self) -> SweepPool | None:
        """The pool of the sweep, processes taking precedence over threads."""

        if self.processes:
            _logger.debug(f"Sweep parallelization: kind=Processes, n={self.processes}")
            return SweepPool(self.processes, processes=True)

        if self.threads:
            _logger.debug(f"Sweep parallelization: kind=Threads, n={self.threads}")
            return SweepPool(self.threads)

        return None

    @property
    def trend_limits(self) -> dict[str, float]:
        """Slacks of the trend checks, echoed in report summaries."""

        return {
            "schwartz_floor": self.schwartz_floor,
            "monotone_rtol": self.monotone_rtol,
            "monotone_atol": self.monotone_atol,
        }

    @property
    def net_config(self) -> dict[str, Any]:
        if self.net is not None:
            return self.net

        return dict(DEFAULT_NETS.get(self.subcommand, {"kind": "wrapped_gaussian"}))

    @property
    def declared_tolerance(self) -> float:
        if self.tolerance is not None:
            return self.tolerance

        return DEFAULT_TOLERANCES[self.subcommand]

    def output_path(self) -> Path:
        if self.output is not None:
            return self.output

        directory = Path(os.environ.get(OUTPUT_DIR_VARIABLE, "."))
        return directory / f"{self.subcommand}.{self.output_format}"

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> RunConfig:
        """Build a config from a mapping, rejecting unknown keys."""

        names = {a.name for a in fields(cls)}
        unknown = sorted(set(values) - names)

        if unknown:
            raise ValueError(f"unknown configuration keys: {', '.join(unknown)}")

        return cls(**dict(values))


__all__ = ["DEFAULT_TOLERANCES", "SUBCOMMANDS", "RunConfig", "SweepPool"]
