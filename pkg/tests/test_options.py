import math
import os
from pathlib import Path

import pytest

from pergen.colombeau import DEFAULT_GRID, EpsGrid
from pergen.options import DEFAULT_TOLERANCES, OUTPUT_DIR_VARIABLE, RunConfig, SweepPool


def test_seed() -> None:
    options = RunConfig(subcommand="weyl-check")
    assert options.seed >= 0 and options.seed <= (2**32 - 1)

    with pytest.raises(ValueError):
        RunConfig(subcommand="weyl-check", seed=-1)


def test_subcommand() -> None:
    with pytest.raises(ValueError):
        RunConfig(subcommand="fourier")


def test_processes() -> None:
    none = RunConfig(subcommand="pair")
    assert none.processes is None

    num = RunConfig(subcommand="pair", processes=4)
    assert num.processes == 4

    with pytest.raises(ValueError):
        RunConfig(subcommand="pair", processes=-1)

    _ = RunConfig(subcommand="pair", processes="cores")

    with pytest.raises(ValueError):
        RunConfig(subcommand="pair", processes="foo")  # type: ignore


def test_threads() -> None:
    none = RunConfig(subcommand="pair")
    assert none.threads is None

    num = RunConfig(subcommand="pair", threads=4)
    assert num.threads == 4

    with pytest.raises(ValueError):
        RunConfig(subcommand="pair", threads=0)

    _ = RunConfig(subcommand="pair", threads="cores")

    with pytest.raises(ValueError):
        RunConfig(subcommand="pair", threads="foo")  # type: ignore


def test_sweep_pool() -> None:
    assert RunConfig(subcommand="pair").sweep_pool is None
    assert RunConfig(subcommand="pair", threads=2).sweep_pool == SweepPool(2)

    both = RunConfig(subcommand="pair", threads=2, processes=3).sweep_pool
    assert both == SweepPool(3, processes=True)

    assert SweepPool("cores").size() == os.cpu_count()
    assert SweepPool(4).size() == 4

    with pytest.raises(ValueError):
        SweepPool(0)

    with pytest.raises(ValueError):
        SweepPool("all")  # type: ignore


def test_grid() -> None:
    assert RunConfig(subcommand="classify-net").grid == DEFAULT_GRID
    assert RunConfig(subcommand="weyl-check").grid == DEFAULT_GRID
    assert RunConfig(subcommand="min-uncertainty").grid.smallest == 0.05

    unsorted = RunConfig(subcommand="coeffs", eps="0.2,1.0,0.5,0.5")
    assert unsorted.grid == EpsGrid((1.0, 0.5, 0.2))

    listed = RunConfig(subcommand="coeffs", eps=[0.3, 0.6])
    assert listed.grid.values == (0.6, 0.3)

    with pytest.raises(ValueError):
        RunConfig(subcommand="coeffs", eps="0.5,2.0")


def test_tolerances() -> None:
    for name, tolerance in DEFAULT_TOLERANCES.items():
        assert RunConfig(subcommand=name).declared_tolerance == tolerance

    assert RunConfig(subcommand="pair", tolerance="1e-3").declared_tolerance == 1e-3

    with pytest.raises(ValueError):
        RunConfig(subcommand="pair", tolerance=-1.0)

    with pytest.raises(ValueError):
        RunConfig(subcommand="pair", theta_tolerance=0.0)


def test_nets() -> None:
    assert RunConfig(subcommand="classify-net").net_config == {"kind": "residual"}
    assert RunConfig(subcommand="associate").net_config == {"kind": "wrapped_gaussian"}

    custom = RunConfig(subcommand="classify-net", net={"kind": "constant", "value": 2.0})
    assert custom.net_config["kind"] == "constant"


def test_sequences() -> None:
    options = RunConfig(subcommand="pair", theta="0.5, -1", tests="1,3")

    assert options.theta == (0.5, -1.0)
    assert options.tests == (1, 3)

    with pytest.raises(ValueError):
        RunConfig(subcommand="associate", tests="")


def test_shifts() -> None:
    options = RunConfig(subcommand="shift-check", shifts="0.5:2,-1.0:-3")
    assert options.shifts == ((0.5, 2), (-1.0, -3))

    listed = RunConfig(subcommand="shift-check", shifts=[[math.pi, 1.0]])
    assert listed.shifts == ((math.pi, 1),)

    with pytest.raises(ValueError):
        RunConfig(subcommand="shift-check", shifts="0.5:1.5")

    with pytest.raises(ValueError):
        RunConfig(subcommand="shift-check", shifts="0.5")


def test_integer_options() -> None:
    with pytest.raises(ValueError):
        RunConfig(subcommand="coeffs", wrap=2)

    with pytest.raises(ValueError):
        RunConfig(subcommand="weyl-check", y_count=0)

    with pytest.raises(TypeError):
        RunConfig(subcommand="weyl-check", bandwidth=2.5)  # type: ignore


def test_output_path(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    monkeypatch.delenv(OUTPUT_DIR_VARIABLE, raising=False)
    assert RunConfig(subcommand="pair").output_path() == Path("pair.csv")

    monkeypatch.setenv(OUTPUT_DIR_VARIABLE, str(tmp_path))
    options = RunConfig(subcommand="decompose", output_format="json")
    assert options.output_path() == tmp_path / "decompose.json"

    explicit = RunConfig(subcommand="decompose", output="out/report.csv")
    assert explicit.output_path() == Path("out/report.csv")


def test_from_mapping() -> None:
    options = RunConfig.from_mapping({"subcommand": "weyl-check", "n_max": 3, "seed": 7})
    assert options.n_max == 3
    assert options.seed == 7

    with pytest.raises(ValueError):
        RunConfig.from_mapping({"subcommand": "weyl-check", "nmax": 3})


def test_trend_limits() -> None:
    defaults = RunConfig(subcommand="min-uncertainty")
    assert defaults.schwartz_floor == -1e-10
    assert defaults.monotone_rtol == 1e-9
    assert defaults.monotone_atol == 1e-15
    assert defaults.trend_limits == {
        "schwartz_floor": -1e-10,
        "monotone_rtol": 1e-9,
        "monotone_atol": 1e-15,
    }

    custom = RunConfig(subcommand="associate", schwartz_floor=0.0, monotone_rtol=1e-6)
    assert custom.trend_limits["schwartz_floor"] == 0.0
    assert custom.trend_limits["monotone_rtol"] == 1e-6

    with pytest.raises(ValueError):
        RunConfig(subcommand="min-uncertainty", schwartz_floor=1e-3)

    with pytest.raises(ValueError):
        RunConfig(subcommand="associate", monotone_rtol=-1.0)

    with pytest.raises(ValueError):
        RunConfig(subcommand="associate", monotone_atol=-1e-12)
