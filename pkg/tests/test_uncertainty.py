import math

import numpy as np
import pytest
from pytest import fixture

from pergen.operators import BandLimitedState, DomainError, ladder, rotate
from pergen.spectral import CoeffSeq
from pergen.uncertainty import (
    NotCenteredError,
    UndefinedDirectionError,
    circular_variance,
    gaussian_state,
    mean_direction,
    mean_J,
    recenter,
    saturation_search,
    shift_state,
    uncertainty_product,
    variance_J,
    variance_theta,
)


@fixture
def psi() -> BandLimitedState:
    return gaussian_state(0.1)


def test_gaussian_state() -> None:
    state = gaussian_state(0.05)

    assert state.normalized
    assert state.norm() == pytest.approx(1.0, abs=1e-14)
    assert state.bandwidth == math.ceil(2.0 * math.sqrt(17.0 * math.log(10.0) / 0.05))
    assert gaussian_state(0.5, 10).bandwidth == 10

    for eps in (0.0, 1.5):
        with pytest.raises(ValueError):
            gaussian_state(eps)


def test_gaussian_means(psi: BandLimitedState) -> None:
    assert mean_direction(psi) == pytest.approx(0.0, abs=1e-12)
    assert mean_J(psi) == pytest.approx(0.0, abs=1e-14)
    assert 0.0 < circular_variance(psi) < 1.0


def test_uniform_direction() -> None:
    uniform = BandLimitedState(CoeffSeq.basis(0), normalized=True)

    with pytest.raises(UndefinedDirectionError):
        mean_direction(uniform)

    assert circular_variance(uniform) == pytest.approx(1.0, abs=1e-12)
    assert variance_theta(uniform) == pytest.approx(math.pi**2 / 3.0, rel=1e-10)


def test_requires_normalized() -> None:
    with pytest.raises(ValueError):
        mean_direction(BandLimitedState(CoeffSeq.basis(0) * 2.0))

    with pytest.raises(ValueError):
        uncertainty_product(BandLimitedState(CoeffSeq.basis(1) * 0.5))


def test_gaussian_variances() -> None:
    for eps in (0.2, 0.1, 0.05):
        state = gaussian_state(eps)

        assert variance_theta(state) == pytest.approx(eps / 4.0, rel=1e-8)
        assert variance_J(state) == pytest.approx(1.0 / eps, rel=1e-8)


def test_minimum_uncertainty() -> None:
    for eps in (0.2, 0.1, 0.05):
        report = uncertainty_product(gaussian_state(eps))

        assert report.product == pytest.approx(0.5, abs=1e-6)
        assert report.saturation_ratio == pytest.approx(1.0, rel=1e-8)
        assert report.schwartz_slack >= -1e-10
        assert report.mean_theta == pytest.approx(0.0, abs=1e-12)


def test_not_centered(psi: BandLimitedState) -> None:
    with pytest.raises(NotCenteredError):
        variance_theta(rotate(psi, 0.5))

    with pytest.raises(NotCenteredError):
        variance_J(ladder(psi, 1))

    with pytest.raises(NotCenteredError):
        uncertainty_product(rotate(psi, -1.0))

    moved = uncertainty_product(ladder(psi, 2), centered=False)
    assert moved.mean_J == pytest.approx(2.0)
    assert moved.schwartz_slack >= -1e-10


def test_uniform_report() -> None:
    report = uncertainty_product(BandLimitedState(CoeffSeq.basis(0), normalized=True))

    assert math.isnan(report.mean_theta)
    assert report.var_J == 0.0
    assert report.product == 0.0
    assert report.saturation_ratio == math.inf


def test_shift_state(psi: BandLimitedState) -> None:
    for angle in (-2.0, 0.0, 1.5):
        for momentum in (-3, 0, 4):
            shifted = shift_state(psi, angle, momentum)

            assert shifted.normalized
            assert abs(mean_direction(shifted) - angle) <= 1e-6
            assert abs(mean_J(shifted) - momentum) <= 1e-8


def test_shift_wraps_angle(psi: BandLimitedState) -> None:
    assert abs(abs(mean_direction(shift_state(psi, math.pi, 0))) - math.pi) <= 1e-6
    assert mean_direction(shift_state(psi, 2.5 + 2.0 * math.pi, 0)) == pytest.approx(2.5)


def test_shift_requires_integer_momentum(psi: BandLimitedState) -> None:
    with pytest.raises(DomainError):
        shift_state(psi, 0.0, 0.5)

    assert mean_J(shift_state(psi, 0.0, 2.0 + 1e-12)) == pytest.approx(2.0)


def test_recenter(psi: BandLimitedState) -> None:
    shifted = shift_state(psi, 1.2, -2)
    centered = recenter(shifted)

    assert mean_direction(centered) == pytest.approx(0.0, abs=1e-9)
    assert mean_J(centered) == pytest.approx(0.0, abs=1e-12)
    assert uncertainty_product(centered).product == pytest.approx(0.5, abs=1e-6)


def test_recenter_warns() -> None:
    half = BandLimitedState.normalize(CoeffSeq.from_mapping({0: 1.0, 1: 1.0}))

    with pytest.warns(UserWarning):
        centered = recenter(half)

    assert mean_J(centered) == pytest.approx(0.5)


def test_saturation_search() -> None:
    rows = saturation_search(8, 5, seed=3)

    assert [row.trial for row in rows] == list(range(5))

    for row in rows:
        assert row.schwartz_slack >= -1e-10
        assert row.saturation_ratio >= 1.0 - 1e-9
        assert row.product > 0.0

    again = saturation_search(8, 5, seed=3)
    assert np.array_equal([r.product for r in rows], [r.product for r in again])
