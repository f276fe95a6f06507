import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pytest import fixture
from scipy import integrate

from pergen.operators import (
    BandLimitedState,
    BorelSet,
    DomainError,
    QuadratureError,
    angular_momentum,
    borel_decomposition_pairing,
    commutator_norm,
    hamiltonian,
    ladder,
    projector_pairing,
    rotate,
    spectral_measure,
    unit_resolution,
    weyl_defect,
)
from pergen.spectral import CoeffSeq, inner_product, synthesize, theta_grid


def state(*items: tuple[int, complex]) -> BandLimitedState:
    return BandLimitedState(CoeffSeq.from_mapping(dict(items)))


@fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


def random_state(rng: np.random.Generator, bandwidth: int = 16) -> BandLimitedState:
    return BandLimitedState.normalize(CoeffSeq.random(rng, bandwidth))


def test_normalized_flag() -> None:
    with pytest.raises(ValueError):
        BandLimitedState(CoeffSeq.basis(0) * 2.0, normalized=True)

    with pytest.raises(ValueError):
        BandLimitedState.normalize(CoeffSeq.zeros(3))

    psi = BandLimitedState.normalize(CoeffSeq.basis(2) * 3.0)
    assert psi.normalized
    assert psi.norm() == pytest.approx(1.0)


def test_angular_momentum() -> None:
    assert angular_momentum(state((3, 1.0))).coeffs.allclose(CoeffSeq.basis(3) * 3.0)
    assert angular_momentum(state((0, 1.0))).norm() == 0.0

    J = angular_momentum(state((1, 1.0), (-1, 1.0)))
    assert J.coeffs.allclose(CoeffSeq.from_mapping({1: 1.0, -1: -1.0}))


def test_angular_momentum_symmetric(rng: np.random.Generator) -> None:
    f, g = random_state(rng), random_state(rng, 20)

    lhs = inner_product(angular_momentum(f).coeffs, g.coeffs)
    rhs = inner_product(f.coeffs, angular_momentum(g).coeffs)

    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_hamiltonian(rng: np.random.Generator) -> None:
    for k in (-4, 0, 5):
        result = hamiltonian(BandLimitedState(CoeffSeq.basis(k, 6)), 1.0)
        assert result.coeffs.allclose(CoeffSeq.basis(k, 6) * (k * k / 2.0))

    f = random_state(rng)
    twice = angular_momentum(angular_momentum(f))
    assert hamiltonian(f, 2.5).coeffs.allclose(CoeffSeq(twice.coeffs.coeffs / 5.0), rtol=1e-15)

    for inertia in (0.0, -1.0):
        with pytest.raises(DomainError):
            hamiltonian(f, inertia)


def test_rotate(rng: np.random.Generator) -> None:
    y = 0.9
    e4 = BandLimitedState(CoeffSeq.basis(4))
    assert rotate(e4, y).coeffs.allclose(CoeffSeq.basis(4) * np.exp(-4j * y))

    f = random_state(rng)
    assert rotate(f, 0.0).coeffs.allclose(f.coeffs)
    assert rotate(rotate(f, 0.4), 1.3).coeffs.allclose(rotate(f, 1.7).coeffs)

    thetas = theta_grid(64)
    shifted = synthesize(f.coeffs, thetas - y)
    assert_allclose(synthesize(rotate(f, y).coeffs, thetas), shifted, atol=1e-10)


def test_ladder(rng: np.random.Generator) -> None:
    assert ladder(BandLimitedState(CoeffSeq.basis(2)), 1).coeffs.allclose(CoeffSeq.basis(3))
    assert ladder(BandLimitedState(CoeffSeq.basis(0)), -3).coeffs.allclose(CoeffSeq.basis(-3))

    f = random_state(rng)
    assert ladder(f, 0).coeffs.allclose(f.coeffs)
    assert ladder(ladder(f, 2), -2).coeffs.allclose(f.coeffs)
    assert ladder(f, 5).bandwidth == f.bandwidth + 5


def test_unitarity(rng: np.random.Generator) -> None:
    for _ in range(5):
        f = BandLimitedState(CoeffSeq.random(rng, 12))
        norm = f.norm()

        for y in (-2.0, 0.3, math.pi):
            assert rotate(f, y).norm() == pytest.approx(norm, rel=1e-12)

        for n in (-4, 1, 7):
            assert ladder(f, n).norm() == pytest.approx(norm, rel=1e-12)

    psi = random_state(rng)
    assert rotate(psi, 1.0).normalized
    assert ladder(psi, 2).normalized
    assert not angular_momentum(psi).normalized


def test_weyl_relation(rng: np.random.Generator) -> None:
    for n in range(5):
        for y in theta_grid(5):
            for _ in range(20):
                f = BandLimitedState(CoeffSeq.random(rng, 64))
                assert weyl_defect(n, float(y), f) <= 1e-10 * f.norm()

    f = BandLimitedState(CoeffSeq.random(rng, 64))
    assert weyl_defect(0, 1.234, f) == 0.0
    assert weyl_defect(3, math.pi / 5.0, f) <= 1e-10 * f.norm()
    assert weyl_defect(1, 2.0 * math.pi, f) <= 1e-12 * f.norm()


def test_noncommutativity() -> None:
    f = BandLimitedState(CoeffSeq.basis(0))
    y = math.pi / 2.0

    assert commutator_norm(1, y, f) == pytest.approx(abs(1.0 - np.exp(1j * y)))
    assert commutator_norm(1, y, f) > 0.0
    assert commutator_norm(0, y, f) == 0.0


def test_borel_set_validation() -> None:
    with pytest.raises(DomainError):
        BorelSet([(0.0, 4.0)])

    with pytest.raises(DomainError):
        BorelSet([(1.0, 1.0)])

    with pytest.raises(DomainError):
        BorelSet([(0.0, 1.0), (0.5, 2.0)])

    assert BorelSet([(1.0, 2.0), (-1.0, 0.0)]).intervals == ((-1.0, 0.0), (1.0, 2.0))


def test_indicator() -> None:
    half = BorelSet([(0.0, math.pi)])
    values = half.indicator([-math.pi, -1.0, 0.0, 1.0])

    assert_allclose(values, [0.5, 0.0, 0.5, 1.0])
    assert_allclose(BorelSet.circle().indicator(theta_grid(8)), np.ones(8))


def test_spectral_measure(rng: np.random.Generator) -> None:
    f = random_state(rng)

    full = spectral_measure(f, BorelSet.circle())
    assert full.state.coeffs.allclose(f.coeffs)
    assert full.defect == pytest.approx(0.0, abs=1e-12)

    empty = spectral_measure(f, BorelSet())
    assert empty.state.norm() == 0.0
    assert empty.norm_sq == 0.0

    e0 = BandLimitedState(CoeffSeq.basis(0))
    half = spectral_measure(e0, BorelSet([(0.0, math.pi)]), bandwidth=0)
    assert half.norm_sq == pytest.approx(0.5, abs=1e-12)


def test_spectral_measure_defect_shrinks() -> None:
    e0 = BandLimitedState(CoeffSeq.basis(0))
    half = BorelSet([(0.0, math.pi)])
    defects = [spectral_measure(e0, half, bandwidth=n).defect for n in (4, 16, 64)]

    assert defects[0] > defects[1] > defects[2] > 0.0


def test_projector_pairing() -> None:
    e0, e1, e2 = CoeffSeq.basis(0), CoeffSeq.basis(1), CoeffSeq.basis(2)

    for theta in (-2.0, 0.0, 1.5):
        assert projector_pairing(theta, e0, e0) == pytest.approx(1.0 / (2.0 * math.pi))

    assert projector_pairing(0.0, e1, e2) == pytest.approx(1.0 / (2.0 * math.pi))


def test_unit_resolution(rng: np.random.Generator) -> None:
    for _ in range(10):
        phi = CoeffSeq.random(rng, 24)
        psi = CoeffSeq.random(rng, 24)

        assert abs(unit_resolution(phi, psi) - inner_product(phi, psi)) <= 1e-8

    phi = CoeffSeq.random(rng, 8)
    total = sum(projector_pairing(float(t), phi, phi) for t in theta_grid(64)) * 2 * math.pi / 64
    assert total == pytest.approx(phi.norm() ** 2, rel=1e-12)


def test_borel_constant(rng: np.random.Generator) -> None:
    phi, psi = CoeffSeq.random(rng, 10), CoeffSeq.random(rng, 10)
    result = borel_decomposition_pairing(lambda t: np.ones_like(t), phi, psi)

    assert result.value == pytest.approx(inner_product(phi, psi), abs=1e-10)
    assert result.order == math.inf
    assert result.nodes >= 2**14


def test_borel_moments(rng: np.random.Generator) -> None:
    phi = random_state(rng, 6).coeffs

    for n in range(1, 5):
        result = borel_decomposition_pairing(lambda t: t**n, phi, phi)

        def density(t: float) -> float:
            return float(t**n * abs(complex(synthesize(phi, t))) ** 2)

        expected, _ = integrate.quad(density, -math.pi, math.pi, limit=200, epsabs=1e-12)
        assert result.refined.real == pytest.approx(expected, abs=1e-8)
        assert abs(result.refined.imag) <= 1e-12
        assert abs(result.value - expected) <= result.error_estimate + 1e-8


def test_borel_trapezoid_value() -> None:
    e0 = CoeffSeq.basis(0)
    exact = math.pi**2 / 3.0

    for nodes in (100, 64):
        result = borel_decomposition_pairing(lambda t: t * t, e0, e0, nodes)
        step = 2.0 * math.pi / nodes

        # the trapezoid error of θ²/2π is exactly h²/6
        assert result.nodes == nodes
        assert result.value.real == pytest.approx(exact + step**2 / 6.0, rel=1e-12)
        assert result.refined.real == pytest.approx(exact, rel=1e-12)
        assert result.error_estimate == pytest.approx(step**2 / 6.0, rel=1e-8)
        assert result.order == pytest.approx(2.0, abs=1e-6)


def test_borel_odd_nodes() -> None:
    e0 = CoeffSeq.basis(0)
    result = borel_decomposition_pairing(lambda t: t * t, e0, e0, 101)

    assert result.nodes == 101
    assert result.refined == result.value
    assert math.isnan(result.error_estimate)
    assert math.isnan(result.order)
    assert result.value.real == pytest.approx(math.pi**2 / 3.0, rel=1e-3)

    even = borel_decomposition_pairing(lambda t: t * t, e0, e0, 1000)
    assert not math.isnan(even.order)
    assert even.refined.real == pytest.approx(math.pi**2 / 3.0, rel=1e-12)


def test_borel_observed_order() -> None:
    e0 = CoeffSeq.basis(0)
    result = borel_decomposition_pairing(lambda t: np.where(t > 0.0, 1.0, 0.0), e0, e0, 256)

    assert result.nodes == 256
    assert 0.5 <= result.order <= 1.5
    assert result.error_estimate > 0.0


def test_borel_ladder(rng: np.random.Generator) -> None:
    state_ = random_state(rng, 12)

    for n in (-3, 1, 4):
        phi = state_.coeffs
        result = borel_decomposition_pairing(lambda t: np.exp(1j * n * t), phi, phi)
        expected = inner_product(phi, ladder(state_, n).coeffs)

        assert result.value == pytest.approx(expected, abs=1e-10)
        assert result.refined == pytest.approx(result.value, abs=1e-12)


def test_borel_errors() -> None:
    e0 = CoeffSeq.basis(0)

    with pytest.raises(QuadratureError):
        borel_decomposition_pairing(lambda t: np.where(t == 0.0, np.inf, t), e0, e0, 64)

    for nodes in (0, 1):
        with pytest.raises(QuadratureError):
            borel_decomposition_pairing(lambda t: t, e0, e0, nodes)
