import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pytest import fixture

from pergen import distributions as dist
from pergen.spectral import (
    SQRT_2PI,
    CoeffSeq,
    GrowthClass,
    GrowthTag,
    SampledFunction,
    classify_growth,
    coeffs_from_samples,
    evaluate,
    indices,
    spectral_derivative,
    synthesize,
    theta_grid,
)

KS = indices(32)


@fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(2024)


def vanishing(rng: np.random.Generator, bandwidth: int) -> CoeffSeq:
    phi = CoeffSeq.random(rng, bandwidth)
    size = 4 * (2 * bandwidth + 17)
    weighted = evaluate(phi, size).samples * np.cos(theta_grid(size) / 2.0) ** 16
    return coeffs_from_samples(SampledFunction(weighted), bandwidth + 8)


def test_dirac_coefficients() -> None:
    assert_allclose(dist.dirac(0.0).coefficients(KS), np.full(KS.shape, 1.0 / SQRT_2PI))

    pattern = dist.dirac(math.pi / 2.0).coefficients(np.arange(4))
    assert_allclose(pattern * SQRT_2PI, [1.0, -1j, -1.0, 1j], atol=1e-15)

    delta = dist.dirac(1.2)
    assert delta.growth.tag is GrowthTag.SLOW_GROWTH
    assert delta.growth.exponent == 0.0


def test_dirac_angle_is_canonical() -> None:
    assert dist.dirac(math.pi).description == {"kind": "dirac", "theta": -math.pi}
    assert dist.dirac(3.0 + 2.0 * math.pi).description["theta"] == pytest.approx(3.0)


def test_pair_basis() -> None:
    for k in (-3, 0, 5):
        result = dist.pair(dist.dirac(0.7), CoeffSeq.basis(k, 8))

        assert result.value == pytest.approx(np.exp(1j * k * 0.7) / SQRT_2PI, abs=1e-15)
        assert result.truncation_bandwidth == 8
        assert result.tail_estimate == 0.0


def test_pair_zero() -> None:
    assert dist.pair(dist.power(1.0), CoeffSeq.zeros(6)).value == 0.0


def test_pair_wrapped_gaussian() -> None:
    eps = 0.5
    phi = CoeffSeq(np.exp(-eps * KS * KS / 4.0) / SQRT_2PI)
    ks = np.arange(-5, 6)
    direct = np.sum(np.exp(-((1.0 + 2.0 * math.pi * ks) ** 2) / eps)) / math.sqrt(math.pi * eps)

    assert dist.pair(dist.dirac(1.0), phi).value == pytest.approx(direct, abs=1e-10)


def test_reproducing_property() -> None:
    for theta in theta_grid(64):
        delta = dist.dirac(float(theta))

        for k in range(-32, 33, 4):
            phi = CoeffSeq.basis(k, 32)
            expected = complex(synthesize(phi, theta))

            assert abs(dist.pair(delta, phi).value - expected) <= 1e-12


def test_pair_converges_to_point_value() -> None:
    eps = 0.3
    full = CoeffSeq(np.exp(-eps * KS * KS / 4.0) / SQRT_2PI)
    target = complex(synthesize(full, 0.0))
    errors = [abs(dist.pair(dist.dirac(0.0), full.resize(n)).value - target) for n in (4, 8, 16)]

    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-8


def test_translate() -> None:
    moved = dist.translate(dist.dirac(0.0), 0.3)
    assert_allclose(moved.coefficients(KS), dist.dirac(0.3).coefficients(KS), atol=1e-15)

    wrapped = dist.translate(dist.dirac(3.0), 0.5)
    assert wrapped.description["theta"] == pytest.approx(3.5 - 2.0 * math.pi)

    F = dist.power(0.5)
    assert_allclose(dist.translate(F, 0.0).coefficients(KS), F.coefficients(KS))

    back = dist.translate(dist.translate(F, 1.1), -1.1)
    assert_allclose(back.coefficients(KS), F.coefficients(KS), rtol=1e-14)


def test_translate_pairing(rng: np.random.Generator) -> None:
    F = dist.power(0.25)
    phi = CoeffSeq.random(rng, 12)
    theta = 0.8
    shifted = CoeffSeq(phi.coeffs * np.exp(1j * phi.indices * theta))

    lhs = dist.pair(dist.translate(F, theta), phi).value
    rhs = dist.pair(F, shifted).value

    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_derivative() -> None:
    zero = dist.derivative(dist.constant(1.0))
    assert_allclose(zero.coefficients(KS), 0.0)

    phi = CoeffSeq.from_mapping({1: 0.5, -2: 1.0 - 1j, 3: 0.25j})
    value = dist.pair(dist.derivative(dist.dirac(0.0)), phi).value
    slope = complex(synthesize(spectral_derivative(phi), 0.0))

    assert value == pytest.approx(-slope, abs=1e-14)


def test_derivative_growth() -> None:
    F = dist.derivative(dist.dirac(0.0))

    assert F.growth.tag is GrowthTag.SLOW_GROWTH
    assert F.growth.exponent == pytest.approx(0.5, abs=0.05)
    assert classify_growth(F.generator, 64).tag is GrowthTag.SLOW_GROWTH


def test_growth_is_required() -> None:
    with pytest.raises(ValueError):
        dist.DistributionSpectrum(np.ones_like, GrowthClass(GrowthTag.UNCLASSIFIED))

    with pytest.raises(ValueError):
        dist.from_generator(lambda ns: np.exp(np.abs(ns).astype(float)))


def test_window_must_agree() -> None:
    window = CoeffSeq.from_mapping({0: 1.0, 2: -1.0})
    F = dist.from_window(window)

    assert F.truncate(4).allclose(window.resize(4))

    with pytest.raises(ValueError):
        dist.DistributionSpectrum(
            F.generator, F.growth, window=CoeffSeq.from_mapping({0: 2.0, 2: -1.0})
        )


def test_json_forms() -> None:
    for F in (dist.dirac(0.3), dist.power(0.5), dist.wrapped_gaussian(0.2), dist.constant(2 - 1j)):
        G = dist.from_json(F.to_json())
        assert_allclose(G.coefficients(KS), F.coefficients(KS))

    window = dist.from_window(CoeffSeq.from_mapping({1: 1j}))
    assert_allclose(dist.from_json(window.to_json()).coefficients(KS), window.coefficients(KS))

    translated = dist.translate(dist.power(0.5), 0.2)
    with pytest.raises(ValueError):
        translated.to_json()
    assert translated.to_json(bandwidth=4)["kind"] == "window"

    with pytest.raises(ValueError):
        dist.from_json({"kind": "hyperfunction"})

    with pytest.raises(ValueError):
        dist.from_json({"kind": "generator", "name": "missing"})


def test_apply_theta_dirac_example() -> None:
    with pytest.warns(dist.LeakageWarning):
        result = dist.apply_theta(dist.dirac(0.5), CoeffSeq.basis(0), bandwidth=1024)

    assert result.value == pytest.approx(0.5 / SQRT_2PI, abs=1e-2)
    assert result.tail_estimate > 1e-8


def test_apply_theta_constant() -> None:
    with pytest.warns(dist.LeakageWarning):
        result = dist.apply_theta(dist.constant(1.0), CoeffSeq.basis(0))

    assert abs(result.value) <= 1e-14


def test_theta_eigen_relation(rng: np.random.Generator) -> None:
    for theta in (-3.0, -1.5, 0.0, 0.5, 2.0, 3.0):
        for _ in range(4):
            phi = vanishing(rng, 32)
            result = dist.apply_theta(dist.dirac(theta), phi)
            expected = theta * complex(synthesize(phi, theta))

            assert abs(result.value - expected) <= 1e-8
            assert result.tail_estimate <= 1e-8


def test_dirac_orthogonality() -> None:
    for a in theta_grid(16):
        for b in theta_grid(16):
            product = dist.sesquilinear_product(dist.dirac(a), dist.dirac(b))
            expected = dist.dirac(b - a).coefficients(KS)

            assert np.max(np.abs(product.coefficients(KS) - expected)) <= 1e-13


def test_dirac_product_symmetry() -> None:
    a, b = -1.3, 2.2
    forward = dist.sesquilinear_product(dist.dirac(a), dist.dirac(b))
    backward = dist.sesquilinear_product(dist.dirac(b), dist.dirac(a))

    assert_allclose(dist.reflect(backward).coefficients(KS), forward.coefficients(KS), atol=1e-15)


def test_constant_product() -> None:
    e0 = dist.constant(1.0)
    product = dist.sesquilinear_product(e0, e0, normalization="literal")

    assert_allclose(product.coefficients(KS), CoeffSeq.basis(0, 32).coeffs)

    with pytest.raises(ValueError):
        dist.sesquilinear_product(e0, e0, normalization="other")  # type: ignore


def test_product_normalizations() -> None:
    a, b = 0.4, -2.0
    literal = dist.sesquilinear_product(dist.dirac(a), dist.dirac(b), normalization="literal")
    scaled = dist.sesquilinear_product(dist.dirac(a), dist.dirac(b))
    expected = dist.dirac(b - a).coefficients(KS)

    assert_allclose(literal.coefficients(KS), expected / SQRT_2PI, atol=1e-15)
    assert_allclose(scaled.coefficients(KS), expected, atol=1e-14)

    e0 = dist.constant(1.0)
    default = dist.sesquilinear_product(e0, e0)
    assert_allclose(default.coefficients(KS), SQRT_2PI * CoeffSeq.basis(0, 32).coeffs)


def test_sesquilinearity() -> None:
    F = dist.translate(dist.power(0.5), 0.4)
    G = dist.dirac(-0.9)
    H = dist.power(-0.25)
    a, b = 2.0 - 1j, 0.5j

    base = dist.sesquilinear_product(F, G).coefficients(KS)

    left = dist.sesquilinear_product(dist.scale(a, F), G).coefficients(KS)
    assert_allclose(left, np.conj(a) * base, rtol=1e-14)

    right = dist.sesquilinear_product(F, dist.scale(b, G)).coefficients(KS)
    assert_allclose(right, b * base, rtol=1e-14)

    summed = dist.sesquilinear_product(dist.add(F, H), G).coefficients(KS)
    parts = base + dist.sesquilinear_product(H, G).coefficients(KS)
    assert_allclose(summed, parts, rtol=1e-13)
