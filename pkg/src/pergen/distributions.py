"""
Periodic distributions represented by their Fourier coefficient sequences.

A distribution F on the circle is stored as a closed-form map n → F_n of slow growth, paired with
band-limited test functions by the sesquilinear rule ⟨F, φ⟩ = Σ F_n* φ_n. Under this rule the
Dirac measure δ_θ has F_n = e^{−inθ}/√(2π) and ⟨δ_θ, φ⟩ = φ(θ).

Examples
--------

.. code-block:: python

    from pergen import distributions as dist
    from pergen.spectral import CoeffSeq, synthesize

    phi = CoeffSeq.basis(3, bandwidth=8)
    result = dist.pair(dist.dirac(0.7), phi)

    assert abs(result.value - synthesize(phi, 0.7)) < 1e-12
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable, Mapping
from logging import NullHandler, getLogger
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
from attrs import field, frozen, validators
from numpy.typing import ArrayLike

from .spectral import (
    SQRT_2PI,
    CoeffGenerator,
    CoeffSeq,
    ComplexArray,
    GrowthClass,
    GrowthTag,
    IndexArray,
    SampledFunction,
    classify_growth,
    coeffs_from_samples,
    evaluate,
    indices,
    theta_grid,
    wrap_angle,
)

if TYPE_CHECKING:
    from attrs import Attribute
    from typing_extensions import TypeAlias

    AnyAttr: TypeAlias = Attribute[Any]

_logger = getLogger("pergen.distributions")
_logger.addHandler(NullHandler())

Normalization = Literal["dirac", "literal"]

GROWTH_CUTOFF = 64


class LeakageWarning(UserWarning):
    """Point-space re-projection left a residual above the requested threshold."""


def _growth(_: Any, a: AnyAttr, growth: GrowthClass) -> None:
    if growth.tag == GrowthTag.UNCLASSIFIED:
        raise ValueError(f"{a.name} must be slow growth or stronger, got an unclassified sequence")


@frozen(eq=False)
class DistributionSpectrum:
    """A periodic distribution given by its coefficient generator.

    :param generator: Closed-form map n → F_n over integer arrays
    :param growth: Growth class of the coefficients (never unclassified)
    :param window: Optional stored coefficients that must agree with the generator
    :param description: JSON form used to rebuild the distribution, if one exists
    :param label: Human readable name
    """

    generator: CoeffGenerator
    growth: GrowthClass = field(validator=_growth)
    window: CoeffSeq | None = field(default=None, kw_only=True)
    description: Mapping[str, Any] | None = field(default=None, kw_only=True)
    label: str = field(default="distribution", kw_only=True)

    @window.validator
    def _window(self, _: AnyAttr, window: CoeffSeq | None) -> None:
        if window is None:
            return

        expected = self.coefficients(window.indices)

        if not np.allclose(window.coeffs, expected, rtol=1e-12, atol=1e-12):
            raise ValueError("stored window disagrees with the coefficient generator")

    def coefficients(self, ks: ArrayLike) -> ComplexArray:
        """Evaluate F_n for an array of integer indices."""

        ns = np.asarray(ks, dtype=np.int64)
        values = np.asarray(self.generator(ns), dtype=np.complex128)
        return np.broadcast_to(values, ns.shape).astype(np.complex128)

    def truncate(self, bandwidth: int) -> CoeffSeq:
        """The coefficient window |n| ≤ N."""

        return CoeffSeq(self.coefficients(indices(bandwidth)))

    def to_json(self, bandwidth: int | None = None) -> dict[str, Any]:
        """JSON form of the distribution.

        Distributions without a closed description are serialized as a coefficient window, which
        requires ``bandwidth``.
        """

        if self.description is not None:
            return dict(self.description)

        if bandwidth is None:
            raise ValueError(f"distribution '{self.label}' has no closed form, give a bandwidth")

        return {"kind": "window", **self.truncate(bandwidth).to_json()}


@frozen(slots=True)
class PairingResult:
    """Value of a dual pairing ⟨F, φ⟩.

    :param value: The partial sum at the stated bandwidth
    :param truncation_bandwidth: Bandwidth of the summation window
    :param tail_estimate: Bound on the neglected part of the pairing
    """

    value: complex
    truncation_bandwidth: int
    tail_estimate: float = field(default=0.0, validator=validators.ge(0.0))


def from_generator(
    generator: CoeffGenerator,
    *,
    growth: GrowthClass | None = None,
    cutoff: int = GROWTH_CUTOFF,
    description: Mapping[str, Any] | None = None,
    label: str = "distribution",
) -> DistributionSpectrum:
    """Wrap a coefficient generator, classifying its growth unless a class is given.

    :raises ValueError: If the generator cannot be certified as slow growth
    """

    if growth is None:
        growth = classify_growth(generator, cutoff)
        _logger.debug(f"classified '{label}' as {growth.tag.name} (j={growth.exponent:.3f})")

    return DistributionSpectrum(generator, growth, description=description, label=label)


def dirac(theta: float) -> DistributionSpectrum:
    """Dirac measure δ_θ with coefficients e^{−inθ}/√(2π), θ reduced into [−π, π)."""

    angle = wrap_angle(theta)

    def generator(ns: IndexArray) -> ComplexArray:
        return np.exp(-1j * ns * angle) / SQRT_2PI

    return DistributionSpectrum(
        generator,
        GrowthClass(GrowthTag.SLOW_GROWTH, 0.0, 0.0),
        description={"kind": "dirac", "theta": angle},
        label=f"dirac({angle:.6g})",
    )


def constant(value: complex = 1.0) -> DistributionSpectrum:
    """The distribution c·e_0, i.e. the constant function c/√(2π)."""

    c = complex(value)

    def generator(ns: IndexArray) -> ComplexArray:
        return np.where(ns == 0, c, 0j)

    params = {"value": [c.real, c.imag]}

    return DistributionSpectrum(
        generator,
        GrowthClass(GrowthTag.RAPID_DECAY, 0.0, 0.0),
        description={"kind": "generator", "name": "constant", "params": params},
        label=f"constant({c:.6g})",
    )


def zero() -> DistributionSpectrum:
    return constant(0.0)


def power(exponent: float) -> DistributionSpectrum:
    """The slow-growth sequence F_n = (1+n²)^j."""

    def generator(ns: IndexArray) -> ComplexArray:
        return (1.0 + ns.astype(np.float64) ** 2) ** exponent + 0j

    return from_generator(
        generator,
        description={"kind": "generator", "name": "power", "params": {"exponent": exponent}},
        label=f"power({exponent:.6g})",
    )


def wrapped_gaussian(eps: float) -> DistributionSpectrum:
    """Coefficients e^{−εn²/4}/√(2π) of the unit-mass wrapped Gaussian."""

    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")

    def generator(ns: IndexArray) -> ComplexArray:
        return np.exp(-eps * ns.astype(np.float64) ** 2 / 4.0) / SQRT_2PI + 0j

    return DistributionSpectrum(
        generator,
        GrowthClass(GrowthTag.RAPID_DECAY, -math.inf, 0.0),
        description={"kind": "generator", "name": "wrapped_gaussian", "params": {"eps": eps}},
        label=f"wrapped_gaussian({eps:.6g})",
    )


def from_window(window: CoeffSeq) -> DistributionSpectrum:
    """A distribution whose coefficients vanish outside of a stored window."""

    bandwidth = window.bandwidth
    coeffs = window.coeffs

    def generator(ns: IndexArray) -> ComplexArray:
        inside = np.abs(ns) <= bandwidth
        return np.where(inside, coeffs[np.clip(ns + bandwidth, 0, 2 * bandwidth)], 0j)

    return DistributionSpectrum(
        generator,
        GrowthClass(GrowthTag.RAPID_DECAY, 0.0, 0.0),
        window=window,
        description={"kind": "window", **window.to_json()},
        label=f"window({bandwidth})",
    )


def _constant_value(params: Mapping[str, Any]) -> DistributionSpectrum:
    raw = params.get("value", 1.0)

    if isinstance(raw, (list, tuple)):
        return constant(complex(raw[0], raw[1]))

    return constant(complex(raw))


GENERATORS: dict[str, Callable[[Mapping[str, Any]], DistributionSpectrum]] = {
    "constant": _constant_value,
    "dirac": lambda params: dirac(float(params.get("theta", 0.0))),
    "power": lambda params: power(float(params["exponent"])),
    "wrapped_gaussian": lambda params: wrapped_gaussian(float(params["eps"])),
}


def from_json(data: Mapping[str, Any]) -> DistributionSpectrum:
    """Rebuild a distribution from ``{"kind": "dirac"|"generator"|"window", ...}``."""

    kind = data.get("kind")

    if kind == "dirac":
        return dirac(float(data.get("theta", 0.0)))

    if kind == "window":
        return from_window(CoeffSeq.from_json(data))

    if kind == "generator":
        name = data.get("name")

        if name not in GENERATORS:
            raise ValueError(f"unknown generator '{name}', expected one of {sorted(GENERATORS)}")

        return GENERATORS[name](data.get("params", {}))

    raise ValueError(f"unknown distribution kind '{kind}'")


def pair(F: DistributionSpectrum, phi: CoeffSeq) -> PairingResult:
    """Dual pairing ⟨F, φ⟩ = Σ F_n* φ_n over the window of φ (exact, no tail)."""

    value = np.vdot(F.coefficients(phi.indices), phi.coeffs)
    return PairingResult(complex(value), phi.bandwidth, 0.0)


def translate(F: DistributionSpectrum, theta: float) -> DistributionSpectrum:
    """Translate F(x) ↦ F(x − θ), coefficients F_n e^{−inθ}."""

    if F.description is not None and F.description.get("kind") == "dirac":
        return dirac(float(F.description["theta"]) + theta)

    def generator(ns: IndexArray) -> ComplexArray:
        return F.coefficients(ns) * np.exp(-1j * ns * theta)

    return DistributionSpectrum(generator, F.growth, label=f"translate({F.label}, {theta:.6g})")


def reflect(F: DistributionSpectrum) -> DistributionSpectrum:
    """Reflection F(x) ↦ F(−x), coefficients n ↦ F_{−n}."""

    def generator(ns: IndexArray) -> ComplexArray:
        return F.coefficients(-ns)

    return DistributionSpectrum(generator, F.growth, label=f"reflect({F.label})")


def derivative(F: DistributionSpectrum) -> DistributionSpectrum:
    """Distributional derivative, coefficients in·F_n so that ⟨F′, φ⟩ = −⟨F, φ′⟩."""

    def generator(ns: IndexArray) -> ComplexArray:
        return 1j * ns * F.coefficients(ns)

    return from_generator(generator, label=f"derivative({F.label})")


def add(F: DistributionSpectrum, G: DistributionSpectrum) -> DistributionSpectrum:
    def generator(ns: IndexArray) -> ComplexArray:
        return F.coefficients(ns) + G.coefficients(ns)

    return from_generator(generator, label=f"({F.label} + {G.label})")


def scale(a: complex, F: DistributionSpectrum) -> DistributionSpectrum:
    def generator(ns: IndexArray) -> ComplexArray:
        return a * F.coefficients(ns)

    return from_generator(generator, label=f"{a:.6g}*{F.label}")


def sesquilinear_product(
    F: DistributionSpectrum,
    G: DistributionSpectrum,
    *,
    normalization: Normalization = "dirac",
) -> DistributionSpectrum:
    """Generalised sesquilinear product ⟨F, G⟩_g.

    The ``"literal"`` normalization is the bare coefficient map n ↦ F_n* G_n, under which e_0 is
    its own product. Dirac coefficients are e^{−inθ}/√(2π), so the bare map sends δ_θ and δ_θ′ to
    δ_(θ′−θ)/√(2π). The default ``"dirac"`` normalization scales by √(2π) so that the product of
    two Dirac measures is exactly δ_(θ′−θ); the e_0 example then becomes √(2π)·e_0.

    :param F: Conjugated operand
    :param G: Linear operand
    :param normalization: Either ``"dirac"`` or ``"literal"``
    :returns: The product distribution, its growth re-classified
    """

    for operand in (F, G):
        if not operand.growth.at_least(GrowthTag.SLOW_GROWTH):
            raise ValueError(f"operand '{operand.label}' is not of slow growth")

    if normalization == "dirac":
        weight = SQRT_2PI
    elif normalization == "literal":
        weight = 1.0
    else:
        raise ValueError(f"unknown normalization '{normalization}'")

    def generator(ns: IndexArray) -> ComplexArray:
        return weight * np.conj(F.coefficients(ns)) * G.coefficients(ns)

    return from_generator(generator, label=f"<{F.label}, {G.label}>_g")


def _next_power_of_two(value: int) -> int:
    return 1 << max(0, (value - 1).bit_length())


def apply_theta(
    F: DistributionSpectrum,
    phi: CoeffSeq,
    *,
    bandwidth: int | None = None,
    grid_size: int | None = None,
    threshold: float = 1e-8,
) -> PairingResult:
    """Pairing form of the angle operator, ⟨ΘF, φ⟩ = ⟨F, xφ⟩.

    The product xφ is formed in point space with the jump of the sawtooth at ±π averaged to 0,
    then re-projected at an enlarged bandwidth. The re-projection residual on the staggered grid
    is returned as ``tail_estimate``.

    :param F: The distribution
    :param phi: A band-limited test function
    :param bandwidth: Re-projection bandwidth, defaults to 4N+16
    :param grid_size: Quadrature grid size, defaults to a power of two ≥ 4(2·bandwidth+1)
    :param threshold: Residual above which a `LeakageWarning` is issued
    :returns: The pairing with its re-projection residual
    """

    n_out = 4 * phi.bandwidth + 16 if bandwidth is None else bandwidth
    size = _next_power_of_two(4 * (2 * n_out + 1)) if grid_size is None else grid_size
    thetas = theta_grid(size)
    sawtooth = thetas.copy()
    sawtooth[0] = 0.0

    samples = evaluate(phi, size).samples
    x_phi = coeffs_from_samples(SampledFunction(sawtooth * samples), n_out)

    half = math.pi / size
    shifted = CoeffSeq(x_phi.coeffs * np.exp(1j * x_phi.indices * half))
    shifted_phi = CoeffSeq(phi.coeffs * np.exp(1j * phi.indices * half))
    exact = (thetas + half) * evaluate(shifted_phi, size).samples
    residual = float(np.max(np.abs(evaluate(shifted, size).samples - exact)))

    _logger.debug(f"theta re-projection: bandwidth={n_out}, grid={size}, residual={residual:.3e}")

    if residual > threshold:
        message = (
            f"re-projection residual {residual:.3e} of x*phi exceeds {threshold:.1e}, "
            "raise the bandwidth or use a test function vanishing at ±π"
        )
        _logger.warning(message)
        warnings.warn(message, LeakageWarning, stacklevel=2)

    return PairingResult(pair(F, x_phi).value, n_out, residual)


__all__ = [
    "GENERATORS",
    "DistributionSpectrum",
    "LeakageWarning",
    "PairingResult",
    "add",
    "apply_theta",
    "constant",
    "derivative",
    "dirac",
    "from_generator",
    "from_json",
    "from_window",
    "pair",
    "power",
    "reflect",
    "scale",
    "sesquilinear_product",
    "translate",
    "wrapped_gaussian",
    "zero",
]
