"""
Fourier coefficient arithmetic on the unit circle.

Functions on the circle are represented by two-sided coefficient arrays against the orthonormal
basis e_k(θ) = e^{ikθ}/√(2π), or by samples on the uniform grid θ_j = −π + 2πj/M. This module
converts between the two representations, evaluates inner products, and estimates how fast a
coefficient sequence grows or decays.

Examples
--------

.. code-block:: python

    import numpy as np
    from pergen import spectral

    f = spectral.CoeffSeq.basis(1, bandwidth=4)
    samples = spectral.evaluate(f, 16)
    g = spectral.coeffs_from_samples(samples, 4)

    assert g.allclose(f)
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from enum import IntEnum
from logging import NullHandler, getLogger
from typing import TYPE_CHECKING, Any, Union

import numpy as np
from attrs import field, frozen
from numpy.typing import ArrayLike, NDArray
from scipy import fft
from typing_extensions import TypeAlias

if TYPE_CHECKING:
    from attrs import Attribute

    AnyAttr: TypeAlias = Attribute[Any]

_logger = getLogger("pergen.spectral")
_logger.addHandler(NullHandler())

SQRT_2PI = math.sqrt(2.0 * math.pi)

RealArray: TypeAlias = NDArray[np.float64]
ComplexArray: TypeAlias = NDArray[np.complex128]
IndexArray: TypeAlias = NDArray[np.int64]
CoeffGenerator: TypeAlias = Callable[[IndexArray], ArrayLike]


class SizingError(ValueError):
    """Raised when a sampling grid is too small for the requested bandwidth."""


def _readonly_complex(values: ArrayLike) -> ComplexArray:
    array = np.array(values, dtype=np.complex128)
    array.setflags(write=False)
    return array


def indices(bandwidth: int) -> IndexArray:
    """The coefficient indices -N..N of a bandwidth N sequence."""

    return np.arange(-bandwidth, bandwidth + 1, dtype=np.int64)


def theta_grid(size: int) -> RealArray:
    """Uniform periodic grid θ_j = −π + 2πj/M, j = 0..M−1, with the endpoint π excluded.

    :param size: The number of grid points M
    :returns: The grid angles
    """

    if size < 1:
        raise ValueError("grid size must be at least 1")

    return -math.pi + 2.0 * math.pi * np.arange(size, dtype=np.float64) / size


def wrap_angle(theta: float) -> float:
    """Reduce an angle into the half-open interval [−π, π)."""

    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)

    if wrapped < 0:
        wrapped += 2.0 * math.pi

    result = wrapped - math.pi
    return -math.pi if result >= math.pi else result


@frozen(eq=False)
class CoeffSeq:
    """Truncated two-sided Fourier coefficient sequence.

    Entry ``coeffs[k + N]`` holds the coefficient of e_k for k = −N..N. Coefficients outside of
    the window are zero.

    :param coeffs: Complex array of odd length 2N+1
    """

    coeffs: ComplexArray = field(converter=_readonly_complex)

    @coeffs.validator
    def _coeffs(self, _: AnyAttr, coeffs: ComplexArray) -> None:
        if coeffs.ndim != 1 or coeffs.size % 2 != 1:
            raise ValueError("coefficient array must be one-dimensional with length 2N+1")

        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")

    @classmethod
    def zeros(cls, bandwidth: int) -> CoeffSeq:
        if bandwidth < 0:
            raise ValueError("bandwidth must be non-negative")

        return cls(np.zeros(2 * bandwidth + 1, dtype=np.complex128))

    @classmethod
    def basis(cls, k: int, bandwidth: int | None = None) -> CoeffSeq:
        """The basis element e_k, stored with the given bandwidth (at least |k|)."""

        n = abs(k) if bandwidth is None else bandwidth

        if n < abs(k):
            raise ValueError(f"bandwidth {n} cannot hold the basis element e_{k}")

        coeffs = np.zeros(2 * n + 1, dtype=np.complex128)
        coeffs[k + n] = 1.0
        return cls(coeffs)

    @classmethod
    def from_generator(cls, generator: CoeffGenerator, bandwidth: int) -> CoeffSeq:
        """Evaluate a closed-form coefficient map on the window |k| ≤ N."""

        ks = indices(bandwidth)
        values = np.broadcast_to(np.asarray(generator(ks), dtype=np.complex128), ks.shape)
        return cls(values)

    @classmethod
    def random(cls, rng: np.random.Generator, bandwidth: int) -> CoeffSeq:
        """Coefficients drawn from a standard complex normal distribution."""

        shape = 2 * bandwidth + 1
        return cls((rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0))

    @classmethod
    def from_mapping(cls, values: Mapping[int, complex], bandwidth: int | None = None) -> CoeffSeq:
        """Build a sequence from sparse ``{k: f_k}`` entries."""

        n = max((abs(k) for k in values), default=0) if bandwidth is None else bandwidth
        coeffs = np.zeros(2 * n + 1, dtype=np.complex128)

        for k, value in values.items():
            if abs(k) > n:
                raise ValueError(f"index {k} lies outside of bandwidth {n}")

            coeffs[k + n] = value

        return cls(coeffs)

    @property
    def bandwidth(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def indices(self) -> IndexArray:
        return indices(self.bandwidth)

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.bandwidth:
            return 0j

        return complex(self.coeffs[k + self.bandwidth])

    def resize(self, bandwidth: int) -> CoeffSeq:
        """Zero-pad or truncate the window to a new bandwidth."""

        if bandwidth < 0:
            raise ValueError("bandwidth must be non-negative")

        n = self.bandwidth

        if bandwidth >= n:
            pad = bandwidth - n
            return CoeffSeq(np.pad(self.coeffs, (pad, pad)))

        cut = n - bandwidth
        return CoeffSeq(self.coeffs[cut : self.coeffs.size - cut])

    def norm(self) -> float:
        """L² norm, equal to the ℓ² norm of the coefficients by Parseval."""

        return float(np.linalg.norm(self.coeffs))

    def allclose(self, other: CoeffSeq, *, rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        n = max(self.bandwidth, other.bandwidth)
        a = self.resize(n).coeffs
        b = other.resize(n).coeffs
        return bool(np.allclose(a, b, rtol=rtol, atol=atol))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoeffSeq):
            return NotImplemented

        return bool(np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None  # type: ignore[assignment]

    def _aligned(self, other: CoeffSeq) -> tuple[ComplexArray, ComplexArray]:
        n = max(self.bandwidth, other.bandwidth)
        return self.resize(n).coeffs, other.resize(n).coeffs

    def __add__(self, other: CoeffSeq) -> CoeffSeq:
        if not isinstance(other, CoeffSeq):
            return NotImplemented

        a, b = self._aligned(other)
        return CoeffSeq(a + b)

    def __sub__(self, other: CoeffSeq) -> CoeffSeq:
        if not isinstance(other, CoeffSeq):
            return NotImplemented

        a, b = self._aligned(other)
        return CoeffSeq(a - b)

    def __mul__(self, scalar: complex) -> CoeffSeq:
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented

        return CoeffSeq(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> CoeffSeq:
        return CoeffSeq(-self.coeffs)

    def to_json(self) -> dict[str, Any]:
        return {
            "bandwidth": self.bandwidth,
            "re": self.coeffs.real.tolist(),
            "im": self.coeffs.imag.tolist(),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> CoeffSeq:
        re = np.asarray(data["re"], dtype=np.float64)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=np.float64)

        if re.shape != im.shape:
            raise ValueError("real and imaginary parts must have the same length")

        seq = cls(re + 1j * im)

        if "bandwidth" in data and int(data["bandwidth"]) != seq.bandwidth:
            raise ValueError("declared bandwidth does not match the coefficient count")

        return seq


def _to_samples(values: ArrayLike) -> ComplexArray:
    array = _readonly_complex(values)

    if array.ndim != 1 or array.size < 1:
        raise ValueError("samples must be a non-empty one-dimensional array")

    return array


@frozen(eq=False)
class SampledFunction:
    """Point values of a function on the uniform grid ``theta_grid(M)``.

    :param samples: The values f(θ_j), j = 0..M−1
    """

    samples: ComplexArray = field(converter=_to_samples)

    @property
    def grid_size(self) -> int:
        return int(self.samples.size)

    @property
    def thetas(self) -> RealArray:
        return theta_grid(self.grid_size)

    @classmethod
    def from_function(cls, func: Callable[[RealArray], ArrayLike], size: int) -> SampledFunction:
        thetas = theta_grid(size)
        values = np.broadcast_to(np.asarray(func(thetas), dtype=np.complex128), thetas.shape)
        return cls(values)


def _alternating(ks: IndexArray) -> RealArray:
    return np.where(ks % 2 == 0, 1.0, -1.0)


def coeffs_from_samples(f: SampledFunction, bandwidth: int) -> CoeffSeq:
    """Periodic trapezoidal projection of grid samples onto e_k, |k| ≤ N.

    :param f: The sampled function
    :param bandwidth: The output bandwidth N
    :returns: The coefficients f_k = (2π/M) Σ_j f(θ_j) e^{−ikθ_j}/√(2π)
    :raises SizingError: If the grid has fewer than 2N+1 points
    """

    size = f.grid_size

    if bandwidth < 0:
        raise ValueError("bandwidth must be non-negative")

    if size < 2 * bandwidth + 1:
        raise SizingError(f"grid of {size} points cannot resolve bandwidth {bandwidth}")

    ks = indices(bandwidth)
    transform = fft.fft(f.samples)
    coeffs = (SQRT_2PI / size) * _alternating(ks) * transform[ks % size]
    return CoeffSeq(coeffs)


def evaluate(f: CoeffSeq, size: int) -> SampledFunction:
    """Truncated Fourier synthesis on the uniform grid of ``size`` points.

    Grids smaller than 2N+1 alias the high modes onto the low ones, which still gives the exact
    point values of the synthesis.
    """

    if size < 1:
        raise ValueError("grid size must be at least 1")

    ks = f.indices
    folded = np.zeros(size, dtype=np.complex128)
    np.add.at(folded, ks % size, f.coeffs * _alternating(ks))
    samples = fft.ifft(folded) * (size / SQRT_2PI)
    return SampledFunction(samples)


def synthesize(f: CoeffSeq, thetas: ArrayLike) -> ComplexArray:
    """Evaluate the truncated Fourier series at arbitrary angles.

    :param f: The coefficients to synthesize
    :param thetas: Angles, scalar or array
    :returns: Array of f(θ) with the shape of ``thetas``
    """

    points = np.asarray(thetas, dtype=np.float64)
    phases = np.exp(1j * np.multiply.outer(points, f.indices.astype(np.float64)))
    return np.asarray(phases @ f.coeffs / SQRT_2PI, dtype=np.complex128)


def inner_product(f: CoeffSeq, g: CoeffSeq) -> complex:
    """L² inner product Σ_k f_k* g_k, conjugate-linear in the first argument."""

    n = max(f.bandwidth, g.bandwidth)
    return complex(np.vdot(f.resize(n).coeffs, g.resize(n).coeffs))


def spectral_derivative(f: CoeffSeq, order: int = 1) -> CoeffSeq:
    """θ-derivative of the given order, computed by multiplying coefficients by (ik)^order."""

    if order < 0:
        raise ValueError("derivative order must be non-negative")

    return CoeffSeq(f.coeffs * (1j * f.indices) ** order)


class GrowthTag(IntEnum):
    """Growth classes ordered from weakest to strongest decay."""

    UNCLASSIFIED = 0
    SLOW_GROWTH = 1
    SQUARE_SUMMABLE = 2
    RAPID_DECAY = 3


@frozen(slots=True)
class GrowthClass:
    """Empirical growth verdict of a coefficient sequence.

    :param tag: The growth class
    :param exponent: The fitted j in |c_k| ~ (1+k²)^j
    :param fit_residual: Slope drift between the lower and upper halves of the tail window
    """

    tag: GrowthTag
    exponent: float = 0.0
    fit_residual: float = 0.0

    def at_least(self, tag: GrowthTag) -> bool:
        """True when this verdict passes every test that ``tag`` passes."""

        return self.tag >= tag


CoeffSource: TypeAlias = Union[CoeffSeq, CoeffGenerator]


def _tail_magnitudes(
    c: CoeffSource, cutoff: int | None, tail_fraction: float
) -> tuple[RealArray, RealArray]:
    if isinstance(c, CoeffSeq):
        values = c.coeffs
        ks = c.indices
        k_max = c.bandwidth if cutoff is None else cutoff
    else:
        if cutoff is None:
            raise ValueError("a cutoff K is required when classifying a coefficient generator")

        ks = indices(cutoff)
        values = np.broadcast_to(np.asarray(c(ks), dtype=np.complex128), ks.shape)
        k_max = cutoff

    if k_max < 16:
        raise ValueError(f"growth classification needs a window of at least 16, got {k_max}")

    k_min = math.ceil(k_max * (1.0 - tail_fraction))
    mask = (np.abs(ks) >= k_min) & (np.abs(ks) <= k_max)
    return np.abs(ks[mask]).astype(np.float64), np.abs(values[mask])


def _slope(x: RealArray, y: RealArray) -> float:
    return float(np.polyfit(x, y, 1)[0])


def classify_growth(
    c: CoeffSource,
    cutoff: int | None = None,
    *,
    j_max: float = 8.0,
    tail_fraction: float = 0.5,
    tolerance: float = 0.1,
) -> GrowthClass:
    """Classify the asymptotic growth of a coefficient sequence from its tail.

    The magnitudes over |k| ∈ [K(1 − tail_fraction), K] are fitted against log(1+k²); the slope
    is the exponent j in |c_k| ~ (1+k²)^j. The fit is an empirical certificate over a finite
    window, never a proof.

    :param c: A coefficient sequence or a closed-form generator k → c_k
    :param cutoff: The window K, defaults to the bandwidth of a sequence
    :param j_max: Slopes below −j_max certify rapid decay
    :param tail_fraction: Fraction of the window used as the tail
    :param tolerance: Tolerance for the slope drift and class boundaries
    :returns: The fitted growth class
    """

    ks, magnitudes = _tail_magnitudes(c, cutoff, tail_fraction)

    if not np.all(np.isfinite(magnitudes)):
        return GrowthClass(GrowthTag.UNCLASSIFIED, math.inf, math.inf)

    nonzero = magnitudes > 0.0

    if np.count_nonzero(nonzero) < 4:
        return GrowthClass(GrowthTag.RAPID_DECAY, 0.0, 0.0)

    x = np.log1p(ks[nonzero] ** 2)
    y = np.log(magnitudes[nonzero])
    slope = _slope(x, y)

    middle = float(np.median(ks[nonzero]))
    lower = ks[nonzero] <= middle
    upper = ks[nonzero] >= middle

    if np.count_nonzero(lower) >= 2 and np.count_nonzero(upper) >= 2:
        drift = abs(_slope(x[upper], y[upper]) - _slope(x[lower], y[lower]))
    else:
        drift = 0.0

    _logger.debug(f"growth fit: slope={slope:.4f}, drift={drift:.4f}")

    if slope < -j_max - tolerance:
        return GrowthClass(GrowthTag.RAPID_DECAY, slope, drift)

    if drift > tolerance:
        return GrowthClass(GrowthTag.UNCLASSIFIED, slope, drift)

    if 4.0 * slope < -1.0 - tolerance:
        return GrowthClass(GrowthTag.SQUARE_SUMMABLE, slope, drift)

    return GrowthClass(GrowthTag.SLOW_GROWTH, slope, drift)


__all__ = [
    "SQRT_2PI",
    "CoeffSeq",
    "GrowthClass",
    "GrowthTag",
    "SampledFunction",
    "SizingError",
    "classify_growth",
    "coeffs_from_samples",
    "evaluate",
    "indices",
    "inner_product",
    "spectral_derivative",
    "synthesize",
    "theta_grid",
    "wrap_angle",
]
