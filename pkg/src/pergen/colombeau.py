"""
ε-parameterized nets of smooth periodic functions and their growth certificates.

A `Net` is a representative (u_ε) of a Colombeau generalised function on the circle: a closed-form
map (ε, θ) → u_ε(θ) for ε ∈ (0, 1]. Nets whose derivatives grow at most like ε^{−q} are moderate,
nets that vanish faster than every power of ε are negligible and represent zero. Membership is
certified empirically over an `EpsGrid` by `classify_net`.

The central exemplar is the wrapped Gaussian ψ_ε, whose residual under the operator d/dθ + (2/ε)θ
is negligible, so ψ = [(ψ_ε)] solves the minimum-uncertainty equation in the quotient algebra.

Examples
--------

.. code-block:: python

    from pergen import colombeau

    verdict = colombeau.mudec_certificate()
    assert verdict.tag is colombeau.NetTag.NEGLIGIBLE

    psi = colombeau.wrapped_gaussian_net()
    verdict = colombeau.classify_net(psi, colombeau.DEFAULT_GRID, j_max=0)
    assert verdict.tag is colombeau.NetTag.MODERATE
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from enum import Enum
from functools import partial
from logging import NullHandler, getLogger
from typing import TYPE_CHECKING, Any, Union

import numpy as np
from attrs import evolve, field, frozen, validators
from numpy.typing import ArrayLike
from scipy import special
from typing_extensions import TypeAlias

from . import distributions as dist
from .spectral import (
    SQRT_2PI,
    CoeffSeq,
    ComplexArray,
    GrowthTag,
    IndexArray,
    RealArray,
    evaluate,
    indices,
    spectral_derivative,
    synthesize,
    theta_grid,
)

if TYPE_CHECKING:
    from attrs import Attribute

    AnyAttr: TypeAlias = Attribute[Any]

_logger = getLogger("pergen.colombeau")
_logger.addHandler(NullHandler())

NetFunction: TypeAlias = Callable[[float, RealArray], ArrayLike]
NetSpectrum: TypeAlias = Callable[[float, IndexArray], ArrayLike]

FD_STEP = 1e-5
THETA_SAMPLES = 500
TRUNCATION_TOLERANCE = 1e-15
EMBEDDING_TOLERANCE = 1e-14
MAX_EMBEDDING_BANDWIDTH = 2**16
SLOPE_SLACK = 1e-6
#: Slacks of the non-increasing trend checks
MONOTONE_RTOL = 1e-9
MONOTONE_ATOL = 1e-15


class ClassificationError(ValueError):
    """Raised when a net cannot be classified on the requested grid."""


def _to_eps_values(values: Iterable[float]) -> tuple[float, ...]:
    return tuple(float(value) for value in values)


@frozen(slots=True)
class EpsGrid:
    """Strictly decreasing regularization parameters in (0, 1].

    :param values: The ε values, largest first
    """

    values: tuple[float, ...] = field(converter=_to_eps_values)

    @values.validator
    def _values(self, _: AnyAttr, values: tuple[float, ...]) -> None:
        if not values:
            raise ValueError("eps grid must not be empty")

        if any(not 0.0 < value <= 1.0 for value in values):
            raise ValueError("eps values must lie in (0, 1]")

        if any(b >= a for a, b in zip(values, values[1:])):
            raise ValueError("eps values must be strictly decreasing")

    @classmethod
    def parse(cls, text: str) -> EpsGrid:
        """Parse a comma separated list such as ``"0.8,0.6,0.5"``."""

        return cls(float(part) for part in text.split(",") if part.strip())

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def smallest(self) -> float:
        return self.values[-1]


DEFAULT_GRID = EpsGrid((0.8, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2))


@frozen(eq=False)
class Net:
    """A net (u_ε) of smooth functions on the circle.

    :param generator: Map (ε, θ-array) → values
    :param label: Name used in reports
    :param comb_truncation: Wrap terms per side K for comb sums, 0 otherwise
    :param derivative: Factory of the closed-form θ-derivative, if one exists
    :param spectrum: Closed-form Fourier coefficients (ε, n-array) → u_ε,n, if known
    :param truncation_error: Size of the first neglected wrap term at a given ε
    :param fd_step: Step of the central difference used to build this net, if any
    """

    generator: NetFunction
    label: str = field(default="net", kw_only=True)
    comb_truncation: int = field(default=0, kw_only=True, validator=validators.ge(0))
    derivative: Callable[[], Net] | None = field(default=None, kw_only=True)
    spectrum: NetSpectrum | None = field(default=None, kw_only=True)
    truncation_error: Callable[[float], float] | None = field(default=None, kw_only=True)
    fd_step: float | None = field(default=None, kw_only=True)

    def __call__(self, eps: float, thetas: ArrayLike) -> ComplexArray:
        if not 0.0 < eps <= 1.0:
            raise ValueError(f"eps must lie in (0, 1], got {eps}")

        points = np.asarray(thetas, dtype=np.float64)
        values = np.asarray(self.generator(eps, points), dtype=np.complex128)
        return np.array(np.broadcast_to(values, points.shape), dtype=np.complex128)

    def sup(self, eps: float, samples: int = THETA_SAMPLES) -> float:
        """Maximum modulus over ``samples`` uniform angles."""

        return float(np.max(np.abs(self(eps, theta_grid(samples)))))

    def certify_truncation(self, grid: EpsGrid, tolerance: float = TRUNCATION_TOLERANCE) -> float:
        """Largest contribution of the first neglected wrap term over the grid.

        :raises ClassificationError: If the contribution reaches ``tolerance`` at some ε
        """

        if self.truncation_error is None:
            return 0.0

        worst = 0.0

        for eps in grid:
            error = self.truncation_error(eps)

            if not error < tolerance:
                raise ClassificationError(
                    f"wrap truncation K={self.comb_truncation} of '{self.label}' changes values "
                    f"by {error:.3e} at eps={eps}"
                )

            worst = max(worst, error)

        return worst


def _hermite_term(order: int, eps: float, x: ArrayLike) -> RealArray:
    # d^j/dx^j e^{-x²/ε} = (-1/√ε)^j H_j(x/√ε) e^{-x²/ε}
    root = math.sqrt(eps)
    points = np.asarray(x, dtype=np.float64)
    return (-1.0 / root) ** order * special.eval_hermite(order, points / root) * np.exp(
        -points * points / eps
    )


def _gaussian_comb(
    amplitude: Callable[[float], float],
    weights: Callable[[IndexArray], RealArray],
    cutoff: int,
    order: int,
    label: str,
    spectrum: Callable[[float, IndexArray, int], ArrayLike] | None = None,
) -> Net:
    ks = np.arange(-cutoff, cutoff + 1, dtype=np.int64)
    offsets = 2.0 * math.pi * ks
    w = weights(ks)

    def generator(eps: float, thetas: RealArray) -> ComplexArray:
        x = thetas[..., np.newaxis] + offsets
        return amplitude(eps) * (_hermite_term(order, eps, x) @ w) + 0j

    def truncation_error(eps: float) -> float:
        outside = np.array([-(cutoff + 1), cutoff + 1], dtype=np.int64)
        weight = float(np.max(np.abs(weights(outside))))
        term = _hermite_term(order, eps, (2 * cutoff + 1) * math.pi)
        return abs(amplitude(eps)) * weight * float(abs(term))

    def derivative() -> Net:
        return _gaussian_comb(amplitude, weights, cutoff, order + 1, label, spectrum)

    closed_spectrum: NetSpectrum | None = None

    if spectrum is not None:
        closed_spectrum = partial(spectrum, order=order)

    name = label if order == 0 else f"d{order}({label})"

    return Net(
        generator,
        label=name,
        comb_truncation=cutoff,
        derivative=derivative,
        spectrum=closed_spectrum,
        truncation_error=truncation_error,
    )


def _check_cutoff(cutoff: int) -> None:
    if cutoff < 3:
        raise ValueError(f"wrap truncation must be at least 3, got {cutoff}")


def _wrapped_gaussian_spectrum(eps: float, ns: IndexArray, order: int) -> ComplexArray:
    n = ns.astype(np.float64)
    return np.exp(-eps * n * n / 4.0) / SQRT_2PI * (1j * n) ** order


def wrapped_gaussian_net(cutoff: int = 6) -> Net:
    """ψ_ε(θ) = Σ_{|k|≤K} e^{−(θ+2πk)²/ε} / √(πε), the unit-mass wrapped Gaussian.

    :param cutoff: Wrap terms K per side, at least 3
    """

    _check_cutoff(cutoff)
    return _gaussian_comb(
        lambda eps: 1.0 / math.sqrt(math.pi * eps),
        lambda ks: np.ones(ks.shape, dtype=np.float64),
        cutoff,
        0,
        "wrapped_gaussian",
        _wrapped_gaussian_spectrum,
    )


def residual_net(cutoff: int = 6) -> Net:
    """Ψ_ε = (d/dθ + (2/ε)θ)ψ_ε = −(4√π/ε^{3/2}) Σ_{|k|≤K} k e^{−(θ+2πk)²/ε} in closed form."""

    _check_cutoff(cutoff)
    return _gaussian_comb(
        lambda eps: -4.0 * math.sqrt(math.pi) * eps**-1.5,
        lambda ks: ks.astype(np.float64),
        cutoff,
        0,
        "residual",
    )


def residual_bound(eps: float) -> float:
    """Upper bound of sup|Ψ_ε|: 8√π ε^{−3/2} e^{−π²/ε} Σ_{k≥1} k e^{−4k(k−1)π²/ε}.

    Terms of the bracketed series are summed until they fall below 1e−300.
    """

    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")

    rate = -(math.pi**2) / eps
    cutoff = math.log(1e-300)
    series = 0.0
    k = 1

    while True:
        log_term = math.log(k) + 4.0 * k * (k - 1) * rate

        if log_term < cutoff:
            break

        series += math.exp(log_term)
        k += 1

    return 8.0 * math.sqrt(math.pi) * eps**-1.5 * math.exp(rate) * series


def _combined_truncation(*nets: Net) -> Callable[[float], float] | None:
    errors = [net.truncation_error for net in nets if net.truncation_error is not None]

    if not errors:
        return None

    return lambda eps: max(error(eps) for error in errors)


def constant_net(value: complex = 1.0) -> Net:
    """The net u_ε ≡ c for every ε."""

    c = complex(value)

    def generator(eps: float, thetas: RealArray) -> ComplexArray:
        return np.full(thetas.shape, c, dtype=np.complex128)

    def spectrum(eps: float, ns: IndexArray) -> ComplexArray:
        return np.where(ns == 0, c * SQRT_2PI, 0j)

    return Net(
        generator,
        label="zero" if c == 0 else f"constant({c:.6g})",
        derivative=zero_net,
        spectrum=spectrum,
    )


def zero_net() -> Net:
    return constant_net(0.0)


def coordinate_net() -> Net:
    """The net x_ε(θ) = θ on [−π, π)."""

    return Net(
        lambda eps, thetas: thetas + 0j,
        label="theta",
        derivative=lambda: constant_net(1.0),
    )


def function_net(f: CoeffSeq) -> Net:
    """The ε-independent net of a band-limited smooth function."""

    def spectrum(eps: float, ns: IndexArray) -> ComplexArray:
        inside = np.abs(ns) <= f.bandwidth
        return np.where(inside, f.coeffs[np.clip(ns + f.bandwidth, 0, 2 * f.bandwidth)], 0j)

    return Net(
        lambda eps, thetas: synthesize(f, thetas),
        label=f"function({f.bandwidth})",
        derivative=lambda: function_net(spectral_derivative(f)),
        spectrum=spectrum,
    )


def net_add(u: Net, v: Net) -> Net:
    derivative: Callable[[], Net] | None = None

    if u.derivative is not None and v.derivative is not None:
        du, dv = u.derivative, v.derivative

        def _derivative() -> Net:
            return net_add(du(), dv())

        derivative = _derivative

    return Net(
        lambda eps, thetas: u(eps, thetas) + v(eps, thetas),
        label=f"({u.label} + {v.label})",
        comb_truncation=max(u.comb_truncation, v.comb_truncation),
        derivative=derivative,
        truncation_error=_combined_truncation(u, v),
    )


def net_subtract(u: Net, v: Net) -> Net:
    return net_add(u, net_scale(-1.0, v))


def net_multiply(u: Net, v: Net) -> Net:
    """Pointwise product, differentiated by the product rule when both factors allow it."""

    derivative: Callable[[], Net] | None = None

    if u.derivative is not None and v.derivative is not None:
        du, dv = u.derivative, v.derivative

        def _derivative() -> Net:
            return net_add(net_multiply(du(), v), net_multiply(u, dv()))

        derivative = _derivative

    return Net(
        lambda eps, thetas: u(eps, thetas) * v(eps, thetas),
        label=f"{u.label}*{v.label}",
        comb_truncation=max(u.comb_truncation, v.comb_truncation),
        derivative=derivative,
        truncation_error=_combined_truncation(u, v),
    )


def net_differentiate(u: Net, *, step: float = FD_STEP, closed_form: bool = True) -> Net:
    """θ-derivative of a net.

    The closed-form derivative is used when the net carries one and ``closed_form`` is set.
    Otherwise central differences with step ``h`` are used, with an O(h²) error recorded in
    ``fd_step`` of the result.
    """

    if closed_form and u.derivative is not None:
        return u.derivative()

    _logger.debug(f"central differences for d/dtheta of '{u.label}' with h={step:g}")

    def generator(eps: float, thetas: RealArray) -> ComplexArray:
        return (u(eps, thetas + step) - u(eps, thetas - step)) / (2.0 * step)

    return Net(
        generator,
        label=f"fd({u.label})",
        comb_truncation=u.comb_truncation,
        truncation_error=u.truncation_error,
        fd_step=step,
    )


class NetTag(Enum):
    MODERATE = "moderate"
    NEGLIGIBLE = "negligible"
    NEITHER = "neither"


@frozen(slots=True)
class DerivativeFit:
    """Fit of log S_j(ε) against log(1/ε) for one derivative order."""

    order: int
    slope: float
    residual: float


@frozen(slots=True)
class SupSample:
    eps: float
    order: int
    sup: float


@frozen(slots=True)
class GrowthVerdict:
    """Moderate/negligible certificate of a net with the evidence it rests on.

    :param tag: The verdict
    :param witness_q: For moderate nets the exponent q with sup ≤ Cε^{−q}; for negligible nets
        the largest tested q
    :param per_derivative: Fitted growth slope per derivative order
    :param samples: The measured sup norms
    :param thresholds: For q = 1..q_max the largest grid ε below which sup ≤ ε^q, or None
    """

    tag: NetTag
    witness_q: int
    per_derivative: tuple[DerivativeFit, ...]
    samples: tuple[SupSample, ...] = ()
    thresholds: tuple[float | None, ...] = ()

    @property
    def is_moderate(self) -> bool:
        return self.tag is not NetTag.NEITHER

    @property
    def is_negligible(self) -> bool:
        return self.tag is NetTag.NEGLIGIBLE

    def sups(self, order: int = 0) -> list[tuple[float, float]]:
        return [(s.eps, s.sup) for s in self.samples if s.order == order]


def _fit(xs: RealArray, sups: RealArray) -> tuple[float, float]:
    positive = sups > 0.0

    if np.count_nonzero(positive) < 2:
        return -math.inf, 0.0

    x = xs[positive]
    y = np.log(sups[positive])
    slope, intercept = np.polyfit(x, y, 1)
    residual = math.sqrt(float(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), residual


def _witness(slope: float) -> int:
    # slopes of exact powers come out of the fit a few ulps high
    return max(0, math.ceil(slope - SLOPE_SLACK))


def _threshold(grid: EpsGrid, sups: RealArray, q: int, min_tail: int) -> float | None:
    eps = np.asarray(grid.values)
    holds = sups <= eps**q
    count = 0

    for ok in holds[::-1]:
        if not ok:
            break

        count += 1

    if count < min_tail:
        return None

    return float(eps[len(eps) - count])


def classify_net(
    u: Net,
    grid: EpsGrid = DEFAULT_GRID,
    *,
    j_max: int = 2,
    q_max: int = 8,
    samples: int = THETA_SAMPLES,
    drift_tolerance: float = 0.5,
    min_tail: int = 2,
) -> GrowthVerdict:
    """Classify a net as moderate, negligible, or neither over an ε grid.

    For every derivative order j ≤ j_max the sup norm S_j(ε) over ``samples`` angles is fitted
    against log(1/ε). The net is neither when some slope keeps growing towards small ε by more
    than ``drift_tolerance``; otherwise it is moderate with q the ceiling of the largest slope. It
    is negligible when for each q ≤ q_max the bound S_0(ε) ≤ ε^q holds on a tail of at least
    ``min_tail`` grid points.

    :raises ClassificationError: On a non-finite sup or an uncertified wrap truncation
    """

    if len(grid) < 4:
        raise ClassificationError("classification needs at least 4 grid points")

    u.certify_truncation(grid)

    thetas = theta_grid(samples)
    xs = -np.log(np.asarray(grid.values))
    half = len(grid) // 2
    current = u
    fits: list[DerivativeFit] = []
    records: list[SupSample] = []
    neither = False
    sup0 = np.zeros(len(grid))

    for order in range(j_max + 1):
        if order > 0:
            current = net_differentiate(current)

        sups = np.empty(len(grid))

        for index, eps in enumerate(grid):
            value = float(np.max(np.abs(current(eps, thetas))))

            if not math.isfinite(value):
                raise ClassificationError(f"non-finite sup at eps={eps}, derivative order {order}")

            sups[index] = value
            records.append(SupSample(eps, order, value))

        if order == 0:
            sup0 = sups

        slope, residual = _fit(xs, sups)
        fits.append(DerivativeFit(order, slope, residual))

        head, _ = _fit(xs[: half + 1], sups[: half + 1])
        tail, _ = _fit(xs[half:], sups[half:])

        if math.isfinite(head) and tail > 0.0 and tail - head > drift_tolerance:
            neither = True

        _logger.debug(f"'{u.label}' order {order}: slope={slope:.3f}, head={head}, tail={tail}")

    if neither:
        return GrowthVerdict(NetTag.NEITHER, 0, tuple(fits), tuple(records))

    thresholds = tuple(_threshold(grid, sup0, q, min_tail) for q in range(1, q_max + 1))

    if all(threshold is not None for threshold in thresholds):
        return GrowthVerdict(NetTag.NEGLIGIBLE, q_max, tuple(fits), tuple(records), thresholds)

    finite = [fit.slope for fit in fits if math.isfinite(fit.slope)]
    witness = _witness(max(finite)) if finite else 0
    return GrowthVerdict(NetTag.MODERATE, witness, tuple(fits), tuple(records), thresholds)


Scalar: TypeAlias = Union[int, float, complex]


@frozen(eq=False)
class GeneralizedNumber:
    """An ε-parameterized scalar r_ε, a representative of a generalised number.

    :param generator: Map ε → r_ε
    :param label: Name used in reports
    :param verdict: Zeroth-order growth certificate, set by `classify_number`
    """

    generator: Callable[[float], complex]
    label: str = field(default="number", kw_only=True)
    verdict: GrowthVerdict | None = field(default=None, kw_only=True)

    def __call__(self, eps: float) -> complex:
        value = complex(self.generator(eps))

        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValueError(f"generalised number '{self.label}' is not finite at eps={eps}")

        return value

    def _combine(
        self, other: GeneralizedNumber | Scalar, op: Callable[[complex, complex], complex], sym: str
    ) -> GeneralizedNumber:
        rhs = _as_number(other)
        return GeneralizedNumber(
            lambda eps: op(self(eps), rhs(eps)),
            label=f"({self.label} {sym} {rhs.label})",
        )

    def __add__(self, other: GeneralizedNumber | Scalar) -> GeneralizedNumber:
        return self._combine(other, lambda a, b: a + b, "+")

    def __sub__(self, other: GeneralizedNumber | Scalar) -> GeneralizedNumber:
        return self._combine(other, lambda a, b: a - b, "-")

    def __mul__(self, other: GeneralizedNumber | Scalar) -> GeneralizedNumber:
        return self._combine(other, lambda a, b: a * b, "*")

    __radd__ = __add__
    __rmul__ = __mul__


def _as_number(value: GeneralizedNumber | Scalar) -> GeneralizedNumber:
    if isinstance(value, GeneralizedNumber):
        return value

    c = complex(value)
    return GeneralizedNumber(lambda eps: c, label=f"{c:.6g}")


def lambda_number(scale: float = 2.0) -> GeneralizedNumber:
    """λ_ε = scale/ε; 2/ε makes the wrapped Gaussian solve ψ′ + λθψ ≈ 0."""

    return GeneralizedNumber(lambda eps: scale / eps, label=f"{scale:g}/eps")


def classify_number(
    r: GeneralizedNumber, grid: EpsGrid = DEFAULT_GRID, *, q_max: int = 8
) -> GeneralizedNumber:
    """Attach a zeroth-order growth verdict to a generalised number."""

    net = Net(lambda eps, thetas: np.full(thetas.shape, r(eps)), label=r.label)
    verdict = classify_net(net, grid, j_max=0, q_max=q_max, samples=1)
    return evolve(r, verdict=verdict)


def net_scale(lam: GeneralizedNumber | Scalar, u: Net) -> Net:
    """Pointwise multiple λ_ε·u_ε."""

    number = _as_number(lam)
    derivative: Callable[[], Net] | None = None

    if u.derivative is not None:
        du = u.derivative

        def _derivative() -> Net:
            return net_scale(number, du())

        derivative = _derivative

    return Net(
        lambda eps, thetas: number(eps) * u(eps, thetas),
        label=f"{number.label}*{u.label}",
        comb_truncation=u.comb_truncation,
        derivative=derivative,
        truncation_error=u.truncation_error,
    )


def mudec_operator(
    u: Net, lam: GeneralizedNumber | None = None, *, closed_form: bool = True
) -> Net:
    """Apply (d/dθ + λθ) to a net, with λ_ε = 2/ε unless another number is given."""

    number = lambda_number() if lam is None else lam
    derivative = net_differentiate(u, closed_form=closed_form)
    return net_add(derivative, net_scale(number, net_multiply(coordinate_net(), u)))


def residual_consistency(
    eps: float, *, cutoff: int = 6, step: float = FD_STEP, samples: int = THETA_SAMPLES
) -> float:
    """Agreement between the closed-form residual and the operator applied by differences.

    The maximum deviation is measured relative to the larger of sup|ψ′_ε| and sup|(2/ε)θψ_ε|,
    the magnitudes of the two terms that cancel.
    """

    psi = wrapped_gaussian_net(cutoff)
    thetas = theta_grid(samples)
    numeric = net_differentiate(psi, step=step, closed_form=False)
    slope = lambda_number()(eps) * thetas * psi(eps, thetas)
    applied = numeric(eps, thetas) + slope
    closed = residual_net(cutoff)(eps, thetas)

    derivative = net_differentiate(psi)(eps, thetas)
    scale = max(float(np.max(np.abs(derivative))), float(np.max(np.abs(slope))))
    return float(np.max(np.abs(applied - closed))) / scale


def _embedding_bandwidth(
    F: dist.DistributionSpectrum, eps: float, order: int, tolerance: float
) -> int:
    bandwidth = max(8, math.ceil(2.0 * math.sqrt(math.log(1.0 / tolerance) / eps)))

    while bandwidth <= MAX_EMBEDDING_BANDWIDTH:
        tail = np.arange(bandwidth + 1, 2 * bandwidth + 1, dtype=np.int64)
        n = tail.astype(np.float64)
        weights = np.exp(-eps * n * n / 4.0) * n**order
        magnitudes = np.abs(F.coefficients(tail)) + np.abs(F.coefficients(-tail))
        dropped = float(np.sum(magnitudes * weights))

        if dropped < tolerance:
            return bandwidth

        bandwidth *= 2

    raise ValueError(f"no embedding bandwidth up to {MAX_EMBEDDING_BANDWIDTH} reaches {tolerance}")


def _embedded(F: dist.DistributionSpectrum, order: int, tolerance: float) -> Net:
    def spectrum(eps: float, ns: IndexArray) -> ComplexArray:
        n = ns.astype(np.float64)
        return F.coefficients(ns) * np.exp(-eps * n * n / 4.0) * (1j * n) ** order

    def generator(eps: float, thetas: RealArray) -> ComplexArray:
        bandwidth = _embedding_bandwidth(F, eps, order, tolerance)
        coeffs = CoeffSeq(spectrum(eps, indices(bandwidth)))
        return synthesize(coeffs, thetas)

    label = f"embed({F.label})" if order == 0 else f"d{order}(embed({F.label}))"

    return Net(
        generator,
        label=label,
        derivative=lambda: _embedded(F, order + 1, tolerance),
        spectrum=spectrum,
    )


def embed_distribution(
    F: dist.DistributionSpectrum, *, tolerance: float = EMBEDDING_TOLERANCE
) -> Net:
    """Smoothing embedding of a periodic distribution.

    u_ε has coefficients F_n e^{−εn²/4}, the periodic convolution of F with ψ_ε, synthesized at
    a bandwidth whose dropped tail stays below ``tolerance``.
    """

    if not F.growth.at_least(GrowthTag.SLOW_GROWTH):
        raise ValueError(f"distribution '{F.label}' is not of slow growth")

    return _embedded(F, 0, tolerance)


@frozen(slots=True)
class AssociationResult:
    """Discrepancies d(ε) = |∫ū_ε φ − ⟨F, φ⟩| of one test function.

    :param test_id: Position of the test function in the input list
    :param discrepancies: Pairs (ε, d(ε)) in grid order
    :param order: Fitted slope of log d against log ε, ``inf`` when d vanishes
    :param tolerance: ε_min(1 + max|φ″|)
    :param monotone: Whether d is non-increasing on the grid tail
    :param passed: Monotone and d(ε_min) ≤ tolerance
    """

    test_id: int
    discrepancies: tuple[tuple[float, float], ...]
    order: float
    tolerance: float
    monotone: bool
    passed: bool


@frozen(slots=True)
class AssociationReport:
    label: str
    results: tuple[AssociationResult, ...]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)


def non_increasing(
    values: Sequence[float] | RealArray,
    *,
    rtol: float = MONOTONE_RTOL,
    atol: float = MONOTONE_ATOL,
) -> bool:
    """Whether each value is at most its predecessor, up to the relative and absolute slack."""

    return all(b <= a * (1.0 + rtol) + atol for a, b in zip(values, values[1:]))


def association_check(
    u: Net,
    F: dist.DistributionSpectrum,
    tests: Iterable[CoeffSeq],
    grid: EpsGrid,
    *,
    grid_size: int = 2048,
    rtol: float = MONOTONE_RTOL,
    atol: float = MONOTONE_ATOL,
) -> AssociationReport:
    """Check u ≈ F against band-limited test functions.

    The integral ∫ ū_ε φ dθ is evaluated by the periodic trapezoid on ``grid_size`` nodes so that
    it matches the sesquilinear pairing ⟨F, φ⟩. The discrepancies must not increase over the
    tail half of the grid, up to the slacks ``rtol`` and ``atol``.
    """

    thetas = theta_grid(grid_size)
    values = {eps: np.conj(u(eps, thetas)) for eps in grid}
    eps_array = np.asarray(grid.values)
    results: list[AssociationResult] = []

    for test_id, phi in enumerate(tests):
        samples = evaluate(phi, grid_size).samples
        target = dist.pair(F, phi).value
        step = 2.0 * math.pi / grid_size
        d = np.array([abs(step * np.sum(values[eps] * samples) - target) for eps in grid])

        curvature = float(np.max(np.abs(evaluate(spectral_derivative(phi, 2), grid_size).samples)))
        tolerance = grid.smallest * (1.0 + curvature)
        monotone = non_increasing(d[len(d) // 2 :], rtol=rtol, atol=atol)
        positive = d > 0.0

        if np.count_nonzero(positive) >= 2:
            order = float(np.polyfit(np.log(eps_array[positive]), np.log(d[positive]), 1)[0])
        else:
            order = math.inf

        passed = monotone and bool(d[-1] <= tolerance)
        discrepancies = tuple(zip(grid.values, (float(x) for x in d)))
        results.append(
            AssociationResult(test_id, discrepancies, order, tolerance, monotone, passed)
        )

    return AssociationReport(f"{u.label} ~ {F.label}", tuple(results))


def mudec_certificate(
    cutoff: int = 6,
    grid: EpsGrid = DEFAULT_GRID,
    *,
    j_max: int = 2,
    q_max: int = 8,
    samples: int = THETA_SAMPLES,
) -> GrowthVerdict:
    """Certify that the wrapped Gaussian solves ψ′ + λθψ = 0 in the quotient algebra.

    The residual net is classified over the grid, and its sup norm is compared with
    `residual_bound` at every grid point. The certificate holds iff the verdict is negligible.
    """

    verdict = classify_net(residual_net(cutoff), grid, j_max=j_max, q_max=q_max, samples=samples)

    for eps, sup in verdict.sups(0):
        bound = residual_bound(eps)

        if not sup < bound:
            _logger.warning(f"residual sup {sup:.3e} exceeds its bound {bound:.3e} at eps={eps}")

            if verdict.is_negligible:
                witness = _witness(verdict.per_derivative[0].slope)
                verdict = evolve(verdict, tag=NetTag.MODERATE, witness_q=witness)

    return verdict


def net_from_config(data: Mapping[str, Any]) -> Net:
    """Build a net from ``{"kind": ..., params}``.

    Supported kinds are ``wrapped_gaussian``, ``residual`` (both take ``cutoff``), ``embedded``
    (takes a ``distribution`` in JSON form), ``constant`` (takes ``value``), ``zero`` and
    ``mudec`` (takes a nested ``net`` and an optional ``scale`` of λ_ε = scale/ε).
    """

    kind = data.get("kind")

    if kind == "wrapped_gaussian":
        return wrapped_gaussian_net(int(data.get("cutoff", 6)))

    if kind == "residual":
        return residual_net(int(data.get("cutoff", 6)))

    if kind == "embedded":
        return embed_distribution(dist.from_json(data.get("distribution", {"kind": "dirac"})))

    if kind == "constant":
        return constant_net(complex(data.get("value", 1.0)))

    if kind == "zero":
        return zero_net()

    if kind == "mudec":
        inner = net_from_config(data.get("net", {"kind": "wrapped_gaussian"}))
        return mudec_operator(inner, lambda_number(float(data.get("scale", 2.0))))

    raise ValueError(f"unknown net kind '{kind}'")


__all__ = [
    "DEFAULT_GRID",
    "MONOTONE_ATOL",
    "MONOTONE_RTOL",
    "AssociationReport",
    "AssociationResult",
    "ClassificationError",
    "DerivativeFit",
    "EpsGrid",
    "GeneralizedNumber",
    "GrowthVerdict",
    "Net",
    "NetTag",
    "SupSample",
    "association_check",
    "classify_net",
    "classify_number",
    "constant_net",
    "coordinate_net",
    "embed_distribution",
    "function_net",
    "lambda_number",
    "mudec_certificate",
    "mudec_operator",
    "net_add",
    "net_differentiate",
    "net_from_config",
    "net_multiply",
    "net_scale",
    "net_subtract",
    "non_increasing",
    "residual_bound",
    "residual_consistency",
    "residual_net",
    "wrapped_gaussian_net",
    "zero_net",
]
