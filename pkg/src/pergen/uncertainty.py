"""
Circular statistics and the angle/angular-momentum uncertainty product.

The angle variance is the interval variance ∫θ²|ψ|² on [−π, π] of a state whose mean direction
has been rotated to 0; the angular momentum variance is Σk²|ψ_k|² of a state with zero mean
angular momentum. Both are combined into ΔΘ·ΔJ together with the two sides of the Schwartz
inequality (ΔΘ)²(ΔJ)² ≥ |(ψ, ΘJψ)|².

Examples
--------

.. code-block:: python

    from pergen import uncertainty

    psi = uncertainty.gaussian_state(0.05)
    report = uncertainty.uncertainty_product(psi)

    assert abs(report.product - 0.5) < 1e-6
"""

from __future__ import annotations

import math
import warnings
from logging import NullHandler, getLogger

import numpy as np
from attrs import frozen

from .operators import (
    BandLimitedState,
    DomainError,
    angular_momentum,
    borel_decomposition_pairing,
    ladder,
    rotate,
)
from .spectral import SQRT_2PI, CoeffSeq, evaluate, indices, theta_grid

_logger = getLogger("pergen.uncertainty")
_logger.addHandler(NullHandler())

CENTER_TOLERANCE = 1e-6
DIRECTION_FLOOR = 1e-12
INTEGER_TOLERANCE = 1e-8


class UndefinedDirectionError(ValueError):
    """Raised when the angular density has no preferred direction."""


class NotCenteredError(ValueError):
    """Raised when a variance is requested for a state whose mean is not at zero."""


def _require_normalized(psi: BandLimitedState) -> None:
    if not psi.normalized and abs(psi.norm() - 1.0) > 1e-10:
        raise ValueError("state must be normalized")


def gaussian_state(eps: float, bandwidth: int | None = None) -> BandLimitedState:
    """L²-normalised wrapped Gaussian ψ_ε, truncated where e^{−εN²/4} < 1e−17.

    :param eps: Width parameter in (0, 1]
    :param bandwidth: Explicit truncation N
    """

    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")

    if bandwidth is None:
        bandwidth = math.ceil(2.0 * math.sqrt(17.0 * math.log(10.0) / eps))

    ks = indices(bandwidth).astype(np.float64)
    coeffs = CoeffSeq(np.exp(-eps * ks * ks / 4.0) / SQRT_2PI)
    return BandLimitedState.normalize(coeffs)


def _resultant(psi: BandLimitedState, nodes: int | None) -> complex:
    size = 4 * (psi.bandwidth + 1) if nodes is None else nodes
    density = np.abs(evaluate(psi.coeffs, size).samples) ** 2
    return complex(2.0 * math.pi / size * np.sum(np.exp(1j * theta_grid(size)) * density))


def mean_direction(psi: BandLimitedState, nodes: int | None = None) -> float:
    """Θ̄ = arg ∫ e^{iθ}|ψ(θ)|² dθ in [−π, π).

    :raises UndefinedDirectionError: If the resultant length is at most 1e−12
    """

    _require_normalized(psi)
    resultant = _resultant(psi, nodes)

    if abs(resultant) <= DIRECTION_FLOOR:
        raise UndefinedDirectionError(
            f"mean direction is undefined, resultant length {abs(resultant):.3e}"
        )

    angle = math.atan2(resultant.imag, resultant.real)
    return -math.pi if angle >= math.pi else angle


def circular_variance(psi: BandLimitedState, nodes: int | None = None) -> float:
    """1 − |∫ e^{iθ}|ψ|² dθ|."""

    _require_normalized(psi)
    return 1.0 - abs(_resultant(psi, nodes))


def mean_J(psi: BandLimitedState) -> float:
    """Mean angular momentum Σ k|ψ_k|²."""

    _require_normalized(psi)
    weights = np.abs(psi.coeffs.coeffs) ** 2
    return float(np.sum(psi.coeffs.indices * weights))


def _second_moment_theta(psi: BandLimitedState, nodes: int | None) -> float:
    pairing = borel_decomposition_pairing(lambda t: t * t, psi.coeffs, psi.coeffs, nodes)
    return pairing.refined.real


def _second_moment_J(psi: BandLimitedState) -> float:
    ks = psi.coeffs.indices
    return float(np.sum(ks * ks * np.abs(psi.coeffs.coeffs) ** 2))


def variance_theta(psi: BandLimitedState, nodes: int | None = None) -> float:
    """Interval variance ∫θ²|ψ|² of a state centered at angle 0.

    States without a defined mean direction (uniform densities) are accepted as centered.

    :raises NotCenteredError: If the mean direction is further than 1e−6 from 0
    """

    try:
        direction = mean_direction(psi, nodes)
    except UndefinedDirectionError:
        direction = 0.0

    if abs(direction) > CENTER_TOLERANCE:
        raise NotCenteredError(
            f"mean direction is {direction:.6g}, rotate the state by its negative first"
        )

    return _second_moment_theta(psi, nodes)


def variance_J(psi: BandLimitedState) -> float:
    """Σ k²|ψ_k|² of a state with zero mean angular momentum.

    :raises NotCenteredError: If the mean angular momentum is further than 1e−6 from 0
    """

    momentum = mean_J(psi)

    if abs(momentum) > CENTER_TOLERANCE:
        raise NotCenteredError(
            f"mean angular momentum is {momentum:.6g}, apply the ladder shift by its negative first"
        )

    return _second_moment_J(psi)


@frozen(slots=True)
class UncertaintyReport:
    """Uncertainty measures of a normalized state.

    :param mean_theta: Mean direction, NaN when undefined
    :param mean_J: Mean angular momentum
    :param var_theta: Angle variance
    :param var_J: Angular momentum variance
    :param product: ΔΘ·ΔJ
    :param schwartz_lhs: (ΔΘ)²(ΔJ)²
    :param schwartz_rhs: |(ψ, ΘJψ)|²
    :param circular_variance: 1 − |I|, for reference only
    """

    mean_theta: float
    mean_J: float
    var_theta: float
    var_J: float
    product: float
    schwartz_lhs: float
    schwartz_rhs: float
    circular_variance: float

    @property
    def schwartz_slack(self) -> float:
        return self.schwartz_lhs - self.schwartz_rhs

    @property
    def saturation_ratio(self) -> float:
        """lhs/rhs of the Schwartz inequality, 1 for saturating states."""

        if self.schwartz_rhs == 0.0:
            return math.inf

        return self.schwartz_lhs / self.schwartz_rhs


def uncertainty_product(
    psi: BandLimitedState, nodes: int | None = None, *, centered: bool = True
) -> UncertaintyReport:
    """Full uncertainty report of a normalized state.

    With ``centered`` the variance preconditions apply; otherwise second moments about zero are
    used, for which the Schwartz inequality holds for every state.

    :param psi: Normalized state
    :param nodes: Quadrature size of the angle integrals
    :param centered: Whether to require zero means
    """

    _require_normalized(psi)

    try:
        theta_bar = mean_direction(psi)
    except UndefinedDirectionError:
        theta_bar = math.nan

    if centered:
        var_theta = variance_theta(psi, nodes)
        var_j = variance_J(psi)
    else:
        var_theta = _second_moment_theta(psi, nodes)
        var_j = _second_moment_J(psi)

    j_psi = angular_momentum(psi)
    cross = borel_decomposition_pairing(lambda t: t, psi.coeffs, j_psi.coeffs, nodes).refined
    lhs = var_theta * var_j

    return UncertaintyReport(
        mean_theta=theta_bar,
        mean_J=mean_J(psi),
        var_theta=var_theta,
        var_J=var_j,
        product=math.sqrt(max(lhs, 0.0)),
        schwartz_lhs=lhs,
        schwartz_rhs=abs(cross) ** 2,
        circular_variance=circular_variance(psi),
    )


def _as_integer(momentum: float) -> int:
    nearest = round(momentum)

    if abs(momentum - nearest) > INTEGER_TOLERANCE:
        raise DomainError(f"angular momentum shift must be an integer, got {momentum}")

    return int(nearest)


def shift_state(psi: BandLimitedState, angle: float, momentum: float) -> BandLimitedState:
    """ψ_{Θ̄,J̄} = e^{iJ̄θ} V_Θ̄ ψ.

    :raises DomainError: If J̄ is not an integer
    """

    return ladder(rotate(psi, angle), _as_integer(momentum))


def recenter(psi: BandLimitedState) -> BandLimitedState:
    """Rotate the mean direction to 0 and remove the nearest integer of the mean angular momentum.

    A warning is issued when the mean angular momentum is not an integer, in which case only the
    integer part of the shift can be removed.
    """

    try:
        angle = mean_direction(psi)
    except UndefinedDirectionError:
        angle = 0.0

    momentum = mean_J(psi)
    shift = round(momentum)

    if abs(momentum - shift) > INTEGER_TOLERANCE:
        message = f"mean angular momentum {momentum:.6g} is not an integer, shifting by {shift}"
        _logger.warning(message)
        warnings.warn(message, stacklevel=2)

    return rotate(ladder(psi, -shift), -angle)


@frozen(slots=True)
class SaturationRow:
    trial: int
    product: float
    saturation_ratio: float
    schwartz_slack: float


def saturation_search(
    bandwidth: int, trials: int, seed: int, nodes: int | None = None
) -> list[SaturationRow]:
    """Uncertainty products of random normalized states of a fixed bandwidth.

    Second moments about zero are used, so no state is rejected for a nonzero mean.
    """

    rng = np.random.default_rng(seed)
    rows: list[SaturationRow] = []

    for trial in range(trials):
        psi = BandLimitedState.normalize(CoeffSeq.random(rng, bandwidth))
        report = uncertainty_product(psi, nodes, centered=False)
        rows.append(
            SaturationRow(trial, report.product, report.saturation_ratio, report.schwartz_slack)
        )

    _logger.debug(f"saturation search over {trials} states of bandwidth {bandwidth}")
    return rows


__all__ = [
    "NotCenteredError",
    "SaturationRow",
    "UncertaintyReport",
    "UndefinedDirectionError",
    "circular_variance",
    "gaussian_state",
    "mean_J",
    "mean_direction",
    "recenter",
    "saturation_search",
    "shift_state",
    "uncertainty_product",
    "variance_J",
    "variance_theta",
]
