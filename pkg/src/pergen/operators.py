"""
Kinematic operators of the planar rotator acting on band-limited states.

The angular momentum J, the Hamiltonian H = J²/2I, the rotation group V_y = e^{−iyJ} and the
ladder group U_n = e^{inΘ} act diagonally or by index shifts on the coefficients. Anything built
from the angle operator Θ goes through point-space quadrature: spectral measures E(B), the
eigenoperator pairings ⟨Π(θ)φ, ψ⟩ = φ*(θ)ψ(θ) and Borel-function decompositions.

Examples
--------

.. code-block:: python

    import math
    from pergen import operators as ops
    from pergen.spectral import CoeffSeq

    f = ops.BandLimitedState(CoeffSeq.basis(0))
    assert ops.weyl_defect(3, math.pi / 5, f) < 1e-12
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from logging import NullHandler, getLogger
from typing import TYPE_CHECKING, Any

import numpy as np
from attrs import field, frozen
from numpy.typing import ArrayLike
from scipy import integrate

from .spectral import (
    CoeffSeq,
    ComplexArray,
    RealArray,
    SampledFunction,
    coeffs_from_samples,
    evaluate,
    inner_product,
    synthesize,
    theta_grid,
)

if TYPE_CHECKING:
    from attrs import Attribute
    from typing_extensions import TypeAlias

    AnyAttr: TypeAlias = Attribute[Any]

_logger = getLogger("pergen.operators")
_logger.addHandler(NullHandler())

BorelFunction = Callable[[RealArray], ArrayLike]

DEFAULT_BOREL_NODES = 2**14

#: Relative agreement of the halved trapezoid at which the quadrature counts as converged
CONVERGED = 1e-14


class DomainError(ValueError):
    """Raised when an operator parameter lies outside of its domain."""


class QuadratureError(ValueError):
    """Raised when a quadrature cannot be carried out on the requested nodes."""


@frozen(eq=False)
class BandLimitedState:
    """A band-limited vector of L²(T).

    :param coeffs: The Fourier coefficients
    :param normalized: Whether the state is asserted to have unit norm
    """

    coeffs: CoeffSeq
    normalized: bool = field(default=False, kw_only=True)

    @normalized.validator
    def _normalized(self, _: AnyAttr, normalized: bool) -> None:
        if normalized and abs(inner_product(self.coeffs, self.coeffs).real - 1.0) > 1e-10:
            raise ValueError("state flagged as normalized does not have unit norm")

    @classmethod
    def normalize(cls, coeffs: CoeffSeq) -> BandLimitedState:
        norm = coeffs.norm()

        if norm == 0.0:
            raise ValueError("cannot normalize the zero state")

        return cls(coeffs * (1.0 / norm), normalized=True)

    @property
    def bandwidth(self) -> int:
        return self.coeffs.bandwidth

    def norm(self) -> float:
        return self.coeffs.norm()


def _map(f: BandLimitedState, coeffs: ComplexArray, *, unitary: bool = False) -> BandLimitedState:
    return BandLimitedState(CoeffSeq(coeffs), normalized=f.normalized and unitary)


def angular_momentum(f: BandLimitedState) -> BandLimitedState:
    """J f, with coefficients k·f_k."""

    return _map(f, f.coeffs.indices * f.coeffs.coeffs)


def hamiltonian(f: BandLimitedState, inertia: float) -> BandLimitedState:
    """H f = J²f / 2I with ħ = 1.

    :raises DomainError: If the moment of inertia is not positive
    """

    if not inertia > 0.0:
        raise DomainError(f"moment of inertia must be positive, got {inertia}")

    ks = f.coeffs.indices
    return _map(f, ks * ks * f.coeffs.coeffs / (2.0 * inertia))


def rotate(f: BandLimitedState, y: float) -> BandLimitedState:
    """V_y f = f(· − y), with coefficients e^{−iyk} f_k."""

    phases = np.exp(-1j * y * f.coeffs.indices)
    return _map(f, phases * f.coeffs.coeffs, unitary=True)


def ladder(f: BandLimitedState, n: int) -> BandLimitedState:
    """U_n f = e^{inθ} f; the coefficient of e_k becomes the old coefficient of e_{k−n}.

    The bandwidth grows by |n| so no coefficient is lost.
    """

    old = f.coeffs.coeffs
    shift = abs(n)
    shifted = np.zeros(old.size + 2 * shift, dtype=np.complex128)
    start = n + shift
    shifted[start : start + old.size] = old
    return _map(f, shifted, unitary=True)


def _distance(a: BandLimitedState, b: BandLimitedState) -> float:
    return (a.coeffs - b.coeffs).norm()


def weyl_defect(n: int, y: float, f: BandLimitedState) -> float:
    """‖U_nV_y f − e^{iyn} V_yU_n f‖, which vanishes by the Weyl relation."""

    lhs = ladder(rotate(f, y), n)
    rhs = rotate(ladder(f, n), y)
    phased = BandLimitedState(rhs.coeffs * complex(np.exp(1j * y * n)))
    return _distance(lhs, phased)


def commutator_norm(n: int, y: float, f: BandLimitedState) -> float:
    """‖U_nV_y f − V_yU_n f‖, equal to |e^{iyn} − 1|·‖f‖ for every state."""

    return _distance(ladder(rotate(f, y), n), rotate(ladder(f, n), y))


def _to_intervals(intervals: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    return tuple(sorted((float(a), float(b)) for a, b in intervals))


@frozen(slots=True)
class BorelSet:
    """A finite union of disjoint half-open intervals [a, b) ⊂ [−π, π).

    :param intervals: The interval endpoints, sorted on construction
    """

    intervals: tuple[tuple[float, float], ...] = field(factory=tuple, converter=_to_intervals)

    @intervals.validator
    def _intervals(self, _: AnyAttr, intervals: tuple[tuple[float, float], ...]) -> None:
        for a, b in intervals:
            if not -math.pi <= a < b <= math.pi:
                raise DomainError(f"interval [{a}, {b}) must be non-empty and lie in [-pi, pi)")

        for previous, current in zip(intervals, intervals[1:]):
            if current[0] < previous[1]:
                raise DomainError("intervals must be pairwise disjoint")

    @classmethod
    def circle(cls) -> BorelSet:
        return cls([(-math.pi, math.pi)])

    def indicator(self, thetas: ArrayLike) -> RealArray:
        """Indicator of the set with jump discontinuities averaged to 1/2.

        The endpoint π is identified with −π.
        """

        points = np.asarray(thetas, dtype=np.float64)
        values = np.zeros_like(points)

        for a, b in self.intervals:
            values += np.where((points > a) & (points < b), 1.0, 0.0)
            values += np.where(points == a, 0.5, 0.0)
            values += np.where(points == b, 0.5, 0.0)

            if b == math.pi:
                values += np.where(points == -math.pi, 0.5, 0.0)

        return values


@frozen(slots=True)
class Projection:
    """Result of applying a spectral measure E(B).

    :param state: The re-projected state
    :param norm_sq: ‖I_B f‖² computed by quadrature in point space
    :param defect: Difference between ``norm_sq`` and the squared norm of ``state``
    """

    state: BandLimitedState
    norm_sq: float
    defect: float


def _next_power_of_two(value: int) -> int:
    return 1 << max(0, (value - 1).bit_length())


def spectral_measure(
    f: BandLimitedState,
    borel_set: BorelSet,
    *,
    bandwidth: int | None = None,
    grid_size: int | None = None,
) -> Projection:
    """E(B) f = I_B f, multiplied in point space and re-projected.

    Idempotence only holds as the bandwidth grows; the projection defect is reported with the
    result.

    :param f: The state
    :param borel_set: The set B
    :param bandwidth: Output bandwidth, defaults to the bandwidth of ``f``
    :param grid_size: Quadrature grid size, defaults to a power of two ≥ 8(N+1)
    :returns: The projected state with its point-space norm and defect
    """

    n_out = f.bandwidth if bandwidth is None else bandwidth
    if grid_size is None:
        grid_size = _next_power_of_two(8 * (max(n_out, f.bandwidth) + 1))

    size = grid_size
    indicator = borel_set.indicator(theta_grid(size))
    samples = evaluate(f.coeffs, size).samples
    masked = indicator * samples

    # I_B² = I_B, so the jump-averaged indicator is the quadrature weight
    state = BandLimitedState(coeffs_from_samples(SampledFunction(masked), n_out))
    norm_sq = float(2.0 * math.pi / size * np.sum(indicator * np.abs(samples) ** 2))
    defect = norm_sq - state.norm() ** 2

    _logger.debug(f"spectral measure: grid={size}, bandwidth={n_out}, defect={defect:.3e}")

    return Projection(state, norm_sq, defect)


def projector_pairing(theta: float, phi: CoeffSeq, psi: CoeffSeq) -> complex:
    """⟨Π(θ)φ, ψ⟩ = φ*(θ)ψ(θ)."""

    return complex(np.conj(synthesize(phi, theta)) * synthesize(psi, theta))


def unit_resolution(phi: CoeffSeq, psi: CoeffSeq, grid_size: int | None = None) -> complex:
    """Periodic trapezoid of ∫⟨Π(θ)φ, ψ⟩dθ, which reproduces (φ, ψ).

    :param grid_size: Number of nodes, defaults to 4N for bandwidth-N inputs
    """

    n = max(phi.bandwidth, psi.bandwidth, 1)
    size = 4 * n if grid_size is None else grid_size
    a = evaluate(phi, size).samples
    b = evaluate(psi, size).samples
    return complex(2.0 * math.pi / size * np.sum(np.conj(a) * b))


@frozen(slots=True)
class BorelPairing:
    """Quadrature of ⟨F_φ, ψ⟩ = ∫ f(θ)φ*(θ)ψ(θ)dθ over [−π, π].

    :param value: Trapezoid value on the M+1 closed nodes
    :param refined: Romberg value when M is a power of two, Richardson value when M is even,
        ``value`` when M is odd or the trapezoid has converged
    :param error_estimate: Distance of the trapezoid from the refined value, ``nan`` for odd M
    :param order: Observed algebraic order of the trapezoid, ``inf`` when spectrally converged,
        ``nan`` when M is not a multiple of 4
    :param nodes: The number of intervals M
    """

    value: complex
    refined: complex
    error_estimate: float
    order: float
    nodes: int


def _observed_order(t1: complex, t2: complex, t4: complex, scale: float) -> float:
    d1 = abs(t2 - t1)
    d2 = abs(t4 - t2)
    floor = CONVERGED * max(scale, 1.0)

    if d1 <= floor or d2 <= floor:
        return math.inf

    return math.log2(d2 / d1)


def _is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


def borel_decomposition_pairing(
    fn: BorelFunction,
    phi: CoeffSeq,
    psi: CoeffSeq,
    nodes: int | None = None,
) -> BorelPairing:
    """Trapezoid quadrature of ∫ f(θ)φ*(θ)ψ(θ)dθ on the closed grid of M+1 nodes over [−π, π].

    ``fn`` must accept an array of angles. The trapezoid is spectrally accurate when ``fn`` is
    smooth and periodic; otherwise its error is algebraic, and the observed order and an error
    estimate from the halved grids are reported with the value.

    :param fn: Bounded Borel function of the angle
    :param phi: Conjugated state
    :param psi: Linear state
    :param nodes: Number of intervals M ≥ 2, defaults to a power of two
    :raises QuadratureError: If M < 2 or ``fn`` is not finite on the nodes
    """

    size = max(DEFAULT_BOREL_NODES, _next_power_of_two(16 * (phi.bandwidth + psi.bandwidth + 1)))
    size = size if nodes is None else nodes

    if size < 2:
        raise QuadratureError(f"quadrature size must be at least 2, got {size}")

    thetas = np.append(theta_grid(size), math.pi)
    values = np.broadcast_to(np.asarray(fn(thetas), dtype=np.complex128), thetas.shape)

    if not np.all(np.isfinite(values)):
        bad = thetas[~np.isfinite(values)][0]
        raise QuadratureError(f"integrand is not finite at theta={bad}")

    a = evaluate(phi, size).samples
    b = evaluate(psi, size).samples
    density = np.conj(a) * b
    integrand = values * np.append(density, density[0])

    step = 2.0 * math.pi / size
    value = complex(integrate.trapezoid(integrand, dx=step))
    refined, error, order = value, math.nan, math.nan

    if size % 2 == 0:
        coarse = complex(integrate.trapezoid(integrand[::2], dx=2.0 * step))
        error = abs(value - coarse)

        if error > CONVERGED * max(abs(value), 1.0):
            if _is_power_of_two(size):
                refined = complex(integrate.romb(integrand, dx=step))
            else:
                refined = (4.0 * value - coarse) / 3.0

            error = abs(refined - value)

        if size % 4 == 0:
            coarsest = complex(integrate.trapezoid(integrand[::4], dx=4.0 * step))
            order = _observed_order(value, coarse, coarsest, abs(value))

    _logger.debug(f"borel pairing: M={size}, error={error:.3e}, order={order:.3g}")

    return BorelPairing(value, refined, error, order, size)


__all__ = [
    "BandLimitedState",
    "BorelPairing",
    "BorelSet",
    "DomainError",
    "Projection",
    "QuadratureError",
    "angular_momentum",
    "borel_decomposition_pairing",
    "commutator_norm",
    "hamiltonian",
    "ladder",
    "projector_pairing",
    "rotate",
    "spectral_measure",
    "unit_resolution",
    "weyl_defect",
]
