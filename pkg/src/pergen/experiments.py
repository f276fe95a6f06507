"""Verification experiments run by the command line front-end.

Each experiment takes a `RunConfig` and returns a `Report` with one record per sweep point. Sweep
points are independent, so they can be evaluated on a thread or process pool; records are sorted
by their inputs before the report is returned, which keeps the output independent of the
evaluation order.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable, Sequence
from logging import NullHandler, getLogger
from typing import Any, TypeVar

import numpy as np
from attrs import evolve
from numpy.random import default_rng
from scipy import integrate

from . import colombeau as cb
from . import distributions as dist
from .operators import (
    BandLimitedState,
    BorelFunction,
    borel_decomposition_pairing,
    commutator_norm,
    ladder,
    weyl_defect,
)
from .options import RunConfig
from .reports import Curve, Report, ReportRecord
from .spectral import (
    SQRT_2PI,
    CoeffSeq,
    SampledFunction,
    coeffs_from_samples,
    evaluate,
    indices,
    inner_product,
    synthesize,
    theta_grid,
    wrap_angle,
)
from .uncertainty import (
    gaussian_state,
    mean_direction,
    mean_J,
    saturation_search,
    shift_state,
    uncertainty_product,
)

_logger = getLogger("pergen.experiments")
_logger.addHandler(NullHandler())

P = TypeVar("P")

SATURATION_VALUE = 0.5


def _timed(func: Callable[[P], ReportRecord]) -> Callable[[P], ReportRecord]:
    def timed(point: P) -> ReportRecord:
        start = time.perf_counter()
        record = func(point)
        return evolve(record, wall_time=time.perf_counter() - start)

    return timed


def _sweep(
    config: RunConfig, func: Callable[[P], ReportRecord], points: Sequence[P]
) -> list[ReportRecord]:
    sweep_pool = config.sweep_pool
    timed = _timed(func)

    _logger.debug(f"Sweeping {len(points)} points of '{config.subcommand}'")

    if sweep_pool is None:
        return [timed(point) for point in points]

    pool = sweep_pool.pool()

    try:
        return list(pool.map(timed, points))
    finally:
        pool.close()
        pool.join()
        pool.clear()


def _seeds(seed: int, count: int) -> list[int]:
    rng = default_rng(seed)
    return [int(value) for value in rng.integers(0, 2**32 - 1, size=count)]


def _random_state(seed: int, bandwidth: int) -> BandLimitedState:
    return BandLimitedState.normalize(CoeffSeq.random(default_rng(seed), bandwidth))


def _finish(report: Report) -> Report:
    report.sort()
    status = "passed" if report.passed else "failed"
    _logger.debug(f"'{report.experiment}' {status} with {len(report.records)} records")
    return report


def wrapped_gaussian_coeffs(config: RunConfig) -> Report:
    """Quadrature coefficients of the wrapped Gaussian against e^{−εk²/4}/√(2π).

    The error is measured relative to the largest exact coefficient.
    """

    tolerance = config.declared_tolerance
    bandwidth = config.bandwidth
    size = config.quadrature or max(1024, 4 * (2 * bandwidth + 1))
    net = cb.wrapped_gaussian_net(config.wrap)
    ks = indices(bandwidth).astype(np.float64)

    def point(eps: float) -> ReportRecord:
        samples = SampledFunction(net(eps, theta_grid(size)))
        measured = coeffs_from_samples(samples, bandwidth).coeffs
        exact = np.exp(-eps * ks * ks / 4.0) / SQRT_2PI
        error = float(np.max(np.abs(measured - exact)))
        relative = error / float(np.max(np.abs(exact)))

        return ReportRecord(
            "coeffs",
            {"eps": eps},
            {"bandwidth": bandwidth, "grid_size": size, "max_error": error, "relative": relative},
            relative <= tolerance,
        )

    report = Report("coeffs", tolerance, _sweep(config, point, list(config.grid)))
    return _finish(report)


def _vanishing_test_function(seed: int, bandwidth: int) -> CoeffSeq:
    # cos(θ/2)^16 is a trigonometric polynomial of degree 8 vanishing to order 16 at ±π
    phi = CoeffSeq.random(default_rng(seed), bandwidth)
    size = 4 * (2 * bandwidth + 17)
    thetas = theta_grid(size)
    weighted = evaluate(phi, size).samples * np.cos(thetas / 2.0) ** 16
    return coeffs_from_samples(SampledFunction(weighted), bandwidth + 8)


def dirac_pairing(config: RunConfig) -> Report:
    """⟨δ_θ, φ⟩ = φ(θ) and the angle eigen-relation ⟨Θδ_θ, φ⟩ = θφ(θ)."""

    tolerance = config.declared_tolerance
    theta_tolerance = config.theta_tolerance
    bandwidth = config.bandwidth
    seeds = _seeds(config.seed, config.trials)
    points = [(theta, trial) for theta in config.theta for trial in range(config.trials)]

    def point(args: tuple[float, int]) -> ReportRecord:
        theta, trial = args
        delta = dist.dirac(theta)
        phi = _vanishing_test_function(seeds[trial], bandwidth)
        value = complex(synthesize(phi, theta))

        pairing_error = abs(dist.pair(delta, phi).value - value)
        applied = dist.apply_theta(delta, phi)
        theta_error = abs(applied.value - theta * value)

        return ReportRecord(
            "pair",
            {"theta": theta, "trial": trial},
            {
                "pairing_error": pairing_error,
                "theta_error": theta_error,
                "reprojection_residual": applied.tail_estimate,
            },
            pairing_error <= tolerance and theta_error <= theta_tolerance,
        )

    return _finish(Report("pair", tolerance, _sweep(config, point, points)))


def dirac_sesquilinear(config: RunConfig) -> Report:
    """⟨δ_θ, δ_θ′⟩_g against δ_(θ′−θ) with the reflection symmetry on a square angle grid."""

    tolerance = config.declared_tolerance
    ks = indices(config.bandwidth)
    angles = [float(theta) for theta in theta_grid(config.theta_count)]
    points = [(a, b) for a in angles for b in angles]

    def point(args: tuple[float, float]) -> ReportRecord:
        a, b = args
        forward = dist.sesquilinear_product(dist.dirac(a), dist.dirac(b))
        backward = dist.sesquilinear_product(dist.dirac(b), dist.dirac(a))
        expected = dist.dirac(b - a).coefficients(ks)

        product_error = float(np.max(np.abs(forward.coefficients(ks) - expected)))
        reflected = dist.reflect(backward).coefficients(ks)
        symmetry_error = float(np.max(np.abs(forward.coefficients(ks) - reflected)))

        return ReportRecord(
            "sesquilinear",
            {"theta": a, "theta_prime": b},
            {"product_error": product_error, "symmetry_error": symmetry_error},
            product_error <= tolerance and symmetry_error <= tolerance,
        )

    return _finish(Report("sesquilinear", tolerance, _sweep(config, point, points)))


def weyl_check(config: RunConfig) -> Report:
    """Defects ‖U_nV_y f − e^{iyn}V_yU_n f‖ over ladder indices, angles and random states."""

    tolerance = config.declared_tolerance
    seeds = _seeds(config.seed, config.trials)
    angles = [float(y) for y in theta_grid(config.y_count)]
    points = [(n, y) for n in range(config.n_max + 1) for y in angles]

    def point(args: tuple[int, float]) -> ReportRecord:
        n, y = args
        defects = []
        commutators = []

        for seed in seeds:
            f = BandLimitedState(CoeffSeq.random(default_rng(seed), config.bandwidth))
            norm = f.norm()
            defects.append(weyl_defect(n, y, f) / norm)
            commutators.append(commutator_norm(n, y, f) / norm)

        worst = max(defects)

        return ReportRecord(
            "weyl-check",
            {"n": n, "y": y},
            {
                "max_relative_defect": worst,
                "commutator": float(np.mean(commutators)),
                "expected_commutator": abs(complex(np.exp(1j * y * n)) - 1.0),
            },
            worst <= tolerance,
        )

    return _finish(Report("weyl-check", tolerance, _sweep(config, point, points)))


def _direct_moment(phi: CoeffSeq, n: int) -> float:
    def density(theta: float) -> float:
        return float(theta**n * abs(complex(synthesize(phi, theta))) ** 2)

    value, _ = integrate.quad(density, -math.pi, math.pi, limit=400, epsabs=1e-12, epsrel=1e-12)
    return float(value)


def _decomposed(fn_name: str, n: int) -> BorelFunction:
    if fn_name == "one":
        return lambda t: np.ones_like(t)

    if fn_name == "theta_power":
        return lambda t: t**n

    return lambda t: np.exp(1j * n * t)


def eigenoperator_decompose(config: RunConfig) -> Report:
    """Borel-function pairings ⟨F_φ, ψ⟩ = ∫ f(θ)φ*(θ)ψ(θ)dθ of random states.

    Every random state contributes one record per decomposed pairing: f ≡ 1 against a second
    state, the angle moments θⁿ and the ladder functions e^{inθ}. The trapezoid value is
    reported; the check applies to the refined value with errors relative to max(1, |reference|).
    References are the inner product, an adaptive quadrature of θⁿ|φ|² and ⟨φ, U_nφ⟩.
    """

    tolerance = config.declared_tolerance
    seeds = _seeds(config.seed, 2 * config.trials)
    moment_max = config.moment_max
    points: list[tuple[str, int, int]] = []

    for trial in range(config.trials):
        points.append(("one", 0, trial))
        points += [("theta_power", n, trial) for n in range(1, moment_max + 1)]
        points += [("ladder", n, trial) for n in range(-moment_max, moment_max + 1)]

    def point(args: tuple[str, int, int]) -> ReportRecord:
        fn_name, n, trial = args
        phi = _random_state(seeds[2 * trial], config.bandwidth)
        psi = phi

        if fn_name == "one":
            psi = _random_state(seeds[2 * trial + 1], config.bandwidth)
            reference = inner_product(phi.coeffs, psi.coeffs)
        elif fn_name == "theta_power":
            reference = complex(_direct_moment(phi.coeffs, n))
        else:
            reference = inner_product(phi.coeffs, ladder(phi, n).coeffs)

        pairing = borel_decomposition_pairing(
            _decomposed(fn_name, n), phi.coeffs, psi.coeffs, config.quadrature
        )
        error = abs(pairing.refined - reference) / max(1.0, abs(reference))

        return ReportRecord(
            "decompose",
            {"fn_name": fn_name, "moment_order": n, "trial": trial},
            {
                "value_re": pairing.value.real,
                "value_im": pairing.value.imag,
                "quadrature_M": pairing.nodes,
                "error_estimate": pairing.error_estimate,
                "relative_error": error,
            },
            error <= tolerance,
        )

    report = Report("decompose", tolerance, _sweep(config, point, points))
    report.summary = {"quadrature_M": report.records[0].outputs["quadrature_M"]}
    return _finish(report)


def _with_cutoff(data: dict[str, Any], cutoff: int) -> dict[str, Any]:
    if data.get("kind") in ("wrapped_gaussian", "residual") and "cutoff" not in data:
        return {**data, "cutoff": cutoff}

    return data


def _log(value: float) -> float:
    return math.log(value) if value > 0.0 else -math.inf


def classify(config: RunConfig) -> Report:
    """Moderate/negligible classification of a net over the ε grid.

    The residual net is additionally compared with its analytic sup bound and with the operator
    applied to the wrapped Gaussian by finite differences. An ``expect`` entry of the net
    description names the verdict to check against; the residual net expects negligibility.
    """

    tolerance = config.declared_tolerance
    grid = config.grid
    description = _with_cutoff(config.net_config, config.wrap)
    is_residual = description.get("kind") == "residual"
    expected = description.get("expect", "negligible" if is_residual else None)

    if is_residual:
        verdict = cb.mudec_certificate(
            int(description["cutoff"]), grid, j_max=config.j_max, q_max=config.q_max
        )
    else:
        net = cb.net_from_config(description)
        verdict = cb.classify_net(net, grid, j_max=config.j_max, q_max=config.q_max)

    records = []

    for sample in verdict.samples:
        bound = cb.residual_bound(sample.eps) if is_residual and sample.order == 0 else math.nan
        passed = math.isnan(bound) or sample.sup <= bound * (1.0 + tolerance)
        records.append(
            ReportRecord(
                "classify-net",
                {"eps": sample.eps, "j": sample.order},
                {"sup_value": sample.sup, "bound_value": bound},
                passed,
            )
        )

    report = Report("classify-net", tolerance, records)
    report.summary = {
        "net": description,
        "verdict": verdict.tag.value,
        "witness_q": verdict.witness_q,
        "slopes": [fit.slope for fit in verdict.per_derivative],
        "thresholds": list(verdict.thresholds),
    }

    if expected is not None:
        report.checks["verdict"] = verdict.tag.value == expected

    sups = verdict.sups(0)
    report.curves.append(Curve("sup", [_log(e) for e, _ in sups], [_log(s) for _, s in sups]))

    if is_residual:
        bounds = [cb.residual_bound(eps) for eps, _ in sups]
        report.curves.append(Curve("bound", [_log(e) for e, _ in sups], [_log(b) for b in bounds]))

        consistency = [
            cb.residual_consistency(eps, cutoff=int(description["cutoff"]))
            for eps in grid
            if eps >= 0.3
        ]
        worst = max(consistency, default=0.0)
        report.summary["residual_consistency"] = worst
        report.checks["residual_consistency"] = worst <= config.consistency_tolerance

    return _finish(report)


def _cosine_test(k: int) -> CoeffSeq:
    return CoeffSeq.from_mapping({k: 1.0, -k: 1.0}) if k else CoeffSeq.basis(0) * 2.0


def associate(config: RunConfig) -> Report:
    """Discrepancies |∫ū_εφ − ⟨F, φ⟩| of a net and a distribution for the tests e_k + e_{−k}.

    Rows at the smallest ε must satisfy d ≤ tolerance·ε_min(1 + max|φ″|); every row of the
    residual net must satisfy d ≤ tolerance·2π·sup-bound(ε).
    """

    tolerance = config.declared_tolerance
    grid = config.grid
    description = _with_cutoff(config.net_config, config.wrap)
    is_residual = description.get("kind") == "residual"
    net = cb.net_from_config(description)
    target = dist.from_json(config.distribution)
    tests = [_cosine_test(k) for k in config.tests]
    size = config.quadrature or 2048

    result = cb.association_check(
        net,
        target,
        tests,
        grid,
        grid_size=size,
        rtol=config.monotone_rtol,
        atol=config.monotone_atol,
    )
    report = Report("associate", tolerance)

    for k, test in zip(config.tests, result.results):
        for eps, discrepancy in test.discrepancies:
            if is_residual:
                bound = 2.0 * math.pi * cb.residual_bound(eps)
                passed = discrepancy <= tolerance * bound
            else:
                bound = test.tolerance if eps == grid.smallest else math.nan
                passed = math.isnan(bound) or discrepancy <= tolerance * bound

            report.records.append(
                ReportRecord(
                    "associate",
                    {"eps": eps, "test_id": k},
                    {"discrepancy": discrepancy, "bound": bound},
                    passed,
                )
            )

        if not is_residual:
            report.checks[f"monotone[{k}]"] = test.monotone

        report.curves.append(
            Curve(f"d[{k}]", [e for e, _ in test.discrepancies], [d for _, d in test.discrepancies])
        )

    report.summary = {
        "label": result.label,
        "orders": {str(k): test.order for k, test in zip(config.tests, result.results)},
        "limits": config.trend_limits,
    }

    return _finish(report)


def min_uncertainty(config: RunConfig) -> Report:
    """Uncertainty products of the wrapped-Gaussian states with a random Schwartz sweep.

    The product must not increase as ε decreases and must lie within ``tolerance``·0.5 of 0.5 at
    the smallest ε; random states must satisfy the Schwartz inequality. The slacks of both trend
    checks come from the configuration and are echoed in the summary.
    """

    tolerance = config.declared_tolerance
    grid = config.grid
    nodes = config.quadrature

    def point(eps: float) -> ReportRecord:
        summary = uncertainty_product(gaussian_state(eps), nodes)

        return ReportRecord(
            "min-uncertainty",
            {"eps": eps},
            {
                "var_theta": summary.var_theta,
                "var_J": summary.var_J,
                "product": summary.product,
                "schwartz_slack": summary.schwartz_slack,
                "circular_variance": summary.circular_variance,
            },
            summary.schwartz_slack >= config.schwartz_floor,
        )

    report = Report("min-uncertainty", tolerance, _sweep(config, point, list(grid)))
    _finish(report)

    # records are sorted by ascending ε
    products = [record.outputs["product"] for record in report.records]
    smallest = products[0]
    rows = saturation_search(config.bandwidth, config.trials, config.seed, nodes)

    report.checks["non_increasing"] = cb.non_increasing(
        products[::-1], rtol=config.monotone_rtol, atol=config.monotone_atol
    )
    report.checks["saturation"] = (
        abs(smallest - SATURATION_VALUE) <= tolerance * SATURATION_VALUE
    )
    report.checks["schwartz"] = all(row.schwartz_slack >= config.schwartz_floor for row in rows)
    report.summary = {
        "smallest_eps_product": smallest,
        "random_min_product": min(row.product for row in rows),
        "random_min_saturation_ratio": min(row.saturation_ratio for row in rows),
        "random_min_slack": min(row.schwartz_slack for row in rows),
        "limits": config.trend_limits,
    }

    eps_values = [record.inputs["eps"] for record in report.records]
    report.curves.append(Curve("product", eps_values, products))
    report.curves.append(Curve("reference", eps_values, [SATURATION_VALUE] * len(eps_values)))

    return report


def shift_check(config: RunConfig) -> Report:
    """Mean direction and mean angular momentum of the shifted wrapped-Gaussian states."""

    tolerance = config.declared_tolerance
    points = [(eps, angle, momentum) for eps in config.grid for angle, momentum in config.shifts]

    def point(args: tuple[float, float, int]) -> ReportRecord:
        eps, angle, momentum = args
        psi = shift_state(gaussian_state(eps), angle, momentum)
        direction_error = abs(wrap_angle(mean_direction(psi) - angle))
        momentum_error = abs(mean_J(psi) - momentum)

        return ReportRecord(
            "shift-check",
            {"eps": eps, "angle": angle, "momentum": momentum},
            {"direction_error": direction_error, "momentum_error": momentum_error},
            direction_error <= tolerance and momentum_error <= config.momentum_tolerance,
        )

    return _finish(Report("shift-check", tolerance, _sweep(config, point, points)))


EXPERIMENTS: dict[str, Callable[[RunConfig], Report]] = {
    "coeffs": wrapped_gaussian_coeffs,
    "pair": dirac_pairing,
    "sesquilinear": dirac_sesquilinear,
    "weyl-check": weyl_check,
    "decompose": eigenoperator_decompose,
    "classify-net": classify,
    "associate": associate,
    "min-uncertainty": min_uncertainty,
    "shift-check": shift_check,
}


def run_experiment(config: RunConfig) -> Report:
    """Run the experiment named by ``config.subcommand``."""

    _logger.debug(f"Beginning '{config.subcommand}' with seed {config.seed}")
    return EXPERIMENTS[config.subcommand](config)


__all__ = ["EXPERIMENTS", "run_experiment"]
