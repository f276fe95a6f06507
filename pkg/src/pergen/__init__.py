from .colombeau import (
    EpsGrid,
    GeneralizedNumber,
    GrowthVerdict,
    Net,
    NetTag,
    association_check,
    classify_net,
    embed_distribution,
    mudec_certificate,
    residual_bound,
    residual_net,
    wrapped_gaussian_net,
)
from .distributions import DistributionSpectrum, apply_theta, dirac, pair, sesquilinear_product
from .operators import (
    BandLimitedState,
    BorelSet,
    borel_decomposition_pairing,
    ladder,
    rotate,
    spectral_measure,
    weyl_defect,
)
from .options import RunConfig
from .reports import Report, ReportRecord, emit_plot_data, write_report
from .spectral import CoeffSeq, SampledFunction, classify_growth, coeffs_from_samples, evaluate
from .uncertainty import gaussian_state, mean_direction, uncertainty_product

__all__ = [
    "BandLimitedState",
    "BorelSet",
    "CoeffSeq",
    "DistributionSpectrum",
    "EpsGrid",
    "GeneralizedNumber",
    "GrowthVerdict",
    "Net",
    "NetTag",
    "Report",
    "ReportRecord",
    "RunConfig",
    "SampledFunction",
    "apply_theta",
    "association_check",
    "borel_decomposition_pairing",
    "classify_growth",
    "classify_net",
    "coeffs_from_samples",
    "dirac",
    "embed_distribution",
    "emit_plot_data",
    "evaluate",
    "gaussian_state",
    "ladder",
    "mean_direction",
    "mudec_certificate",
    "pair",
    "residual_bound",
    "residual_net",
    "rotate",
    "sesquilinear_product",
    "spectral_measure",
    "uncertainty_product",
    "weyl_defect",
    "wrapped_gaussian_net",
    "write_report",
]
