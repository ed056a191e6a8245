"""Mixed-fractal traffic synthesis, scaling analysis and crossover detection."""

__version__ = "0.1.0"

from .aggregation import ScaleLadder, aggregate, dyadic_ladder
from .crossover import (
    CrossoverPrediction,
    CrossoverReport,
    SegmentedFit,
    crossover_report,
    fit_segmented,
    mixture_curve,
    predict_crossover_cumulant,
    predict_crossover_wavelet,
)
from .cumulants import (
    CumulantScalingTable,
    FractalFitReport,
    cumulant_scan,
    fit_linear_fractal,
    fit_unifractal,
    fractal_fit_report,
    sample_cumulant,
)
from .diagram import ScalingDiagram
from .errors import *  # noqa: F401,F403
from .synthesis import (
    FlowSpec,
    HurstComponent,
    TraceSeries,
    compose_mixture,
    cumulate,
    difference,
    fgn_autocovariance,
    synthesize_fgn,
)
from .wavelet import OctaveVariance, dwt, dwt_detail_variances, hurst_from_slope, logscale_diagram
