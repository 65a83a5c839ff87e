"""k-NN plug-in estimation of nonlinear density functionals.

Split the sample into reference and evaluation parts, estimate the density
at the evaluation points from the references by k-NN with boundary
correction, and average a function of the density: Shannon and Renyi
entropy, mutual information, intrinsic dimension, and factor-graph
cross-entropy tests, with bias-correction factors, MSE-optimal tuning, and
CLT confidence intervals.
"""

from .boundary import BoundaryConfig, BoundaryLabels, detect_boundary, q_threshold
from .data import (
    AnalyticDensity,
    Dataset,
    SampleSplit,
    beta_uniform_mixture_density,
    load_csv,
    sample_beta_uniform_mixture,
    sample_block_beta_mixture,
    sample_projected_manifold,
    split,
    true_functional,
    uniform_density,
)
from .density import corrected_density, knn_density, uniform_kernel_density
from .dimension import DimensionEstimate, anomaly_scan, estimate_dimension, log_length
from .functionals import (
    EstimateReport,
    Functional,
    bpi_estimate,
    bpi_estimate_bc,
    custom_functional,
    digamma,
    log_gamma,
    mutual_information,
    renyi_entropy,
    renyi_functional,
    shannon_functional,
)
from .inference import (
    TrialSpec,
    TrialResults,
    confidence_interval,
    monte_carlo,
    normality_diagnostics,
    rate_fit,
)
from .knn import (
    NeighborIndex,
    NeighborResult,
    ball_volume,
    brute_force_knn,
    build_index,
    count_reverse_neighbors,
    knn_query,
    knn_radii,
    unit_ball_volume,
)
from .structure import Factorization, ModelComparison, compare_models, dimension_vector
from .tuning import (
    TheoryConstants,
    constants_empirical,
    constants_oracle,
    optimal_k,
    predict_bias_variance,
    rate_matched_k,
)

__version__ = "0.1.0"
