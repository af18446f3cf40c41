"""Gaussian graphical model selection with risk-optimal unbiased edge tests."""

__version__ = "0.1.0"

from .beta import BetaParams, beta_cdf, beta_quantile
from .covariance import (
    CovarianceMatrix,
    DimensionError,
    MalformedInputError,
    PartialCorrelationMatrix,
    SampleMatrix,
    SingularCovarianceError,
    partial_correlations,
    precision,
    read_csv,
    sample_covariance,
    sample_partial_correlations,
)
from .edgetest import EdgeTestConfig, edge_test, make_config
from .graph import AdjacencyGraph, ErrorCount, LossSpec, alpha_from_losses, count_errors, loss
from .selection import (
    FisherZ,
    OptimalUnbiased,
    Procedure,
    SelectionResult,
    make_procedure,
    select_fisher_z,
    select_ou,
    select_with_alpha,
)
from .simulation import (
    GroundTruthModel,
    ReplicationFailureError,
    RiskReport,
    compare_procedures,
    estimate_risk,
    generate_model,
    sample_gaussian,
    stream_generator,
    summary_csv,
)

__all__ = [
    "AdjacencyGraph",
    "BetaParams",
    "CovarianceMatrix",
    "DimensionError",
    "EdgeTestConfig",
    "ErrorCount",
    "FisherZ",
    "GroundTruthModel",
    "LossSpec",
    "MalformedInputError",
    "OptimalUnbiased",
    "PartialCorrelationMatrix",
    "Procedure",
    "ReplicationFailureError",
    "RiskReport",
    "SampleMatrix",
    "SelectionResult",
    "SingularCovarianceError",
    "alpha_from_losses",
    "beta_cdf",
    "beta_quantile",
    "compare_procedures",
    "count_errors",
    "edge_test",
    "estimate_risk",
    "generate_model",
    "loss",
    "make_config",
    "make_procedure",
    "partial_correlations",
    "precision",
    "read_csv",
    "sample_covariance",
    "sample_gaussian",
    "sample_partial_correlations",
    "select_fisher_z",
    "select_ou",
    "select_with_alpha",
    "stream_generator",
    "summary_csv",
]
