"""Nonparametric change-point detection via copula-entropy two-sample tests.

The pipeline: rank-transform the data to its empirical copula, estimate
copula entropy with a k-nearest-neighbor entropy estimator, compare the
two sides of every candidate split with the entropy-difference statistic,
and segment the series at argmax splits that clear a threshold.
"""

from .dataio import (
    DetectionReport,
    TimeSeries,
    build_report,
    nile,
    read_csv,
    read_report,
    write_report,
)
from .detector import (
    ChangePoint,
    DetectorConfig,
    Segmentation,
    TestProfile,
    detect_multiple,
    detect_single,
    profile,
)
from .entropy import (
    EntropyEstimate,
    PseudoObservations,
    copula_entropy,
    knn_entropy,
    kth_neighbor_distances,
    rank_transform,
)
from .simulate import (
    SegmentSpec,
    SimulationSpec,
    gen_multivariate_case,
    gen_univariate_case,
    sample_frank_copula,
    sample_gaussian_copula,
    simulate,
)
from .plot import render_svg
from .two_sample import TestStatistic, build_labels, tce, tce_mi

__version__ = "0.1.0"

__all__ = [
    "ChangePoint",
    "DetectionReport",
    "DetectorConfig",
    "EntropyEstimate",
    "PseudoObservations",
    "SegmentSpec",
    "Segmentation",
    "SimulationSpec",
    "TestProfile",
    "TestStatistic",
    "TimeSeries",
    "build_labels",
    "build_report",
    "copula_entropy",
    "detect_multiple",
    "detect_single",
    "gen_multivariate_case",
    "gen_univariate_case",
    "knn_entropy",
    "kth_neighbor_distances",
    "nile",
    "profile",
    "rank_transform",
    "render_svg",
    "read_csv",
    "read_report",
    "sample_frank_copula",
    "sample_gaussian_copula",
    "simulate",
    "tce",
    "tce_mi",
    "write_report",
    "__version__",
]
