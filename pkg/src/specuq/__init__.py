"""Uncertainty quantification for spectral bi-clustering under data corruption.

The library treats the cluster assignment obtained from corrupted copies of a
reference data set as a random closed set and estimates its coverage
function, expected misclustering rate, Vorob'ev expectation, oriented
distance expectation and spectral expectation by Monte Carlo sampling.
Clusterings computed on differently sized corrupted sets are compared on the
reference set through an out-of-sample eigenfunction extension.
"""

from .corruption import CorruptionConfig, RegenerationSource, corrupt, sample_stream
from .datasets import (
    GeneratorSpec,
    gen_half_circles,
    gen_point_in_circle,
    load_csv,
    make_dataset,
    make_regeneration_source,
    pca_project,
)
from .errors import (
    CSVParseError,
    DataError,
    DegenerateDataError,
    EigenvalueOneError,
    EmptySampleError,
    InvalidConfigError,
    InvalidInputError,
    InvalidSimilarityError,
    NoSamplesError,
    NumericError,
    SpecUQError,
)
from .estimators import (
    Accumulator,
    ClusterSample,
    ExpectationReport,
    accumulate,
    coverage,
    finalize,
    kovyazin_mean,
    odf_expectation,
    odf_values,
    spectral_expectation,
)
from .experiment import (
    ExperimentConfig,
    ExperimentOutput,
    RunResult,
    emit,
    load_config,
    run_experiment,
)
from .kernel import (
    DataSet,
    LaplacianBundle,
    SimilarityConfig,
    gaussian_similarity,
    laplacian,
    mst_sigma,
    resolve_sigma,
    similarity_matrix,
)
from .spectral import (
    ExtendedEigenfunction,
    FiedlerPair,
    GaugeContext,
    bi_cluster,
    cluster_reference_under_sample,
    extend,
    fiedler_pair,
    gauge_sign,
)

__version__ = "0.1.0"

__all__ = [
    "Accumulator",
    "CSVParseError",
    "ClusterSample",
    "CorruptionConfig",
    "DataError",
    "DataSet",
    "DegenerateDataError",
    "EigenvalueOneError",
    "EmptySampleError",
    "ExpectationReport",
    "ExperimentConfig",
    "ExperimentOutput",
    "ExtendedEigenfunction",
    "FiedlerPair",
    "GaugeContext",
    "GeneratorSpec",
    "InvalidConfigError",
    "InvalidInputError",
    "InvalidSimilarityError",
    "LaplacianBundle",
    "NoSamplesError",
    "NumericError",
    "RegenerationSource",
    "RunResult",
    "SimilarityConfig",
    "SpecUQError",
    "accumulate",
    "bi_cluster",
    "cluster_reference_under_sample",
    "corrupt",
    "coverage",
    "emit",
    "extend",
    "fiedler_pair",
    "finalize",
    "gauge_sign",
    "gaussian_similarity",
    "gen_half_circles",
    "gen_point_in_circle",
    "kovyazin_mean",
    "laplacian",
    "load_config",
    "load_csv",
    "make_dataset",
    "make_regeneration_source",
    "mst_sigma",
    "odf_expectation",
    "odf_values",
    "pca_project",
    "resolve_sigma",
    "run_experiment",
    "sample_stream",
    "similarity_matrix",
    "spectral_expectation",
]
