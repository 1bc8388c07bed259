"""Koopman eigenvalues, eigenfunctions and POD from time series.

Pipeline: simulate or ingest a scalar time series, delay-embed it into
Hankel matrices, run one of four DMD variants (companion, SVD-enhanced,
exact, Hankel) or ergodic POD on the embedded data, then convert the
eigenvalues to frequencies and compare against frequency lattices.
"""

__version__ = "0.1.0"

from . import analysis, dmd, embed, linalg, pod, systems
from .errors import (
    ConfigError,
    DecompositionError,
    IntegrationError,
    KoopdmdError,
    NumericalError,
    RankDeficiencyError,
)

__all__ = [
    "__version__",
    "analysis",
    "dmd",
    "embed",
    "linalg",
    "pod",
    "systems",
    "ConfigError",
    "DecompositionError",
    "IntegrationError",
    "KoopdmdError",
    "NumericalError",
    "RankDeficiencyError",
]
