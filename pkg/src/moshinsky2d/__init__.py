"""Exact natural-orbital decomposition of the 2D harmonium (Moshinsky) 1-RDM."""

from .errors import ConvergenceError, DomainError, ResourceLimitError
from .model import (
    AsymptoticEstimates,
    DerivedParams,
    OccupancyTable,
    SystemParams,
    asymptotic_eta,
    asymptotic_estimates,
    asymptotic_k_eta,
    beta,
    build_occupancy_table,
    collective_occupancy,
    condensate_deficit_large_n,
    cutoffs_for_tail,
    derive_params,
    occupancy,
    participation_collective,
    participation_fragment,
    participation_total,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticEstimates",
    "ConvergenceError",
    "DerivedParams",
    "DomainError",
    "OccupancyTable",
    "ResourceLimitError",
    "SystemParams",
    "asymptotic_eta",
    "asymptotic_estimates",
    "asymptotic_k_eta",
    "beta",
    "build_occupancy_table",
    "collective_occupancy",
    "condensate_deficit_large_n",
    "cutoffs_for_tail",
    "derive_params",
    "occupancy",
    "participation_collective",
    "participation_fragment",
    "participation_total",
]
