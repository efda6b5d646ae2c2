"""Energy/delay trade-off toolkit for a UAV two-way amplify-and-forward relay."""

from .ber import CascadeStats, optimal_ber, optimal_snr
from .channel import ChannelParams, NodePowers, SnrPair
from .energy import UNBOUNDED, AllocationFactors
from .geometry import LinkGeometry, PolarPosition, hop_distances
from .kernels import BACKEND
from .optimizer import (
    OptimalAllocation,
    WeightVector,
    closed_form_allocation,
    numerical_allocation,
    scalarized_objective,
    tradeoff_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationFactors",
    "BACKEND",
    "CascadeStats",
    "ChannelParams",
    "LinkGeometry",
    "NodePowers",
    "OptimalAllocation",
    "PolarPosition",
    "SnrPair",
    "UNBOUNDED",
    "WeightVector",
    "closed_form_allocation",
    "hop_distances",
    "numerical_allocation",
    "optimal_ber",
    "optimal_snr",
    "scalarized_objective",
    "tradeoff_sweep",
]
