"""Security-reliability tradeoff analysis for a macro/small-cell network
sharing spectrum in the presence of a common eavesdropper."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    ALL_SCHEMES, BASELINE, ChannelDraw, RatePair, Scheme, SystemConfig, sample_draw, validate,
)
from .analytic import SrtPoint, point  # noqa: E402
from .montecarlo import EstimatedPoint, ProbEstimate, estimate_curve, estimate_point  # noqa: E402

__all__ = [
    "ALL_SCHEMES", "BASELINE", "ChannelDraw", "RatePair", "Scheme", "SystemConfig",
    "sample_draw", "validate", "SrtPoint", "point", "EstimatedPoint", "ProbEstimate",
    "estimate_curve", "estimate_point",
]
