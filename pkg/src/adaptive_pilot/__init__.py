"""OFDM link simulator with an adaptive pilot-pattern channel estimator.

The transmitter sounds the channel with block (or comb) pilots.  A receiver
side controller picks how often to sound from the correlation of consecutive
pilot observations and falls back to the densest pattern whenever the measured
BER rises above a threshold.
"""

from .channel import ChannelProfile, ChannelState, MODEL_RHO, model_profile
from .controller import (
    BOUNDARY_SETS,
    BoundarySet,
    PatternController,
    PatternSpec,
    cross_correlation,
    select_pattern,
)
from .estimation import ChannelEstimate, ls_estimate
from .grid import LinkConfig, OfdmGrid, PilotLayout, Role, build_grid, data_rate_fraction

__version__ = "0.1.0"
