"""Discrete-time quantum walk on a line with a non-Markovian dephasing coin."""

from .channel import KrausPair, StepSchedule, dephase, frozen, kraus_pair, schedule
from .correlations import (
    CorrelationRecord,
    DiscordOptions,
    MeasurementBasis,
    correlation_trajectory,
    discord,
    measured_state,
    mid,
    mutual_information,
    von_neumann_entropy,
)
from .kernel import (
    DecoherenceFunction,
    KernelParams,
    correlation_function,
    kappa_closed_form,
    kappa_volterra,
    rates,
)
from .momentum import (
    BlochVector,
    build_mk,
    first_moment_exact,
    longtime_first_moment,
    longtime_variance,
    second_moment_exact,
)
from .walk import (
    JointState,
    PositionDistribution,
    WalkConfig,
    classical_rw_distribution,
    evolve,
    iter_evolve,
    position_distribution,
    step,
)

__version__ = "0.1.0"
