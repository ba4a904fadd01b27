"""Quantum Fisher information of a two-level detector on stationary accelerated worldlines."""
from .dynamics import BlochState, DetectorConfig, bloch_da, bloch_dtheta, bloch_state, density_matrix
from .fisher import (
    ApproxFormula,
    QfiMethod,
    QfiResult,
    circular_crossover_bbar,
    qfi_acceleration,
    qfi_approx,
    qfi_asymptotic_a,
    qfi_from_bloch,
    qfi_spectral,
    qfi_theta,
)
from .response import (
    KossakowskiPair,
    NonConvergence,
    QuadratureOptions,
    Regime,
    ResponseValue,
    kossakowski,
    response,
    response_approx,
    response_closed,
    response_derivative_a,
    response_numeric,
)
from .trajectory import TrajectoryKind, TrajectoryParams, classify, helix_aux, worldline

__version__ = "0.1.0"
