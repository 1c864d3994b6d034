"""Two-parameter interpolating atom-field model: JCM, BSM, SM and RLM in one family."""

__version__ = "0.1.0"

from .algebra import (
    InterpolationParams,
    ModelPreset,
    OperatorMatrix,
    a_eigencurve,
    build_operator,
    commutator_residuals,
    hamiltonian_matrices,
    preset,
)
from .dynamics import (
    JointState,
    SmallTimeCoefficients,
    evolve_exact,
    evolve_oracle,
    fidelity,
    small_time_series,
)
from .fock import FieldState, InsufficientCutoffError, coherent_state, fock_state, moment
from .observables import (
    ObservableSeries,
    ParadoxWindow,
    PhotonStatsRecord,
    paradox_window,
    photon_stats,
    series,
    small_time_ordering_check,
)
