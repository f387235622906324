"""Precision bounds for two-parameter magnetometry with thermal spin states.

The package computes quantum and classical Fisher information matrices for
the joint estimation of a field's orientation and intensity from a spin in
thermal equilibrium, models an imperfectly aligned measurement reference as a
Gaussian-averaged rotation channel, and compares simultaneous against
independent estimation precision.
"""

__version__ = "0.1.0"

from .coarsen import (
    BlochVector,
    CoarseningModel,
    bloch_vector,
    coarsen_axis,
    coarsened_family,
    dephase_z,
    gamma,
)
from .errors import (
    CapacityError,
    ConfigError,
    DomainError,
    SingularityError,
    SpinmetError,
    UnsupportedSpinError,
    ValidationError,
)
from .fisher import (
    FisherMatrix,
    ParamChart,
    SldOperator,
    coarsened_qfi_closed_form,
    coarsened_qfi_spectral,
    crbound_general,
    independent_precision,
    multiparam_rank_check,
    physical_alpha,
    qfi_bloch,
    qfi_coarsened_analytic,
    qfi_spectral,
    simultaneous_precision,
    simultaneous_precision_z_closed_form,
    sld_analytic,
    sld_spectral,
    thermal_qfi_diagonal,
    weak_commutativity,
)
from .measurement import (
    MleResult,
    OutcomeDistribution,
    OutcomeHistogram,
    Povm,
    cfi_matrix,
    mle_fit,
    povm_probability_family,
    probabilities,
    qubit_probability_family,
    sample_outcomes,
    standard_povm,
)
from .spincore import (
    FieldParams,
    Moments,
    SpinSystem,
    ThermalSpinState,
    moments,
    rotation_y,
    spin_operators,
    thermal_state,
    thermal_state_derivatives,
)

__all__ = [
    "__version__",
    "BlochVector",
    "CapacityError",
    "CoarseningModel",
    "ConfigError",
    "DomainError",
    "FieldParams",
    "FisherMatrix",
    "MleResult",
    "Moments",
    "OutcomeDistribution",
    "OutcomeHistogram",
    "ParamChart",
    "Povm",
    "SingularityError",
    "SldOperator",
    "SpinSystem",
    "SpinmetError",
    "ThermalSpinState",
    "UnsupportedSpinError",
    "ValidationError",
    "bloch_vector",
    "cfi_matrix",
    "coarsen_axis",
    "coarsened_family",
    "coarsened_qfi_closed_form",
    "coarsened_qfi_spectral",
    "crbound_general",
    "dephase_z",
    "gamma",
    "independent_precision",
    "mle_fit",
    "moments",
    "multiparam_rank_check",
    "physical_alpha",
    "povm_probability_family",
    "probabilities",
    "qfi_bloch",
    "qfi_coarsened_analytic",
    "qfi_spectral",
    "qubit_probability_family",
    "rotation_y",
    "sample_outcomes",
    "simultaneous_precision",
    "simultaneous_precision_z_closed_form",
    "sld_analytic",
    "sld_spectral",
    "spin_operators",
    "standard_povm",
    "thermal_qfi_diagonal",
    "thermal_state",
    "thermal_state_derivatives",
    "weak_commutativity",
]
