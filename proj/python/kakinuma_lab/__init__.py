from ._core import (
    BelowNoiseFloor,
    CavitationError,
    ConfigError,
    ConstraintViolation,
    ExpansionSpec,
    Grid,
    KakinumaError,
    NonZeroMean,
    Params,
    SolverSingular,
    StepRejected,
    default_delta_sweep,
    dispersion,
    hamiltonian_full,
    hamiltonian_kakinuma,
    order_fit,
    prepare_initial_data,
    residual_r1_flat,
    simulate,
    stability,
    validate_params,
)

__all__ = [name for name in dir() if not name.startswith("_")]
