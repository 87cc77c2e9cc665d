from .parameters import SystemConfig, DerivedQuantities, derive, damping_rate, validate, config_hash
from .noise import NoiseBudget, budget, budgets, csl_diffusion, csl_gas_parity_rate
from .dynamics import (
    LinearModel,
    CovarianceMatrix,
    StabilityReport,
    build_model,
    is_stable,
    solve_lyapunov,
    integrate_lyapunov,
)
from .entanglement import (
    MechanicalState,
    mechanical_block,
    partial_transpose,
    symplectic_eigen_min,
    log_negativity,
)
from .sweep import (
    SweepSpec,
    SweepResult,
    DiscriminatorReport,
    make_grid,
    default_omega_grid,
    run_sweep,
    relative_difference,
    slope_sign_discriminator,
)
from .scaling import ScalingFit, scaling_check, scaling_suite, csl_radius_maximum

__all__ = [
    'SystemConfig', 'DerivedQuantities', 'derive', 'damping_rate', 'validate', 'config_hash',
    'NoiseBudget', 'budget', 'budgets', 'csl_diffusion', 'csl_gas_parity_rate',
    'LinearModel', 'CovarianceMatrix', 'StabilityReport',
    'build_model', 'is_stable', 'solve_lyapunov', 'integrate_lyapunov',
    'MechanicalState', 'mechanical_block', 'partial_transpose', 'symplectic_eigen_min', 'log_negativity',
    'SweepSpec', 'SweepResult', 'DiscriminatorReport', 'make_grid', 'default_omega_grid',
    'run_sweep', 'relative_difference', 'slope_sign_discriminator',
    'ScalingFit', 'scaling_check', 'scaling_suite', 'csl_radius_maximum',
]
