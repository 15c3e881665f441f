//! Independent numerical checks of the closed forms: direct quadrature of
//! the characteristic function, finite-difference residuals of the evolution
//! equations, adaptive integration of the guidance equation and spectral
//! propagation of the wavefunction.

mod characteristic;
mod ode;
mod propagator;
mod residual;

pub use characteristic::{
    characteristic_modular, momentum_first_moment_richardson, momentum_first_moment_translated, richardson_derivative,
    CharacteristicFunction, DerivativeEstimate, OracleValue, Source,
};
pub use ode::{trajectory_ode_oracle, OdeOptions};
pub use propagator::{
    grid_propagator, propagator_box, propagator_convergence, ConvergenceRow, PropagatedState, PropagatorGrid,
};
pub use residual::{
    cl_residual_of, heisenberg_rhs_check, pde_residual, pde_residual_with, schrodinger_residual_of, ResidualOptions,
    ResidualReport, SamplePoint,
};
