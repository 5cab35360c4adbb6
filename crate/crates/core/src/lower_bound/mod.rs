//! Lower-bound machinery: problematic vertices, greedy-type strategies and
//! the density ODEs with their closed forms.

pub mod closed_form;
pub mod ode;
pub mod strategies;
pub mod types;

pub use closed_form::{
    delta_grid, delta_star, eps1, eps2, eps_final, min_degree_baseline, tau, xi, DeltaRow,
};
pub use ode::{
    integrate_destroy_problematic, integrate_min_degree_system, integrate_problematic_system,
    x111_closed_form, MinDegreeLeg, MinDegreeMove, MinDegreeResult, OdeState, DEFAULT_STEP,
};
pub use strategies::{first_phase_len, FDelta, Greedy};
pub use types::{classify_definitional, TypeClass, TypeTracker};
