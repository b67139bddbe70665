//! Exact evolution of lattice laws under cooperative motion.

mod constants;
mod counterexample;
mod scheme;
mod step_law;

pub use constants::{
    f_map, g_func, lipschitz_threshold, monotone_region_bound, p_star, relaxation_bound, RelaxationBound,
};
pub use counterexample::{find_monotonicity_violation, OrderingViolation, ViolationOrigin, VIOLATION_SLACK};
pub use scheme::{
    binomial_tail, evolve, evolve_l_of_m, evolve_path, step_cdf, step_general, step_l_of_m, step_law_pmf, step_pmf,
    CdfDecrease, SchemeMesh, SchemeStep, MONOTONE_SLACK,
};
pub use step_law::StepLaw;
