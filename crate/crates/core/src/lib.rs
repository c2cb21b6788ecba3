//! Finite-exchangeability calculus for frequency-mimicking predictive
//! distributions.
//!
//! The crate is `no_std` (it needs `alloc`). Mass functions are kept in
//! natural-log space so sequence lengths of order `10^5` stay exact to
//! working precision.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod calculus;
pub mod completions;
pub mod error;
pub mod exch;
pub mod limits;
pub mod quadrature;
pub mod special;

pub use calculus::{
    concurrency_check, extend_assertion, forced_extension, fm_line_system, implied_reductions,
    interior_mass, line_for_conditional, theorem1_bound, theorem1_mass, theorem2_sum_bound_check,
    verify_theorem3, Concurrency, ConditionalLine, ExtensionScenario, InteriorMass, LineTriple,
};
pub use completions::{
    build_predictive, completion_value, quartic_coefficients, Completion, CompletionKind,
    monotone_quartic, quartic_side, EndPolynomial, PanAssertion, Side,
};
pub use error::{Error, Result};
pub use exch::{
    density_histogram, invert_to_mass, mass_to_predictive, reduce_mass_one, reduce_mass_to,
    reduce_predictive, roundtrip_check, DensityHistogram, MassFunction, PredictiveVector,
};
pub use limits::{
    compare_to_limit, fm_window, incomplete_beta_density, incomplete_beta_mixture_mass,
    mixture_log_weights, IncompleteBetaParams, DEFAULT_MARGIN_FRACTION,
};
pub use special::harmonic_sum;
