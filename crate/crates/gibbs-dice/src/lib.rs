//! Face-probability modeling for cuboidal and general dice.
//!
//! A die resting in state `i` holds its center of gravity at height `h_i`;
//! normalizing those heights to a reference length gives dimensionless
//! energies `E_i`, and the face probabilities are modeled by the
//! one-parameter Gibbs distribution `p_i(β) ∝ exp(−β·E_i)`. The crate
//! provides
//!
//! - geometry-to-energy conversion for cuboids, xxy-cuboids (two equal side
//!   lengths) and arbitrary dice ([`geometry`]),
//! - the Gibbs model and the classical solid-angle baseline ([`gibbs`],
//!   [`simpson`]),
//! - maximum-likelihood fitting of `β`, per die or jointly for a family of
//!   xxy-cuboids ([`estimation`]),
//! - Pearson chi-square goodness of fit and a parametric bootstrap that
//!   accounts for manufacturing tolerances on the side lengths
//!   ([`validation`]),
//! - bundled tossing datasets and a text file format ([`datasets`]),
//! - a scatter/model-curve SVG emitter ([`plot`]).
//!
//! The `gibbs-dice` binary exposes all of this on the command line.

pub mod datasets;
pub mod error;
pub mod estimation;
pub mod geometry;
pub mod gibbs;
pub mod plot;
pub mod report;
pub mod simpson;
pub mod validation;

pub use error::{Error, Result};
pub use estimation::{
    fit_beta, fit_beta_global, fit_beta_global_with, global_neg_log_likelihood,
    global_neg_log_likelihood_with, neg_log_likelihood, FitOptions, FitResult, TossCounts,
    XxyObservation,
};
pub use geometry::{
    cuboid_energies, general_energies, xxy_energy_pair, CuboidSpec, EnergyNormalization,
    EnergyVector, GeneralDieSpec,
};
pub use gibbs::{gibbs_probabilities, xxy_pxx, xxy_pxx_with, ProbabilityVector};
pub use simpson::{rectangle_solid_angle, simpson_probabilities, total_solid_angle};
pub use validation::{
    bootstrap_constant_beta, chi_square_full, chi_square_xxy, chi_square_xxy_with,
    simulate_binomial, simulate_multinomial, substream, BootstrapConfig, BootstrapResult,
    GofResult, Verdict,
};
