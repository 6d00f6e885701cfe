//! Gamma-ratio bivariate beta distributions on the unit square and two
//! applications: grid-posterior inference for the sensitivity and
//! specificity of a screening test, and survivability of two-component
//! systems with dependent component propensities.

pub mod closure;
pub mod density;
pub mod error;
pub mod family;
pub mod inference;
pub mod output;
pub mod quad;
pub mod rng;
pub mod sampling;
pub mod special;
pub mod survivability;
pub mod synth;

pub use closure::{closure_check, compare_laws, ClosureReport};
pub use density::{density_grid, ol_minus_pdf, ol_plus_pdf, ol_star_pdf, DensityGrid, OlDensity};
pub use error::{Error, Result};
pub use family::{AlphaVector, FamilySpec, Variant, Which};
pub use inference::{
    joint_posterior, log_likelihood, marginal_posterior, pi_posterior, posterior_summary,
    predictive_propensity, predictive_values, DiagnosticData, GridPosterior, PriorSpec,
};
pub use rng::RngState;
pub use sampling::{estimate_moments, gamma_sample, sample_pair, MomentEstimate};
pub use special::{beta2_pdf, beta_pdf, beta_pdf_split, log_gamma, std_normal_cdf, BetaParams};
pub use survivability::{
    reproduce_table, survivability, MonteCarlo, Propensities, SurvivabilityReport,
    SurvivabilityScenario, System,
};
pub use synth::{generate, naive_estimates, true_params, SynthConfig};
