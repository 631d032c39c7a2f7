//! Exact conditional tests for contingency tables driven by lattice bases.
//!
//! A toric model is described by an integer configuration matrix `A`; tables
//! sharing the sufficient statistic `t = A x` form a fiber, and the exact
//! conditional law on a fiber is hypergeometric. Instead of a Markov basis
//! (hard to compute), this crate samples the fiber with a Metropolis–Hastings
//! chain whose proposals are random integer combinations of a *lattice basis*
//! of `ker_Z A`. Because every integer combination is proposed with positive
//! probability, every fiber is connected.
//!
//! The pieces, bottom up:
//!
//! - [`intkernel`]: exact integer linear algebra (Hermite normal form, rank,
//!   kernel lattice bases, integer-combination solving).
//! - [`configurations`]: builders for the independence, Lawrence,
//!   no-three-factor interaction, Poisson regression and logistic regression
//!   configurations, plus lattice-basis lifting.
//! - [`movegen`]: randomized proposal moves (Poisson or geometric
//!   coefficient magnitudes with fair signs).
//! - [`sampler`]: the Metropolis–Hastings walk on a fiber.
//! - [`inference`]: maximum likelihood fitting, likelihood-ratio statistics,
//!   chi-square reference law, p-values and chain diagnostics.
//! - [`oracle`]: brute-force fiber enumeration and exact laws for small cases.
//! - [`textfmt`]: the plain-text file formats shared by the CLI.
//! - [`cli`]: the command-line front end used by the `lattice-mcmc` binary.
//!
//! ```
//! use lattice_mcmc::configurations::{no_three_factor_config, no_three_factor_lattice_basis, LiftStyle};
//!
//! let config = no_three_factor_config(3, 3, 3).unwrap();
//! let basis = no_three_factor_lattice_basis(3, 3, 3, LiftStyle::LastSlicePivot).unwrap();
//! assert_eq!(basis.len(), 8);
//! assert!(basis.moves().iter().all(|m| config.matrix.annihilates(m.as_slice()).unwrap()));
//! ```

pub mod cli;
pub mod configurations;
mod error;
pub mod inference;
pub mod intkernel;
pub mod movegen;
pub mod oracle;
pub mod sampler;
pub mod textfmt;

pub use error::{Error, Result};
