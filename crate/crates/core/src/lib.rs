//! Invariant coordinate selection (ICS) and projection pursuit (PP) for
//! finding clustering directions in two-group normal mixtures.
//!
//! The crate is organised around five pieces:
//!
//! - [`model`]: the two-group mixture `x = α s e₁ + ε`, its moments, the
//!   "total" standardization and seeded sampling.
//! - [`spread1d`]: univariate spreads used by PP (variance, kurtosis-based
//!   spread, t₂ M-estimate, lshorth, truncated variance).
//! - [`scatter`]: the multivariate counterparts (var, kmat, t2, mve, mcd),
//!   each with a free or a fixed location.
//! - [`icspp`]: the ICS generalized eigenproblem, the PP criterion, angle
//!   sweeps and local refinement, and the `ICS:scat1:scat2[:mean]` naming.
//! - [`population`]: closed-form population criteria for the mixture and the
//!   limiting constrained MVE, with an independent numeric oracle.
//!
//! Every scatter and spread estimator accepts a [`Location`]: either
//! [`Location::Free`] (the estimator's own implicit location) or
//! [`Location::Fixed`] (a location imposed from outside, typically the sample
//! mean). Using the same fixed location for both scatters of a method is what
//! the `:mean` suffix denotes.

pub mod error;
pub mod icspp;
mod linalg;
pub mod model;
pub mod population;
pub mod scatter;
pub mod seed;
pub mod spread1d;

pub use error::{IcsError, Result};
pub use icspp::{
    clustering_direction, ics_decompose, kappa_ics, kappa_pp, pp_refine, pp_sweep2d, Budget,
    CriterionCurve, IcsResult, LocationPolicy, MethodSpec, Mode, ScatterKind,
};
pub use model::{
    derive_standardized, population_moments, sample_mixture, standardize_data, Coords,
    DataMatrix, MixtureParams, StandardizedParams,
};
pub use scatter::{ScatterEstimate, Search};
pub use spread1d::SpreadEstimate;

pub use nalgebra;

/// Where an estimator takes its location from.
#[derive(Debug, Clone, PartialEq)]
pub enum Location<T> {
    /// The estimator's own implicit location (mean, shorth, mcd centre, ...).
    Free,
    /// A location supplied by the caller.
    Fixed(T),
}

impl<T> Location<T> {
    pub fn is_fixed(&self) -> bool {
        matches!(self, Location::Fixed(_))
    }
}

/// Half-sample size used by every half-sample estimator: `⌈n/2⌉`.
pub fn half_size(n: usize) -> usize {
    n.div_ceil(2)
}
