//! Exact computational homological algebra over Q[z, eps]/(z^nz, eps^neps):
//! complexes with curvature, twists, cones, homotopy equivalences in three
//! strengths, and the perturbation machinery that transfers twisted
//! differentials across them.  Every identity is checked in exact rational
//! arithmetic; there are no tolerances anywhere.

pub mod bundle;
pub mod complex;
pub mod error;
pub mod filtered;
pub mod generate;
pub mod homology;
pub mod homotopy;
pub mod ideal;
pub mod map;
pub mod matrix;
pub mod module;
pub mod perturb;
pub mod report;
pub mod scalar;
mod serial;

pub use complex::{
    cone, direct_sum, hom_diff, is_closed, null_homotopy_witness, twist, Cone, CurvedComplex,
};
pub use error::{Error, Result};
pub use map::{theta, theta_inv, GradedMap};
pub use matrix::Mat;
pub use module::{GradedModule, SumDecomp};
pub use report::{Check, Report};
pub use scalar::{Ctx, Rat, Scalar};
