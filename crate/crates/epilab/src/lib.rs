//! epilab: a numerical laboratory for entropy-power, Fisher-information and
//! MMSE inequalities.
//!
//! The crate provides exact-density distribution specifications ([`dist`]),
//! information functionals ([`functionals`]), additive Gaussian-noise channel
//! quantities ([`channel`]), smoothing-path identities and integral
//! representations of entropy ([`paths`]), a suite of classical information
//! inequalities with slack reporting ([`ineq`]), and generalized-EPI
//! extensions ([`ext`]). The `epilab` binary drives everything from JSON
//! experiment configs.

pub mod channel;
pub mod config;
pub mod dist;
pub mod error;
pub mod ext;
pub mod functionals;
pub mod ineq;
pub mod linalg;
pub mod numerics;
pub mod paths;
pub mod report;
pub mod special;
pub mod sumdist;

pub use dist::{Dist, RngSeed};
pub use error::{Error, Result};
pub use numerics::{Method, NumericResult};
