//! Two-species exclusion processes built from quantum group symmetry.
//!
//! The exact layer works over Laurent polynomials in q with rational
//! coefficients; the same generic code runs over `f64`/`f32` at a numeric q.

pub mod central;
pub mod config;
pub mod duality;
pub mod error;
pub mod groundstate;
pub mod linalg;
pub mod markov;
pub mod qpoly;
pub mod repkit;
pub mod scalar;
pub mod sim;

pub use config::Configuration;
pub use error::{Error, Result};
pub use linalg::Operator;
pub use qpoly::{LaurentPoly, RatFunc, Rational};
pub use repkit::{fundamental_rep, Algebra, Generator, SiteRep};
pub use scalar::{AtQ, Deformation, Scalar, Symbolic};

pub type ExactOperator = Operator<LaurentPoly>;
pub type FloatOperator = Operator<f64>;
pub type ExactSiteRep = SiteRep<LaurentPoly>;
pub type FloatSiteRep = SiteRep<f64>;
