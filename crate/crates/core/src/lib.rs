//! Exact explicit-formula bounds for curves over finite fields.

pub mod bounds;
pub mod cli;
pub mod cosine_poly;
pub mod datasets;
pub mod error;
pub mod exactnum;
pub mod family;
pub mod optimizer;
pub mod poly;
pub mod reproduce;
pub mod theta_sets;
pub mod zeta;

pub use bounds::{BoundCertificate, Regime};
pub use cosine_poly::CosinePoly;
pub use error::{Error, Result};
pub use exactnum::QField;
pub use poly::PowerPoly;
pub use theta_sets::ThetaSet;
pub use zeta::WeilPoly;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/exact-numbers.md")]
    pub struct ExactNumbers;
    #[doc = include_str!("../../../book/src/cosine-polynomials.md")]
    pub struct CosinePolynomials;
    #[doc = include_str!("../../../book/src/angle-sets.md")]
    pub struct AngleSets;
    #[doc = include_str!("../../../book/src/zeta.md")]
    pub struct Zeta;
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub struct Bounds;
    #[doc = include_str!("../../../book/src/family.md")]
    pub struct Family;
    #[doc = include_str!("../../../book/src/optimizer.md")]
    pub struct Optimizer;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
