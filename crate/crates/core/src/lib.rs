//! Confluent hypergeometric W-function f(α, β, γ, δ; z) and its building
//! blocks: the complex gamma family, generalized hypergeometric series,
//! MacRobert E-functions, Kampé de Fériet and Appell F2 double series, the
//! identities they satisfy, and closed forms for a family of definite
//! integrals with an independent quadrature oracle.

pub mod doubleseries;
pub mod error;
pub mod fixtures;
pub mod hyperseries;
pub mod identities;
pub mod integrals;
pub mod macrobert;
pub mod numerics;
pub mod parallel;
pub mod quadrature;
pub mod sampling;
pub mod wfunction;

pub use error::{Error, Result};
pub use hyperseries::{ParamList, SeriesControl};
pub use numerics::{Complex, EvalResult};
pub use parallel::Execution;
