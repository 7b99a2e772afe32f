//! Exact reductions, depths and resultant functions of rational maps over
//! `Q(t)`, viewed as a model of a non-archimedean field, together with a
//! floating-point sampler for the equilibrium measures of complex
//! specializations.

pub mod berkspace;
pub mod crucial;
pub mod degeneration;
pub mod equidist;
pub mod error;
pub mod parse;
pub mod redux;
pub mod respoly;
pub mod scalars;

pub use error::{Error, Result};
