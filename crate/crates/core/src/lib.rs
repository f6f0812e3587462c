//! Left-invariant Riemannian and almost-Hermitian geometry on low-dimensional
//! Lie algebras, with exact rational arithmetic as the default.

pub mod catalog;
pub mod curvature;
pub mod error;
pub mod hermitian;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod sampling;
pub mod scalar;
pub mod scan;
pub mod scenarios;

pub use error::{Error, Result};
pub use scalar::{Field, Float, Mode, Q};
