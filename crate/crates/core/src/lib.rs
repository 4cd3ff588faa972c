//! Phase field modelling of high-cycle fatigue.
//!
//! * [`material`]: elasticity, degradation and crack functions, energy splits.
//! * [`fatigue`]: fatigue degradation and accumulation rules.
//! * [`homogeneous`]: semi-analytical cycle solver for a uniaxial bar.

pub mod error;
pub mod fem;
pub mod fatigue;
pub mod homogeneous;
pub mod material;
pub mod study;

pub use error::{Error, Result};
