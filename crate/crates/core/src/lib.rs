//! Numerical validators relating discrete and continuous ergodic averages.

pub mod averaging;
pub mod density;
pub mod dynamics;
pub mod geometry;
pub mod runner;
pub mod values;
pub mod sampling;
pub mod transfer;
