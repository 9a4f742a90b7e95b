//! Coverage analysis of RIS-aided mm-wave street networks with correlated
//! blockage, and a Monte Carlo simulator to check it against.
//!
//! Distances are in metres and powers are normalized by the BS transmit
//! power. Thresholds are linear unless a name ends in `_db`.

pub mod blockage;
pub mod coverage;
pub mod exec;
pub mod interference;
pub mod model;
pub mod quadrature;
pub mod simulate;
