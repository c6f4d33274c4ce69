//! Finite-population sampling designs and estimators, with every closed-form
//! moment checked by exhaustive enumeration and by a seeded Monte Carlo
//! harness.
//!
//! The central identity is the finite population correction: sampling `n`
//! units without replacement from `N` multiplies the with-replacement
//! (co)variances by `1 - (n-1)/(N-1)`. It governs class counts
//! ([`distributions`]), the SRS sample mean, the Hansen-Hurvitz estimator
//! viewed as SRS from an extended population, and the adaptive cluster
//! sampling estimator viewed as SRS from a flattened population.

pub mod config;
pub mod designs;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod population;
pub mod rng;
pub mod verify;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

/// Whether drawn units are returned to the population before the next draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Replacement {
    With,
    Without,
}
