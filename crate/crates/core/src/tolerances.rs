//! Every default used by the pipelines, in one place. Reports echo the
//! table they were produced with.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative residual allowed for `T(ab) - T(b g(a))`.
    pub twisted_trace: f64,
    /// Relative residual allowed for the functional equation of `w`.
    pub quasiperiodicity: f64,
    /// Agreement between sampled moments and the linear-system oracle.
    pub oracle_agreement: f64,
    /// Singular values below `nullspace * sigma_max` count as null directions.
    pub nullspace: f64,
    /// Pivot threshold of the Gram test, relative to `trace / size`.
    pub gram: f64,
    /// Circle positivity threshold, relative to `max |f|`.
    pub circle: f64,
    /// Minimum distance of a pole orbit from a sampling circle.
    pub pole_circle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            twisted_trace: 1e-8,
            quasiperiodicity: 1e-9,
            oracle_agreement: 1e-7,
            nullspace: 1e-8,
            gram: 1e-10,
            circle: 1e-8,
            pole_circle: 1e-6,
        }
    }
}
