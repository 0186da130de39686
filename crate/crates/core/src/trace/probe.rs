use serde::Serialize;

use super::ansatz::{solve_constraints, Orientation};
use super::moments::{default_samples, moments};
use super::verify::verify_twisted_trace;
use crate::algebra::AlgebraParams;
use crate::error::Result;
use crate::laurent::LaurentPoly;
use crate::positivity::{build_paired_ansatz, default_free_zeros};

const PROBE_WINDOW: i64 = 24;
const PROBE_TRIALS: usize = 20;
const PROBE_SEED: u64 = 0x5eed;

/// One probe run: `P = 1`, twist `k`, ansatz built in `orientation`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeCase {
    pub k: i64,
    pub orientation: Orientation,
    #[serde(rename = "N")]
    pub n: i64,
    /// Twisted-trace residual, `None` when `N < 0` leaves nothing to test.
    pub residual: Option<f64>,
}

/// Which zero-count orientation the twisted-trace oracle accepts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrientationProbe {
    pub selected: Orientation,
    /// Exactly one orientation passed.
    pub decisive: bool,
    pub tolerance: f64,
    pub cases: Vec<ProbeCase>,
}

/// Build ansatz traces for `P = 1` and `k = +-1` in both orientations and
/// keep the orientation whose traces satisfy `T(ab) = T(b g(a))`.
pub fn select_orientation(q: f64, tol: f64) -> Result<OrientationProbe> {
    let mut cases = Vec::new();
    for orientation in [Orientation::Published, Orientation::Mirrored] {
        for k in [1, -1] {
            let params = AlgebraParams::new(q, LaurentPoly::one(), k)?;
            let sol = solve_constraints(&params, &[], orientation);
            let residual = if sol.feasible() {
                let free = default_free_zeros(q, sol.n(), PROBE_SEED);
                let ansatz = build_paired_ansatz(&params, &[], &sol, &free)?.ansatz;
                let mt = moments(&ansatz, PROBE_WINDOW, default_samples(PROBE_WINDOW), 1e-6)?
                    .normalize()?;
                Some(verify_twisted_trace(&mt, &params, PROBE_TRIALS, PROBE_SEED)?.max_residual)
            } else {
                None
            };
            cases.push(ProbeCase {
                k,
                orientation,
                n: sol.n(),
                residual,
            });
        }
    }
    let passes = |o: Orientation| {
        let tested: Vec<f64> = cases
            .iter()
            .filter(|c| c.orientation == o)
            .filter_map(|c| c.residual)
            .collect();
        !tested.is_empty() && tested.iter().all(|&r| r <= tol)
    };
    let worst = |o: Orientation| {
        cases
            .iter()
            .filter(|c| c.orientation == o)
            .filter_map(|c| c.residual)
            .fold(0.0, f64::max)
    };
    let (pp, pm) = (passes(Orientation::Published), passes(Orientation::Mirrored));
    let selected = match (pp, pm) {
        (true, false) => Orientation::Published,
        (false, true) => Orientation::Mirrored,
        _ if worst(Orientation::Published) <= worst(Orientation::Mirrored) => {
            Orientation::Published
        }
        _ => Orientation::Mirrored,
    };
    Ok(OrientationProbe {
        selected,
        decisive: pp != pm,
        tolerance: tol,
        cases,
    })
}
