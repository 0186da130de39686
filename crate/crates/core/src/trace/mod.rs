//! Candidate traces from the theta ansatz, their moments, and the two
//! oracles that check them: the twisted-trace identity evaluated through the
//! algebra engine, and the moments obtained from the trace conditions alone.

mod ansatz;
mod moments;
mod probe;
mod verify;

pub use ansatz::{
    gauge_normalize, poles_from_p, solve_constraints, ConstraintSolution, CountCandidate,
    Orientation, TraceAnsatz, GAUGE_MODULUS_TOL, POLE_ROOT_TOL,
};
pub use moments::{
    check_poles_off_circle, circle_points, decay_fit, default_samples, fourier_moments, moments,
    moments_by_linear_system, trace_condition_row, DecayReport, LinearSystemSolution,
    MomentTable, DECAY_MARGIN,
};
pub use probe::{select_orientation, OrientationProbe, ProbeCase};
pub use verify::{
    near_pole_orbit, pair, random_element, trace_of, twisted_residual, unit_disk,
    verify_quasiperiodicity, verify_twisted_trace, QuasiperiodicityReport, ResidualReport,
};
