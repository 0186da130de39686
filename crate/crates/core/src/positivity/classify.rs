use num_complex::Complex64;
use serde::Serialize;

use super::circle::{circle_positivity, CirclePositivityReport};
use super::gram::{gram_laurent, gram_u_sector, GramReport, GramVerdict};
use super::pairing::{build_paired_ansatz, default_free_zeros};
use crate::algebra::AlgebraParams;
use crate::error::{Error, Result};
use crate::json::complex_vec;
use crate::laurent::LaurentPoly;
use crate::tolerances::Tolerances;
use crate::trace::{
    decay_fit, moments, moments_by_linear_system, poles_from_p,
    select_orientation, solve_constraints, verify_quasiperiodicity, verify_twisted_trace,
    ConstraintSolution, DecayReport, MomentTable, OrientationProbe, QuasiperiodicityReport,
    ResidualReport, TraceAnsatz,
};

/// Moments compared against the linear-system oracle for `|i| <= this`.
pub const ORACLE_COMPARE_RANGE: i64 = 8;
/// Allowed relative error of the multiplier constant.
pub const MULTIPLIER_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyOptions {
    #[serde(rename = "W")]
    pub window: i64,
    pub samples: usize,
    pub gram_size: i64,
    pub u_gram_size: i64,
    pub trials: usize,
    pub seed: u64,
    /// Window of the linear-system oracle; `None` picks one from the decay
    /// rate implied by the poles.
    pub oracle_window: Option<i64>,
    /// Free zeros of the paired ansatz (`N / 2` of them); seeded defaults
    /// otherwise.
    #[serde(with = "opt_complex_vec")]
    pub free_zeros: Option<Vec<Complex64>>,
    pub tolerances: Tolerances,
}

mod opt_complex_vec {
    use num_complex::Complex64;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(
        v: &Option<Vec<Complex64>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => crate::json::complex_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            window: 32,
            samples: 4096,
            gram_size: 8,
            u_gram_size: 6,
            trials: 100,
            seed: 42,
            oracle_window: None,
            free_zeros: None,
            tolerances: Tolerances::default(),
        }
    }
}

/// Outcome of a classification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// A positive trace was constructed and every certificate passed.
    FeasibleCertified,
    /// `N < 0` and the linear-system oracle finds no trace either.
    CertifiedInfeasible,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::FeasibleCertified => 0,
            Verdict::CertifiedInfeasible => 3,
            Verdict::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierCheck {
    pub zpow_mismatch: i64,
    pub constant_rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleAgreement {
    /// `max_{|i| <= range} |c_i - (proj c)_i|` relative to `max |c_i|`, with
    /// `proj` the projection onto the oracle's null space.
    pub max_diff: f64,
    pub range: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NullspaceCheck {
    pub window: i64,
    pub dim: usize,
    /// `N` for `N > 0`, 1 for `N = 0`, 0 for `N < 0`.
    pub expected: usize,
    /// Largest singular value counted as null and the next one up.
    pub gap: (f64, f64),
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentBoundReport {
    pub max_abs: f64,
    pub attained_at: i64,
    pub margin: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnulusCheck {
    /// `"k = n/2"` or `"k = -n/2"`.
    pub case: String,
    pub all_roots_in_annulus: bool,
    pub certified_positive: bool,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residuals {
    pub twisted_trace: Option<ResidualReport>,
    pub quasiperiodicity: Option<QuasiperiodicityReport>,
    pub multiplier: Option<MultiplierCheck>,
    pub oracle_agreement: Option<OracleAgreement>,
    pub conjugate_symmetry: Option<f64>,
    pub decay: Option<DecayReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnsatzSummary {
    #[serde(with = "crate::json::complex_pair")]
    pub c: Complex64,
    #[serde(with = "complex_vec")]
    pub zeros: Vec<Complex64>,
    #[serde(with = "complex_vec")]
    pub poles: Vec<Complex64>,
    /// `prod beta`; `gauge_normalize` would rotate it onto the positive axis.
    #[serde(with = "crate::json::complex_pair")]
    pub pole_product: Complex64,
    pub self_paired_zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub q: f64,
    pub k: i64,
    pub l: i64,
    #[serde(rename = "P")]
    pub p: LaurentPoly,
    pub options: ClassifyOptions,
    pub oracle_window: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub feasible: bool,
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "M")]
    pub m: usize,
    pub cone_dim: Option<i64>,
    pub orientation: crate::trace::Orientation,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub residuals: Residuals,
    pub nullspace: NullspaceCheck,
    pub gram: Vec<GramReport>,
    pub circle: Vec<CirclePositivityReport>,
    pub moment_bound: Option<MomentBoundReport>,
    pub annulus_criterion: Vec<AnnulusCheck>,
    pub counts: ConstraintSolution,
    pub orientation_probe: OrientationProbe,
    pub ansatz: Option<AnsatzSummary>,
    pub config: ConfigEcho,
    pub scope_notes: Vec<String>,
    /// Normalized moments of the constructed trace.
    pub moments: Option<MomentTable>,
}

/// Window large enough that the slowest moment decay implied by the poles
/// drops below `1e-16`, at least 64 and at most 512.
pub fn auto_oracle_window(q: f64, poles: &[Complex64]) -> i64 {
    let kappa = poles
        .iter()
        .map(|b| (1.0 / b.norm()).max(q * q * b.norm()))
        .fold(q, f64::max);
    let w = (16.0 * std::f64::consts::LN_10 / -kappa.ln()).ceil() as i64;
    w.clamp(64, 512)
}

/// The constructed trace of a feasible configuration.
#[derive(Clone, Debug)]
pub struct Construction {
    pub ansatz: TraceAnsatz,
    pub self_paired: bool,
    pub solution: ConstraintSolution,
    pub probe: OrientationProbe,
}

/// Orientation, poles, count and paired zeros, all for the caller's `P`.
/// `Ok(Err(solution))` when no quotient meets the constraints.
pub fn construct(
    params: &AlgebraParams,
    opts: &ClassifyOptions,
) -> Result<(OrientationProbe, std::result::Result<Construction, ConstraintSolution>)> {
    params.require_self_conjugate()?;
    let probe = select_orientation(params.q(), opts.tolerances.twisted_trace)?;
    let poles = poles_from_p(params)?;
    let solution = solve_constraints(params, &poles, probe.selected);
    if !solution.feasible() {
        return Ok((probe, Err(solution)));
    }
    let free = match &opts.free_zeros {
        Some(f) => f.clone(),
        None => default_free_zeros(params.q(), solution.n(), opts.seed),
    };
    let paired = build_paired_ansatz(params, &poles, &solution, &free)?;
    let ansatz = paired.ansatz;
    Ok((
        probe.clone(),
        Ok(Construction {
            ansatz,
            self_paired: paired.self_paired,
            solution,
            probe,
        }),
    ))
}

/// Full pipeline: construct, extract moments, run every oracle and
/// certificate, and decide.
pub fn classify(params: &AlgebraParams, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    if opts.window < 8 {
        return Err(Error::WindowTooSmall {
            have: opts.window,
            need: 8,
        });
    }
    if !opts.samples.is_power_of_two() || (opts.samples as i64) < 8 * opts.window {
        return Err(Error::BadSampleCount(opts.samples));
    }
    let tol = &opts.tolerances;
    let (probe, built) = construct(params, opts)?;
    let q = params.q();
    let poles = poles_from_p(params)?;
    let oracle_window = opts
        .oracle_window
        .unwrap_or_else(|| auto_oracle_window(q, &poles));
    let lin = moments_by_linear_system(params, oracle_window, tol.nullspace)?;

    let mut notes = Vec::new();
    if probe.selected != crate::trace::Orientation::Published {
        notes.push(
            "the twisted-trace oracle selects the zero count N = M + 2k; \
             the published count N = M - 2k is kept under counts.alternative"
                .to_string(),
        );
    }
    if !probe.decisive {
        notes.push("orientation probe was not decisive".to_string());
    }
    if params.k() == 0 {
        notes.push(
            "k = 0: the theta-function classification does not cover this case; \
             report produced for reference only"
                .to_string(),
        );
    }

    let rd = params.p().roots(None)?;
    let n_roots = rd.n() as i64;
    let all_in_annulus = rd
        .roots
        .iter()
        .all(|r| r.location.norm() > q && r.location.norm() < 1.0 / q);

    let echo = ConfigEcho {
        q,
        k: params.k(),
        l: params.l(),
        p: params.p().clone(),
        options: opts.clone(),
        oracle_window,
    };

    let construction = match built {
        Err(solution) => {
            let dim = lin.nullspace_dim();
            if solution.n() == 0 {
                notes.push(format!(
                    "N = 0 leaves no zeros to absorb the phase of prod beta: the constraint \
                     needs prod alpha = {}, not 1",
                    solution.product_target()
                ));
            }
            let verdict = if dim == 0 {
                Verdict::CertifiedInfeasible
            } else {
                notes.push(format!(
                    "N = {} < 0 but the linear system keeps {dim} null directions",
                    solution.n()
                ));
                Verdict::Inconclusive
            };
            let annulus = annulus_checks(params.k(), n_roots, all_in_annulus, false);
            return Ok(ClassificationReport {
                feasible: false,
                n: solution.n(),
                m: solution.m,
                cone_dim: None,
                orientation: solution.primary.orientation,
                verdict,
                exit_code: verdict.exit_code(),
                residuals: Residuals {
                    twisted_trace: None,
                    quasiperiodicity: None,
                    multiplier: None,
                    oracle_agreement: None,
                    conjugate_symmetry: None,
                    decay: None,
                },
                nullspace: NullspaceCheck {
                    window: oracle_window,
                    dim,
                    expected: 0,
                    gap: lin.gap(),
                    threshold: tol.nullspace,
                },
                gram: vec![],
                circle: vec![],
                moment_bound: None,
                annulus_criterion: annulus,
                counts: solution,
                orientation_probe: probe,
                ansatz: None,
                config: echo,
                scope_notes: notes,
                moments: None,
            });
        }
        Ok(c) => c,
    };

    let ansatz = &construction.ansatz;
    let n = construction.solution.n();
    if construction.self_paired {
        notes.push("odd N: one self-paired zero on |z| = 1/q (experimental)".to_string());
    }

    let mt = moments(ansatz, opts.window, opts.samples, tol.pole_circle)?.normalize()?;
    let twisted = verify_twisted_trace(&mt, params, opts.trials, opts.seed)?;
    let quasi = verify_quasiperiodicity(ansatz, construction.solution.primary.orientation, 64)?;
    let (zpow_mismatch, constant_rel_error) =
        ansatz.multiplier_mismatch(construction.solution.primary.orientation);

    let oracle_mt = moments(
        ansatz,
        oracle_window,
        opts.samples.max(crate::trace::default_samples(oracle_window)),
        tol.pole_circle,
    )?
    .normalize()?;
    let agreement = OracleAgreement {
        max_diff: lin.distance(&oracle_mt, ORACLE_COMPARE_RANGE),
        range: ORACLE_COMPARE_RANGE,
    };

    let decay = if opts.window >= 16 {
        Some(decay_fit(&mt)?)
    } else {
        None
    };
    let grams = vec![
        gram_laurent(&mt, opts.gram_size, tol.gram)?,
        gram_u_sector(&mt, params, opts.u_gram_size, tol.gram)?,
    ];
    let circles = circle_positivity(ansatz, opts.samples, tol.circle, tol.pole_circle)?.to_vec();
    let (at, max_abs) = mt.max_off_center();
    let moment_bound = MomentBoundReport {
        max_abs,
        attained_at: at,
        margin: 1.0 - max_abs,
        holds: max_abs < 1.0,
    };
    let expected = n.max(1) as usize;
    let nullspace = NullspaceCheck {
        window: oracle_window,
        dim: lin.nullspace_dim(),
        expected,
        gap: lin.gap(),
        threshold: tol.nullspace,
    };

    let gates = [
        ("twisted-trace residual", twisted.max_residual <= tol.twisted_trace),
        ("functional equation", quasi.max_residual <= tol.quasiperiodicity),
        ("multiplier", zpow_mismatch == 0 && constant_rel_error <= MULTIPLIER_TOL),
        ("oracle agreement", agreement.max_diff <= tol.oracle_agreement),
        ("null-space dimension", nullspace.dim == nullspace.expected),
        ("Gram certificates", grams.iter().all(|g| g.verdict == GramVerdict::Positive)),
        ("circle positivity", circles.iter().all(|c| c.positive)),
        ("moment bound", moment_bound.holds),
    ];
    let failed: Vec<&str> = gates.iter().filter(|g| !g.1).map(|g| g.0).collect();
    let verdict = if failed.is_empty() {
        Verdict::FeasibleCertified
    } else {
        notes.push(format!("failed certificates: {}", failed.join(", ")));
        Verdict::Inconclusive
    };
    let certified = verdict == Verdict::FeasibleCertified;

    Ok(ClassificationReport {
        feasible: true,
        n,
        m: construction.solution.m,
        cone_dim: Some(n.max(1)),
        orientation: construction.solution.primary.orientation,
        verdict,
        exit_code: verdict.exit_code(),
        residuals: Residuals {
            twisted_trace: Some(twisted),
            quasiperiodicity: Some(quasi),
            multiplier: Some(MultiplierCheck {
                zpow_mismatch,
                constant_rel_error,
            }),
            oracle_agreement: Some(agreement),
            conjugate_symmetry: Some(mt.conjugate_symmetry_defect()),
            decay,
        },
        nullspace,
        gram: grams,
        circle: circles,
        moment_bound: Some(moment_bound),
        annulus_criterion: annulus_checks(params.k(), n_roots, all_in_annulus, certified),
        counts: construction.solution.clone(),
        orientation_probe: probe,
        ansatz: Some(AnsatzSummary {
            c: ansatz.c,
            zeros: ansatz.zeros.clone(),
            poles: ansatz.poles.clone(),
            pole_product: ansatz.poles.iter().product(),
            self_paired_zero: construction.self_paired,
        }),
        config: echo,
        scope_notes: notes,
        moments: Some(mt),
    })
}

/// "A positive trace exists iff every root of `P` lies in `q < |z| < 1/q`",
/// checked at `k = n/2` and at `k = -n/2`.
fn annulus_checks(k: i64, n: i64, all_in: bool, certified: bool) -> Vec<AnnulusCheck> {
    let mut out = Vec::new();
    for (case, applies) in [("k = n/2", 2 * k == n), ("k = -n/2", -2 * k == n)] {
        if applies && n > 0 {
            out.push(AnnulusCheck {
                case: case.to_string(),
                all_roots_in_annulus: all_in,
                certified_positive: certified,
                consistent: all_in == certified,
            });
        }
    }
    out
}
