use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use qtrace_core::json::to_string_fixed;
use qtrace_core::positivity::{
    auto_oracle_window, construct, CircleEvaluator, CircleFunction, Construction, OracleAgreement,
    ORACLE_COMPARE_RANGE,
};
use qtrace_core::trace::{
    default_samples, moments, moments_by_linear_system,
    verify_quasiperiodicity, verify_twisted_trace, QuasiperiodicityReport, ResidualReport,
};
use qtrace_core::{classify, Complex64, MomentTable, Tolerances, TraceAnsatz};
use serde::Serialize;

use crate::config::ProblemConfig;
use crate::error::CliError;

/// Exit code when the configuration admits no trace of theta-quotient shape.
pub const EXIT_INFEASIBLE: i32 = 3;
/// Exit code when a residual misses its tolerance.
pub const EXIT_FAILED: i32 = 2;

/// Text produced by a command and the process exit code that goes with it.
pub struct Outcome {
    pub body: String,
    pub code: i32,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self {
            body,
            code: 0,
            warnings: Vec::new(),
        }
    }
}

pub fn write_output(out: Option<&Path>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => match std::io::stdout().lock().write_all(body.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Write {
                path: "stdout".into(),
                source: e,
            }),
            _ => Ok(()),
        },
    }
}

pub fn cmd_classify(cfg: &ProblemConfig) -> Result<Outcome, CliError> {
    let report = classify(&cfg.params, &cfg.opts)?;
    Ok(Outcome {
        body: to_string_fixed(&report)?,
        code: report.exit_code,
        warnings: Vec::new(),
    })
}

/// The constructed trace with `c` multiplied by the configured scale, or
/// the exit outcome when there is none.
fn build(cfg: &ProblemConfig) -> Result<Result<(Construction, TraceAnsatz), Outcome>, CliError> {
    let (_, built) = construct(&cfg.params, &cfg.opts)?;
    match built {
        Ok(c) => {
            let ansatz = c.ansatz.with_c(c.ansatz.c * cfg.scale);
            Ok(Ok((c, ansatz)))
        }
        Err(solution) => Ok(Err(Outcome {
            body: String::new(),
            code: EXIT_INFEASIBLE,
            warnings: vec![format!(
                "no trace of theta-quotient shape: M = {}, N = {}{}",
                solution.m,
                solution.n(),
                if solution.n() == 0 {
                    format!(", and prod alpha would have to be {}", solution.product_target())
                } else {
                    String::new()
                }
            )],
        })),
    }
}

fn scaled_moments(cfg: &ProblemConfig, ansatz: &TraceAnsatz, w: i64) -> Result<MomentTable, CliError> {
    let samples = cfg.opts.samples.max(default_samples(w));
    let raw = moments(ansatz, w, samples, cfg.opts.tolerances.pole_circle)?;
    Ok(raw.normalize()?.scale(cfg.scale))
}

pub fn cmd_moments(cfg: &ProblemConfig, max_index: Option<i64>, out: Option<&Path>) -> Result<Outcome, CliError> {
    let w = max_index.unwrap_or(cfg.opts.window);
    if w < 0 {
        return Err(CliError::Usage(format!("--max-index must be nonnegative, got {w}")));
    }
    let (_, ansatz) = match build(cfg)? {
        Ok(b) => b,
        Err(outcome) => return Ok(outcome),
    };
    let mt = scaled_moments(cfg, &ansatz, w)?;
    let json = out.is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    if json {
        return Ok(Outcome::ok(to_string_fixed(&mt)?));
    }
    let mut csv = String::from("i,re,im,abs\n");
    for (i, c) in mt.iter() {
        writeln!(csv, "{i},{:e},{:e},{:e}", c.re, c.im, c.norm()).expect("writing to a String");
    }
    Ok(Outcome::ok(csv))
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub twisted_trace: ResidualReport,
    pub oracle_agreement: OracleAgreement,
    pub quasiperiodicity: QuasiperiodicityReport,
    pub perturbed_moments: Vec<i64>,
    pub tolerances: Tolerances,
}

pub fn cmd_verify(cfg: &ProblemConfig, trials: usize) -> Result<Outcome, CliError> {
    let (built, ansatz) = match build(cfg)? {
        Ok(b) => b,
        Err(outcome) => return Ok(outcome),
    };
    let tol = &cfg.opts.tolerances;
    let perturb = |mut mt: MomentTable| {
        for &(i, d) in &cfg.perturbation {
            mt.set(i, mt.get(i) + d);
        }
        mt
    };
    let mt = perturb(scaled_moments(cfg, &ansatz, cfg.opts.window)?);
    let twisted = verify_twisted_trace(&mt, &cfg.params, trials, cfg.opts.seed)?;

    let oracle_window = cfg
        .opts
        .oracle_window
        .unwrap_or_else(|| auto_oracle_window(cfg.params.q(), &built.ansatz.poles));
    let lin = moments_by_linear_system(&cfg.params, oracle_window, tol.nullspace)?;
    let oracle_mt = perturb(scaled_moments(cfg, &ansatz, oracle_window)?);
    let agreement = OracleAgreement {
        max_diff: lin.distance(&oracle_mt, ORACLE_COMPARE_RANGE),
        range: ORACLE_COMPARE_RANGE,
    };
    let quasi = verify_quasiperiodicity(&ansatz, built.solution.primary.orientation, 64)?;

    let passed = twisted.max_residual <= tol.twisted_trace
        && agreement.max_diff <= tol.oracle_agreement
        && quasi.max_residual <= tol.quasiperiodicity;
    let report = VerifyReport {
        passed,
        twisted_trace: twisted,
        oracle_agreement: agreement,
        quasiperiodicity: quasi,
        perturbed_moments: cfg.perturbation.iter().map(|p| p.0).collect(),
        tolerances: tol.clone(),
    };
    Ok(Outcome {
        body: to_string_fixed(&report)?,
        code: if passed { 0 } else { EXIT_FAILED },
        warnings: Vec::new(),
    })
}

pub fn cmd_emit_circle(cfg: &ProblemConfig, function: CircleFunction) -> Result<Outcome, CliError> {
    let (_, ansatz) = match build(cfg)? {
        Ok(b) => b,
        Err(outcome) => return Ok(outcome),
    };
    let ev = CircleEvaluator::new(&ansatz)?;
    let theta = ansatz.theta()?;
    let guard = cfg.opts.tolerances.pole_circle;
    let samples = cfg.opts.samples;
    let mut csv = String::from("phi,re,im\n");
    let mut skipped = 0usize;
    for s in 0..samples {
        let phi = std::f64::consts::TAU * s as f64 / samples as f64;
        let z = Complex64::from_polar(1.0, phi);
        // z^k P(z) w(qz) has its poles cancelled against the roots of P
        let near = function == CircleFunction::W
            && ansatz.poles.iter().any(|&b| theta.orbit_distance(z, b) <= guard);
        let value = if near { None } else { ev.eval(function, z).ok() };
        match value {
            Some(v) => writeln!(csv, "{phi:e},{:e},{:e}", v.re, v.im),
            None => {
                skipped += 1;
                writeln!(csv, "{phi:e},NaN,NaN")
            }
        }
        .expect("writing to a String");
    }
    let mut warnings = Vec::new();
    if skipped > 0 {
        warnings.push(format!(
            "{skipped} of {samples} samples lie within the pole guard and were written as NaN"
        ));
    }
    Ok(Outcome {
        body: csv,
        code: 0,
        warnings,
    })
}
