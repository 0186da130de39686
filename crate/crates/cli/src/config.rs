//! Problem configuration files.
//!
//! ```json
//! {
//!   "q": 0.5,
//!   "P": {"-1": [1, 0], "0": [-2.0333333333333332, 0], "1": [1, 0]},
//!   "k": -1,
//!   "W": 32,
//!   "samples": 4096,
//!   "gram_size": 8,
//!   "seed": 42
//! }
//! ```
//!
//! `P` may also be given as `{"roots": [[re, im], ...], "leading": [re, im],
//! "min_exp": e}`.

use std::collections::BTreeMap;
use std::path::Path;

use qtrace_core::{AlgebraParams, ClassifyOptions, Complex64, Error as CoreError, LaurentPoly, Tolerances};
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    q: f64,
    #[serde(rename = "P")]
    p: Value,
    k: Value,
    #[serde(rename = "W")]
    window: Option<i64>,
    samples: Option<usize>,
    gram_size: Option<i64>,
    u_gram_size: Option<i64>,
    trials: Option<usize>,
    oracle_window: Option<i64>,
    tolerances: Option<Tolerances>,
    seed: Option<u64>,
    free_zeros: Option<Vec<[f64; 2]>>,
    /// Multiplies the normalized trace.
    c: Option<[f64; 2]>,
    /// Added to the moments before `verify` runs; a way to feed the
    /// oracles a table that is not a trace.
    perturb_moments: Option<BTreeMap<String, [f64; 2]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RootSpec {
    roots: Vec<[f64; 2]>,
    leading: [f64; 2],
    min_exp: i64,
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct ProblemConfig {
    pub params: AlgebraParams,
    pub opts: ClassifyOptions,
    pub scale: Complex64,
    pub perturbation: Vec<(i64, Complex64)>,
}

fn pair([re, im]: [f64; 2]) -> Complex64 {
    Complex64::new(re, im)
}

/// 1-based line and column of `"key"` used as an object key, or of the
/// start of the file when absent.
pub fn key_position(text: &str, key: &str) -> (usize, usize) {
    let needle = format!("\"{key}\"");
    let mut from = 0;
    while let Some(off) = text[from..].find(&needle) {
        let at = from + off;
        let rest = text[at + needle.len()..].trim_start();
        if rest.starts_with(':') {
            let line = text[..at].matches('\n').count() + 1;
            let col = at - text[..at].rfind('\n').map_or(0, |i| i + 1) + 1;
            return (line, col);
        }
        from = at + needle.len();
    }
    (1, 1)
}

struct Ctx<'a> {
    path: &'a Path,
    text: &'a str,
}

impl Ctx<'_> {
    fn at(&self, key: &str, message: impl Into<String>) -> CliError {
        let (line, column) = key_position(self.text, key);
        CliError::Config {
            path: self.path.display().to_string(),
            line,
            column,
            message: message.into(),
        }
    }
}

fn parse_poly(ctx: &Ctx, v: Value) -> Result<LaurentPoly, CliError> {
    if v.get("roots").is_some() {
        let spec: RootSpec = serde_json::from_value(v).map_err(|e| ctx.at("P", format!("P: {e}")))?;
        let roots: Vec<Complex64> = spec.roots.into_iter().map(pair).collect();
        let lead = pair(spec.leading);
        if lead.norm() == 0.0 {
            return Err(ctx.at("leading", "leading coefficient of P must be nonzero"));
        }
        Ok(LaurentPoly::from_roots(lead, spec.min_exp, &roots))
    } else {
        let p: LaurentPoly = serde_json::from_value(v).map_err(|e| ctx.at("P", format!("P: {e}")))?;
        if p.is_zero() {
            return Err(ctx.at("P", "P must not be the zero polynomial"));
        }
        Ok(p)
    }
}

/// Parse and validate `text`, read from `path`.
pub fn parse(path: &Path, text: &str) -> Result<ProblemConfig, CliError> {
    let ctx = Ctx { path, text };
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    if !(raw.q > 0.0 && raw.q < 1.0) {
        return Err(ctx.at("q", format!("q must lie in (0,1), got {}", raw.q)));
    }
    let k = raw
        .k
        .as_i64()
        .ok_or_else(|| ctx.at("k", format!("k must be an integer, got {}", raw.k)))?;
    let p = parse_poly(&ctx, raw.p)?;

    let defaults = ClassifyOptions::default();
    let window = raw.window.unwrap_or(defaults.window);
    if window < 8 {
        return Err(ctx.at("W", format!("W must be at least 8, got {window}")));
    }
    let samples = raw.samples.unwrap_or(defaults.samples);
    if !samples.is_power_of_two() || (samples as i64) < 8 * window {
        return Err(ctx.at(
            "samples",
            format!("samples must be a power of two and at least 8W = {}, got {samples}", 8 * window),
        ));
    }
    let gram_size = raw.gram_size.unwrap_or(defaults.gram_size);
    if gram_size < 1 || gram_size > window {
        return Err(ctx.at("gram_size", format!("gram_size must lie in [1, W], got {gram_size}")));
    }
    let u_gram_size = raw.u_gram_size.unwrap_or(defaults.u_gram_size);
    if u_gram_size < 1 || u_gram_size > window {
        return Err(ctx.at("u_gram_size", format!("u_gram_size must lie in [1, W], got {u_gram_size}")));
    }
    if let Some(ow) = raw.oracle_window {
        if ow < 8 {
            return Err(ctx.at("oracle_window", format!("oracle_window must be at least 8, got {ow}")));
        }
    }

    let params = AlgebraParams::new(raw.q, p, k).map_err(|e| match e {
        CoreError::InvalidQ(_) | CoreError::QTooLarge(_) => ctx.at("q", e.to_string()),
        _ => ctx.at("P", e.to_string()),
    })?;
    params.require_self_conjugate().map_err(|e| ctx.at("P", e.to_string()))?;

    let mut perturbation = Vec::new();
    for (key, v) in raw.perturb_moments.unwrap_or_default() {
        let i: i64 = key
            .trim()
            .parse()
            .map_err(|_| ctx.at("perturb_moments", format!("moment index {key:?} is not an integer")))?;
        if i.abs() > window {
            return Err(ctx.at("perturb_moments", format!("moment index {i} lies outside [-W, W]")));
        }
        perturbation.push((i, pair(v)));
    }

    let opts = ClassifyOptions {
        window,
        samples,
        gram_size,
        u_gram_size,
        trials: raw.trials.unwrap_or(defaults.trials),
        seed: raw.seed.unwrap_or(defaults.seed),
        oracle_window: raw.oracle_window,
        free_zeros: raw.free_zeros.map(|z| z.into_iter().map(pair).collect()),
        tolerances: raw.tolerances.unwrap_or_default(),
    };
    let scale = raw.c.map_or(Complex64::new(1.0, 0.0), pair);
    if scale.norm() == 0.0 {
        return Err(ctx.at("c", "c must be nonzero"));
    }
    Ok(ProblemConfig {
        params,
        opts,
        scale,
        perturbation,
    })
}

/// Read and parse the file at `path`.
pub fn load(path: &Path) -> Result<ProblemConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse(path, &text)
}
