//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a reproduced claim did not match, 2 bad input or
//! a failed hypothesis, 3 internal assertion.

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::bounds::{certify, exclusion_certificate, explicit_formula_identity, BoundCertificate, Regime};
use crate::cosine_poly::CosinePoly;
use crate::datasets;
use crate::error::Error;
use crate::exactnum::QField;
use crate::family::{family_coefficients, family_identity_check, family_product_check, family_threshold, to_f64};
use crate::optimizer::{minimal_degree_search, optimize, LpProblem, Optimum, MAX_ROUNDS};
use crate::reproduce::{reproduce, Fault};
use crate::theta_sets::ThetaSet;
use crate::zeta::{Validation, WeilPoly};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "frobound", version, about = "Exact explicit-formula bounds for curves over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Certify a point or genus bound for f on an angle set.
    Bound(BoundArgs),
    /// Certify "exceeding the bound forces an angle in (alpha, beta)".
    Exclude(ExcludeArgs),
    /// Point counts N_1..N_M from zeta data.
    Zeta(ZetaArgs),
    /// Both sides of the explicit formula for f and zeta data.
    Identity(IdentityArgs),
    /// Threshold r^m + 1 and checks for the one-parameter family.
    Family(FamilyArgs),
    /// Search for an optimal auxiliary polynomial and certify it.
    Optimize(OptimizeArgs),
    /// Recompute every worked example and compare with its stated value.
    ReproducePaper(ReproduceArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Tsv,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long)]
    pub regime: Regime,
    #[arg(long)]
    pub q: u64,
    /// JSON file or built-in polynomial name.
    #[arg(long)]
    pub f: String,
    /// JSON file or built-in angle-set name.
    #[arg(long)]
    pub theta: String,
    /// Rescale f so that u0 = 1 first.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ExcludeArgs {
    #[arg(long)]
    pub regime: Regime,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub f: String,
    /// cos(alpha), e.g. "1/2".
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: QField,
    /// cos(beta), e.g. "-1/2*sqrt(2)"; -1 excludes up to pi.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: QField,
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ZetaArgs {
    #[arg(long, required_unless_present = "curve")]
    pub q: Option<u64>,
    /// Factors as JSON, e.g. "[[4,5],[3,10],[0,11]]" for (1 + aT + qT^2)^e.
    #[arg(long, required_unless_present = "curve", allow_hyphen_values = true)]
    pub factors: Option<String>,
    /// Built-in curve name or JSON file instead of --q/--factors.
    #[arg(long, conflicts_with_all = ["q", "factors"])]
    pub curve: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub upto: usize,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long, required_unless_present = "curve")]
    pub q: Option<u64>,
    #[arg(long, required_unless_present = "curve", allow_hyphen_values = true)]
    pub factors: Option<String>,
    #[arg(long, conflicts_with_all = ["q", "factors"])]
    pub curve: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub q: u64,
    /// Random angles for the product-form check.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub theta: String,
    #[arg(long)]
    pub regime: Regime,
    /// Degree cap D.
    #[arg(long)]
    pub degree: usize,
    /// Reference genus for the u0 = 1 regimes.
    #[arg(long, default_value_t = 0)]
    pub genus: u64,
    /// Search for the smallest feasible degree up to --degree.
    #[arg(long)]
    pub min_degree: bool,
    #[arg(long, default_value_t = MAX_ROUNDS)]
    pub max_rounds: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { code: EXIT_INTERNAL, message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError { code: EXIT_INTERNAL, message: e.to_string() }
    }
}

fn input_error(message: String) -> CliError {
    CliError { code: EXIT_INPUT, message }
}

/// Reads `source` as a JSON file if it exists, otherwise as a built-in name.
fn load<T: DeserializeOwned>(source: &str, builtin: fn(&str) -> crate::Result<T>) -> Result<T, CliError> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        return serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {}", source, e)));
    }
    builtin(source).map_err(|_| input_error(format!("'{}' is neither a readable file nor a built-in name", source)))
}

fn weil_from(q: Option<u64>, factors: Option<&str>, curve: Option<&str>) -> Result<WeilPoly, CliError> {
    if let Some(c) = curve {
        return load(c, datasets::curve);
    }
    let (q, factors) = q.zip(factors).ok_or_else(|| input_error("need --curve or both --q and --factors".into()))?;
    let factors: Vec<(i64, u32)> =
        serde_json::from_str(factors).map_err(|e| input_error(format!("--factors: {}", e)))?;
    Ok(WeilPoly::new(q, factors)?)
}

fn approx(v: &QField) -> String {
    if v.is_rational() {
        v.to_string()
    } else {
        format!("{} (approx. {:.12})", v, v.to_f64())
    }
}

fn cert_summary(cert: &BoundCertificate) -> String {
    let mut s = format!(
        "regime {}, q = {}\nf = {}\npsi(r) = {}\npsi(1/r) = {}\nbound: {}\n",
        cert.regime,
        cert.q,
        cert.f,
        approx(&cert.psi_r),
        approx(&cert.psi_rinv),
        cert.bound
    );
    let c = &cert.conditions;
    s.push_str(&format!("conditions: (a) {} (b) {}", c.a, c.b));
    if let Some(v) = c.c {
        s.push_str(&format!(" (c) {} [m = {}]", v, c.symmetry_m.unwrap_or_default()));
    }
    if let Some(v) = c.d {
        s.push_str(&format!(" (d) {}", v));
    }
    s.push('\n');
    s
}

fn pretty<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn prepare(f: CosinePoly, normalize: bool) -> Result<CosinePoly, CliError> {
    Ok(if normalize { f.normalize_u0()? } else { f })
}

/// Executes one command, writing its output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Bound(a) => {
            let f = prepare(load(&a.f, datasets::polynomial)?, a.normalize)?;
            let theta: ThetaSet = load(&a.theta, datasets::theta_set)?;
            let cert = certify(&f, &theta, a.q, a.regime)?;
            let text = match a.format {
                Format::Json => pretty(&cert)?,
                _ => cert_summary(&cert),
            };
            out.write_all(text.as_bytes())?;
        }
        Command::Exclude(a) => {
            let f = prepare(load(&a.f, datasets::polynomial)?, a.normalize)?;
            let ex = exclusion_certificate(&f, a.q, &a.alpha, &a.beta, a.regime)?;
            let text = match a.format {
                Format::Json => pretty(&ex)?,
                _ => format!("{}{}\n", cert_summary(&ex.base), ex.statement()),
            };
            out.write_all(text.as_bytes())?;
        }
        Command::Zeta(a) => {
            let w = weil_from(a.q, a.factors.as_deref(), a.curve.as_deref())?;
            let counts = w.point_counts(a.upto);
            let validation = match w.validate(a.upto) {
                Validation::Pass => "pass".to_string(),
                Validation::Fail(v) => format!("fail: {}", v),
            };
            let text = match a.format {
                Format::Json => pretty(&json!({
                    "q": w.q(),
                    "genus": w.genus(),
                    "counts": counts.as_slice().iter().map(|n| n.to_string()).collect::<Vec<_>>(),
                    "validation": validation,
                }))?,
                Format::Tsv => counts.to_tsv(),
                Format::Text => {
                    format!("P(T) = {}\ngenus {}\n{}validation: {}\n", w, w.genus(), counts.to_tsv(), validation)
                }
            };
            out.write_all(text.as_bytes())?;
        }
        Command::Identity(a) => {
            let f: CosinePoly = load(&a.f, datasets::polynomial)?;
            let w = weil_from(a.q, a.factors.as_deref(), a.curve.as_deref())?;
            let rep = explicit_formula_identity(&f, &w)?;
            let text = match a.format {
                Format::Json => pretty(&json!({
                    "lhs": rep.lhs,
                    "rhs": rep.rhs,
                    "slack": rep.slack.iter().map(|(n, v)| json!({"n": n, "value": v})).collect::<Vec<_>>(),
                    "angle_sum": rep.angle_sum,
                    "tight": rep.is_tight(),
                }))?,
                _ => {
                    let mut s = format!("lhs = {}\nrhs = {}\n", approx(&rep.lhs), approx(&rep.rhs));
                    for (n, v) in &rep.slack {
                        s.push_str(&format!("slack u_{}(N_{} - N_1) r^-{} = {}\n", n, n, n, approx(v)));
                    }
                    s.push_str(&format!("2 sum f(theta_j) = {}\ntight: {}\n", approx(&rep.angle_sum), rep.is_tight()));
                    s
                }
            };
            out.write_all(text.as_bytes())?;
        }
        Command::Family(a) => {
            let t = family_threshold(a.m, a.q)?;
            let (identity, product, table) = if a.m >= 4 {
                let fam = family_coefficients(a.m)?;
                let table: Vec<(usize, String, f64)> =
                    fam.coeffs().iter().map(|c| (c.n, c.exact.to_string(), to_f64(&c.value))).collect();
                (Some(family_identity_check(a.m)?), Some(family_product_check(a.m, a.samples, a.seed)?), table)
            } else {
                (None, None, Vec::new())
            };
            let text = match a.format {
                Format::Json => pretty(&json!({
                    "m": a.m,
                    "q": a.q,
                    "threshold": t.threshold,
                    "threshold_floor": t.floor.to_string(),
                    "excluded": t.excluded,
                    "statement": t.statement(),
                    "holds": t.holds(),
                    "coefficients": table.iter().map(|(n, e, v)| json!({"n": n, "exact": e, "approx": v})).collect::<Vec<_>>(),
                    "identity_check": identity,
                    "product_check": product.as_ref().map(|p| json!({"samples": p.samples, "max_deviation": p.max_deviation, "passed": p.passed})),
                }))?,
                _ => {
                    let mut s = format!("{}\nthreshold (integer): {}\n", t.statement(), t.floor);
                    for (n, e, v) in &table {
                        s.push_str(&format!("u_{} = {}  (approx. {:.15})\n", n, e, v));
                    }
                    if let Some(i) = identity {
                        s.push_str(&format!("identity check: {}\n", if i { "pass" } else { "FAIL" }));
                    }
                    if let Some(p) = &product {
                        s.push_str(&format!(
                            "product check: {} ({} samples, max deviation {:.3e})\n",
                            if p.passed { "pass" } else { "FAIL" },
                            p.samples,
                            p.max_deviation
                        ));
                    }
                    s
                }
            };
            out.write_all(text.as_bytes())?;
        }
        Command::Optimize(a) => {
            let theta: ThetaSet = load(&a.theta, datasets::theta_set)?;
            let (degree, opt): (usize, Optimum) = if a.min_degree {
                minimal_degree_search(a.q, &theta, a.regime, a.degree, a.genus)?
            } else {
                let p = LpProblem::new(a.q, theta, a.regime, a.degree, a.genus)?;
                (a.degree, optimize(&p, a.max_rounds)?)
            };
            let text = match a.format {
                Format::Json => pretty(&json!({
                    "degree": degree,
                    "objective": opt.objective,
                    "rounds": opt.rounds,
                    "grid_size": opt.grid_size,
                    "certificate": opt.certificate,
                }))?,
                _ => format!(
                    "degree {}: LP objective {} after {} round(s), grid of {} points\n{}",
                    degree,
                    approx(&opt.objective),
                    opt.rounds,
                    opt.grid_size,
                    cert_summary(&opt.certificate)
                ),
            };
            out.write_all(text.as_bytes())?;
        }
        Command::ReproducePaper(a) => {
            let fault = if a.inject_fault { Fault::CorruptPolynomial } else { Fault::None };
            let report = reproduce(fault);
            let text = match a.format {
                Format::Json => pretty(&report)?,
                _ => report.to_text(),
            };
            out.write_all(text.as_bytes())?;
            return Ok(if report.all_matched { EXIT_OK } else { EXIT_MISMATCH });
        }
    }
    Ok(EXIT_OK)
}
