//! Command-line surface.
//!
//! Exit codes: 0 success / property holds, 1 negative mathematical answer
//! (not increasing, not positive definite, property fails), 2 input or usage
//! error. Human-readable output uses 1-based indices; JSON uses 0-based.

pub mod envelope;
pub mod matrix_file;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::certify::{certifiers, scaling_threshold, Certificate, Reason, Verdict};
use crate::error::{Error, Result};
use crate::greedy::{attach_guarantee, exact_maxdet, greedy_maxdet_with, greedy_strategies, DEFAULT_STRATEGY};
use crate::linalg::{HermitianMatrix, IndexSet};
use crate::matrixgen::{generate, Family, GenParams, GenSpec};
use crate::minors::{property_checks, EXHAUSTIVE_MAX_DIM};
use envelope::ResultEnvelope;
use matrix_file::{format_matrix, read_matrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "minorcert", version, about = "Increasing principal minors and greedy max-det selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the matrix has increasing principal minors.
    Certify {
        matrix: PathBuf,
        /// Use exhaustive subset enumeration (m ≤ 12).
        #[arg(long)]
        brute_force: bool,
        /// Certification method by name; see `strategies`.
        #[arg(long, conflicts_with = "brute_force")]
        method: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Smallest t > 0 for which t·A has increasing principal minors.
    Threshold {
        matrix: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Greedy max-determinant selection of at most k indices.
    Greedy {
        matrix: PathBuf,
        #[arg(long = "k")]
        k: usize,
        /// Also solve exactly and report the approximation ratio.
        #[arg(long)]
        exact: bool,
        /// Marginal-gain strategy by name; see `strategies`.
        #[arg(long, default_value = DEFAULT_STRATEGY)]
        strategy: String,
        #[arg(long)]
        json: bool,
    },
    /// Check determinantal inequalities and identities exhaustively (m ≤ 12).
    Check {
        matrix: PathBuf,
        /// A registered property name or `all`.
        #[arg(long, default_value = "all")]
        property: String,
        #[arg(long)]
        json: bool,
    },
    /// Write a generated matrix file.
    Gen(GenArgs),
    /// List registered certification methods, greedy strategies, properties and families.
    Strategies,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `key=value` pairs, comma-separated or repeated: scale, rho, deficit, diag (a:b:c), main, off.
    #[arg(long, num_args = 1..)]
    pub params: Vec<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of one invocation, kept separate from process I/O so it can be tested.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(err: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome::ok(EXIT_OK, text)
                }
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    dispatch(cli.command).unwrap_or_else(Outcome::usage)
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn load(path: &Path) -> Result<(HermitianMatrix, f64)> {
    let t = Instant::now();
    let a = read_matrix(path)?;
    Ok((a, ms_since(t)))
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Certify {
            matrix,
            brute_force,
            method,
            json,
        } => {
            let method = match (brute_force, method) {
                (true, _) => "brute-force".to_string(),
                (false, Some(m)) => m,
                (false, None) => "inverse-diagonal".to_string(),
            };
            cmd_certify(&matrix, &method, json)
        }
        Command::Threshold { matrix, json } => cmd_threshold(&matrix, json),
        Command::Greedy {
            matrix,
            k,
            exact,
            strategy,
            json,
        } => cmd_greedy(&matrix, k, exact, &strategy, json),
        Command::Check {
            matrix,
            property,
            json,
        } => cmd_check(&matrix, &property, json),
        Command::Gen(args) => cmd_gen(&args),
        Command::Strategies => Ok(cmd_strategies()),
    }
}

fn one_based_list(indices: &[usize]) -> String {
    let v: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
    format!("[{}]", v.join(", "))
}

fn one_based_set(set: &IndexSet) -> String {
    let v: Vec<String> = set.one_based().iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

fn reals(xs: &[f64]) -> String {
    let v: Vec<String> = xs.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", v.join(", "))
}

fn certificate_text(c: &Certificate, method: &str) -> String {
    let mut s = String::new();
    let verdict = match c.verdict {
        Verdict::Increasing => "Increasing",
        Verdict::NotIncreasing => "NotIncreasing",
    };
    match (c.reason, c.max_inverse_diagonal()) {
        (Reason::NotPositiveDefinite, _) => {
            s.push_str(&format!("{verdict}; not positive definite\n"));
        }
        (_, Some(max)) => {
            s.push_str(&format!("{verdict}; max diag(A^-1) = {max}\n"));
        }
        (_, None) => s.push_str(&format!("{verdict}\n")),
    }
    s.push_str(&format!("method: {method}\n"));
    if let Some(diag) = &c.inverse_diagonal {
        s.push_str("inverse diagonal (1-based):\n");
        for (i, b) in diag.iter().enumerate() {
            s.push_str(&format!("  b[{}] = {b}\n", i + 1));
        }
    }
    if let Some(i) = c.offending_index {
        s.push_str(&format!("offending index: {} (1-based)\n", i + 1));
    }
    if let Some((i, j)) = &c.witness_pair {
        s.push_str(&format!(
            "witness: det A[{}] > det A[{}] (1-based)\n",
            one_based_set(i),
            one_based_set(j)
        ));
    }
    if c.single_index_extension {
        s.push_str("note: m=1 extension\n");
    }
    s
}

pub fn cmd_certify(path: &Path, method: &str, json: bool) -> Result<Outcome> {
    let registry = certifiers();
    let certifier = registry.get(method)?;
    let (a, parse_ms) = load(path)?;
    if let Some(limit) = certifier.max_dim() {
        if a.dim() > limit {
            return Err(Error::DimensionTooLarge { m: a.dim(), limit });
        }
    }
    let t = Instant::now();
    let cert = certifier.certify(&a)?;
    let compute_ms = ms_since(t);
    let code = if cert.is_increasing() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let out = if json {
        let payload = json!({
            "method_name": certifier.name(),
            "m": a.dim(),
            "max_inverse_diagonal": cert.max_inverse_diagonal(),
            "certificate": cert,
        });
        let mut env = ResultEnvelope::new("certify", a.fingerprint(), payload);
        env.timings.insert("parse_ms", parse_ms);
        env.timings.insert("certify_ms", compute_ms);
        env.to_json() + "\n"
    } else {
        certificate_text(&cert, certifier.name())
    };
    Ok(Outcome::ok(code, out))
}

pub fn cmd_threshold(path: &Path, json: bool) -> Result<Outcome> {
    let (a, parse_ms) = load(path)?;
    let t = Instant::now();
    let result = match scaling_threshold(&a) {
        Ok(th) => Some(th),
        Err(Error::NotPositiveDefinite) => None,
        Err(e) => return Err(e),
    };
    let compute_ms = ms_since(t);
    let code = if result.is_some() { EXIT_OK } else { EXIT_NEGATIVE };
    let out = if json {
        let payload = json!({
            "positive_definite": result.is_some(),
            "t_star": result.map(|r| r.t_star),
            "argmax_index": result.map(|r| r.argmax_index),
        });
        let mut env = ResultEnvelope::new("threshold", a.fingerprint(), payload);
        env.timings.insert("parse_ms", parse_ms);
        env.timings.insert("threshold_ms", compute_ms);
        env.to_json() + "\n"
    } else {
        match result {
            Some(r) => format!(
                "t* = {} (attained at index {}, 1-based)\n",
                r.t_star,
                r.argmax_index + 1
            ),
            None => "not positive definite\n".to_string(),
        }
    };
    Ok(Outcome::ok(code, out))
}

pub fn cmd_greedy(path: &Path, k: usize, exact: bool, strategy: &str, json: bool) -> Result<Outcome> {
    let registry = greedy_strategies();
    let strategy = registry.get(strategy)?;
    let (a, parse_ms) = load(path)?;
    let t = Instant::now();
    let mut trace = greedy_maxdet_with(&a, k, strategy)?;
    let greedy_ms = ms_since(t);
    let mut exact_part = None;
    let mut exact_ms = None;
    if exact {
        let t = Instant::now();
        let result = exact_maxdet(&a, k)?;
        let report = attach_guarantee(&mut trace, &result)?;
        exact_ms = Some(ms_since(t));
        exact_part = Some((result, report));
    }

    let out = if json {
        let payload = json!({
            "trace": trace,
            "exact": exact_part.as_ref().map(|(r, _)| r),
            "guarantee": exact_part.as_ref().map(|(_, g)| g),
        });
        let mut env = ResultEnvelope::new("greedy", a.fingerprint(), payload);
        env.timings.insert("parse_ms", parse_ms);
        env.timings.insert("greedy_ms", greedy_ms);
        if let Some(ms) = exact_ms {
            env.timings.insert("exact_ms", ms);
        }
        env.to_json() + "\n"
    } else {
        let mut s = format!("strategy: {}\n", trace.strategy);
        s.push_str(&format!(
            "selection (1-based): {}\n",
            one_based_list(&trace.selection_order)
        ));
        s.push_str(&format!("gains: {}\n", reals(&trace.marginal_gains)));
        s.push_str(&format!("final log det: {}\n", trace.final_log_det));
        if trace.stopped_early {
            s.push_str("stopped early: no candidate with nonnegative gain\n");
        }
        s.push_str(&format!(
            "certified increasing: {}\n",
            if trace.certified { "yes" } else { "no" }
        ));
        if let Some((r, g)) = &exact_part {
            s.push_str(&format!(
                "exact optimum: {} at {} (1-based)\n",
                r.best_log_det,
                one_based_set(&r.best_set)
            ));
            s.push_str(&format!("ratio: {}\n", g.ratio));
            let held = if g.bound_held { "yes" } else { "no" };
            if trace.certified {
                s.push_str(&format!("(1 - 1/e) bound held: {held}\n"));
            } else {
                s.push_str(&format!(
                    "(1 - 1/e) bound held: {held} (not guaranteed: matrix not certified)\n"
                ));
            }
        }
        s
    };
    Ok(Outcome::ok(EXIT_OK, out))
}

pub fn cmd_check(path: &Path, property: &str, json: bool) -> Result<Outcome> {
    let registry = property_checks();
    let selected: Vec<_> = if property == "all" {
        registry.iter().map(|(_, c)| c).collect()
    } else {
        vec![registry.get(property)?]
    };
    let (a, parse_ms) = load(path)?;
    if a.dim() > EXHAUSTIVE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            m: a.dim(),
            limit: EXHAUSTIVE_MAX_DIM,
        });
    }
    let t = Instant::now();
    let reports = selected
        .iter()
        .map(|c| c.run(&a))
        .collect::<Result<Vec<_>>>()?;
    let compute_ms = ms_since(t);
    let all_hold = reports.iter().all(|r| r.holds);
    let code = if all_hold { EXIT_OK } else { EXIT_NEGATIVE };
    let out = if json {
        let payload = json!({ "all_hold": all_hold, "reports": reports });
        let mut env = ResultEnvelope::new("check", a.fingerprint(), payload);
        env.timings.insert("parse_ms", parse_ms);
        env.timings.insert("check_ms", compute_ms);
        env.to_json() + "\n"
    } else {
        let mut s = String::new();
        for r in &reports {
            let status = if r.holds { "holds" } else { "FAILS" };
            match &r.note {
                Some(note) => s.push_str(&format!("{}: {status} ({note})\n", r.property)),
                None => s.push_str(&format!(
                    "{}: {status} (statistic = {:e}, tolerance = {:e})\n",
                    r.property, r.statistic, r.tolerance
                )),
            }
            if !r.holds && !r.witness.is_empty() {
                let w: Vec<String> = r.witness.iter().map(one_based_set).collect();
                s.push_str(&format!("  witness (1-based): {}\n", w.join(", ")));
            }
        }
        s
    };
    Ok(Outcome::ok(code, out))
}

pub fn cmd_gen(args: &GenArgs) -> Result<Outcome> {
    let family: Family = args.family.parse()?;
    let params = GenParams::parse(&args.params)?;
    let spec = GenSpec {
        family,
        m: args.m,
        seed: args.seed,
        params,
    };
    let text = format_matrix(&generate(&spec)?);
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| {
                Error::InvalidParams(format!("cannot write {}: {e}", path.display()))
            })?;
            Ok(Outcome::ok(EXIT_OK, String::new()))
        }
        None => Ok(Outcome::ok(EXIT_OK, text)),
    }
}

fn cmd_strategies() -> Outcome {
    let mut s = String::new();
    let certs = certifiers();
    s.push_str(&format!("{}: {}\n", certs.kind(), certs.names().join(", ")));
    let greedy = greedy_strategies();
    s.push_str(&format!("{}: {}\n", greedy.kind(), greedy.names().join(", ")));
    let props = property_checks();
    s.push_str(&format!("{}: {}, all\n", props.kind(), props.names().join(", ")));
    s.push_str(&format!(
        "matrix family: {}\n",
        Family::ALL.map(Family::cli_name).join(", ")
    ));
    Outcome::ok(EXIT_OK, s)
}
