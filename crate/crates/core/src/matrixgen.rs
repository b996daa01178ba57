//! Seeded test-matrix generators.
//!
//! Random entries come from ChaCha20 seeded with `seed`, one stream per
//! entry in row-major order, so an entry does not depend on how many others
//! were drawn. Normals use the inverse CDF of a 53-bit uniform; complex
//! entries take independent real and imaginary parts scaled by `1/√2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    RandomPd,
    RandomPsd,
    Diagonal,
    Tridiagonal,
    InverseOfCorrelation,
    ScaledIdentity,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::RandomPd,
        Family::RandomPsd,
        Family::Diagonal,
        Family::Tridiagonal,
        Family::InverseOfCorrelation,
        Family::ScaledIdentity,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            Family::RandomPd => "random-pd",
            Family::RandomPsd => "random-psd",
            Family::Diagonal => "diagonal",
            Family::Tridiagonal => "tridiagonal",
            Family::InverseOfCorrelation => "inverse-correlation",
            Family::ScaledIdentity => "scaled-identity",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.cli_name() == s)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "matrix family",
                name: s.to_string(),
                available: Family::ALL.map(Family::cli_name).join(", "),
            })
    }
}

/// Family-specific parameters. Unused fields are ignored by a family.
#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    /// Overall factor applied to every family.
    pub scale: f64,
    /// Off-diagonal correlation for `InverseOfCorrelation`.
    pub rho: f64,
    /// Rank deficit for `RandomPsd`.
    pub deficit: usize,
    /// Explicit entries for `Diagonal`; drawn log-normally when absent.
    pub diag: Option<Vec<f64>>,
    /// Main and off diagonal of `Tridiagonal`.
    pub main: f64,
    pub off: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            scale: 1.0,
            rho: 0.0,
            deficit: 1,
            diag: None,
            main: 2.0,
            off: 1.0,
        }
    }
}

impl GenParams {
    /// Parses `key=value` items (`scale`, `rho`, `deficit`, `diag`, `main`,
    /// `off`). Items may also be comma-separated within one string; `diag`
    /// takes colon-separated values, e.g. `diag=2:3:5`.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let mut p = Self::default();
        for item in items.iter().flat_map(|s| s.as_ref().split(',')) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidParams(format!("expected key=value, got '{item}'")))?;
            let real = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParams(format!("bad number for {key}: '{v}'")))
            };
            match key.trim() {
                "scale" => p.scale = real(value)?,
                "rho" => p.rho = real(value)?,
                "main" => p.main = real(value)?,
                "off" => p.off = real(value)?,
                "deficit" => {
                    p.deficit = value.trim().parse().map_err(|_| {
                        Error::InvalidParams(format!("bad integer for deficit: '{value}'"))
                    })?
                }
                "diag" => p.diag = Some(value.split(':').map(real).collect::<Result<_>>()?),
                other => return Err(Error::InvalidParams(format!("unknown parameter '{other}'"))),
            }
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub family: Family,
    pub m: usize,
    pub seed: u64,
    pub params: GenParams,
}

impl GenSpec {
    pub fn new(family: Family, m: usize, seed: u64) -> Self {
        Self {
            family,
            m,
            seed,
            params: GenParams::default(),
        }
    }

    pub fn with_params(mut self, params: GenParams) -> Self {
        self.params = params;
        self
    }

    pub fn scale(mut self, scale: f64) -> Self {
        self.params.scale = scale;
        self
    }

    pub fn rho(mut self, rho: f64) -> Self {
        self.params.rho = rho;
        self
    }

    pub fn deficit(mut self, deficit: usize) -> Self {
        self.params.deficit = deficit;
        self
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

fn uniform_open(bits: u64) -> f64 {
    ((bits >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid parameters")
}

fn entry_stream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `rows × cols` complex Ginibre matrix, row-major.
fn ginibre(rows: usize, cols: usize, seed: u64) -> Vec<Complex64> {
    let normal = standard_normal();
    let half = std::f64::consts::FRAC_1_SQRT_2;
    (0..rows * cols)
        .map(|e| {
            let mut rng = entry_stream(seed, e as u64);
            let re = normal.inverse_cdf(uniform_open(rng.next_u64()));
            let im = normal.inverse_cdf(uniform_open(rng.next_u64()));
            Complex64::new(re * half, im * half)
        })
        .collect()
}

/// `G·Gᴴ + ridge·I` for `G` of shape `m × n`, exactly Hermitian.
fn gram(g: &[Complex64], m: usize, n: usize, ridge: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in i..m {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                s += g[i * n + k] * g[j * n + k].conj();
            }
            if i == j {
                out[i * m + i] = Complex64::new(s.re + ridge, 0.0);
            } else {
                out[i * m + j] = s;
                out[j * m + i] = s.conj();
            }
        }
    }
    out
}

pub fn generate(spec: &GenSpec) -> Result<HermitianMatrix> {
    let m = spec.m;
    let p = &spec.params;
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    if !(p.scale.is_finite() && p.scale > 0.0) {
        return Err(invalid(format!("scale must be positive and finite, got {}", p.scale)));
    }

    let data: Vec<Complex64> = match spec.family {
        Family::RandomPd => gram(&ginibre(m, m, spec.seed), m, m, 1e-6 * m as f64),
        Family::RandomPsd => {
            if p.deficit >= m {
                return Err(invalid(format!("deficit {} must be below m = {m}", p.deficit)));
            }
            let n = m - p.deficit;
            gram(&ginibre(m, n, spec.seed), m, n, 0.0)
        }
        Family::Diagonal => {
            let diag = match &p.diag {
                Some(d) => {
                    if d.len() != m {
                        return Err(invalid(format!("diag has {} entries, expected {m}", d.len())));
                    }
                    if d.iter().any(|x| !x.is_finite() || *x < 0.0) {
                        return Err(invalid("diag entries must be finite and nonnegative"));
                    }
                    d.clone()
                }
                None => {
                    let normal = standard_normal();
                    (0..m)
                        .map(|i| {
                            let mut rng = entry_stream(spec.seed, i as u64);
                            normal.inverse_cdf(uniform_open(rng.next_u64())).exp()
                        })
                        .collect()
                }
            };
            HermitianMatrix::diagonal(&diag).as_row_major().to_vec()
        }
        Family::Tridiagonal => {
            if !p.main.is_finite() || !p.off.is_finite() {
                return Err(invalid("tridiagonal entries must be finite"));
            }
            let mut d = vec![Complex64::new(0.0, 0.0); m * m];
            for i in 0..m {
                d[i * m + i] = Complex64::new(p.main, 0.0);
                if i + 1 < m {
                    d[i * m + i + 1] = Complex64::new(p.off, 0.0);
                    d[(i + 1) * m + i] = Complex64::new(p.off, 0.0);
                }
            }
            d
        }
        Family::InverseOfCorrelation => {
            let rho = p.rho;
            if !rho.is_finite() || rho.abs() >= 1.0 {
                return Err(invalid(format!("|rho| must be below 1, got {rho}")));
            }
            let denom = 1.0 + (m as f64 - 1.0) * rho;
            if denom <= 0.0 {
                return Err(invalid(format!(
                    "rho = {rho} gives a singular or indefinite correlation matrix for m = {m}"
                )));
            }
            // ((1−ρ)I + ρ11ᵀ)⁻¹ = (I − ρ/(1 + (m−1)ρ)·11ᵀ) / (1−ρ)
            let c = rho / denom;
            let inv = 1.0 / (1.0 - rho);
            let mut d = vec![Complex64::new(-c * inv, 0.0); m * m];
            for i in 0..m {
                d[i * m + i] = Complex64::new((1.0 - c) * inv, 0.0);
            }
            d
        }
        Family::ScaledIdentity => HermitianMatrix::identity(m).as_row_major().to_vec(),
    };

    let a = HermitianMatrix::from_row_major_unchecked(m, data);
    Ok(if p.scale == 1.0 { a } else { a.scaled(p.scale) })
}
