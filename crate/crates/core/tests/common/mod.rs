//! Shared helpers for the integration tests: independent dense oracles and a
//! thin driver for the compiled binary.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use minorcert::{HermitianMatrix, IndexSet};
use num_complex::Complex64;
use serde_json::Value;

/// Cofactor expansion along the first row. Shares no code with the library.
pub fn laplace_det(rows: &[Vec<Complex64>]) -> Complex64 {
    let n = rows.len();
    match n {
        0 => Complex64::new(1.0, 0.0),
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        _ => {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..n {
                let minor: Vec<Vec<Complex64>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, &z)| z)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                acc += rows[0][c] * laplace_det(&minor) * sign;
            }
            acc
        }
    }
}

/// `det A[I]` by cofactor expansion; `1` for the empty set.
pub fn oracle_minor(a: &HermitianMatrix, set: &IndexSet) -> f64 {
    let rows: Vec<Vec<Complex64>> = set
        .indices()
        .iter()
        .map(|&i| set.indices().iter().map(|&j| a.get(i, j)).collect())
        .collect();
    laplace_det(&rows).re
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn oracle_inverse(a: &HermitianMatrix) -> Vec<Vec<Complex64>> {
    let m = a.dim();
    let mut aug: Vec<Vec<Complex64>> = (0..m)
        .map(|i| {
            let mut row: Vec<Complex64> = (0..m).map(|j| a.get(i, j)).collect();
            row.extend((0..m).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)));
            row
        })
        .collect();
    for col in 0..m {
        let p = (col..m)
            .max_by(|&x, &y| aug[x][col].norm().total_cmp(&aug[y][col].norm()))
            .unwrap();
        aug.swap(col, p);
        let piv = aug[col][col];
        for v in aug[col].iter_mut() {
            *v /= piv;
        }
        for r in 0..m {
            if r != col {
                let f = aug[r][col];
                let pivot_row = aug[col].clone();
                for (v, pv) in aug[r].iter_mut().zip(pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    aug.into_iter().map(|r| r[m..].to_vec()).collect()
}

/// Real rows `[[..]]` into a validated matrix.
pub fn real(rows: &[&[f64]]) -> HermitianMatrix {
    HermitianMatrix::from_real_rows(rows).unwrap()
}

/// `G·Gᴴ + shift·I` from a flat list of `2·m·cols` reals (re, im interleaved).
pub fn gram(m: usize, cols: usize, g: &[f64], shift: f64) -> HermitianMatrix {
    let at = |i: usize, c: usize| Complex64::new(g[2 * (i * cols + c)], g[2 * (i * cols + c) + 1]);
    let rows: Vec<Vec<Complex64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s: Complex64 = (0..cols).map(|c| at(i, c) * at(j, c).conj()).sum();
                    if i == j {
                        s += shift;
                    }
                    s
                })
                .collect()
        })
        .collect();
    HermitianMatrix::new(&rows).unwrap()
}

pub fn all_subsets(m: usize) -> impl Iterator<Item = IndexSet> {
    (0..1u64 << m).map(IndexSet::from_mask)
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_minorcert")
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_cli<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Run {
    let out = Command::new(bin()).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/result-envelope.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).expect("schema is shipped")).unwrap()
}

/// Validation errors of `instance` against the shipped schema, one per line.
pub fn schema_errors(instance: &Value) -> Vec<String> {
    let validator = jsonschema::validator_for(&schema()).expect("schema compiles");
    validator
        .iter_errors(instance)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect()
}
