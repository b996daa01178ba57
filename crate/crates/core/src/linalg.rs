//! Dense complex Hermitian matrices: validation, natural-order LDLᴴ
//! factorization, determinants, inverses and principal submatrices.
//!
//! Matrices are stored row-major. Everything here is immutable after
//! construction.

use std::fmt;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Relative symmetry tolerance used when a caller does not supply one.
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-9;

/// Pivots at or below `PIVOT_RELATIVE_THRESHOLD * m * max|a_jj|` are treated as zero.
pub const PIVOT_RELATIVE_THRESHOLD: f64 = 1e-12;

/// Above this dimension determinants are formed from the log of the pivots.
const DIRECT_PRODUCT_MAX_DIM: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: usize,
    data: Vec<Complex64>,
}

/// Accepts `raw` if it is Hermitian up to `tol * (1 + max|raw_ij|)` and returns
/// the exact symmetrization `(raw + rawᴴ) / 2` with a real diagonal.
#[allow(clippy::needless_range_loop)]
pub fn validate_hermitian(raw: &[Vec<Complex64>], tol: f64) -> Result<HermitianMatrix> {
    let m = raw.len();
    if m == 0 {
        return Err(Error::EmptyMatrix);
    }
    for (row, r) in raw.iter().enumerate() {
        if r.len() != m {
            return Err(Error::NotSquare {
                row,
                found: r.len(),
                expected: m,
            });
        }
        for (col, z) in r.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
    }

    let mut max_abs = 0.0f64;
    let mut deviation = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            max_abs = max_abs.max(raw[i][j].norm());
            deviation = deviation.max((raw[i][j] - raw[j][i].conj()).norm());
        }
    }
    let allowed = tol * (1.0 + max_abs);
    if deviation > allowed {
        return Err(Error::NotHermitian { deviation, allowed });
    }

    let mut data = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            if i == j {
                data.push(Complex64::new(raw[i][i].re, 0.0));
            } else {
                data.push((raw[i][j] + raw[j][i].conj()) * 0.5);
            }
        }
    }
    Ok(HermitianMatrix { m, data })
}

impl HermitianMatrix {
    pub fn new(raw: &[Vec<Complex64>]) -> Result<Self> {
        validate_hermitian(raw, DEFAULT_HERMITIAN_TOL)
    }

    /// Real symmetric input, mostly for tests and fixtures.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let raw: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::new(&raw)
    }

    pub fn identity(m: usize) -> Self {
        Self::diagonal(&vec![1.0; m])
    }

    /// Panics if `diag` is empty or has a non-finite entry.
    pub fn diagonal(diag: &[f64]) -> Self {
        assert!(!diag.is_empty(), "diagonal matrix needs at least one entry");
        assert!(diag.iter().all(|d| d.is_finite()), "non-finite diagonal");
        let m = diag.len();
        let mut data = vec![Complex64::new(0.0, 0.0); m * m];
        for (i, &d) in diag.iter().enumerate() {
            data[i * m + i] = Complex64::new(d, 0.0);
        }
        Self { m, data }
    }

    /// Builds from row-major data that the caller guarantees is exactly Hermitian.
    pub(crate) fn from_row_major_unchecked(m: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), m * m);
        Self { m, data }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.m + j]
    }

    pub fn as_row_major(&self) -> &[Complex64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.m).map(|r| r.to_vec()).collect()
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.get(i, i).re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        (0..self.m).fold(0.0, |acc, i| acc.max(self.get(i, i).re.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// `t·A`. Panics on a non-finite factor.
    pub fn scaled(&self, t: f64) -> Self {
        assert!(t.is_finite(), "scale factor must be finite");
        Self {
            m: self.m,
            data: self.data.iter().map(|z| z * t).collect(),
        }
    }

    /// `A − s·I`.
    pub fn shifted(&self, s: f64) -> Self {
        let mut data = self.data.clone();
        for i in 0..self.m {
            data[i * self.m + i].re -= s;
        }
        Self { m: self.m, data }
    }

    /// `PᵀAP` where column `i` of `P` is `e_{perm[i]}`, i.e. the result has
    /// entry `(i, j) = A[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.m);
        let mut data = Vec::with_capacity(self.m * self.m);
        for &pi in perm {
            for &pj in perm {
                data.push(self.get(pi, pj));
            }
        }
        Self { m: self.m, data }
    }

    /// Hex SHA-256 of the canonical text form (dimension, then every entry's
    /// real and imaginary parts with 17 significant digits, row-major).
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("{}\n", self.m).as_bytes());
        for z in &self.data {
            hasher.update(format!("{:.16e} {:.16e}\n", z.re, z.im).as_bytes());
        }
        hex_lower(&hasher.finalize())
    }
}

fn hex_lower(bytes: &[u8]) -> String {
    use std::fmt::Write;
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// A subset of `{0, …, m−1}` stored as a strictly increasing list.
///
/// Ordering is lexicographic on the index sequence, so `∅ < {0} < {0,1} < {0,2} < {1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndexSet(indices));
        }
        Ok(Self(indices))
    }

    pub fn from_unsorted<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut v: Vec<usize> = it.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn full(m: usize) -> Self {
        Self((0..m).collect())
    }

    pub fn singleton(i: usize) -> Self {
        Self(vec![i])
    }

    /// Bit `i` of `mask` set ⇔ `i` in the set.
    pub fn from_mask(mask: u64) -> Self {
        Self((0..64).filter(|&i| mask >> i & 1 == 1).collect())
    }

    /// Panics if an index is ≥ 64.
    pub fn to_mask(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &i| {
            assert!(i < 64, "index {i} does not fit a 64-bit mask");
            acc | 1 << i
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn with(&self, j: usize) -> Self {
        match self.0.binary_search(&j) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut v = self.0.clone();
                v.insert(pos, j);
                Self(v)
            }
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_unsorted(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.0.iter().copied().filter(|&i| other.contains(i)).collect())
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    /// Complement in `{0, …, m−1}`.
    pub fn complement(&self, m: usize) -> Self {
        Self((0..m).filter(|&i| !self.contains(i)).collect())
    }

    pub fn check_range(&self, m: usize) -> Result<()> {
        match self.0.last() {
            Some(&index) if index >= m => Err(Error::IndexOutOfRange { index, m }),
            _ => Ok(()),
        }
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

/// `A = L·diag(d)·Lᴴ` computed in natural order.
///
/// For positive definite input `d_1···d_k` is the leading principal minor of
/// order `k`. Zero pivots (within the threshold) whose column is consistent
/// with semidefiniteness are kept and their column of `L` zeroed. A zero pivot
/// with an inconsistent column is an indefinite breakdown; the factorization
/// stops there and `is_complete()` is false.
#[derive(Clone, Debug)]
pub struct LdlFactor {
    m: usize,
    lower: Vec<Complex64>,
    pivots: Vec<f64>,
    verdict: Definiteness,
    threshold: f64,
}

pub fn ldl_factor(a: &HermitianMatrix) -> LdlFactor {
    let threshold = PIVOT_RELATIVE_THRESHOLD * a.dim() as f64 * a.max_abs_diagonal();
    ldl_factor_with_threshold(a, threshold)
}

pub(crate) fn ldl_factor_with_threshold(a: &HermitianMatrix, threshold: f64) -> LdlFactor {
    let m = a.dim();
    let mut lower = vec![Complex64::new(0.0, 0.0); m * m];
    let mut pivots: Vec<f64> = Vec::with_capacity(m);
    let mut negative = false;
    let mut zero = false;

    for k in 0..m {
        lower[k * m + k] = Complex64::new(1.0, 0.0);

        let mut d = a.get(k, k).re;
        for j in 0..k {
            d -= lower[k * m + j].norm_sqr() * pivots[j];
        }

        // Schur-complement column below the pivot.
        let column: Vec<Complex64> = (k + 1..m)
            .map(|i| {
                let mut c = a.get(i, k);
                for j in 0..k {
                    c -= lower[i * m + j] * lower[k * m + j].conj() * pivots[j];
                }
                c
            })
            .collect();

        if d.abs() <= threshold {
            // A PSD Schur complement satisfies |c_i|² ≤ d·s_ii.
            let d_eff = d.max(0.0) + threshold;
            for (offset, c) in column.iter().enumerate() {
                let i = k + 1 + offset;
                let mut s = a.get(i, i).re;
                for j in 0..k {
                    s -= lower[i * m + j].norm_sqr() * pivots[j];
                }
                if c.norm_sqr() > d_eff * (s.max(0.0) + threshold) {
                    pivots.push(d);
                    return LdlFactor {
                        m,
                        lower,
                        pivots,
                        verdict: Definiteness::Indefinite,
                        threshold,
                    };
                }
            }
            zero = true;
            pivots.push(d);
            continue;
        }

        if d < 0.0 {
            negative = true;
        }
        for (offset, c) in column.into_iter().enumerate() {
            lower[(k + 1 + offset) * m + k] = c / d;
        }
        pivots.push(d);
    }

    let verdict = if negative {
        Definiteness::Indefinite
    } else if zero {
        Definiteness::PositiveSemidefinite
    } else {
        Definiteness::PositiveDefinite
    };
    LdlFactor {
        m,
        lower,
        pivots,
        verdict,
        threshold,
    }
}

/// A determinant together with its natural log magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Determinant {
    pub value: f64,
    /// `ln|det|`; `-inf` when the determinant is zero.
    pub log_abs: f64,
    pub sign: i8,
}

impl Determinant {
    pub const ZERO: Determinant = Determinant {
        value: 0.0,
        log_abs: f64::NEG_INFINITY,
        sign: 0,
    };
}

impl LdlFactor {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn verdict(&self) -> Definiteness {
        self.verdict
    }

    pub fn is_positive_definite(&self) -> bool {
        self.verdict == Definiteness::PositiveDefinite
    }

    /// Pivots computed so far; shorter than `m` after an indefinite breakdown.
    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn is_complete(&self) -> bool {
        self.pivots.len() == self.m
    }

    pub fn lower(&self, i: usize, j: usize) -> Complex64 {
        self.lower[i * self.m + j]
    }

    /// `L·diag(d)·Lᴴ`, row-major. Only meaningful for complete factorizations.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let m = self.m;
        let mut out = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..m {
            for j in 0..m {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..=i.min(j).min(self.pivots.len().saturating_sub(1)) {
                    s += self.lower(i, k) * self.lower(j, k).conj() * self.pivots[k];
                }
                out[i * m + j] = s;
            }
        }
        out
    }

    /// Determinant from the pivots. Returns `None` after an indefinite
    /// breakdown, where the pivots do not determine it.
    pub fn determinant(&self) -> Option<Determinant> {
        if !self.is_complete() {
            return None;
        }
        if self.verdict == Definiteness::PositiveSemidefinite {
            return Some(Determinant::ZERO);
        }
        if self.pivots.iter().any(|&d| d.abs() <= self.threshold) {
            // Indefinite with a zero pivot elsewhere.
            return Some(Determinant::ZERO);
        }
        let log_abs: f64 = self.pivots.iter().map(|d| d.abs().ln()).sum();
        let sign: i8 = if self.pivots.iter().filter(|&&d| d < 0.0).count() % 2 == 0 {
            1
        } else {
            -1
        };
        let value = if self.m <= DIRECT_PRODUCT_MAX_DIM {
            self.pivots.iter().product()
        } else {
            f64::from(sign) * log_abs.exp()
        };
        Some(Determinant {
            value,
            log_abs,
            sign,
        })
    }
}

pub fn log_determinant(a: &HermitianMatrix) -> Determinant {
    let factor = ldl_factor(a);
    factor
        .determinant()
        .unwrap_or_else(|| pivoted_determinant(a))
}

/// `det A`; zero for semidefinite input with a zero pivot.
pub fn determinant(a: &HermitianMatrix) -> f64 {
    log_determinant(a).value
}

/// Partial-pivoting elimination, used only when natural-order LDLᴴ breaks down
/// on an indefinite matrix.
fn pivoted_determinant(a: &HermitianMatrix) -> Determinant {
    let m = a.dim();
    let mut w = a.as_row_major().to_vec();
    let mut sign = 1i8;
    let mut log_abs = 0.0;
    let mut value = Complex64::new(1.0, 0.0);
    for k in 0..m {
        let (p, best) = (k..m)
            .map(|i| (i, w[i * m + k].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            return Determinant::ZERO;
        }
        if p != k {
            for j in 0..m {
                w.swap(k * m + j, p * m + j);
            }
            sign = -sign;
            value = -value;
        }
        let piv = w[k * m + k];
        value *= piv;
        log_abs += piv.norm().ln();
        for i in k + 1..m {
            let f = w[i * m + k] / piv;
            for j in k..m {
                let t = w[k * m + j];
                w[i * m + j] -= f * t;
            }
        }
    }
    // det of a Hermitian matrix is real.
    let re = value.re;
    let sign = if re > 0.0 {
        1
    } else if re < 0.0 {
        -1
    } else {
        0
    };
    Determinant {
        value: if m <= DIRECT_PRODUCT_MAX_DIM {
            re
        } else {
            f64::from(sign) * log_abs.exp()
        },
        log_abs,
        sign,
    }
}

/// `A⁻¹` via `L⁻ᴴ·D⁻¹·L⁻¹`, symmetrized.
pub fn inverse(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let factor = ldl_factor(a);
    if !factor.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(inverse_from_factor(&factor))
}

pub(crate) fn inverse_from_factor(factor: &LdlFactor) -> HermitianMatrix {
    let m = factor.dim();
    // X = L⁻¹ by forward substitution, unit lower triangular.
    let mut x = vec![Complex64::new(0.0, 0.0); m * m];
    for j in 0..m {
        x[j * m + j] = Complex64::new(1.0, 0.0);
        for i in j + 1..m {
            let mut s = Complex64::new(0.0, 0.0);
            for k in j..i {
                s += factor.lower(i, k) * x[k * m + j];
            }
            x[i * m + j] = -s;
        }
    }
    // B = Xᴴ D⁻¹ X
    let d = factor.pivots();
    let mut b = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in i..m {
            let mut s = Complex64::new(0.0, 0.0);
            for k in j..m {
                s += x[k * m + i].conj() * x[k * m + j] / d[k];
            }
            b[i * m + j] = s;
        }
    }
    for i in 0..m {
        b[i * m + i].im = 0.0;
        for j in 0..i {
            b[i * m + j] = b[j * m + i].conj();
        }
    }
    HermitianMatrix::from_row_major_unchecked(m, b)
}

/// `‖A‖₁·‖A⁻¹‖₁`, an upper bound on the 2-norm condition number times at most `m`.
pub fn condition_estimate(a: &HermitianMatrix) -> Result<f64> {
    let b = inverse(a)?;
    Ok(one_norm(a) * one_norm(&b))
}

fn one_norm(a: &HermitianMatrix) -> f64 {
    let m = a.dim();
    (0..m)
        .map(|j| (0..m).map(|i| a.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `A[I]` with rows and columns in increasing index order.
pub fn principal_submatrix(a: &HermitianMatrix, set: &IndexSet) -> Result<HermitianMatrix> {
    if set.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    set.check_range(a.dim())?;
    let idx = set.indices();
    let mut data = Vec::with_capacity(idx.len() * idx.len());
    for &i in idx {
        for &j in idx {
            data.push(a.get(i, j));
        }
    }
    Ok(HermitianMatrix::from_row_major_unchecked(idx.len(), data))
}
