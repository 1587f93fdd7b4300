//! Minimum-norm solves for short-and-wide sparse systems whose rows are
//! contiguous column spans (block bidiagonal systems, after ordering).
//!
//! The primary route forms the normal matrix `BBᵀ`, factors it with an
//! envelope Cholesky and returns `Bᵀ(BBᵀ)⁻¹r`. The fallback runs Householder
//! QR on `Bᵀ` directly, which avoids squaring the condition number.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Sparse matrix stored as one contiguous span of columns per row. Row
/// spans must have non-decreasing starts and ends.
#[derive(Clone, Debug, PartialEq)]
pub struct RowBanded {
    ncols: usize,
    rows: Vec<(usize, Vec<f64>)>,
}

impl RowBanded {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
        }
    }

    /// Appends a row whose nonzeros occupy columns `start..start+values.len()`.
    ///
    /// # Panics
    ///
    /// If the span leaves the matrix or breaks the monotone-span layout.
    pub fn push_row(&mut self, start: usize, values: Vec<f64>) {
        let end = start + values.len();
        assert!(end <= self.ncols, "row span exceeds column count");
        if let Some((s, v)) = self.rows.last() {
            assert!(start >= *s && end >= s + v.len(), "row spans must be monotone");
        }
        self.rows.push((start, values));
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    fn end(&self, i: usize) -> usize {
        self.rows[i].0 + self.rows[i].1.len()
    }

    /// `B x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|(s, v)| v.iter().zip(&x[*s..]).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Bᵀ y`.
    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols];
        for ((s, v), yi) in self.rows.iter().zip(y) {
            for (o, a) in out[*s..].iter_mut().zip(v) {
                *o += a * yi;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows(), self.ncols);
        for (i, (s, v)) in self.rows.iter().enumerate() {
            for (k, a) in v.iter().enumerate() {
                m[(i, s + k)] = *a;
            }
        }
        m
    }

    /// Lower envelope of `BBᵀ`.
    pub fn gram(&self) -> Envelope {
        let n = self.nrows();
        let mut lo = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(n);
        let mut first = 0;
        for i in 0..n {
            let (si, vi) = &self.rows[i];
            while self.end(first) <= *si {
                first += 1;
            }
            let entries = (first..=i)
                .map(|j| {
                    let (sj, vj) = &self.rows[j];
                    let from = (*si).max(*sj);
                    let to = self.end(i).min(self.end(j));
                    (from..to).map(|c| vi[c - si] * vj[c - sj]).sum()
                })
                .collect();
            lo.push(first);
            rows.push(entries);
        }
        Envelope { lo, rows }
    }
}

/// Lower-triangular envelope (skyline) storage: row `i` holds columns
/// `lo[i]..=i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    lo: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl Envelope {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Entry `(i, j)` with `j ≤ i`, zero outside the envelope.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j < self.lo[i] || j > i {
            0.0
        } else {
            self.rows[i][j - self.lo[i]]
        }
    }

    /// Half bandwidth: the widest row minus one.
    pub fn bandwidth(&self) -> usize {
        self.rows.iter().map(|r| r.len()).max().unwrap_or(1) - 1
    }

    /// Cholesky factor `L` (same envelope) of the symmetric matrix whose
    /// lower triangle is stored here.
    pub fn cholesky(&self) -> Result<Envelope> {
        let n = self.n();
        let mut l: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let lo_i = self.lo[i];
            let mut row = vec![0.0; i - lo_i + 1];
            for j in lo_i..=i {
                let lo_j = self.lo[j];
                let from = lo_i.max(lo_j);
                let mut acc = self.rows[i][j - lo_i];
                for k in from..j {
                    let lik = row[k - lo_i];
                    let ljk = if j == i { lik } else { l[j][k - lo_j] };
                    acc -= lik * ljk;
                }
                if j == i {
                    let diag = self.rows[i][i - lo_i];
                    if !(acc > f64::EPSILON * diag) || !acc.is_finite() {
                        return Err(Error::SystemRankDeficient);
                    }
                    row[j - lo_i] = libm::sqrt(acc);
                } else {
                    row[j - lo_i] = acc / l[j][j - lo_j];
                }
            }
            l.push(row);
        }
        Ok(Envelope {
            lo: self.lo.clone(),
            rows: l,
        })
    }

    /// Solves `L Lᵀ x = b` with `self` as the Cholesky factor `L`.
    pub fn cholesky_solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = b.to_vec();
        for i in 0..n {
            let lo = self.lo[i];
            let row = &self.rows[i];
            let mut acc = y[i];
            for k in lo..i {
                acc -= row[k - lo] * y[k];
            }
            y[i] = acc / row[i - lo];
        }
        for i in (0..n).rev() {
            let lo = self.lo[i];
            let row = &self.rows[i];
            y[i] /= row[i - lo];
            let xi = y[i];
            for k in lo..i {
                y[k] -= row[k - lo] * xi;
            }
        }
        y
    }
}

/// How a minimum-norm solve was carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveRoute {
    NormalEquations,
    Qr,
}

/// Minimum-norm solutions of `B w = r` for each right-hand side through the
/// normal equations `BBᵀ y = r`, `w = Bᵀ y`.
pub fn min_norm_normal_equations(b: &RowBanded, rhs: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
    let l = b.gram().cholesky()?;
    Ok(rhs
        .iter()
        .map(|r| b.apply_transpose(&l.cholesky_solve(r)))
        .collect())
}

/// Normal equations first, Householder QR of `Bᵀ` if the Cholesky
/// factorization breaks down.
pub fn min_norm_solve(b: &RowBanded, rhs: &[&[f64]]) -> Result<(Vec<Vec<f64>>, SolveRoute)> {
    match min_norm_normal_equations(b, rhs) {
        Ok(w) => Ok((w, SolveRoute::NormalEquations)),
        Err(Error::SystemRankDeficient) => {
            min_norm_qr(b, rhs).map(|w| (w, SolveRoute::Qr))
        }
        Err(e) => Err(e),
    }
}

struct Column {
    lo: usize,
    vals: Vec<f64>,
}

impl Column {
    fn hi(&self) -> usize {
        self.lo + self.vals.len()
    }

    fn cover(&mut self, lo: usize, hi: usize) {
        if lo < self.lo {
            let mut v = vec![0.0; self.lo - lo];
            v.extend_from_slice(&self.vals);
            self.vals = v;
            self.lo = lo;
        }
        if hi > self.hi() {
            self.vals.resize(hi - self.lo, 0.0);
        }
    }
}

struct Reflector {
    start: usize,
    v: Vec<f64>,
    beta: f64,
}

impl Reflector {
    fn apply(&self, x: &mut [f64]) {
        let s: f64 = self.v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        let f = self.beta * s;
        for (xi, vi) in x.iter_mut().zip(&self.v) {
            *xi -= f * vi;
        }
    }
}

/// Minimum-norm solutions of `B w = r` from a Householder QR factorization
/// `Bᵀ = QR` that keeps the band structure: `w = Q [R⁻ᵀ r; 0]`.
pub fn min_norm_qr(b: &RowBanded, rhs: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
    let n = b.nrows();
    let m = b.ncols();
    if n > m {
        return Err(Error::InvalidParameter(
            "minimum-norm solve needs at most as many rows as columns".into(),
        ));
    }
    let orig_start: Vec<usize> = b.rows.iter().map(|(s, _)| *s).collect();
    let mut cols: Vec<Column> = b
        .rows
        .iter()
        .map(|(s, v)| Column {
            lo: *s,
            vals: v.clone(),
        })
        .collect();
    let mut reflectors: Vec<Reflector> = Vec::with_capacity(n);
    let mut rdiag_max: f64 = 0.0;
    let mut reach = 0;
    for k in 0..n {
        let hi = cols[k].hi().max(k + 1);
        cols[k].cover(k, hi);
        let col = &mut cols[k];
        let x = &col.vals[k - col.lo..];
        let norm = libm::sqrt(x.iter().map(|a| a * a).sum());
        if !norm.is_finite() {
            return Err(Error::SystemRankDeficient);
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|a| a * a).sum();
        let beta = if vtv > 0.0 { 2.0 / vtv } else { 0.0 };
        col.vals.truncate(k + 1 - col.lo);
        col.vals[k - col.lo] = alpha;
        rdiag_max = rdiag_max.max(libm::fabs(alpha));
        let refl = Reflector { start: k, v, beta };
        reach = reach.max(hi);
        for kk in k + 1..n {
            // untouched columns keep their original span, which starts past `reach`
            if orig_start[kk] >= reach {
                break;
            }
            let c = &mut cols[kk];
            if c.hi() <= k || c.lo >= hi {
                continue;
            }
            c.cover(k, hi);
            let off = k - c.lo;
            refl.apply(&mut c.vals[off..off + (hi - k)]);
        }
        reflectors.push(refl);
    }
    let tol = rdiag_max * f64::EPSILON * n as f64;
    if cols
        .iter()
        .enumerate()
        .any(|(k, c)| !(libm::fabs(c.vals[k - c.lo]) > tol))
    {
        return Err(Error::SystemRankDeficient);
    }
    let solve = |r: &[f64]| {
        let mut z = vec![0.0; m];
        for k in 0..n {
            let c = &cols[k];
            let mut acc = r[k];
            for i in c.lo..k {
                acc -= c.vals[i - c.lo] * z[i];
            }
            z[k] = acc / c.vals[k - c.lo];
        }
        for refl in reflectors.iter().rev() {
            let end = refl.start + refl.v.len();
            refl.apply(&mut z[refl.start..end]);
        }
        z
    };
    Ok(rhs.iter().map(|r| solve(r)).collect())
}
