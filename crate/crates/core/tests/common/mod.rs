#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use oseledets_core::rng::UniformStream;
use oseledets_core::CocycleWindow;
use twofloat::TwoFloat;

/// Angle between the lines spanned by `v` and `w`.
pub fn line_angle(v: &DVector<f64>, w: &DVector<f64>) -> f64 {
    let (v, w) = (v.normalize(), w.normalize());
    let c = v.dot(&w).abs();
    let s = (&v - &w * v.dot(&w)).norm();
    s.atan2(c)
}

/// `A_n = diag(3, 2, 1)·(I + 0.4(Z_n − ½))` with `Z_n` uniform, on
/// `[start, start + len)`.
pub fn random_cocycle(seed: u64, start: i64, len: usize) -> CocycleWindow {
    let mut rng = UniformStream::new(seed);
    let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0, 1.0]));
    let ms = (0..len)
        .map(|_| {
            let z = rng.matrix(3, 3).add_scalar(-0.5) * 0.4;
            &d * (DMatrix::identity(3, 3) + z)
        })
        .collect();
    CocycleWindow::new(start, ms).unwrap()
}

/// Generic seeded window with uniform entries in `[-1, 1)` plus `shift·I`.
pub fn seeded_window(seed: u64, dim: usize, start: i64, len: usize, shift: f64) -> CocycleWindow {
    let mut rng = UniformStream::new(seed);
    let ms = (0..len)
        .map(|_| rng.matrix(dim, dim) * 2.0 - DMatrix::from_element(dim, dim, 1.0) + DMatrix::identity(dim, dim) * shift)
        .collect();
    CocycleWindow::new(start, ms).unwrap()
}

/// Dense double-double matrix, row-major.
#[derive(Clone, Debug)]
pub struct Dd {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<TwoFloat>,
}

impl Dd {
    pub fn from_f64(m: &DMatrix<f64>) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                data.push(TwoFloat::from(m[(r, c)]));
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_f64(&DMatrix::identity(n, n))
    }

    pub fn get(&self, r: usize, c: usize) -> TwoFloat {
        self.data[r * self.cols + c]
    }

    pub fn mul(&self, other: &Dd) -> Dd {
        assert_eq!(self.cols, other.rows);
        let mut data = vec![TwoFloat::from(0.0); self.rows * other.cols];
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = TwoFloat::from(0.0);
                for k in 0..self.cols {
                    acc += self.get(r, k) * other.get(k, c);
                }
                data[r * other.cols + c] = acc;
            }
        }
        Dd {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Dd {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        Dd {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn apply(&self, v: &[TwoFloat]) -> Vec<TwoFloat> {
        (0..self.rows)
            .map(|r| {
                let mut acc = TwoFloat::from(0.0);
                for (c, x) in v.iter().enumerate() {
                    acc += self.get(r, c) * *x;
                }
                acc
            })
            .collect()
    }

    pub fn scale(&mut self, s: TwoFloat) {
        for x in &mut self.data {
            *x *= s;
        }
    }

    pub fn frobenius(&self) -> TwoFloat {
        let mut acc = TwoFloat::from(0.0);
        for x in &self.data {
            acc += *x * *x;
        }
        acc.sqrt()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).hi())
    }
}

pub fn dd_vec(v: &DVector<f64>) -> Vec<TwoFloat> {
    v.iter().map(|&x| TwoFloat::from(x)).collect()
}

pub fn dd_dot(a: &[TwoFloat], b: &[TwoFloat]) -> TwoFloat {
    let mut acc = TwoFloat::from(0.0);
    for (x, y) in a.iter().zip(b) {
        acc += *x * *y;
    }
    acc
}

pub fn dd_normalize(v: &[TwoFloat]) -> Vec<TwoFloat> {
    let n = dd_dot(v, v).sqrt();
    v.iter().map(|x| *x / n).collect()
}

pub fn dd_to_f64(v: &[TwoFloat]) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().map(|x| x.hi()))
}

/// `A_{start+steps−1} ⋯ A_{start}` in double-double, rescaled by its
/// Frobenius norm after every factor; returns the matrix and the log scale.
pub fn dd_product(window: &CocycleWindow, start: i64, steps: usize) -> (Dd, f64) {
    let mut p = Dd::identity(window.dim());
    let mut log_scale = 0.0;
    for t in start..start + steps as i64 {
        p = Dd::from_f64(window.get(t).unwrap()).mul(&p);
        let n = p.frobenius();
        log_scale += n.ln().hi();
        p.scale(TwoFloat::from(1.0) / n);
    }
    (p, log_scale)
}

/// Leading eigenvectors of the symmetric positive semidefinite `g` by
/// deflated power iteration in double-double.
pub fn dd_leading_eigenvectors(g: &Dd, k: usize, iterations: usize) -> Vec<Vec<TwoFloat>> {
    let n = g.rows;
    let mut found: Vec<Vec<TwoFloat>> = Vec::new();
    for i in 0..k {
        let mut v: Vec<TwoFloat> = (0..n)
            .map(|c| TwoFloat::from(1.0 + 0.1 * ((c * 7 + i * 3) % 5) as f64))
            .collect();
        for _ in 0..iterations {
            for u in &found {
                let p = dd_dot(&v, u);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= p * *y;
                }
            }
            v = dd_normalize(&g.apply(&v));
        }
        for u in &found {
            let p = dd_dot(&v, u);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= p * *y;
            }
        }
        found.push(dd_normalize(&v));
    }
    found
}

/// Inverse of a 3×3 double-double matrix by cofactors.
pub fn dd_inverse3(m: &Dd) -> Dd {
    assert_eq!((m.rows, m.cols), (3, 3));
    let a = |r: usize, c: usize| m.get(r % 3, c % 3);
    let mut cof = vec![TwoFloat::from(0.0); 9];
    for r in 0..3 {
        for c in 0..3 {
            cof[c * 3 + r] =
                a(r + 1, c + 1) * a(r + 2, c + 2) - a(r + 1, c + 2) * a(r + 2, c + 1);
        }
    }
    let det = m.get(0, 0) * cof[0] + m.get(0, 1) * cof[3] + m.get(0, 2) * cof[6];
    Dd {
        rows: 3,
        cols: 3,
        data: cof.into_iter().map(|x| x / det).collect(),
    }
}

pub fn dd_cross(a: &[TwoFloat], b: &[TwoFloat]) -> Vec<TwoFloat> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
