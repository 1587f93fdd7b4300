//! Small dense helpers shared by the methods: sign conventions, positive
//! QR, sorted SVD.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

/// Index of the entry with the largest magnitude (first one on ties).
fn dominant_index<'a>(entries: impl Iterator<Item = &'a f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, x) in entries.enumerate() {
        let a = libm::fabs(*x);
        match best {
            Some((_, b)) if a <= b => {}
            _ => best = Some((i, a)),
        }
    }
    best.map(|(i, _)| i)
}

/// Flips `v` so its largest-magnitude entry is positive.
pub fn fix_sign(v: &mut DVector<f64>) {
    if let Some(i) = dominant_index(v.iter()) {
        if v[i] < 0.0 {
            v.neg_mut();
        }
    }
}

/// Column-wise [`fix_sign`].
pub fn fix_column_signs(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        if let Some(i) = dominant_index(col.iter()) {
            if col[i] < 0.0 {
                col.neg_mut();
            }
        }
    }
}

/// Unit vector in the direction of `v`, or `None` when `v` is zero,
/// denormal-small or non-finite.
pub fn normalized(v: &DVector<f64>) -> Option<DVector<f64>> {
    let n = v.norm();
    if n.is_finite() && n >= f64::MIN_POSITIVE {
        Some(v / n)
    } else {
        None
    }
}

/// Thin QR with the diagonal of `R` made non-negative, so the factors are
/// the Gram-Schmidt ones. `m` is `d×k` with `k ≤ d`.
pub fn qr_positive(m: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = m.qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows() {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    (q, r)
}

/// Singular value decomposition with singular values sorted in
/// descending order.
pub struct SortedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    /// Right singular vectors as columns.
    pub v: DMatrix<f64>,
}

/// Full SVD of a square (or tall) matrix, sorted descending.
/// Returns `None` if the iteration fails to converge (non-finite input).
pub fn sorted_svd(m: &DMatrix<f64>) -> Option<SortedSvd> {
    let svd = m.clone().try_svd(true, true, f64::EPSILON, 10_000)?;
    let u = svd.u?;
    let v_t = svd.v_t?;
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let k = order.len();
    let mut su = DMatrix::zeros(u.nrows(), k);
    let mut sv_cols = DMatrix::zeros(v_t.ncols(), k);
    let mut values = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        su.set_column(dst, &u.column(src));
        sv_cols.set_column(dst, &v_t.row(src).transpose());
        values.push(sv[src]);
    }
    Some(SortedSvd {
        u: su,
        singular_values: values,
        v: sv_cols,
    })
}

/// `‖QᵀQ − I‖_F` for a matrix with orthonormal columns.
pub fn orthonormality_defect(q: &DMatrix<f64>) -> f64 {
    let g = q.transpose() * q;
    (g - DMatrix::identity(q.ncols(), q.ncols())).norm()
}
