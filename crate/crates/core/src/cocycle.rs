//! Cocycle data model: the matrix window, normalized products and
//! orthonormal frames shared by every method.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// A contiguous run of `d×d` matrices, `matrices[i] = A_{start+i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleWindow {
    dim: usize,
    start: i64,
    matrices: Vec<DMatrix<f64>>,
}

impl CocycleWindow {
    pub fn new(start: i64, matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::InvalidParameter("empty cocycle window".into()));
        };
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::InvalidParameter("zero-dimensional matrices".into()));
        }
        for (i, m) in matrices.iter().enumerate() {
            let time = start + i as i64;
            if m.nrows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.nrows(),
                });
            }
            if m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.ncols(),
                });
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { time });
            }
        }
        Ok(Self {
            dim,
            start,
            matrices,
        })
    }

    /// Same matrix at every time in `[start, start+len)`.
    pub fn constant(start: i64, len: usize, matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(start, alloc::vec![matrix; len])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// First time index covered.
    pub fn start(&self) -> i64 {
        self.start
    }

    /// Last time index covered (inclusive).
    pub fn end(&self) -> i64 {
        self.start + self.matrices.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    /// `A_time`, if covered.
    pub fn get(&self, time: i64) -> Option<&DMatrix<f64>> {
        let offset = time.checked_sub(self.start)?;
        usize::try_from(offset)
            .ok()
            .and_then(|i| self.matrices.get(i))
    }

    /// `A_time`; callers must have checked coverage with [`Self::require`].
    pub(crate) fn at(&self, time: i64) -> &DMatrix<f64> {
        &self.matrices[(time - self.start) as usize]
    }

    /// Checks that every `A_n` with `first ≤ n ≤ last` is available.
    /// An empty range (`last < first`) always succeeds.
    pub fn require(&self, first: i64, last: i64) -> Result<()> {
        if last < first || (first >= self.start && last <= self.end()) {
            Ok(())
        } else {
            Err(Error::OutOfWindow {
                requested: (first, last),
                available: (self.start, self.end()),
            })
        }
    }

    /// The cocycle `c·A_n`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            start: self.start,
            matrices: self.matrices.iter().map(|m| m * c).collect(),
        }
    }

    pub(crate) fn check_vector(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            })
        }
    }
}

/// Pushes `v` through `A_{start}, …, A_{start+steps-1}`, normalizing after
/// each step. Returns the unit image and `log‖A(start, steps)v‖ − log‖v‖`.
pub fn propagate(
    window: &CocycleWindow,
    start: i64,
    steps: usize,
    v: &DVector<f64>,
) -> Result<(DVector<f64>, f64)> {
    window.check_vector(v)?;
    window.require(start, start + steps as i64 - 1)?;
    let mut w = linalg::normalized(v).ok_or(Error::VectorAnnihilated { time: start })?;
    let mut log_growth = 0.0;
    for t in start..start + steps as i64 {
        let next = window.at(t) * &w;
        let n = next.norm();
        if !(n.is_finite() && n >= f64::MIN_POSITIVE) {
            return Err(Error::VectorAnnihilated { time: t });
        }
        log_growth += libm::log(n);
        w = next / n;
    }
    Ok((w, log_growth))
}

/// A matrix product kept as `exp(log_scale)·matrix` with `matrix` of order
/// one; the scale is `‖·‖_F/√d` after each factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledProduct {
    pub matrix: DMatrix<f64>,
    pub log_scale: f64,
}

impl ScaledProduct {
    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
            log_scale: 0.0,
        }
    }

    fn renormalize(&mut self) {
        let d = self.matrix.nrows() as f64;
        let s = self.matrix.norm() / libm::sqrt(d);
        if s > 0.0 && s.is_finite() {
            self.matrix /= s;
            self.log_scale += libm::log(s);
        } else if s == 0.0 {
            self.log_scale = f64::NEG_INFINITY;
        }
    }

    /// Left-multiplies by the next factor.
    pub fn accumulate(&mut self, factor: &DMatrix<f64>) {
        self.matrix = factor * &self.matrix;
        self.renormalize();
    }

    /// The product `later ∘ self`.
    pub fn then(&self, later: &ScaledProduct) -> ScaledProduct {
        let mut p = ScaledProduct {
            matrix: &later.matrix * &self.matrix,
            log_scale: self.log_scale + later.log_scale,
        };
        p.renormalize();
        p
    }

    /// `exp(log_scale)·matrix`; overflows for long products.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        &self.matrix * libm::exp(self.log_scale)
    }
}

/// `A_{start+steps-1}···A_{start}` as a [`ScaledProduct`].
pub fn scaled_product(window: &CocycleWindow, start: i64, steps: usize) -> Result<ScaledProduct> {
    if steps == 0 {
        return Err(Error::InvalidParameter("product needs at least one step".into()));
    }
    window.require(start, start + steps as i64 - 1)?;
    let mut p = ScaledProduct::identity(window.dim());
    for t in start..start + steps as i64 {
        p.accumulate(window.at(t));
    }
    Ok(p)
}

/// `d×k` matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalFrame {
    columns: DMatrix<f64>,
}

impl OrthonormalFrame {
    pub const TOLERANCE: f64 = 1e-10;

    /// Wraps `columns` after checking `QᵀQ = I` within [`Self::TOLERANCE`].
    pub fn new(columns: DMatrix<f64>) -> Result<Self> {
        let defect = linalg::orthonormality_defect(&columns);
        if defect <= Self::TOLERANCE {
            Ok(Self { columns })
        } else {
            Err(Error::InvalidParameter(format!(
                "frame columns not orthonormal (defect {defect:.3e})"
            )))
        }
    }

    pub(crate) fn from_trusted(columns: DMatrix<f64>) -> Self {
        debug_assert!(linalg::orthonormality_defect(&columns) <= Self::TOLERANCE);
        Self { columns }
    }

    /// Frame with no columns.
    pub fn empty(dim: usize) -> Self {
        Self {
            columns: DMatrix::zeros(dim, 0),
        }
    }

    /// Orthonormalizes the columns of `m` by positive-diagonal QR.
    pub fn orthonormalize(m: DMatrix<f64>) -> Self {
        let (q, _) = linalg::qr_positive(m);
        Self { columns: q }
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn k(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn column(&self, i: usize) -> DVector<f64> {
        self.columns.column(i).into_owned()
    }

    /// The first `k` columns.
    pub fn leading(&self, k: usize) -> Self {
        Self {
            columns: self.columns.columns(0, k).into_owned(),
        }
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.columns
    }
}

/// Singular vectors of a product together with its singular values.
#[derive(Clone, Debug)]
pub struct SingularFrame {
    pub frame: OrthonormalFrame,
    /// `σ₁ ≥ … ≥ σ_k` of the normalized product matrix.
    pub singular_values: Vec<f64>,
    /// Set when `σ_k/σ₁` is below `1e3·ε`: the trailing vectors are
    /// dominated by rounding.
    pub degenerate_tail: bool,
}

fn singular_frame(p: &ScaledProduct, k: usize, left: bool) -> Result<SingularFrame> {
    let d = p.matrix.nrows();
    if k > d {
        return Err(Error::InvalidParameter(format!(
            "requested {k} singular vectors in dimension {d}"
        )));
    }
    let svd = linalg::sorted_svd(&p.matrix).ok_or(Error::SvdFailed)?;
    let source = if left { &svd.u } else { &svd.v };
    let mut columns = source.columns(0, k).into_owned();
    linalg::fix_column_signs(&mut columns);
    let singular_values: Vec<f64> = svd.singular_values[..k].to_vec();
    let degenerate_tail = match (singular_values.first(), singular_values.last()) {
        (Some(&s1), Some(&sk)) => !(sk > 1e3 * f64::EPSILON * s1),
        _ => false,
    };
    Ok(SingularFrame {
        frame: OrthonormalFrame::from_trusted(columns),
        singular_values,
        degenerate_tail,
    })
}

/// Leading `k` right singular vectors of `p.matrix`: the eigenvectors of
/// `(PᵀP)^{1/2M}` ordered by decreasing eigenvalue.
pub fn right_singular_frame(p: &ScaledProduct, k: usize) -> Result<SingularFrame> {
    singular_frame(p, k, false)
}

/// Leading `k` left singular vectors of `p.matrix`.
pub fn left_singular_frame(p: &ScaledProduct, k: usize) -> Result<SingularFrame> {
    singular_frame(p, k, true)
}

/// `N(v − F Fᵀ v)`. Reorthogonalizes once when more than half of `v` is
/// removed.
pub fn project_out(v: &DVector<f64>, frame: &OrthonormalFrame) -> Result<DVector<f64>> {
    if v.len() != frame.dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.dim(),
            found: v.len(),
        });
    }
    let vn = v.norm();
    let f = frame.columns();
    let mut r = v - f * (f.transpose() * v);
    let rn = r.norm();
    if !(vn > 0.0 && rn.is_finite() && rn >= 1e-14 * vn) {
        return Err(Error::ProjectionAnnihilated { checkpoint: None });
    }
    if rn < 0.5 * vn {
        r -= f * (f.transpose() * &r);
    }
    Ok(&r / r.norm())
}

/// Which algorithm produced an approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodTag {
    Svd,
    Svd2,
    DichIntersect,
    DichProject,
    Ginelli,
    Ginelli2,
    Wolfe,
    Truth,
}

impl MethodTag {
    pub const ALL_METHODS: [MethodTag; 7] = [
        MethodTag::Svd,
        MethodTag::Svd2,
        MethodTag::DichIntersect,
        MethodTag::DichProject,
        MethodTag::Ginelli,
        MethodTag::Ginelli2,
        MethodTag::Wolfe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Svd => "svd",
            Self::Svd2 => "svd2",
            Self::DichIntersect => "dich-intersect",
            Self::DichProject => "dich-project",
            Self::Ginelli => "ginelli",
            Self::Ginelli2 => "ginelli2",
            Self::Wolfe => "wolfe",
            Self::Truth => "truth",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodTag::ALL_METHODS
            .iter()
            .chain(core::iter::once(&MethodTag::Truth))
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

/// Unit vector approximating `w_j` at `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceApprox {
    pub j: usize,
    pub time: i64,
    pub vector: DVector<f64>,
    pub method: MethodTag,
    pub half_width: usize,
    /// Propagated from any singular frame the method relied on.
    pub degenerate_tail: bool,
}

impl SubspaceApprox {
    /// Normalizes and sign-fixes `vector`.
    pub fn new(
        method: MethodTag,
        j: usize,
        time: i64,
        half_width: usize,
        vector: &DVector<f64>,
    ) -> Result<Self> {
        let mut v = linalg::normalized(vector).ok_or(Error::VectorAnnihilated { time })?;
        linalg::fix_sign(&mut v);
        Ok(Self {
            j,
            time,
            vector: v,
            method,
            half_width,
            degenerate_tail: false,
        })
    }

    pub(crate) fn with_degenerate_tail(mut self, flag: bool) -> Self {
        self.degenerate_tail |= flag;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn diag(entries: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(entries))
    }

    #[test]
    fn propagate_diagonal() {
        let w = CocycleWindow::constant(0, 5, diag(&[2.0, 1.0])).unwrap();
        let (v, g) = propagate(&w, 0, 3, &DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.0]);
        assert!((g - 3.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn propagate_identity_is_trivial() {
        let w = CocycleWindow::constant(-4, 10, DMatrix::identity(3, 3)).unwrap();
        let v = DVector::from_vec(vec![0.6, 0.0, 0.8]);
        let (u, g) = propagate(&w, -4, 10, &v).unwrap();
        assert!((u - v).norm() < 1e-15);
        assert_eq!(g, 0.0);
    }

    #[test]
    fn propagate_reports_annihilation() {
        let w = CocycleWindow::constant(0, 3, diag(&[1.0, 0.0])).unwrap();
        let err = propagate(&w, 0, 2, &DVector::from_vec(vec![0.0, 1.0])).unwrap_err();
        assert_eq!(err, Error::VectorAnnihilated { time: 0 });
    }

    #[test]
    fn propagate_checks_range() {
        let w = CocycleWindow::constant(0, 3, DMatrix::identity(2, 2)).unwrap();
        let err = propagate(&w, 1, 3, &DVector::from_vec(vec![1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::OutOfWindow { .. }));
    }

    #[test]
    fn scaled_product_of_multiple_of_identity() {
        let w = CocycleWindow::constant(0, 4, DMatrix::identity(2, 2) * 2.0).unwrap();
        let p = scaled_product(&w, 0, 4).unwrap();
        assert!((p.matrix.clone() - DMatrix::identity(2, 2)).norm() < 1e-15);
        assert!((p.log_scale - 4.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn scaled_product_single_step() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let w = CocycleWindow::constant(0, 1, a.clone()).unwrap();
        let p = scaled_product(&w, 0, 1).unwrap();
        let s = a.norm() / 2f64.sqrt();
        assert!((p.matrix - a / s).norm() < 1e-15);
        assert!((p.log_scale - s.ln()).abs() < 1e-15);
    }

    #[test]
    fn singular_frames_of_diagonal() {
        let p = ScaledProduct {
            matrix: diag(&[3.0, 2.0, 1.0]),
            log_scale: 0.0,
        };
        for sf in [right_singular_frame(&p, 3).unwrap(), left_singular_frame(&p, 3).unwrap()] {
            assert!((sf.frame.columns() - DMatrix::identity(3, 3)).norm() < 1e-14);
            assert_eq!(sf.singular_values, vec![3.0, 2.0, 1.0]);
            assert!(!sf.degenerate_tail);
        }
    }

    #[test]
    fn singular_frames_of_isometries() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let p = ScaledProduct {
            matrix: rot,
            log_scale: 0.0,
        };
        for sf in [right_singular_frame(&p, 2).unwrap(), left_singular_frame(&p, 2).unwrap()] {
            assert!(linalg::orthonormality_defect(sf.frame.columns()) < 1e-14);
            for s in sf.singular_values {
                assert!((s - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn degenerate_tail_flagged() {
        let p = ScaledProduct {
            matrix: diag(&[1.0, 1e-20]),
            log_scale: 0.0,
        };
        assert!(right_singular_frame(&p, 2).unwrap().degenerate_tail);
        assert!(!right_singular_frame(&p, 1).unwrap().degenerate_tail);
        assert!(right_singular_frame(&p, 3).is_err());
    }

    #[test]
    fn project_out_examples() {
        let e1 = OrthonormalFrame::new(DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0])).unwrap();
        let s = 0.5f64.sqrt();
        let v = DVector::from_vec(vec![s, s, 0.0]);
        let r = project_out(&v, &e1).unwrap();
        assert!((r - DVector::from_vec(vec![0.0, 1.0, 0.0])).norm() < 1e-15);

        let already = DVector::from_vec(vec![0.0, 3.0, 4.0]);
        let r = project_out(&already, &e1).unwrap();
        assert!((r - already / 5.0).norm() < 1e-15);

        let inside = DVector::from_vec(vec![2.0, 0.0, 0.0]);
        assert_eq!(
            project_out(&inside, &e1).unwrap_err(),
            Error::ProjectionAnnihilated { checkpoint: None }
        );
    }

    #[test]
    fn window_rejects_bad_input() {
        assert!(CocycleWindow::new(0, vec![]).is_err());
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, 0.0, 1.0]);
        assert_eq!(
            CocycleWindow::new(5, vec![DMatrix::identity(2, 2), bad]).unwrap_err(),
            Error::NonFinite { time: 6 }
        );
        assert!(CocycleWindow::new(0, vec![DMatrix::zeros(2, 3)]).is_err());
    }

    #[test]
    fn method_tags_round_trip() {
        for m in MethodTag::ALL_METHODS {
            assert_eq!(m.as_str().parse::<MethodTag>().unwrap(), m);
        }
        assert!("nope".parse::<MethodTag>().is_err());
    }
}
