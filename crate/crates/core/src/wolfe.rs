//! Intersection of the stationary Lyapunov span with the backward-singular
//! complement.
//!
//! `w_j` lies in `S_j = span(s₁, …, s_j)` (the pushed-forward frame) and is
//! orthogonal to the leading `j−1` right singular vectors `u₁, …, u_{j−1}` of
//! forward products. Writing `w = Σ y_i s_i`, orthogonality becomes
//! `G y = 0` with `G = Uᵀ S`, solved here through `D = GᵀG`.

use alloc::format;

use nalgebra::{DMatrix, DVector};

use crate::cocycle::{
    left_singular_frame, right_singular_frame, scaled_product, CocycleWindow, MethodTag,
    OrthonormalFrame, SubspaceApprox,
};
use crate::error::{Error, Result};
use crate::ginelli::push_forward_qr;
use crate::linalg;

/// Largest accepted `σ_min/σ_second` of `D`.
pub const NULL_SPACE_SEPARATION: f64 = 0.5;

/// `D = GᵀG`, `G = u_frameᵀ · s_frame`.
#[derive(Clone, Debug)]
pub struct IntersectionSystem {
    pub d: DMatrix<f64>,
    pub s_frame: OrthonormalFrame,
    pub u_frame: OrthonormalFrame,
}

/// Assembles `D` from `j` s-vectors and `j−1` u-vectors.
pub fn build_intersection_system(
    s_frame: OrthonormalFrame,
    u_frame: OrthonormalFrame,
) -> Result<IntersectionSystem> {
    if s_frame.dim() != u_frame.dim() {
        return Err(Error::DimensionMismatch {
            expected: s_frame.dim(),
            found: u_frame.dim(),
        });
    }
    if u_frame.k() + 1 != s_frame.k() {
        return Err(Error::InvalidParameter(format!(
            "need j s-vectors and j−1 u-vectors (got {} and {})",
            s_frame.k(),
            u_frame.k()
        )));
    }
    let g = u_frame.columns().transpose() * s_frame.columns();
    let d = g.transpose() * &g;
    Ok(IntersectionSystem {
        d,
        s_frame,
        u_frame,
    })
}

/// Right singular vector of `D` for its smallest singular value.
///
/// Fails when the smallest singular value is not clearly below the next
/// one, i.e. when the intersection is not one-dimensional.
pub fn null_vector(sys: &IntersectionSystem) -> Result<DVector<f64>> {
    let j = sys.d.nrows();
    if j == 1 {
        return Ok(DVector::from_element(1, 1.0));
    }
    let svd = linalg::sorted_svd(&sys.d).ok_or(Error::SvdFailed)?;
    let smallest = svd.singular_values[j - 1];
    let second = svd.singular_values[j - 2];
    let ratio = if second > 0.0 { smallest / second } else { 1.0 };
    if !(ratio < NULL_SPACE_SEPARATION) {
        return Err(Error::AmbiguousNullSpace { ratio });
    }
    let mut y = svd.v.column(j - 1).into_owned();
    linalg::fix_sign(&mut y);
    Ok(y)
}

/// s-frame from the left singular frame of the `m1′`-step product at
/// `at − m1`, QR-pushed to `at`; u-frame from the `m2`-step product at `at`.
pub fn wolfe(
    window: &CocycleWindow,
    at: i64,
    m1: usize,
    m1_prime: usize,
    m2: usize,
    j: usize,
) -> Result<SubspaceApprox> {
    if j == 0 || j > window.dim() {
        return Err(Error::InvalidParameter(format!(
            "subspace index {j} outside 1..={}",
            window.dim()
        )));
    }
    if !(m1 >= m1_prime && m1_prime > 0 && m2 > 0) {
        return Err(Error::InvalidParameter(format!(
            "need m1 ≥ m1′ > 0 and m2 > 0 (got {m1}, {m1_prime}, {m2})"
        )));
    }
    window.require(at - m1 as i64, at + m2 as i64 - 1)?;
    let left = left_singular_frame(&scaled_product(window, at - m1 as i64, m1_prime)?, j)?;
    let (s_frame, _) = push_forward_qr(
        window,
        at - (m1 - m1_prime) as i64,
        m1 - m1_prime,
        &left.frame,
    )?;
    let right = right_singular_frame(&scaled_product(window, at, m2)?, j - 1)?;
    let sys = build_intersection_system(s_frame, right.frame)?;
    let y = null_vector(&sys)?;
    let w = sys.s_frame.columns() * y;
    Ok(SubspaceApprox::new(MethodTag::Wolfe, j, at, m2, &w)?
        .with_degenerate_tail(left.degenerate_tail || right.degenerate_tail))
}
