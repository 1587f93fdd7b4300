//! Singular-vector push-forward.
//!
//! The `j`-th right singular vector of an `M`-step product started in the
//! past approximates the `j`-th eigendirection of the limiting matrix
//! `Ψ = lim (A(x,n)ᵀA(x,n))^{1/2n}`; pushing it forward to the base time
//! approximates `w_j`. The plain push amplifies the error in that vector at
//! rate `λ₁ − λ_j`. [`svd_improved`] controls this by periodically removing
//! the components along the leading `j−1` singular vectors, which `w_j` is
//! orthogonal to.
//!
//! Accuracy degrades for `j ≥ 3`: the trailing singular vectors of long
//! products are dominated by rounding, which shows up as the
//! `degenerate_tail` flag on the result.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DVector;

use crate::cocycle::{
    project_out, propagate, right_singular_frame, scaled_product, CocycleWindow, MethodTag,
    SubspaceApprox,
};
use crate::error::{Error, Result};

/// Default spacing between re-orthogonalisation checkpoints.
pub const DEFAULT_CHECKPOINT_STRIDE: usize = 5;

/// Strictly decreasing offsets into the past, ending at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckpointSchedule {
    checkpoints: Vec<usize>,
}

impl CheckpointSchedule {
    pub fn new(checkpoints: Vec<usize>) -> Result<Self> {
        if checkpoints.last() != Some(&0) {
            return Err(Error::InvalidParameter(
                "checkpoint schedule must end at 0".into(),
            ));
        }
        if checkpoints.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidParameter(
                "checkpoints must be strictly decreasing".into(),
            ));
        }
        Ok(Self { checkpoints })
    }

    /// `N, N−s, N−2s, …` down to the last positive entry, then 0.
    pub fn uniform(n: usize, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidParameter("checkpoint stride must be positive".into()));
        }
        let mut checkpoints: Vec<usize> = (0..)
            .map(|k| n as i64 - (k * stride) as i64)
            .take_while(|&c| c > 0)
            .map(|c| c as usize)
            .collect();
        checkpoints.push(0);
        Self::new(checkpoints)
    }

    pub fn checkpoints(&self) -> &[usize] {
        &self.checkpoints
    }

    /// Furthest offset into the past.
    pub fn first(&self) -> usize {
        self.checkpoints[0]
    }
}

fn check_index(window: &CocycleWindow, j: usize) -> Result<()> {
    if j == 0 || j > window.dim() {
        Err(Error::InvalidParameter(format!(
            "subspace index {j} outside 1..={}",
            window.dim()
        )))
    } else {
        Ok(())
    }
}

/// Pushes the `j`-th right singular vector of the `m`-step product started at
/// `at − n` forward by `n` steps.
pub fn svd_basic(
    window: &CocycleWindow,
    at: i64,
    m: usize,
    n: usize,
    j: usize,
) -> Result<SubspaceApprox> {
    check_index(window, j)?;
    let from = at - n as i64;
    let p = scaled_product(window, from, m)?;
    let sf = right_singular_frame(&p, j)?;
    let u = sf.frame.column(j - 1);
    let (w, _) = propagate(window, from, n, &u)?;
    Ok(SubspaceApprox::new(MethodTag::Svd, j, at, n, &w)?.with_degenerate_tail(sf.degenerate_tail))
}

/// Push-forward from `at − N₁` with projection onto the orthogonal
/// complement of the leading `j−1` right singular vectors (of `m`-step
/// products) at every later checkpoint.
pub fn svd_improved(
    window: &CocycleWindow,
    at: i64,
    m: usize,
    schedule: &CheckpointSchedule,
    j: usize,
) -> Result<SubspaceApprox> {
    check_index(window, j)?;
    let cps = schedule.checkpoints();
    let first = schedule.first();
    window.require(at - first as i64, at - first as i64 + m as i64 - 1)?;
    window.require(at - first as i64, at - 1)?;
    if j > 1 {
        // U-frames are read from products starting at each checkpoint.
        window.require(at, at + m as i64 - 1)?;
    }

    let start = at - first as i64;
    let sf = right_singular_frame(&scaled_product(window, start, m)?, j)?;
    let mut degenerate = sf.degenerate_tail;
    let mut w: DVector<f64> = sf.frame.column(j - 1);
    if j == 1 {
        // nothing to project against: one uninterrupted push
        let (pushed, _) = propagate(window, start, first, &w)?;
        return Ok(SubspaceApprox::new(MethodTag::Svd2, j, at, first, &pushed)?
            .with_degenerate_tail(degenerate));
    }
    for pair in cps.windows(2) {
        let (from, to) = (pair[0], pair[1]);
        let (pushed, _) = propagate(window, at - from as i64, from - to, &w)?;
        let t = at - to as i64;
        let frame = right_singular_frame(&scaled_product(window, t, m)?, j - 1)?;
        degenerate |= frame.degenerate_tail;
        w = project_out(&pushed, &frame.frame).map_err(|e| match e {
            Error::ProjectionAnnihilated { .. } => Error::ProjectionAnnihilated { checkpoint: Some(t) },
            other => other,
        })?;
    }
    Ok(SubspaceApprox::new(MethodTag::Svd2, j, at, first, &w)?.with_degenerate_tail(degenerate))
}
