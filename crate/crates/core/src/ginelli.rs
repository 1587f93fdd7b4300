//! Stationary Lyapunov basis and backward iteration on the `R` cocycle.
//!
//! Pushing an orthonormal `j`-frame forward with QR re-orthonormalization
//! converges to a frame `Q(x)` spanning `W₁ ⊕ … ⊕ W_j`. In that basis the
//! cocycle acts by the upper-triangular factors `R_n`, and `w_j` has
//! coordinates `c(x)` that dominate under the inverse of the factor product.
//! [`ginelli`] recovers `c` by inverse iteration backwards along the stored
//! factors; [`ginelli_improved`] starts the forward pass from singular vectors
//! instead of a random frame.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::cocycle::{
    left_singular_frame, scaled_product, CocycleWindow, MethodTag, OrthonormalFrame,
    SubspaceApprox,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::UniformStream;

/// Upper-triangular `j×j` factors `R_n` with positive diagonal, in time order.
#[derive(Clone, Debug, PartialEq)]
pub struct RCocycle {
    j: usize,
    factors: Vec<DMatrix<f64>>,
}

impl RCocycle {
    /// Checks shape, triangularity (within `1e-12` of the factor's scale) and
    /// positive diagonals.
    pub fn new(j: usize, factors: Vec<DMatrix<f64>>) -> Result<Self> {
        for (index, r) in factors.iter().enumerate() {
            if r.shape() != (j, j) {
                return Err(Error::DimensionMismatch {
                    expected: j,
                    found: r.nrows(),
                });
            }
            let scale = r.amax().max(1.0);
            let lower = (0..j)
                .flat_map(|row| (0..row).map(move |col| (row, col)))
                .any(|(row, col)| r[(row, col)].abs() > 1e-12 * scale);
            if lower || (0..j).any(|i| !(r[(i, i)] > 0.0)) {
                return Err(Error::SingularFactor { index });
            }
        }
        Ok(Self { j, factors })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[DMatrix<f64>] {
        &self.factors
    }

    /// `R_{to−1} ··· R_{from}` over factor indices `from..to`.
    pub fn product(&self, from: usize, to: usize) -> DMatrix<f64> {
        self.factors[from..to]
            .iter()
            .fold(DMatrix::identity(self.j, self.j), |acc, r| r * acc)
    }
}

fn push_frame(
    window: &CocycleWindow,
    start: i64,
    steps: usize,
    q0: &OrthonormalFrame,
    mut keep: Option<&mut Vec<DMatrix<f64>>>,
) -> Result<OrthonormalFrame> {
    if q0.dim() != window.dim() {
        return Err(Error::DimensionMismatch {
            expected: window.dim(),
            found: q0.dim(),
        });
    }
    window.require(start, start + steps as i64 - 1)?;
    let mut q = q0.columns().clone();
    for t in start..start + steps as i64 {
        let (qn, r) = linalg::qr_positive(window.at(t) * &q);
        if (0..r.nrows()).any(|i| !(r[(i, i)] >= f64::MIN_POSITIVE && r[(i, i)].is_finite())) {
            return Err(Error::BasisCollapse { time: t });
        }
        if let Some(store) = keep.as_deref_mut() {
            store.push(r);
        }
        q = qn;
    }
    Ok(OrthonormalFrame::from_trusted(q))
}

/// Iterates `Q_{n+1} R_n = A_n Q_n` for `steps` steps from `start`.
pub fn push_forward_qr(
    window: &CocycleWindow,
    start: i64,
    steps: usize,
    q0: &OrthonormalFrame,
) -> Result<(OrthonormalFrame, RCocycle)> {
    let mut factors = Vec::with_capacity(steps);
    let q = push_frame(window, start, steps, q0, Some(&mut factors))?;
    Ok((
        q,
        RCocycle {
            j: q0.k(),
            factors,
        },
    ))
}

/// Solves `R_n c_new = c` from the last factor back to the first,
/// normalizing after every solve.
pub fn backward_coefficients(rc: &RCocycle, c_init: &DVector<f64>) -> Result<DVector<f64>> {
    if c_init.len() != rc.j {
        return Err(Error::DimensionMismatch {
            expected: rc.j,
            found: c_init.len(),
        });
    }
    let mut c = linalg::normalized(c_init)
        .ok_or_else(|| Error::InvalidParameter("initial coefficients are zero".into()))?;
    for (index, r) in rc.factors.iter().enumerate().rev() {
        if (0..rc.j).any(|i| !(r[(i, i)] > 0.0)) {
            return Err(Error::SingularFactor { index });
        }
        let next = r
            .solve_upper_triangular(&c)
            .ok_or(Error::SingularFactor { index })?;
        c = linalg::normalized(&next).ok_or(Error::SingularFactor { index })?;
    }
    Ok(c)
}

/// `(0, …, 0, 1)` of length `j`.
pub fn default_coefficients(j: usize) -> DVector<f64> {
    let mut c = DVector::zeros(j);
    if j > 0 {
        c[j - 1] = 1.0;
    }
    c
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

fn finish(
    window: &CocycleWindow,
    tag: MethodTag,
    at: i64,
    n: usize,
    j: usize,
    q_at: &OrthonormalFrame,
    c_init: Option<&DVector<f64>>,
) -> Result<SubspaceApprox> {
    let (_, rc) = push_forward_qr(window, at, n, q_at)?;
    let c0 = c_init.cloned().unwrap_or_else(|| default_coefficients(j));
    let c = backward_coefficients(&rc, &c0)?;
    SubspaceApprox::new(tag, j, at, n, &(q_at.columns() * c))
}

/// Random frame at `at − m`, pushed `m` steps to `at`; the next `n` factors
/// drive the backward iteration.
pub fn ginelli(
    window: &CocycleWindow,
    at: i64,
    m: usize,
    n: usize,
    j: usize,
    c_init: Option<&DVector<f64>>,
    seed: u64,
) -> Result<SubspaceApprox> {
    check_index(window, j)?;
    window.require(at - m as i64, at + n as i64 - 1)?;
    let q0 = OrthonormalFrame::orthonormalize(UniformStream::new(seed).matrix(window.dim(), j));
    let q = push_frame(window, at - m as i64, m, &q0, None)?;
    finish(window, MethodTag::Ginelli, at, n, j, &q, c_init)
}

/// As [`ginelli`], but the frame at `at − m + m′` is the leading left
/// singular frame of the `m′`-step product started at `at − m`.
pub fn ginelli_improved(
    window: &CocycleWindow,
    at: i64,
    m: usize,
    m_prime: usize,
    n: usize,
    j: usize,
    c_init: Option<&DVector<f64>>,
) -> Result<SubspaceApprox> {
    check_index(window, j)?;
    if !(m >= m_prime && m_prime > 0) {
        return Err(Error::InvalidParameter(format!(
            "need m ≥ m′ > 0 (got m={m}, m′={m_prime})"
        )));
    }
    window.require(at - m as i64, at + n as i64 - 1)?;
    let sf = left_singular_frame(&scaled_product(window, at - m as i64, m_prime)?, j)?;
    let q = push_frame(window, at - (m - m_prime) as i64, m - m_prime, &sf.frame, None)?;
    Ok(finish(window, MethodTag::Ginelli2, at, n, j, &q, c_init)?
        .with_degenerate_tail(sf.degenerate_tail))
}
