//! Lyapunov exponents by QR averaging, and the shift heuristic that places
//! the dichotomy parameters just outside the second spectral interval.

use alloc::format;
use alloc::vec::Vec;

use crate::cocycle::CocycleWindow;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::UniformStream;

/// Seed of the random initial frame used by [`qr_lyapunov`].
pub const DEFAULT_LYAPUNOV_SEED: u64 = 0x05E1_EDE7;

/// Default fraction of the neighbouring gap used by [`choose_shifts`].
pub const DEFAULT_SHIFT_FRACTION: f64 = 0.1;

/// Estimated exponents `λ̂₁ ≥ … ≥ λ̂_k`, in log-growth per step.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEstimate {
    pub lambdas: Vec<f64>,
    /// Number of steps entering the time average.
    pub steps_used: usize,
}

impl SpectrumEstimate {
    pub fn k(&self) -> usize {
        self.lambdas.len()
    }
}

/// Shifts `Λ^left < Λ^right` bracketing the second exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DichotomyShifts {
    pub lambda_left: f64,
    pub lambda_right: f64,
}

impl DichotomyShifts {
    pub fn new(lambda_left: f64, lambda_right: f64) -> Result<Self> {
        if lambda_left < lambda_right && lambda_left.is_finite() && lambda_right.is_finite() {
            Ok(Self {
                lambda_left,
                lambda_right,
            })
        } else {
            Err(Error::InvalidParameter(format!(
                "shifts must satisfy left < right (got {lambda_left}, {lambda_right})"
            )))
        }
    }
}

/// [`qr_lyapunov_seeded`] with [`DEFAULT_LYAPUNOV_SEED`].
pub fn qr_lyapunov(window: &CocycleWindow, k: usize) -> Result<SpectrumEstimate> {
    qr_lyapunov_seeded(window, k, DEFAULT_LYAPUNOV_SEED)
}

/// Time averages of `log R_n(i,i)` over the QR iteration
/// `Q_{n+1} R_n = A_n Q_n` across the whole window, skipping a burn-in of
/// `min(L/10, 20)` steps.
pub fn qr_lyapunov_seeded(
    window: &CocycleWindow,
    k: usize,
    seed: u64,
) -> Result<SpectrumEstimate> {
    let d = window.dim();
    if k == 0 || k > d {
        return Err(Error::InvalidParameter(format!(
            "exponent count {k} outside 1..={d}"
        )));
    }
    let len = window.len();
    if len < 2 {
        return Err(Error::InvalidParameter(
            "exponent estimation needs at least two steps".into(),
        ));
    }
    let burn_in = (len / 10).min(20);
    let (mut q, _) = linalg::qr_positive(UniformStream::new(seed).matrix(d, k));
    let mut sums = alloc::vec![0.0; k];
    for (i, a) in window.matrices().iter().enumerate() {
        let time = window.start() + i as i64;
        let (qn, r) = linalg::qr_positive(a * &q);
        if (0..k).any(|l| r[(l, l)] == 0.0) {
            return Err(Error::RankDeficientStep { time });
        }
        if i >= burn_in {
            for (l, s) in sums.iter_mut().enumerate() {
                *s += libm::log(r[(l, l)]);
            }
        }
        q = qn;
    }
    let steps_used = len - burn_in;
    let mut lambdas: Vec<f64> = sums.into_iter().map(|s| s / steps_used as f64).collect();
    // QR ordering is only asymptotic; report sorted estimates.
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok(SpectrumEstimate {
        lambdas,
        steps_used,
    })
}

/// [`choose_shifts_with_fraction`] with the default fraction 0.1.
pub fn choose_shifts(s: &SpectrumEstimate) -> Result<DichotomyShifts> {
    choose_shifts_with_fraction(s, DEFAULT_SHIFT_FRACTION)
}

/// `Λ^left = λ̂₂ − f(λ̂₂ − λ̂₃)`, `Λ^right = λ̂₂ + f(λ̂₁ − λ̂₂)`.
pub fn choose_shifts_with_fraction(s: &SpectrumEstimate, fraction: f64) -> Result<DichotomyShifts> {
    if s.k() < 3 {
        return Err(Error::InvalidParameter(
            "shift selection needs three exponents".into(),
        ));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "shift fraction {fraction} outside (0, 1)"
        )));
    }
    let (l1, l2, l3) = (s.lambdas[0], s.lambdas[1], s.lambdas[2]);
    if !(l1 - l2 > 1e-8 && l2 - l3 > 1e-8) {
        return Err(Error::UnseparatedSpectrum);
    }
    DichotomyShifts::new(l2 - (l2 - l3) * fraction, l2 + (l1 - l2) * fraction)
}
