//! A cocycle whose Oseledets subspaces are known at every time.
//!
//! With `R = diag(e^{λ₁}, …, e^{λ_d})` and invertible `S_n`, the matrices
//! `A_n = S_n R S_{n−1}^{-1}` satisfy `A_n S_{n−1} = S_n R`, so column `j` of
//! `S_{n−1}` is mapped onto column `j` of `S_n` scaled by `e^{λ_j}`. For
//! `S_n` close to the identity these columns are the Oseledets directions at
//! time `n`.
//!
//! Random draws come from [`UniformStream`] in a fixed order: the entries of
//! `Z_n` row by row for increasing `n` (each redraw taking the next values),
//! then `z₂, …, z_d` for the subdiagonal of `S_{−1}`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::cocycle::CocycleWindow;
use crate::error::{Error, Result};
use crate::linalg;
use crate::method::Approximator;
use crate::rng::UniformStream;

/// Largest accepted condition number of any `S_n`.
pub const CONDITION_LIMIT: f64 = 1e8;
/// Redraws allowed per matrix before giving up.
pub const MAX_RETRIES: usize = 10;

/// Whether `S_n = I + εZ` uses one `Z` for all `n` or a fresh draw per `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ZMode {
    #[default]
    Fresh,
    Fixed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactModelSpec {
    pub dim: usize,
    /// Strictly decreasing exponents `λ₁ > … > λ_d`.
    pub spectrum: Vec<f64>,
    pub epsilon: f64,
    pub half_width: usize,
    pub seed: u64,
    pub z_mode: ZMode,
}

impl ExactModelSpec {
    /// `λ_i = ln(top + 1 − i)`, the ladder `ln top, ln(top−1), …`.
    pub fn log_ladder(top: usize, dim: usize) -> Result<Vec<f64>> {
        if dim == 0 || top < dim {
            return Err(Error::InvalidParameter(format!(
                "log ladder from {top} cannot hold {dim} positive rungs"
            )));
        }
        Ok((0..dim).map(|i| libm::log((top - i) as f64)).collect())
    }

    /// `d = 8`, spectrum `ln 8, …, ln 1`, `ε = 0.1`, fresh draws.
    pub fn standard(half_width: usize, seed: u64) -> Self {
        Self {
            dim: 8,
            spectrum: Self::log_ladder(8, 8).expect("valid ladder"),
            epsilon: 0.1,
            half_width,
            seed,
            z_mode: ZMode::Fresh,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if self.spectrum.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.spectrum.len(),
            });
        }
        if self.spectrum.iter().any(|l| !l.is_finite())
            || self.spectrum.windows(2).any(|w| !(w[0] > w[1]))
        {
            return Err(Error::InvalidParameter(
                "spectrum must be finite and strictly decreasing".into(),
            ));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "perturbation scale {} must be finite and non-negative",
                self.epsilon
            )));
        }
        if self.half_width == 0 {
            return Err(Error::InvalidParameter("half-width must be positive".into()));
        }
        Ok(())
    }
}

/// `S_{n−1}` for each time `n` of the window plus one: its columns span the
/// Oseledets subspaces at `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactGroundTruth {
    start: i64,
    bases: Vec<DMatrix<f64>>,
}

impl ExactGroundTruth {
    /// First time with a known basis.
    pub fn start(&self) -> i64 {
        self.start
    }

    /// Last time with a known basis.
    pub fn end(&self) -> i64 {
        self.start + self.bases.len() as i64 - 1
    }

    pub fn dim(&self) -> usize {
        self.bases[0].nrows()
    }

    /// The matrix whose columns span the subspaces at `time`.
    pub fn basis_at(&self, time: i64) -> Option<&DMatrix<f64>> {
        let i = time.checked_sub(self.start)?;
        usize::try_from(i).ok().and_then(|i| self.bases.get(i))
    }

    /// Ground truth for index `j` as an [`Approximator`].
    pub fn approximator(&self, j: usize) -> TruthApproximator<'_> {
        TruthApproximator { truth: self, j }
    }
}

/// Unit, sign-fixed column `j` of `S_{n−1}`.
pub fn exact_vector(gt: &ExactGroundTruth, n: i64, j: usize) -> Result<DVector<f64>> {
    let basis = gt.basis_at(n).ok_or(Error::OutOfWindow {
        requested: (n, n),
        available: (gt.start(), gt.end()),
    })?;
    if j == 0 || j > basis.ncols() {
        return Err(Error::InvalidParameter(format!(
            "subspace index {j} outside 1..={}",
            basis.ncols()
        )));
    }
    let mut v = linalg::normalized(&basis.column(j - 1).into_owned())
        .ok_or(Error::VectorAnnihilated { time: n })?;
    linalg::fix_sign(&mut v);
    Ok(v)
}

/// Looks up `w_j` from an [`ExactGroundTruth`].
#[derive(Clone, Copy, Debug)]
pub struct TruthApproximator<'a> {
    truth: &'a ExactGroundTruth,
    j: usize,
}

impl Approximator for TruthApproximator<'_> {
    fn approximate(&self, _window: &CocycleWindow, at: i64) -> Result<DVector<f64>> {
        exact_vector(self.truth, at, self.j)
    }

    fn required_range(&self, at: i64) -> Option<(i64, i64)> {
        Some((at, at - 1))
    }
}

fn condition(m: &DMatrix<f64>) -> f64 {
    match linalg::sorted_svd(m) {
        Some(svd) => {
            let s = &svd.singular_values;
            s[0] / s[s.len() - 1]
        }
        None => f64::INFINITY,
    }
}

fn draw_perturbed(rng: &mut UniformStream, d: usize, eps: f64, time: i64) -> Result<DMatrix<f64>> {
    for _ in 0..=MAX_RETRIES {
        let s = DMatrix::identity(d, d) + rng.matrix(d, d) * eps;
        if condition(&s) <= CONDITION_LIMIT {
            return Ok(s);
        }
    }
    Err(Error::IllConditioned { time })
}

/// Builds the window `A_{−N}, …, A_{N−1}` and the bases `S_{−N−1}, …,
/// S_{N−1}` (for times `−N, …, N`).
pub fn generate(spec: &ExactModelSpec) -> Result<(CocycleWindow, ExactGroundTruth)> {
    spec.validate()?;
    let d = spec.dim;
    let n = spec.half_width as i64;
    let mut rng = UniformStream::new(spec.seed);

    // S_t for t = −N−1, …, N−1, with S_{−1} filled in afterwards.
    let times: Vec<i64> = (-n - 1..n).collect();
    let mut s: Vec<DMatrix<f64>> = Vec::with_capacity(times.len());
    let mut fixed: Option<DMatrix<f64>> = None;
    for &t in &times {
        if t == -1 {
            s.push(DMatrix::identity(d, d));
            continue;
        }
        let m = match (spec.z_mode, &fixed) {
            (ZMode::Fixed, Some(m)) => m.clone(),
            _ => draw_perturbed(&mut rng, d, spec.epsilon, t)?,
        };
        if spec.z_mode == ZMode::Fixed && fixed.is_none() {
            fixed = Some(m.clone());
        }
        s.push(m);
    }
    let mut attempts = 0;
    let s_minus_one = loop {
        let mut m = DMatrix::identity(d, d);
        for i in 1..d {
            m[(i, i - 1)] = rng.next_f64();
        }
        if condition(&m) <= CONDITION_LIMIT {
            break m;
        }
        attempts += 1;
        if attempts > MAX_RETRIES {
            return Err(Error::IllConditioned { time: -1 });
        }
    };
    s[n as usize] = s_minus_one;

    let growth = DVector::from_iterator(d, spec.spectrum.iter().map(|&l| libm::exp(l)));
    let mut matrices = Vec::with_capacity(2 * n as usize);
    for i in 1..s.len() {
        // A = S_i R S_{i−1}^{-1}, via Aᵀ = S_{i−1}^{-T} (S_i R)ᵀ.
        let sr = {
            let mut m = s[i].clone();
            for (c, g) in growth.iter().enumerate() {
                m.column_mut(c).scale_mut(*g);
            }
            m
        };
        let at = s[i - 1]
            .transpose()
            .lu()
            .solve(&sr.transpose())
            .ok_or(Error::IllConditioned { time: times[i - 1] })?;
        matrices.push(at.transpose());
    }
    let window = CocycleWindow::new(-n, matrices)?;
    Ok((
        window,
        ExactGroundTruth {
            start: -n,
            bases: s,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: usize, eps: f64, n: usize) -> ExactModelSpec {
        ExactModelSpec {
            dim: d,
            spectrum: ExactModelSpec::log_ladder(d, d).unwrap(),
            epsilon: eps,
            half_width: n,
            seed: 1,
            z_mode: ZMode::Fresh,
        }
    }

    #[test]
    fn ladder() {
        let l = ExactModelSpec::log_ladder(8, 3).unwrap();
        assert_eq!(l, [8f64.ln(), 7f64.ln(), 6f64.ln()]);
        assert!(ExactModelSpec::log_ladder(2, 3).is_err());
    }

    #[test]
    fn validation() {
        let mut s = spec(3, 0.1, 5);
        s.spectrum = alloc::vec![1.0, 1.0, 0.0];
        assert!(generate(&s).is_err());
        let mut s = spec(3, 0.1, 5);
        s.epsilon = -1.0;
        assert!(generate(&s).is_err());
    }

    #[test]
    fn unperturbed_model() {
        let (w, gt) = generate(&spec(3, 0.0, 4)).unwrap();
        assert_eq!((w.start(), w.end()), (-4, 3));
        let r = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![3.0, 2.0, 1.0]));
        for t in -4..4 {
            if t != -1 && t != 0 {
                assert!((w.get(t).unwrap() - &r).amax() < 1e-15, "time {t}");
            }
        }
        let s = gt.basis_at(0).unwrap();
        let z3 = s[(2, 1)];
        let expected = DVector::from_vec(alloc::vec![0.0, 1.0, z3]).normalize();
        assert!((exact_vector(&gt, 0, 2).unwrap() - expected).norm() < 1e-15);
        assert!(exact_vector(&gt, 5, 1).is_err());
        assert_eq!((gt.start(), gt.end()), (-4, 4));
    }

    #[test]
    fn defining_identity() {
        let (w, gt) = generate(&spec(4, 0.1, 10)).unwrap();
        let r = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![4.0, 3.0, 2.0, 1.0]));
        for t in w.start()..=w.end() {
            let lhs = w.get(t).unwrap() * gt.basis_at(t).unwrap();
            let rhs = gt.basis_at(t + 1).unwrap() * &r;
            assert!((&lhs - &rhs).norm() <= 1e-12 * rhs.norm());
        }
    }

    #[test]
    fn fixed_z_repeats() {
        let mut s = spec(3, 0.1, 3);
        s.z_mode = ZMode::Fixed;
        let (_, gt) = generate(&s).unwrap();
        assert_eq!(gt.basis_at(-3), gt.basis_at(2));
        assert_ne!(gt.basis_at(-3), gt.basis_at(0));
    }

    #[test]
    fn deterministic() {
        let a = generate(&spec(3, 0.1, 6)).unwrap();
        let b = generate(&spec(3, 0.1, 6)).unwrap();
        assert_eq!(a.0, b.0);
    }
}
