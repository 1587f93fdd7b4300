//! Dichotomy-projector route to `w₂`.
//!
//! For a shift `Λ` in a gap of the spectrum, the scaled equation
//! `w_{n+1} = e^{−Λ} A_n w_n` has an exponential dichotomy, and the bounded
//! solution of the equation forced by an impulse `r` at `n = −1` carries the
//! dichotomy projectors in its values at 0 and −1. On a finite interval
//! `[−N, N]` that bounded solution is approximated by the minimum-norm
//! solution of the (underdetermined) block bidiagonal system
//!
//! ```text
//! row n:  −e^{−Λ} A_n w_n + w_{n+1} = δ_{n,−1} r,    n = −N, …, N−1.
//! ```
//!
//! With `Λ^left` between `λ₃` and `λ₂` the solution lands in `W₁ ⊕ W₂`; with
//! `Λ^right` between `λ₂` and `λ₁` the stable part is `W₂ ⊕ W₃ ⊕ …`. Both
//! algorithms combine the two to isolate `W₂`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;

use crate::banded::{min_norm_solve, RowBanded, SolveRoute};
use crate::cocycle::{CocycleWindow, MethodTag, SubspaceApprox};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::UniformStream;
use crate::spectrum::DichotomyShifts;

/// The `2dN × d(2N+1)` matrix of the shifted difference equation on
/// `[at−N, at+N]`; unknowns ordered `w_{−N}, …, w_N`.
#[derive(Clone, Debug)]
pub struct ShiftedBlockSystem {
    dim: usize,
    half_width: usize,
    shift: f64,
    at: i64,
    matrix: RowBanded,
}

impl ShiftedBlockSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Base time: block row `N` holds the equation from `at` to `at + 1`.
    pub fn at(&self) -> i64 {
        self.at
    }

    pub fn rows(&self) -> usize {
        2 * self.dim * self.half_width
    }

    pub fn cols(&self) -> usize {
        self.dim * (2 * self.half_width + 1)
    }

    pub fn matrix(&self) -> &RowBanded {
        &self.matrix
    }

    /// Block row holding the equation for step `n` (relative to the base
    /// time), `−N ≤ n ≤ N−1`.
    pub fn block_row(&self, n: i64) -> Option<usize> {
        let i = n + self.half_width as i64;
        (0..2 * self.half_width as i64)
            .contains(&i)
            .then_some(i as usize)
    }

    /// Stacks a sequence `w_{−N}, …, w_N` and applies the matrix.
    pub fn apply(&self, sequence: &[DVector<f64>]) -> Vec<f64> {
        let flat: Vec<f64> = sequence.iter().flat_map(|v| v.iter().copied()).collect();
        self.matrix.apply(&flat)
    }
}

/// Assembles the system for `w_{n+1} = e^{−shift} A_n w_n` on
/// `n ∈ [at−N, at+N−1]`.
pub fn build_system(
    window: &CocycleWindow,
    at: i64,
    n: usize,
    shift: f64,
) -> Result<ShiftedBlockSystem> {
    if n == 0 {
        return Err(Error::InvalidParameter("half-width must be positive".into()));
    }
    window.require(at - n as i64, at + n as i64 - 1)?;
    let d = window.dim();
    let factor = -libm::exp(-shift);
    let mut matrix = RowBanded::new(d * (2 * n + 1));
    for i in 0..2 * n {
        let a = window.at(at - n as i64 + i as i64);
        for r in 0..d {
            let mut values = vec![0.0; 2 * d];
            for c in 0..d {
                values[c] = factor * a[(r, c)];
            }
            values[d + r] = 1.0;
            matrix.push_row(i * d, values);
        }
    }
    Ok(ShiftedBlockSystem {
        dim: d,
        half_width: n,
        shift,
        at,
        matrix,
    })
}

fn impulse_rhs(system: &ShiftedBlockSystem, position: usize, impulse: &DVector<f64>) -> Vec<f64> {
    let d = system.dim;
    let mut r = vec![0.0; system.rows()];
    r[position * d..(position + 1) * d].copy_from_slice(impulse.as_slice());
    r
}

fn unstack(flat: &[f64], d: usize) -> Vec<DVector<f64>> {
    flat.chunks(d).map(DVector::from_column_slice).collect()
}

/// Minimum-norm solutions for several impulses at the same block row.
pub fn min_norm_impulse_solves(
    system: &ShiftedBlockSystem,
    impulse_position: usize,
    impulses: &[DVector<f64>],
) -> Result<(Vec<Vec<DVector<f64>>>, SolveRoute)> {
    if impulse_position >= 2 * system.half_width {
        return Err(Error::InvalidParameter("impulse position outside the system".into()));
    }
    for r in impulses {
        if r.len() != system.dim {
            return Err(Error::DimensionMismatch {
                expected: system.dim,
                found: r.len(),
            });
        }
    }
    let rhs: Vec<Vec<f64>> = impulses
        .iter()
        .map(|r| impulse_rhs(system, impulse_position, r))
        .collect();
    let refs: Vec<&[f64]> = rhs.iter().map(|r| r.as_slice()).collect();
    let (solutions, route) = min_norm_solve(&system.matrix, &refs)?;
    Ok((
        solutions.iter().map(|w| unstack(w, system.dim)).collect(),
        route,
    ))
}

/// Minimum-norm solution `(w_{−N}, …, w_N)` of `B w = r` where `r` is zero
/// except for `impulse` in block row `impulse_position`.
pub fn min_norm_impulse_solve(
    system: &ShiftedBlockSystem,
    impulse_position: usize,
    impulse: &DVector<f64>,
) -> Result<Vec<DVector<f64>>> {
    let (mut sols, _) =
        min_norm_impulse_solves(system, impulse_position, core::slice::from_ref(impulse))?;
    Ok(sols.swap_remove(0))
}

/// Response of the left-shifted system to impulses at `n = −1`, mapped back
/// through `A_{−1}`: vectors in `range(P^{3,u}_0) = W₁ ⊕ W₂`.
fn unstable_images(
    window: &CocycleWindow,
    at: i64,
    n: usize,
    lambda_left: f64,
    impulses: &[DVector<f64>],
) -> Result<Vec<DVector<f64>>> {
    let system = build_system(window, at, n, lambda_left)?;
    let pos = system.block_row(-1).expect("n ≥ 1");
    let (sols, _) = min_norm_impulse_solves(&system, pos, impulses)?;
    let a_prev = window.at(at - 1);
    sols.iter()
        .map(|w| {
            let image = a_prev * &w[n - 1];
            linalg::normalized(&image).ok_or(Error::VectorAnnihilated { time: at - 1 })
        })
        .collect()
}

/// Intersection variant: spans `W₁ ⊕ W₂` with two impulse responses, then
/// picks the direction in that span whose forward continuation under the
/// right shift stays bounded.
pub fn w2_intersection(
    window: &CocycleWindow,
    at: i64,
    n: usize,
    shifts: DichotomyShifts,
    seed: u64,
) -> Result<SubspaceApprox> {
    let d = window.dim();
    let mut rng = UniformStream::new(seed);
    let impulses = [rng.vector(d), rng.vector(d)];
    let p = unstable_images(window, at, n, shifts.lambda_left, &impulses)?;
    let (p1, p2) = (&p[0], &p[1]);
    if libm::fabs(p1.dot(p2)) > 1.0 - 1e-10 {
        return Err(Error::DegenerateSpan);
    }
    window.require(at, at + n as i64 - 1)?;

    // Unknowns (κ, w̃_0, …, w̃_N); anchor rows w̃_0 + κ p¹ = −p² come first so
    // the row spans stay monotone.
    let factor = -libm::exp(-shifts.lambda_right);
    let mut system = RowBanded::new(1 + d * (n + 1));
    for r in 0..d {
        let mut values = vec![0.0; r + 2];
        values[0] = p1[r];
        values[r + 1] = 1.0;
        system.push_row(0, values);
    }
    for step in 0..n {
        let a = window.at(at + step as i64);
        for r in 0..d {
            let mut values = vec![0.0; 2 * d];
            for c in 0..d {
                values[c] = factor * a[(r, c)];
            }
            values[d + r] = 1.0;
            system.push_row(1 + step * d, values);
        }
    }
    let mut rhs = vec![0.0; d * (n + 1)];
    for r in 0..d {
        rhs[r] = -p2[r];
    }
    let (sol, _) = min_norm_solve(&system, &[&rhs])?;
    let w0 = DVector::from_column_slice(&sol[0][1..1 + d]);
    SubspaceApprox::new(MethodTag::DichIntersect, 2, at, n, &w0)
}

/// Projection variant: `w₀ = P^{2,s}_0 P^{3,u}_0 r` for a random `r`, both
/// projections applied through impulse solves.
pub fn w2_projection(
    window: &CocycleWindow,
    at: i64,
    n: usize,
    shifts: DichotomyShifts,
    seed: u64,
) -> Result<SubspaceApprox> {
    let d = window.dim();
    let r = UniformStream::new(seed).vector(d);
    let r_prime = unstable_images(window, at, n, shifts.lambda_left, &[r])?;
    let system = build_system(window, at, n, shifts.lambda_right)?;
    let pos = system.block_row(-1).expect("n ≥ 1");
    let w = min_norm_impulse_solve(&system, pos, &r_prime[0])?;
    SubspaceApprox::new(MethodTag::DichProject, 2, at, n, &w[n])
}
