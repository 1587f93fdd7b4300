mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use oseledets_core::dichotomy::{build_system, min_norm_impulse_solve, w2_projection};
use oseledets_core::ginelli::{backward_coefficients, push_forward_qr, RCocycle};
use oseledets_core::rng::UniformStream;
use oseledets_core::spectrum::qr_lyapunov_seeded;
use oseledets_core::validation::exact_error;
use oseledets_core::wolfe::build_intersection_system;
use oseledets_core::*;
use proptest::prelude::*;

fn window(seed: u64, dim: usize, len: usize) -> CocycleWindow {
    seeded_window(seed, dim, -3, len, 1.0)
}

fn unit(seed: u64, dim: usize) -> DVector<f64> {
    (UniformStream::new(seed).vector(dim) * 2.0).add_scalar(-1.0).normalize()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_composition(seed in any::<u64>(), dim in 1usize..6, a in 1usize..15, b in 1usize..15) {
        let w = window(seed, dim, a + b);
        let whole = scaled_product(&w, -3, a + b).unwrap();
        let composed = scaled_product(&w, -3, a).unwrap()
            .then(&scaled_product(&w, -3 + a as i64, b).unwrap());
        let m = composed.matrix * (composed.log_scale - whole.log_scale).exp();
        prop_assert!((m - &whole.matrix).norm() <= 1e-12 * whole.matrix.norm());
    }

    #[test]
    fn growth_additivity(seed in any::<u64>(), dim in 1usize..6, a in 0usize..15, b in 0usize..15) {
        let w = window(seed, dim, a + b + 1);
        let v = unit(seed ^ 1, dim);
        let (_, total) = propagate(&w, -3, a + b, &v).unwrap();
        let (mid, first) = propagate(&w, -3, a, &v).unwrap();
        let (_, second) = propagate(&w, -3 + a as i64, b, &mid).unwrap();
        prop_assert!((total - first - second).abs() <= 1e-10 * (1.0 + total.abs()));
    }

    #[test]
    fn singular_frames_orthonormal(seed in any::<u64>(), dim in 1usize..7, steps in 1usize..12) {
        let w = window(seed, dim, steps);
        let p = scaled_product(&w, -3, steps).unwrap();
        for sf in [right_singular_frame(&p, dim).unwrap(), left_singular_frame(&p, dim).unwrap()] {
            prop_assert!(linalg::orthonormality_defect(sf.frame.columns()) <= 1e-10);
            prop_assert!(sf.singular_values.windows(2).all(|s| s[0] >= s[1]));
        }
    }

    #[test]
    fn projection_idempotent(seed in any::<u64>(), dim in 2usize..7, k in 1usize..6) {
        let k = k.min(dim - 1);
        let f = OrthonormalFrame::orthonormalize(UniformStream::new(seed).matrix(dim, k));
        let v = unit(seed ^ 7, dim);
        let once = project_out(&v, &f).unwrap();
        let twice = project_out(&once, &f).unwrap();
        prop_assert!((&once - &twice).norm() <= 1e-12);
        prop_assert!((f.columns().transpose() * &once).amax() <= 1e-12);
    }

    #[test]
    fn exact_error_is_a_sign_blind_metric(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), dim in 1usize..6) {
        let (u, v, w) = (unit(a, dim), unit(b, dim), unit(c, dim));
        prop_assert_eq!(exact_error(&u, &v), exact_error(&v, &u));
        prop_assert!(exact_error(&u, &-&u) == 0.0);
        prop_assert!(exact_error(&u, &w) <= exact_error(&u, &v) + exact_error(&v, &w) + 1e-15);
    }

    #[test]
    fn exponent_scaling(seed in any::<u64>(), dim in 1usize..5, c in 0.1f64..10.0) {
        let w = window(seed, dim, 40);
        let s = qr_lyapunov_seeded(&w, dim, seed).unwrap();
        let t = qr_lyapunov_seeded(&w.scaled(c), dim, seed).unwrap();
        for (x, y) in s.lambdas.iter().zip(&t.lambdas) {
            prop_assert!((y - x - c.ln()).abs() <= 1e-10);
        }
        prop_assert!(s.lambdas.windows(2).all(|l| l[0] >= l[1]));
    }

    #[test]
    fn triangular_exponents(seed in any::<u64>(), dim in 1usize..5) {
        let mut rng = UniformStream::new(seed);
        let a = DMatrix::from_fn(dim, dim, |r, c| {
            let x = rng.next_f64();
            if r == c { 0.2 + 3.0 * x } else if r < c { x - 0.5 } else { 0.0 }
        });
        let w = CocycleWindow::constant(0, 2000, a.clone()).unwrap();
        let s = qr_lyapunov(&w, dim).unwrap();
        let mut logs: Vec<f64> = (0..dim).map(|i| a[(i, i)].ln()).collect();
        logs.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in s.lambdas.iter().zip(&logs) {
            // transients decay, except for near-equal diagonal entries
            prop_assert!((x - y).abs() <= 0.02, "{:?} vs {:?}", s.lambdas, logs);
        }
    }

    #[test]
    fn shifts_interlace(l3 in -3.0f64..3.0, g1 in 1e-6f64..2.0, g2 in 1e-6f64..2.0, f in 0.01f64..0.99) {
        let s = SpectrumEstimate { lambdas: vec![l3 + g1 + g2, l3 + g1, l3], steps_used: 1 };
        let sh = spectrum::choose_shifts_with_fraction(&s, f).unwrap();
        prop_assert!(l3 < sh.lambda_left && sh.lambda_left < l3 + g1);
        prop_assert!(l3 + g1 < sh.lambda_right && sh.lambda_right < l3 + g1 + g2);
    }

    #[test]
    fn gram_matches_dense_and_solution_exact(seed in any::<u64>(), dim in 1usize..4, n in 1usize..10, shift in -1.0f64..1.0) {
        let w = seeded_window(seed, dim, -(n as i64), 2 * n, 1.5);
        let system = build_system(&w, 0, n, shift).unwrap();
        let g = system.matrix().gram();
        let b = system.matrix().to_dense();
        let dense = &b * b.transpose();
        for i in 0..g.n() {
            for j in 0..=i {
                prop_assert!((g.get(i, j) - dense[(i, j)]).abs() <= 1e-12 * (1.0 + dense[(i, j)].abs()));
            }
        }
        prop_assert!(dense.clone().cholesky().is_some());
        let r = unit(seed ^ 3, dim);
        let pos = (seed as usize) % (2 * n);
        let sol = min_norm_impulse_solve(&system, pos, &r).unwrap();
        let mut res = system.apply(&sol);
        for (k, x) in r.iter().enumerate() {
            res[pos * dim + k] -= x;
        }
        prop_assert!(res.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1e-10);
    }

    #[test]
    fn qr_push_keeps_convention(seed in any::<u64>(), dim in 1usize..6, j in 1usize..6, steps in 1usize..30) {
        let j = j.min(dim);
        let w = window(seed, dim, steps);
        let q0 = OrthonormalFrame::orthonormalize(UniformStream::new(seed ^ 5).matrix(dim, j));
        let (q, rc) = push_forward_qr(&w, -3, steps, &q0).unwrap();
        prop_assert!(linalg::orthonormality_defect(q.columns()) <= 1e-10);
        for r in rc.factors() {
            for i in 0..j {
                prop_assert!(r[(i, i)] > 0.0);
                for c in 0..i {
                    prop_assert!(r[(i, c)].abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn backward_iteration_keeps_leading_axis(seed in any::<u64>(), j in 2usize..5) {
        let mut rng = UniformStream::new(seed);
        let r = DMatrix::from_fn(j, j, |row, c| {
            let x = rng.next_f64();
            if row == c { if row == 0 { 4.0 + x } else { 0.5 + 3.0 * x } }
            else if row < c { 2.0 * x - 1.0 } else { 0.0 }
        });
        let rc = RCocycle::new(j, vec![r; 60]).unwrap();
        let mut e1 = DVector::zeros(j);
        e1[0] = 1.0;
        let c = backward_coefficients(&rc, &e1).unwrap();
        prop_assert!(exact_error(&c, &e1) <= 1e-8);
    }

    #[test]
    fn intersection_matrix_bounds(seed in any::<u64>(), dim in 2usize..8, j in 2usize..6) {
        let j = j.min(dim);
        let mut rng = UniformStream::new(seed);
        let s = OrthonormalFrame::orthonormalize(rng.matrix(dim, j));
        let u = OrthonormalFrame::orthonormalize(rng.matrix(dim, j - 1));
        let d = build_intersection_system(s, u).unwrap().d;
        prop_assert!((&d - d.transpose()).amax() <= 1e-12);
        let eig = d.clone().symmetric_eigenvalues();
        prop_assert!(eig.iter().all(|&e| (-1e-10..=1.0 + 1e-10).contains(&e)));
        prop_assert!(d.trace() <= (j - 1) as f64 + 1e-10);
    }
}

#[test]
fn dichotomy_shift_covariance() {
    let w = random_cocycle(3, -40, 80);
    let shifts = DichotomyShifts::new(0.55, 0.85).unwrap();
    let base = w2_projection(&w, 0, 40, shifts, 9).unwrap();
    for c in [0.5, 2.0, 3.7] {
        let moved = DichotomyShifts::new(0.55 + f64::ln(c), 0.85 + f64::ln(c)).unwrap();
        let scaled = w2_projection(&w.scaled(c), 0, 40, moved, 9).unwrap();
        assert!((&scaled.vector - &base.vector).norm() < 1e-12);
    }
}
