//! Uniform front end over the approximation algorithms.

use alloc::format;

use nalgebra::DVector;

use crate::cocycle::{CocycleWindow, MethodTag, SubspaceApprox};
use crate::dichotomy::{w2_intersection, w2_projection};
use crate::error::{Error, Result};
use crate::ginelli::{ginelli, ginelli_improved};
use crate::spectrum::DichotomyShifts;
use crate::svd::{svd_basic, svd_improved, CheckpointSchedule, DEFAULT_CHECKPOINT_STRIDE};
use crate::wolfe::wolfe;

/// Length of the singular-vector warm-up in the improved Ginelli and Wolfe
/// methods.
pub const DEFAULT_WARMUP: usize = 5;

/// Anything that produces a unit vector at a base time of a window.
pub trait Approximator {
    fn approximate(&self, window: &CocycleWindow, at: i64) -> Result<DVector<f64>>;

    /// Times `(first, last)` of the matrices read when run at `at`, if known.
    fn required_range(&self, _at: i64) -> Option<(i64, i64)> {
        None
    }
}

impl<F> Approximator for F
where
    F: Fn(&CocycleWindow, i64) -> Result<DVector<f64>>,
{
    fn approximate(&self, window: &CocycleWindow, at: i64) -> Result<DVector<f64>> {
        self(window, at)
    }
}

/// One algorithm with all of its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Svd {
        j: usize,
        m: usize,
        n: usize,
    },
    Svd2 {
        j: usize,
        m: usize,
        n: usize,
        stride: usize,
    },
    DichIntersect {
        n: usize,
        shifts: DichotomyShifts,
        seed: u64,
    },
    DichProject {
        n: usize,
        shifts: DichotomyShifts,
        seed: u64,
    },
    Ginelli {
        j: usize,
        m: usize,
        n: usize,
        c_init: Option<DVector<f64>>,
        seed: u64,
    },
    Ginelli2 {
        j: usize,
        m: usize,
        m_prime: usize,
        n: usize,
        c_init: Option<DVector<f64>>,
    },
    Wolfe {
        j: usize,
        m1: usize,
        m1_prime: usize,
        m2: usize,
    },
}

impl Method {
    /// The configuration used for the exact-model experiments: `M = 2N` for
    /// the plain SVD push, `M = N` elsewhere, warm-up 5, checkpoint stride 5.
    /// Dichotomy methods need `shifts` and only compute `j = 2`.
    pub fn with_defaults(
        tag: MethodTag,
        j: usize,
        n: usize,
        shifts: Option<DichotomyShifts>,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("half-width must be positive".into()));
        }
        let warmup = DEFAULT_WARMUP.min(n);
        let need_shifts = || {
            if j != 2 {
                return Err(Error::InvalidParameter(format!(
                    "{tag} only approximates j = 2 (got j = {j})"
                )));
            }
            shifts.ok_or_else(|| Error::InvalidParameter(format!("{tag} needs dichotomy shifts")))
        };
        Ok(match tag {
            MethodTag::Svd => Method::Svd { j, m: 2 * n, n },
            MethodTag::Svd2 => Method::Svd2 {
                j,
                m: n,
                n,
                stride: DEFAULT_CHECKPOINT_STRIDE,
            },
            MethodTag::DichIntersect => Method::DichIntersect {
                n,
                shifts: need_shifts()?,
                seed,
            },
            MethodTag::DichProject => Method::DichProject {
                n,
                shifts: need_shifts()?,
                seed,
            },
            MethodTag::Ginelli => Method::Ginelli {
                j,
                m: n,
                n,
                c_init: None,
                seed,
            },
            MethodTag::Ginelli2 => Method::Ginelli2 {
                j,
                m: n,
                m_prime: warmup,
                n,
                c_init: None,
            },
            MethodTag::Wolfe => Method::Wolfe {
                j,
                m1: n,
                m1_prime: warmup,
                m2: n,
            },
            MethodTag::Truth => {
                return Err(Error::InvalidParameter(
                    "ground truth is not a computable method".into(),
                ))
            }
        })
    }

    pub fn tag(&self) -> MethodTag {
        match self {
            Method::Svd { .. } => MethodTag::Svd,
            Method::Svd2 { .. } => MethodTag::Svd2,
            Method::DichIntersect { .. } => MethodTag::DichIntersect,
            Method::DichProject { .. } => MethodTag::DichProject,
            Method::Ginelli { .. } => MethodTag::Ginelli,
            Method::Ginelli2 { .. } => MethodTag::Ginelli2,
            Method::Wolfe { .. } => MethodTag::Wolfe,
        }
    }

    pub fn j(&self) -> usize {
        match *self {
            Method::Svd { j, .. }
            | Method::Svd2 { j, .. }
            | Method::Ginelli { j, .. }
            | Method::Ginelli2 { j, .. }
            | Method::Wolfe { j, .. } => j,
            Method::DichIntersect { .. } | Method::DichProject { .. } => 2,
        }
    }

    /// The `N` reported with the result.
    pub fn half_width(&self) -> usize {
        match *self {
            Method::Svd { n, .. }
            | Method::Svd2 { n, .. }
            | Method::DichIntersect { n, .. }
            | Method::DichProject { n, .. }
            | Method::Ginelli { n, .. }
            | Method::Ginelli2 { n, .. } => n,
            Method::Wolfe { m2, .. } => m2,
        }
    }

    /// Times `(first, last)` of all matrices the method reads at base `at`.
    pub fn data_range(&self, at: i64) -> (i64, i64) {
        let i = |x: usize| x as i64;
        match *self {
            Method::Svd { m, n, .. } => (at - i(n), (at - i(n) + i(m)).max(at) - 1),
            Method::Svd2 { j, m, n, .. } => {
                let last = if j > 1 {
                    at + i(m) - 1
                } else {
                    (at - i(n) + i(m)).max(at) - 1
                };
                (at - i(n), last)
            }
            Method::DichIntersect { n, .. } | Method::DichProject { n, .. } => {
                (at - i(n), at + i(n) - 1)
            }
            Method::Ginelli { m, n, .. } | Method::Ginelli2 { m, n, .. } => {
                (at - i(m), at + i(n) - 1)
            }
            Method::Wolfe { m1, m2, .. } => (at - i(m1), at + i(m2) - 1),
        }
    }

    pub fn run(&self, window: &CocycleWindow, at: i64) -> Result<SubspaceApprox> {
        match self {
            &Method::Svd { j, m, n } => svd_basic(window, at, m, n, j),
            &Method::Svd2 { j, m, n, stride } => {
                svd_improved(window, at, m, &CheckpointSchedule::uniform(n, stride)?, j)
            }
            &Method::DichIntersect { n, shifts, seed } => {
                w2_intersection(window, at, n, shifts, seed)
            }
            &Method::DichProject { n, shifts, seed } => w2_projection(window, at, n, shifts, seed),
            Method::Ginelli {
                j,
                m,
                n,
                c_init,
                seed,
            } => ginelli(window, at, *m, *n, *j, c_init.as_ref(), *seed),
            Method::Ginelli2 {
                j,
                m,
                m_prime,
                n,
                c_init,
            } => ginelli_improved(window, at, *m, *m_prime, *n, *j, c_init.as_ref()),
            &Method::Wolfe {
                j,
                m1,
                m1_prime,
                m2,
            } => wolfe(window, at, m1, m1_prime, m2, j),
        }
    }
}

impl Approximator for Method {
    fn approximate(&self, window: &CocycleWindow, at: i64) -> Result<DVector<f64>> {
        self.run(window, at).map(|a| a.vector)
    }

    fn required_range(&self, at: i64) -> Option<(i64, i64)> {
        Some(self.data_range(at))
    }
}
