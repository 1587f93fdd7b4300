//! Accuracy checks that need no ground truth (equivariance, expansion rate)
//! and the direct error against a known vector.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DVector;

use crate::cocycle::CocycleWindow;
use crate::error::{Error, Result};
use crate::linalg;
use crate::method::Approximator;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    Equivariance,
    Expansion,
    ExactError,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::Equivariance => "equivariance",
            SeriesKind::Expansion => "expansion",
            SeriesKind::ExactError => "exact_error",
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Points `(m, value)` with strictly increasing `m`. A computation that
/// stopped early keeps the points before the failure and records it.
#[derive(Clone, Debug, PartialEq)]
pub struct TestSeries {
    pub kind: SeriesKind,
    pub points: Vec<(i64, f64)>,
    pub failure: Option<(i64, Error)>,
}

impl TestSeries {
    fn new(kind: SeriesKind) -> Self {
        Self {
            kind,
            points: Vec::new(),
            failure: None,
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|&(_, v)| v)
    }

    pub fn value_at(&self, m: i64) -> Option<f64> {
        self.points.iter().find(|p| p.0 == m).map(|p| p.1)
    }

    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

/// `min(‖v − w‖, ‖v + w‖)`.
pub fn exact_error(v: &DVector<f64>, w: &DVector<f64>) -> f64 {
    (v - w).norm().min((v + w).norm())
}

/// For `m = 0, …, m_max`: distance (up to sign) between the time-`m` push of
/// the approximation at `at` and the approximation computed afresh at
/// `at + m`.
pub fn equivariance_defect<A: Approximator + ?Sized>(
    window: &CocycleWindow,
    approximator: &A,
    at: i64,
    m_max: usize,
) -> Result<TestSeries> {
    if let Some((first, _)) = approximator.required_range(at) {
        let (_, last) = approximator
            .required_range(at + m_max as i64)
            .unwrap_or((first, first));
        window.require(first.min(at), last.max(at + m_max as i64 - 1))?;
    }
    let mut series = TestSeries::new(SeriesKind::Equivariance);
    let mut pushed = match approximator.approximate(window, at) {
        Ok(w) => w,
        Err(e) => {
            series.failure = Some((0, e));
            return Ok(series);
        }
    };
    series.points.push((0, 0.0));
    for m in 1..=m_max as i64 {
        let step = linalg::normalized(&(window.at(at + m - 1) * &pushed))
            .ok_or(Error::VectorAnnihilated { time: at + m - 1 });
        let fresh = step.and_then(|p| {
            pushed = p;
            approximator.approximate(window, at + m)
        });
        match fresh {
            Ok(w) => series.points.push((m, exact_error(&pushed, &w))),
            Err(e) => {
                series.failure = Some((m, e));
                break;
            }
        }
    }
    Ok(series)
}

/// For `m = 1, …, m_max`: `(1/m) log‖A(at, m) w‖` for unit `w`.
pub fn expansion_rate_series(
    window: &CocycleWindow,
    at: i64,
    w: &DVector<f64>,
    m_max: usize,
) -> Result<TestSeries> {
    window.check_vector(w)?;
    window.require(at, at + m_max as i64 - 1)?;
    let mut v = linalg::normalized(w).ok_or(Error::VectorAnnihilated { time: at })?;
    let mut series = TestSeries::new(SeriesKind::Expansion);
    let mut growth = 0.0;
    for m in 1..=m_max as i64 {
        let next = window.at(at + m - 1) * &v;
        let norm = next.norm();
        if !(norm.is_finite() && norm >= f64::MIN_POSITIVE) {
            return Err(Error::VectorAnnihilated { time: at + m - 1 });
        }
        growth += libm::log(norm);
        v = next / norm;
        series.points.push((m, growth / m as f64));
    }
    Ok(series)
}

/// Exact errors of a family of approximations indexed by `m`.
pub fn exact_error_series<I>(pairs: I) -> Result<TestSeries>
where
    I: IntoIterator<Item = (i64, DVector<f64>, DVector<f64>)>,
{
    let mut series = TestSeries::new(SeriesKind::ExactError);
    for (m, v, w) in pairs {
        if v.len() != w.len() {
            return Err(Error::DimensionMismatch {
                expected: v.len(),
                found: w.len(),
            });
        }
        if series.points.last().is_some_and(|&(prev, _)| prev >= m) {
            return Err(Error::InvalidParameter(format!(
                "series index {m} is not increasing"
            )));
        }
        series.points.push((m, exact_error(&v, &w)));
    }
    Ok(series)
}
