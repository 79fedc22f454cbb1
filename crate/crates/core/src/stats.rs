//! Descriptive statistics over complete populations.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StdKind {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n - 1`.
    Sample,
}

pub fn mean<T: Scalar>(xs: &[T]) -> Option<T> {
    if xs.is_empty() {
        return None;
    }
    Some(xs.iter().copied().sum::<T>() / T::of_usize(xs.len()))
}

pub fn std_dev<T: Scalar>(xs: &[T], kind: StdKind) -> Option<T> {
    let m = mean(xs)?;
    let denom = match kind {
        StdKind::Population => xs.len(),
        StdKind::Sample if xs.len() > 1 => xs.len() - 1,
        StdKind::Sample => return None,
    };
    let ss: T = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    Some((ss / T::of_usize(denom)).sqrt())
}

/// Quantile of already sorted data by linear interpolation between order
/// statistics (`h = (n - 1) q`).
pub fn quantile_sorted<T: Scalar>(sorted: &[T], q: f64) -> Option<T> {
    if sorted.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = T::of(h - lo as f64);
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson<T: Scalar>(xs: &[T], ys: &[T]) -> Option<T> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
        syy = syy + (y - my) * (y - my);
    }
    if sxx == T::zero() || syy == T::zero() {
        return None;
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Some(r.max(-T::one()).min(T::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary<T> {
    pub n: usize,
    pub mean: T,
    pub std: T,
    pub min: T,
    pub p25: T,
    pub median: T,
    pub p75: T,
    pub max: T,
}

impl<T: Scalar> DistributionSummary<T> {
    /// `None` for an empty sample. NaNs are not expected and sort last.
    pub fn from_values(values: &[T], kind: StdKind) -> Option<Self> {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Greater));
        let q = |p| quantile_sorted(&sorted, p);
        Some(Self {
            n: sorted.len(),
            mean: mean(&sorted)?,
            std: std_dev(&sorted, kind).unwrap_or_else(T::zero),
            min: *sorted.first()?,
            p25: q(0.25)?,
            median: q(0.5)?,
            p75: q(0.75)?,
            max: *sorted.last()?,
        })
    }
}
