//! Per-run efficiency, proportionality and idle metrics.
//!
//! All functions are generic over the [`Scalar`] used for the arithmetic;
//! measurements are converted from the parsed `f64`/`u64` values up front.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{BenchmarkRun, LoadLevel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("{result_id}: no measurement at target load {level}")]
    MissingLevel { result_id: String, level: LoadLevel },
    #[error("{result_id}: socket count is zero")]
    NoSockets { result_id: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricFlag {
    /// The 10%/20% line meets zero load at or below 0 W.
    NonPositiveExtrapolatedIdle,
    /// EIQ is not positive; follows from the flag above.
    PathologicalEiq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics<T> {
    pub result_id: String,
    /// ssj_ops per watt at each graduated target load.
    pub efficiency_per_level: BTreeMap<LoadLevel, T>,
    pub overall_efficiency: T,
    /// Per-level efficiency over full-load efficiency.
    pub relative_efficiency: BTreeMap<LoadLevel, T>,
    pub idle_fraction: T,
    /// Watts per socket; key `0` is active idle.
    pub per_socket_power: BTreeMap<LoadLevel, T>,
    pub extrapolated_idle_w: T,
    /// Extrapolated-idle quotient: extrapolated over measured idle power.
    pub eiq: T,
    pub flags: Vec<MetricFlag>,
}

fn measurement<T: Scalar>(run: &BenchmarkRun, level: LoadLevel) -> Result<(T, T), MetricsError> {
    run.level(level)
        .map(|m| (T::of(m.ssj_ops as f64), T::of(m.avg_power_w)))
        .ok_or_else(|| MetricsError::MissingLevel {
            result_id: run.result_id.clone(),
            level,
        })
}

pub fn efficiency_at<T: Scalar>(run: &BenchmarkRun, level: LoadLevel) -> Result<T, MetricsError> {
    let (ops, power) = measurement::<T>(run, level)?;
    Ok(ops / power)
}

/// Sum of ssj_ops over the ten levels divided by the summed power of the
/// ten levels plus active idle.
pub fn overall_efficiency<T: Scalar>(run: &BenchmarkRun) -> Result<T, MetricsError> {
    let mut ops = T::zero();
    let mut power = T::of(run.idle_power_w);
    for level in LoadLevel::TARGETS {
        let (o, p) = measurement::<T>(run, level)?;
        ops = ops + o;
        power = power + p;
    }
    Ok(ops / power)
}

pub fn relative_efficiency<T: Scalar>(run: &BenchmarkRun, level: LoadLevel) -> Result<T, MetricsError> {
    if level == LoadLevel::FULL {
        // guarantees an exact 1 rather than x/x rounding
        measurement::<T>(run, level)?;
        return Ok(T::one());
    }
    Ok(efficiency_at::<T>(run, level)? / efficiency_at::<T>(run, LoadLevel::FULL)?)
}

pub fn idle_fraction<T: Scalar>(run: &BenchmarkRun) -> Result<T, MetricsError> {
    let (_, full) = measurement::<T>(run, LoadLevel::FULL)?;
    Ok(T::of(run.idle_power_w) / full)
}

/// Least-squares line `y = slope * x + intercept`; `None` with fewer than two
/// distinct x values.
pub fn fit_line<T: Scalar>(points: &[(T, T)]) -> Option<(T, T)> {
    let n = T::of_usize(points.len());
    if points.len() < 2 {
        return None;
    }
    let mean_x = points.iter().map(|p| p.0).sum::<T>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    if sxx == T::zero() {
        return None;
    }
    let sxy: T = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    Some((slope, mean_y - slope * mean_x))
}

/// Active-idle power predicted by the regression line through the 10% and
/// 20% measurements, evaluated at 0% load. May be zero or negative.
pub fn extrapolated_idle<T: Scalar>(run: &BenchmarkRun) -> Result<T, MetricsError> {
    let lo = LoadLevel::from_percent(10).expect("valid level");
    let hi = LoadLevel::from_percent(20).expect("valid level");
    let (_, p_lo) = measurement::<T>(run, lo)?;
    let (_, p_hi) = measurement::<T>(run, hi)?;
    let points = [(T::of(10.0), p_lo), (T::of(20.0), p_hi)];
    let (_, intercept) = fit_line(&points).expect("two distinct loads");
    Ok(intercept)
}

pub fn eiq<T: Scalar>(run: &BenchmarkRun) -> Result<T, MetricsError> {
    Ok(extrapolated_idle::<T>(run)? / T::of(run.idle_power_w))
}

/// Average power per socket; [`LoadLevel::ACTIVE_IDLE`] selects idle power.
pub fn per_socket_power<T: Scalar>(run: &BenchmarkRun, level: LoadLevel) -> Result<T, MetricsError> {
    if run.sockets == 0 {
        return Err(MetricsError::NoSockets {
            result_id: run.result_id.clone(),
        });
    }
    let power = run.power_at(level).ok_or_else(|| MetricsError::MissingLevel {
        result_id: run.result_id.clone(),
        level,
    })?;
    Ok(T::of(power) / T::of(f64::from(run.sockets)))
}

pub fn compute_metrics<T: Scalar>(run: &BenchmarkRun) -> Result<RunMetrics<T>, MetricsError> {
    let mut efficiency_per_level = BTreeMap::new();
    let mut relative = BTreeMap::new();
    let mut per_socket = BTreeMap::new();
    for level in LoadLevel::TARGETS {
        efficiency_per_level.insert(level, efficiency_at::<T>(run, level)?);
        relative.insert(level, relative_efficiency::<T>(run, level)?);
        per_socket.insert(level, per_socket_power::<T>(run, level)?);
    }
    per_socket.insert(
        LoadLevel::ACTIVE_IDLE,
        per_socket_power::<T>(run, LoadLevel::ACTIVE_IDLE)?,
    );
    let extrapolated_idle_w = extrapolated_idle::<T>(run)?;
    let eiq = eiq::<T>(run)?;
    let mut flags = Vec::new();
    if extrapolated_idle_w <= T::zero() {
        flags.push(MetricFlag::NonPositiveExtrapolatedIdle);
    }
    if eiq <= T::zero() {
        flags.push(MetricFlag::PathologicalEiq);
    }
    Ok(RunMetrics {
        result_id: run.result_id.clone(),
        efficiency_per_level,
        overall_efficiency: overall_efficiency::<T>(run)?,
        relative_efficiency: relative,
        idle_fraction: idle_fraction::<T>(run)?,
        per_socket_power: per_socket,
        extrapolated_idle_w,
        eiq,
        flags,
    })
}

impl<T: Scalar> RunMetrics<T> {
    pub fn relative_at(&self, level: LoadLevel) -> Option<T> {
        self.relative_efficiency.get(&level).copied()
    }

    pub fn socket_power_at(&self, level: LoadLevel) -> Option<T> {
        self.per_socket_power.get(&level).copied()
    }
}
