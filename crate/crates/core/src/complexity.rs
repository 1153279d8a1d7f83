//! Closed-form per-tone operation counts for the proposed detector, T-LORD
//! and brute force, plus a check of live metric counters against them.
//!
//! Multiplication and addition counts are formula evaluations only; the
//! detector does not instrument its arithmetic.

use std::fmt;

use crate::detector::DetectionResult;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DetectorKind {
    Proposed,
    Tlord,
    Brute,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 3] = [
        DetectorKind::Proposed,
        DetectorKind::Tlord,
        DetectorKind::Brute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Proposed => "proposed",
            DetectorKind::Tlord => "tlord",
            DetectorKind::Brute => "brute",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplexityEstimate {
    pub kind: DetectorKind,
    pub order: u64,
    pub receive_antennas: u64,
    pub bits_per_symbol: u64,
    pub metrics: u64,
    pub real_muls: u64,
    pub real_adds: u64,
}

/// Evaluates the per-tone count formulas for `kind` at constellation size
/// `order` and `receive_antennas` receive antennas.
pub fn predicted_counts(
    kind: DetectorKind,
    order: usize,
    receive_antennas: usize,
) -> Result<ComplexityEstimate> {
    if order < 4 || !order.is_power_of_two() || !order.trailing_zeros().is_multiple_of(2) {
        return Err(Error::InvalidOrder(order));
    }
    if receive_antennas < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 receive antennas, got {receive_antennas}"
        )));
    }
    let m = order as i128;
    let nr = receive_antennas as i128;
    let q = order.trailing_zeros() as i128;
    let sqrt_m = 1i128 << (q / 2);

    let (metrics, muls, adds) = match kind {
        DetectorKind::Proposed => (
            4 * m - 2 * sqrt_m,
            (16 * nr + 18) * m - 2 * sqrt_m,
            (12 * nr + 3 * q + 18) * m - (q + 2) * sqrt_m - 4,
        ),
        DetectorKind::Tlord => (6 * m, (16 * nr + 48) * m, (12 * nr + 2 * q + 52) * m - 4),
        DetectorKind::Brute => (m * m, 8 * m * m, 12 * m * m - 4 * m),
    };
    let to_u64 = |v: i128| {
        u64::try_from(v).map_err(|_| Error::InvalidArgument(format!("count {v} overflows")))
    };
    Ok(ComplexityEstimate {
        kind,
        order: order as u64,
        receive_antennas: receive_antennas as u64,
        bits_per_symbol: q as u64,
        metrics: to_u64(metrics)?,
        real_muls: to_u64(muls)?,
        real_adds: to_u64(adds)?,
    })
}

/// Live metric counters of one detection next to the closed-form total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricComparison {
    pub measured_total: u64,
    pub measured_eta: u64,
    pub measured_boundaries: u64,
    pub predicted_total: u64,
    /// Boundaries skipped thanks to empty-region pruning.
    pub pruning_savings: u64,
}

impl MetricComparison {
    pub fn within_bound(&self) -> bool {
        self.measured_total <= self.predicted_total
    }
}

pub fn measured_vs_predicted<T>(
    result: &DetectionResult<T>,
    order: usize,
) -> Result<MetricComparison> {
    let predicted = predicted_counts(DetectorKind::Proposed, order, 2)?.metrics;
    let measured = result.total_metric_count as u64;
    Ok(MetricComparison {
        measured_total: measured,
        measured_eta: result.eta_metric_count as u64,
        measured_boundaries: result.boundary_count as u64,
        predicted_total: predicted,
        pruning_savings: predicted.saturating_sub(measured),
    })
}
