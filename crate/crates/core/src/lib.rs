//! Exact max-log-MAP soft-input soft-output detection for dual-layer MIMO.
//!
//! The detector turns the `M²`-metric exhaustive search of a two-stream
//! max-log-MAP demapper into `M` enumeration steps per layer plus a
//! one-dimensional slicer whose thresholds are shifted by the a-priori LLRs
//! fed back from a channel decoder. Per tone it evaluates at most
//! `4M - 2√M` metrics and produces the same LLRs as brute force.
//!
//! All math is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below are what the simulator uses.
//!
//! ```
//! use sisodet::{build_constellation, detect, AprioriLlrs, WhitenedObservation};
//! use num_complex::Complex64;
//!
//! let qam = build_constellation::<f64>(16).unwrap();
//! let (s1, s2) = (qam.symbol(3), qam.symbol(12));
//! let h1 = vec![Complex64::new(1.0, 0.2), Complex64::new(-0.3, 0.8)];
//! let h2 = vec![Complex64::new(0.1, -0.9), Complex64::new(0.7, 0.4)];
//! let y: Vec<_> = h1.iter().zip(&h2).map(|(a, b)| a * s1 + b * s2).collect();
//!
//! let obs = WhitenedObservation::new(y, h1, h2).unwrap();
//! let out = detect(&obs, &qam, &AprioriLlrs::zeros(qam.bits_per_symbol())).unwrap();
//! assert_eq!(out.eta_metric_count, 32);
//! assert!(out.total_metric_count <= 4 * 16 - 2 * 4);
//! ```

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod complexity;
pub mod constellation;
pub mod detector;
mod error;
pub mod numerics;
pub mod oracle;
pub mod priors;
pub mod scalar;
pub mod slicer;

pub use channel::{
    default_precoder, generate_channel, generate_noise, transmit, whiten, ChannelRealization,
    NoiseGenerator, WhitenedObservation,
};
pub use complexity::{
    measured_vs_predicted, predicted_counts, ComplexityEstimate, DetectorKind, MetricComparison,
};
pub use constellation::{build_constellation, Constellation, PamAxis};
pub use detector::{
    candidate_metric, detect, llrs_from_metrics, residual_statistic, DetectionResult, LlrRows,
};
pub use error::{Error, Result};
pub use numerics::{cholesky_factor, hermitian_inverse, quadratic_norm, ComplexMatrix};
pub use oracle::{brute_force_maxlog, log_map, log_map_tempered, BruteForceOutput};
pub use priors::{
    axis_log_priors, clamp, genie_priors, AprioriLlrs, Axis, AxisLogPriors, Layer,
    DEFAULT_LLR_CLAMP,
};
pub use scalar::Real;
pub use slicer::{
    argmax_slice_oracle, build_regions, pairwise_boundary, slice, DecisionRegions, Interval,
};

pub type Constellation64 = Constellation<f64>;
pub type Constellation32 = Constellation<f32>;
pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type ChannelRealization64 = ChannelRealization<f64>;
pub type WhitenedObservation64 = WhitenedObservation<f64>;
pub type WhitenedObservation32 = WhitenedObservation<f32>;
pub type AprioriLlrs64 = AprioriLlrs<f64>;
pub type AprioriLlrs32 = AprioriLlrs<f32>;
pub type DecisionRegions64 = DecisionRegions<f64>;
pub type DetectionResult64 = DetectionResult<f64>;
pub type DetectionResult32 = DetectionResult<f32>;
