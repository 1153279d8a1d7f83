//! Exhaustive reference detectors over all `M²` symbol pairs.
//!
//! Nothing here touches the slicer or the projected statistic; the only
//! shared pieces are the constellation labels and the whitened residual norm.

use crate::channel::WhitenedObservation;
use crate::constellation::Constellation;
use crate::detector::LlrRows;
use crate::priors::{AprioriLlrs, Layer};
use crate::{Error, Real, Result};

/// Per-bit hypothesis scores `[bit = 0, bit = 1]`, indexed `[layer][bit]`.
pub type HypothesisScores<T> = [Vec<[T; 2]>; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceOutput<T> {
    pub llrs: LlrRows<T>,
    /// Max joint metric under each bit hypothesis.
    pub hypothesis_max: HypothesisScores<T>,
    /// Joint metrics evaluated; always `M²`.
    pub joint_metric_count: usize,
}

fn validate<T: Real>(c: &Constellation<T>, llrs: &AprioriLlrs<T>) -> Result<()> {
    if llrs.bits_per_symbol() != c.bits_per_symbol() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} a-priori LLRs per layer", c.bits_per_symbol()),
            actual: format!("{}", llrs.bits_per_symbol()),
        });
    }
    Ok(())
}

fn log_prior_table<T: Real>(c: &Constellation<T>, llrs: &[T]) -> Vec<T> {
    (0..c.order())
        .map(|k| {
            let bits = c.symbol_to_bits(k).expect("index in range");
            bits.iter()
                .zip(llrs)
                .fold(T::zero(), |acc, (&b, &l)| if b { acc + l } else { acc })
        })
        .collect()
}

/// Row-major `M × M` table of joint metrics
/// `log P(s̄₁) + log P(s̄₂) − ‖ỹ − h̃₁s̄₁ − h̃₂s̄₂‖²`.
fn joint_metrics<T: Real>(
    obs: &WhitenedObservation<T>,
    c: &Constellation<T>,
    llrs: &AprioriLlrs<T>,
) -> Vec<T> {
    let p1 = log_prior_table(c, llrs.layer(Layer::First));
    let p2 = log_prior_table(c, llrs.layer(Layer::Second));
    let m = c.order();
    let mut table = Vec::with_capacity(m * m);
    for (a, &s1) in c.symbols().iter().enumerate() {
        for (b, &s2) in c.symbols().iter().enumerate() {
            table.push(p1[a] + p2[b] - obs.residual_norm(s1, s2));
        }
    }
    table
}

/// Brute-force max-log-MAP LLRs.
pub fn brute_force_maxlog<T: Real>(
    obs: &WhitenedObservation<T>,
    c: &Constellation<T>,
    llrs: &AprioriLlrs<T>,
) -> Result<BruteForceOutput<T>> {
    validate(c, llrs)?;
    let m = c.order();
    let q = c.bits_per_symbol();
    let table = joint_metrics(obs, c, llrs);

    let mut best: HypothesisScores<T> = [
        vec![[T::neg_infinity(); 2]; q],
        vec![[T::neg_infinity(); 2]; q],
    ];
    for a in 0..m {
        for b in 0..m {
            let v = table[a * m + b];
            for n in 0..q {
                let slot = &mut best[0][n][c.bit(a, n) as usize];
                if v > *slot {
                    *slot = v;
                }
                let slot = &mut best[1][n][c.bit(b, n) as usize];
                if v > *slot {
                    *slot = v;
                }
            }
        }
    }
    let llrs = [0, 1].map(|i| best[i].iter().map(|[zero, one]| *one - *zero).collect());
    Ok(BruteForceOutput {
        llrs,
        hypothesis_max: best,
        joint_metric_count: table.len(),
    })
}

/// Per-hypothesis `(1/T)·log Σ exp(T·Λ)` over the joint metrics `Λ`.
pub fn log_map_hypotheses<T: Real>(
    obs: &WhitenedObservation<T>,
    c: &Constellation<T>,
    llrs: &AprioriLlrs<T>,
    temperature: T,
) -> Result<HypothesisScores<T>> {
    validate(c, llrs)?;
    if !(temperature > T::zero()) || !temperature.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "temperature {temperature} must be positive"
        )));
    }
    let m = c.order();
    let q = c.bits_per_symbol();
    let table = joint_metrics(obs, c, llrs);

    let mut out: HypothesisScores<T> = [Vec::with_capacity(q), Vec::with_capacity(q)];
    for (layer, scores) in out.iter_mut().enumerate() {
        for n in 0..q {
            let bit_of = |a: usize, b: usize| if layer == 0 { c.bit(a, n) } else { c.bit(b, n) };
            let mut max = [T::neg_infinity(); 2];
            for a in 0..m {
                for b in 0..m {
                    let h = bit_of(a, b) as usize;
                    max[h] = max[h].max(table[a * m + b]);
                }
            }
            let mut sum = [T::zero(); 2];
            for a in 0..m {
                for b in 0..m {
                    let h = bit_of(a, b) as usize;
                    sum[h] = sum[h] + (temperature * (table[a * m + b] - max[h])).exp();
                }
            }
            scores.push([0, 1].map(|h| max[h] + sum[h].ln() / temperature));
        }
    }
    Ok(out)
}

/// Log-MAP LLRs computed from temperature-scaled metrics; converges to the
/// max-log LLRs as the temperature grows.
pub fn log_map_tempered<T: Real>(
    obs: &WhitenedObservation<T>,
    c: &Constellation<T>,
    llrs: &AprioriLlrs<T>,
    temperature: T,
) -> Result<LlrRows<T>> {
    let h = log_map_hypotheses(obs, c, llrs, temperature)?;
    Ok([0, 1].map(|i| h[i].iter().map(|[zero, one]| *one - *zero).collect()))
}

/// Exact log-MAP LLRs.
pub fn log_map<T: Real>(
    obs: &WhitenedObservation<T>,
    c: &Constellation<T>,
    llrs: &AprioriLlrs<T>,
) -> Result<LlrRows<T>> {
    log_map_tempered(obs, c, llrs, T::one())
}
