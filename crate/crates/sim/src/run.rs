//! The `verify` and `simulate` runners.
//!
//! Tones of one sweep point run on the rayon pool, each with its own RNG
//! stream, and are reduced in tone order so output bytes never depend on
//! scheduling.

use anyhow::Result;
use rayon::prelude::*;
use sisodet::detector::layer_regions;
use sisodet::{brute_force_maxlog, build_constellation, detect, Constellation64, Layer};

use crate::config::SimConfig;
use crate::csv::{fmt_f64, CsvTable};
use crate::tone::{dump_tone, generate_tone, tone_rng, ToneDump};

pub const VERIFY_TOLERANCE: f64 = 1e-6;

/// Like `f64::max`, but a NaN on either side wins so it can never hide.
fn sticky_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn max_discrepancy(a: &[Vec<f64>; 2], b: &[Vec<f64>; 2]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, sticky_max)
}

/// Largest total metric count the proposed detector may use.
pub fn metric_bound(order: usize) -> usize {
    let sqrt_m = 1usize << (order.trailing_zeros() / 2);
    4 * order - 2 * sqrt_m
}

struct VerifyTone {
    discrepancy: f64,
    total_metric_count: usize,
    pruned: bool,
    count_law_holds: bool,
}

fn verify_tone(
    config: &SimConfig,
    qam: &Constellation64,
    point: usize,
    tone: usize,
    snr_db: f64,
    mu: f64,
) -> Result<(VerifyTone, Option<ToneDump>)> {
    let mut rng = tone_rng(config.seed, point, tone);
    let sample = generate_tone(&mut rng, config, qam, snr_db, mu)?;
    let fast = detect(&sample.obs, qam, &sample.priors)?;
    let slow = brute_force_maxlog(&sample.obs, qam, &sample.priors)?;
    let discrepancy = max_discrepancy(&fast.llrs, &slow.llrs);

    let mut pruned = false;
    for layer in Layer::BOTH {
        for regions in layer_regions(&sample.obs, qam, &sample.priors, layer)? {
            pruned |= (0..regions.len()).any(|k| regions.is_pruned(k));
        }
    }
    let bound = metric_bound(qam.order());
    let count_law_holds = fast.eta_metric_count == 2 * qam.order()
        && fast.total_metric_count <= bound
        && (pruned || fast.total_metric_count == bound);

    let dump =
        (discrepancy.is_nan() || discrepancy > VERIFY_TOLERANCE || !count_law_holds).then(|| {
            dump_tone(
                config,
                point,
                tone,
                snr_db,
                mu,
                &sample,
                fast.llrs.clone(),
                slow.llrs.clone(),
                discrepancy,
            )
        });
    Ok((
        VerifyTone {
            discrepancy,
            total_metric_count: fast.total_metric_count,
            pruned,
            count_law_holds,
        },
        dump,
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRow {
    pub snr_db: f64,
    pub mu: f64,
    pub tones: usize,
    pub max_llr_discrepancy: f64,
    pub min_total_metric_count: usize,
    pub max_total_metric_count: usize,
    pub predicted_total_metric_count: usize,
    pub pruned_tones: usize,
    pub count_law_holds: bool,
}

impl VerifyRow {
    pub fn passed(&self) -> bool {
        self.max_llr_discrepancy <= VERIFY_TOLERANCE && self.count_law_holds
    }
}

#[derive(Debug)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
    /// The first tone, in sweep order, that failed.
    pub failure: Option<ToneDump>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(VerifyRow::passed)
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.max_llr_discrepancy)
            .fold(0.0, sticky_max)
    }

    pub fn to_csv(&self) -> String {
        let mut t = CsvTable::new(&[
            "snr_db",
            "mu",
            "tones",
            "max_llr_discrepancy",
            "min_total_metric_count",
            "max_total_metric_count",
            "predicted_total_metric_count",
            "pruned_tones",
            "status",
        ]);
        for r in &self.rows {
            t.row(vec![
                fmt_f64(r.snr_db),
                fmt_f64(r.mu),
                r.tones.to_string(),
                fmt_f64(r.max_llr_discrepancy),
                r.min_total_metric_count.to_string(),
                r.max_total_metric_count.to_string(),
                r.predicted_total_metric_count.to_string(),
                r.pruned_tones.to_string(),
                if r.passed() { "PASS" } else { "FAIL" }.to_string(),
            ]);
        }
        t.finish()
    }
}

/// Runs every tone of every sweep point through the detector and the
/// brute-force oracle.
pub fn run_verify(config: &SimConfig) -> Result<VerifyReport> {
    config.validate()?;
    let qam = build_constellation::<f64>(config.order)?;
    let mut rows = Vec::new();
    let mut failure = None;
    for (point, (snr_db, mu)) in config.points().into_iter().enumerate() {
        let outcomes: Vec<_> = (0..config.tones)
            .into_par_iter()
            .map(|tone| verify_tone(config, &qam, point, tone, snr_db, mu))
            .collect::<Result<_>>()?;
        let mut row = VerifyRow {
            snr_db,
            mu,
            tones: config.tones,
            max_llr_discrepancy: 0.0,
            min_total_metric_count: usize::MAX,
            max_total_metric_count: 0,
            predicted_total_metric_count: metric_bound(config.order),
            pruned_tones: 0,
            count_law_holds: true,
        };
        for (t, dump) in outcomes {
            row.max_llr_discrepancy = sticky_max(row.max_llr_discrepancy, t.discrepancy);
            row.min_total_metric_count = row.min_total_metric_count.min(t.total_metric_count);
            row.max_total_metric_count = row.max_total_metric_count.max(t.total_metric_count);
            row.pruned_tones += usize::from(t.pruned);
            row.count_law_holds &= t.count_law_holds;
            if failure.is_none() {
                failure = dump;
            }
        }
        rows.push(row);
    }
    Ok(VerifyReport { rows, failure })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimRecord {
    pub snr_db: f64,
    pub mu: f64,
    pub tones: usize,
    pub bit_errors_detector: u64,
    pub bit_errors_oracle: u64,
    pub ber: f64,
    pub mean_total_metric_count: f64,
    pub max_llr_discrepancy_vs_oracle: f64,
    /// Bits whose detector and oracle LLR signs disagree. Not part of the CSV.
    pub sign_mismatches: u64,
}

pub const SIM_COLUMNS: [&str; 8] = [
    "snr_db",
    "mu",
    "tones",
    "bit_errors_detector",
    "bit_errors_oracle",
    "ber",
    "mean_total_metric_count",
    "max_llr_discrepancy_vs_oracle",
];

pub fn records_to_csv(records: &[SimRecord]) -> String {
    let mut t = CsvTable::new(&SIM_COLUMNS);
    for r in records {
        t.row(vec![
            fmt_f64(r.snr_db),
            fmt_f64(r.mu),
            r.tones.to_string(),
            r.bit_errors_detector.to_string(),
            r.bit_errors_oracle.to_string(),
            fmt_f64(r.ber),
            fmt_f64(r.mean_total_metric_count),
            fmt_f64(r.max_llr_discrepancy_vs_oracle),
        ]);
    }
    t.finish()
}

struct SimTone {
    errors_detector: u64,
    errors_oracle: u64,
    sign_mismatches: u64,
    total_metric_count: usize,
    discrepancy: f64,
}

fn simulate_tone(
    config: &SimConfig,
    qam: &Constellation64,
    point: usize,
    tone: usize,
    snr_db: f64,
    mu: f64,
) -> Result<SimTone> {
    let mut rng = tone_rng(config.seed, point, tone);
    let sample = generate_tone(&mut rng, config, qam, snr_db, mu)?;
    let fast = detect(&sample.obs, qam, &sample.priors)?;
    let slow = brute_force_maxlog(&sample.obs, qam, &sample.priors)?;
    let mut out = SimTone {
        errors_detector: 0,
        errors_oracle: 0,
        sign_mismatches: 0,
        total_metric_count: fast.total_metric_count,
        discrepancy: max_discrepancy(&fast.llrs, &slow.llrs),
    };
    for layer in Layer::BOTH {
        let i = layer.index();
        for ((&a, &b), &bit) in fast.llrs[i].iter().zip(&slow.llrs[i]).zip(&sample.bits[i]) {
            out.errors_detector += u64::from((a > 0.0) != bit);
            out.errors_oracle += u64::from((b > 0.0) != bit);
            out.sign_mismatches += u64::from((a > 0.0) != (b > 0.0));
        }
    }
    Ok(out)
}

/// Monte-Carlo BER sweep with hard decisions taken from LLR signs.
pub fn run_simulate(config: &SimConfig) -> Result<Vec<SimRecord>> {
    config.validate()?;
    let qam = build_constellation::<f64>(config.order)?;
    let bits_per_tone = 2 * qam.bits_per_symbol() as u64;
    let mut records = Vec::new();
    for (point, (snr_db, mu)) in config.points().into_iter().enumerate() {
        let tones: Vec<SimTone> = (0..config.tones)
            .into_par_iter()
            .map(|tone| simulate_tone(config, &qam, point, tone, snr_db, mu))
            .collect::<Result<_>>()?;
        let mut r = SimRecord {
            snr_db,
            mu,
            tones: config.tones,
            bit_errors_detector: 0,
            bit_errors_oracle: 0,
            ber: 0.0,
            mean_total_metric_count: 0.0,
            max_llr_discrepancy_vs_oracle: 0.0,
            sign_mismatches: 0,
        };
        let mut metric_sum = 0u64;
        for t in &tones {
            r.bit_errors_detector += t.errors_detector;
            r.bit_errors_oracle += t.errors_oracle;
            r.sign_mismatches += t.sign_mismatches;
            metric_sum += t.total_metric_count as u64;
            r.max_llr_discrepancy_vs_oracle =
                sticky_max(r.max_llr_discrepancy_vs_oracle, t.discrepancy);
        }
        r.ber = r.bit_errors_detector as f64 / (bits_per_tone * config.tones as u64) as f64;
        r.mean_total_metric_count = metric_sum as f64 / config.tones as f64;
        records.push(r);
    }
    Ok(records)
}
