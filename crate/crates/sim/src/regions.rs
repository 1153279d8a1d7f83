//! Dump of the prior-shifted decision regions for all four axes.

use anyhow::{bail, ensure, Context, Result};
use sisodet::{axis_log_priors, build_constellation, build_regions, AprioriLlrs, Axis, Layer};

use crate::config::SimConfig;
use crate::csv::{fmt_f64, CsvTable};
use crate::tone::{generate_tone, tone_rng};

pub const REGION_COLUMNS: [&str; 7] = [
    "axis",
    "layer",
    "symbol_index",
    "point",
    "lower",
    "upper",
    "empty",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RegionRow {
    pub axis: Axis,
    pub layer: Layer,
    pub symbol_index: usize,
    pub point: f64,
    /// `None` for pruned symbols.
    pub bounds: Option<(f64, f64)>,
}

impl RegionRow {
    pub fn empty(&self) -> bool {
        self.bounds.is_none()
    }
}

/// Slicing gains for both layers: either `gain` for both, or the whitened
/// column energies of the first tone drawn with `config`.
pub fn region_gains(config: &SimConfig, gain: Option<f64>) -> Result<[f64; 2]> {
    if let Some(g) = gain {
        ensure!(
            g.is_finite() && g > 0.0,
            "--gain must be positive and finite, got {g}"
        );
        return Ok([g, g]);
    }
    let qam = build_constellation::<f64>(config.order)?;
    let mut rng = tone_rng(config.seed, 0, 0);
    let tone = generate_tone(&mut rng, config, &qam, config.snr_db[0], 0.0)?;
    Ok(Layer::BOTH.map(|l| tone.obs.gain(l)))
}

pub fn compute_regions(
    config: &SimConfig,
    llrs: &[f64],
    gain: Option<f64>,
) -> Result<Vec<RegionRow>> {
    config.validate()?;
    let qam = build_constellation::<f64>(config.order)?;
    let q = qam.bits_per_symbol();
    if llrs.len() != 2 * q {
        bail!(
            "--llrs needs {} values ({q} per layer) for M={}, got {}",
            2 * q,
            config.order,
            llrs.len()
        );
    }
    let priors =
        AprioriLlrs::new(llrs[..q].to_vec(), llrs[q..].to_vec()).context("malformed LLR vector")?;
    let gains = region_gains(config, gain)?;
    let mut rows = Vec::new();
    for layer in Layer::BOTH {
        for axis in Axis::BOTH {
            let pam = match axis {
                Axis::Real => qam.real_axis(),
                Axis::Imag => qam.imag_axis(),
            };
            let regions = build_regions(
                pam,
                &axis_log_priors(&priors, layer, axis, pam),
                gains[layer.index()],
            )?;
            for k in 0..regions.len() {
                rows.push(RegionRow {
                    axis,
                    layer,
                    symbol_index: k,
                    point: pam.point(k),
                    bounds: regions.interval(k).map(|i| (i.lower, i.upper)),
                });
            }
        }
    }
    Ok(rows)
}

pub fn regions_to_csv(rows: &[RegionRow]) -> String {
    let mut t = CsvTable::new(&REGION_COLUMNS);
    for r in rows {
        let (lower, upper) = match r.bounds {
            Some((lo, hi)) => (fmt_f64(lo), fmt_f64(hi)),
            None => (String::new(), String::new()),
        };
        t.row(vec![
            r.axis.name().to_string(),
            r.layer.number().to_string(),
            r.symbol_index.to_string(),
            fmt_f64(r.point),
            lower,
            upper,
            r.empty().to_string(),
        ]);
    }
    t.finish()
}

pub fn parse_regions_csv(text: &str) -> Result<Vec<RegionRow>> {
    let mut lines = text.lines();
    let header = lines.next().context("empty region CSV")?;
    ensure!(
        header == REGION_COLUMNS.join(","),
        "unexpected header {header:?}"
    );
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            ensure!(
                f.len() == REGION_COLUMNS.len(),
                "row {}: expected 7 fields",
                i + 1
            );
            let axis = Axis::BOTH
                .into_iter()
                .find(|a| a.name() == f[0])
                .with_context(|| format!("row {}: unknown axis {:?}", i + 1, f[0]))?;
            let layer = match f[1] {
                "1" => Layer::First,
                "2" => Layer::Second,
                other => bail!("row {}: unknown layer {other:?}", i + 1),
            };
            let empty: bool = f[6]
                .parse()
                .with_context(|| format!("row {}: bad empty flag", i + 1))?;
            let bounds = if empty {
                ensure!(
                    f[4].is_empty() && f[5].is_empty(),
                    "row {}: pruned symbol with bounds",
                    i + 1
                );
                None
            } else {
                Some((f[4].parse()?, f[5].parse()?))
            };
            Ok(RegionRow {
                axis,
                layer,
                symbol_index: f[2].parse()?,
                point: f[3].parse()?,
                bounds,
            })
        })
        .collect()
}
