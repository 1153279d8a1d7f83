//! Simulation configuration: CLI flags layered under an optional
//! `key = value` file, then validated.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use sisodet::{build_constellation, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    White,
    /// Equal correlation `rho` between every pair of receive antennas.
    Correlated(f64),
}

impl NoiseModel {
    pub fn from_rho(rho: f64) -> Self {
        if rho == 0.0 {
            NoiseModel::White
        } else {
            NoiseModel::Correlated(rho)
        }
    }

    pub fn rho(self) -> f64 {
        match self {
            NoiseModel::White => 0.0,
            NoiseModel::Correlated(rho) => rho,
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::White => f.write_str("white"),
            NoiseModel::Correlated(rho) => write!(f, "correlated({rho})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub order: usize,
    pub receive_antennas: usize,
    pub transmit_antennas: usize,
    pub snr_db: Vec<f64>,
    pub mu: Vec<f64>,
    pub tones: usize,
    pub seed: u64,
    pub noise: NoiseModel,
    pub out: Option<PathBuf>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            order: 16,
            receive_antennas: 2,
            transmit_antennas: 2,
            snr_db: vec![10.0],
            mu: vec![0.0],
            tones: 1000,
            seed: 1,
            noise: NoiseModel::White,
            out: None,
        }
    }
}

/// Unvalidated settings; `None` falls through to the next layer.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub order: Option<usize>,
    pub receive_antennas: Option<usize>,
    pub transmit_antennas: Option<usize>,
    pub snr_db: Option<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
    pub tones: Option<usize>,
    pub seed: Option<u64>,
    pub rho: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ConfigOverrides {
    /// Fields set in `other` win.
    pub fn merge(self, other: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            order: other.order.or(self.order),
            receive_antennas: other.receive_antennas.or(self.receive_antennas),
            transmit_antennas: other.transmit_antennas.or(self.transmit_antennas),
            snr_db: other.snr_db.or(self.snr_db),
            mu: other.mu.or(self.mu),
            tones: other.tones.or(self.tones),
            seed: other.seed.or(self.seed),
            rho: other.rho.or(self.rho),
            out: other.out.or(self.out),
        }
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<ConfigOverrides> {
        let mut o = ConfigOverrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("config line {}: expected key = value", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim().trim_matches('"'));
            let ctx = || format!("config line {}: bad value for {key}", lineno + 1);
            match key {
                "M" | "m" | "order" => o.order = Some(value.parse().with_context(ctx)?),
                "nr" => o.receive_antennas = Some(value.parse().with_context(ctx)?),
                "nt" => o.transmit_antennas = Some(value.parse().with_context(ctx)?),
                "snr-db" | "snr_db" => o.snr_db = Some(parse_list(value).with_context(ctx)?),
                "mu" => o.mu = Some(parse_list(value).with_context(ctx)?),
                "tones" => o.tones = Some(value.parse().with_context(ctx)?),
                "seed" => o.seed = Some(value.parse().with_context(ctx)?),
                "rho" => o.rho = Some(value.parse().with_context(ctx)?),
                "out" => o.out = Some(PathBuf::from(value)),
                other => bail!("config line {}: unknown key {other:?}", lineno + 1),
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<ConfigOverrides> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn resolve(self) -> Result<SimConfig> {
        let d = SimConfig::default();
        let config = SimConfig {
            order: self.order.unwrap_or(d.order),
            receive_antennas: self.receive_antennas.unwrap_or(d.receive_antennas),
            transmit_antennas: self.transmit_antennas.unwrap_or(d.transmit_antennas),
            snr_db: self.snr_db.unwrap_or(d.snr_db),
            mu: self.mu.unwrap_or(d.mu),
            tones: self.tones.unwrap_or(d.tones),
            seed: self.seed.unwrap_or(d.seed),
            noise: NoiseModel::from_rho(self.rho.unwrap_or(0.0)),
            out: self.out.or(d.out),
        };
        config.validate()?;
        Ok(config)
    }
}

pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("not a number: {v:?}"))
        })
        .collect()
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        build_constellation::<f64>(self.order)
            .with_context(|| format!("invalid --M {}", self.order))?;
        if self.receive_antennas < 2 || self.receive_antennas > 8 {
            bail!(
                "--nr must be between 2 and 8, got {}",
                self.receive_antennas
            );
        }
        if self.transmit_antennas < 2 {
            bail!("--nt must be at least 2, got {}", self.transmit_antennas);
        }
        if self.tones == 0 {
            bail!("--tones must be at least 1");
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|v| !v.is_finite()) {
            bail!("--snr-db needs at least one finite value");
        }
        if self.mu.is_empty() || self.mu.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            bail!("--mu values must be finite and non-negative");
        }
        let rho = self.noise.rho();
        let floor = -1.0 / (self.receive_antennas as f64 - 1.0);
        if !(rho > floor && rho < 1.0) {
            bail!(
                "--rho {rho} gives a singular noise covariance for {} antennas",
                self.receive_antennas
            );
        }
        Ok(())
    }

    /// `(snr_db, mu)` pairs in output order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.snr_db
            .iter()
            .flat_map(|&s| self.mu.iter().map(move |&m| (s, m)))
            .collect()
    }

    /// Per-antenna noise variance: unit-energy symbols over a CN(0,1)
    /// channel give `E‖Hs‖² = 2·N_r`, so `σ² = 2·10^(−snr/10)`.
    pub fn noise_variance(snr_db: f64) -> f64 {
        2.0 * 10f64.powf(-snr_db / 10.0)
    }

    pub fn noise_covariance(&self, snr_db: f64) -> ComplexMatrix<f64> {
        let sigma2 = Self::noise_variance(snr_db);
        let rho = self.noise.rho();
        ComplexMatrix::from_fn(self.receive_antennas, self.receive_antennas, |i, j| {
            Complex64::new(if i == j { sigma2 } else { rho * sigma2 }, 0.0)
        })
    }
}
