//! Monte-Carlo harness around the `sisodet` detector: random tones with
//! genie priors, verification against brute force, BER sweeps, region
//! dumps and complexity tables.

pub mod cli;
pub mod config;
pub mod csv;
pub mod regions;
pub mod report;
pub mod run;
pub mod tone;

pub use config::{ConfigOverrides, NoiseModel, SimConfig};
pub use regions::{compute_regions, parse_regions_csv, regions_to_csv, RegionRow};
pub use report::{complexity_csv, complexity_table, run_complexity};
pub use run::{
    records_to_csv, run_simulate, run_verify, SimRecord, VerifyReport, VerifyRow, VERIFY_TOLERANCE,
};
pub use tone::{generate_tone, tone_rng, ToneDump, ToneSample};
