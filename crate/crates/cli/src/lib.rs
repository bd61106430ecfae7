//! Configuration-driven runner for correlation plenoptic imaging
//! experiments.
//!
//! A TOML config ([`config`]) selects one of five modes: quadrature of the
//! correlation (`analytic`), its speckle Monte Carlo estimate
//! (`montecarlo`), the geometric-optics limit (`geometric`), refocusing of a
//! defocused acquisition (`refocus`), or the pixel-budget comparison
//! (`budget`). [`run::run_experiment`] writes CSV, PGM and JSON files plus a
//! `manifest.json` listing their SHA-256 digests.

pub mod config;
pub mod demos;
pub mod error;
pub mod output;
pub mod run;

pub use config::{load_config, parse_config, ExperimentConfig, Mode};
pub use error::{CliError, FieldError};
pub use run::{run_experiment, RunManifest};
