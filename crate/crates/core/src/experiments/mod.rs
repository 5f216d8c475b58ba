//! Desk-scale experiments. Each runner echoes its inputs, records the raw
//! series, fits power laws by least squares in log-log coordinates, and
//! grades the results against declared thresholds.
//!
//! Sweep points are independent and run in parallel; results are assembled
//! in a fixed order so reruns are bit-identical.

pub mod config;
pub mod decoherence;
pub mod dispersive;
pub mod galilean;
pub mod report;
pub mod scattering;
pub mod small_dispersion;

pub use config::Config;
pub use decoherence::{run_decoherence, DecoherenceConfig, DecoherencePoint};
pub use dispersive::{run_dispersive_decay, DispersiveConfig};
pub use galilean::{pseudo_galilean, run_galilean_error, GalileanConfig};
pub use report::{fit_log_log, Check, ExperimentReport, LogLogFit};
pub use scattering::{run_scattering_probe, ScatteringConfig};
pub use small_dispersion::{run_small_dispersion, SmallDispersionConfig};
