//! Experiment configs, the truncated Gaussian sampler, file formats,
//! run manifests and the `run` / `verify` / `report` commands.

mod commands;
mod config;
mod format;
mod manifest;
mod sampler;

pub use commands::{
    cmd_report, cmd_run, cmd_verify, continuity_times, exit_code, verify_measure, PlotData, ReportFormat, RunOutput,
    SeriesData, VerifyOptions, VerifyOutput, EXIT_CHECK_FAILURE, EXIT_PASS, EXIT_RUNTIME, EXIT_USAGE,
};
pub use config::{
    AtomConfig, CheckConfig, ClampMode, DomainConfig, Experiment, ExperimentConfig, ForcingConfig, InitialConfig,
    ModeConfig, OutputConfig, RadiusConfig, SegmentConfig, SolverConfig, TimeConfig, CHECK_NAMES,
};
pub use format::{
    field_from_reals, field_to_reals, forcing_from_file, forcing_to_file, read_measure, read_trajectory, write_json,
    write_trajectory, ForcingSegmentFile, GridSpec, LoadedMeasure, MeasureFile, TrajectoryFile, MEASURE_FORMAT,
    TRAJECTORY_FORMAT,
};
pub use manifest::{sha256_hex, unix_now, FileEntry, RunManifest, Timestamps, MANIFEST_FORMAT};
pub use sampler::{clamp_atom, rescale_to_radius, sample_gaussian_measure, SpectralGaussian};
