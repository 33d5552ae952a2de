//! Configuration, CSV/JSON tables, SVG figures and run manifests.

mod config;
mod manifest;
mod svg;
mod tables;

pub use config::{load_config, ConfigError, OutputFormat, OutputSection, RunConfig, SweepSection};
pub use manifest::{sha256_hex, write_atomic, FileRecord, RunManifest};
pub use svg::{render_figure, Figure, Series, SvgError};
pub use tables::{
    read_curve, read_events, read_histogram, read_sweep, write_curve, write_events,
    write_histogram, write_sweep, TableError,
};
