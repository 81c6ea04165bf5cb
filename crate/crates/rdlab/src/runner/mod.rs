//! Scenario files, artifact emission, and the run modes behind the `rdlab`
//! binary: `simulate`, `lab-beta`, `lab-k1`, `lab-ckp`, `equilibrium` and
//! `validate`.

pub mod config;
pub mod csv;
pub mod run;
pub mod svg;

pub use config::{parse_config, Mode, RunConfig};
pub use csv::{render_trajectory_csv, CSV_HEADER, CSV_SCHEMA};
pub use run::{build_initial_state, exit_code_for, run, run_quiet, RunSummary};
pub use svg::{emit_svg_lineplot, render_svg_lineplot, PlotOptions, PlotSeries};
