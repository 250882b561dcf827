//! File formats and emitters.
//!
//! All numeric output goes through [`fmt::sci9`] (scientific notation, nine
//! significant digits), so identical inputs produce byte-identical files.

pub mod config;
pub mod fmt;
pub mod mesh;
pub mod series;
pub mod vtk;

pub use config::{read_config, RunConfig};
pub use mesh::{read_mesh, write_mesh};
pub use series::{read_series_csv, write_point_csv, write_series_csv, SeriesRow};
pub use vtk::{step_filename, write_vtk};
