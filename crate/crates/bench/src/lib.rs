//! Parameter sweeps over the terminal time `T`, rate tables and the property
//! suite for the `plate-nc` schemes.

pub mod checks;
pub mod config;
pub mod error;
pub mod loglog;
pub mod sweep;
pub mod table;

pub use config::{InitialData, NormChoice, Scheme, SweepConfig};
pub use error::{BenchError, Result};
pub use loglog::{fit_loglog_slope, loglog_data};
pub use sweep::{run_sweep, SweepRow, SweepTable};
pub use table::{emit_table, OutputFormat};
