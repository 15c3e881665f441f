//! Run configuration, figure data, golden files and the verification gates
//! behind the command-line tool.

mod config;
mod csv;
mod figures;
mod golden;
mod verify;

pub use config::{fmt_f64, parse_number, FigureName, FrameworkChoice, RunConfig, HEADER_MAGIC, KEYS};
pub use csv::{format_value, parse_rows, CsvTable};
pub use figures::{generate_figure, write_tables};
pub use golden::{check_golden, default_golden_dir, default_tables, sha256_hex, write_golden, GoldenReport, MANIFEST};
pub use verify::{run_all, run_gate, GateResult, Suite, VerifyOptions, FIGURE_BATHS, GATE_COUNT};
