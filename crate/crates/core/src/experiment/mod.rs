//! Scenario files, SNR sweeps and CSV output.

mod csv_io;
mod runner;
mod scenario;

pub use csv_io::{emit_csv, format_float, read_csv, write_csv, CSV_COLUMNS};
pub use runner::{
    point_seed, run_scenario, run_scenarios, trials_for_point, Mode, RunOptions, SerPoint, ADAPTIVE_THRESHOLD,
    MAX_TRIALS,
};
pub use scenario::{load_scenarios, parse_scenarios, Scenario, MAX_RELAYS, MIN_TRIALS};
