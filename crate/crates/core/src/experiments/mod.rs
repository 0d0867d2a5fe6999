//! Seeded experiment drivers and their CSV output.

mod records;
mod scenario_file;
mod sweeps;

pub use records::{read_records, write_records, write_records_to, SweepRecord};
pub use scenario_file::{
    load_scenario, parse_scenario, EveRegion, Experiment, MethodSelection, MAX_PLACEMENT_ATTEMPTS,
};
pub use sweeps::{
    level_crossing, run_bench, run_ber_sweep, run_memratio_sweep, run_secrecy_sweep, run_validate,
    BerMode, BerOptions, MemVary, SecrecyOptions, ValidationReport, SECRECY_LEVEL_BITS,
};
