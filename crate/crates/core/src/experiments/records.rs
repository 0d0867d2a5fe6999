use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One row of experiment output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub sweep_name: String,
    pub coordinate: f64,
    pub method: String,
    pub metric_name: String,
    pub value: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SweepRecord {
    pub fn new(
        sweep_name: impl Into<String>,
        coordinate: f64,
        method: impl Into<String>,
        metric_name: impl Into<String>,
        value: f64,
        trials: u64,
        seed: u64,
    ) -> Self {
        Self {
            sweep_name: sweep_name.into(),
            coordinate,
            method: method.into(),
            metric_name: metric_name.into(),
            value,
            trials,
            seed,
        }
    }
}

/// Writes a header row and one line per record, LF-terminated. Floats use
/// the shortest representation that parses back to the same value.
pub fn write_records_to<W: Write>(out: W, records: &[SweepRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    if records.is_empty() {
        w.write_record([
            "sweep_name",
            "coordinate",
            "method",
            "metric_name",
            "value",
            "trials",
            "seed",
        ])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records(path: impl AsRef<Path>, records: &[SweepRecord]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_records_to(std::io::BufWriter::new(file), records)
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}
