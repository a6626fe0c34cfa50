//! Files written into the output directory.
//!
//! CSV content depends only on the inputs: floats use the shortest
//! round-trip representation and rows follow history order.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use histories::history::{BranchSet, DecoherenceReport, HistoryGrid};
use serde_json::{Map, Value};

use crate::error::CliError;

pub const REPORT: &str = "report.txt";
pub const LOG: &str = "run.jsonl";
pub const PROBABILITIES: &str = "probabilities.csv";
pub const DECOHERENCE: &str = "decoherence.csv";
pub const PREDICTION: &str = "prediction.csv";
pub const RETRODICTION: &str = "retrodiction.csv";
pub const REALMS: &str = "realms.csv";

pub struct Output {
    dir: PathBuf,
    report: Vec<(String, String)>,
    log: BufWriter<File>,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        let log = BufWriter::new(File::create(dir.join(LOG))?);
        Ok(Self { dir: dir.to_path_buf(), report: Vec::new(), log })
    }

    /// Appends one JSON object per line: `{"event": ..., fields...}`.
    pub fn log(&mut self, event: &str, fields: Value) -> Result<(), CliError> {
        let mut obj = Map::new();
        obj.insert("event".into(), Value::from(event));
        if let Value::Object(extra) = fields {
            obj.extend(extra);
        }
        serde_json::to_writer(&mut self.log, &Value::Object(obj))?;
        self.log.write_all(b"\n")?;
        self.log.flush()?;
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.report.push((key.to_string(), value.to_string()));
    }

    pub fn write_report(&mut self) -> Result<(), CliError> {
        let mut f = BufWriter::new(File::create(self.dir.join(REPORT))?);
        for (k, v) in &self.report {
            writeln!(f, "{k}: {v}")?;
        }
        f.flush()?;
        self.log("wrote", serde_json::json!({ "file": REPORT }))
    }

    pub fn csv(&mut self, name: &str) -> Result<csv::Writer<File>, CliError> {
        self.log("wrote", serde_json::json!({ "file": name }))?;
        Ok(csv::Writer::from_path(self.dir.join(name))?)
    }
}

/// One label column per family time, then probability and branch norm.
pub fn write_probabilities(
    out: &mut Output,
    grid: &HistoryGrid,
    branches: &BranchSet,
    probabilities: &[f64],
) -> Result<(), CliError> {
    let mut w = out.csv(PROBABILITIES)?;
    let mut header: Vec<String> = grid.times().iter().map(|t| format!("t={t}")).collect();
    header.push("probability".into());
    header.push("branch_norm".into());
    w.write_record(&header)?;
    for ((labels, p), norm) in branches.labels().iter().zip(probabilities).zip(branches.norms()) {
        let mut row = labels.clone();
        row.push(p.to_string());
        row.push(norm.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Coordinate form `(alpha, beta, re, im)` over flat history indices; exact
/// zeros are omitted.
pub fn write_decoherence(out: &mut Output, report: &DecoherenceReport) -> Result<(), CliError> {
    let mut w = out.csv(DECOHERENCE)?;
    w.write_record(["alpha", "beta", "re", "im"])?;
    for a in 0..report.len() {
        for b in 0..report.len() {
            let z = report.entry(a, b);
            if z.re != 0.0 || z.im != 0.0 {
                w.write_record([a.to_string(), b.to_string(), z.re.to_string(), z.im.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
