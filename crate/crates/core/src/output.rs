//! CSV and JSON artifacts for fidelity curves.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::harness::{CurvePoint, ExperimentConfig, FidelityCurve, RunResult};

pub const CSV_HEADER: &str = "nu,mean_fidelity,stderr,f_opt,delta_f";
pub const RUNS_CSV_HEADER: &str = "run,nu,fidelity,h,degenerate";

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Everything written for one campaign. Field order is the JSON key order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub config: ExperimentConfig,
    pub curve: Vec<CurvePoint>,
    pub version: String,
}

impl OutputDocument {
    pub fn new(config: ExperimentConfig, curve: FidelityCurve) -> Self {
        Self {
            config,
            curve: curve.points,
            version: VERSION.to_string(),
        }
    }
}

/// Header plus one row per `nu`, six decimals, `\n` line endings.
pub fn emit_csv<W: Write + ?Sized>(doc: &OutputDocument, sink: &mut W) -> io::Result<()> {
    writeln!(sink, "{CSV_HEADER}")?;
    let mut rows: Vec<&CurvePoint> = doc.curve.iter().collect();
    rows.sort_by_key(|p| p.nu);
    for p in rows {
        writeln!(
            sink,
            "{},{:.6},{:.6},{:.6},{:.6}",
            p.nu, p.mean_fidelity, p.standard_error, p.f_opt, p.delta_f
        )?;
    }
    sink.flush()
}

/// Pretty-printed JSON object with keys `config`, `curve`, `version`.
pub fn emit_json<W: Write + ?Sized>(doc: &OutputDocument, sink: &mut W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *sink, doc).map_err(io::Error::from)?;
    sink.write_all(b"\n")?;
    sink.flush()
}

/// Per-run traces, one row per run and `nu`.
pub fn emit_runs_csv<W: Write + ?Sized>(runs: &[RunResult], sink: &mut W) -> io::Result<()> {
    writeln!(sink, "{RUNS_CSV_HEADER}")?;
    for (r, run) in runs.iter().enumerate() {
        for (i, (f, (h, deg))) in run
            .fidelity_trace
            .iter()
            .zip(run.h_trace.iter().zip(&run.degenerate_flags))
            .enumerate()
        {
            writeln!(sink, "{},{},{:.6},{:.6},{}", r, i + 1, f, h, u8::from(*deg))?;
        }
    }
    sink.flush()
}
