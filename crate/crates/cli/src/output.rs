use std::io::Write;

use serde_json::{json, Value};

use crate::error::CliError;
use crate::run::Record;

pub const SCHEMA: u32 = 1;

pub const CSV_COLUMNS: [&str; 12] = [
    "seed",
    "algo",
    "n",
    "cost",
    "oracle_cost",
    "ratio",
    "passes",
    "peak_words",
    "phase_breakdown",
    "redo_count",
    "attribution_check",
    "identity_ok",
];

pub fn write_json(spec: Value, records: &[Record], mut w: impl Write) -> Result<(), CliError> {
    let doc = json!({ "schema": SCHEMA, "spec": spec, "records": records });
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    Ok(())
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// `schema=1` line, a header row, then one row per record. Phases are
/// packed as `name:passes:words` joined by `;`.
pub fn write_csv(records: &[Record], mut w: impl Write) -> Result<(), CliError> {
    writeln!(w, "schema={SCHEMA}")?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_COLUMNS)?;
    for r in records {
        let phases: Vec<String> =
            r.phase_breakdown.iter().map(|(k, p)| format!("{k}:{}:{}", p.passes, p.words)).collect();
        let algo = serde_json::to_value(r.algo)?;
        out.write_record([
            r.seed.to_string(),
            algo.as_str().unwrap_or_default().to_string(),
            r.n.to_string(),
            r.cost.to_string(),
            opt(r.oracle_cost),
            opt(r.ratio),
            r.passes.to_string(),
            r.peak_words.to_string(),
            phases.join(";"),
            opt(r.redo_count),
            opt(r.attribution_check),
            r.identity_ok.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
