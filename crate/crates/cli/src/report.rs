//! Report emission. JSON wraps the records with a timestamp and context;
//! CSV carries the records only, one row per cell.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use chebcert::campaign::CellRecord;
use serde::Serialize;

use crate::config::Format;

#[derive(Debug, Serialize)]
pub struct Report<'a, X: Serialize> {
    /// Seconds since the Unix epoch; the only non-deterministic field.
    pub timestamp: u64,
    pub command: &'a str,
    pub records: &'a [CellRecord],
    /// Command-specific context, e.g. the pointwise study or the demo matrices.
    pub context: X,
}

pub fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn write_report<X: Serialize>(
    out: &mut dyn Write,
    format: Format,
    report: &Report<'_, X>,
) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if report.records.is_empty() {
                w.write_record(CSV_HEADER)?;
            }
            for record in report.records {
                w.serialize(record)?;
            }
            w.flush()
        }
    }
}

pub const CSV_HEADER: [&str; 11] = [
    "inequality",
    "seed",
    "dim",
    "n",
    "r",
    "lambda",
    "min_eig",
    "scale",
    "verdict",
    "validated",
    "inputs_digest",
];

#[cfg(test)]
mod tests {
    use super::*;
    use chebcert::Verdict;

    fn record() -> CellRecord {
        CellRecord {
            inequality: "thm41".into(),
            seed: 1,
            dim: 2,
            n: 3,
            r: Some(-0.5),
            lambda: None,
            min_eig: 1.25e-3,
            scale: 2.0,
            verdict: Verdict::Pass,
            validated: true,
            inputs_digest: "thm41/increasing/seed=1/dim=2/n=3".into(),
        }
    }

    #[test]
    fn csv_has_header_and_flat_fields() {
        let records = [record()];
        let report = Report {
            timestamp: 0,
            command: "verify",
            records: &records,
            context: (),
        };
        let mut buf = Vec::new();
        write_report(&mut buf, Format::Csv, &report).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "thm41,1,2,3,-0.5,,0.00125,2.0,pass,true,thm41/increasing/seed=1/dim=2/n=3"
        );
    }

    #[test]
    fn empty_csv_still_has_header() {
        let report = Report {
            timestamp: 0,
            command: "verify",
            records: &[],
            context: (),
        };
        let mut buf = Vec::new();
        write_report(&mut buf, Format::Csv, &report).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), CSV_HEADER.join(","));
    }
}
