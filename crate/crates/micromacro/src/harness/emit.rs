//! Plain-text emission of sweep records and plot-ready series.
//!
//! The records file is a flat CSV with one row per `(eps, dt)` measurement.
//! Floats are written in shortest round-trip form, so everything except the
//! `runtime_s` column is reproducible across runs. The series writers pivot
//! the same records into one column per `eps` (or per `dt`), which plotting
//! tools ingest directly; they omit runtimes and are byte-stable.

use std::io::{self, BufRead, BufReader, Read, Write};

use super::{HarnessError, SweepRecord};

/// Header of the records CSV.
pub const RECORDS_HEADER: &str = "problem,scheme,n,eps,dt,error,runtime_s,flags";

/// Writes records as CSV, one row per measurement.
pub fn write_records_csv<W: Write>(w: &mut W, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(w, "{RECORDS_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.problem, r.scheme, r.n, r.eps, r.dt, r.error, r.runtime_s, r.flags
        )?;
    }
    Ok(())
}

/// Reads records back from CSV; inverse of [`write_records_csv`] up to
/// float round-trip (exact, since floats are written in round-trip form).
pub fn read_records_csv<R: Read>(r: R) -> Result<Vec<SweepRecord>, HarnessError> {
    let reader = BufReader::new(r);
    let mut records = Vec::new();
    let mut saw_header = false;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != RECORDS_HEADER {
                return Err(HarnessError::Csv(format!(
                    "line {}: expected header `{RECORDS_HEADER}`, found `{line}`",
                    idx + 1
                )));
            }
            saw_header = true;
            continue;
        }
        // flags is the last field and may itself contain `;`-separated
        // annotations, so split at most 8 ways
        let fields: Vec<&str> = line.splitn(8, ',').collect();
        if fields.len() != 8 {
            return Err(HarnessError::Csv(format!(
                "line {}: expected 8 fields, found {}",
                idx + 1,
                fields.len()
            )));
        }
        let parse_f64 = |field: &str, name: &str| -> Result<f64, HarnessError> {
            field.parse::<f64>().map_err(|_| {
                HarnessError::Csv(format!("line {}: bad {name} `{field}`", idx + 1))
            })
        };
        records.push(SweepRecord {
            problem: fields[0].to_string(),
            scheme: fields[1]
                .parse()
                .map_err(|e: String| HarnessError::Csv(format!("line {}: {e}", idx + 1)))?,
            n: fields[2].parse().map_err(|_| {
                HarnessError::Csv(format!("line {}: bad order `{}`", idx + 1, fields[2]))
            })?,
            eps: parse_f64(fields[3], "eps")?,
            dt: parse_f64(fields[4], "dt")?,
            error: parse_f64(fields[5], "error")?,
            runtime_s: parse_f64(fields[6], "runtime_s")?,
            flags: fields[7].to_string(),
        });
    }
    if !saw_header {
        return Err(HarnessError::Csv("empty records file".into()));
    }
    Ok(records)
}

fn sorted_unique(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| a.to_bits() == b.to_bits());
    v
}

fn format_error(e: Option<f64>) -> String {
    match e {
        Some(e) => format!("{e}"),
        None => String::new(),
    }
}

/// Writes error-versus-`dt` series, one column per `eps`.
///
/// Rows are ascending in `dt`; a missing `(eps, dt)` combination leaves an
/// empty cell. Output contains no runtimes and is byte-stable.
pub fn write_series_by_eps<W: Write>(w: &mut W, records: &[SweepRecord]) -> io::Result<()> {
    let eps_values = sorted_unique(records.iter().map(|r| r.eps));
    let dt_values = sorted_unique(records.iter().map(|r| r.dt));
    write!(w, "dt")?;
    for eps in &eps_values {
        write!(w, ",eps={eps}")?;
    }
    writeln!(w)?;
    for dt in &dt_values {
        write!(w, "{dt}")?;
        for eps in &eps_values {
            let cell = records
                .iter()
                .find(|r| r.eps.to_bits() == eps.to_bits() && r.dt.to_bits() == dt.to_bits())
                .map(|r| r.error);
            write!(w, ",{}", format_error(cell))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Writes error-versus-`eps` series, one column per `dt`.
///
/// Rows are ascending in `eps`. Flat rows across this file are the
/// signature of uniform accuracy.
pub fn write_series_by_dt<W: Write>(w: &mut W, records: &[SweepRecord]) -> io::Result<()> {
    let eps_values = sorted_unique(records.iter().map(|r| r.eps));
    let dt_values = sorted_unique(records.iter().map(|r| r.dt));
    write!(w, "eps")?;
    for dt in &dt_values {
        write!(w, ",dt={dt}")?;
    }
    writeln!(w)?;
    for eps in &eps_values {
        write!(w, "{eps}")?;
        for dt in &dt_values {
            let cell = records
                .iter()
                .find(|r| r.eps.to_bits() == eps.to_bits() && r.dt.to_bits() == dt.to_bits())
                .map(|r| r.error);
            write!(w, ",{}", format_error(cell))?;
        }
        writeln!(w)?;
    }
    Ok(())
}
