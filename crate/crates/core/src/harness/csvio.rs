//! CSV output with atomic replacement of the target file.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::run::{Cell, CompareTable, ResultTable, TraceRow};

/// Writes through a temporary file in the target directory, then renames it
/// over `path`, so readers never observe a partially written file.
pub fn atomic_write<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub const TRACE_HEADER: [&str; 10] = [
    "iter",
    "f_value",
    "f_best",
    "L_k",
    "delta_k",
    "Delta_k",
    "inner_calls",
    "step_norm",
    "cert_bound",
    "elapsed_ms",
];

pub const TABLE_HEADER: [&str; 4] = ["iters", "mean_estimate", "std_estimate", "mean_time_ms"];

pub const CELL_HEADER: [&str; 6] = ["iters", "replication", "seed", "estimate", "f_output", "time_ms"];

pub const COMPARE_HEADER: [&str; 7] = [
    "seed",
    "adaptive_bound",
    "nonadaptive_bound",
    "fixed_arm_bound",
    "adaptive_gap",
    "fixed_gap",
    "dominates",
];

pub const FACTOR_HEADER: [&str; 4] = ["seed", "iter", "adaptive_factor", "nonadaptive_factor"];

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    atomic_write(path, |w| {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(header)?;
        for row in rows {
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    })
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let got: Vec<&str> = rdr.headers()?.iter().collect();
    if got != header {
        return Err(Error::Config {
            line: 1,
            msg: format!("expected header {}, got {}", header.join(","), got.join(",")),
        });
    }
    Ok(rdr.records().collect::<std::result::Result<Vec<_>, _>>()?)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, row: usize, col: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let s = rec.get(col).unwrap_or("");
    s.parse().map_err(|e| Error::Config {
        line: row + 2,
        msg: format!("column {col}: bad value {s:?}: {e}"),
    })
}

/// `f64` in shortest round-trip form.
fn num(v: f64) -> String {
    v.to_string()
}

pub fn write_trace_csv(rows: &[TraceRow], path: &Path) -> Result<()> {
    write_rows(
        path,
        &TRACE_HEADER,
        rows.iter().map(|r| {
            vec![
                r.iter.to_string(),
                num(r.f_value),
                num(r.f_best),
                num(r.l_k),
                num(r.delta_k),
                num(r.grad_err_k),
                r.inner_calls.to_string(),
                num(r.step_norm),
                num(r.cert_bound),
                num(r.elapsed_ms),
            ]
        }),
    )
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    read_rows(path, &TRACE_HEADER)?
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(TraceRow {
                iter: field(r, i, 0)?,
                f_value: field(r, i, 1)?,
                f_best: field(r, i, 2)?,
                l_k: field(r, i, 3)?,
                delta_k: field(r, i, 4)?,
                grad_err_k: field(r, i, 5)?,
                inner_calls: field(r, i, 6)?,
                step_norm: field(r, i, 7)?,
                cert_bound: field(r, i, 8)?,
                elapsed_ms: field(r, i, 9)?,
            })
        })
        .collect()
}

/// Summary rows `iters,mean_estimate,std_estimate,mean_time_ms`.
pub fn write_table_csv(table: &ResultTable, path: &Path) -> Result<()> {
    write_rows(
        path,
        &TABLE_HEADER,
        table.rows.iter().map(|r| {
            vec![
                r.iters.to_string(),
                num(r.mean_estimate),
                num(r.std_estimate),
                num(r.mean_time_ms),
            ]
        }),
    )
}

/// `(iters, mean_estimate, std_estimate, mean_time_ms)` per row.
pub fn read_table_csv(path: &Path) -> Result<Vec<(usize, f64, f64, f64)>> {
    read_rows(path, &TABLE_HEADER)?
        .iter()
        .enumerate()
        .map(|(i, r)| Ok((field(r, i, 0)?, field(r, i, 1)?, field(r, i, 2)?, field(r, i, 3)?)))
        .collect()
}

/// Per-replication values behind a table; failed cells are written as NaN.
pub fn write_cells_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let seed0 = table.spec.seed;
    write_rows(
        path,
        &CELL_HEADER,
        table.rows.iter().flat_map(|row| {
            row.cells.iter().enumerate().map(move |(r, c)| {
                let (e, f, t) = match c {
                    Cell::Ok(s) => (s.estimate, s.f_output, s.elapsed_ms),
                    Cell::Failed(_) => (f64::NAN, f64::NAN, f64::NAN),
                };
                vec![
                    row.iters.to_string(),
                    r.to_string(),
                    seed0.wrapping_add(r as u64).to_string(),
                    num(e),
                    num(f),
                    num(t),
                ]
            })
        }),
    )
}

pub fn write_compare_csv(table: &CompareTable, path: &Path) -> Result<()> {
    write_rows(
        path,
        &COMPARE_HEADER,
        table.runs.iter().map(|r| {
            vec![
                r.seed.to_string(),
                num(r.adaptive_bound),
                num(r.nonadaptive_bound),
                num(r.fixed_arm_bound),
                num(r.adaptive_gap),
                num(r.fixed_gap),
                r.dominates().to_string(),
            ]
        }),
    )
}

/// Per-iteration factor traces of the comparison, for audit.
pub fn write_factors_csv(table: &CompareTable, path: &Path) -> Result<()> {
    write_rows(
        path,
        &FACTOR_HEADER,
        table.runs.iter().flat_map(|r| {
            r.adaptive_factors
                .iter()
                .zip(&r.nonadaptive_factors)
                .enumerate()
                .map(move |(i, (a, b))| vec![r.seed.to_string(), (i + 1).to_string(), num(*a), num(*b)])
        }),
    )
}
