//! Problem instances as CSV: one centre/point per row, coordinates as columns,
//! no header, shortest round-trip decimal encoding.

use std::path::Path;

use crate::error::{check_dim, Error, Result};
use crate::harness::csvio::atomic_write;
use crate::vector::Vector;

pub fn write_points_csv(points: &[Vector], path: &Path) -> Result<()> {
    atomic_write(path, |w| {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for p in points {
            wtr.write_record(p.iter().map(|c| c.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    })
}

pub fn read_points_csv(path: &Path) -> Result<Vec<Vector>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let coords = rec
            .iter()
            .map(|s| {
                s.trim().parse::<f64>().map_err(|e| Error::Config {
                    line: row + 1,
                    msg: format!("bad coordinate {s:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let v = Vector::new(coords)?;
        if let Some(first) = out.first() {
            check_dim(Vector::dim(first), v.dim())?;
        }
        out.push(v);
    }
    Ok(out)
}
