use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::runner::SerPoint;

/// Column order of every CSV this crate writes.
pub const CSV_COLUMNS: [&str; 14] = [
    "scenario",
    "snr_db",
    "n_relays",
    "rho_f1",
    "rho_f2",
    "rho_e",
    "modulation",
    "trials",
    "ser_mc",
    "ci_low",
    "ci_high",
    "ser_asymptotic",
    "ser_integral",
    "diversity_order",
];

/// Render with 10 significant digits, in the shortest form that round-trips
/// the rounded value.
pub fn format_float(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let rounded: f64 = format!("{v:.9e}").parse().expect("formatted float parses");
    let mag = rounded.abs();
    if (1e-4..1e6).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn record(p: &SerPoint) -> [String; 14] {
    [
        p.scenario.clone(),
        format_float(p.snr_db),
        p.n_relays.to_string(),
        format_float(p.rho_f1),
        format_float(p.rho_f2),
        format_float(p.rho_e),
        p.modulation.to_string(),
        p.trials.to_string(),
        opt(p.ser_mc),
        opt(p.ci_low),
        opt(p.ci_high),
        opt(p.ser_asymptotic),
        opt(p.ser_integral),
        p.diversity_order.to_string(),
    ]
}

/// Write `points` as CSV to any writer.
pub fn write_csv<W: Write>(points: &[SerPoint], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for p in points {
        w.write_record(record(p))?;
    }
    w.flush()?;
    Ok(())
}

/// Write `points` to `path`, replacing any existing file.
pub fn emit_csv(points: &[SerPoint], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    write_csv(points, std::io::BufWriter::new(file)).map_err(|source| Error::Csv { path: path.to_path_buf(), source })
}

/// Read a CSV written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<SerPoint>> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(Error::config(
            path.display().to_string(),
            format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        ));
    }
    let mut points = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let at = |col: usize| -> Result<&str> {
            rec.get(col).ok_or_else(|| Error::config(format!("{} line {}", path.display(), line + 2), "short row"))
        };
        let bad = |col: usize, what: String| {
            Error::config(format!("{} line {}: {}", path.display(), line + 2, CSV_COLUMNS[col]), what)
        };
        let float = |col: usize| -> Result<f64> {
            let s = at(col)?;
            s.parse::<f64>().map_err(|e| bad(col, format!("{s:?}: {e}")))
        };
        let opt_float = |col: usize| -> Result<Option<f64>> {
            if at(col)?.is_empty() {
                Ok(None)
            } else {
                float(col).map(Some)
            }
        };
        let int = |col: usize| -> Result<u64> {
            let s = at(col)?;
            s.parse::<u64>().map_err(|e| bad(col, format!("{s:?}: {e}")))
        };
        points.push(SerPoint {
            scenario: at(0)?.to_string(),
            snr_db: float(1)?,
            n_relays: int(2)? as u32,
            rho_f1: float(3)?,
            rho_f2: float(4)?,
            rho_e: float(5)?,
            modulation: at(6)?.parse().map_err(|e: Error| bad(6, e.to_string()))?,
            trials: int(7)?,
            ser_mc: opt_float(8)?,
            ci_low: opt_float(9)?,
            ci_high: opt_float(10)?,
            ser_asymptotic: opt_float(11)?,
            ser_integral: opt_float(12)?,
            diversity_order: int(13)? as u32,
        });
    }
    Ok(points)
}
