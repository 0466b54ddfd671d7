//! Point-set and measure files, and CSV output with round-trip floats.
//!
//! CSV inputs hold one point per row with an optional header; a column named
//! `weight` is read as the point's mass. JSON inputs are either an array of
//! coordinate arrays or `{"points": [...], "weights": [...]}`.

use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Points with optional weights as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFile {
    pub points: PointSet,
    pub weights: Option<Vec<f64>>,
}

/// Float formatting with 17 significant digits, which round-trips any `f64`.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

pub fn read_point_file(path: &Path) -> Result<PointFile> {
    let text = std::fs::read_to_string(path)?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with(['[', '{']);
    let parsed = if is_json { parse_json(&text) } else { parse_csv(&text) };
    parsed.map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonPoints {
    Rows(Vec<Vec<f64>>),
    Weighted {
        points: Vec<Vec<f64>>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
}

pub fn parse_json(text: &str) -> Result<PointFile> {
    let parsed: JsonPoints = serde_json::from_str(text)?;
    let (rows, weights) = match parsed {
        JsonPoints::Rows(rows) => (rows, None),
        JsonPoints::Weighted { points, weights } => (points, weights),
    };
    let points = PointSet::from_rows(&rows)?;
    check_weights(&points, weights.as_deref())?;
    Ok(PointFile { points, weights })
}

pub fn parse_csv(text: &str) -> Result<PointFile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut records = reader.records().peekable();
    let mut weight_col = None;
    let mut header_width = None;
    if let Some(Ok(first)) = records.peek() {
        if first.iter().any(|f| f.parse::<f64>().is_err()) {
            weight_col = first.iter().position(|f| f.eq_ignore_ascii_case("weight"));
            header_width = Some(first.len());
            records.next();
        }
    }
    let mut rows = Vec::new();
    let mut weights = Vec::new();
    for (line, rec) in records.enumerate() {
        let rec = rec?;
        if let Some(w) = header_width {
            if rec.len() != w {
                return Err(Error::Parse(format!(
                    "row {} has {} fields, header has {w}",
                    line + 1,
                    rec.len()
                )));
            }
        }
        let mut row = Vec::with_capacity(rec.len());
        for (k, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: '{field}' is not a number", line + 1)))?;
            if Some(k) == weight_col {
                weights.push(v);
            } else {
                row.push(v);
            }
        }
        rows.push(row);
    }
    let points = PointSet::from_rows(&rows)?;
    let weights = weight_col.map(|_| weights);
    check_weights(&points, weights.as_deref())?;
    Ok(PointFile { points, weights })
}

fn check_weights(points: &PointSet, weights: Option<&[f64]>) -> Result<()> {
    if let Some(w) = weights {
        if w.len() != points.len() {
            return Err(Error::Parse(format!(
                "{} weights for {} points",
                w.len(),
                points.len()
            )));
        }
    }
    Ok(())
}

/// Writes `x0..x{d-1}` CSV, one point per row.
pub fn write_points_csv<W: Write>(out: W, points: &PointSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record((0..points.dim()).map(|k| format!("x{k}")))?;
    for p in points.iter() {
        w.write_record(p.iter().map(|v| fmt_float(*v)))?;
    }
    w.flush()?;
    Ok(())
}

pub const REPORT_HEADER: [&str; 7] = [
    "bound_name",
    "bound_value",
    "measured",
    "std_error",
    "slack",
    "verdict",
    "note",
];

/// One row per report; absent values are empty fields.
pub fn write_reports_csv<W: Write>(out: W, reports: &[BoundReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in reports {
        w.write_record([
            r.bound_name.clone(),
            fmt_float(r.bound_value),
            fmt_opt(r.measured),
            fmt_opt(r.std_error),
            fmt_opt(r.slack),
            r.verdict.to_string(),
            r.note.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Generic table writer for plot-ready output.
pub fn write_table_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_with_header_and_weights() {
        let f = parse_csv("x0,x1,weight\n0,1,0.25\n2,3,0.75\n").unwrap();
        assert_eq!(f.points.coords(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(f.weights, Some(vec![0.25, 0.75]));
    }

    #[test]
    fn csv_without_header() {
        let f = parse_csv("0.5, 1\n2, 3\n").unwrap();
        assert_eq!(f.points.dim(), 2);
        assert!(f.weights.is_none());
    }

    #[test]
    fn ragged_csv_rejected() {
        assert!(parse_csv("0,1\n2\n").is_err());
        assert!(parse_csv("x0,x1\n0,1\n2\n").is_err());
        assert!(parse_csv("x0\nabc\n").is_err());
    }

    #[test]
    fn json_forms() {
        let rows = parse_json("[[0,1],[2,3]]").unwrap();
        assert_eq!(rows.points.len(), 2);
        let w = parse_json(r#"{"points": [[0],[1]], "weights": [0.5, 0.5]}"#).unwrap();
        assert_eq!(w.weights.unwrap(), vec![0.5, 0.5]);
        assert!(parse_json("[[0,1],[2]]").is_err());
        assert!(parse_json(r#"{"points": [[0]], "weights": [0.5, 0.5]}"#).is_err());
    }

    #[test]
    fn report_csv_layout() {
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &[BoundReport::exact("b", 2.0, 1.0).with_note("a, b")]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("bound_name,bound_value,measured,std_error,slack,verdict,note\n"));
        assert!(text.contains("\"a, b\""));
        assert!(text.contains(",pass,"));
    }
}
