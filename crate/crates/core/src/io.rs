//! CSV and JSON encodings of point sets.
//!
//! CSV: a header line, then one row per point with the `d + 1` integer
//! numerators, `norm_sq`, and the `d + 1` float coordinates written in
//! shortest round-trip form.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointset::{FieldInfo, PointSet, SpherePoint};

pub const SCHEMA: &str = "ffsphere/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointFormat {
    Csv,
    Json,
}

#[derive(Serialize, Deserialize)]
struct PointSetDoc {
    schema: String,
    d: usize,
    p: u32,
    e: u32,
    q: u64,
    n: usize,
    points: Vec<SpherePoint>,
}

/// Default file name used by the CLI.
pub fn default_file_name(set: &PointSet, format: PointFormat) -> String {
    let ext = match format {
        PointFormat::Csv => "csv",
        PointFormat::Json => "json",
    };
    format!("X_d{}_q{}.{ext}", set.d(), set.q())
}

pub fn write_points<W: Write>(set: &PointSet, format: PointFormat, out: &mut W) -> Result<()> {
    match format {
        PointFormat::Csv => write_csv(set, out),
        PointFormat::Json => {
            let doc = PointSetDoc {
                schema: SCHEMA.to_string(),
                d: set.d(),
                p: set.field().p,
                e: set.field().e,
                q: set.q(),
                n: set.len(),
                points: set.points().collect(),
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
            Ok(())
        }
    }
}

fn write_csv<W: Write>(set: &PointSet, out: &mut W) -> Result<()> {
    let dim = set.dim();
    let mut header: Vec<String> = (0..dim).map(|i| format!("w{i}")).collect();
    header.push("norm_sq".into());
    header.extend((0..dim).map(|i| format!("x{i}")));
    writeln!(out, "{}", header.join(","))?;
    for i in 0..set.len() {
        let mut row: Vec<String> = set.numerators(i).iter().map(i64::to_string).collect();
        row.push(set.norm_sq(i).to_string());
        row.extend(set.coords(i).iter().map(|c| format!("{c:?}")));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Reads a CSV written by [`write_points`]. Field metadata is not part of
/// the CSV layout, so only the points come back.
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<SpherePoint>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))??;
    let cols = header.split(',').count();
    if cols < 5 || (cols - 1) % 2 != 0 {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let dim = (cols - 1) / 2;
    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(Error::Parse(format!(
                "row {}: {} columns",
                lineno + 2,
                fields.len()
            )));
        }
        let ints = fields[..=dim]
            .iter()
            .map(|s| s.parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 2)))?;
        let coords = fields[dim + 1..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", lineno + 2)))?;
        points.push(SpherePoint {
            numerators: ints[..dim].to_vec(),
            norm_sq: ints[dim],
            coords,
        });
    }
    Ok(points)
}

/// Reads a JSON document written by [`write_points`].
pub fn read_json<R: std::io::Read>(input: R) -> Result<PointSet> {
    let doc: PointSetDoc = serde_json::from_reader(input)?;
    if doc.schema != SCHEMA {
        return Err(Error::Parse(format!("unknown schema {:?}", doc.schema)));
    }
    let vectors = doc.points.into_iter().map(|p| p.numerators).collect();
    PointSet::from_numerators(doc.d, FieldInfo { p: doc.p, e: doc.e }, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::solve::DEFAULT_BUDGET;

    fn x(d: usize, p: u64) -> PointSet {
        PointSet::build(d, &PrimeField::new(p).unwrap(), DEFAULT_BUDGET).unwrap()
    }

    fn csv(set: &PointSet) -> String {
        let mut buf = Vec::new();
        write_points(set, PointFormat::Csv, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn octahedron_rows() {
        let text = csv(&x(2, 3));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "w0,w1,w2,norm_sq,x0,x1,x2");
        assert_eq!(lines.len(), 7);
        assert!(lines.contains(&"1,0,0,1,1.0,0.0,0.0"));
        assert_eq!(lines[1], "-1,0,0,1,-1.0,0.0,0.0");
    }

    #[test]
    fn octagon_diagonal_row() {
        let text = csv(&x(1, 7));
        let row = text.lines().find(|l| l.starts_with("2,2,")).unwrap();
        assert_eq!(row, "2,2,8,0.7071067811865475,0.7071067811865475");
        assert_eq!(0.7071067811865475f64, 2.0 / 8f64.sqrt());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let set = x(3, 7);
        let back = read_csv(csv(&set).as_bytes()).unwrap();
        assert_eq!(back.len(), set.len());
        for (i, p) in back.iter().enumerate() {
            assert_eq!(p.numerators, set.numerators(i));
            assert_eq!(p.norm_sq, set.norm_sq(i));
            assert_eq!(p.coords, set.coords(i));
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let set = x(2, 11);
        let mut buf = Vec::new();
        write_points(&set, PointFormat::Json, &mut buf).unwrap();
        let back = read_json(buf.as_slice()).unwrap();
        assert_eq!(back.len(), set.len());
        assert_eq!(back.field(), set.field());
        assert_eq!(back.flat_coords(), set.flat_coords());
        for i in 0..set.len() {
            assert_eq!(back.numerators(i), set.numerators(i));
        }
    }

    #[test]
    fn file_names() {
        assert_eq!(default_file_name(&x(2, 7), PointFormat::Csv), "X_d2_q7.csv");
    }

    #[test]
    fn malformed_csv() {
        assert!(read_csv("".as_bytes()).is_err());
        assert!(read_csv("w0,w1,norm_sq,x0,x1\n1,0,1,1.0\n".as_bytes()).is_err());
        assert!(read_csv("w0,w1,norm_sq,x0,x1\n1,a,1,1.0,0.0\n".as_bytes()).is_err());
    }
}
