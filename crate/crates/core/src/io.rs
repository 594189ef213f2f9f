//! Flat-file formats. Point sets are CSV with header `x,y,z,w_re[,w_im]`,
//! `#` comments, integer coordinates and decimal weights; exact sets take
//! `w_re` as an integer or `p/q` and no `w_im` column.

use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::incidence::PlanarLine;
use crate::lattice::LatticePoint;
use crate::weighted::{Weights, WeightedSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "numeric" => Ok(Mode::Numeric),
            _ => Err(Error::Invalid(format!("unknown mode {s:?} (exact | numeric)"))),
        }
    }
}

struct Row {
    line: u64,
    fields: Vec<String>,
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Rows after a header whose leading columns are `required`, optionally
/// followed by `optional` ones; returns the matched width.
fn read_table<R: Read>(mut reader: R, required: &[&str], optional: &[&str]) -> Result<(usize, Vec<Row>)> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| parse_err(0, e.to_string()))?;
    let mut width = None;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = body.split(',').map(|f| f.trim().to_string()).collect();
        match width {
            None => {
                let n = fields.len();
                let ok = n >= required.len()
                    && n <= required.len() + optional.len()
                    && fields.iter().zip(required.iter().chain(optional)).all(|(a, b)| a == b);
                if !ok {
                    return Err(parse_err(
                        line,
                        format!("expected header {}{}", required.join(","), optional.iter().map(|o| format!("[,{o}]")).collect::<String>()),
                    ));
                }
                width = Some(n);
            }
            Some(w) => {
                if fields.len() != w {
                    return Err(parse_err(line, format!("expected {w} fields, found {}", fields.len())));
                }
                rows.push(Row { line, fields });
            }
        }
    }
    match width {
        Some(w) => Ok((w, rows)),
        None => Err(parse_err(1, "missing header")),
    }
}

fn int_field(row: &Row, i: usize) -> Result<i64> {
    row.fields[i]
        .parse::<i64>()
        .map_err(|_| parse_err(row.line, format!("column {}: {:?} is not an integer", i + 1, row.fields[i])))
}

fn point_field(row: &Row) -> Result<LatticePoint> {
    let p = LatticePoint::new(int_field(row, 0)?, int_field(row, 1)?, int_field(row, 2)?);
    p.check_bound().map_err(|e| parse_err(row.line, e.to_string()))?;
    Ok(p)
}

/// Integer or `p/q` literal.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            (q != BigInt::from(0)).then(|| BigRational::new(p, q))
        }
        None => BigInt::from_str(s).ok().map(BigRational::from_integer),
    }
}

fn float_field(row: &Row, i: usize) -> Result<f64> {
    let v = row.fields[i]
        .parse::<f64>()
        .map_err(|_| parse_err(row.line, format!("column {}: {:?} is not a number", i + 1, row.fields[i])))?;
    if !v.is_finite() {
        return Err(parse_err(row.line, format!("column {}: non-finite weight", i + 1)));
    }
    Ok(v)
}

pub fn read_weighted_set<R: Read>(reader: R, mode: Mode) -> Result<WeightedSet> {
    let (width, rows) = read_table(reader, &["x", "y", "z", "w_re"], &["w_im"])?;
    match mode {
        Mode::Exact => {
            if width == 5 {
                return Err(parse_err(1, "exact mode does not accept a w_im column"));
            }
            let mut entries = Vec::with_capacity(rows.len());
            for row in &rows {
                let p = point_field(row)?;
                let w = parse_rational(&row.fields[3])
                    .ok_or_else(|| parse_err(row.line, format!("{:?} is not an integer or p/q literal", row.fields[3])))?;
                if w.is_negative() {
                    return Err(parse_err(row.line, "exact weights must be nonnegative"));
                }
                entries.push((p, w));
            }
            WeightedSet::from_exact(entries)
        }
        Mode::Numeric => {
            let mut entries = Vec::with_capacity(rows.len());
            for row in &rows {
                let p = point_field(row)?;
                let re = float_field(row, 3)?;
                let im = if width == 5 { float_field(row, 4)? } else { 0.0 };
                entries.push((p, Complex64::new(re, im)));
            }
            WeightedSet::from_numeric(entries)
        }
    }
}

pub fn read_weighted_set_path(path: &Path, mode: Mode) -> Result<WeightedSet> {
    read_weighted_set(std::fs::File::open(path)?, mode)
}

/// Spatial points from `x,y,z` (weight columns, if present, are ignored).
pub fn read_points<R: Read>(reader: R) -> Result<Vec<LatticePoint>> {
    let (_, rows) = read_table(reader, &["x", "y", "z"], &["w_re", "w_im"])?;
    rows.iter().map(point_field).collect()
}

pub fn read_planar_points<R: Read>(reader: R) -> Result<Vec<[i64; 2]>> {
    let (_, rows) = read_table(reader, &["x", "y"], &[])?;
    rows.iter().map(|r| Ok([int_field(r, 0)?, int_field(r, 1)?])).collect()
}

/// Lines `a x + b y + c = 0` from `a,b,c`.
pub fn read_planar_lines<R: Read>(reader: R) -> Result<Vec<PlanarLine>> {
    let (_, rows) = read_table(reader, &["a", "b", "c"], &[])?;
    rows.iter()
        .map(|r| PlanarLine::new(int_field(r, 0)?, int_field(r, 1)?, int_field(r, 2)?).map_err(|e| parse_err(r.line, e.to_string())))
        .collect()
}

/// Shortest round-trip decimals, so reading back is bit-exact.
pub fn write_weighted_set<W: Write>(mut w: W, f: &WeightedSet) -> Result<()> {
    match f.weights() {
        Weights::Exact(ws) => {
            writeln!(w, "x,y,z,w_re")?;
            for (p, r) in f.points().iter().zip(ws) {
                let v = if r.is_integer() { r.numer().to_string() } else { format!("{}/{}", r.numer(), r.denom()) };
                writeln!(w, "{},{},{},{v}", p.0[0], p.0[1], p.0[2])?;
            }
        }
        Weights::Numeric(ws) => {
            writeln!(w, "x,y,z,w_re,w_im")?;
            for (p, z) in f.points().iter().zip(ws) {
                writeln!(w, "{},{},{},{:?},{:?}", p.0[0], p.0[1], p.0[2], z.re, z.im)?;
            }
        }
    }
    Ok(())
}

pub fn write_points<W: Write>(mut w: W, pts: &[LatticePoint]) -> Result<()> {
    writeln!(w, "x,y,z")?;
    for p in pts {
        writeln!(w, "{},{},{}", p.0[0], p.0[1], p.0[2])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn exact_round_trip() {
        let text = "# two points\nx,y,z,w_re\n0,0,0,1\n1, 1, 0 ,3/6\n\n0,0,0,2\n";
        let f = read_weighted_set(text.as_bytes(), Mode::Exact).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.exact_weights().unwrap()[0], BigRational::from_integer(3.into()));
        assert_eq!(f.exact_weights().unwrap()[1], BigRational::one() / BigRational::from_integer(2.into()));
        let mut out = Vec::new();
        write_weighted_set(&mut out, &f).unwrap();
        assert_eq!(read_weighted_set(out.as_slice(), Mode::Exact).unwrap(), f);
    }

    #[test]
    fn numeric_round_trip_is_bit_exact() {
        let f = WeightedSet::from_numeric([
            (LatticePoint::new(1, -2, 3), Complex64::new(0.1, 1.0 / 3.0)),
            (LatticePoint::new(0, 5, -7), Complex64::new(-2.5e-300, 7.0)),
        ])
        .unwrap();
        let mut out = Vec::new();
        write_weighted_set(&mut out, &f).unwrap();
        let g = read_weighted_set(out.as_slice(), Mode::Numeric).unwrap();
        assert_eq!(g, f);
        let real = read_weighted_set("x,y,z,w_re\n1,2,3,0.5\n".as_bytes(), Mode::Numeric).unwrap();
        assert_eq!(real.weight_at(&LatticePoint::new(1, 2, 3)), Complex64::new(0.5, 0.0));
    }

    fn line_of(e: Error) -> u64 {
        match e {
            Error::Parse { line, .. } => line,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "x,y,z,w_re\n0,0,0,1\n# note\n1,a,0,1\n";
        assert_eq!(line_of(read_weighted_set(bad.as_bytes(), Mode::Exact).unwrap_err()), 4);
        let short = "x,y,z,w_re\n0,0,0,1\n1,1,0\n";
        assert_eq!(line_of(read_weighted_set(short.as_bytes(), Mode::Numeric).unwrap_err()), 3);
        let header = "a,b,c,d\n0,0,0,1\n";
        assert_eq!(line_of(read_weighted_set(header.as_bytes(), Mode::Numeric).unwrap_err()), 1);
        let imag = "x,y,z,w_re,w_im\n0,0,0,1,0\n";
        assert!(read_weighted_set(imag.as_bytes(), Mode::Exact).is_err());
        let neg = "x,y,z,w_re\n0,0,0,-1\n";
        assert_eq!(line_of(read_weighted_set(neg.as_bytes(), Mode::Exact).unwrap_err()), 2);
        let decimal = "x,y,z,w_re\n0,0,0,0.5\n";
        assert_eq!(line_of(read_weighted_set(decimal.as_bytes(), Mode::Exact).unwrap_err()), 2);
        let huge = "x,y,z,w_re\n2000000,0,0,1\n";
        assert_eq!(line_of(read_weighted_set(huge.as_bytes(), Mode::Exact).unwrap_err()), 2);
        assert!(read_weighted_set("".as_bytes(), Mode::Exact).is_err());
    }

    #[test]
    fn planar_inputs() {
        let pts = read_planar_points("x,y\n0,0\n1,2\n".as_bytes()).unwrap();
        assert_eq!(pts, vec![[0, 0], [1, 2]]);
        let ls = read_planar_lines("a,b,c\n2,-4,6\n".as_bytes()).unwrap();
        assert_eq!(ls[0], PlanarLine { a: 1, b: -2, c: 3 });
        assert!(read_planar_lines("a,b,c\n0,0,1\n".as_bytes()).is_err());
        let sp = read_points("x,y,z,w_re\n1,2,3,9\n".as_bytes()).unwrap();
        assert_eq!(sp, vec![LatticePoint::new(1, 2, 3)]);
    }
}
