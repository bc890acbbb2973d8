//! Report, table and binary writers.
//!
//! CSV tables carry a header row and format every float with the shortest
//! representation that parses back to the same `f64`. Binary files are
//! little-endian with a four-byte magic and a `u32` format version.

use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::coupling::CoupledState;
use crate::error::{FsiError, Result};
use crate::evolution::TrajectoryRecord;
use crate::lab::SweepReport;
use crate::linalg::CMat;
use crate::C64;

pub const CSV_SCHEMA: &str = "fsi-strip.csv/1";
pub const STATE_MAGIC: &[u8; 4] = b"FSIS";
pub const MATRIX_MAGIC: &[u8; 4] = b"FSIM";
pub const BINARY_VERSION: u32 = 1;

/// Round-trip float formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// In-memory CSV table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| fmt_f64(x)).collect());
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        let csv_err = |e: csv::Error| FsiError::Numerical(format!("csv: {e}"));
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| FsiError::Numerical(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| FsiError::Numerical(e.to_string()))
    }

    /// Float columns back from CSV text (header skipped).
    pub fn parse_floats(text: &str) -> Result<Vec<Vec<f64>>> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut out = vec![];
        for rec in r.records() {
            let rec = rec.map_err(|e| FsiError::Parse(e.to_string()))?;
            out.push(
                rec.iter()
                    .map(|f| f.parse::<f64>().map_err(|e| FsiError::Parse(format!("{f}: {e}"))))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(out)
    }
}

fn slug(label: &str) -> String {
    let mut s = String::new();
    for c in label.chars() {
        match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' => s.push(c.to_ascii_lowercase()),
            '~' => s.push_str("tilde"),
            _ => {
                if !s.ends_with('-') {
                    s.push('-');
                }
            }
        }
    }
    s.trim_matches('-').to_string()
}

/// Plot tables of a sweep: one `(|lambda|, norm, weighted)` table per series
/// plus a check table. A report without series yields a single header-only
/// table.
pub fn emit_plotdata(report: &SweepReport) -> Vec<Table> {
    let header = ["abs_lambda", "norm", "weighted"];
    let mut out = vec![];
    for (i, s) in report.series.iter().enumerate() {
        let mut t = Table::new(format!("series-{i:02}-{}", slug(&s.label)), &header);
        for ((l, n), w) in report.lambdas.iter().zip(&s.norms).zip(&s.weighted) {
            t.push_floats(&[l.norm(), *n, *w]);
        }
        out.push(t);
    }
    if out.is_empty() {
        out.push(Table::new("series", &header));
    }
    let mut checks = Table::new("checks", &["name", "value", "threshold", "pass"]);
    for c in &report.checks {
        checks.rows.push(vec![
            c.name.clone(),
            fmt_f64(c.value),
            fmt_f64(c.threshold),
            c.pass.to_string(),
        ]);
    }
    out.push(checks);
    out
}

/// `(t, energy, mass, min(1 + eta))` plus divergence, and the per-step norm
/// samples.
pub fn emit_trajectory(traj: &TrajectoryRecord) -> Vec<Table> {
    let mut t = Table::new(
        "trajectory",
        &["t", "energy", "mass", "min_gap", "divergence"],
    );
    for i in 0..traj.len() {
        t.push_floats(&[
            traj.times[i],
            traj.energy[i],
            traj.mass[i],
            traj.min_gap[i],
            traj.divergence[i],
        ]);
    }
    let mut n = Table::new(
        "norms",
        &[
            "t", "w_h1", "w_h2", "w_t_l2", "q_h1", "eta_58", "eta_78", "eta_38", "eta_t_18",
            "eta_t_38", "eta_tt_dual18", "f_l2", "g_18",
        ],
    );
    for (tm, s) in traj.times.iter().zip(&traj.norms) {
        n.push_floats(&[
            *tm,
            s.w_h1,
            s.w_h2,
            s.w_t_l2,
            s.q_h1,
            s.eta_58,
            s.eta_78,
            s.eta_38,
            s.eta_t_18,
            s.eta_t_38,
            s.eta_tt_dual18,
            s.f_l2,
            s.g_18,
        ]);
    }
    vec![t, n]
}

/// Eigenvalues as `(re, im)` rows.
pub fn emit_spectrum(eigs: &[C64]) -> Table {
    let mut t = Table::new("spectrum", &["re", "im"]);
    for z in eigs {
        t.push_floats(&[z.re, z.im]);
    }
    t
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| FsiError::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn put_u32(buf: &mut Vec<u8>, x: u32) {
    buf.extend_from_slice(&x.to_le_bytes());
}

fn put_u64(buf: &mut Vec<u8>, x: u64) {
    buf.extend_from_slice(&x.to_le_bytes());
}

fn put_c64s(buf: &mut Vec<u8>, v: &[C64]) {
    for z in v {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(FsiError::Parse("binary file truncated".into()));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<()> {
        if self.take(4)? != magic {
            return Err(FsiError::Parse("bad magic".into()));
        }
        let v = self.u32()?;
        if v != BINARY_VERSION {
            return Err(FsiError::Parse(format!("unsupported binary version {v}")));
        }
        Ok(())
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn c64s(&mut self, n: usize) -> Result<Vec<C64>> {
        (0..n).map(|_| Ok(C64::new(self.f64()?, self.f64()?))).collect()
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(FsiError::Parse("trailing bytes in binary file".into()));
        }
        Ok(())
    }
}

/// State dump: `FSIS`, version, `t: f64`, `nz: u64`, `nb: u64`, then the
/// fluid, `eta1` and `eta2` coordinates as `(re, im)` pairs of `f64`.
pub fn encode_state(t: f64, z: &CoupledState) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(STATE_MAGIC);
    put_u32(&mut buf, BINARY_VERSION);
    buf.extend_from_slice(&t.to_le_bytes());
    put_u64(&mut buf, z.fluid.len() as u64);
    put_u64(&mut buf, z.eta1.len() as u64);
    put_c64s(&mut buf, &z.fluid);
    put_c64s(&mut buf, &z.eta1);
    put_c64s(&mut buf, &z.eta2);
    buf
}

pub fn decode_state(bytes: &[u8]) -> Result<(f64, CoupledState)> {
    let mut c = Cursor { bytes, pos: 0 };
    c.header(STATE_MAGIC)?;
    let t = c.f64()?;
    let nz = c.u64()? as usize;
    let nb = c.u64()? as usize;
    let fluid = c.c64s(nz)?;
    let eta1 = c.c64s(nb)?;
    let eta2 = c.c64s(nb)?;
    c.finish()?;
    Ok((t, CoupledState { fluid, eta1, eta2 }))
}

/// Dense matrix: `FSIM`, version, `rows: u64`, `cols: u64`, then entries in
/// row-major order as `(re, im)` pairs of `f64`.
pub fn encode_matrix(m: &CMat) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MATRIX_MAGIC);
    put_u32(&mut buf, BINARY_VERSION);
    put_u64(&mut buf, m.nrows() as u64);
    put_u64(&mut buf, m.ncols() as u64);
    for i in 0..m.nrows() {
        let row: Vec<C64> = (0..m.ncols()).map(|j| m[(i, j)]).collect();
        put_c64s(&mut buf, &row);
    }
    buf
}

pub fn decode_matrix(bytes: &[u8]) -> Result<CMat> {
    let mut c = Cursor { bytes, pos: 0 };
    c.header(MATRIX_MAGIC)?;
    let r = c.u64()? as usize;
    let k = c.u64()? as usize;
    let vals = c.c64s(r * k)?;
    c.finish()?;
    Ok(CMat::from_fn(r, k, |i, j| vals[i * k + j]))
}

/// Matrix as `(row, col, re, im)` CSV rows.
pub fn matrix_table(name: &str, m: &CMat) -> Table {
    let mut t = Table::new(name, &["row", "col", "re", "im"]);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            t.rows
                .push(vec![i.to_string(), j.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
        }
    }
    t
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create_new(path).map_err(|e| FsiError::io(path, e))?;
    f.write_all(bytes).map_err(|e| FsiError::io(path, e))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    let mut buf = vec![];
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|e| FsiError::io(path, e))?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_csv() {
        let xs = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0];
        let mut t = Table::new("x", &["a"]);
        for &x in &xs {
            t.push_floats(&[x]);
        }
        let back = Table::parse_floats(&t.to_csv().unwrap()).unwrap();
        for (x, r) in xs.iter().zip(&back) {
            assert_eq!(x.to_bits(), r[0].to_bits());
        }
    }

    #[test]
    fn header_only_table() {
        let t = Table::new("x", &["abs_lambda", "norm", "weighted"]);
        assert_eq!(t.to_csv().unwrap(), "abs_lambda,norm,weighted\n");
    }

    #[test]
    fn state_round_trip() {
        let z = CoupledState {
            fluid: vec![C64::new(1.0, -0.5), C64::new(0.25, 3.0)],
            eta1: vec![C64::new(-1e-9, 2.0)],
            eta2: vec![C64::new(7.0, 0.0)],
        };
        let bytes = encode_state(0.125, &z);
        let (t, back) = decode_state(&bytes).unwrap();
        assert_eq!(t, 0.125);
        assert_eq!(back, z);
        assert!(decode_state(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let m = CMat::from_fn(3, 2, |i, j| C64::new(i as f64, j as f64 - 0.5));
        let back = decode_matrix(&encode_matrix(&m)).unwrap();
        assert_eq!(back, m);
        assert_eq!(matrix_table("m", &m).rows.len(), 6);
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("||[A1^3/8, K]|| / ||K||"), "a1-3-8-k-k");
        assert_eq!(slug("V~ (0, 0)"), "vtilde-0-0");
    }
}
