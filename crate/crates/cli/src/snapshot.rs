//! Field snapshots.
//!
//! Binary layout, all little-endian: the magic `SCHRFLD1`, `u32 n`,
//! `u32 J1..Jn`, `f64 h1..hn`, `f64 t`, then `(J1+1)...(Jn+1)` complex values
//! as interleaved `(re, im)` pairs in row-major order with axis 1 slowest.

use crate::error::{CliError, Result};
use num_complex::Complex64 as C64;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use tdse_core::grid::{GridSpec, WaveField};

pub const MAGIC: &[u8; 8] = b"SCHRFLD1";

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub counts: Vec<usize>,
    pub steps: Vec<f64>,
    pub t: f64,
    pub values: Vec<C64>,
}

impl Snapshot {
    pub fn from_field(field: &WaveField, grid: &GridSpec) -> Self {
        Self {
            counts: grid.counts().to_vec(),
            steps: grid.steps().to_vec(),
            t: field.level as f64 * grid.tau(),
            values: field.values().to_vec(),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let n = self.counts.len();
        let mut out = Vec::with_capacity(8 + 4 + 12 * n + 8 + 16 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(n as u32).to_le_bytes());
        for &j in &self.counts {
            out.extend_from_slice(&(j as u32).to_le_bytes());
        }
        for &h in &self.steps {
            out.extend_from_slice(&h.to_le_bytes());
        }
        out.extend_from_slice(&self.t.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(CliError::Format("missing SCHRFLD1 magic".into()));
        }
        let n = r.u32()? as usize;
        if n == 0 || n > 16 {
            return Err(CliError::Format(format!("implausible dimension {n}")));
        }
        let counts = (0..n)
            .map(|_| r.u32().map(|j| j as usize))
            .collect::<Result<Vec<_>>>()?;
        let steps = (0..n).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let t = r.f64()?;
        let len = counts
            .iter()
            .try_fold(1usize, |acc, &j| acc.checked_mul(j + 1))
            .ok_or_else(|| CliError::Format("node count overflows".into()))?;
        let expected = len
            .checked_mul(16)
            .ok_or_else(|| CliError::Format("node count overflows".into()))?;
        if r.remaining() != expected {
            return Err(CliError::Format(format!(
                "payload holds {} bytes, expected {expected} for shape {counts:?}",
                r.remaining()
            )));
        }
        let values = (0..len)
            .map(|_| Ok(C64::new(r.f64()?, r.f64()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            counts,
            steps,
            t,
            values,
        })
    }

    /// Field on `grid`; the mesh must have the recorded node counts.
    pub fn to_field(&self, grid: &GridSpec) -> Result<WaveField> {
        if grid.counts() != self.counts.as_slice() {
            return Err(CliError::Format(format!(
                "snapshot counts {:?} do not match the mesh {:?}",
                self.counts,
                grid.counts()
            )));
        }
        let mut f = WaveField::from_values(grid, self.values.clone())?;
        f.level = (self.t / grid.tau()).round() as usize;
        Ok(f)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos + k;
        if end > self.bytes.len() {
            return Err(CliError::Format(format!("truncated at byte {}", self.pos)));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

pub fn write_field_snapshot(field: &WaveField, grid: &GridSpec, path: &Path) -> Result<()> {
    fs::write(path, Snapshot::from_field(field, grid).encode()).map_err(|e| CliError::io(path, e))
}

pub fn read_field_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Snapshot::decode(&bytes).map_err(|e| match e {
        CliError::Format(msg) => CliError::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Plotting table with columns `j1,j2,x1,x2,re,im,abs` (n = 2).
pub fn field_csv(field: &WaveField, grid: &GridSpec) -> Result<String> {
    if grid.n() != 2 {
        return Err(CliError::Config(
            "CSV snapshots are written for n = 2 only".into(),
        ));
    }
    let mut out = String::from("j1,j2,x1,x2,re,im,abs\n");
    for j1 in 0..=grid.count(0) {
        for j2 in 0..=grid.count(1) {
            let v = field.at(j1, j2);
            let _ = writeln!(
                out,
                "{j1},{j2},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                grid.coord(0, j1),
                grid.coord(1, j2),
                v.re,
                v.im,
                v.norm()
            );
        }
    }
    Ok(out)
}

pub fn write_field_csv(field: &WaveField, grid: &GridSpec, path: &Path) -> Result<()> {
    fs::write(path, field_csv(field, grid)?).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tdse_core::grid::BoundaryKind;

    fn grid(j: [usize; 2]) -> GridSpec {
        GridSpec::new(&[1.0, 2.0], &j, 0.25, 4, BoundaryKind::Dirichlet).unwrap()
    }

    #[test]
    fn zero_field_layout() {
        let g = grid([2, 2]);
        let bytes = Snapshot::from_field(&WaveField::zeros(&g), &g).encode();
        assert_eq!(bytes.len(), 8 + 4 + 2 * 4 + 2 * 8 + 8 + 9 * 16);
        assert_eq!(&bytes[..8], b"SCHRFLD1");
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(&bytes[20..28], &0.5f64.to_le_bytes());
        assert!(bytes[44..].iter().all(|&b| b == 0));
    }

    #[test]
    fn header_fields() {
        let g = grid([3, 5]);
        let mut f = WaveField::zeros(&g);
        f.level = 3;
        f.set(1, 2, C64::new(1.5, -2.0));
        let s = Snapshot::decode(&Snapshot::from_field(&f, &g).encode()).unwrap();
        assert_eq!(s.counts, vec![3, 5]);
        assert_eq!(s.t, 0.75);
        assert_eq!(s.values[6 + 2], C64::new(1.5, -2.0));
        assert_eq!(s.to_field(&g).unwrap().level, 3);
    }

    #[test]
    fn bad_magic_rejected() {
        let g = grid([2, 2]);
        let mut bytes = Snapshot::from_field(&WaveField::zeros(&g), &g).encode();
        bytes[0] = b'X';
        assert!(
            matches!(Snapshot::decode(&bytes), Err(CliError::Format(m)) if m.contains("magic"))
        );
    }

    #[test]
    fn truncated_payload_rejected() {
        let g = grid([2, 2]);
        let bytes = Snapshot::from_field(&WaveField::zeros(&g), &g).encode();
        assert!(Snapshot::decode(&bytes[..bytes.len() - 1]).is_err());
        assert!(Snapshot::decode(&bytes[..10]).is_err());
    }

    #[test]
    fn csv_rows() {
        let g = grid([2, 2]);
        let csv = field_csv(&WaveField::zeros(&g), &g).unwrap();
        assert_eq!(csv.lines().count(), 10);
        assert!(csv.lines().nth(9).unwrap().starts_with("2,2,1.0"));
    }
}
