//! Binary snapshots of grid functions.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset  size      field
//! 0       8         magic "TDSESNAP"
//! 8       4         u32 format version (1)
//! 12      4         reserved, zero
//! 16      4         u32 number of dimensions d
//! 20      4·d       u32 grid points per dimension
//! ..      8         f64 time
//! ..      16·ΠM     (re, im) f64 pairs, row-major (last axis fastest)
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::{Error, Result};

pub const SNAPSHOT_MAGIC: [u8; 8] = *b"TDSESNAP";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub t: f64,
    pub shape: Vec<usize>,
    pub data: Vec<Complex64>,
}

impl SnapshotFile {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let n: usize = self.shape.iter().product();
        if n != self.data.len() {
            return Err(Error::shape(format!("{n} values for shape {:?}", self.shape), self.data.len()));
        }
        let mut out = Vec::with_capacity(28 + 4 * self.shape.len() + 16 * n);
        out.extend_from_slice(&SNAPSHOT_MAGIC);
        out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
        out.extend_from_slice(&[0u8; 4]);
        out.extend_from_slice(&(self.shape.len() as u32).to_le_bytes());
        for &m in &self.shape {
            let m = u32::try_from(m).map_err(|_| Error::Io(format!("grid size {m} does not fit in u32")))?;
            out.extend_from_slice(&m.to_le_bytes());
        }
        out.extend_from_slice(&self.t.to_le_bytes());
        for z in &self.data {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0usize;
        let mut take = |k: usize| -> Result<&[u8]> {
            let s = bytes.get(pos..pos + k).ok_or_else(|| Error::Io("truncated snapshot".into()))?;
            pos += k;
            Ok(s)
        };
        if take(8)? != SNAPSHOT_MAGIC {
            return Err(Error::Io("not a snapshot file (bad magic)".into()));
        }
        let version = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes"));
        if version != SNAPSHOT_VERSION {
            return Err(Error::Io(format!("unsupported snapshot version {version}")));
        }
        take(4)?;
        let d = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes")) as usize;
        if d == 0 || d > 3 {
            return Err(Error::Io(format!("snapshot dimension {d} unsupported")));
        }
        let mut shape = Vec::with_capacity(d);
        for _ in 0..d {
            shape.push(u32::from_le_bytes(take(4)?.try_into().expect("4 bytes")) as usize);
        }
        let t = f64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
        let n: usize = shape.iter().product();
        let body = take(16 * n)?;
        let data = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                )
            })
            .collect();
        if pos != bytes.len() {
            return Err(Error::Io(format!("{} trailing bytes in snapshot", bytes.len() - pos)));
        }
        Ok(SnapshotFile { t, shape, data })
    }
}

pub fn write_snapshot(path: impl AsRef<Path>, snap: &SnapshotFile) -> Result<()> {
    fs::write(path, snap.to_bytes()?)?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<SnapshotFile> {
    SnapshotFile::from_bytes(&fs::read(path)?)
}
