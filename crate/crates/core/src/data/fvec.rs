//! FVEC v1: a little-endian container for one feature matrix.
//!
//! ```text
//! offset  size          field
//! 0       4             magic "XMFV"
//! 4       1             version = 1
//! 5       1             dtype   = 1 (f32)
//! 6       2             reserved = 0
//! 8       8             rows (u64)
//! 16      8             cols (u64)
//! 24      4*rows*cols   payload, f32, row-major
//! ..      8             label_count (u64, 0 or rows)
//! ..      4*label_count labels (u32)
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use super::FeatureMatrix;
use crate::error::{Error, Result};

pub const FVEC_MAGIC: [u8; 4] = *b"XMFV";
pub const FVEC_VERSION: u8 = 1;
const DTYPE_F32: u8 = 1;
pub(crate) const HEADER_LEN: usize = 24;

pub fn read_fvec(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map(|m| m.with_source_tag(path.display().to_string()))
}

pub fn write_fvec(m: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    m.validate()?;
    let path = path.as_ref();
    let bytes = encode(m);
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn encode(m: &FeatureMatrix) -> Vec<u8> {
    let label_count = m.labels.as_ref().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * m.values.len() + 8 + 4 * label_count);
    out.extend_from_slice(&FVEC_MAGIC);
    out.push(FVEC_VERSION);
    out.push(DTYPE_F32);
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&(m.rows as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols as u64).to_le_bytes());
    for v in &m.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(label_count as u64).to_le_bytes());
    if let Some(labels) = &m.labels {
        for l in labels {
            out.extend_from_slice(&l.to_le_bytes());
        }
    }
    out
}

pub(crate) fn decode(bytes: &[u8]) -> Result<FeatureMatrix> {
    let mut r = Reader::new(bytes);
    let magic: [u8; 4] = r.take(4, "magic")?.try_into().unwrap();
    if magic != FVEC_MAGIC {
        return Err(Error::BadMagic { expected: FVEC_MAGIC, found: magic });
    }
    let version = r.u8("version")?;
    if version != FVEC_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let dtype = r.u8("dtype")?;
    if dtype != DTYPE_F32 {
        return Err(Error::UnsupportedDtype(dtype));
    }
    r.take(2, "reserved")?;
    let rows = r.len("rows")?;
    let cols = r.len("cols")?;
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Truncated(format!("declared shape {rows}x{cols} overflows")))?;
    let payload = r.take_array(count, 4, "payload")?;
    let values: Vec<f32> =
        payload.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
    let label_count = r.len("label count")?;
    let labels = match label_count {
        0 => None,
        n if n == rows => Some(
            r.take_array(n, 4, "labels")?
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        n => return Err(Error::LabelCount { labels: n, rows }),
    };
    FeatureMatrix::with_labels(rows, cols, values, labels)
}

/// Bounds-checked little-endian cursor shared by the binary formats.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| {
            Error::Truncated(format!(
                "{what}: need {n} bytes at offset {}, file has {}",
                self.pos,
                self.bytes.len()
            ))
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub(crate) fn take_array(&mut self, count: usize, width: usize, what: &str) -> Result<&'a [u8]> {
        let n = count
            .checked_mul(width)
            .ok_or_else(|| Error::Truncated(format!("{what}: size overflows")))?;
        self.take(n, what)
    }

    pub(crate) fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    pub(crate) fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    pub(crate) fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    pub(crate) fn len(&mut self, what: &str) -> Result<usize> {
        let v = self.u64(what)?;
        usize::try_from(v).map_err(|_| Error::Truncated(format!("{what} {v} exceeds address space")))
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.pos == self.bytes.len()
    }
}
