//! Header + raw float64 artifact container.
//!
//! An artifact `name.json` holds a JSON header (a `kind`, free-form `meta`,
//! and an ordered list of named blocks with their shapes). The payload lives
//! in the sidecar `name.bin` as the blocks' little-endian IEEE-754 doubles,
//! concatenated in header order with no padding.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::to_string_fixed;

pub const FORMAT: &str = "dipoed-f64-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

impl BlockSpec {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub kind: String,
    pub meta: serde_json::Value,
    pub blocks: Vec<BlockSpec>,
}

#[derive(Debug, Clone)]
pub struct Container {
    pub kind: String,
    pub meta: serde_json::Value,
    blocks: Vec<(BlockSpec, Vec<f64>)>,
}

pub fn sidecar_path(header: &Path) -> PathBuf {
    header.with_extension("bin")
}

impl Container {
    pub fn new(kind: impl Into<String>, meta: serde_json::Value) -> Self {
        Self {
            kind: kind.into(),
            meta,
            blocks: Vec::new(),
        }
    }

    /// Appends a row-major `rows × cols` block.
    pub fn push(&mut self, name: &str, rows: usize, cols: usize, data: Vec<f64>) {
        assert_eq!(data.len(), rows * cols, "block {name} has wrong length");
        self.blocks.push((
            BlockSpec {
                name: name.to_string(),
                rows,
                cols,
            },
            data,
        ));
    }

    pub fn block_names(&self) -> impl Iterator<Item = &str> {
        self.blocks.iter().map(|(s, _)| s.name.as_str())
    }

    pub fn block(&self, name: &str) -> Result<(&BlockSpec, &[f64])> {
        self.blocks
            .iter()
            .find(|(s, _)| s.name == name)
            .map(|(s, d)| (s, d.as_slice()))
            .ok_or_else(|| Error::Corrupt(format!("missing block '{name}'")))
    }

    /// Fetches a block and checks its shape.
    pub fn block_shaped(&self, name: &str, rows: usize, cols: usize) -> Result<&[f64]> {
        let (spec, data) = self.block(name)?;
        if spec.rows != rows || spec.cols != cols {
            return Err(Error::Corrupt(format!(
                "block '{name}' is {}x{} but header implies {rows}x{cols}",
                spec.rows, spec.cols
            )));
        }
        Ok(data)
    }

    pub fn header(&self) -> Header {
        Header {
            format: FORMAT.to_string(),
            kind: self.kind.clone(),
            meta: self.meta.clone(),
            blocks: self.blocks.iter().map(|(s, _)| s.clone()).collect(),
        }
    }

    pub fn payload(&self) -> Vec<u8> {
        let total: usize = self.blocks.iter().map(|(s, _)| s.len()).sum();
        let mut out = Vec::with_capacity(total * 8);
        for (_, data) in &self.blocks {
            for v in data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Writes `path` (header) and its `.bin` sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, to_string_fixed(&self.header())?)?;
        fs::write(sidecar_path(path), self.payload())?;
        Ok(())
    }

    pub fn load(path: &Path, expected_kind: &str) -> Result<Self> {
        let header: Header = serde_json::from_str(&fs::read_to_string(path)?)
            .map_err(|e| Error::Corrupt(format!("{}: bad header: {e}", path.display())))?;
        let payload = fs::read(sidecar_path(path))?;
        Self::from_parts(header, &payload, expected_kind)
    }

    pub fn from_parts(header: Header, payload: &[u8], expected_kind: &str) -> Result<Self> {
        if header.format != FORMAT {
            return Err(Error::Corrupt(format!("unknown format '{}'", header.format)));
        }
        if header.kind != expected_kind {
            return Err(Error::Corrupt(format!(
                "expected a '{expected_kind}' artifact, found '{}'",
                header.kind
            )));
        }
        let mut offset = 0usize;
        let mut blocks = Vec::with_capacity(header.blocks.len());
        for spec in header.blocks {
            let bytes = spec.len() * 8;
            let available = payload.len().saturating_sub(offset);
            if available < bytes {
                return Err(Error::Corrupt(format!(
                    "truncated payload: block '{}' needs {bytes} bytes, {available} remain",
                    spec.name
                )));
            }
            let data = payload[offset..offset + bytes]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect();
            offset += bytes;
            blocks.push((spec, data));
        }
        if offset != payload.len() {
            return Err(Error::Corrupt(format!(
                "payload has {} trailing bytes beyond the declared blocks",
                payload.len() - offset
            )));
        }
        Ok(Self {
            kind: header.kind,
            meta: header.meta,
            blocks,
        })
    }
}

pub(crate) fn meta_usize(meta: &serde_json::Value, key: &str) -> Result<usize> {
    meta.get(key)
        .and_then(|v| v.as_u64())
        .map(|v| v as usize)
        .ok_or_else(|| Error::Corrupt(format!("header field '{key}' missing or not an integer")))
}

pub(crate) fn meta_f64(meta: &serde_json::Value, key: &str) -> Result<f64> {
    meta.get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::Corrupt(format!("header field '{key}' missing or not a number")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Container {
        let mut c = Container::new("test", serde_json::json!({"n": 2}));
        c.push("a", 1, 2, vec![1.0, -0.0]);
        c.push("b", 2, 1, vec![f64::MIN_POSITIVE, 3.5]);
        c
    }

    #[test]
    fn round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.json");
        let c = sample();
        c.save(&path).unwrap();
        let back = Container::load(&path, "test").unwrap();
        let (_, a) = back.block("a").unwrap();
        assert_eq!(a[1].to_bits(), (-0.0f64).to_bits());
        assert_eq!(back.block_shaped("b", 2, 1).unwrap(), &[f64::MIN_POSITIVE, 3.5]);
    }

    #[test]
    fn truncated_payload_names_missing_block() {
        let c = sample();
        let payload = c.payload();
        let err = Container::from_parts(c.header(), &payload[..20], "test").unwrap_err();
        assert!(err.to_string().contains("'b'"), "{err}");
    }

    #[test]
    fn trailing_bytes_and_wrong_kind_rejected() {
        let c = sample();
        let mut payload = c.payload();
        payload.push(0);
        assert!(Container::from_parts(c.header(), &payload, "test").is_err());
        assert!(Container::from_parts(c.header(), &c.payload(), "other").is_err());
    }

    #[test]
    fn shape_conflict_is_reported() {
        let c = sample();
        assert!(c.block_shaped("a", 2, 1).is_err());
    }
}
