// SPDX-License-Identifier: MIT OR Apache-2.0

//! ACTV1: a self-describing container for activation matrices.
//!
//! ```text
//! ACTV1\n
//! {"d":…,"rows":…,"dtype":"f32","layer_id":…,"concept_id":…,"role":…,"model_tag":…}\n
//! rows·d little-endian f32, row-major
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::atomic_write;
use crate::error::{CrhError, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub const MAGIC: &[u8; 6] = b"ACTV1\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Pos,
    Neg,
    Prompt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActvHeader {
    pub d: usize,
    pub rows: usize,
    pub dtype: String,
    pub layer_id: i64,
    pub concept_id: String,
    pub role: Role,
    pub model_tag: String,
}

impl ActvHeader {
    pub fn new(d: usize, rows: usize, layer_id: i64, concept_id: &str, role: Role, model_tag: &str) -> Self {
        Self {
            d,
            rows,
            dtype: "f32".into(),
            layer_id,
            concept_id: concept_id.into(),
            role,
            model_tag: model_tag.into(),
        }
    }

    pub fn payload_bytes(&self) -> Option<usize> {
        self.rows.checked_mul(self.d)?.checked_mul(4)
    }

    fn validate(&self) -> Result<()> {
        if self.dtype != "f32" {
            return Err(CrhError::MalformedHeader(format!("unsupported dtype {:?}", self.dtype)));
        }
        if self.d < 2 {
            return Err(CrhError::MalformedHeader(format!("d must be >= 2, got {}", self.d)));
        }
        if self.payload_bytes().is_none() {
            return Err(CrhError::MalformedHeader("payload size overflows".into()));
        }
        Ok(())
    }
}

/// A decoded file: parsed header, its exact text, and the widened matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ActvFile {
    pub header: ActvHeader,
    pub raw_header: String,
    pub matrix: Matrix<f64>,
}

pub fn encode_actv<T: Scalar>(header: &ActvHeader, matrix: &Matrix<T>) -> Result<Vec<u8>> {
    header.validate()?;
    if matrix.rows() != header.rows || (matrix.cols() != header.d && header.rows > 0) {
        return Err(CrhError::DimensionMismatch {
            expected: header.rows * header.d,
            actual: matrix.rows() * matrix.cols(),
        });
    }
    let json = serde_json::to_string(header)?;
    let mut out = Vec::with_capacity(MAGIC.len() + json.len() + 1 + matrix.data().len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(json.as_bytes());
    out.push(b'\n');
    for x in matrix.data() {
        let v = x
            .to_f32()
            .ok_or_else(|| CrhError::NonFinite("value not representable as f32".into()))?;
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_actv(bytes: &[u8]) -> Result<ActvFile> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(CrhError::BadMagic);
    }
    let rest = &bytes[MAGIC.len()..];
    let nl = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| CrhError::MalformedHeader("header line is not terminated".into()))?;
    let raw_header = std::str::from_utf8(&rest[..nl])
        .map_err(|e| CrhError::MalformedHeader(format!("header is not UTF-8: {e}")))?
        .to_owned();
    let header: ActvHeader = serde_json::from_str(&raw_header).map_err(|e| CrhError::MalformedHeader(e.to_string()))?;
    header.validate()?;
    let payload = &rest[nl + 1..];
    let expected = header.payload_bytes().unwrap_or(usize::MAX);
    if payload.len() < expected {
        return Err(CrhError::Truncated {
            expected,
            actual: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(CrhError::TrailingBytes {
            expected,
            actual: payload.len(),
        });
    }
    let data: Vec<f64> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    if data.iter().any(|x| !x.is_finite()) {
        return Err(CrhError::NonFinite("ACTV1 payload".into()));
    }
    let matrix = Matrix::new(header.rows, header.d, data)?;
    Ok(ActvFile {
        header,
        raw_header,
        matrix,
    })
}

/// Writes atomically (temp file, fsync, rename).
pub fn write_actv<T: Scalar>(path: &Path, header: &ActvHeader, matrix: &Matrix<T>) -> Result<()> {
    let bytes = encode_actv(header, matrix)?;
    atomic_write(path, |f| f.write_all(&bytes))
}

pub fn read_actv(path: &Path) -> Result<ActvFile> {
    decode_actv(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(rows: usize, d: usize) -> ActvHeader {
        ActvHeader::new(d, rows, 9, "male_female", Role::Pos, "toy")
    }

    #[test]
    fn two_by_three_payload() {
        let m = Matrix::new(2, 3, vec![1.0f32, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let bytes = encode_actv(&header(2, 3), &m).unwrap();
        let json_len = bytes[6..].iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(bytes.len() - 6 - json_len - 1, 24);
        let back = decode_actv(&bytes).unwrap();
        assert_eq!(back.matrix.cast::<f32>(), m);
    }

    #[test]
    fn empty_file() {
        let m = Matrix::<f64>::zeros(0, 4);
        let bytes = encode_actv(&header(0, 4), &m).unwrap();
        let back = decode_actv(&bytes).unwrap();
        assert_eq!((back.header.rows, back.matrix.rows()), (0, 0));
    }

    #[test]
    fn distinct_errors() {
        let m = Matrix::new(1, 2, vec![1.0, 2.0]).unwrap();
        let good = encode_actv(&header(1, 2), &m).unwrap();
        let mut bad = good.clone();
        bad[0] = b'B';
        assert!(matches!(decode_actv(&bad), Err(CrhError::BadMagic)));
        let short = &good[..good.len() - 4];
        match decode_actv(short) {
            Err(CrhError::Truncated { expected, actual }) => assert_eq!((expected, actual), (8, 4)),
            other => panic!("unexpected {other:?}"),
        }
        let mut long = good.clone();
        long.push(0);
        assert!(matches!(decode_actv(&long), Err(CrhError::TrailingBytes { .. })));
        let mut broken = MAGIC.to_vec();
        broken.extend_from_slice(b"{\"d\":2}\n");
        assert!(matches!(decode_actv(&broken), Err(CrhError::MalformedHeader(_))));
    }

    #[test]
    fn header_kept_verbatim() {
        let raw = r#"{"model_tag":"m","role":"neg","concept_id":"c","layer_id":3,"dtype":"f32","rows":1,"d":2}"#;
        let mut bytes = MAGIC.to_vec();
        bytes.extend_from_slice(raw.as_bytes());
        bytes.push(b'\n');
        bytes.extend_from_slice(&1.5f32.to_le_bytes());
        bytes.extend_from_slice(&(-2.0f32).to_le_bytes());
        let f = decode_actv(&bytes).unwrap();
        assert_eq!(f.raw_header, raw);
        assert_eq!(f.header.role, Role::Neg);
        assert_eq!(f.matrix.data(), &[1.5, -2.0]);
    }

    #[test]
    fn mismatched_header_rejected() {
        let m = Matrix::new(1, 2, vec![1.0, 2.0]).unwrap();
        assert!(encode_actv(&header(2, 2), &m).is_err());
    }
}
