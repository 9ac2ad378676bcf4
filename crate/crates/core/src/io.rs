//! Matrix files and canonical JSON output.
//!
//! A matrix file is one line of compact JSON followed by a newline:
//!
//! ```text
//! {"dims":[2],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}
//! ```
//!
//! Each entry is a `[re, im]` pair written with the shortest decimal that
//! parses back to the same `f64` (at most 17 significant digits), so
//! `read(write(m)) == m` bit for bit.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::de::{self, DeserializeOwned, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::shape::SystemShape;

/// Shortest round-trip decimal for a finite `f64`, JSON-compatible.
pub fn format_f64(x: f64) -> String {
    let mag = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&mag) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// `serde_json` formatter that writes floats with [`format_f64`].
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalFormatter;

impl serde_json::ser::Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Compact JSON with canonical numbers and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_canonical_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_canonical_json(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn check_finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows = serializer.serialize_seq(Some(self.rows()))?;
        for i in 0..self.rows() {
            let row: Vec<[f64; 2]> = self.row(i).iter().map(|z| [z.re, z.im]).collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        matrix_from_pairs(&rows).map_err(de::Error::custom)
    }
}

fn matrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|row| row.len() != c) {
        return Err(Error::Format(format!(
            "row {bad} has {} entries, expected {c}",
            rows[bad].len()
        )));
    }
    let mut data = Vec::with_capacity(r * c);
    for row in rows {
        for &[re, im] in row {
            data.push(C64::new(check_finite(re)?, check_finite(im)?));
        }
    }
    ComplexMatrix::from_row_major(r, c, data)
}

/// `serde(with = "complex_vec")` for `Vec<C64>` as a list of `[re, im]`.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &[C64],
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(v.len()))?;
        for z in v {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Vec<C64>, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        pairs
            .into_iter()
            .map(|[re, im]| {
                if re.is_finite() && im.is_finite() {
                    Ok(C64::new(re, im))
                } else {
                    Err(de::Error::custom("non-finite vector entry"))
                }
            })
            .collect()
    }
}

/// On-disk form of a state: subsystem dimensions plus the matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn new(m: &ComplexMatrix, shape: &SystemShape) -> Result<Self> {
        let side = m.ensure_square()?;
        if side != shape.total() {
            return Err(Error::Shape(format!(
                "{side}x{side} matrix does not match dims {:?}",
                shape.dims()
            )));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let matrix = (0..m.rows())
            .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Ok(Self {
            dims: shape.dims().to_vec(),
            matrix,
        })
    }

    /// Validates the invariants and returns the matrix with its shape.
    pub fn into_parts(self) -> Result<(ComplexMatrix, SystemShape)> {
        let shape =
            SystemShape::new(self.dims.clone()).map_err(|e| Error::Format(e.to_string()))?;
        let m = matrix_from_pairs(&self.matrix)?;
        if m.rows() != shape.total() || m.cols() != shape.total() {
            return Err(Error::Format(format!(
                "dims {:?} need a {t}x{t} matrix, found {}x{}",
                self.dims,
                m.rows(),
                m.cols(),
                t = shape.total()
            )));
        }
        Ok((m, shape))
    }
}

pub fn matrix_to_string(m: &ComplexMatrix, shape: &SystemShape) -> Result<String> {
    to_canonical_json(&MatrixFile::new(m, shape)?)
}

pub fn matrix_from_str(text: &str) -> Result<(ComplexMatrix, SystemShape)> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.into_parts()
}

pub fn write_matrix<W: Write>(mut w: W, m: &ComplexMatrix, shape: &SystemShape) -> Result<()> {
    w.write_all(matrix_to_string(m, shape)?.as_bytes())?;
    Ok(())
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<(ComplexMatrix, SystemShape)> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    matrix_from_str(&text)
}

pub fn save_matrix(path: impl AsRef<Path>, m: &ComplexMatrix, shape: &SystemShape) -> Result<()> {
    fs::write(path, matrix_to_string(m, shape)?)?;
    Ok(())
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<(ComplexMatrix, SystemShape)> {
    matrix_from_str(&fs::read_to_string(path)?)
}
