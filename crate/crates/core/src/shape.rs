use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered subsystem dimensions of a composite space.
///
/// Subsystem 0 is the leftmost tensor factor. The composite index of the
/// multi-index `(i0, …, i_{k-1})` is `Σ i_s · Π_{t>s} d_t`, so for
/// `[2, 2, 2, n]` the 8×8 block index of `|abc⟩` is `4a + 2b + c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SystemShape {
    dims: Vec<usize>,
}

impl SystemShape {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::InvalidArgument(
                "shape needs at least one subsystem".into(),
            ));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidArgument(format!(
                "subsystem {pos} has dimension 0"
            )));
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| {
                Error::InvalidArgument(format!("total dimension of {dims:?} overflows"))
            })?;
        Ok(Self { dims })
    }

    /// The `[2, 2, 2, n]` shape of the canonical-form systems.
    pub fn qubits3_with(n: usize) -> Result<Self> {
        Self::new(vec![2, 2, 2, n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, s: usize) -> usize {
        self.dims[s]
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Distance in the flat index between consecutive values of subsystem `s`.
    pub fn stride(&self, s: usize) -> usize {
        self.dims[s + 1..].iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        (0..self.parties()).map(|s| self.stride(s)).collect()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.parties()];
        for s in (0..self.parties()).rev() {
            out[s] = flat % self.dims[s];
            flat /= self.dims[s];
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.parties());
        multi
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn check_subsystem(&self, s: usize) -> Result<()> {
        if s < self.parties() {
            Ok(())
        } else {
            Err(Error::SubsystemOutOfRange {
                index: s,
                parties: self.parties(),
            })
        }
    }

    /// Shape with subsystem `s` removed. Removing the only subsystem leaves
    /// the trivial shape `[1]`.
    pub fn without(&self, s: usize) -> Result<Self> {
        self.check_subsystem(s)?;
        let mut dims = self.dims.clone();
        dims.remove(s);
        if dims.is_empty() {
            dims.push(1);
        }
        Ok(Self { dims })
    }

    /// Conventional label of subsystem `s`: `A`, `B`, `C`, …
    pub fn label(s: usize) -> char {
        (b'A' + (s % 26) as u8) as char
    }
}

impl TryFrom<Vec<usize>> for SystemShape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<SystemShape> for Vec<usize> {
    fn from(shape: SystemShape) -> Self {
        shape.dims
    }
}
