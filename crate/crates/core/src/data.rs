//! Classical input data and small shared value types.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A real vector stored as `(index, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn new(dim: usize, entries: Vec<(usize, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for &(index, value) in &entries {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
            if !value.is_finite() {
                return Err(Error::NonFinite(value));
            }
            if !seen.insert(index) {
                return Err(Error::DuplicateIndex(index.to_string()));
            }
        }
        Ok(Self { dim, entries })
    }

    /// Keeps every nonzero value of `values`.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        let entries = values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i, *v)).collect();
        Self::new(values.len(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    /// Number of entries with a nonzero value.
    pub fn nnz(&self) -> usize {
        self.entries.iter().filter(|(_, v)| *v != 0.0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    /// Number of address bits, i.e. `log2(dim)` once padded.
    pub fn depth(&self) -> usize {
        self.dim.next_power_of_two().trailing_zeros() as usize
    }

    pub fn pad_to_power_of_two(&self) -> SparseVector {
        SparseVector { dim: self.dim.next_power_of_two(), entries: self.entries.clone() }
    }

    pub fn l2_norm_squared(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum()
    }
}

/// A real matrix stored as `(row, col, value)` triples.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyDimension);
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for &(i, j, value) in &entries {
            if i >= rows {
                return Err(Error::IndexOutOfRange { index: i, dim: rows });
            }
            if j >= cols {
                return Err(Error::IndexOutOfRange { index: j, dim: cols });
            }
            if !value.is_finite() {
                return Err(Error::NonFinite(value));
            }
            if !seen.insert((i, j)) {
                return Err(Error::DuplicateIndex(format!("({i}, {j})")));
            }
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::IndexOutOfRange { index: row.len(), dim: cols });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self::new(rows.len(), cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Count of nonzero entries (`w`).
    pub fn nnz(&self) -> usize {
        self.entries.iter().filter(|e| e.2 != 0.0).count()
    }

    pub fn pad_to_power_of_two(&self) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows.next_power_of_two(),
            cols: self.cols.next_power_of_two(),
            entries: self.entries.clone(),
        }
    }

    pub fn row(&self, i: usize) -> SparseVector {
        let entries = self.entries.iter().filter(|e| e.0 == i).map(|&(_, j, v)| (j, v)).collect();
        SparseVector { dim: self.cols, entries }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.cols]; self.rows];
        for &(i, j, v) in &self.entries {
            out[i][j] = v;
        }
        out
    }

    pub fn frobenius_norm_squared(&self) -> f64 {
        self.entries.iter().map(|e| e.2 * e.2).sum()
    }
}

pub fn pad_to_power_of_two(v: &SparseVector) -> SparseVector {
    v.pad_to_power_of_two()
}

pub fn l2_norm_squared(v: &SparseVector) -> f64 {
    v.l2_norm_squared()
}

/// A root-to-node path through a binary tree, most significant bit first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitPath {
    bits: Vec<u8>,
}

impl BitPath {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: impl IntoIterator<Item = u8>) -> Result<Self> {
        let bits: Vec<u8> = bits.into_iter().collect();
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidBitPath(format!("{bits:?}")));
        }
        Ok(Self { bits })
    }

    /// The `depth`-bit big-endian encoding of `value`.
    pub fn from_value(value: u64, depth: usize) -> Self {
        let bits = (0..depth).rev().map(|k| ((value >> k) & 1) as u8).collect();
        Self { bits }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn depth(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn value(&self) -> u64 {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn prefix(&self, len: usize) -> BitPath {
        BitPath { bits: self.bits[..len.min(self.bits.len())].to_vec() }
    }

    pub fn child(&self, bit: u8) -> BitPath {
        let mut bits = self.bits.clone();
        bits.push(bit & 1);
        BitPath { bits }
    }

    /// Concatenation `self · other`.
    pub fn join(&self, other: &BitPath) -> BitPath {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitPath { bits }
    }
}

impl fmt::Display for BitPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("-");
        }
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BitPath {
    type Err = Error;

    /// Parses `"0110"`; `""` and `"-"` are the empty path.
    fn from_str(s: &str) -> Result<Self> {
        if s == "-" {
            return Ok(Self::empty());
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidBitPath(s.to_string())),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { bits })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Amplitudes at or below this magnitude count as zero.
    pub eps_amp: f64,
    /// Allowed deviation of norms and fidelities from one.
    pub eps_norm: f64,
}

impl Tolerance {
    pub fn new(eps_amp: f64, eps_norm: f64) -> Result<Self> {
        if !(eps_amp > 0.0 && eps_amp.is_finite()) {
            return Err(Error::InvalidTolerance(format!("eps_amp = {eps_amp}")));
        }
        if !(eps_norm > 0.0 && eps_norm.is_finite()) {
            return Err(Error::InvalidTolerance(format!("eps_norm = {eps_norm}")));
        }
        Ok(Self { eps_amp, eps_norm })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eps_amp: 1e-10, eps_norm: 1e-9 }
    }
}

/// Number of bits needed to write `value` in binary (0 for 0).
pub(crate) fn bit_width(value: u64) -> usize {
    (u64::BITS - value.leading_zeros()) as usize
}
