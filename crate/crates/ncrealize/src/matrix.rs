//! Points of the NC universe: d-tuples of square complex matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMatrix};
use crate::word::Word;

/// A point `X = (X_1, .., X_d)` of the NC universe at level `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    entries: Vec<CMatrix>,
    n: usize,
}

impl MatrixTuple {
    pub fn new(entries: Vec<CMatrix>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ShapeMismatch(
                "tuple needs at least one component".into(),
            ));
        }
        let n = entries[0].nrows();
        for (j, m) in entries.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "component {} is {}x{}, expected {}x{}",
                    j + 1,
                    m.nrows(),
                    m.ncols(),
                    n,
                    n
                )));
            }
        }
        Ok(MatrixTuple { entries, n })
    }

    /// The zero tuple of `d` components at level `n`.
    pub fn zeros(d: usize, n: usize) -> Self {
        MatrixTuple {
            entries: vec![CMatrix::zeros(n, n); d],
            n,
        }
    }

    /// Scalar level: each component a 1x1 matrix.
    pub fn scalars(values: &[Complex64]) -> Self {
        MatrixTuple {
            entries: values
                .iter()
                .map(|&v| CMatrix::from_element(1, 1, v))
                .collect(),
            n: 1,
        }
    }

    pub fn d(&self) -> usize {
        self.entries.len()
    }

    /// Level (matrix size).
    pub fn level(&self) -> usize {
        self.n
    }

    pub fn component(&self, j: usize) -> &CMatrix {
        &self.entries[j]
    }

    pub fn components(&self) -> &[CMatrix] {
        &self.entries
    }

    /// Word product `X^w = X_{i1} X_{i2} .. X_{ik}` (left to right).
    pub fn word_product(&self, w: &Word) -> CMatrix {
        let mut out = CMatrix::identity(self.n, self.n);
        for &letter in w.letters() {
            out = &out * &self.entries[(letter - 1) as usize];
        }
        out
    }

    /// Row norm `sqrt(|| sum X_j X_j^* ||)`.
    pub fn row_norm(&self) -> f64 {
        let mut acc = CMatrix::zeros(self.n, self.n);
        for x in &self.entries {
            acc += x * x.adjoint();
        }
        op_norm(&acc).sqrt()
    }

    /// Column norm `sqrt(|| sum X_j^* X_j ||)`.
    pub fn col_norm(&self) -> f64 {
        let mut acc = CMatrix::zeros(self.n, self.n);
        for x in &self.entries {
            acc += x.adjoint() * x;
        }
        op_norm(&acc).sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        MatrixTuple {
            entries: self.entries.iter().map(|m| m * factor).collect(),
            n: self.n,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.d() != other.d() || self.n != other.n {
            return Err(Error::ShapeMismatch("tuple sizes differ".into()));
        }
        Ok(MatrixTuple {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
            n: self.n,
        })
    }

    /// Componentwise direct sum `X ⊕ Y`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.d() != other.d() {
            return Err(Error::ShapeMismatch("tuple variable counts differ".into()));
        }
        let n = self.n + other.n;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| {
                let mut m = CMatrix::zeros(n, n);
                m.view_mut((0, 0), (self.n, self.n)).copy_from(a);
                m.view_mut((self.n, self.n), (other.n, other.n))
                    .copy_from(b);
                m
            })
            .collect();
        Ok(MatrixTuple { entries, n })
    }

    /// Joint conjugation `S^{-1} X S` given `S` and a solver for `S^{-1}`.
    pub fn conjugate(&self, s: &CMatrix) -> Result<Self> {
        let solver = crate::linalg::LuSolver::new(s);
        let entries = self
            .entries
            .iter()
            .map(|x| {
                solver
                    .solve(&(x * s))
                    .ok_or(Error::SingularPencil { rcond: 0.0 })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixTuple { entries, n: self.n })
    }

    /// Ampliation `I_s ⊗ X` (each component `I_s ⊗ X_j`).
    pub fn ampliate(&self, s: usize) -> Self {
        let eye = CMatrix::identity(s, s);
        MatrixTuple {
            entries: self.entries.iter().map(|x| eye.kronecker(x)).collect(),
            n: self.n * s,
        }
    }
}
