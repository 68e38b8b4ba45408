//! Descriptor and Fornasini-Marchesini realizations over finite-dimensional
//! state spaces.
//!
//! A descriptor realization `(A, b, c)` generates the series
//! `h_w = b^* A^w c`; an FM realization `(A, B, C, D)` generates
//! `h_∅ = D`, `h_{i1..ik} = C A_{i1} .. A_{i(k-1)} B_{ik}`. Word products are
//! taken left to right: `A^{i1..ik} = A_{i1} .. A_{ik}`, matching the
//! monomial convention `z^w = z_{i1} .. z_{ik}`.
//!
//! Evaluation at a matrix tuple `X` goes through the linear pencil
//! `L_A(X) = I - sum_j X_j ⊗ A_j`, with the level factor on the left of
//! every Kronecker product.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, LuSolver, ONE, SINGULARITY_TOL, ZERO};
use crate::matrix::MatrixTuple;
use crate::series::{ShiftSide, TruncatedSeries, INVERSION_TOL};
use crate::word::Word;

/// Descriptor realization `(A, b, c)` with `A` a column d-tuple of
/// `dim x dim` matrices and `b, c` state vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorRealization {
    a: Vec<CMatrix>,
    b: CVector,
    c: CVector,
    dim: usize,
}

/// FM realization `(A, B, C, D)`: state matrices, input vectors `B_j`, a row
/// functional `C` and the scalar `D = h(0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FmRealization {
    a: Vec<CMatrix>,
    b: Vec<CVector>,
    c: CMatrix, // 1 x dim row
    d: Complex64,
    dim: usize,
}

/// Which side a realization shift acts on; mirrors `series::ShiftSide`.
pub use crate::series::ShiftSide as RealizationShiftSide;

impl DescriptorRealization {
    pub fn new(a: Vec<CMatrix>, b: CVector, c: CVector) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::ShapeMismatch(
                "need at least one state matrix".into(),
            ));
        }
        let dim = b.len();
        if c.len() != dim {
            return Err(Error::ShapeMismatch(format!(
                "b has length {}, c has length {}",
                dim,
                c.len()
            )));
        }
        for (j, m) in a.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "A_{} is {}x{}, expected {}x{}",
                    j + 1,
                    m.nrows(),
                    m.ncols(),
                    dim,
                    dim
                )));
            }
        }
        Ok(DescriptorRealization { a, b, c, dim })
    }

    /// The zero-dimensional realization of the zero function.
    pub fn trivial(d: usize) -> Self {
        DescriptorRealization {
            a: vec![CMatrix::zeros(0, 0); d],
            b: CVector::zeros(0),
            c: CVector::zeros(0),
            dim: 0,
        }
    }

    pub fn d(&self) -> usize {
        self.a.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> &[CMatrix] {
        &self.a
    }

    pub fn b(&self) -> &CVector {
        &self.b
    }

    pub fn c(&self) -> &CVector {
        &self.c
    }

    fn check_same_d(&self, other: &Self) -> Result<()> {
        if self.d() != other.d() {
            return Err(Error::AlphabetMismatch {
                expected: self.d(),
                found: other.d(),
            });
        }
        Ok(())
    }

    /// `h_w = b^* A^w c`.
    pub fn coeff(&self, w: &Word) -> Complex64 {
        w.validate(self.d()).expect("letter within alphabet");
        let mut v = self.c.clone();
        for &letter in w.letters().iter().rev() {
            v = &self.a[(letter - 1) as usize] * v;
        }
        self.b.dotc(&v)
    }

    /// Evaluates the transfer function at `X` through the linear pencil.
    pub fn eval(&self, x: &MatrixTuple) -> Result<CMatrix> {
        if x.d() != self.d() {
            return Err(Error::AlphabetMismatch {
                expected: self.d(),
                found: x.d(),
            });
        }
        let n = x.level();
        if self.dim == 0 {
            return Ok(CMatrix::zeros(n, n));
        }
        let solver = pencil_solver(&self.a, x);
        let rcond = solver.rcond();
        if rcond < SINGULARITY_TOL {
            return Err(Error::SingularPencil { rcond });
        }
        // W solves L_A(X) W = I_n ⊗ c, then h = (I_n ⊗ b)^* W
        let eye = CMatrix::identity(n, n);
        let rhs = eye.kronecker(&CMatrix::from_column_slice(self.dim, 1, self.c.as_slice()));
        let w = solver.solve(&rhs).ok_or(Error::SingularPencil { rcond })?;
        let bt = eye.kronecker(&CMatrix::from_column_slice(self.dim, 1, self.b.as_slice()));
        Ok(bt.adjoint() * w)
    }

    /// Direct sum realizing `g + h`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_d(other)?;
        let dim = self.dim + other.dim;
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| direct_sum(x, y))
            .collect();
        let mut b = CVector::zeros(dim);
        b.rows_mut(0, self.dim).copy_from(&self.b);
        b.rows_mut(self.dim, other.dim).copy_from(&other.b);
        let mut c = CVector::zeros(dim);
        c.rows_mut(0, self.dim).copy_from(&self.c);
        c.rows_mut(self.dim, other.dim).copy_from(&other.c);
        DescriptorRealization::new(a, b, c)
    }

    /// Upper-triangular coupling realizing `g * h`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_d(other)?;
        let dim = self.dim + other.dim;
        let mut a = Vec::with_capacity(self.d());
        for j in 0..self.d() {
            let mut m = CMatrix::zeros(dim, dim);
            m.view_mut((0, 0), (self.dim, self.dim))
                .copy_from(&self.a[j]);
            m.view_mut((self.dim, self.dim), (other.dim, other.dim))
                .copy_from(&other.a[j]);
            // coupling block A_j c b'^*
            let ajc = &self.a[j] * &self.c;
            for row in 0..self.dim {
                for col in 0..other.dim {
                    m[(row, self.dim + col)] = ajc[row] * other.b[col].conj();
                }
            }
            a.push(m);
        }
        let mut b = CVector::zeros(dim);
        b.rows_mut(0, self.dim).copy_from(&self.b);
        // second block: (c^* b) b'
        let cb = self.c.dotc(&self.b);
        for row in 0..other.dim {
            b[self.dim + row] = cb * other.b[row];
        }
        let mut c = CVector::zeros(dim);
        c.rows_mut(self.dim, other.dim).copy_from(&other.c);
        DescriptorRealization::new(a, b, c)
    }

    /// Inverse realization on a state space enlarged by one dimension.
    /// Requires `g(0) = b^* c` nonzero.
    pub fn invert(&self) -> Result<Self> {
        let g0 = self.b.dotc(&self.c);
        if g0.norm() <= INVERSION_TOL {
            return Err(Error::NotInvertibleAtZero {
                magnitude: g0.norm(),
                tolerance: INVERSION_TOL,
            });
        }
        let dim = self.dim + 1;
        let inv_bc = ONE / g0; // 1 / (b^* c)
        let mut a = Vec::with_capacity(self.d());
        for j in 0..self.d() {
            let mut m = CMatrix::zeros(dim, dim);
            let ajc = &self.a[j] * &self.c;
            // A_j - (1/b^*c) A_j c b^*
            for row in 0..self.dim {
                for col in 0..self.dim {
                    m[(row, col)] = self.a[j][(row, col)] - inv_bc * ajc[row] * self.b[col].conj();
                }
            }
            // extra column wires (1/b^*c) A_j c
            for row in 0..self.dim {
                m[(row, self.dim)] = inv_bc * ajc[row];
            }
            a.push(m);
        }
        // b^{(-1)} = (1/c^*b) (-b ⊕ 1)
        let inv_cb = ONE / self.c.dotc(&self.b);
        let mut b = CVector::zeros(dim);
        for row in 0..self.dim {
            b[row] = -inv_cb * self.b[row];
        }
        b[self.dim] = inv_cb;
        let mut c = CVector::zeros(dim);
        c[self.dim] = ONE;
        DescriptorRealization::new(a, b, c)
    }

    /// Shifted realization: `coeff(result, w) = coeff(self, jw)` (left) or
    /// `coeff(self, wj)` (right).
    ///
    /// With left-to-right word products these are `(A, A_j^* b, c)` and
    /// `(A, b, A_j c)` respectively.
    pub fn shift(&self, j: u32, side: ShiftSide) -> Result<Self> {
        if j == 0 || j as usize > self.d() {
            return Err(Error::LetterOutOfRange {
                letter: j,
                d: self.d(),
            });
        }
        let aj = &self.a[(j - 1) as usize];
        match side {
            ShiftSide::Left => {
                DescriptorRealization::new(self.a.clone(), aj.adjoint() * &self.b, self.c.clone())
            }
            ShiftSide::Right => {
                DescriptorRealization::new(self.a.clone(), self.b.clone(), aj * &self.c)
            }
        }
    }

    /// Extracts all coefficients up to `degree_bound` by breadth-first state
    /// propagation (`d^degree` vectors, `dim`-sized work each).
    pub fn series(&self, degree_bound: usize) -> TruncatedSeries {
        let d = self.d();
        let mut out = TruncatedSeries::zero(d, degree_bound);
        if self.dim == 0 {
            return out;
        }
        // propagate v_w = A^w c by prepending letters: v_{jw} = A_j v_w
        let mut level: Vec<(Word, CVector)> = vec![(Word::empty(), self.c.clone())];
        out.set_coeff(Word::empty(), self.b.dotc(&self.c));
        for _ in 0..degree_bound {
            let mut next = Vec::with_capacity(level.len() * d);
            for j in 1..=d as u32 {
                let aj = &self.a[(j - 1) as usize];
                for (w, v) in &level {
                    let nv = aj * v;
                    let nw = w.prepend(j);
                    out.set_coeff(nw.clone(), self.b.dotc(&nv));
                    next.push((nw, nv));
                }
            }
            level = next;
        }
        out
    }

    /// Direct sum with an unrelated block whose `b`/`c` components are the
    /// given vectors (zero vectors pad without changing the function).
    pub fn pad_with_block(
        &self,
        block: &[CMatrix],
        b_pad: &CVector,
        c_pad: &CVector,
    ) -> Result<Self> {
        let other = DescriptorRealization::new(block.to_vec(), b_pad.clone(), c_pad.clone())?;
        self.add(&other)
    }

    /// Joint similarity `(S^{-1} A S, S^* b, S^{-1} c)`; preserves all
    /// coefficients.
    pub fn conjugate(&self, s: &CMatrix) -> Result<Self> {
        if s.nrows() != self.dim || s.ncols() != self.dim {
            return Err(Error::ShapeMismatch("similarity size mismatch".into()));
        }
        let solver = LuSolver::new(s);
        if solver.rcond() < SINGULARITY_TOL {
            return Err(Error::SingularPencil {
                rcond: solver.rcond(),
            });
        }
        let a = self
            .a
            .iter()
            .map(|m| {
                solver
                    .solve(&(m * s))
                    .ok_or(Error::SingularPencil { rcond: 0.0 })
            })
            .collect::<Result<Vec<_>>>()?;
        let b = s.adjoint() * &self.b;
        let c = solver
            .solve(&CMatrix::from_column_slice(self.dim, 1, self.c.as_slice()))
            .ok_or(Error::SingularPencil { rcond: 0.0 })?
            .column(0)
            .into_owned();
        DescriptorRealization::new(a, b, c)
    }
}

impl FmRealization {
    pub fn new(a: Vec<CMatrix>, b: Vec<CVector>, c: CMatrix, d: Complex64) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::ShapeMismatch(
                "need matching nonempty A and B tuples".into(),
            ));
        }
        let dim = a[0].nrows();
        for m in &a {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::ShapeMismatch(
                    "state matrices must be square and equal".into(),
                ));
            }
        }
        for v in &b {
            if v.len() != dim {
                return Err(Error::ShapeMismatch("B vector length mismatch".into()));
            }
        }
        if c.nrows() != 1 || c.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "C must be a 1x{} row, got {}x{}",
                dim,
                c.nrows(),
                c.ncols()
            )));
        }
        Ok(FmRealization { a, b, c, d, dim })
    }

    /// The D-only realization of a constant.
    pub fn constant(d_vars: usize, value: Complex64) -> Self {
        FmRealization {
            a: vec![CMatrix::zeros(0, 0); d_vars],
            b: vec![CVector::zeros(0); d_vars],
            c: CMatrix::zeros(1, 0),
            d: value,
            dim: 0,
        }
    }

    /// The coordinate function `z_j` as a 1-dimensional FM realization.
    pub fn variable(d_vars: usize, j: u32) -> Result<Self> {
        if j == 0 || j as usize > d_vars {
            return Err(Error::LetterOutOfRange {
                letter: j,
                d: d_vars,
            });
        }
        let a = vec![CMatrix::zeros(1, 1); d_vars];
        let b = (1..=d_vars as u32)
            .map(|k| {
                let mut v = CVector::zeros(1);
                if k == j {
                    v[0] = ONE;
                }
                v
            })
            .collect();
        let c = CMatrix::from_element(1, 1, ONE);
        FmRealization::new(a, b, c, ZERO)
    }

    pub fn d_vars(&self) -> usize {
        self.a.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> &[CMatrix] {
        &self.a
    }

    pub fn b(&self) -> &[CVector] {
        &self.b
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn d_scalar(&self) -> Complex64 {
        self.d
    }

    fn check_same_d(&self, other: &Self) -> Result<()> {
        if self.d_vars() != other.d_vars() {
            return Err(Error::AlphabetMismatch {
                expected: self.d_vars(),
                found: other.d_vars(),
            });
        }
        Ok(())
    }

    /// `h_∅ = D`; `h_{i1..ik} = C A_{i1} .. A_{i(k-1)} B_{ik}`.
    pub fn coeff(&self, w: &Word) -> Complex64 {
        w.validate(self.d_vars()).expect("letter within alphabet");
        if w.is_empty() {
            return self.d;
        }
        if self.dim == 0 {
            return ZERO;
        }
        let letters = w.letters();
        let last = letters[letters.len() - 1];
        let mut v = self.b[(last - 1) as usize].clone();
        for &letter in letters[..letters.len() - 1].iter().rev() {
            v = &self.a[(letter - 1) as usize] * v;
        }
        (&self.c * v)[(0, 0)]
    }

    /// Evaluates `D I_n + (I_n ⊗ C) L_A(X)^{-1} sum_j X_j ⊗ B_j`.
    pub fn eval(&self, x: &MatrixTuple) -> Result<CMatrix> {
        if x.d() != self.d_vars() {
            return Err(Error::AlphabetMismatch {
                expected: self.d_vars(),
                found: x.d(),
            });
        }
        let n = x.level();
        let eye = CMatrix::identity(n, n);
        if self.dim == 0 {
            return Ok(eye * self.d);
        }
        let solver = pencil_solver(&self.a, x);
        let rcond = solver.rcond();
        if rcond < SINGULARITY_TOL {
            return Err(Error::SingularPencil { rcond });
        }
        let mut rhs = CMatrix::zeros(n * self.dim, n);
        for j in 0..self.d_vars() {
            let bj = CMatrix::from_column_slice(self.dim, 1, self.b[j].as_slice());
            rhs += x.component(j).kronecker(&bj);
        }
        let w = solver.solve(&rhs).ok_or(Error::SingularPencil { rcond })?;
        let crow = eye.kronecker(&self.c);
        Ok(eye * self.d + crow * w)
    }

    /// FM sum: block direct sum with `D + D'`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_d(other)?;
        let dim = self.dim + other.dim;
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| direct_sum(x, y))
            .collect();
        let b = self
            .b
            .iter()
            .zip(&other.b)
            .map(|(x, y)| stack(x, y))
            .collect();
        let mut c = CMatrix::zeros(1, dim);
        c.view_mut((0, 0), (1, self.dim)).copy_from(&self.c);
        c.view_mut((0, self.dim), (1, other.dim))
            .copy_from(&other.c);
        FmRealization::new(a, b, c, self.d + other.d)
    }

    pub fn neg(&self) -> Self {
        self.scale(-ONE)
    }

    /// Scales the function by a constant (scales `C` and `D`).
    pub fn scale(&self, factor: Complex64) -> Self {
        FmRealization {
            a: self.a.clone(),
            b: self.b.clone(),
            c: &self.c * factor,
            d: self.d * factor,
            dim: self.dim,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// FM product: upper-triangular coupling `B_j C'` with `D D'`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_d(other)?;
        let dim = self.dim + other.dim;
        let mut a = Vec::with_capacity(self.d_vars());
        let mut b = Vec::with_capacity(self.d_vars());
        for j in 0..self.d_vars() {
            let mut m = CMatrix::zeros(dim, dim);
            m.view_mut((0, 0), (self.dim, self.dim))
                .copy_from(&self.a[j]);
            m.view_mut((self.dim, self.dim), (other.dim, other.dim))
                .copy_from(&other.a[j]);
            for row in 0..self.dim {
                for col in 0..other.dim {
                    m[(row, self.dim + col)] = self.b[j][row] * other.c[(0, col)];
                }
            }
            a.push(m);
            let mut v = CVector::zeros(dim);
            for row in 0..self.dim {
                v[row] = self.b[j][row] * other.d;
            }
            v.rows_mut(self.dim, other.dim).copy_from(&other.b[j]);
            b.push(v);
        }
        let mut c = CMatrix::zeros(1, dim);
        c.view_mut((0, 0), (1, self.dim)).copy_from(&self.c);
        for col in 0..other.dim {
            c[(0, self.dim + col)] = self.d * other.c[(0, col)];
        }
        FmRealization::new(a, b, c, self.d * other.d)
    }

    /// FM inverse (same state dimension): `A_j - (1/D) B_j C`,
    /// `-(1/D) B_j`, `(1/D) C`, `1/D`. Requires `D` nonzero.
    pub fn invert(&self) -> Result<Self> {
        self.invert_with_tolerance(INVERSION_TOL)
    }

    pub fn invert_with_tolerance(&self, tolerance: f64) -> Result<Self> {
        if self.d.norm() <= tolerance {
            return Err(Error::NotInvertibleAtZero {
                magnitude: self.d.norm(),
                tolerance,
            });
        }
        let inv_d = ONE / self.d;
        let a = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(aj, bj)| {
                let mut m = aj.clone();
                for row in 0..self.dim {
                    for col in 0..self.dim {
                        m[(row, col)] -= inv_d * bj[row] * self.c[(0, col)];
                    }
                }
                m
            })
            .collect();
        let b = self.b.iter().map(|bj| bj * (-inv_d)).collect();
        FmRealization::new(a, b, &self.c * inv_d, inv_d)
    }

    /// Coefficient extraction via the exact descriptor embedding.
    pub fn series(&self, degree_bound: usize) -> TruncatedSeries {
        descriptor_from_fm(self).series(degree_bound)
    }
}

fn direct_sum(x: &CMatrix, y: &CMatrix) -> CMatrix {
    let n = x.nrows() + y.nrows();
    let mut m = CMatrix::zeros(n, n);
    m.view_mut((0, 0), (x.nrows(), x.ncols())).copy_from(x);
    m.view_mut((x.nrows(), x.ncols()), (y.nrows(), y.ncols()))
        .copy_from(y);
    m
}

fn stack(x: &CVector, y: &CVector) -> CVector {
    let mut v = CVector::zeros(x.len() + y.len());
    v.rows_mut(0, x.len()).copy_from(x);
    v.rows_mut(x.len(), y.len()).copy_from(y);
    v
}

/// `L_A(X) = I - sum_j X_j ⊗ A_j`, with the level factor first.
pub fn pencil_apply(a: &[CMatrix], x: &MatrixTuple) -> CMatrix {
    let dim = a.first().map_or(0, |m| m.nrows());
    let n = x.level();
    let mut m = CMatrix::identity(n * dim, n * dim);
    for j in 0..a.len() {
        m -= x.component(j).kronecker(&a[j]);
    }
    m
}

/// LU factorization of the pencil at `X`.
pub fn pencil_solver(a: &[CMatrix], x: &MatrixTuple) -> LuSolver {
    LuSolver::new(&pencil_apply(a, x))
}

/// Column norm of a state tuple: `sqrt(|| sum A_j^* A_j ||)`.
pub fn tuple_col_norm(a: &[CMatrix]) -> f64 {
    let dim = a.first().map_or(0, |m| m.nrows());
    let mut acc = CMatrix::zeros(dim, dim);
    for m in a {
        acc += m.adjoint() * m;
    }
    crate::linalg::op_norm(&acc).sqrt()
}

/// Row norm of a state tuple: `sqrt(|| sum A_j A_j^* ||)`.
pub fn tuple_row_norm(a: &[CMatrix]) -> f64 {
    let dim = a.first().map_or(0, |m| m.nrows());
    let mut acc = CMatrix::zeros(dim, dim);
    for m in a {
        acc += m * m.adjoint();
    }
    crate::linalg::op_norm(&acc).sqrt()
}

/// FM realization from a descriptor realization by restricting to the
/// invariant subspace spanned by `{A^w c : w ≠ ∅}`.
pub fn fm_from_descriptor(r: &DescriptorRealization) -> FmRealization {
    let d = r.d();
    let seeds: Vec<CVector> = r.a().iter().map(|aj| aj * r.c()).collect();
    let span = crate::minimal::krylov_span(r.a(), &seeds);
    let v = span.basis();
    let rdim = v.ncols();
    let a = r.a().iter().map(|aj| v.adjoint() * aj * v).collect();
    let b = r.a().iter().map(|aj| v.adjoint() * (aj * r.c())).collect();
    // C = (P b)^* expressed in the span basis
    let pb = v.adjoint() * r.b();
    let c = CMatrix::from_fn(1, rdim, |_, j| pb[j].conj());
    let dval = r.b().dotc(r.c());
    FmRealization::new(a, b, c, dval).unwrap_or_else(|_| {
        // rdim == 0: constant function
        debug_assert_eq!(rdim, 0);
        FmRealization::constant(d, dval)
    })
}

/// Descriptor realization from an FM realization on `H ⊕ C`:
/// coefficient-exact, one extra state dimension.
pub fn descriptor_from_fm(r: &FmRealization) -> DescriptorRealization {
    let d = r.d_vars();
    let dim = r.dim() + 1;
    let a = (0..d)
        .map(|j| {
            let mut m = CMatrix::zeros(dim, dim);
            m.view_mut((0, 0), (r.dim(), r.dim())).copy_from(&r.a()[j]);
            for row in 0..r.dim() {
                m[(row, r.dim())] = r.b()[j][row];
            }
            m
        })
        .collect();
    let mut b = CVector::zeros(dim);
    for row in 0..r.dim() {
        b[row] = r.c()[(0, row)].conj();
    }
    b[r.dim()] = r.d_scalar().conj();
    let mut c = CVector::zeros(dim);
    c[r.dim()] = ONE;
    DescriptorRealization::new(a, b, c).expect("shapes consistent by construction")
}

/// Evaluates a truncated series at a matrix tuple: `sum_w f_w X^w`.
/// Breadth-first over words; the independent evaluation route used by the
/// oracle tests.
pub fn eval_series_at(series: &TruncatedSeries, x: &MatrixTuple) -> Result<CMatrix> {
    if x.d() != series.d() {
        return Err(Error::AlphabetMismatch {
            expected: series.d(),
            found: x.d(),
        });
    }
    let n = x.level();
    let mut acc = CMatrix::identity(n, n) * series.coeff(&Word::empty());
    let mut level: Vec<(Word, CMatrix)> = vec![(Word::empty(), CMatrix::identity(n, n))];
    for _ in 0..series.degree_bound() {
        let mut next = Vec::with_capacity(level.len() * series.d());
        for j in 1..=series.d() as u32 {
            for (w, m) in &level {
                let nm = x.component((j - 1) as usize) * m;
                let nw = w.prepend(j);
                let coeff = series.coeff(&nw);
                if coeff != ZERO {
                    acc += &nm * coeff;
                }
                next.push((nw, nm));
            }
        }
        level = next;
    }
    Ok(acc)
}
