//! Dense complex linear algebra support.
//!
//! Thin layer over nalgebra: LU-backed pencil solves with a 1-norm condition
//! estimate, SVD-based ranks and norms, complex Schur decomposition with
//! eigenvalue reordering, and triangular Sylvester solves for spectral
//! projectors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Pencils with reciprocal condition estimate below this are treated as singular.
pub const SINGULARITY_TOL: f64 = 1e-10;

/// Relative singular-value threshold for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-10;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values()[0]
}

/// All singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().singular_values().as_slice().to_vec()
}

/// Numerical rank at relative tolerance `tol`.
pub fn rank(m: &CMatrix, tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        None => 0,
        Some(&0.0) => 0,
        Some(&s0) => sv.iter().filter(|&&s| s > tol * s0).count(),
    }
}

fn norm1(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// An LU-factored square system with a cached condition estimate.
///
/// Keeps factorizations of both `M` and `M^*` so the Hager 1-norm estimator
/// can run on the inverse without refactoring.
pub struct LuSolver {
    lu: nalgebra::linalg::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_adj: nalgebra::linalg::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    norm1_m: f64,
    dim: usize,
    singular: bool,
}

impl LuSolver {
    pub fn new(m: &CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let dim = m.nrows();
        let norm1_m = norm1(m);
        let lu = m.clone().lu();
        let lu_adj = m.adjoint().lu();
        // a zero pivot means structurally singular
        let singular = (0..dim).any(|i| lu.u()[(i, i)].norm() == 0.0);
        LuSolver {
            lu,
            lu_adj,
            norm1_m,
            dim,
            singular,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, rhs: &CMatrix) -> Option<CMatrix> {
        if self.singular {
            return None;
        }
        self.lu.solve(rhs)
    }

    pub fn solve_vec(&self, rhs: &CVector) -> Option<CVector> {
        if self.singular {
            return None;
        }
        self.lu.solve(rhs)
    }

    fn solve_adj_vec(&self, rhs: &CVector) -> Option<CVector> {
        if self.singular {
            return None;
        }
        self.lu_adj.solve(rhs)
    }

    /// Hager-style reciprocal 1-norm condition estimate.
    pub fn rcond(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        if self.dim == 0 {
            return 1.0;
        }
        if self.norm1_m == 0.0 {
            return 0.0;
        }
        let n = self.dim;
        let mut x = CVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
        let mut inv_norm_est = 0.0f64;
        for _ in 0..5 {
            let y = match self.solve_vec(&x) {
                Some(y) => y,
                None => return 0.0,
            };
            let y1: f64 = y.iter().map(|v| v.norm()).sum();
            inv_norm_est = inv_norm_est.max(y1);
            // xi = sign(y)
            let xi = CVector::from_iterator(
                n,
                y.iter()
                    .map(|v| if v.norm() == 0.0 { ONE } else { v / v.norm() }),
            );
            let z = match self.solve_adj_vec(&xi) {
                Some(z) => z,
                None => return 0.0,
            };
            let (jmax, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            // converged when the dual vector stops finding a better column
            let zx: f64 = z.iter().zip(x.iter()).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= zx.abs() {
                break;
            }
            x = CVector::zeros(n);
            x[jmax] = ONE;
        }
        if inv_norm_est == 0.0 {
            return 0.0;
        }
        1.0 / (self.norm1_m * inv_norm_est)
    }
}

/// Complex Schur decomposition `M = Q T Q^*` with `T` upper triangular.
pub fn schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    if m.nrows() == 0 {
        return Ok((CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)));
    }
    let s = nalgebra::linalg::Schur::try_new(m.clone(), 1e-14, 100_000).ok_or_else(|| {
        Error::EigenFailure(format!("Schur iteration stalled at size {}", m.nrows()))
    })?;
    let (q, t) = s.unpack();
    Ok((q, t))
}

/// Eigenvalues of a general complex matrix (diagonal of its Schur form).
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let (_, t) = schur(m)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Swaps the diagonal entries `t[k,k]` and `t[k+1,k+1]` of an upper
/// triangular `t` by a unitary similarity, updating `q` accordingly.
fn schur_swap(q: &mut CMatrix, t: &mut CMatrix, k: usize) {
    let a = t[(k, k)];
    let b = t[(k, k + 1)];
    let c = t[(k + 1, k + 1)];
    // eigenvector of [[a, b],[0, c]] for eigenvalue c is (b, c - a)
    let v0 = b;
    let v1 = c - a;
    let nrm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    if nrm == 0.0 || v1.norm() <= 1e-300 {
        // equal eigenvalues: swap is a no-op up to ordering
        return;
    }
    let g00 = v0 / nrm;
    let g10 = v1 / nrm;
    // G = [[g00, -conj(g10)], [g10, conj(g00)]] is unitary with G e1 = v/|v|
    let g01 = -g10.conj();
    let g11 = g00.conj();

    let n = t.nrows();
    // T <- G^* T G on rows/cols k, k+1
    for j in 0..n {
        let t0 = t[(k, j)];
        let t1 = t[(k + 1, j)];
        t[(k, j)] = g00.conj() * t0 + g10.conj() * t1;
        t[(k + 1, j)] = g01.conj() * t0 + g11.conj() * t1;
    }
    for i in 0..n {
        let t0 = t[(i, k)];
        let t1 = t[(i, k + 1)];
        t[(i, k)] = t0 * g00 + t1 * g10;
        t[(i, k + 1)] = t0 * g01 + t1 * g11;
    }
    for i in 0..n {
        let q0 = q[(i, k)];
        let q1 = q[(i, k + 1)];
        q[(i, k)] = q0 * g00 + q1 * g10;
        q[(i, k + 1)] = q0 * g01 + q1 * g11;
    }
    t[(k + 1, k)] = ZERO;
    // enforce exact triangularity of the swapped 2x2
    t[(k, k)] = c;
    t[(k + 1, k + 1)] = a;
}

/// Reorders a Schur form so the eigenvalues at the selected positions occupy
/// the leading block, preserving their relative order. Returns the block size.
pub fn reorder_schur(q: &mut CMatrix, t: &mut CMatrix, selected: &[usize]) -> usize {
    let mut positions: Vec<usize> = selected.to_vec();
    positions.sort_unstable();
    let mut target = 0usize;
    for &p in &positions {
        let mut cur = p;
        while cur > target {
            schur_swap(q, t, cur - 1);
            cur -= 1;
        }
        target += 1;
    }
    target
}

/// Solves `T11 X - X T22 = -T12` for upper triangular `T11`, `T22` by
/// column-wise back substitution.
pub fn sylvester_triangular(t11: &CMatrix, t12: &CMatrix, t22: &CMatrix) -> Result<CMatrix> {
    let p = t11.nrows();
    let r = t22.nrows();
    let mut x = CMatrix::zeros(p, r);
    for k in 0..r {
        // rhs_k = -T12[:,k] + sum_{i<k} x_i T22[i,k]
        let mut rhs = CVector::zeros(p);
        for row in 0..p {
            rhs[row] = -t12[(row, k)];
        }
        for i in 0..k {
            let s = t22[(i, k)];
            if s.norm() == 0.0 {
                continue;
            }
            for row in 0..p {
                rhs[row] += x[(row, i)] * s;
            }
        }
        // (T11 - t22[k,k] I) x_k = rhs, upper triangular back substitution
        let shift = t22[(k, k)];
        for row in (0..p).rev() {
            let mut acc = rhs[row];
            for col in row + 1..p {
                acc -= t11[(row, col)] * x[(col, k)];
            }
            let diag = t11[(row, row)] - shift;
            if diag.norm() < 1e-300 {
                return Err(Error::EigenFailure(
                    "Sylvester system singular: clusters not separated".into(),
                ));
            }
            x[(row, k)] = acc / diag;
        }
    }
    Ok(x)
}

/// Riesz/spectral projector onto the invariant subspace of the leading
/// `p x p` block of a (reordered) Schur form `M = Q T Q^*`.
pub fn spectral_projector_from_schur(q: &CMatrix, t: &CMatrix, p: usize) -> Result<CMatrix> {
    let n = t.nrows();
    if p == 0 {
        return Ok(CMatrix::zeros(n, n));
    }
    if p == n {
        return Ok(identity(n));
    }
    let t11 = t.view((0, 0), (p, p)).into_owned();
    let t12 = t.view((0, p), (p, n - p)).into_owned();
    let t22 = t.view((p, p), (n - p, n - p)).into_owned();
    let x = sylvester_triangular(&t11, &t12, &t22)?;
    // P_T = [[I, -X],[0, 0]]
    let mut pt = CMatrix::zeros(n, n);
    for i in 0..p {
        pt[(i, i)] = ONE;
    }
    for i in 0..p {
        for j in 0..n - p {
            pt[(i, p + j)] = -x[(i, j)];
        }
    }
    Ok(q * pt * q.adjoint())
}

/// Orthonormalizes `v` against the columns of `basis` with two rounds of
/// modified Gram-Schmidt. Returns the normalized residual and its norm
/// before normalization.
pub fn mgs_orthogonalize(basis: &[CVector], v: &CVector) -> (CVector, f64) {
    let mut w = v.clone();
    for _ in 0..2 {
        for b in basis {
            let coeff = b.dotc(&w);
            w -= b * coeff;
        }
    }
    let norm = w.norm();
    if norm > 0.0 {
        (w / Complex64::new(norm, 0.0), norm)
    } else {
        (w, 0.0)
    }
}

/// Moore-Penrose pseudoinverse via SVD at relative tolerance `tol`.
pub fn pseudo_inverse(m: &CMatrix, tol: f64) -> CMatrix {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMatrix::zeros(m.ncols(), m.nrows());
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with vectors");
    let vt = svd.v_t.as_ref().expect("svd with vectors");
    let smax = svd.singular_values.max();
    let k = svd.singular_values.len();
    let mut sinv = CMatrix::zeros(k, k);
    for i in 0..k {
        let s = svd.singular_values[i];
        if s > tol * smax && s > 0.0 {
            sinv[(i, i)] = Complex64::new(1.0 / s, 0.0);
        }
    }
    vt.adjoint() * sinv * u.adjoint()
}
