//! Realizations around a matrix centre `Y`.
//!
//! From an FM realization `(A, B, C, D)` with `L_A(Y)` invertible at a level-m
//! point `Y`, the recentred data are the linear maps
//!
//! ```text
//! Amap_j(G) = P (G ⊗ A_j)
//! Bmap_j(G) = P (G ⊗ B_j) + P (G ⊗ A_j) P (Y ⊗ B)
//! ```
//!
//! with `P = L_A(Y)^{-1}`, together with `Cmap = I_m ⊗ C` and `Dmat = f(Y)`.
//! The maps are kept in structured form (the pair `(P, A_j)` applied lazily)
//! rather than materialized; sums, products and inverses compose these
//! structures following the same block patterns as the flat FM algebra.
//!
//! Evaluation at level `s·m` ampliates every map blockwise over the `m x m`
//! block grid of the displacement `X - I_s ⊗ Y`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, LuSolver, SINGULARITY_TOL};
use crate::matrix::MatrixTuple;
use crate::realization::FmRealization;
use crate::word::Word;

/// Structured linear map `G -> M x M` used for the `Amap_j` slot.
#[derive(Clone, Debug)]
pub enum MapA {
    /// `G -> P (G ⊗ A_j)`.
    Pencil { p: Arc<CMatrix>, a: Arc<CMatrix> },
    /// Block diagonal sum of two maps.
    DirectSum(Box<MapA>, Box<MapA>),
    /// Product coupling `[[A_j, B_j(.) C'], [0, A'_j]]`.
    Coupled {
        top: Box<MapA>,
        bottom: Box<MapA>,
        b_top: Box<MapB>,
        c_bottom: CMatrix,
    },
    /// Inverse correction `A_j - B_j(.) D^{-1} C`.
    Corrected {
        base: Box<MapA>,
        b: Box<MapB>,
        dinv_c: CMatrix,
    },
}

/// Structured linear map `G -> M x m` used for the `Bmap_j` slot.
#[derive(Clone, Debug)]
pub enum MapB {
    /// `G -> P (G ⊗ B_j) + P (G ⊗ A_j) PYB`.
    Pencil {
        p: Arc<CMatrix>,
        a: Arc<CMatrix>,
        b: Arc<CMatrix>,
        pyb: Arc<CMatrix>,
    },
    /// Stacked `[B_j; B'_j]`.
    Stack(Box<MapB>, Box<MapB>),
    /// Right-multiplied `G -> B_j(G) R` (for `B_j(.) D'` and `-B_j(.) D^{-1}`).
    ScaledRight { base: Box<MapB>, right: CMatrix },
}

impl MapA {
    /// Output state dimension `M`.
    pub fn state_dim(&self) -> usize {
        match self {
            MapA::Pencil { p, .. } => p.nrows(),
            MapA::DirectSum(x, y) => x.state_dim() + y.state_dim(),
            MapA::Coupled { top, bottom, .. } => top.state_dim() + bottom.state_dim(),
            MapA::Corrected { base, .. } => base.state_dim(),
        }
    }

    /// Applies the map to an `m x m` direction block.
    pub fn apply(&self, g: &CMatrix) -> CMatrix {
        match self {
            MapA::Pencil { p, a } => p.as_ref() * g.kronecker(a),
            MapA::DirectSum(x, y) => {
                let (mx, my) = (x.state_dim(), y.state_dim());
                let mut out = CMatrix::zeros(mx + my, mx + my);
                out.view_mut((0, 0), (mx, mx)).copy_from(&x.apply(g));
                out.view_mut((mx, mx), (my, my)).copy_from(&y.apply(g));
                out
            }
            MapA::Coupled {
                top,
                bottom,
                b_top,
                c_bottom,
            } => {
                let (mx, my) = (top.state_dim(), bottom.state_dim());
                let mut out = CMatrix::zeros(mx + my, mx + my);
                out.view_mut((0, 0), (mx, mx)).copy_from(&top.apply(g));
                out.view_mut((mx, mx), (my, my)).copy_from(&bottom.apply(g));
                out.view_mut((0, mx), (mx, my))
                    .copy_from(&(b_top.apply(g) * c_bottom));
                out
            }
            MapA::Corrected { base, b, dinv_c } => base.apply(g) - b.apply(g) * dinv_c,
        }
    }
}

impl MapB {
    pub fn state_dim(&self) -> usize {
        match self {
            MapB::Pencil { p, .. } => p.nrows(),
            MapB::Stack(x, y) => x.state_dim() + y.state_dim(),
            MapB::ScaledRight { base, .. } => base.state_dim(),
        }
    }

    pub fn apply(&self, g: &CMatrix) -> CMatrix {
        match self {
            MapB::Pencil { p, a, b, pyb } => {
                p.as_ref() * g.kronecker(b.as_ref())
                    + p.as_ref() * g.kronecker(a.as_ref()) * pyb.as_ref()
            }
            MapB::Stack(x, y) => {
                let m = g.nrows();
                let (mx, my) = (x.state_dim(), y.state_dim());
                let mut out = CMatrix::zeros(mx + my, m);
                out.view_mut((0, 0), (mx, m)).copy_from(&x.apply(g));
                out.view_mut((mx, 0), (my, m)).copy_from(&y.apply(g));
                out
            }
            MapB::ScaledRight { base, right } => base.apply(g) * right,
        }
    }
}

/// A realization of an NC function around the matrix centre `Y`.
#[derive(Clone, Debug)]
pub struct MatrixCentreRealization {
    d: usize,
    centre: MatrixTuple,
    maps_a: Vec<MapA>,
    maps_b: Vec<MapB>,
    c: CMatrix,    // m x M
    dmat: CMatrix, // m x m, equals f(Y)
}

impl MatrixCentreRealization {
    pub fn d(&self) -> usize {
        self.d
    }

    /// Centre level `m`.
    pub fn centre_level(&self) -> usize {
        self.centre.level()
    }

    pub fn centre(&self) -> &MatrixTuple {
        &self.centre
    }

    pub fn state_dim(&self) -> usize {
        self.maps_a.first().map_or(0, |m| m.state_dim())
    }

    pub fn maps_a(&self) -> &[MapA] {
        &self.maps_a
    }

    pub fn maps_b(&self) -> &[MapB] {
        &self.maps_b
    }

    pub fn c_row(&self) -> &CMatrix {
        &self.c
    }

    /// `f(Y)`.
    pub fn value_at_centre(&self) -> &CMatrix {
        &self.dmat
    }

    fn check_same_centre(&self, other: &Self) -> Result<()> {
        if self.d != other.d || self.centre_level() != other.centre_level() {
            return Err(Error::ShapeMismatch(
                "matrix-centre realizations over different centres".into(),
            ));
        }
        for j in 0..self.d {
            let diff = (self.centre.component(j) - other.centre.component(j)).norm();
            if diff > 1e-12 * (1.0 + self.centre.component(j).norm()) {
                return Err(Error::ShapeMismatch(
                    "matrix-centre realizations over different centres".into(),
                ));
            }
        }
        Ok(())
    }

    /// Evaluates at `X` of level `s·m` via the ampliated centred pencil.
    pub fn eval(&self, x: &MatrixTuple) -> Result<CMatrix> {
        if x.d() != self.d {
            return Err(Error::AlphabetMismatch {
                expected: self.d,
                found: x.d(),
            });
        }
        let m = self.centre_level();
        if x.level() % m != 0 {
            return Err(Error::ShapeMismatch(format!(
                "level {} is not a multiple of the centre level {}",
                x.level(),
                m
            )));
        }
        let s = x.level() / m;
        let big = self.state_dim() * s;
        let mut pencil = CMatrix::identity(big, big);
        let mut rhs = CMatrix::zeros(big, s * m);
        for j in 0..self.d {
            let h = x.component(j) - self.centre.component(j).kronecker_left_identity(s);
            // blockwise ampliation over the m x m grid of h
            for bi in 0..s {
                for bj in 0..s {
                    let block = h.view((bi * m, bj * m), (m, m)).into_owned();
                    if block.norm() == 0.0 {
                        continue;
                    }
                    let am = self.maps_a[j].apply(&block);
                    let bm = self.maps_b[j].apply(&block);
                    let mdim = self.state_dim();
                    for r in 0..mdim {
                        for c2 in 0..mdim {
                            pencil[(bi * mdim + r, bj * mdim + c2)] -= am[(r, c2)];
                        }
                    }
                    for r in 0..mdim {
                        for c2 in 0..m {
                            rhs[(bi * mdim + r, bj * m + c2)] += bm[(r, c2)];
                        }
                    }
                }
            }
        }
        let solver = LuSolver::new(&pencil);
        let rcond = solver.rcond();
        if rcond < SINGULARITY_TOL {
            return Err(Error::SingularPencil { rcond });
        }
        let w = solver.solve(&rhs).ok_or(Error::SingularPencil { rcond })?;
        let eye_s = CMatrix::identity(s, s);
        let amp_c = eye_s.kronecker(&self.c);
        let amp_d = eye_s.kronecker(&self.dmat);
        Ok(amp_d + amp_c * w)
    }

    /// Taylor-Taylor term for the word `w = i_1 .. i_k` in direction `H`:
    /// `Cmap · Amap_{i1}(H_{i1}) .. Amap_{i(k-1)}(H_{i(k-1)}) · Bmap_{ik}(H_{ik})`.
    /// The empty word yields `f(Y)`.
    pub fn tt_term(&self, w: &Word, h: &MatrixTuple) -> Result<CMatrix> {
        w.validate(self.d)?;
        if h.d() != self.d {
            return Err(Error::AlphabetMismatch {
                expected: self.d,
                found: h.d(),
            });
        }
        if h.level() != self.centre_level() {
            return Err(Error::ShapeMismatch(
                "direction tuple must live at the centre level".into(),
            ));
        }
        if w.is_empty() {
            return Ok(self.dmat.clone());
        }
        let letters = w.letters();
        let last = letters[letters.len() - 1] as usize - 1;
        let mut v = self.maps_b[last].apply(h.component(last));
        for &letter in letters[..letters.len() - 1].iter().rev() {
            let j = letter as usize - 1;
            v = self.maps_a[j].apply(h.component(j)) * v;
        }
        Ok(&self.c * v)
    }

    /// Matrix-centre sum: block-diagonal maps, stacked `B`, concatenated `C`,
    /// `D + D'`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_centre(other)?;
        let maps_a = self
            .maps_a
            .iter()
            .zip(&other.maps_a)
            .map(|(x, y)| MapA::DirectSum(Box::new(x.clone()), Box::new(y.clone())))
            .collect();
        let maps_b = self
            .maps_b
            .iter()
            .zip(&other.maps_b)
            .map(|(x, y)| MapB::Stack(Box::new(x.clone()), Box::new(y.clone())))
            .collect();
        let m = self.centre_level();
        let mut c = CMatrix::zeros(m, self.state_dim() + other.state_dim());
        c.view_mut((0, 0), (m, self.state_dim())).copy_from(&self.c);
        c.view_mut((0, self.state_dim()), (m, other.state_dim()))
            .copy_from(&other.c);
        Ok(MatrixCentreRealization {
            d: self.d,
            centre: self.centre.clone(),
            maps_a,
            maps_b,
            c,
            dmat: &self.dmat + &other.dmat,
        })
    }

    /// Matrix-centre product with coupling `Bmap_j(.) C'` and `D D'`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_centre(other)?;
        let maps_a = (0..self.d)
            .map(|j| MapA::Coupled {
                top: Box::new(self.maps_a[j].clone()),
                bottom: Box::new(other.maps_a[j].clone()),
                b_top: Box::new(self.maps_b[j].clone()),
                c_bottom: other.c.clone(),
            })
            .collect();
        let maps_b = (0..self.d)
            .map(|j| {
                MapB::Stack(
                    Box::new(MapB::ScaledRight {
                        base: Box::new(self.maps_b[j].clone()),
                        right: other.dmat.clone(),
                    }),
                    Box::new(other.maps_b[j].clone()),
                )
            })
            .collect();
        let m = self.centre_level();
        let mut c = CMatrix::zeros(m, self.state_dim() + other.state_dim());
        c.view_mut((0, 0), (m, self.state_dim())).copy_from(&self.c);
        c.view_mut((0, self.state_dim()), (m, other.state_dim()))
            .copy_from(&(&self.dmat * &other.c));
        Ok(MatrixCentreRealization {
            d: self.d,
            centre: self.centre.clone(),
            maps_a,
            maps_b,
            c,
            dmat: &self.dmat * &other.dmat,
        })
    }

    /// Matrix-centre inverse; requires `f(Y)` invertible as an `m x m` matrix.
    pub fn invert(&self) -> Result<Self> {
        let solver = LuSolver::new(&self.dmat);
        let rcond = solver.rcond();
        if rcond < SINGULARITY_TOL {
            return Err(Error::NotInvertibleAtCentre { rcond });
        }
        let m = self.centre_level();
        let dinv = solver
            .solve(&CMatrix::identity(m, m))
            .ok_or(Error::NotInvertibleAtCentre { rcond })?;
        let dinv_c = &dinv * &self.c;
        let maps_a = (0..self.d)
            .map(|j| MapA::Corrected {
                base: Box::new(self.maps_a[j].clone()),
                b: Box::new(self.maps_b[j].clone()),
                dinv_c: dinv_c.clone(),
            })
            .collect();
        let maps_b = (0..self.d)
            .map(|j| MapB::ScaledRight {
                base: Box::new(self.maps_b[j].clone()),
                right: -&dinv,
            })
            .collect();
        Ok(MatrixCentreRealization {
            d: self.d,
            centre: self.centre.clone(),
            maps_a,
            maps_b,
            c: dinv_c,
            dmat: dinv,
        })
    }
}

trait KroneckerLeftIdentity {
    fn kronecker_left_identity(&self, s: usize) -> CMatrix;
}

impl KroneckerLeftIdentity for CMatrix {
    /// `I_s ⊗ self`.
    fn kronecker_left_identity(&self, s: usize) -> CMatrix {
        CMatrix::identity(s, s).kronecker(self)
    }
}

/// Builds the matrix-centre realization of an FM realization about `Y`;
/// requires `L_A(Y)` invertible.
pub fn matcentre_from_fm(fm: &FmRealization, y: &MatrixTuple) -> Result<MatrixCentreRealization> {
    if y.d() != fm.d_vars() {
        return Err(Error::AlphabetMismatch {
            expected: fm.d_vars(),
            found: y.d(),
        });
    }
    let m = y.level();
    let dim = fm.dim();
    let value = fm.eval(y)?; // checks pencil invertibility at Y
    if dim == 0 {
        // constant function: no state, maps vanish
        let p = Arc::new(CMatrix::zeros(0, 0));
        let zero_a = Arc::new(CMatrix::zeros(0, 0));
        let pyb = Arc::new(CMatrix::zeros(0, m));
        return Ok(MatrixCentreRealization {
            d: fm.d_vars(),
            centre: y.clone(),
            maps_a: (0..fm.d_vars())
                .map(|_| MapA::Pencil {
                    p: p.clone(),
                    a: zero_a.clone(),
                })
                .collect(),
            maps_b: (0..fm.d_vars())
                .map(|_| MapB::Pencil {
                    p: p.clone(),
                    a: zero_a.clone(),
                    b: Arc::new(CMatrix::zeros(0, 1)),
                    pyb: pyb.clone(),
                })
                .collect(),
            c: CMatrix::zeros(m, 0),
            dmat: value,
        });
    }
    let pencil = crate::realization::pencil_apply(fm.a(), y);
    let solver = LuSolver::new(&pencil);
    let rcond = solver.rcond();
    if rcond < SINGULARITY_TOL {
        return Err(Error::SingularPencil { rcond });
    }
    let p = Arc::new(
        solver
            .solve(&CMatrix::identity(m * dim, m * dim))
            .ok_or(Error::SingularPencil { rcond })?,
    );
    // PYB = P (Y ⊗ B) where Y ⊗ B = sum_k Y_k ⊗ B_k
    let mut yb = CMatrix::zeros(m * dim, m);
    for k in 0..fm.d_vars() {
        let bk = CMatrix::from_column_slice(dim, 1, fm.b()[k].as_slice());
        yb += y.component(k).kronecker(&bk);
    }
    let pyb = Arc::new(p.as_ref() * yb);
    let maps_a = (0..fm.d_vars())
        .map(|j| MapA::Pencil {
            p: p.clone(),
            a: Arc::new(fm.a()[j].clone()),
        })
        .collect();
    let maps_b = (0..fm.d_vars())
        .map(|j| MapB::Pencil {
            p: p.clone(),
            a: Arc::new(fm.a()[j].clone()),
            b: Arc::new(CMatrix::from_column_slice(dim, 1, fm.b()[j].as_slice())),
            pyb: pyb.clone(),
        })
        .collect();
    let c = CMatrix::identity(m, m).kronecker(fm.c());
    Ok(MatrixCentreRealization {
        d: fm.d_vars(),
        centre: y.clone(),
        maps_a,
        maps_b,
        c,
        dmat: value,
    })
}

/// Independent route to a Taylor-Taylor term: evaluates the plain FM
/// realization on the block-upper-triangular tuple with `Y` on the diagonal
/// and `H_{i1}, .., H_{ik}` on the superdiagonal, and reads off the upper
/// right `m x m` corner.
pub fn tt_term_block_oracle(
    fm: &FmRealization,
    y: &MatrixTuple,
    w: &Word,
    h: &MatrixTuple,
) -> Result<CMatrix> {
    let m = y.level();
    let k = w.len();
    if k == 0 {
        return fm.eval(y);
    }
    let blocks = k + 1;
    let letters = w.letters();
    let components = (1..=fm.d_vars() as u32)
        .map(|r| {
            let mut comp = CMatrix::zeros(blocks * m, blocks * m);
            for bi in 0..blocks {
                comp.view_mut((bi * m, bi * m), (m, m))
                    .copy_from(y.component((r - 1) as usize));
            }
            for (pos, &letter) in letters.iter().enumerate() {
                if letter == r {
                    comp.view_mut((pos * m, (pos + 1) * m), (m, m))
                        .copy_from(h.component((letter - 1) as usize));
                }
            }
            comp
        })
        .collect::<Vec<_>>();
    let x = MatrixTuple::new(components)?;
    let value = fm.eval(&x)?;
    Ok(value.view((0, k * m), (m, m)).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, ONE};
    use crate::sampling;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn well_conditioned_fm(
        rng: &mut rand_chacha::ChaCha8Rng,
        d: usize,
        dim: usize,
    ) -> FmRealization {
        let fm = sampling::random_fm(rng, d, dim);
        // shrink A so pencils near small centres stay invertible
        let a = fm.a().iter().map(|m| m * c(0.3)).collect();
        FmRealization::new(a, fm.b().to_vec(), fm.c().clone(), fm.d_scalar()).unwrap()
    }

    #[test]
    fn centre_zero_reduces_to_plain_fm() {
        let mut rng = sampling::rng(1);
        let fm = well_conditioned_fm(&mut rng, 2, 3);
        let y = MatrixTuple::zeros(2, 1);
        let mc = matcentre_from_fm(&fm, &y).unwrap();
        // D block equals D exactly and the maps reduce to G ⊗ A_j, G ⊗ B_j
        assert!((mc.value_at_centre()[(0, 0)] - fm.d_scalar()).norm() < 1e-12);
        let g = CMatrix::from_element(1, 1, c(1.0));
        assert!((mc.maps_a()[0].apply(&g) - &fm.a()[0]).norm() < 1e-12);
        let b0 = CMatrix::from_column_slice(3, 1, fm.b()[0].as_slice());
        assert!((mc.maps_b()[0].apply(&g) - b0).norm() < 1e-12);
        // evaluation agrees with the flat realization
        for _ in 0..5 {
            let x = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.2));
            let lhs = mc.eval(&x).unwrap();
            let rhs = fm.eval(&x).unwrap();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn scalar_centre_arithmetic() {
        // d=1, A = 1/2, Y = 1: P = (1 - 1/2)^{-1} = 2 and Amap(g) = g
        let fm = FmRealization::new(
            vec![CMatrix::from_element(1, 1, c(0.5))],
            vec![crate::linalg::CVector::from_element(1, ONE)],
            CMatrix::from_element(1, 1, ONE),
            ONE,
        )
        .unwrap();
        let y = MatrixTuple::scalars(&[ONE]);
        let mc = matcentre_from_fm(&fm, &y).unwrap();
        let g = CMatrix::from_element(1, 1, c(3.0));
        let applied = mc.maps_a()[0].apply(&g);
        assert!(
            (applied[(0, 0)] - c(3.0)).norm() < 1e-12,
            "{}",
            applied[(0, 0)]
        );
    }

    #[test]
    fn eval_at_displaced_identity_is_centre_value() {
        let mut rng = sampling::rng(2);
        let fm = well_conditioned_fm(&mut rng, 2, 3);
        let y = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.3));
        let mc = matcentre_from_fm(&fm, &y).unwrap();
        for s in 1..=3usize {
            let x = y.ampliate(s);
            let v = mc.eval(&x).unwrap();
            let expected = identity(s).kronecker(mc.value_at_centre());
            assert!((v - expected).norm() < 1e-10, "s = {s}");
        }
    }

    #[test]
    fn dual_path_evaluation_near_centre() {
        let mut rng = sampling::rng(3);
        let fm = well_conditioned_fm(&mut rng, 2, 3);
        let y = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.2));
        let mc = matcentre_from_fm(&fm, &y).unwrap();
        for s in [1usize, 2] {
            for _ in 0..10 {
                let delta = sampling::gaussian_tuple(&mut rng, 2, 2 * s).scale(c(0.05));
                let x = y.ampliate(s).add(&delta).unwrap();
                let lhs = mc.eval(&x).unwrap();
                let rhs = fm.eval(&x).unwrap();
                assert!((lhs - rhs).norm() < 1e-8, "s = {s}");
            }
        }
    }

    #[test]
    fn tt_terms_match_block_corner_extraction() {
        let mut rng = sampling::rng(4);
        let fm = well_conditioned_fm(&mut rng, 2, 3);
        let y = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.2));
        let mc = matcentre_from_fm(&fm, &y).unwrap();
        let h = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.5));
        for w in Word::all_up_to_length(2, 3) {
            if w.is_empty() {
                continue;
            }
            let lhs = mc.tt_term(&w, &h).unwrap();
            let rhs = tt_term_block_oracle(&fm, &y, &w, &h).unwrap();
            assert!(
                (&lhs - &rhs).norm() < 1e-8,
                "word {:?}: {:.3e}",
                w,
                (&lhs - &rhs).norm()
            );
        }
    }

    #[test]
    fn tt_term_at_zero_centre_reduces_to_coefficients() {
        let mut rng = sampling::rng(5);
        let fm = well_conditioned_fm(&mut rng, 2, 3);
        let y = MatrixTuple::zeros(2, 1);
        let mc = matcentre_from_fm(&fm, &y).unwrap();
        // with H_j = [[1]] the term is the plain series coefficient
        let h = MatrixTuple::scalars(&[ONE, ONE]);
        for w in Word::all_up_to_length(2, 3) {
            let term = mc.tt_term(&w, &h).unwrap()[(0, 0)];
            let coeff = fm.coeff(&w);
            assert!((term - coeff).norm() < 1e-10, "word {:?}", w);
        }
        // for general scalar directions the term is the coefficient times
        // the monomial evaluated at H
        let h1 = sampling::gaussian_complex(&mut rng);
        let h2 = sampling::gaussian_complex(&mut rng);
        let h = MatrixTuple::scalars(&[h1, h2]);
        for w in Word::all_up_to_length(2, 3) {
            let term = mc.tt_term(&w, &h).unwrap()[(0, 0)];
            let mut monomial = Complex64::new(1.0, 0.0);
            for &l in w.letters() {
                monomial *= if l == 1 { h1 } else { h2 };
            }
            let expected = fm.coeff(&w) * monomial;
            assert!((term - expected).norm() < 1e-10, "word {:?}", w);
        }
    }

    #[test]
    fn algebra_add_is_tt_linear() {
        let mut rng = sampling::rng(6);
        let f = well_conditioned_fm(&mut rng, 2, 3);
        let g = well_conditioned_fm(&mut rng, 2, 2);
        let y = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.2));
        let mcf = matcentre_from_fm(&f, &y).unwrap();
        let mcg = matcentre_from_fm(&g, &y).unwrap();
        let sum = mcf.add(&mcg).unwrap();
        let h = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.4));
        for w in Word::all_up_to_length(2, 3) {
            let lhs = sum.tt_term(&w, &h).unwrap();
            let rhs = mcf.tt_term(&w, &h).unwrap() + mcg.tt_term(&w, &h).unwrap();
            assert!((lhs - rhs).norm() < 1e-9, "word {:?}", w);
        }
    }

    #[test]
    fn algebra_mul_matches_pointwise_products() {
        let mut rng = sampling::rng(7);
        let f = well_conditioned_fm(&mut rng, 2, 3);
        let g = well_conditioned_fm(&mut rng, 2, 2);
        let y = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.2));
        let mcf = matcentre_from_fm(&f, &y).unwrap();
        let mcg = matcentre_from_fm(&g, &y).unwrap();
        let prod = mcf.mul(&mcg).unwrap();
        for _ in 0..15 {
            let delta = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.04));
            let x = y.add(&delta).unwrap();
            let lhs = prod.eval(&x).unwrap();
            let rhs = mcf.eval(&x).unwrap() * mcg.eval(&x).unwrap();
            assert!((lhs - rhs).norm() < 1e-7);
        }
    }

    #[test]
    fn algebra_invert_is_pointwise_inverse() {
        let mut rng = sampling::rng(8);
        let mut f = well_conditioned_fm(&mut rng, 2, 3);
        f = FmRealization::new(f.a().to_vec(), f.b().to_vec(), f.c().clone(), c(1.5)).unwrap();
        let y = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.1));
        let mcf = matcentre_from_fm(&f, &y).unwrap();
        let inv = mcf.invert().unwrap();
        for _ in 0..15 {
            let delta = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.03));
            let x = y.add(&delta).unwrap();
            let lhs = inv.eval(&x).unwrap() * mcf.eval(&x).unwrap();
            assert!((lhs - identity(2)).norm() < 1e-7);
        }
    }

    #[test]
    fn maps_are_linear() {
        let mut rng = sampling::rng(10);
        let fm = well_conditioned_fm(&mut rng, 2, 3);
        let y = sampling::gaussian_tuple(&mut rng, 2, 2).scale(c(0.2));
        let g1 = matcentre_from_fm(&fm, &y).unwrap();
        let mc = g1.mul(&g1.add(&g1).unwrap()).unwrap(); // exercise composites
        let alpha = Complex64::new(0.7, -0.3);
        let g = sampling::gaussian_matrix(&mut rng, 2, 2);
        let h = sampling::gaussian_matrix(&mut rng, 2, 2);
        let combo = &g * alpha + &h;
        for j in 0..2 {
            let lhs_a = mc.maps_a()[j].apply(&combo);
            let rhs_a = mc.maps_a()[j].apply(&g) * alpha + mc.maps_a()[j].apply(&h);
            assert!((&lhs_a - &rhs_a).norm() < 1e-12 * (1.0 + lhs_a.norm()));
            let lhs_b = mc.maps_b()[j].apply(&combo);
            let rhs_b = mc.maps_b()[j].apply(&g) * alpha + mc.maps_b()[j].apply(&h);
            assert!((&lhs_b - &rhs_b).norm() < 1e-12 * (1.0 + lhs_b.norm()));
        }
    }

    #[test]
    fn invert_requires_invertible_centre_value() {
        // f(Y) = 0 for f = z1 at Y = 0
        let fm = FmRealization::variable(1, 1).unwrap();
        let y = MatrixTuple::zeros(1, 1);
        let mc = matcentre_from_fm(&fm, &y).unwrap();
        assert!(matches!(
            mc.invert(),
            Err(Error::NotInvertibleAtCentre { .. })
        ));
    }

    #[test]
    fn ampliated_eval_respects_joint_similarity() {
        let mut rng = sampling::rng(11);
        let fm = well_conditioned_fm(&mut rng, 2, 3);
        let y = sampling::gaussian_tuple(&mut rng, 2, 1).scale(c(0.2));
        let mc = matcentre_from_fm(&fm, &y).unwrap();
        let s_blocks = 3usize;
        let x = y
            .ampliate(s_blocks)
            .add(&sampling::gaussian_tuple(&mut rng, 2, s_blocks).scale(c(0.05)))
            .unwrap();
        let mut sim = sampling::gaussian_matrix(&mut rng, s_blocks, s_blocks) * c(0.2);
        sim += identity(s_blocks) * c(1.0);
        let xs = x.conjugate(&sim).unwrap();
        let lhs = mc.eval(&xs).unwrap();
        let rhs = {
            let solver = crate::linalg::LuSolver::new(&sim);
            solver.solve(&(mc.eval(&x).unwrap() * &sim)).unwrap()
        };
        assert!((lhs - rhs).norm() < 1e-8);
    }

    #[test]
    fn ray_meromorphy_singularities_are_reciprocal_eigenvalues() {
        // z -> eval(I_s ⊗ Y + z X): the centred pencil along the ray is
        // singular exactly at reciprocals of eigenvalues of the ampliated
        // map applied to X
        let mut rng = sampling::rng(9);
        let fm = well_conditioned_fm(&mut rng, 2, 3);
        let y = sampling::gaussian_tuple(&mut rng, 2, 1).scale(c(0.2));
        let mc = matcentre_from_fm(&fm, &y).unwrap();
        let s = 2usize;
        let x = sampling::gaussian_tuple(&mut rng, 2, s);
        // ampliated pencil matrix for the direction X
        let mdim = mc.state_dim();
        let m = mc.centre_level();
        let mut amp = CMatrix::zeros(s * mdim, s * mdim);
        for j in 0..2 {
            for bi in 0..s {
                for bj in 0..s {
                    let block = x.component(j).view((bi * m, bj * m), (m, m)).into_owned();
                    let applied = mc.maps_a()[j].apply(&block);
                    for r in 0..mdim {
                        for c2 in 0..mdim {
                            amp[(bi * mdim + r, bj * mdim + c2)] += applied[(r, c2)];
                        }
                    }
                }
            }
        }
        let eigs = crate::linalg::eigenvalues(&amp).unwrap();
        let floor = 1e-9 * crate::linalg::op_norm(&amp).max(1.0);
        let mut checked = 0;
        for mu in eigs.iter().filter(|mu| mu.norm() > floor) {
            let z = mu.finv();
            let probe = y.ampliate(s).add(&x.scale(z)).unwrap();
            match mc.eval(&probe) {
                Err(Error::SingularPencil { .. }) => checked += 1,
                Ok(_) => panic!("expected singular centred pencil at z = {z}"),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(checked > 0, "no nonzero eigenvalues sampled");
    }
}
