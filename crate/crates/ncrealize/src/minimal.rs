//! Controllable/observable subspaces, Kalman minimization and minimality
//! certificates for finite realizations.
//!
//! Subspaces are computed by a breadth-first Krylov sweep in graded-lex word
//! order, re-orthogonalizing with modified Gram-Schmidt twice. The Kalman
//! compression follows the two-stage construction: restrict to the
//! controllable subspace, then compress to the closure of the adjoint orbit
//! of the restricted `b`.

use crate::error::{Error, Result};
use crate::linalg::{
    mgs_orthogonalize, pseudo_inverse, CMatrix, CVector, LuSolver, RANK_TOL, SINGULARITY_TOL,
};
use crate::realization::{DescriptorRealization, FmRealization};

/// Default relative residual tolerance for similarity recovery.
pub const SIMILARITY_TOL: f64 = 1e-7;

/// An orthonormal basis of a subspace of `C^ambient_dim`.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    basis: CMatrix, // ambient_dim x rank, orthonormal columns
    rank_tolerance: f64,
}

impl SubspaceBasis {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tolerance
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient_dim
    }
}

/// Orthonormal basis of the smallest subspace containing `seeds` and
/// invariant under every `A_j`, by breadth-first Krylov sweep.
pub fn krylov_span(a: &[CMatrix], seeds: &[CVector]) -> SubspaceBasis {
    let ambient_dim = a
        .first()
        .map_or_else(|| seeds.first().map_or(0, |v| v.len()), |m| m.nrows());
    // scale for the rank cut: Frobenius bound on the generating tuple
    let scale = a.iter().map(|m| m.norm()).fold(
        seeds.iter().map(|v| v.norm()).fold(1.0f64, f64::max),
        f64::max,
    );
    let tol = RANK_TOL * scale;

    let mut basis: Vec<CVector> = Vec::new();
    let mut frontier: Vec<CVector> = Vec::new();
    for s in seeds {
        let (q, norm) = mgs_orthogonalize(&basis, s);
        if norm > tol {
            basis.push(q.clone());
            frontier.push(q);
        }
    }
    while !frontier.is_empty() && basis.len() < ambient_dim {
        let mut next = Vec::new();
        for aj in a {
            for v in &frontier {
                let w = aj * v;
                let (q, norm) = mgs_orthogonalize(&basis, &w);
                if norm > tol {
                    basis.push(q.clone());
                    next.push(q);
                    if basis.len() == ambient_dim {
                        break;
                    }
                }
            }
            if basis.len() == ambient_dim {
                break;
            }
        }
        frontier = next;
    }
    let mut m = CMatrix::zeros(ambient_dim, basis.len());
    for (k, v) in basis.iter().enumerate() {
        m.column_mut(k).copy_from(v);
    }
    SubspaceBasis {
        ambient_dim,
        basis: m,
        rank_tolerance: tol,
    }
}

/// Basis of the controllable subspace `span{A^w c}`.
pub fn controllable_span(a: &[CMatrix], c: &CVector) -> SubspaceBasis {
    krylov_span(a, std::slice::from_ref(c))
}

/// Basis of the observable subspace `span{A^{*w} b}`.
pub fn observable_span(a: &[CMatrix], b: &CVector) -> SubspaceBasis {
    let adj: Vec<CMatrix> = a.iter().map(|m| m.adjoint()).collect();
    krylov_span(&adj, std::slice::from_ref(b))
}

/// Ranks of the controllable and observable subspaces plus dimensions before
/// and after a minimization.
#[derive(Clone, Debug)]
pub struct MinimalityReport {
    pub controllable_rank: usize,
    pub observable_rank: usize,
    pub dim: usize,
}

impl MinimalityReport {
    pub fn is_minimal(&self) -> bool {
        self.controllable_rank == self.dim && self.observable_rank == self.dim
    }
}

/// Controllability/observability ranks of a descriptor realization.
pub fn minimality_report(r: &DescriptorRealization) -> MinimalityReport {
    MinimalityReport {
        controllable_rank: controllable_span(r.a(), r.c()).rank(),
        observable_rank: observable_span(r.a(), r.b()).rank(),
        dim: r.dim(),
    }
}

/// True iff the realization is both controllable and observable.
pub fn is_minimal(r: &DescriptorRealization) -> bool {
    minimality_report(r).is_minimal()
}

/// Controllability/observability ranks of an FM realization
/// (seeds `{B_j}` and `C^*`).
pub fn minimality_report_fm(r: &FmRealization) -> MinimalityReport {
    let controllable = krylov_span(r.a(), r.b()).rank();
    let cstar = r.c().adjoint().column(0).into_owned();
    let adj: Vec<CMatrix> = r.a().iter().map(|m| m.adjoint()).collect();
    let observable = krylov_span(&adj, &[cstar]).rank();
    MinimalityReport {
        controllable_rank: controllable,
        observable_rank: observable,
        dim: r.dim(),
    }
}

pub fn is_minimal_fm(r: &FmRealization) -> bool {
    minimality_report_fm(r).is_minimal()
}

/// Result of a Kalman minimization: the compressed realization plus the
/// projector data that produced it.
#[derive(Clone, Debug)]
pub struct KalmanOutput {
    pub realization: DescriptorRealization,
    pub input_dim: usize,
    pub controllable_rank: usize,
    pub minimal_dim: usize,
}

/// Compresses `(A, b, c)` to the semi-invariant minimal space
/// `C_{A,c} ⊖ (O_{A,b}^⊥ ∩ C_{A,c})`, yielding a coefficient-equal minimal
/// realization whose pencil is invertible wherever the input pencil is.
pub fn kalman_minimize(r: &DescriptorRealization) -> KalmanOutput {
    let d = r.d();
    // stage 1: restrict to the controllable subspace
    let cspan = controllable_span(r.a(), r.c());
    let v = cspan.basis();
    let rdim = cspan.rank();
    if rdim == 0 {
        return KalmanOutput {
            realization: DescriptorRealization::trivial(d),
            input_dim: r.dim(),
            controllable_rank: 0,
            minimal_dim: 0,
        };
    }
    let a_restricted: Vec<CMatrix> = r.a().iter().map(|aj| v.adjoint() * aj * v).collect();
    let b_restricted = v.adjoint() * r.b();

    // stage 2: the minimal space is the adjoint orbit of b inside the
    // controllable subspace
    let a_adj: Vec<CMatrix> = a_restricted.iter().map(|m| m.adjoint()).collect();
    let ospan = krylov_span(&a_adj, &[b_restricted]);
    let w = ospan.basis();
    let sdim = ospan.rank();
    if sdim == 0 {
        return KalmanOutput {
            realization: DescriptorRealization::trivial(d),
            input_dim: r.dim(),
            controllable_rank: rdim,
            minimal_dim: 0,
        };
    }
    let u = v * w; // orthonormal basis of the minimal space in ambient coords
    let a0: Vec<CMatrix> = r.a().iter().map(|aj| u.adjoint() * aj * &u).collect();
    let b0 = u.adjoint() * r.b();
    let c0 = u.adjoint() * r.c();
    KalmanOutput {
        realization: DescriptorRealization::new(a0, b0, c0).expect("consistent shapes"),
        input_dim: r.dim(),
        controllable_rank: rdim,
        minimal_dim: sdim,
    }
}

/// Kalman minimization of an FM realization by the same two-stage sweep with
/// seeds `{B_j}` and `C^*`.
pub fn kalman_minimize_fm(r: &FmRealization) -> FmRealization {
    let d = r.d_vars();
    let cspan = krylov_span(r.a(), r.b());
    let v = cspan.basis();
    if cspan.rank() == 0 {
        return FmRealization::constant(d, r.d_scalar());
    }
    let a_restricted: Vec<CMatrix> = r.a().iter().map(|aj| v.adjoint() * aj * v).collect();
    let c_restricted = r.c() * v; // 1 x rank row

    let a_adj: Vec<CMatrix> = a_restricted.iter().map(|m| m.adjoint()).collect();
    let cstar = c_restricted.adjoint().column(0).into_owned();
    let ospan = krylov_span(&a_adj, &[cstar]);
    let w = ospan.basis();
    if ospan.rank() == 0 {
        return FmRealization::constant(d, r.d_scalar());
    }
    let u = v * w;
    let a0: Vec<CMatrix> = r.a().iter().map(|aj| u.adjoint() * aj * &u).collect();
    let b0: Vec<CVector> = r.b().iter().map(|bj| u.adjoint() * bj).collect();
    let c0 = r.c() * &u;
    FmRealization::new(a0, b0, c0, r.d_scalar()).expect("consistent shapes")
}

/// Recovers the similarity between two minimal realizations of the same
/// function and equal state dimension: solves `S [A^w c] = [A'^w c']` in
/// least squares over a spanning Krylov word set, then validates the
/// intertwining relations.
pub fn similarity_between_minimal(
    r: &DescriptorRealization,
    r2: &DescriptorRealization,
) -> Result<CMatrix> {
    similarity_with_tolerance(r, r2, SIMILARITY_TOL)
}

pub fn similarity_with_tolerance(
    r: &DescriptorRealization,
    r2: &DescriptorRealization,
    tolerance: f64,
) -> Result<CMatrix> {
    if r.d() != r2.d() {
        return Err(Error::AlphabetMismatch {
            expected: r.d(),
            found: r2.d(),
        });
    }
    let rep = minimality_report(r);
    if !rep.is_minimal() {
        return Err(Error::NotMinimal {
            controllable: rep.controllable_rank,
            observable: rep.observable_rank,
            dim: rep.dim,
        });
    }
    let rep2 = minimality_report(r2);
    if !rep2.is_minimal() {
        return Err(Error::NotMinimal {
            controllable: rep2.controllable_rank,
            observable: rep2.observable_rank,
            dim: rep2.dim,
        });
    }
    if r.dim() != r2.dim() {
        return Err(Error::Structural(format!(
            "minimal realizations of different state dimensions {} and {}; \
             at finite dimension minimality forces equal dimensions",
            r.dim(),
            r2.dim()
        )));
    }
    let dim = r.dim();
    if dim == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }

    // Krylov columns for both realizations over the same word set; words of
    // length < dim suffice to span when minimal
    let mut cols: Vec<(CVector, CVector)> = vec![(r.c().clone(), r2.c().clone())];
    let mut level: Vec<(CVector, CVector)> = cols.clone();
    for _ in 1..dim.max(2) {
        let mut next = Vec::with_capacity(level.len() * r.d());
        for j in 0..r.d() {
            for (v, v2) in &level {
                next.push((&r.a()[j] * v, &r2.a()[j] * v2));
            }
        }
        cols.extend(next.iter().cloned());
        level = next;
        if cols.len() > 4 * dim * dim {
            break;
        }
    }
    let mut k = CMatrix::zeros(dim, cols.len());
    let mut k2 = CMatrix::zeros(dim, cols.len());
    for (idx, (v, v2)) in cols.iter().enumerate() {
        k.column_mut(idx).copy_from(v);
        k2.column_mut(idx).copy_from(v2);
    }
    let s = &k2 * pseudo_inverse(&k, RANK_TOL);

    // validate: intertwining, vector matching, invertibility
    let scale = |m: &CMatrix| 1.0 + m.norm();
    let mut residual: f64 = 0.0;
    for j in 0..r.d() {
        let diff = (&s * &r.a()[j] - &r2.a()[j] * &s).norm() / scale(&r.a()[j]);
        residual = residual.max(diff);
    }
    residual = residual.max((&s * r.c() - r2.c()).norm() / (1.0 + r.c().norm()));
    residual = residual.max((s.adjoint() * r2.b() - r.b()).norm() / (1.0 + r.b().norm()));
    let rcond = LuSolver::new(&s).rcond();
    if residual > tolerance || rcond < SINGULARITY_TOL {
        return Err(Error::NotSimilar {
            residual: residual.max(if rcond < SINGULARITY_TOL { 1.0 } else { 0.0 }),
            tolerance,
        });
    }
    Ok(s)
}
