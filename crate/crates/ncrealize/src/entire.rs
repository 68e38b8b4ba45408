//! Explicit realizations of monomials and entire functions.
//!
//! The building block is the jointly nilpotent tuple `T(w)` acting on
//! `C^{n+1}` for a word `w = i_1 .. i_n`: `T(w)_k` has a 1 in position
//! `(j, j+1)` exactly when `i_j = k`. With `b = e_1`, `c = e_{n+1}` this is
//! the minimal realization of the monomial `z^w`.
//!
//! Weighted block sums of these tuples realize entire functions: every block
//! carries the n-th root of its Taylor coefficient so that the full
//! coefficient reassembles exactly after `n` factors, while the root decay
//! makes the truncations converge in row norm.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMatrix, CVector, ONE, ZERO};
use crate::realization::{tuple_row_norm, DescriptorRealization};
use crate::series::TruncatedSeries;
use crate::word::Word;

/// Default cap on the state dimension of block constructions; the number of
/// word blocks grows like `d^N`.
pub const DIMENSION_CAP: usize = 20_000;

/// The truncated-shift tuple `T(w)` on `C^{|w|+1}`.
pub fn shift_tuple(w: &Word, d: usize) -> Vec<CMatrix> {
    let n = w.len();
    let mut t = vec![CMatrix::zeros(n + 1, n + 1); d];
    for (j, &letter) in w.letters().iter().enumerate() {
        t[(letter - 1) as usize][(j, j + 1)] = ONE;
    }
    t
}

/// Minimal jointly nilpotent realization of the monomial `z^w`:
/// `(T(w), e_1, e_{|w|+1})`. The empty word yields the constant 1 on a
/// one-dimensional state space.
pub fn monomial_realization(w: &Word, d: usize) -> Result<DescriptorRealization> {
    w.validate(d)?;
    let n = w.len();
    let a = shift_tuple(w, d);
    let mut b = CVector::zeros(n + 1);
    b[0] = ONE;
    let mut c = CVector::zeros(n + 1);
    c[n] = ONE;
    DescriptorRealization::new(a, b, c)
}

/// Principal n-th root branch: `|a|^{1/n} exp(i Arg(a)/n)`, with a branch
/// index recorded so tests can rotate through the other roots.
fn nth_root(a: Complex64, n: usize, branch: usize) -> Complex64 {
    if a == ZERO {
        return ZERO;
    }
    let r = a.norm().powf(1.0 / n as f64);
    let theta = (a.arg() + 2.0 * std::f64::consts::PI * branch as f64) / n as f64;
    Complex64::from_polar(r, theta)
}

/// One weighted block of a quasinilpotent construction.
#[derive(Clone, Debug)]
pub struct BlockRecord {
    pub word: Word,
    pub offset: usize,
    pub size: usize,
    pub root: Complex64,
    pub root_branch: usize,
}

/// Construction report: block layout, nilpotency index, and the assembled
/// row norm next to its closed-form prediction `d * max (n^2 |a_w|)^{1/n}`.
#[derive(Clone, Debug)]
pub struct ConstructionCertificate {
    pub block_count: usize,
    pub dim: usize,
    pub nilpotency_index: usize,
    pub row_norm: f64,
    pub predicted_row_norm: f64,
    pub blocks: Vec<BlockRecord>,
}

/// Options for the quasinilpotent constructions.
#[derive(Clone, Copy, Debug)]
pub struct ConstructionOptions {
    pub dimension_cap: usize,
    /// Rotates every block root by this many branch steps; coefficients are
    /// invariant under this choice.
    pub branch_offset: usize,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        ConstructionOptions {
            dimension_cap: DIMENSION_CAP,
            branch_offset: 0,
        }
    }
}

/// One-variable entire-function realization from Taylor coefficients
/// `a_0 .. a_N`: the direct sum of `(n^2)^{1/n} a_n^{1/n} S_n^*` blocks with
/// `b`/`c` weights `1/n`. Nilpotent by truncation, norm
/// `max_n (n^2 |a_n|)^{1/n}`, and `b^* A^n c = a_n` exactly.
///
/// ```
/// use ncrealize::{entire, Word};
/// use num_complex::Complex64;
///
/// let coeffs: Vec<Complex64> = (0..6).map(|n| Complex64::new(0.5f64.powi(n), 0.0)).collect();
/// let (r, cert) = entire::quasinilpotent_1d(&coeffs).unwrap();
/// assert!((r.coeff(&Word::from([1, 1, 1])) - coeffs[3]).norm() < 1e-14);
/// // the truncation is exactly nilpotent: the adjunction power vanishes
/// assert_eq!(cert.nilpotency_index, 5);
/// assert!(entire::joint_spectral_radius(r.a(), 6).vanished_at == Some(6));
/// ```
pub fn quasinilpotent_1d(
    coeffs: &[Complex64],
) -> Result<(DescriptorRealization, ConstructionCertificate)> {
    quasinilpotent_1d_with(coeffs, ConstructionOptions::default())
}

pub fn quasinilpotent_1d_with(
    coeffs: &[Complex64],
    opts: ConstructionOptions,
) -> Result<(DescriptorRealization, ConstructionCertificate)> {
    if coeffs.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least the constant coefficient".into(),
        ));
    }
    let n_max = coeffs.len() - 1;
    let blocks = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, a)| **a != ZERO)
        .map(|(n, &a)| (Word::new(vec![1u32; n]), a))
        .collect();
    build_quasinilpotent(1, coeffs[0], blocks, n_max, opts)
}

/// Multivariable entire-function realization from a truncated series: one
/// `T(w)` block per word `|w| = n <= degree` with nonzero coefficient, scaled
/// by `d (n^2)^{1/n} a_w^{1/n}`, with `b`/`c` block weights `1/(n sqrt(d)^n)`.
/// Zero-coefficient blocks are omitted.
pub fn quasinilpotent_nc(
    coeffs: &TruncatedSeries,
    degree: usize,
) -> Result<(DescriptorRealization, ConstructionCertificate)> {
    quasinilpotent_nc_with(coeffs, degree, ConstructionOptions::default())
}

pub fn quasinilpotent_nc_with(
    coeffs: &TruncatedSeries,
    degree: usize,
    opts: ConstructionOptions,
) -> Result<(DescriptorRealization, ConstructionCertificate)> {
    if coeffs.degree_bound() < degree {
        return Err(Error::DegreeTooSmall {
            needed: degree,
            got: coeffs.degree_bound(),
        });
    }
    let d = coeffs.d();
    let a0 = coeffs.coeff(&Word::empty());
    let mut blocks: Vec<(Word, Complex64)> = Vec::new();
    for n in 1..=degree {
        for w in Word::all_of_length(d, n) {
            let a = coeffs.coeff(&w);
            if a != ZERO {
                blocks.push((w, a));
            }
        }
    }
    build_quasinilpotent(d, a0, blocks, degree, opts)
}

fn build_quasinilpotent(
    d: usize,
    a0: Complex64,
    blocks: Vec<(Word, Complex64)>,
    degree: usize,
    opts: ConstructionOptions,
) -> Result<(DescriptorRealization, ConstructionCertificate)> {
    let df = d as f64;
    // word blocks are nonzero by construction; the cap check sees the
    // real assembled size
    let mut dim = if a0 != ZERO { 1 } else { 0 };
    for (w, _) in &blocks {
        dim += w.len() + 1;
    }
    if dim > opts.dimension_cap {
        return Err(Error::DimensionCap {
            requested: dim,
            cap: opts.dimension_cap,
        });
    }

    let mut a = vec![CMatrix::zeros(dim, dim); d];
    let mut b = CVector::zeros(dim);
    let mut c = CVector::zeros(dim);
    let mut records = Vec::new();
    let mut offset = 0usize;
    let mut predicted: f64 = 0.0;

    if a0 != ZERO {
        // scalar block: A = 0 (1x1), b = 1, c = a_0
        b[0] = ONE;
        c[0] = a0;
        records.push(BlockRecord {
            word: Word::empty(),
            offset: 0,
            size: 1,
            root: a0,
            root_branch: 0,
        });
        offset = 1;
    }
    for (w, coeff) in blocks {
        let n = w.len();
        let nf = n as f64;
        let branch = opts.branch_offset % n.max(1);
        let root = nth_root(coeff, n, branch);
        let scale = df * (nf * nf).powf(1.0 / nf);
        let t = shift_tuple(&w, d);
        for j in 0..d {
            for (row, col) in (0..n).map(|k| (k, k + 1)) {
                let v = t[j][(row, col)];
                if v != ZERO {
                    a[j][(offset + row, offset + col)] = v * root * scale;
                }
            }
        }
        let weight = 1.0 / (nf * df.sqrt().powi(n as i32));
        b[offset] = Complex64::new(weight, 0.0);
        c[offset + n] = Complex64::new(weight, 0.0);
        predicted = predicted.max(df * (nf * nf * coeff.norm()).powf(1.0 / nf));
        records.push(BlockRecord {
            word: w,
            offset,
            size: n + 1,
            root,
            root_branch: branch,
        });
        offset += n + 1;
    }
    debug_assert_eq!(offset, dim);

    let realization = if dim == 0 {
        DescriptorRealization::trivial(d)
    } else {
        DescriptorRealization::new(a, b, c)?
    };
    let cert = ConstructionCertificate {
        block_count: records.len(),
        dim,
        nilpotency_index: degree,
        row_norm: tuple_row_norm(realization.a()),
        predicted_row_norm: predicted,
        blocks: records,
    };
    Ok((realization, cert))
}

/// `Ad_{A,A*}^{∘m}(I) = sum_{|w|=m} A^w A^{w*}` by m-fold application of
/// `X -> sum_j A_j X A_j^*` (d·m products, not d^m).
pub fn adjunction_power(a: &[CMatrix], m: usize) -> CMatrix {
    let dim = a.first().map_or(0, |x| x.nrows());
    let mut x = CMatrix::identity(dim, dim);
    for _ in 0..m {
        let mut next = CMatrix::zeros(dim, dim);
        for aj in a {
            next += aj * &x * aj.adjoint();
        }
        x = next;
    }
    x
}

/// The joint-spectral-radius sequence `rho_m = ||Ad^{∘m}(I)||^{1/2m}`.
#[derive(Clone, Debug)]
pub struct JsrReport {
    /// `rho_m` for `m = 1 .. max_m`.
    pub rho: Vec<f64>,
    /// The last entry of the sequence; no extrapolation is applied.
    pub estimate: f64,
    /// First `m` at which the adjunction power vanished exactly, if any.
    pub vanished_at: Option<usize>,
}

/// Estimates the joint spectral radius by the adjunction-power sequence.
/// For jointly nilpotent tuples the sequence hits an exact 0 and stays there.
pub fn joint_spectral_radius(a: &[CMatrix], max_m: usize) -> JsrReport {
    let dim = a.first().map_or(0, |x| x.nrows());
    let mut x = CMatrix::identity(dim, dim);
    let mut rho = Vec::with_capacity(max_m);
    let mut vanished_at = None;
    for m in 1..=max_m {
        if vanished_at.is_none() {
            let mut next = CMatrix::zeros(dim, dim);
            for aj in a {
                next += aj * &x * aj.adjoint();
            }
            x = next;
            if x.iter().all(|v| *v == ZERO) {
                vanished_at = Some(m);
            }
        }
        if vanished_at.is_some() {
            rho.push(0.0);
        } else {
            rho.push(op_norm(&x).powf(1.0 / (2.0 * m as f64)));
        }
    }
    JsrReport {
        estimate: rho.last().copied().unwrap_or(0.0),
        rho,
        vanished_at,
    }
}
