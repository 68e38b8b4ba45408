//! Pencil invertibility analysis and meromorphic restrictions.
//!
//! For a realization `(A, b, c)` and a point `X`, the scalar restriction
//! `g_X(z) = f(zX)` is meromorphic with pole candidates at the reciprocals of
//! the nonzero eigenvalues of `X ⊗ A = sum_j X_j ⊗ A_j`. This module locates
//! those eigenvalues through the complex Schur form, bounds pole orders by
//! nilpotency rank chains on the clustered blocks, confirms actual blow-up by
//! circle sampling, and runs Zariski-density probes of the invertibility
//! domain.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, identity, op_norm, schur, singular_values, CMatrix, LuSolver, ONE, SINGULARITY_TOL,
};
use crate::matrix::MatrixTuple;
use crate::minimal::minimality_report;
use crate::realization::{pencil_apply, pencil_solver, DescriptorRealization};
use crate::sampling;

/// Eigenvalues below `EIGEN_FLOOR_REL * ||X ⊗ A||` are treated as part of the
/// quasinilpotent component.
pub const EIGEN_FLOOR_REL: f64 = 1e-9;

/// Relative tolerance for clustering nearby eigenvalues into one Riesz group.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Number of quadrature nodes for contour integrals; trapezoid on a circle is
/// spectrally accurate for these analytic integrands.
pub const CONTOUR_POINTS: usize = 256;

/// Invertibility flag plus the reciprocal condition estimate behind it.
#[derive(Clone, Copy, Debug)]
pub struct ConditionReport {
    pub rcond: f64,
    pub invertible: bool,
}

/// Estimates the reciprocal condition number of `L_A(X)`.
pub fn pencil_condition(a: &[CMatrix], x: &MatrixTuple) -> ConditionReport {
    let solver = pencil_solver(a, x);
    let rcond = solver.rcond();
    ConditionReport {
        rcond,
        invertible: rcond >= SINGULARITY_TOL,
    }
}

/// One reciprocal-eigenvalue pole candidate of a restriction.
#[derive(Clone, Debug)]
pub struct PoleCandidate {
    /// Cluster eigenvalue of `X ⊗ A`.
    pub lambda: Complex64,
    /// Candidate pole `z = 1/lambda`; stored as the exact reciprocal.
    pub z: Complex64,
    /// Riesz rank of the cluster.
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
    /// Largest Jordan block of the cluster; bounds the pole order.
    pub order_bound: usize,
}

/// Nonzero spectrum of `X ⊗ A` sorted by decreasing modulus.
#[derive(Clone, Debug)]
pub struct PoleReport {
    pub matrix_norm: f64,
    pub eigen_floor: f64,
    pub candidates: Vec<PoleCandidate>,
}

/// Locates the pole candidates of `g_X(z) = f(zX)` from the spectrum of
/// `X ⊗ A`, with per-cluster Jordan-order bounds from the Schur form.
pub fn restriction_poles(r: &DescriptorRealization, x: &MatrixTuple) -> Result<PoleReport> {
    if x.d() != r.d() {
        return Err(Error::AlphabetMismatch {
            expected: r.d(),
            found: x.d(),
        });
    }
    let m = kron_state(r.a(), x);
    spectrum_analysis(&m)
}

/// Pole-candidate analysis of an arbitrary square matrix: nonzero eigenvalue
/// clusters with multiplicities and Jordan-order bounds.
pub fn spectrum_analysis(m: &CMatrix) -> Result<PoleReport> {
    let n = m.nrows();
    if n == 0 {
        return Ok(PoleReport {
            matrix_norm: 0.0,
            eigen_floor: 0.0,
            candidates: Vec::new(),
        });
    }
    let matrix_norm = op_norm(m);
    let eigen_floor = EIGEN_FLOOR_REL * matrix_norm;
    // Exactly nilpotent matrices (structured truncations) defeat floating
    // QR iteration: the computed spectrum of a size-k Jordan structure sits
    // at magnitude ~ eps^{1/k}, far above any sensible floor. A power of
    // the (normalized) matrix hitting the exact zero matrix certifies an
    // empty nonzero spectrum, so check that first by repeated squaring.
    if matrix_norm == 0.0 || is_exactly_nilpotent(m, matrix_norm) {
        return Ok(PoleReport {
            matrix_norm,
            eigen_floor,
            candidates: Vec::new(),
        });
    }
    let (q0, t0) = schur(m)?;
    let eigs: Vec<Complex64> = (0..n).map(|i| t0[(i, i)]).collect();

    // greedy clustering of the nonzero spectrum, largest modulus first
    let mut unassigned: Vec<usize> = (0..n).filter(|&i| eigs[i].norm() > eigen_floor).collect();
    unassigned.sort_by(|&i, &j| eigs[j].norm().partial_cmp(&eigs[i].norm()).unwrap());
    let cluster_tol = CLUSTER_TOL * matrix_norm.max(f64::MIN_POSITIVE);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut used = vec![false; n];
    for &i in &unassigned {
        if used[i] {
            continue;
        }
        let mut cluster = vec![i];
        used[i] = true;
        for &j in &unassigned {
            if !used[j] && (eigs[j] - eigs[i]).norm() <= cluster_tol {
                cluster.push(j);
                used[j] = true;
            }
        }
        clusters.push(cluster);
    }

    let mut candidates = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let p = cluster.len();
        let mut q = q0.clone();
        let mut t = t0.clone();
        linalg::reorder_schur(&mut q, &mut t, &cluster);
        let t11 = t.view((0, 0), (p, p)).into_owned();
        let mean = t11.diagonal().iter().sum::<Complex64>() / Complex64::new(p as f64, 0.0);
        // rank chain of the normalized nilpotent part bounds the largest
        // Jordan block; normalizing by the matrix scale makes the cut
        // dimensionless and consistent with the clustering tolerance
        let nilpotent =
            (&t11 - identity(p) * mean) / Complex64::new(matrix_norm.max(f64::MIN_POSITIVE), 0.0);
        let mut order_bound = p;
        let mut power = identity(p);
        let mut geometric = 1;
        for k in 1..=p {
            power = &power * &nilpotent;
            let rk = rank_at_scale(&power, CLUSTER_TOL, 1.0);
            if k == 1 {
                geometric = p - rk;
            }
            if rk == 0 {
                order_bound = k;
                break;
            }
        }
        debug_assert!(order_bound <= p - geometric + 1);
        candidates.push(PoleCandidate {
            lambda: mean,
            z: mean.finv(),
            algebraic_multiplicity: p,
            geometric_multiplicity: geometric,
            order_bound,
        });
    }
    candidates.sort_by(|a, b| b.lambda.norm().partial_cmp(&a.lambda.norm()).unwrap());
    Ok(PoleReport {
        matrix_norm,
        eigen_floor,
        candidates,
    })
}

fn is_exactly_nilpotent(m: &CMatrix, matrix_norm: f64) -> bool {
    let n = m.nrows();
    let mut power = m / Complex64::new(matrix_norm, 0.0);
    let mut exponent = 1usize;
    while exponent < 2 * n {
        if power.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            return true;
        }
        power = &power * &power;
        exponent *= 2;
    }
    power.iter().all(|v| *v == Complex64::new(0.0, 0.0))
}

fn rank_at_scale(m: &CMatrix, rel_tol: f64, scale: f64) -> usize {
    let sv = singular_values(m);
    let cut = rel_tol * scale.max(f64::MIN_POSITIVE);
    sv.iter().filter(|&&s| s > cut).count()
}

/// `X ⊗ A = sum_j X_j ⊗ A_j`.
pub fn kron_state(a: &[CMatrix], x: &MatrixTuple) -> CMatrix {
    let dim = a.first().map_or(0, |m| m.nrows());
    let n = x.level();
    let mut m = CMatrix::zeros(n * dim, n * dim);
    for j in 0..a.len() {
        m += x.component(j).kronecker(&a[j]);
    }
    m
}

/// Outcome of the circle-blow-up probe at a pole candidate.
#[derive(Clone, Debug, PartialEq)]
pub enum PoleVerdict {
    /// Confirmed pole with the fitted order.
    Pole {
        order: usize,
        slope: f64,
        residual: f64,
    },
    /// The restriction stays bounded: no pole at this point.
    Regular { slope: f64, residual: f64 },
    /// The log-log fit did not resolve the behaviour.
    Indeterminate { slope: f64, residual: f64 },
}

/// Confirms or refutes a pole of `g_X(z) = f(zX)` at `z0` by sampling
/// `max ||g_X||` on shrinking circles and fitting the log-log slope.
///
/// Five radii in geometric progression spanning two decades, starting at
/// `1e-2` but never wider than a quarter of the distance to the nearest
/// other pole candidate. Requires a minimal realization.
pub fn verify_pole_actual(
    r: &DescriptorRealization,
    x: &MatrixTuple,
    z0: Complex64,
) -> Result<PoleVerdict> {
    let report = minimality_report(r);
    if !report.is_minimal() {
        return Err(Error::NotMinimal {
            controllable: report.controllable_rank,
            observable: report.observable_rank,
            dim: report.dim,
        });
    }
    let poles = restriction_poles(r, x)?;
    let gap = poles
        .candidates
        .iter()
        .map(|c| (c.z - z0).norm())
        .filter(|&g| g > 1e-12)
        .fold(f64::INFINITY, f64::min);
    let r_top = (1e-2f64).min(gap / 4.0).max(1e-9);

    // A weakly coupled pole bends the log-log curve inside the default
    // radius window (the residue term only wins for small enough r), which
    // shows up as a bad fit. Shrinking the circles confirms the limit
    // without ever flipping a genuine verdict, so retry once, closer in.
    let mut verdict = circle_fit_verdict(r, x, z0, r_top);
    if matches!(verdict, PoleVerdict::Indeterminate { .. }) && r_top > 1e-7 {
        verdict = circle_fit_verdict(r, x, z0, r_top / 100.0);
    }
    Ok(verdict)
}

fn circle_fit_verdict(
    r: &DescriptorRealization,
    x: &MatrixTuple,
    z0: Complex64,
    r_top: f64,
) -> PoleVerdict {
    let radii: Vec<f64> = (0..5)
        .map(|k| r_top * 10f64.powf(-(k as f64) / 2.0))
        .collect();
    let angles = 16;
    let mut log_r = Vec::with_capacity(radii.len());
    let mut log_m = Vec::with_capacity(radii.len());
    for &radius in &radii {
        let mut max_norm: f64 = 0.0;
        for k in 0..angles {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / angles as f64;
            let z = z0 + Complex64::from_polar(radius, theta);
            if let Ok(v) = r.eval(&x.scale(z)) {
                max_norm = max_norm.max(v.norm());
            }
        }
        if max_norm > 0.0 {
            log_r.push(radius.ln());
            log_m.push(max_norm.ln());
        }
    }
    if log_r.len() < 3 {
        return PoleVerdict::Indeterminate {
            slope: f64::NAN,
            residual: f64::INFINITY,
        };
    }
    let (slope, residual) = fit_line(&log_r, &log_m);
    if residual > 0.2 {
        return PoleVerdict::Indeterminate { slope, residual };
    }
    if slope <= -0.5 {
        let order = (-slope).round().max(1.0) as usize;
        PoleVerdict::Pole {
            order,
            slope,
            residual,
        }
    } else {
        PoleVerdict::Regular { slope, residual }
    }
}

/// Least-squares slope and RMS residual of `y` against `x`.
fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - xm) * (v - xm)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (intercept + slope * a);
            e * e
        })
        .sum();
    (slope, (rss / n).sqrt())
}

/// One disagreement found while comparing invertibility domains.
#[derive(Clone, Debug)]
pub struct DomainDisagreement {
    pub level: usize,
    pub rcond_first: f64,
    pub rcond_second: f64,
}

/// Outcome of sampling two realizations' invertibility domains.
#[derive(Clone, Debug)]
pub struct AgreementReport {
    pub samples: usize,
    pub agreements: usize,
    pub disagreements: Vec<DomainDisagreement>,
    /// One-variable only: whether the nonzero spectra (with multiplicities
    /// and order bounds) matched.
    pub spectra_match: Option<bool>,
}

impl AgreementReport {
    pub fn fully_agrees(&self) -> bool {
        self.disagreements.is_empty() && self.spectra_match.unwrap_or(true)
    }
}

/// Samples random and adversarial points and compares pencil invertibility of
/// two minimal coefficient-equal realizations; in one variable also compares
/// the nonzero spectra including multiplicities and Jordan-order bounds.
pub fn domain_agreement(
    r: &DescriptorRealization,
    r2: &DescriptorRealization,
    test_degree: usize,
    samples: usize,
    seed: u64,
) -> Result<AgreementReport> {
    if r.d() != r2.d() {
        return Err(Error::AlphabetMismatch {
            expected: r.d(),
            found: r2.d(),
        });
    }
    for rr in [r, r2] {
        let rep = minimality_report(rr);
        if !rep.is_minimal() {
            return Err(Error::NotMinimal {
                controllable: rep.controllable_rank,
                observable: rep.observable_rank,
                dim: rep.dim,
            });
        }
    }
    // coefficient equality precondition
    let s1 = r.series(test_degree);
    let s2 = r2.series(test_degree);
    for w in crate::word::Word::all_up_to_length(r.d(), test_degree) {
        let diff = (s1.coeff(&w) - s2.coeff(&w)).norm();
        let scale = s1.coeff(&w).norm().max(1.0);
        if diff > 1e-9 * scale {
            return Err(Error::CoefficientMismatch {
                word: w.letters().to_vec(),
                difference: diff,
            });
        }
    }

    let mut rng = sampling::rng(seed);
    let mut agreements = 0usize;
    let mut disagreements = Vec::new();
    for trial in 0..samples {
        let level = 1 + trial % 2;
        let mut x = sampling::gaussian_tuple(&mut rng, r.d(), level);
        // steer half the samples right next to a singular scaling
        if trial % 2 == 1 {
            let m = kron_state(r.a(), &x);
            if let Ok(eigs) = linalg::eigenvalues(&m) {
                if let Some(mu) = eigs
                    .iter()
                    .filter(|e| e.norm() > EIGEN_FLOOR_REL * op_norm(&m).max(1.0))
                    .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
                {
                    let eps = 1e-4 * (1.0 + sampling::uniform(&mut rng));
                    x = x.scale(mu.finv() * Complex64::new(1.0 + eps, 0.0));
                }
            }
        }
        let c1 = pencil_condition(r.a(), &x);
        let c2 = pencil_condition(r2.a(), &x);
        if c1.invertible == c2.invertible {
            agreements += 1;
        } else {
            disagreements.push(DomainDisagreement {
                level,
                rcond_first: c1.rcond,
                rcond_second: c2.rcond,
            });
        }
    }

    let spectra_match = if r.d() == 1 {
        Some(one_variable_spectra_match(r, r2)?)
    } else {
        None
    };

    Ok(AgreementReport {
        samples,
        agreements,
        disagreements,
        spectra_match,
    })
}

fn one_variable_spectra_match(
    r: &DescriptorRealization,
    r2: &DescriptorRealization,
) -> Result<bool> {
    let one = MatrixTuple::scalars(&[ONE]);
    let p1 = restriction_poles(r, &one)?;
    let p2 = restriction_poles(r2, &one)?;
    if p1.candidates.len() != p2.candidates.len() {
        return Ok(false);
    }
    let scale = p1.matrix_norm.max(p2.matrix_norm).max(1e-300);
    for (c1, c2) in p1.candidates.iter().zip(&p2.candidates) {
        if (c1.lambda - c2.lambda).norm() > 1e-7 * scale {
            return Ok(false);
        }
        if c1.algebraic_multiplicity != c2.algebraic_multiplicity
            || c1.order_bound != c2.order_bound
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Schatten p-norm `(sum sigma_i^p)^{1/p}`; requires `p >= 1`.
pub fn schatten_norm(m: &CMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "Schatten exponent must be >= 1, got {p}"
        )));
    }
    let sv = singular_values(m);
    Ok(sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Zariski-density probe: fraction of Gaussian samples with invertible
/// pencil, plus the singular parameters found along one random affine line.
#[derive(Clone, Debug)]
pub struct DensityReport {
    pub level: usize,
    pub trials: usize,
    pub invertible_count: usize,
    pub fraction: f64,
    /// Singular parameters `t` with `L_A(X0 + t X1)` singular, for the
    /// sampled line; finite for compact-truncation tuples.
    pub line_singular_params: Vec<Complex64>,
}

/// Samples `trials` Gaussian points at the given level and reports the
/// invertible fraction; then analyzes one random line. Trials are split
/// across worker threads (capped by `NCREALIZE_THREADS`) with per-task
/// seeded streams, so results do not depend on the thread count.
pub fn zariski_probe(
    a: &[CMatrix],
    d: usize,
    level: usize,
    trials: usize,
    seed: u64,
) -> Result<DensityReport> {
    let threads = thread_cap().min(trials.max(1));
    let counts: Vec<usize> = if threads <= 1 {
        vec![run_probe_chunk(a, d, level, 0, trials, seed)]
    } else {
        let chunk = trials.div_ceil(threads);
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for t in 0..threads {
                let start = t * chunk;
                let stop = ((t + 1) * chunk).min(trials);
                if start >= stop {
                    break;
                }
                handles.push(scope.spawn(move || run_probe_chunk(a, d, level, start, stop, seed)));
            }
            handles
                .into_iter()
                .map(|h| h.join().expect("probe worker"))
                .collect()
        })
    };
    let invertible_count: usize = counts.iter().sum();

    // one random line X0 + t X1 with X0 inside the invertibility domain
    let mut rng = sampling::rng(seed ^ 0x5a5a_5a5a);
    let mut line_params = Vec::new();
    for _ in 0..8 {
        let x0 = sampling::gaussian_tuple(&mut rng, d, level).scale(Complex64::new(0.1, 0.0));
        let x1 = sampling::gaussian_tuple(&mut rng, d, level);
        match singular_params_on_line(a, &x0, &x1) {
            Ok(params) => {
                line_params = params;
                break;
            }
            Err(_) => continue,
        }
    }

    Ok(DensityReport {
        level,
        trials,
        invertible_count,
        fraction: if trials == 0 {
            1.0
        } else {
            invertible_count as f64 / trials as f64
        },
        line_singular_params: line_params,
    })
}

fn run_probe_chunk(
    a: &[CMatrix],
    d: usize,
    level: usize,
    start: usize,
    stop: usize,
    seed: u64,
) -> usize {
    let mut count = 0;
    for trial in start..stop {
        let mut rng = sampling::task_rng(seed, trial as u64);
        let x = sampling::gaussian_tuple(&mut rng, d, level);
        if pencil_condition(a, &x).invertible {
            count += 1;
        }
    }
    count
}

/// Worker thread cap: `NCREALIZE_THREADS` when set, else hardware parallelism.
pub fn thread_cap() -> usize {
    std::env::var("NCREALIZE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Singular parameters of `t -> L_A(X0 + t X1)` along a line with invertible
/// base point: the reciprocals of the nonzero eigenvalues of
/// `L_A(X0)^{-1} (X1 ⊗ A)`.
pub fn singular_params_on_line(
    a: &[CMatrix],
    x0: &MatrixTuple,
    x1: &MatrixTuple,
) -> Result<Vec<Complex64>> {
    let m0 = pencil_apply(a, x0);
    let solver = LuSolver::new(&m0);
    let rcond = solver.rcond();
    if rcond < SINGULARITY_TOL {
        return Err(Error::SingularPencil { rcond });
    }
    let m1 = kron_state(a, x1);
    let g = solver.solve(&m1).ok_or(Error::SingularPencil { rcond })?;
    let norm = op_norm(&g);
    let eigs = linalg::eigenvalues(&g)?;
    let mut params: Vec<Complex64> = eigs
        .into_iter()
        .filter(|mu| mu.norm() > EIGEN_FLOOR_REL * norm.max(1.0))
        .map(|mu| mu.finv())
        .collect();
    params.sort_by(|p, q| p.norm().partial_cmp(&q.norm()).unwrap());
    Ok(params)
}

/// Riesz projector by 256-point trapezoid contour integration of the
/// resolvent around `center`.
pub fn contour_projector(m: &CMatrix, center: Complex64, radius: f64) -> Result<CMatrix> {
    contour_laurent_coefficient(m, center, radius, 0)
}

/// Laurent coefficient `C_{-n-1} = (1/2πi) ∮ (λ - center)^n R(λ) dλ` of the
/// resolvent about `center`; `n = 0` is the Riesz projector.
pub fn contour_laurent_coefficient(
    m: &CMatrix,
    center: Complex64,
    radius: f64,
    n: usize,
) -> Result<CMatrix> {
    let size = m.nrows();
    let mut acc = CMatrix::zeros(size, size);
    let k = CONTOUR_POINTS;
    for idx in 0..k {
        let theta = 2.0 * std::f64::consts::PI * idx as f64 / k as f64;
        let phase = Complex64::from_polar(1.0, theta);
        let offset = phase * radius;
        let lambda = center + offset;
        let shifted = identity(size) * lambda - m;
        let solver = LuSolver::new(&shifted);
        let resolvent = solver
            .solve(&identity(size))
            .ok_or(Error::SingularPencil { rcond: 0.0 })?;
        acc += resolvent * (offset.powu(n as u32) * offset);
    }
    Ok(acc / Complex64::new(k as f64, 0.0))
}

/// Riesz projector for the eigenvalue cluster inside the disk
/// `|lambda - center| < radius`, via ordered Schur decomposition.
/// Returns the projector and the cluster's algebraic multiplicity.
pub fn schur_cluster_projector(
    m: &CMatrix,
    center: Complex64,
    radius: f64,
) -> Result<(CMatrix, usize)> {
    let (mut q, mut t) = schur(m)?;
    let selected: Vec<usize> = (0..t.nrows())
        .filter(|&i| (t[(i, i)] - center).norm() < radius)
        .collect();
    let p = linalg::reorder_schur(&mut q, &mut t, &selected);
    let proj = linalg::spectral_projector_from_schur(&q, &t, p)?;
    Ok((proj, p))
}
