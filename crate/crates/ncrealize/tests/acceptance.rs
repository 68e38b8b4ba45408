//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured figures (run with `--nocapture` to see them).
//!
//! Every tolerance is pinned in the assertions themselves.

use num_complex::Complex64;

use ncrealize::entire::{self, ConstructionOptions};
use ncrealize::expr;
use ncrealize::linalg::{self, identity, CMatrix, CVector, LuSolver, ONE, ZERO};
use ncrealize::minimal::{self, kalman_minimize};
use ncrealize::realization::{descriptor_from_fm, pencil_solver, tuple_row_norm};
use ncrealize::sampling;
use ncrealize::series::TruncatedSeries;
use ncrealize::spectral::{self, PoleVerdict};
use ncrealize::{DescriptorRealization, MatrixTuple, Word};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Criterion 1: 200 randomized expressions (depth <= 4, d in {1,2,3});
/// compiled realizations and the series oracle agree on every coefficient
/// of length <= 6 within 1e-9, in under 60 seconds.
#[test]
fn criterion_01_oracle_equivalence_on_random_expressions() {
    let started = std::time::Instant::now();
    let mut rng = sampling::rng(0x01);
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    let mut attempts = 0usize;
    while checked < 200 {
        attempts += 1;
        assert!(attempts < 2000, "expression generator stalled");
        let d = 1 + checked % 3;
        let ast = expr::random_expression(&mut rng, d, 4);
        let degree = if d == 3 { 5 } else { 6 };
        let compiled = match expr::compile(&ast, d) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let direct = expr::interpret_series(&ast, d, degree).expect("oracle path");
        let dist = compiled.series(degree).max_coeff_distance(&direct);
        assert!(
            dist < 1e-9,
            "expression {} disagrees with the oracle by {dist:.3e}",
            expr::print(&ast)
        );
        worst = worst.max(dist);
        checked += 1;
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "runtime target exceeded: {elapsed:?}"
    );
    println!("criterion 01 PASS: 200 expressions, worst coefficient gap {worst:.3e}, {elapsed:?}");
}

/// Criterion 2: monomial realizations for all |alpha| <= 4, d <= 3 have
/// delta coefficients, joint nilpotency at order |alpha|, and the row
/// partial-isometry / adjunction identities hold in exact integer arithmetic.
#[test]
fn criterion_02_monomial_realization_suite() {
    let mut words_checked = 0usize;
    for d in 1..=3usize {
        for alpha in Word::all_up_to_length(d, 4) {
            if alpha.is_empty() {
                continue;
            }
            let n = alpha.len();
            let r = entire::monomial_realization(&alpha, d).unwrap();
            assert_eq!(r.dim(), n + 1);

            // delta coefficients, exactly
            for omega in Word::all_up_to_length(d, 4) {
                let expected = if alpha == omega { ONE } else { ZERO };
                assert_eq!(r.coeff(&omega), expected, "alpha {alpha:?} omega {omega:?}");
            }

            // joint nilpotency at order |alpha|: exact zero products beyond
            for omega in Word::all_of_length(d, n + 1) {
                let mut prod = identity(n + 1);
                for &l in omega.letters() {
                    prod = &prod * &r.a()[(l - 1) as usize];
                }
                assert!(prod.iter().all(|v| *v == ZERO));
            }

            // sum T_k T_k^* = I - E_{n+1}, sum C_k C_k^* = I - E_1, exact
            let t = entire::shift_tuple(&alpha, d);
            let mut tt = CMatrix::zeros(n + 1, n + 1);
            let mut cc = CMatrix::zeros(n + 1, n + 1);
            for k in 0..d {
                tt += &t[k] * t[k].adjoint();
                cc += t[k].adjoint() * &t[k];
            }
            let mut e_last = identity(n + 1);
            e_last[(n, n)] = ZERO;
            let mut e_first = identity(n + 1);
            e_first[(0, 0)] = ZERO;
            assert_eq!(tt, e_last);
            assert_eq!(cc, e_first);

            // adjunction identity for every 1 <= m <= n, exact
            for m in 1..=n {
                let p = entire::adjunction_power(&t, m);
                let mut expected = CMatrix::zeros(n + 1, n + 1);
                for j in 0..(n - m + 1) {
                    expected[(j, j)] = ONE;
                }
                assert_eq!(p, expected, "alpha {alpha:?} m {m}");
            }
            assert!(entire::adjunction_power(&t, n + 1)
                .iter()
                .all(|v| *v == ZERO));
            words_checked += 1;
        }
    }
    println!("criterion 02 PASS: {words_checked} monomial realizations verified exactly");
}

/// Criterion 3: the entire constructions reproduce e^z (d=1, N=20) and the
/// two-variable inverse-factorial series (N=4) to relative 1e-12; the
/// adjunction power vanishes exactly at m = N+1; the assembled norm matches
/// the sup formula within 1e-10; scalar evaluation matches the truncated
/// Taylor sum within 1e-10 on [-3, 3].
#[test]
fn criterion_03_entire_construction() {
    // one variable: e^z to N = 20
    let n_max = 20usize;
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut fact = 1.0f64;
    coeffs.push(c(1.0));
    for n in 1..=n_max {
        fact *= n as f64;
        coeffs.push(c(1.0 / fact));
    }
    let (r1, cert1) = entire::quasinilpotent_1d(&coeffs).unwrap();
    for (n, expected) in coeffs.iter().enumerate() {
        let got = r1.coeff(&Word::new(vec![1u32; n]));
        let rel = (got - expected).norm() / expected.norm();
        assert!(
            rel <= 1e-12,
            "e^z coefficient {n}: relative error {rel:.3e}"
        );
    }
    // norm formula and exact nilpotency certificate
    let mut fact = 1.0f64;
    let mut predicted: f64 = 0.0;
    for n in 1..=n_max {
        fact *= n as f64;
        let nf = n as f64;
        predicted = predicted.max((nf * nf / fact).powf(1.0 / nf));
    }
    assert!((tuple_row_norm(r1.a()) - predicted).abs() < 1e-10);
    assert!((cert1.predicted_row_norm - predicted).abs() < 1e-10);
    assert!(entire::adjunction_power(r1.a(), n_max + 1)
        .iter()
        .all(|v| *v == ZERO));
    assert!(entire::adjunction_power(r1.a(), n_max)
        .iter()
        .any(|v| *v != ZERO));

    // scalar evaluation vs the truncated Taylor sum
    let mut worst_eval: f64 = 0.0;
    for step in 0..=24 {
        let z = -3.0 + 0.25 * step as f64;
        let value = r1.eval(&MatrixTuple::scalars(&[c(z)])).unwrap()[(0, 0)];
        let mut taylor = ZERO;
        let mut pow = ONE;
        for a in &coeffs {
            taylor += a * pow;
            pow *= c(z);
        }
        worst_eval = worst_eval.max((value - taylor).norm());
    }
    assert!(worst_eval < 1e-10, "scalar evaluation gap {worst_eval:.3e}");

    // two variables: a_w = 1/|w|! to N = 4 (31 coefficients)
    let n2 = 4usize;
    let entries: Vec<(Word, Complex64)> = Word::all_up_to_length(2, n2)
        .into_iter()
        .map(|w| {
            let mut fact = 1.0f64;
            for k in 1..=w.len() {
                fact *= k as f64;
            }
            (w, c(1.0 / fact))
        })
        .collect();
    assert_eq!(entries.len(), 31);
    let series = TruncatedSeries::from_coeffs(2, n2, entries.clone()).unwrap();
    let (r2, cert2) = entire::quasinilpotent_nc(&series, n2).unwrap();
    for (w, expected) in &entries {
        let got = r2.coeff(w);
        let rel = (got - expected).norm() / expected.norm();
        assert!(rel <= 1e-12, "word {w:?}: relative error {rel:.3e}");
    }
    assert!(entire::adjunction_power(r2.a(), n2 + 1)
        .iter()
        .all(|v| *v == ZERO));
    let mut predicted2: f64 = 0.0;
    for n in 1..=n2 {
        let nf = n as f64;
        let mut fact = 1.0f64;
        for k in 1..=n {
            fact *= k as f64;
        }
        predicted2 = predicted2.max(2.0 * (nf * nf / fact).powf(1.0 / nf));
    }
    assert!((cert2.row_norm - predicted2).abs() < 1e-10);

    println!(
        "criterion 03 PASS: e^z N=20 and d=2 N=4 reproduced, norms match to {:.1e}, eval gap {worst_eval:.3e}",
        (tuple_row_norm(r1.a()) - predicted).abs().max((cert2.row_norm - predicted2).abs())
    );
}

fn padded_random_realization(
    rng: &mut rand_chacha::ChaCha8Rng,
    d: usize,
    base_dim: usize,
    pad_dim: usize,
) -> DescriptorRealization {
    let base = sampling::random_descriptor(rng, d, base_dim);
    if pad_dim == 0 {
        return base;
    }
    let junk: Vec<CMatrix> = (0..d)
        .map(|_| sampling::gaussian_matrix(rng, pad_dim, pad_dim))
        .collect();
    base.pad_with_block(&junk, &CVector::zeros(pad_dim), &CVector::zeros(pad_dim))
        .unwrap()
}

/// Criterion 4: over 100 random padded realizations the Kalman output is
/// minimal, coefficient-equal to degree 2*dim within 1e-9, and every point
/// with invertible input pencil keeps an invertible output pencil
/// (100 sampled points each).
#[test]
fn criterion_04_kalman_minimization() {
    let mut rng = sampling::rng(0x04);
    let mut monotone_checked = 0usize;
    for trial in 0..100 {
        let d = 1 + trial % 3;
        let base_dim = if d == 3 { 2 } else { 2 + trial % 2 };
        let pad_dim = 1 + trial % 2;
        let r = padded_random_realization(&mut rng, d, base_dim, pad_dim);
        let out = kalman_minimize(&r);
        assert!(
            minimal::is_minimal(&out.realization),
            "trial {trial}: output not minimal"
        );
        let degree = 2 * r.dim().min(4);
        let dist = out
            .realization
            .series(degree)
            .max_coeff_distance(&r.series(degree));
        assert!(dist < 1e-9, "trial {trial}: coefficient gap {dist:.3e}");

        for _ in 0..100 {
            let level = 1 + (sampling::uniform(&mut rng) * 2.0) as usize;
            let x = sampling::gaussian_tuple(&mut rng, d, level.min(2));
            let rc_in = pencil_solver(r.a(), &x).rcond();
            if rc_in >= linalg::SINGULARITY_TOL {
                let rc_out = pencil_solver(out.realization.a(), &x).rcond();
                assert!(
                    rc_out >= linalg::SINGULARITY_TOL,
                    "trial {trial}: domain monotonicity violated ({rc_in:.1e} -> {rc_out:.1e})"
                );
                monotone_checked += 1;
            }
        }
    }
    println!(
        "criterion 04 PASS: 100 padded realizations minimized; {monotone_checked} invertible points stayed invertible"
    );
}

fn realization_with_spectrum(
    rng: &mut rand_chacha::ChaCha8Rng,
    eigenvalues: &[Complex64],
    jordan_pair: bool,
) -> DescriptorRealization {
    let dim = eigenvalues.len();
    let mut a = CMatrix::zeros(dim, dim);
    for (i, lam) in eigenvalues.iter().enumerate() {
        a[(i, i)] = *lam;
    }
    if jordan_pair {
        // make the first two (equal) eigenvalues a true Jordan block
        a[(0, 1)] = ONE;
    }
    // conjugate by a well-conditioned random similarity
    let mut s = sampling::gaussian_matrix(rng, dim, dim);
    s += identity(dim) * c(3.0);
    let solver = LuSolver::new(&s);
    let a_conj = solver.solve(&(&a * &s)).unwrap();
    let ones = CVector::from_element(dim, ONE);
    DescriptorRealization::new(vec![a_conj], ones.clone(), ones).unwrap()
}

/// Criterion 5: for 50 minimal one-variable realizations with spectral
/// gaps of at least 1e-3, every reciprocal nonzero eigenvalue is confirmed
/// as a pole by the circle-blow-up fit, with fitted order at most the
/// Jordan bound and zero false regular verdicts.
#[test]
fn criterion_05_pole_reciprocity() {
    let mut rng = sampling::rng(0x05);
    let x = MatrixTuple::scalars(&[ONE]);
    let mut poles_confirmed = 0usize;
    let mut instance = 0usize;
    while instance < 50 {
        let dim = 3 + instance % 4;
        let jordan = instance % 5 == 4;
        // sample eigenvalues with pairwise gaps >= 1e-3
        let mut eigenvalues: Vec<Complex64> = Vec::new();
        let slots = if jordan { dim - 1 } else { dim };
        'sampling: while eigenvalues.len() < slots {
            let modulus = 0.4 + 1.1 * sampling::uniform(&mut rng);
            let angle = 2.0 * std::f64::consts::PI * sampling::uniform(&mut rng);
            let lam = Complex64::from_polar(modulus, angle);
            for e in &eigenvalues {
                if (e - lam).norm() < 1e-3 {
                    continue 'sampling;
                }
            }
            eigenvalues.push(lam);
        }
        if jordan {
            // duplicate the first eigenvalue for the Jordan pair
            eigenvalues.insert(0, eigenvalues[0]);
        }
        let r = realization_with_spectrum(&mut rng, &eigenvalues, jordan);
        if !minimal::is_minimal(&r) {
            continue;
        }
        instance += 1;

        let report = spectral::restriction_poles(&r, &x).unwrap();
        assert!(!report.candidates.is_empty());
        for cand in &report.candidates {
            let verdict = spectral::verify_pole_actual(&r, &x, cand.z).unwrap();
            match verdict {
                PoleVerdict::Pole { order, .. } => {
                    assert!(
                        order <= cand.order_bound,
                        "instance {instance}: fitted order {order} above bound {}",
                        cand.order_bound
                    );
                    poles_confirmed += 1;
                }
                PoleVerdict::Regular { slope, residual } => panic!(
                    "instance {instance}: false regular verdict at z = {} (slope {slope:.2}, residual {residual:.2})",
                    cand.z
                ),
                PoleVerdict::Indeterminate { slope, residual } => panic!(
                    "instance {instance}: indeterminate at z = {} (slope {slope:.2}, residual {residual:.2})",
                    cand.z
                ),
            }
        }
    }
    println!("criterion 05 PASS: {poles_confirmed} reciprocal eigenvalues confirmed as poles");
}

/// Criterion 6: the contour-integrated Riesz residue equals the Schur
/// spectral projector within 1e-6 on 20 random matrices of size <= 12.
#[test]
fn criterion_06_riesz_laurent_contour() {
    let mut rng = sampling::rng(0x06);
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let n = 4 + trial % 9; // sizes 4 .. 12
        let m = sampling::gaussian_matrix(&mut rng, n, n);
        let eigs = linalg::eigenvalues(&m).unwrap();
        // best-separated eigenvalue and a contour radius inside the gap
        let (idx, gap) = (0..n)
            .map(|i| {
                let g = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (eigs[i] - eigs[j]).norm())
                    .fold(f64::INFINITY, f64::min);
                (i, g)
            })
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let center = eigs[idx];
        let radius = (gap / 3.0).min(0.5);
        let contour = spectral::contour_projector(&m, center, radius).unwrap();
        let (schur_proj, mult) = spectral::schur_cluster_projector(&m, center, radius).unwrap();
        assert_eq!(mult, 1);
        let diff = (contour - schur_proj).norm();
        assert!(diff < 1e-6, "trial {trial}: projector gap {diff:.3e}");
        worst = worst.max(diff);
    }
    println!(
        "criterion 06 PASS: 20 contour residues match Schur projectors, worst gap {worst:.3e}"
    );
}

/// Criterion 7: Taylor-Taylor terms match the block-corner extraction within
/// 1e-8 for |w| <= 2 on 30 random (FM, Y) pairs, and the recentred
/// evaluation matches the flat evaluation within 1e-8 on 50 points near
/// each centre.
#[test]
fn criterion_07_matrix_centre_coherence() {
    let mut rng = sampling::rng(0x07);
    let mut worst_term: f64 = 0.0;
    let mut worst_eval: f64 = 0.0;
    for pair in 0..30 {
        let d = 1 + pair % 2;
        let dim = 2 + pair % 2;
        let fm0 = sampling::random_fm(&mut rng, d, dim);
        let a = fm0.a().iter().map(|m| m * c(0.3)).collect();
        let fm =
            ncrealize::FmRealization::new(a, fm0.b().to_vec(), fm0.c().clone(), fm0.d_scalar())
                .unwrap();
        let m_level = 1 + pair % 2;
        let y = sampling::gaussian_tuple(&mut rng, d, m_level).scale(c(0.2));
        let mc = match ncrealize::matcentre::matcentre_from_fm(&fm, &y) {
            Ok(mc) => mc,
            Err(_) => continue, // pencil singular at this centre; next pair
        };

        let h = sampling::gaussian_tuple(&mut rng, d, m_level).scale(c(0.5));
        for w in Word::all_up_to_length(d, 2) {
            if w.is_empty() {
                continue;
            }
            let lhs = mc.tt_term(&w, &h).unwrap();
            let rhs = ncrealize::matcentre::tt_term_block_oracle(&fm, &y, &w, &h).unwrap();
            let diff = (lhs - rhs).norm();
            assert!(diff < 1e-8, "pair {pair} word {w:?}: term gap {diff:.3e}");
            worst_term = worst_term.max(diff);
        }

        let mut points = 0usize;
        while points < 50 {
            let delta = sampling::gaussian_tuple(&mut rng, d, m_level).scale(c(0.04));
            let x = y.add(&delta).unwrap();
            let (lhs, rhs) = match (mc.eval(&x), fm.eval(&x)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            let diff = (lhs - rhs).norm();
            assert!(diff < 1e-8, "pair {pair}: evaluation gap {diff:.3e}");
            worst_eval = worst_eval.max(diff);
            points += 1;
        }
    }
    println!(
        "criterion 07 PASS: 30 centres, worst term gap {worst_term:.3e}, worst eval gap {worst_eval:.3e}"
    );
}

/// Criterion 8: two independently built minimal realizations of the same
/// function agree on pencil invertibility at 200 sampled points for each of
/// 20 function instances, with matching one-variable spectra to 1e-7.
#[test]
fn criterion_08_domain_agreement() {
    let mut rng = sampling::rng(0x08);
    let mut spectra_checked = 0usize;
    for instance in 0..20 {
        let d = 1 + instance % 2;
        // build the same function twice: two different paddings of a random
        // realization, independently Kalman-minimized
        let base = sampling::random_descriptor(&mut rng, d, 3);
        let r1 = kalman_minimize(&padded(&mut rng, &base, 2)).realization;
        let r2 = kalman_minimize(&padded(&mut rng, &base, 3)).realization;
        let degree = if d == 1 { 8 } else { 6 };
        let report =
            spectral::domain_agreement(&r1, &r2, degree, 200, 0x0800 + instance as u64).unwrap();
        assert!(
            report.disagreements.is_empty(),
            "instance {instance}: {} invertibility disagreements",
            report.disagreements.len()
        );
        assert_eq!(report.agreements, 200);
        if d == 1 {
            assert_eq!(report.spectra_match, Some(true), "instance {instance}");
            spectra_checked += 1;
        }
    }

    // expression pairs defining the same function through different trees
    for (lhs, rhs) in [
        ("z1 * inv(1 - z1)", "inv(1 - z1) - 1"),
        ("inv(1 - z1) * inv(1 - z1)", "inv((1 - z1) * (1 - z1))"),
    ] {
        let a = expr::compile(&expr::parse(lhs).unwrap(), 1).unwrap();
        let b = expr::compile(&expr::parse(rhs).unwrap(), 1).unwrap();
        let ra = kalman_minimize(&descriptor_from_fm(&a)).realization;
        let rb = kalman_minimize(&descriptor_from_fm(&b)).realization;
        let report = spectral::domain_agreement(&ra, &rb, 8, 200, 0x0850).unwrap();
        assert!(report.fully_agrees(), "{lhs} vs {rhs}: {report:?}");
        spectra_checked += 1;
    }
    println!(
        "criterion 08 PASS: 20 instances + 2 expression pairs agree; {spectra_checked} one-variable spectra matched"
    );
}

fn padded(
    rng: &mut rand_chacha::ChaCha8Rng,
    base: &DescriptorRealization,
    pad_dim: usize,
) -> DescriptorRealization {
    let junk: Vec<CMatrix> = (0..base.d())
        .map(|_| sampling::gaussian_matrix(rng, pad_dim, pad_dim))
        .collect();
    base.pad_with_block(&junk, &CVector::zeros(pad_dim), &CVector::zeros(pad_dim))
        .unwrap()
}

/// Criterion 9: for 10 compact-truncation tuples at levels 1..3, Gaussian
/// sampling yields an invertible-pencil fraction of at least 0.99 over 500
/// trials, and the seeded singular parameter on a random line is recovered
/// within 1e-8.
#[test]
fn criterion_09_zariski_probe() {
    let mut rng = sampling::rng(0x09);
    let mut lines_checked = 0usize;
    for tuple_idx in 0..10 {
        let d = 1 + tuple_idx % 2;
        let level = 1 + tuple_idx % 3;
        // mix nilpotent truncations with generic contractive tuples
        let a: Vec<CMatrix> = if tuple_idx % 2 == 0 {
            let s = sampling::random_series(&mut rng, d, 3);
            let opts = ConstructionOptions::default();
            let (r, _) = entire::quasinilpotent_nc_with(&s, 3, opts).unwrap();
            r.a().to_vec()
        } else {
            let dim = 4 + tuple_idx;
            let raw: Vec<CMatrix> = (0..d)
                .map(|_| sampling::gaussian_matrix(&mut rng, dim, dim))
                .collect();
            let norm = ncrealize::realization::tuple_col_norm(&raw);
            raw.into_iter()
                .map(|m| m / Complex64::new(norm, 0.0))
                .collect()
        };

        let report = spectral::zariski_probe(&a, d, level, 500, 0x0900 + tuple_idx as u64).unwrap();
        assert!(
            report.fraction >= 0.99,
            "tuple {tuple_idx}: invertible fraction {}",
            report.fraction
        );

        // seed a singular point on the line t -> t X1 and recover it
        let x1 = sampling::gaussian_tuple(&mut rng, d, level);
        let m = spectral::kron_state(&a, &x1);
        let eigs = linalg::eigenvalues(&m).unwrap();
        let floor = 1e-9 * linalg::op_norm(&m).max(1.0);
        if let Some(mu) = eigs
            .iter()
            .filter(|e| e.norm() > floor)
            .max_by(|p, q| p.norm().partial_cmp(&q.norm()).unwrap())
        {
            let seeded = mu.finv();
            let params =
                spectral::singular_params_on_line(&a, &MatrixTuple::zeros(d, level), &x1).unwrap();
            let best = params
                .iter()
                .map(|p| (p - seeded).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(
                best < 1e-8,
                "tuple {tuple_idx}: seeded {seeded} missed by {best:.3e}"
            );
            lines_checked += 1;
        }
    }
    assert!(lines_checked >= 4, "too few spectral tuples sampled");
    println!("criterion 09 PASS: 10 tuples at fraction >= 0.99; {lines_checked} seeded line points recovered");
}

/// Criterion 10: the Hadamard-type radius estimator lands within 5% on the
/// closed forms at degree 40 (geometric R=1, 2^n z^n R=1/2, e^z diverging)
/// and within 5% of 1/sqrt(2) for the two-variable all-ones series.
#[test]
fn criterion_10_radius_formula() {
    let bound = 40usize;

    let geometric = TruncatedSeries::from_coeffs(
        1,
        bound,
        (0..=bound).map(|n| (Word::new(vec![1u32; n]), c(1.0))),
    )
    .unwrap();
    let r_geo = geometric.radius_estimate().radius;
    assert!((r_geo - 1.0).abs() / 1.0 <= 0.05, "geometric: {r_geo}");

    let two_n = TruncatedSeries::from_coeffs(
        1,
        bound,
        (0..=bound).map(|n| (Word::new(vec![1u32; n]), c(2f64.powi(n as i32)))),
    )
    .unwrap();
    let r_two = two_n.radius_estimate().radius;
    assert!((r_two - 0.5).abs() / 0.5 <= 0.05, "2^n z^n: {r_two}");

    let expz = |bound: usize| {
        let mut fact = 1.0f64;
        let mut entries = vec![(Word::empty(), c(1.0))];
        for n in 1..=bound {
            fact *= n as f64;
            entries.push((Word::new(vec![1u32; n]), c(1.0 / fact)));
        }
        TruncatedSeries::from_coeffs(1, bound, entries).unwrap()
    };
    let r20 = expz(20).radius_estimate().radius;
    let r40 = expz(40).radius_estimate().radius;
    assert!(
        r40 > r20 && r40 > 4.0,
        "e^z estimate should diverge with the bound: {r20} -> {r40}"
    );

    let all_ones_bound = 12usize; // 2^n words per degree
    let all_ones = TruncatedSeries::from_coeffs(
        2,
        all_ones_bound,
        Word::all_up_to_length(2, all_ones_bound)
            .into_iter()
            .map(|w| (w, c(1.0))),
    )
    .unwrap();
    let r_ones = all_ones.radius_estimate().radius;
    let target = 1.0 / 2f64.sqrt();
    assert!(
        (r_ones - target).abs() / target <= 0.05,
        "d=2 all ones: {r_ones} vs {target}"
    );

    println!(
        "criterion 10 PASS: radii {r_geo:.4}, {r_two:.4}, e^z {r20:.2}->{r40:.2}, d=2 {r_ones:.4}"
    );
}
