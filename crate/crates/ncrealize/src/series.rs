//! Truncated free formal power series over `C<<z_1, .., z_d>>`.
//!
//! A `TruncatedSeries` stores coefficients up to a degree bound in a map
//! keyed by words in graded-lex order. Everything here is computed by direct
//! coefficient manipulation, with no linear algebra: this module is the
//! ground-truth oracle against which realization computations are checked.
//!
//! Binary operations truncate to the minimum of the two degree bounds; we
//! never fabricate coefficients that neither operand stores.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::word::Word;

/// Coefficients with magnitude below this are pruned from storage after
/// arithmetic. Small enough not to disturb 1e-10 level assertions.
pub const PRUNE_EPS: f64 = 1e-14;

/// Default tolerance on `|f(0)|` below which a series is treated as
/// non-invertible.
pub const INVERSION_TOL: f64 = 1e-12;

/// A free formal power series truncated at a degree bound.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    d: usize,
    degree_bound: usize,
    coeffs: BTreeMap<Word, Complex64>,
}

impl TruncatedSeries {
    /// The zero series in `d` variables.
    pub fn zero(d: usize, degree_bound: usize) -> Self {
        assert!(d >= 1, "need at least one variable");
        TruncatedSeries {
            d,
            degree_bound,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant series `value`.
    pub fn constant(d: usize, degree_bound: usize, value: Complex64) -> Self {
        let mut s = Self::zero(d, degree_bound);
        s.insert_raw(Word::empty(), value);
        s
    }

    /// The unit series `1`.
    pub fn one(d: usize, degree_bound: usize) -> Self {
        Self::constant(d, degree_bound, Complex64::new(1.0, 0.0))
    }

    /// The monomial `z^w` with coefficient 1 (the zero series when `w`
    /// exceeds the degree bound).
    pub fn monomial(d: usize, degree_bound: usize, w: Word) -> Result<Self> {
        w.validate(d)?;
        let mut s = Self::zero(d, degree_bound);
        s.insert_raw(w, Complex64::new(1.0, 0.0));
        Ok(s)
    }

    /// Builds a series from explicit `(word, coefficient)` pairs. Unlike
    /// arithmetic results, constructed data is stored verbatim: tiny
    /// coefficients (entire-function tails) are not pruned.
    pub fn from_coeffs(
        d: usize,
        degree_bound: usize,
        entries: impl IntoIterator<Item = (Word, Complex64)>,
    ) -> Result<Self> {
        let mut s = Self::zero(d, degree_bound);
        for (w, v) in entries {
            w.validate(d)?;
            s.insert_raw(w, v);
        }
        Ok(s)
    }

    /// Stores a coefficient verbatim, dropping only exact zeros and words
    /// beyond the bound.
    fn insert_raw(&mut self, w: Word, v: Complex64) {
        if w.len() <= self.degree_bound && v != Complex64::new(0.0, 0.0) {
            self.coeffs.insert(w, v);
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// Coefficient of `w` (zero if absent or beyond the bound).
    pub fn coeff(&self, w: &Word) -> Complex64 {
        self.coeffs
            .get(w)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Sets a coefficient, pruning values below `PRUNE_EPS`.
    pub fn set_coeff(&mut self, w: Word, v: Complex64) {
        debug_assert!(w.len() <= self.degree_bound);
        if v.norm() < PRUNE_EPS {
            self.coeffs.remove(&w);
        } else {
            self.coeffs.insert(w, v);
        }
    }

    /// Stored coefficients in graded-lex word order.
    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    fn check_same_alphabet(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::AlphabetMismatch {
                expected: self.d,
                found: other.d,
            });
        }
        Ok(())
    }

    /// Coefficient-wise sum, truncated to the smaller degree bound.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_alphabet(other)?;
        let bound = self.degree_bound.min(other.degree_bound);
        let mut out = Self::zero(self.d, bound);
        for (w, v) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if w.len() <= bound {
                let cur = out.coeff(w);
                out.set_coeff(w.clone(), cur + v);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.d, self.degree_bound);
        for (w, v) in &self.coeffs {
            out.set_coeff(w.clone(), -v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::zero(self.d, self.degree_bound);
        for (w, v) in &self.coeffs {
            out.set_coeff(w.clone(), factor * v);
        }
        out
    }

    /// Cauchy product on the free monoid: `(fg)_w = sum_{w=uv} f_u g_v`,
    /// truncated to the smaller degree bound.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_alphabet(other)?;
        let bound = self.degree_bound.min(other.degree_bound);
        let mut out = Self::zero(self.d, bound);
        for (u, fu) in &self.coeffs {
            if u.len() > bound {
                continue;
            }
            for (v, gv) in &other.coeffs {
                if u.len() + v.len() > bound {
                    continue;
                }
                let w = u.concat(v);
                let cur = out.coeff(&w);
                out.set_coeff(w, cur + fu * gv);
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse by degree-graded recursion:
    /// `g_∅ = 1/f_∅`, `g_w = -(1/f_∅) sum_{w=uv, u≠∅} f_u g_v`.
    ///
    /// ```
    /// use ncrealize::{TruncatedSeries, Word};
    /// use num_complex::Complex64;
    ///
    /// let one = Complex64::new(1.0, 0.0);
    /// let f = TruncatedSeries::from_coeffs(1, 8, [
    ///     (Word::empty(), one),
    ///     (Word::from([1]), -one),
    /// ]).unwrap();
    /// let geometric = f.invert().unwrap();
    /// assert!((geometric.coeff(&Word::from([1, 1, 1])) - one).norm() < 1e-12);
    /// ```
    pub fn invert(&self) -> Result<Self> {
        self.invert_with_tolerance(INVERSION_TOL)
    }

    pub fn invert_with_tolerance(&self, tolerance: f64) -> Result<Self> {
        let f0 = self.coeff(&Word::empty());
        if f0.norm() <= tolerance {
            return Err(Error::NotInvertibleAtZero {
                magnitude: f0.norm(),
                tolerance,
            });
        }
        let inv0 = Complex64::new(1.0, 0.0) / f0;
        let mut out = Self::zero(self.d, self.degree_bound);
        out.set_coeff(Word::empty(), inv0);
        for w in Word::all_up_to_length(self.d, self.degree_bound) {
            if w.is_empty() {
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (u, v) in w.proper_prefix_splits() {
                let fu = self.coeff(&u);
                if fu.norm() == 0.0 {
                    continue;
                }
                acc += fu * out.coeff(&v);
            }
            if acc.norm() > 0.0 {
                out.set_coeff(w, -inv0 * acc);
            }
        }
        Ok(out)
    }

    /// Backward shift: left strips a leading letter (`result_w = f_{jw}`),
    /// right strips a trailing one (`result_w = f_{wj}`). The degree bound
    /// drops by one.
    pub fn backward_shift(&self, j: u32, side: ShiftSide) -> Result<Self> {
        if j == 0 || j as usize > self.d {
            return Err(Error::LetterOutOfRange {
                letter: j,
                d: self.d,
            });
        }
        let bound = self.degree_bound.saturating_sub(1);
        let mut out = Self::zero(self.d, bound);
        for (w, v) in &self.coeffs {
            let letters = w.letters();
            match side {
                ShiftSide::Left => {
                    if letters.first() == Some(&j) {
                        out.set_coeff(Word::new(&letters[1..]), *v);
                    }
                }
                ShiftSide::Right => {
                    if letters.last() == Some(&j) {
                        out.set_coeff(Word::new(&letters[..letters.len() - 1]), *v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Transpose: `result_w = f_{w^t}`. An involutive anti-isomorphism.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.d, self.degree_bound);
        for (w, v) in &self.coeffs {
            out.set_coeff(w.transpose(), *v);
        }
        out
    }

    /// Maximum absolute coefficient difference up to the shared degree bound.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let bound = self.degree_bound.min(other.degree_bound);
        let mut dist: f64 = 0.0;
        for (w, v) in &self.coeffs {
            if w.len() <= bound {
                dist = dist.max((v - other.coeff(w)).norm());
            }
        }
        for (w, v) in &other.coeffs {
            if w.len() <= bound {
                dist = dist.max((v - self.coeff(w)).norm());
            }
        }
        dist
    }

    /// Per-degree Hadamard data and a radius-of-convergence estimate.
    ///
    /// Returns `r_n = (sum_{|w|=n} |f_w|^2)^{1/2n}` for `1 <= n <= degree_bound`
    /// and the estimate `1 / max(r_n over the tail window)`, where the window
    /// is the upper half of the available degrees. The formula being estimated
    /// is a limsup over all n; a finite-data estimator has to pick a window,
    /// and the tail half discounts low-degree transients.
    pub fn radius_estimate(&self) -> RadiusEstimate {
        let n_max = self.degree_bound;
        let mut sums = vec![0.0f64; n_max + 1];
        for (w, v) in &self.coeffs {
            sums[w.len()] += v.norm_sqr();
        }
        let per_degree: Vec<f64> = (1..=n_max)
            .map(|n| {
                if sums[n] == 0.0 {
                    0.0
                } else {
                    sums[n].powf(1.0 / (2.0 * n as f64))
                }
            })
            .collect();
        let window_start = n_max / 2;
        let tail_max = per_degree
            .iter()
            .skip(window_start.saturating_sub(1))
            .fold(0.0f64, |m, &r| m.max(r));
        let radius = if tail_max == 0.0 {
            f64::INFINITY
        } else {
            1.0 / tail_max
        };
        RadiusEstimate { per_degree, radius }
    }
}

/// Which side a backward shift strips a letter from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftSide {
    Left,
    Right,
}

/// Per-degree root data and the tail-window radius estimate.
#[derive(Clone, Debug)]
pub struct RadiusEstimate {
    /// `r_n` for `n = 1, .., degree_bound` (index 0 holds `r_1`).
    pub per_degree: Vec<f64>,
    /// `1 / max` over the tail window; `+inf` when every window entry is zero.
    pub radius: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn geometric_1d(bound: usize) -> TruncatedSeries {
        // sum_n z1^n
        TruncatedSeries::from_coeffs(
            1,
            bound,
            (0..=bound).map(|n| (Word::new(vec![1u32; n]), c(1.0))),
        )
        .unwrap()
    }

    #[test]
    fn add_examples() {
        let one_plus_z = TruncatedSeries::from_coeffs(
            1,
            4,
            [(Word::empty(), c(1.0)), (Word::from([1]), c(1.0))],
        )
        .unwrap();
        let z = TruncatedSeries::monomial(1, 4, Word::from([1])).unwrap();
        let s = one_plus_z.add(&z).unwrap();
        assert_eq!(s.coeff(&Word::empty()), c(1.0));
        assert_eq!(s.coeff(&Word::from([1])), c(2.0));

        let zero = TruncatedSeries::zero(1, 4);
        assert_eq!(one_plus_z.add(&zero).unwrap(), one_plus_z);

        // distinct words stay separate
        let z12 = TruncatedSeries::monomial(2, 4, Word::from([1, 2])).unwrap();
        let z21 = TruncatedSeries::monomial(2, 4, Word::from([2, 1])).unwrap();
        let s = z12.add(&z21).unwrap();
        assert_eq!(s.coeff(&Word::from([1, 2])), c(1.0));
        assert_eq!(s.coeff(&Word::from([2, 1])), c(1.0));
        assert_eq!(s.support_len(), 2);
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let f = TruncatedSeries::one(1, 3);
        let g = TruncatedSeries::one(2, 3);
        assert!(matches!(f.add(&g), Err(Error::AlphabetMismatch { .. })));
        assert!(matches!(f.mul(&g), Err(Error::AlphabetMismatch { .. })));
    }

    #[test]
    fn mul_is_noncommutative_on_monomials() {
        let z1 = TruncatedSeries::monomial(2, 4, Word::from([1])).unwrap();
        let z2 = TruncatedSeries::monomial(2, 4, Word::from([2])).unwrap();
        let p = z1.mul(&z2).unwrap();
        let q = z2.mul(&z1).unwrap();
        assert_eq!(p.coeff(&Word::from([1, 2])), c(1.0));
        assert_eq!(p.coeff(&Word::from([2, 1])), c(0.0));
        assert_eq!(q.coeff(&Word::from([2, 1])), c(1.0));
        assert_ne!(p, q);
    }

    #[test]
    fn mul_unit() {
        let f = TruncatedSeries::from_coeffs(
            2,
            3,
            [
                (Word::empty(), c(2.0)),
                (Word::from([1]), c(-1.0)),
                (Word::from([2, 1]), c(0.5)),
            ],
        )
        .unwrap();
        let one = TruncatedSeries::one(2, 3);
        assert_eq!(one.mul(&f).unwrap(), f);
        assert_eq!(f.mul(&one).unwrap(), f);
    }

    #[test]
    fn geometric_squared_by_direct_convolution() {
        // (sum z^n)^2 should equal sum (n+1) z^n; verify against a direct
        // convolution loop rather than the closed form alone.
        let bound = 12;
        let g = geometric_1d(bound);
        let sq = g.mul(&g).unwrap();
        for n in 0..=bound {
            let mut conv = 0.0;
            for k in 0..=n {
                let a = if k <= bound { 1.0 } else { 0.0 };
                let b = if n - k <= bound { 1.0 } else { 0.0 };
                conv += a * b;
            }
            let w = Word::new(vec![1u32; n]);
            assert_eq!(sq.coeff(&w), c(conv));
            assert_eq!(sq.coeff(&w), c((n + 1) as f64));
        }
    }

    #[test]
    fn invert_geometric() {
        let one_minus_z = TruncatedSeries::from_coeffs(
            1,
            8,
            [(Word::empty(), c(1.0)), (Word::from([1]), c(-1.0))],
        )
        .unwrap();
        let inv = one_minus_z.invert().unwrap();
        for n in 0..=8 {
            assert!((inv.coeff(&Word::new(vec![1u32; n])) - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn invert_constant() {
        let two = TruncatedSeries::constant(1, 3, c(2.0));
        let inv = two.invert().unwrap();
        assert_eq!(inv.coeff(&Word::empty()), c(0.5));
        assert_eq!(inv.support_len(), 1);
    }

    #[test]
    fn invert_two_variable_all_ones() {
        // 1/(1 - z1 - z2) has every coefficient 1: each word has exactly one
        // factorization into letters.
        let f = TruncatedSeries::from_coeffs(
            2,
            5,
            [
                (Word::empty(), c(1.0)),
                (Word::from([1]), c(-1.0)),
                (Word::from([2]), c(-1.0)),
            ],
        )
        .unwrap();
        let inv = f.invert().unwrap();
        for w in Word::all_up_to_length(2, 5) {
            assert!((inv.coeff(&w) - c(1.0)).norm() < 1e-12, "word {:?}", w);
        }
        // check it really is the inverse
        let prod = f.mul(&inv).unwrap();
        assert!(prod.max_coeff_distance(&TruncatedSeries::one(2, 5)) < 1e-12);
    }

    #[test]
    fn invert_rejects_vanishing_constant_term() {
        let z = TruncatedSeries::monomial(1, 4, Word::from([1])).unwrap();
        assert!(matches!(z.invert(), Err(Error::NotInvertibleAtZero { .. })));
    }

    #[test]
    fn backward_shift_examples() {
        let z12 = TruncatedSeries::monomial(2, 4, Word::from([1, 2])).unwrap();
        let left = z12.backward_shift(1, ShiftSide::Left).unwrap();
        assert_eq!(left.coeff(&Word::from([2])), c(1.0));
        assert_eq!(left.support_len(), 1);
        assert_eq!(left.degree_bound(), 3);

        let right = z12.backward_shift(2, ShiftSide::Right).unwrap();
        assert_eq!(right.coeff(&Word::from([1])), c(1.0));
        assert_eq!(right.support_len(), 1);

        let annihilated = z12.backward_shift(2, ShiftSide::Left).unwrap();
        assert_eq!(annihilated.support_len(), 0);
    }

    #[test]
    fn transpose_examples() {
        let z12 = TruncatedSeries::monomial(2, 4, Word::from([1, 2])).unwrap();
        let t = z12.transpose();
        assert_eq!(t.coeff(&Word::from([2, 1])), c(1.0));
        assert_eq!(t.coeff(&Word::from([1, 2])), c(0.0));

        // palindromic support is fixed
        let pal = TruncatedSeries::from_coeffs(
            2,
            4,
            [(Word::from([1, 2, 1]), c(3.0)), (Word::from([2]), c(-1.0))],
        )
        .unwrap();
        assert_eq!(pal.transpose(), pal);

        assert_eq!(z12.transpose().transpose(), z12);
    }

    #[test]
    fn shift_commutes_with_transpose() {
        // transpose(L_j* f) = R_j* transpose(f)
        let mut rng = crate::sampling::rng(7);
        for d in 1..=3usize {
            let f = crate::sampling::random_series(&mut rng, d, 4);
            for j in 1..=d as u32 {
                let lhs = f.backward_shift(j, ShiftSide::Left).unwrap().transpose();
                let rhs = f.transpose().backward_shift(j, ShiftSide::Right).unwrap();
                assert!(lhs.max_coeff_distance(&rhs) == 0.0);
            }
        }
    }

    #[test]
    fn radius_geometric_is_one() {
        let g = geometric_1d(40);
        let est = g.radius_estimate();
        for r in &est.per_degree {
            assert!((r - 1.0).abs() < 1e-12);
        }
        assert!((est.radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radius_two_variable_all_ones() {
        // sum over all words: 2^n words of length n, each coefficient 1,
        // so r_n = 2^{1/2} and R = 1/sqrt(2).
        let bound = 12;
        let f = TruncatedSeries::from_coeffs(
            2,
            bound,
            Word::all_up_to_length(2, bound)
                .into_iter()
                .map(|w| (w, c(1.0))),
        )
        .unwrap();
        let est = f.radius_estimate();
        for r in &est.per_degree {
            assert!((r - 2f64.sqrt()).abs() < 1e-12);
        }
        assert!((est.radius - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn radius_factorial_decay_diverges_with_bound() {
        let coeffs = |bound: usize| {
            let mut fact = 1.0f64;
            let mut entries = vec![(Word::empty(), c(1.0))];
            for n in 1..=bound {
                fact *= n as f64;
                entries.push((Word::new(vec![1u32; n]), c(1.0 / fact)));
            }
            TruncatedSeries::from_coeffs(1, bound, entries).unwrap()
        };
        let r20 = coeffs(20).radius_estimate().radius;
        let r40 = coeffs(40).radius_estimate().radius;
        assert!(r40 > 1.5 * r20, "estimate should diverge: {r20} vs {r40}");
        // Stirling: r_n = (1/n!)^{1/n} ~ e/n decays to 0
        let est = coeffs(40).radius_estimate();
        assert!(est.per_degree[39] < est.per_degree[9]);
    }

    #[test]
    fn radius_of_zero_series_is_infinite() {
        let z = TruncatedSeries::zero(2, 10);
        assert!(z.radius_estimate().radius.is_infinite());
    }

    #[test]
    fn radius_one_variable_hadamard_within_5_percent() {
        // closed forms: geometric R=1, 2^n z^n R=1/2
        let bound = 40;
        let geo = geometric_1d(bound);
        assert!((geo.radius_estimate().radius - 1.0).abs() <= 0.05);
        let two_n = TruncatedSeries::from_coeffs(
            1,
            bound,
            (0..=bound).map(|n| (Word::new(vec![1u32; n]), c(2f64.powi(n as i32)))),
        )
        .unwrap();
        assert!((two_n.radius_estimate().radius - 0.5).abs() <= 0.025);
    }

    #[test]
    fn mul_invert_gives_unit_for_random_series() {
        let mut rng = crate::sampling::rng(11);
        for _ in 0..20 {
            let d = 1 + (crate::sampling::uniform(&mut rng) * 3.0) as usize;
            let mut f = crate::sampling::random_series(&mut rng, d.min(3), 4);
            // force |f(0)| >= 0.5
            f.set_coeff(Word::empty(), c(0.5 + crate::sampling::uniform(&mut rng)));
            let inv = f.invert().unwrap();
            let prod = f.mul(&inv).unwrap();
            let one = TruncatedSeries::one(f.d(), 4);
            assert!(prod.max_coeff_distance(&one) < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ring_laws_on_truncations(seed in 0u64..1000) {
            let mut rng = crate::sampling::rng(seed);
            let d = 2;
            let f = crate::sampling::random_series(&mut rng, d, 3);
            let g = crate::sampling::random_series(&mut rng, d, 3);
            let h = crate::sampling::random_series(&mut rng, d, 3);

            let add_assoc_l = f.add(&g).unwrap().add(&h).unwrap();
            let add_assoc_r = f.add(&g.add(&h).unwrap()).unwrap();
            prop_assert!(add_assoc_l.max_coeff_distance(&add_assoc_r) < 1e-12);

            let mul_assoc_l = f.mul(&g).unwrap().mul(&h).unwrap();
            let mul_assoc_r = f.mul(&g.mul(&h).unwrap()).unwrap();
            prop_assert!(mul_assoc_l.max_coeff_distance(&mul_assoc_r) < 1e-10);

            let distr_l = f.mul(&g.add(&h).unwrap()).unwrap();
            let distr_r = f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap();
            prop_assert!(distr_l.max_coeff_distance(&distr_r) < 1e-10);
        }

        #[test]
        fn transpose_is_antihomomorphism(seed in 0u64..1000) {
            let mut rng = crate::sampling::rng(seed);
            let f = crate::sampling::random_series(&mut rng, 2, 3);
            let g = crate::sampling::random_series(&mut rng, 2, 3);
            let lhs = f.mul(&g).unwrap().transpose();
            let rhs = g.transpose().mul(&f.transpose()).unwrap();
            // the two routes sum identical products in different orders
            prop_assert!(lhs.max_coeff_distance(&rhs) < 1e-13);
        }
    }
}
