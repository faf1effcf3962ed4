//! Weight combinatorics for U_{n+1} × U_n: dominance, interlacing, the critical
//! set, slope predicates and the decomposition in the fundamental-pair basis.

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{CoeffError, PadicNumber, PadicScalar, Valuation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("weight for n = {n} needs {expected_mu} entries in mu and {expected_lambda} in lambda")]
    Shape { n: usize, expected_mu: usize, expected_lambda: usize },
    #[error("rank parameter n must be at least 1")]
    ZeroRank,
    #[error("refinement has no normalised eigenvalues")]
    MissingNormalization,
    #[error("refinement is of very small slope but not of non-critical slope")]
    SlopeInconsistency,
    #[error("alpha_p differs from beta_p * gamma_p")]
    EigenvalueMismatch,
    #[error("affinoid weight needs between 1 and {max} directions, found {found}")]
    DirectionCount { found: usize, max: usize },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// A pair (μ, λ) of integer vectors of lengths n+1 and n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub n: usize,
    pub mu: Vec<i64>,
    pub lambda: Vec<i64>,
}

/// Inclusive range of twists j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CritRange {
    pub min: i64,
    pub max: i64,
}

impl CritRange {
    pub fn width(&self) -> i64 {
        self.max - self.min
    }
    pub fn len(&self) -> usize {
        (self.max - self.min + 1) as usize
    }
    pub fn is_empty(&self) -> bool {
        self.max < self.min
    }
    pub fn contains(&self, j: i64) -> bool {
        self.min <= j && j <= self.max
    }
    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.min..=self.max
    }
}

/// Exponents of u_{i+1,i} (i = 0..n) and v_{i,i} (i = 1..n).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentVector {
    pub c: Vec<i64>,
    pub d: Vec<i64>,
}

impl ExponentVector {
    pub fn add(&self, other: &Self) -> Self {
        ExponentVector {
            c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect(),
            d: self.d.iter().zip(&other.d).map(|(a, b)| a + b).collect(),
        }
    }

    /// Exponents after twisting λ by j: d_i += j, c_i −= j for i < n.
    pub fn twist(&self, j: i64) -> Self {
        let n = self.d.len();
        let mut c = self.c.clone();
        for ci in c.iter_mut().take(n) {
            *ci -= j;
        }
        ExponentVector { c, d: self.d.iter().map(|x| x + j).collect() }
    }

    /// Reassembles the weight Σ c_i(β_{i+1}, α_i) + Σ d_i(β_i, α_i).
    pub fn weight(&self) -> Weight {
        let n = self.d.len();
        let mut mu = vec![0i64; n + 1];
        let mut lambda = vec![0i64; n];
        for (i, &ci) in self.c.iter().enumerate() {
            let (b, a) = (fundamental(n + 1, i + 1), fundamental(n, i));
            add_scaled(&mut mu, &b, ci);
            add_scaled(&mut lambda, &a, ci);
        }
        for (idx, &di) in self.d.iter().enumerate() {
            let i = idx + 1;
            add_scaled(&mut mu, &fundamental(n + 1, i), di);
            add_scaled(&mut lambda, &fundamental(n, i), di);
        }
        Weight { n, mu, lambda }
    }
}

fn fundamental(len: usize, k: usize) -> Vec<i64> {
    (0..len).map(|i| if i < k { 1 } else { 0 }).collect()
}

fn add_scaled(acc: &mut [i64], v: &[i64], s: i64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += s * b;
    }
}

impl Weight {
    pub fn new(n: usize, mu: Vec<i64>, lambda: Vec<i64>) -> Result<Self, WeightError> {
        let w = Weight { n, mu, lambda };
        w.validate()?;
        Ok(w)
    }

    pub fn zero(n: usize) -> Self {
        Weight { n, mu: vec![0; n + 1], lambda: vec![0; n] }
    }

    pub fn validate(&self) -> Result<(), WeightError> {
        if self.n == 0 {
            return Err(WeightError::ZeroRank);
        }
        if self.mu.len() != self.n + 1 || self.lambda.len() != self.n {
            return Err(WeightError::Shape { n: self.n, expected_mu: self.n + 1, expected_lambda: self.n });
        }
        Ok(())
    }

    pub fn is_dominant(&self) -> bool {
        self.mu.windows(2).all(|w| w[0] >= w[1]) && self.lambda.windows(2).all(|w| w[0] >= w[1])
    }

    /// μ_1 ≥ λ_1 ≥ μ_2 ≥ … ≥ λ_n ≥ μ_{n+1}.
    pub fn interlaces(&self) -> bool {
        (0..self.n).all(|i| self.mu[i] >= self.lambda[i] && self.lambda[i] >= self.mu[i + 1])
    }

    /// −μ_{n+1} ≥ λ_1 ≥ −μ_n ≥ … ≥ λ_n ≥ −μ_1, the chain of the branching theorem.
    pub fn satisfies_branching_chain(&self) -> bool {
        self.twisted(0).dual_mu_chain_holds()
    }

    fn dual_mu_chain_holds(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| -self.mu[n - i] >= self.lambda[i] && self.lambda[i] >= -self.mu[n - 1 - i])
    }

    /// (μ, λ + j).
    pub fn twisted(&self, j: i64) -> Weight {
        Weight { n: self.n, mu: self.mu.clone(), lambda: self.lambda.iter().map(|l| l + j).collect() }
    }

    pub fn scaled(&self, k: i64) -> Weight {
        Weight { n: self.n, mu: self.mu.iter().map(|m| m * k).collect(), lambda: self.lambda.iter().map(|l| l * k).collect() }
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight {
            n: self.n,
            mu: self.mu.iter().zip(&other.mu).map(|(a, b)| a + b).collect(),
            lambda: self.lambda.iter().zip(&other.lambda).map(|(a, b)| a + b).collect(),
        }
    }

    /// Integers j satisfying the displayed chain
    /// −μ_{n+1} ≥ λ_1 + j ≥ −μ_n ≥ λ_2 + j ≥ … ≥ λ_n + j ≥ −μ_1.
    pub fn crit_set(&self) -> Option<CritRange> {
        let n = self.n;
        // Every link of the chain involves some λ_i + j, so each gives one bound on j.
        let mut lo = i64::MIN;
        let mut hi = i64::MAX;
        for i in 0..n {
            hi = hi.min(-self.mu[n - i] - self.lambda[i]);
            lo = lo.max(-self.mu[n - 1 - i] - self.lambda[i]);
        }
        if lo > hi {
            return None;
        }
        Some(CritRange { min: lo, max: hi })
    }

    /// h = j_max − j_min on a nonempty critical set.
    pub fn h(&self) -> Option<i64> {
        self.crit_set().map(|r| r.width())
    }

    /// Solves Σ c_i(β_{i+1}, α_i) + Σ d_i(β_i, α_i) = (μ, λ) by exact elimination.
    pub fn exponent_vector(&self) -> ExponentVector {
        let n = self.n;
        let dim = 2 * n + 1;
        // Columns: c_0..c_n then d_1..d_n; rows: μ_1..μ_{n+1}, λ_1..λ_n.
        let mut columns: Vec<Vec<i64>> = Vec::with_capacity(dim);
        for i in 0..=n {
            let mut col = fundamental(n + 1, i + 1);
            col.extend(fundamental(n, i));
            columns.push(col);
        }
        for i in 1..=n {
            let mut col = fundamental(n + 1, i);
            col.extend(fundamental(n, i));
            columns.push(col);
        }
        let mut rhs: Vec<i64> = self.mu.clone();
        rhs.extend(&self.lambda);
        let mut a: Vec<Vec<Rational64>> = (0..dim)
            .map(|r| {
                let mut row: Vec<Rational64> = columns.iter().map(|c| Rational64::from_integer(c[r])).collect();
                row.push(Rational64::from_integer(rhs[r]));
                row
            })
            .collect();
        for col in 0..dim {
            let pivot = (col..dim).find(|&r| !a[r][col].is_zero()).expect("basis is unimodular");
            a.swap(col, pivot);
            let inv = Rational64::one() / a[col][col];
            for x in a[col].iter_mut() {
                *x *= inv;
            }
            for r in 0..dim {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col];
                    let pivot_row = a[col].clone();
                    for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
        let sol: Vec<i64> = a.iter().map(|row| row[dim].to_integer()).collect();
        ExponentVector { c: sol[..=n].to_vec(), d: sol[n + 1..].to_vec() }
    }

    /// Exponent Σ_i μ_i (n+1−i) + Σ_i λ_i (n+1−i) of p in (μ,λ)(t_p).
    pub fn t_p_exponent(&self) -> i64 {
        let n = self.n as i64;
        let a: i64 = self.mu.iter().enumerate().map(|(i, m)| m * (n - i as i64)).sum();
        let b: i64 = self.lambda.iter().enumerate().map(|(i, l)| l * (n + 1 - (i as i64 + 1))).sum();
        a + b
    }

    /// Exponent of p in μ(diag(p^n, …, p, 1)).
    pub fn mu_t_exponent(&self) -> i64 {
        let n = self.n as i64;
        self.mu.iter().enumerate().map(|(i, m)| m * (n - i as i64)).sum()
    }

    /// Exponent of p in λ(diag(p^n, …, p)).
    pub fn lambda_t_exponent(&self) -> i64 {
        let n = self.n as i64;
        self.lambda.iter().enumerate().map(|(i, l)| l * (n - i as i64)).sum()
    }

    /// min_i(μ_i − μ_{i+1} + 1), the non-critical slope bound.
    pub fn noncritical_bound(&self) -> i64 {
        self.mu.windows(2).map(|w| w[0] - w[1] + 1).min().unwrap_or(i64::MAX)
    }
}

/// An affinoid disc of weights: center + Σ w_k·direction_k with v(w_k) ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffinoidWeight {
    pub center: Weight,
    pub directions: Vec<Weight>,
}

impl AffinoidWeight {
    pub fn new(center: Weight, directions: Vec<Weight>) -> Result<Self, WeightError> {
        center.validate()?;
        if directions.is_empty() || directions.len() > 2 * center.n + 1 {
            return Err(WeightError::DirectionCount { found: directions.len(), max: 2 * center.n + 1 });
        }
        for d in &directions {
            d.validate()?;
            if d.n != center.n {
                return Err(WeightError::Shape { n: center.n, expected_mu: center.n + 1, expected_lambda: center.n });
            }
        }
        Ok(AffinoidWeight { center, directions })
    }

    /// The single direction λ ↦ λ + w·(1, …, 1).
    pub fn parallel(center: Weight) -> Result<Self, WeightError> {
        let n = center.n;
        Self::new(center, vec![Weight { n, mu: vec![0; n + 1], lambda: vec![1; n] }])
    }

    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    /// The weight at integer coordinates w.
    pub fn at(&self, w: &[i64]) -> Result<Weight, WeightError> {
        if w.len() != self.directions.len() {
            return Err(CoeffError::Arity { expected: self.directions.len(), found: w.len() }.into());
        }
        let mut out = self.center.clone();
        for (d, &k) in self.directions.iter().zip(w) {
            out = out.add(&d.scaled(k));
        }
        Ok(out)
    }
}

/// U_p eigenvalue data attached to a weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub weight: Weight,
    pub alpha_p: PadicScalar,
    pub beta_p: PadicScalar,
    pub gamma_p: PadicScalar,
    pub normalized: Option<Normalizations>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalizations {
    pub alpha: PadicNumber,
    pub beta: PadicNumber,
    pub gamma: PadicNumber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub noncritical: bool,
    pub very_small: bool,
    /// The variant with #Crit in place of h.
    pub very_small_crit_count: bool,
}

impl Refinement {
    /// Builds a refinement and its integral normalisations.
    pub fn new(weight: Weight, beta_p: PadicScalar, gamma_p: PadicScalar) -> Result<Self, WeightError> {
        weight.validate()?;
        let alpha_p = beta_p.mul(&gamma_p);
        let normalized = Some(Normalizations {
            alpha: PadicNumber { exponent: weight.t_p_exponent(), mantissa: alpha_p.clone() },
            beta: PadicNumber { exponent: weight.mu_t_exponent(), mantissa: beta_p.clone() },
            gamma: PadicNumber { exponent: weight.lambda_t_exponent(), mantissa: gamma_p.clone() },
        });
        Ok(Refinement { weight, alpha_p, beta_p, gamma_p, normalized })
    }

    pub fn check_consistency(&self) -> Result<(), WeightError> {
        if self.alpha_p != self.beta_p.mul(&self.gamma_p) {
            return Err(WeightError::EigenvalueMismatch);
        }
        Ok(())
    }

    pub fn slope_predicates(&self) -> Result<SlopeReport, WeightError> {
        let norm = self.normalized.as_ref().ok_or(WeightError::MissingNormalization)?;
        slope_predicates_from_valuations(&self.weight, norm.beta.valuation(), self.alpha_p.valuation())
    }
}

/// Slope predicates from the valuations v_p(β°) and v_p(α_p).
pub fn slope_predicates_from_valuations(w: &Weight, v_beta_norm: Valuation, v_alpha: Valuation) -> Result<SlopeReport, WeightError> {
    let bound = Rational64::from_integer(w.noncritical_bound());
    let noncritical = v_beta_norm.lower_bound() < bound && matches!(v_beta_norm, Valuation::Finite(_));
    let (very_small, very_small_crit_count) = match (w.crit_set(), v_alpha) {
        (Some(r), Valuation::Finite(v)) => (v < Rational64::from_integer(r.width()), v < Rational64::from_integer(r.len() as i64)),
        _ => (false, false),
    };
    if very_small && !noncritical {
        return Err(WeightError::SlopeInconsistency);
    }
    Ok(SlopeReport { noncritical, very_small, very_small_crit_count })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(mu: &[i64], lambda: &[i64]) -> Weight {
        Weight::new(lambda.len(), mu.to_vec(), lambda.to_vec()).unwrap()
    }

    /// Independent oracle: scan j and test every link of the chain.
    fn crit_scan(w: &Weight) -> Vec<i64> {
        let n = w.n;
        (-30..=30)
            .filter(|&j| {
                let mut chain = vec![-w.mu[n]];
                for i in 0..n {
                    chain.push(w.lambda[i] + j);
                    chain.push(-w.mu[n - 1 - i]);
                }
                chain.windows(2).all(|p| p[0] >= p[1])
            })
            .collect()
    }

    #[test]
    fn interlacing_examples() {
        assert!(w(&[2, 1], &[1]).interlaces());
        assert!(w(&[0, 0], &[0]).interlaces());
        assert!(!w(&[1, 0, 0], &[2, 0]).interlaces());
    }

    #[test]
    fn crit_examples_match_scan() {
        for (weight, expected, h) in [
            (w(&[0, 0], &[0]), (0, 0), 0),
            (w(&[2, 0, -1], &[1, 0]), (-1, 0), 1),
            (w(&[0, -5], &[0]), (0, 5), 5),
        ] {
            let r = weight.crit_set().unwrap();
            assert_eq!((r.min, r.max), expected);
            assert_eq!(weight.h(), Some(h));
            assert_eq!(r.iter().collect::<Vec<_>>(), crit_scan(&weight));
        }
    }

    #[test]
    fn exponent_vector_examples() {
        assert_eq!(w(&[2, 1], &[1]).exponent_vector(), ExponentVector { c: vec![1, 1], d: vec![0] });
        assert_eq!(w(&[0, 0], &[0]).exponent_vector(), ExponentVector { c: vec![0, 0], d: vec![0] });
        assert_eq!(w(&[2, 1, 0], &[2, 1]).exponent_vector(), ExponentVector { c: vec![0, 0, 0], d: vec![1, 1] });
    }

    #[test]
    fn exponent_vector_closed_form_for_interlacing() {
        let weight = w(&[3, 1, -2], &[2, 0]);
        assert!(weight.interlaces());
        let e = weight.exponent_vector();
        assert_eq!(e.c, vec![3 - 2, 1, -2]);
        assert_eq!(e.d, vec![2 - 1, 0 - (-2)]);
        assert_eq!(e.weight(), weight);
    }

    #[test]
    fn slope_examples() {
        let report = slope_predicates_from_valuations(&w(&[3, 0], &[0]), Valuation::Finite(0.into()), Valuation::Finite(0.into())).unwrap();
        assert!(report.noncritical && report.very_small);
        let report = slope_predicates_from_valuations(&w(&[0, 0], &[0]), Valuation::Finite(0.into()), Valuation::Finite(0.into())).unwrap();
        assert!(!report.very_small);
        assert!(report.very_small_crit_count);
        let report = slope_predicates_from_valuations(&w(&[1, 0], &[0]), Valuation::Finite(2.into()), Valuation::Finite(5.into())).unwrap();
        assert!(!report.noncritical);
    }

    #[test]
    fn slope_inconsistency_is_raised() {
        // h = 5 but the non-critical bound is 1.
        let err = slope_predicates_from_valuations(&w(&[0, -5], &[0]), Valuation::Finite(7.into()), Valuation::Finite(0.into()));
        assert_eq!(err, Err(WeightError::SlopeInconsistency));
    }

    #[test]
    fn shape_is_validated() {
        assert!(Weight::new(2, vec![1, 0], vec![0, 0]).is_err());
        assert!(Weight::new(0, vec![0], vec![]).is_err());
    }
}
