//! The algebraic induction model of V_{(μ,λ)}, its right-H-invariant generators,
//! the support factorisation on N^1 and the unit ratio c driving interpolation.
//!
//! Functions live on pairs (g, g') ∈ GL_{n+1} × GL_n and transform on the left
//! under the lower Borel by μ on g and by the contragredient character
//! (−λ_n, …, −λ_1) on g'. With this choice the invariant line for H = GL_n,
//! embedded as h ↦ (diag(h, 1), h), exists exactly when μ interlaces λ.

mod invariants;
pub mod poly;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{CoeffError, PadicScalar, Ring};
use crate::linalg::PadicMatrix;
use crate::weights::{ExponentVector, Weight, WeightError};
use poly::{det_rational, minor, Layout, Poly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BranchingError {
    #[error("invariant kernel for {weight:?} has dimension {dimension}, expected 1")]
    KernelDimension { weight: Weight, dimension: usize },
    #[error("weight {0:?} is not dominant")]
    NotDominant(Weight),
    #[error("mu does not interlace lambda in {0:?}")]
    NotInterlacing(Weight),
    #[error("minor size {k} out of range for a {side}x{side} block")]
    MinorOutOfRange { k: usize, side: usize },
    #[error("value at the normalisation point is not a unit")]
    NonUnitNormalization,
    #[error("negative power of a non-constant polynomial")]
    NonPolynomialPower,
    #[error("element is not in N^1(Z_p): {0}")]
    NotInN1(String),
    #[error("point lies outside Iw_G^1")]
    OffSupport,
    #[error("ratio c is not a unit at the sampled point")]
    RatioNotUnit,
    #[error("rank n = {0} is not supported here")]
    UnsupportedRank(usize),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Big,
    Small,
}

/// A pair (g, g') of square matrices of sizes n+1 and n.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPair {
    pub big: PadicMatrix,
    pub small: PadicMatrix,
}

fn int_matrix(ring: &Ring, rows: &[Vec<i64>]) -> PadicMatrix {
    let n = rows.len();
    PadicMatrix::from_fn(n, n, |r, c| PadicScalar::from_int(ring, rows[r][c]))
}

impl MatrixPair {
    pub fn n(&self) -> usize {
        self.small.rows()
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        let one = PadicScalar::one(ring);
        MatrixPair { big: PadicMatrix::identity(&one, n + 1), small: PadicMatrix::identity(&one, n) }
    }

    pub fn from_ints(ring: &Ring, big: &[Vec<i64>], small: &[Vec<i64>]) -> Self {
        MatrixPair { big: int_matrix(ring, big), small: int_matrix(ring, small) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        MatrixPair { big: self.big.mul(&other.big), small: self.small.mul(&other.small) }
    }

    pub fn inverse(&self) -> Result<Self, CoeffError> {
        Ok(MatrixPair { big: self.big.inverse()?, small: self.small.inverse()? })
    }

    /// ι(h) = (diag(h, 1), h).
    pub fn iota(h: &PadicMatrix) -> Self {
        let n = h.rows();
        let ring = h.ring().clone();
        let big = PadicMatrix::from_fn(n + 1, n + 1, |r, c| {
            if r < n && c < n {
                h.get(r, c).clone()
            } else if r == c {
                PadicScalar::one(&ring)
            } else {
                PadicScalar::zero(&ring)
            }
        });
        MatrixPair { big, small: h.clone() }
    }

    /// (g_0, 1_n): identity with last column of ones.
    pub fn g0(ring: &Ring, n: usize) -> Self {
        MatrixPair::from_ints(ring, &g0_rows(n), &identity_rows(n))
    }

    /// (ξ, 1_n): the anti-diagonal w_n block with last column of ones.
    pub fn xi(ring: &Ring, n: usize) -> Self {
        MatrixPair::from_ints(ring, &xi_rows(n), &identity_rows(n))
    }

    /// The element of N^1 with the given strictly-upper entries of g (row-major); g' = [g]_n.
    pub fn n1_element(ring: &Ring, n: usize, coords: &[PadicScalar]) -> Result<Self, BranchingError> {
        let expected = n * (n + 1) / 2;
        if coords.len() != expected {
            return Err(CoeffError::Arity { expected, found: coords.len() }.into());
        }
        let one = PadicScalar::one(ring);
        let mut big = PadicMatrix::identity(&one, n + 1);
        let mut it = coords.iter();
        for r in 0..=n {
            for c in r + 1..=n {
                let x = it.next().expect("length checked").clone();
                let ok = if c == n { x.sub(&one).p_divisibility() >= 1 } else { x.p_divisibility() >= 1 };
                if !ok {
                    return Err(BranchingError::NotInN1(format!("entry ({}, {}) has the wrong residue", r + 1, c + 1)));
                }
                big.set(r, c, x);
            }
        }
        let idx: Vec<usize> = (0..n).collect();
        let small = big.submatrix(&idx, &idx);
        Ok(MatrixPair { big, small })
    }

    /// Flattened entries in the polynomial variable layout.
    pub fn values(&self) -> Vec<PadicScalar> {
        let mut v: Vec<PadicScalar> = self.big.entries().to_vec();
        v.extend(self.small.entries().iter().cloned());
        v
    }

    pub fn ring(&self) -> &Ring {
        self.big.ring()
    }

    pub fn is_iwahori(&self) -> bool {
        self.big.det().is_unit() && self.small.det().is_unit() && self.big.is_upper_triangular_mod_p() && self.small.is_upper_triangular_mod_p()
    }

    /// Writes the pair as n̄·t·x with n̄ ∈ N̄(pZ_p), t ∈ T(Z_p), x ∈ N^1(Z_p), if possible.
    pub fn iwahori_one_decomposition(&self) -> Option<(MatrixPair, Vec<PadicScalar>, Vec<PadicScalar>, MatrixPair)> {
        let n = self.n();
        let (lb, db, ub) = self.big.ldu()?;
        let (ls, ds, us) = self.small.ldu()?;
        let lower_ok = |l: &PadicMatrix| (0..l.rows()).all(|r| (0..r).all(|c| l.get(r, c).p_divisibility() >= 1));
        if !lower_ok(&lb) || !lower_ok(&ls) {
            return None;
        }
        let coords: Vec<PadicScalar> = (0..=n).flat_map(|r| (r + 1..=n).map(move |c| (r, c))).map(|(r, c)| ub.get(r, c).clone()).collect();
        let unip = MatrixPair::n1_element(self.ring(), n, &coords).ok()?;
        if unip.small != us {
            return None;
        }
        Some((MatrixPair { big: lb, small: ls }, db, ds, unip))
    }

    pub fn in_iwahori_one(&self) -> bool {
        self.iwahori_one_decomposition().is_some()
    }

    /// True when (g, g') ∈ N^β: unipotent, g' = [g]_n, and g ≡ g_0 modulo p^β.
    pub fn in_n_beta(&self, beta: u32) -> bool {
        let n = self.n();
        let ring = self.ring().clone();
        let g0 = MatrixPair::g0(&ring, n);
        let unipotent = (0..=n).all(|r| {
            (0..=n).all(|c| {
                let x = self.big.get(r, c);
                if r > c {
                    x.is_zero()
                } else if r == c {
                    *x == PadicScalar::one(&ring)
                } else {
                    true
                }
            })
        });
        let idx: Vec<usize> = (0..n).collect();
        unipotent && self.big.submatrix(&idx, &idx) == self.small && self.big.eq_mod(&g0.big, beta)
    }
}

fn identity_rows(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|r| (0..n).map(|c| i64::from(r == c)).collect()).collect()
}

pub fn g0_rows(n: usize) -> Vec<Vec<i64>> {
    (0..=n).map(|r| (0..=n).map(|c| i64::from(r == c || c == n)).collect()).collect()
}

pub fn xi_rows(n: usize) -> Vec<Vec<i64>> {
    (0..=n)
        .map(|r| (0..=n).map(|c| if c == n { 1 } else { i64::from(r < n && r + c == n - 1) }).collect())
        .collect()
}

/// diag(w_n, 1).
pub fn antidiagonal_block_rows(n: usize) -> Vec<Vec<i64>> {
    (0..=n)
        .map(|r| (0..=n).map(|c| if r == n || c == n { i64::from(r == c) } else { i64::from(r + c == n - 1) }).collect())
        .collect()
}

/// A pair of rational matrices, for exact evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPair {
    pub big: Vec<Vec<BigRational>>,
    pub small: Vec<Vec<BigRational>>,
}

fn to_rational_rows(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect()
}

impl ExactPair {
    pub fn from_ints(big: &[Vec<i64>], small: &[Vec<i64>]) -> Self {
        ExactPair { big: to_rational_rows(big), small: to_rational_rows(small) }
    }

    /// The normalisation point (ξ, 1_n).
    pub fn normalization_point(n: usize) -> Self {
        Self::from_ints(&xi_rows(n), &identity_rows(n))
    }

    pub fn g0(n: usize) -> Self {
        Self::from_ints(&g0_rows(n), &identity_rows(n))
    }

    fn values(&self) -> Vec<BigRational> {
        self.big.iter().chain(self.small.iter()).flat_map(|r| r.iter().cloned()).collect()
    }
}

/// A vector of the induced model: poly · det(g)^det_big · det(g')^det_small.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedFunction {
    pub weight: Weight,
    pub poly: Poly,
    pub det_big: i64,
    pub det_small: i64,
}

fn rational_pow(x: &BigRational, e: i64) -> Option<BigRational> {
    if e >= 0 {
        let mut out = BigRational::one();
        for _ in 0..e {
            out *= x;
        }
        Some(out)
    } else if x.is_zero() {
        None
    } else {
        rational_pow(&(BigRational::one() / x), -e)
    }
}

impl InducedFunction {
    pub(crate) fn from_parts(weight: Weight, poly: Poly, det_big: i64, det_small: i64) -> Self {
        InducedFunction { weight, poly, det_big, det_small }
    }

    pub fn constant_one(n: usize) -> Self {
        InducedFunction { weight: Weight::zero(n), poly: Poly::one(Layout { n }.nvars()), det_big: 0, det_small: 0 }
    }

    pub fn n(&self) -> usize {
        self.weight.n
    }

    pub fn evaluate_exact(&self, x: &ExactPair) -> Option<BigRational> {
        let base = self.poly.eval_rational(&x.values());
        let db = rational_pow(&det_rational(&x.big), self.det_big)?;
        let ds = rational_pow(&det_rational(&x.small), self.det_small)?;
        Some(base * db * ds)
    }

    pub fn evaluate(&self, x: &MatrixPair) -> Result<PadicScalar, BranchingError> {
        let ring = x.ring().clone();
        let base = self.poly.eval_padic(&ring, &x.values())?;
        let db = x.big.det().pow(self.det_big)?;
        let ds = x.small.det().pow(self.det_small)?;
        Ok(base.mul(&db).mul(&ds))
    }

    pub fn mul(&self, other: &Self) -> Self {
        InducedFunction {
            weight: self.weight.add(&other.weight),
            poly: self.poly.mul(&other.poly),
            det_big: self.det_big + other.det_big,
            det_small: self.det_small + other.det_small,
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self, BranchingError> {
        let weight = Weight {
            n: self.weight.n,
            mu: self.weight.mu.iter().map(|m| m * e).collect(),
            lambda: self.weight.lambda.iter().map(|l| l * e).collect(),
        };
        let poly = if e >= 0 {
            self.poly.pow(e as u32)
        } else {
            let c = self.poly.as_constant().filter(|c| !c.is_zero()).ok_or(BranchingError::NonPolynomialPower)?;
            let inv = rational_pow(&c, e).expect("nonzero constant");
            Poly::constant(self.poly.nvars(), inv)
        };
        Ok(InducedFunction { weight, poly, det_big: self.det_big * e, det_small: self.det_small * e })
    }

    /// Rescales so that the value at (ξ, 1_n) is 1.
    pub fn normalized(&self) -> Result<Self, BranchingError> {
        let value = self.evaluate_exact(&ExactPair::normalization_point(self.n())).ok_or(BranchingError::NonUnitNormalization)?;
        if value.is_zero() {
            return Err(BranchingError::NonUnitNormalization);
        }
        let mut out = self.clone();
        out.poly = self.poly.scale(&(BigRational::one() / value));
        Ok(out)
    }

    /// Coefficients reduced into the ring; fails if a denominator is divisible by p.
    pub fn reduce(&self, ring: &Ring) -> Result<Vec<(Vec<u8>, PadicScalar)>, BranchingError> {
        self.poly
            .terms()
            .iter()
            .map(|(m, c)| Ok((m.clone(), PadicScalar::from_rational(ring, c)?)))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> =
            self.poly.terms().iter().map(|(m, c)| serde_json::json!([m, c.to_string()])).collect();
        serde_json::json!({
            "weight": self.weight,
            "det_big": self.det_big,
            "det_small": self.det_small,
            "terms": terms,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, BranchingError> {
        let bad = |what: &str| CoeffError::Schema(format!("induced function: {what}"));
        let weight: Weight = serde_json::from_value(value["weight"].clone()).map_err(|e| bad(&e.to_string()))?;
        weight.validate()?;
        let nvars = Layout { n: weight.n }.nvars();
        let det_big = value["det_big"].as_i64().ok_or_else(|| bad("det_big"))?;
        let det_small = value["det_small"].as_i64().ok_or_else(|| bad("det_small"))?;
        let mut terms = Vec::new();
        for t in value["terms"].as_array().ok_or_else(|| bad("terms"))? {
            let m: Vec<u8> = serde_json::from_value(t[0].clone()).map_err(|e| bad(&e.to_string()))?;
            if m.len() != nvars {
                return Err(bad("monomial length").into());
            }
            let c: BigRational = t[1].as_str().ok_or_else(|| bad("coefficient"))?.parse().map_err(|_| bad("coefficient"))?;
            terms.push((m, c));
        }
        Ok(InducedFunction { weight, poly: Poly::from_terms(nvars, terms), det_big, det_small })
    }
}

/// Value of the character (μ, λ^∨) on a pair of diagonal matrices.
pub fn weight_character(w: &Weight, t_big: &[PadicScalar], t_small: &[PadicScalar]) -> Result<PadicScalar, BranchingError> {
    let ring = t_big[0].ring().clone();
    let mut acc = PadicScalar::one(&ring);
    for (t, &m) in t_big.iter().zip(&w.mu) {
        acc = acc.mul(&t.pow(m)?);
    }
    let n = w.n;
    for (i, t) in t_small.iter().enumerate() {
        acc = acc.mul(&t.pow(-w.lambda[n - 1 - i])?);
    }
    Ok(acc)
}

/// The function (g, g') ↦ det of the top-left k×k block of one component.
pub fn leading_minor(n: usize, component: Component, k: usize) -> Result<InducedFunction, BranchingError> {
    let layout = Layout { n };
    let side = match component {
        Component::Big => n + 1,
        Component::Small => n,
    };
    if k == 0 || k > side {
        return Err(BranchingError::MinorOutOfRange { k, side });
    }
    let grid: Vec<Vec<usize>> = (0..k)
        .map(|r| {
            (0..k)
                .map(|c| match component {
                    Component::Big => layout.big(r, c),
                    Component::Small => layout.small(r, c),
                })
                .collect()
        })
        .collect();
    let mut weight = Weight::zero(n);
    match component {
        Component::Big => weight.mu.iter_mut().take(k).for_each(|m| *m = 1),
        Component::Small => weight.lambda.iter_mut().skip(n - k).for_each(|l| *l = -1),
    }
    Ok(InducedFunction::from_parts(weight, minor(layout.nvars(), &grid), 0, 0))
}

/// The 2n+1 fundamental generators u_{i+1,i} (i = 0..n) and v_{i,i} (i = 1..n).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub n: usize,
    pub u: Vec<InducedFunction>,
    pub v: Vec<InducedFunction>,
}

/// Weight (β_k, α_l).
pub fn basis_weight(n: usize, k: usize, l: usize) -> Weight {
    Weight { n, mu: (0..=n).map(|i| i64::from(i < k)).collect(), lambda: (0..n).map(|i| i64::from(i < l)).collect() }
}

/// The normalised invariant line at weight w, computed directly.
pub fn build_u_direct(w: &Weight) -> Result<InducedFunction, BranchingError> {
    w.validate()?;
    let space = invariants::invariant_space(w)?;
    if space.len() != 1 {
        return Err(BranchingError::KernelDimension { weight: w.clone(), dimension: space.len() });
    }
    space[0].normalized()
}

/// A spanning family of V_{(μ,λ)} in the induced model (products of leading-row minors).
pub fn model_basis(w: &Weight) -> Result<Vec<InducedFunction>, BranchingError> {
    w.validate()?;
    invariants::model_space(w)
}

/// Dimension of the space of H-invariants at weight w.
pub fn invariant_dimension(w: &Weight) -> Result<usize, BranchingError> {
    w.validate()?;
    match invariants::invariant_space(w) {
        Ok(space) => Ok(space.len()),
        Err(BranchingError::NotDominant(_)) => Ok(0),
        Err(e) => Err(e),
    }
}

fn generator_cache() -> &'static Mutex<HashMap<usize, Arc<GeneratorSet>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GeneratorSet>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Solves for the generators once per rank and caches them.
pub fn generators(n: usize) -> Result<Arc<GeneratorSet>, BranchingError> {
    if n == 0 || n > 3 {
        return Err(BranchingError::UnsupportedRank(n));
    }
    if let Some(g) = generator_cache().lock().expect("cache lock").get(&n) {
        return Ok(g.clone());
    }
    let u = (0..=n).map(|i| build_u_direct(&basis_weight(n, i + 1, i))).collect::<Result<Vec<_>, _>>()?;
    let v = (1..=n).map(|i| build_u_direct(&basis_weight(n, i, i))).collect::<Result<Vec<_>, _>>()?;
    let set = Arc::new(GeneratorSet { n, u, v });
    generator_cache().lock().expect("cache lock").insert(n, set.clone());
    Ok(set)
}

/// The generators checked against the ring: p-integral coefficients and a unit value at (ξ, 1_n).
pub fn fundamental_generators(n: usize, ring: &Ring) -> Result<Vec<InducedFunction>, BranchingError> {
    let set = generators(n)?;
    let all: Vec<InducedFunction> = set.u.iter().chain(set.v.iter()).cloned().collect();
    let point = MatrixPair::xi(ring, n);
    for f in &all {
        f.reduce(ring)?;
        if !f.evaluate(&point)?.is_unit() {
            return Err(BranchingError::NonUnitNormalization);
        }
    }
    Ok(all)
}

impl GeneratorSet {
    /// Product Π u_{i+1,i}^{c_i} Π v_{i,i}^{d_i} as a polynomial function.
    pub fn product(&self, e: &ExponentVector) -> Result<InducedFunction, BranchingError> {
        let mut acc = InducedFunction::constant_one(self.n);
        for (f, &c) in self.u.iter().zip(&e.c) {
            if c != 0 {
                acc = acc.mul(&f.pow(c)?);
            }
        }
        for (f, &d) in self.v.iter().zip(&e.d) {
            if d != 0 {
                acc = acc.mul(&f.pow(d)?);
            }
        }
        Ok(acc)
    }

    pub fn values_at(&self, x: &MatrixPair) -> Result<GeneratorValues, BranchingError> {
        Ok(GeneratorValues {
            u: self.u.iter().map(|f| f.evaluate(x)).collect::<Result<_, _>>()?,
            v: self.v.iter().map(|f| f.evaluate(x)).collect::<Result<_, _>>()?,
        })
    }

    pub fn c_ratio(&self) -> CRatio {
        let n = self.n;
        let mut num = InducedFunction::constant_one(n);
        for f in &self.v {
            num = num.mul(f);
        }
        let mut den = InducedFunction::constant_one(n);
        for f in self.u.iter().take(n) {
            den = den.mul(f);
        }
        CRatio { numerator: num, denominator: den }
    }
}

/// Generator values at one point, for products with arbitrary integer exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorValues {
    pub u: Vec<PadicScalar>,
    pub v: Vec<PadicScalar>,
}

impl GeneratorValues {
    pub fn product(&self, e: &ExponentVector) -> Result<PadicScalar, BranchingError> {
        let ring = self.u[0].ring().clone();
        let mut acc = PadicScalar::one(&ring);
        for (x, &c) in self.u.iter().zip(&e.c) {
            acc = acc.mul(&x.pow(c)?);
        }
        for (x, &d) in self.v.iter().zip(&e.d) {
            acc = acc.mul(&x.pow(d)?);
        }
        Ok(acc)
    }

    /// c = Π v_{i,i} / Π_{i<n} u_{i+1,i}.
    pub fn c(&self) -> Result<PadicScalar, BranchingError> {
        let n = self.v.len();
        let ring = self.u[0].ring().clone();
        let num = self.v.iter().fold(PadicScalar::one(&ring), |a, x| a.mul(x));
        let den = self.u.iter().take(n).fold(PadicScalar::one(&ring), |a, x| a.mul(x));
        let c = num.mul(&den.unit_inverse().map_err(|_| BranchingError::RatioNotUnit)?);
        if !c.is_unit() {
            return Err(BranchingError::RatioNotUnit);
        }
        Ok(c)
    }
}

/// c = u_{(μ,λ+1)} / u_{(μ,λ)} as a quotient of two induced functions.
#[derive(Debug, Clone, PartialEq)]
pub struct CRatio {
    pub numerator: InducedFunction,
    pub denominator: InducedFunction,
}

impl CRatio {
    /// Value on Iw_G^1; off the support returns None when zero-extension is on.
    pub fn evaluate(&self, x: &MatrixPair, zero_extend: bool) -> Result<Option<PadicScalar>, BranchingError> {
        if !x.in_iwahori_one() {
            return if zero_extend { Ok(None) } else { Err(BranchingError::OffSupport) };
        }
        let num = self.numerator.evaluate(x)?;
        let den = self.denominator.evaluate(x)?;
        let c = num.mul(&den.unit_inverse().map_err(|_| BranchingError::RatioNotUnit)?);
        if !c.is_unit() {
            return Err(BranchingError::RatioNotUnit);
        }
        Ok(Some(c))
    }
}

/// The product formula u_{(μ,λ)} for an interlacing weight, normalised at (ξ, 1_n).
pub fn build_u(w: &Weight) -> Result<InducedFunction, BranchingError> {
    w.validate()?;
    if !w.interlaces() {
        return Err(BranchingError::NotInterlacing(w.clone()));
    }
    let set = generators(w.n)?;
    set.product(&w.exponent_vector())
}

/// Witness b̄ · (g_0, 1_n) · ι(h) = target.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationWitness {
    pub lower: MatrixPair,
    pub h: PadicMatrix,
    pub target: MatrixPair,
}

impl FactorizationWitness {
    pub fn reconstruct(&self) -> MatrixPair {
        let n = self.h.rows();
        self.lower.mul(&MatrixPair::g0(self.h.ring(), n)).mul(&MatrixPair::iota(&self.h))
    }
}

/// Factors x ∈ N^1 through (g_0, 1_n) using the closed forms for the lower-triangular factors.
pub fn factor_n1(x: &MatrixPair) -> Result<FactorizationWitness, BranchingError> {
    let n = x.n();
    if !x.in_n_beta(1) {
        return Err(BranchingError::NotInN1("not unipotent with g' = [g]_n and g ≡ g_0 mod p".into()));
    }
    let ring = x.ring().clone();
    let one = PadicScalar::one(&ring);
    let zero = PadicScalar::zero(&ring);
    let col: Vec<PadicScalar> = (0..n).map(|r| x.big.get(r, n).clone()).collect();
    let c1_inv = col[0].unit_inverse()?;
    // Left factor: first column (c_1, c_2 − 1, …, c_n − 1, 0), identity elsewhere.
    let b1 = PadicMatrix::from_fn(n + 1, n + 1, |r, c| {
        if c == 0 && r == 0 {
            col[0].clone()
        } else if c == 0 && r < n {
            col[r].sub(&one)
        } else if r == c {
            one.clone()
        } else {
            zero.clone()
        }
    });
    // Right factor on the first n coordinates: first column (1/c_1, −(c_k − 1)/c_1).
    let b2 = PadicMatrix::from_fn(n, n, |r, c| {
        if c == 0 && r == 0 {
            c1_inv.clone()
        } else if c == 0 {
            zero.sub(&col[r].sub(&one)).mul(&c1_inv)
        } else if r == c {
            one.clone()
        } else {
            zero.clone()
        }
    });
    let idx: Vec<usize> = (0..n).collect();
    let a = x.big.submatrix(&idx, &idx);
    let h = b2.mul(&a);
    let lower_small = b2.inverse()?;
    let witness = FactorizationWitness { lower: MatrixPair { big: b1, small: lower_small }, h, target: x.clone() };
    debug_assert_eq!(witness.reconstruct(), *x);
    Ok(witness)
}

/// A uniformly random element of N^1: strictly-upper big entries ≡ 0 mod p except the last column ≡ 1.
pub fn random_n1<R: rand::Rng>(ring: &Ring, n: usize, rng: &mut R) -> MatrixPair {
    let p = ring.p() as i64;
    let m = ring.modulus() as i64 / p;
    let coords: Vec<PadicScalar> = (0..=n)
        .flat_map(|r| (r + 1..=n).map(move |c| (r, c)))
        .map(|(_, c)| PadicScalar::from_int(ring, i64::from(c == n) + p * rng.gen_range(0..m)))
        .collect();
    MatrixPair::n1_element(ring, n, &coords).expect("coordinates have the N^1 shape")
}

/// The identity g_0 · diag(w_n, 1) = ξ, checked over the integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitWitness {
    pub n: usize,
    pub g0: Vec<Vec<i64>>,
    pub block: Vec<Vec<i64>>,
    pub xi: Vec<Vec<i64>>,
    pub product_matches: bool,
    pub xi_determinant: i64,
    /// The small component of (g_0, 1_n)·ι(w_n) is w_n, so the translate is (ξ, w_n).
    pub translate_small_is_identity: bool,
}

fn int_matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|r| (0..b[0].len()).map(|c| (0..b.len()).map(|k| a[r][k] * b[k][c]).sum()).collect()).collect()
}

fn int_det(m: &[Vec<i64>]) -> i64 {
    let q: Vec<Vec<BigRational>> = to_rational_rows(m);
    det_rational(&q).to_integer().try_into().unwrap_or(i64::MAX)
}

pub fn orbit_witness(n: usize) -> OrbitWitness {
    let g0 = g0_rows(n);
    let block = antidiagonal_block_rows(n);
    let xi = xi_rows(n);
    let product = int_matmul(&g0, &block);
    let wn: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| i64::from(r + c == n - 1)).collect()).collect();
    OrbitWitness {
        n,
        product_matches: product == xi,
        xi_determinant: int_det(&xi),
        translate_small_is_identity: wn == identity_rows(n),
        g0,
        block,
        xi,
    }
}

#[cfg(test)]
mod tests;
