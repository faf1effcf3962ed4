//! The anticyclotomic p-adic L-function of an eigenform: weighted κ-pushforwards of its
//! values at the H-classes, evaluation at characters, Gauss sums, the interpolation factor
//! and the level-index enumeration.

mod index;
#[cfg(test)]
mod tests;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autforms::{lift_eigenform, AutformsError, ClassSetModel, EigenForm, ModularForm, PeriodEntry};
use crate::branching::MatrixPair;
use crate::coeff::{CoeffError, Coefficient, PadicScalar, Ring};
use crate::dist::action::{act_distribution, guard_ring, MonoidElement, TorusCharacter};
use crate::dist::kappa::{kappa, KappaWeight};
use crate::dist::{growth_report, pair, DistError, Distribution, Domain, GrowthReport, LocAnFunction, Scaled, Truncation};
use crate::weights::Weight;

pub use index::{enumerate_index, index_check, IndexReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LfunError {
    #[error("conductor exponent must be at least 1")]
    BetaZero,
    #[error("character is not primitive of conductor p^{0}")]
    NotPrimitive(u32),
    #[error("distribution has level {have}, level {needed} is required")]
    InsufficientLevel { needed: u32, have: u32 },
    #[error("the model has no H-period table")]
    MissingPeriods,
    #[error("stabilizer order {0} is divisible by p")]
    StabilizerDivisibleByP(u64),
    #[error("enumeration of {0} elements exceeds the guard")]
    EnumerationTooLarge(u128),
    #[error("invalid character: {0}")]
    Character(String),
    #[error(transparent)]
    Autforms(#[from] AutformsError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

fn euler_phi_prime_power(p: u64, beta: u32) -> u64 {
    if beta == 0 {
        1
    } else {
        (p - 1) * p.pow(beta - 1)
    }
}

/// Smallest generator of (Z/p^β)^× (p odd, or p^β ≤ 4).
pub fn unit_generator(p: u64, beta: u32) -> u64 {
    let q = p.pow(beta);
    let order = euler_phi_prime_power(p, beta);
    if q <= 2 {
        return 1;
    }
    (2..q)
        .find(|&g| g % p != 0 && (1..order).all(|k| crate::coeff::pow_mod(g, k, q) != 1) && crate::coeff::pow_mod(g, order, q) == 1)
        .expect("the unit group is cyclic")
}

/// A character z ↦ z^j·χ(z mod p^β) of Z_p^× with χ(g) = ζ_{φ(p^β)}^{gen_exponent} on the generator g.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnticyclotomicCharacter {
    pub j: i64,
    pub beta: u32,
    pub gen_exponent: u64,
}

impl AnticyclotomicCharacter {
    pub fn new(j: i64, beta: u32, gen_exponent: u64) -> Self {
        AnticyclotomicCharacter { j, beta, gen_exponent }
    }

    /// φ(p^β), the order of the root of unity in which values are expressed.
    pub fn value_modulus(&self, p: u64) -> u64 {
        euler_phi_prime_power(p, self.beta)
    }

    /// Exact order of the finite part.
    pub fn order(&self, p: u64) -> u64 {
        let m = self.value_modulus(p);
        m / m.gcd(&(self.gen_exponent % m))
    }

    /// Order not realizable modulo p^{β−1}.
    pub fn is_primitive(&self, p: u64) -> bool {
        self.beta >= 1 && !euler_phi_prime_power(p, self.beta - 1).is_multiple_of(self.order(p))
    }

    pub fn inverse(&self, p: u64) -> Self {
        let m = self.value_modulus(p);
        AnticyclotomicCharacter { j: -self.j, beta: self.beta, gen_exponent: (m - self.gen_exponent % m) % m }
    }

    /// Ring of precision N containing the values of the finite part.
    pub fn value_ring(&self, p: u64, precision: u32) -> Result<Ring, LfunError> {
        Ok(crate::coeff::ring_make(p, precision, self.order(p), 0, 0)?)
    }

    /// χ(a) for a unit a, in a ring whose cyclotomic order is divisible by the order of χ.
    pub fn finite_value(&self, ring: &Ring, a: u64) -> Result<PadicScalar, LfunError> {
        let p = ring.p();
        if a.is_multiple_of(p) {
            return Ok(PadicScalar::zero(ring));
        }
        if self.beta == 0 {
            return Ok(PadicScalar::one(ring));
        }
        let q = p.pow(self.beta);
        let g = unit_generator(p, self.beta);
        let m = self.value_modulus(p);
        let target = a % q;
        let mut log = 0u64;
        let mut x = 1u64;
        while x != target {
            x = x * g % q;
            log += 1;
        }
        let order = self.order(p);
        let step = (self.gen_exponent % m) / (m / order);
        Ok(PadicScalar::root_of_unity(ring, order)?.pow_u64(step * log % order))
    }

    /// All primitive characters of conductor p^β with the given j.
    pub fn primitive(p: u64, beta: u32, j: i64) -> Vec<Self> {
        let m = euler_phi_prime_power(p, beta);
        (0..m).map(|e| AnticyclotomicCharacter::new(j, beta, e)).filter(|c| c.is_primitive(p)).collect()
    }
}

/// Embeds a scalar of an unramified, tame-free ring into another ring of the same precision.
fn embed(s: &PadicScalar, ring: &Ring) -> PadicScalar {
    match s.as_integer() {
        Some(v) => PadicScalar::from_int(ring, v as i64),
        None => s.reduce_to(ring),
    }
}

/// The sum Σ_y |stab_y|^{-1}·κ(u ⋆ φ(x_y)) over the H-period table, where u = (g_0, 1_n).
pub fn period_sum<T, W>(model: &ClassSetModel, phi: &ModularForm<T>, weight: &W) -> Result<Distribution<T>, LfunError>
where
    T: Coefficient,
    W: TorusCharacter<T> + KappaWeight<T>,
{
    if model.h_period.is_empty() {
        return Err(LfunError::MissingPeriods);
    }
    let ring = phi.ring().clone();
    let guard = guard_ring(&ring, phi.level())?;
    let n = model.n;
    let u = MonoidElement::new(MatrixPair::g0(&guard, n), 0, MatrixPair::identity(&guard, n))?;
    let mut total: Option<Distribution<T>> = None;
    for PeriodEntry(_, class, stabilizer) in &model.h_period {
        if stabilizer % ring.p() == 0 {
            return Err(LfunError::StabilizerDivisibleByP(*stabilizer));
        }
        let inverse = PadicScalar::from_int(&ring, *stabilizer as i64).unit_inverse()?;
        let moved = act_distribution(&u, &phi.values[*class], weight)?;
        let term = kappa(&moved, weight)?.scale_padic(&inverse);
        total = Some(match total {
            Some(t) => t.add(&term)?,
            None => term,
        });
    }
    Ok(total.expect("nonempty period table"))
}

/// α^{-β}·(period sum at level β), stored at the report degree.
#[derive(Debug, Clone, PartialEq)]
pub struct PadicLFunction {
    pub distribution: Distribution<PadicScalar>,
    pub weight: Weight,
    pub alpha: PadicScalar,
    pub slope: u32,
    pub beta: u32,
}

impl PadicLFunction {
    pub fn level(&self) -> u32 {
        self.distribution.level()
    }

    /// The distribution at level 1 and the given degree, the common ground for comparing builds.
    pub fn normalized(&self, degree: u32) -> Result<Distribution<PadicScalar>, LfunError> {
        Ok(self.distribution.coarsen(1)?.truncate_degree(degree)?)
    }
}

/// Builds the L-function from the level-β lift α^{-β}U_p^β φ of a level-0 eigenform.
pub fn build_lp(model: &ClassSetModel, eigen: &EigenForm, beta: u32, report_degree: u32) -> Result<PadicLFunction, LfunError> {
    if beta == 0 {
        return Err(LfunError::BetaZero);
    }
    let lifted = lift_eigenform(model, eigen, beta)?;
    let distribution = period_sum(model, &lifted, &eigen.weight)?.truncate_degree(report_degree)?;
    Ok(PadicLFunction { distribution, weight: eigen.weight.clone(), alpha: eigen.alpha.clone(), slope: eigen.slope, beta })
}

/// A character value together with whether it carries interpolation meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterValue {
    pub value: Scaled<PadicScalar>,
    /// j lies in the critical set of the weight.
    pub accessible: bool,
}

/// ∫ z^j χ(z) dμ with the finite part expanded cosetwise at the level of μ.
pub fn integrate_character(mu: &Distribution<PadicScalar>, chi: &AnticyclotomicCharacter) -> Result<Scaled<PadicScalar>, LfunError> {
    if mu.domain() != Domain::Units {
        return Err(DistError::Domain("characters are integrated over Z_p^×".into()).into());
    }
    let level = mu.level();
    if level < chi.beta.max(1) {
        return Err(LfunError::InsufficientLevel { needed: chi.beta.max(1), have: level });
    }
    let p = mu.ring().p();
    let ring = chi.value_ring(p, mu.ring().precision())?;
    let lifted = mu.map_moments(|m| embed(m, &ring)).with_scaling(mu.exponent(), mu.precision());
    let trunc = Truncation::new(level, mu.degree());
    let power = LocAnFunction::power(&PadicScalar::one(&ring), Domain::Units, trunc, chi.j)?;
    let cosets = Domain::Units.cosets(p, level);
    let mut coeffs = Vec::with_capacity(power.coeffs().len());
    for (ci, b) in cosets.iter().enumerate() {
        let value = chi.finite_value(&ring, b[0])?;
        coeffs.extend(power.local(ci).coeffs().iter().map(|c| c.mul(&value)));
    }
    let f = LocAnFunction::from_coeffs(Domain::Units, trunc, coeffs)?;
    Ok(pair(&lifted, &f)?)
}

pub fn eval_character(l: &PadicLFunction, chi: &AnticyclotomicCharacter) -> Result<CharacterValue, LfunError> {
    let value = integrate_character(&l.distribution, chi)?;
    let accessible = l.weight.crit_set().is_some_and(|c| c.contains(chi.j));
    Ok(CharacterValue { value, accessible })
}

/// G_{ψ^{sign}}(χ) = Σ_{a mod p^β, p ∤ a} χ(a)·ζ_{p^β}^{sign·a}, in a ring holding both roots of unity.
pub fn gauss_sum(chi: &AnticyclotomicCharacter, sign: i64, p: u64, precision: u32) -> Result<PadicScalar, LfunError> {
    if chi.beta == 0 {
        return Err(LfunError::BetaZero);
    }
    if !chi.is_primitive(p) {
        return Err(LfunError::NotPrimitive(chi.beta));
    }
    let ring = gauss_ring(chi, p, precision)?;
    let q = p.pow(chi.beta);
    let zeta = PadicScalar::root_of_unity(&ring, q)?;
    let zeta = if sign < 0 { zeta.pow(-1)? } else { zeta };
    let mut acc = PadicScalar::zero(&ring);
    let mut power = PadicScalar::one(&ring);
    for a in 0..q {
        if a % p != 0 {
            acc = acc.add(&chi.finite_value(&ring, a)?.mul(&power));
        }
        power = power.mul(&zeta);
    }
    Ok(acc)
}

/// Ring of cyclotomic order lcm(ord χ, p^β).
pub fn gauss_ring(chi: &AnticyclotomicCharacter, p: u64, precision: u32) -> Result<Ring, LfunError> {
    let order = chi.order(p).lcm(&p.pow(chi.beta));
    Ok(crate::coeff::ring_make(p, precision, order, 0, 0)?)
}

/// G_ψ(χ)·G_{ψ^{-1}}(χ^{-1}) and whether it equals p^β in the ring.
pub fn gauss_identity(chi: &AnticyclotomicCharacter, p: u64, precision: u32) -> Result<(PadicScalar, bool), LfunError> {
    let g = gauss_sum(chi, 1, p, precision)?;
    let h = gauss_sum(&chi.inverse(p), -1, p, precision)?;
    let product = g.mul(&h);
    let expected = PadicScalar::from_int(product.ring(), p.pow(chi.beta) as i64);
    Ok((product.clone(), product == expected))
}

/// Π_{i=1}^n (1 − p^{-i})^{-2}·(p^{-E}/α)^β with E = n(n+1)(2n+1)/6, split into its exact
/// rational part and the power of α.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationFactor {
    pub rational: BigRational,
    pub alpha_power: i64,
    pub exponent: u32,
    /// v_p of the whole factor.
    pub valuation: Rational64,
    /// Two-step bookkeeping: n(n+1)(n+2)/3 − n(n+1)/2, which should equal E.
    pub chain_exponent: i64,
    pub chain_consistent: bool,
}

pub fn interpolation_factor(n: usize, p: u64, beta: u32, alpha_valuation: Rational64) -> Result<InterpolationFactor, LfunError> {
    if beta == 0 {
        return Err(LfunError::BetaZero);
    }
    let pb = BigInt::from(p);
    let mut rational = BigRational::one();
    for i in 1..=n as u32 {
        let pi = pb.pow(i);
        let term = BigRational::new(pi.clone() - BigInt::one(), pi);
        rational /= term.clone() * term;
    }
    let exponent = crate::autforms::coset_exponent(n);
    rational /= BigRational::from_integer(pb.pow(exponent * beta));
    let n64 = n as i64;
    let valuation = Rational64::from_integer(n64 * (n64 + 1)) - Rational64::from_integer(beta as i64) * (Rational64::from_integer(exponent as i64) + alpha_valuation);
    let chain_exponent = n64 * (n64 + 1) * (n64 + 2) / 3 - n64 * (n64 + 1) / 2;
    Ok(InterpolationFactor { rational, alpha_power: -(beta as i64), exponent, valuation, chain_exponent, chain_consistent: chain_exponent == exponent as i64 })
}

impl InterpolationFactor {
    /// The factor as a p-adic number p^k·u given α.
    pub fn value(&self, alpha: &PadicScalar) -> Result<(i64, PadicScalar), LfunError> {
        let ring = alpha.ring();
        let p = BigInt::from(ring.p());
        let mut num = self.rational.numer().clone();
        let mut den = self.rational.denom().clone();
        let mut shift = 0i64;
        while (&num % &p).is_zero() && !num.is_zero() {
            num /= &p;
            shift += 1;
        }
        while (&den % &p).is_zero() {
            den /= &p;
            shift -= 1;
        }
        let unit = PadicScalar::from_rational(ring, &BigRational::new(num, den))?;
        let slope = alpha.p_divisibility();
        let alpha_unit = alpha.div_p_power(slope)?.value;
        let alpha_part = alpha_unit.pow(self.alpha_power)?;
        Ok((shift + self.alpha_power * slope as i64, unit.mul(&alpha_part)))
    }
}

/// Growth report of the L-function with the certificate h ≤ v_p(α) + 1/4.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCertificate {
    pub report: GrowthReport,
    pub bound: Rational64,
    pub certified: bool,
    /// v_p(α) < h, so the interpolation property pins the distribution down.
    pub unique: bool,
}

pub fn certify_growth(l: &PadicLFunction, r_max: u32) -> Result<GrowthCertificate, LfunError> {
    if r_max > l.level() || r_max < 1 {
        return Err(LfunError::InsufficientLevel { needed: r_max.max(1), have: l.level() });
    }
    let report = growth_report(&l.distribution.coarsen(r_max)?)?;
    let v = Rational64::from_integer(l.slope as i64);
    let bound = v + Rational64::new(1, 4);
    let unique = l.weight.h().is_some_and(|h| v < Rational64::from_integer(h));
    Ok(GrowthCertificate { certified: report.growth <= bound, report, bound, unique })
}
