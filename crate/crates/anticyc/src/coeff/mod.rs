//! Finite-precision coefficient rings: Z/p^N, its cyclotomic extensions and
//! truncated power series over them in weight variables.

mod affinoid;
mod ring;
mod scalar;

pub(crate) use ring::pow_mod;

pub use affinoid::{multi_indices, AffinoidScalar};
pub use ring::{is_prime, Ring, RingDescriptor, RingSpec};
pub use scalar::{Approx, PadicNumber, PadicScalar, Valuation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoeffError {
    #[error("{0} is not prime")]
    CompositePrime(u64),
    #[error("unsupported cyclotomic order m = {m} for p = {p}: tame part must divide p - 1")]
    UnsupportedCyclotomic { p: u64, m: u64 },
    #[error("p^N too large for p = {p}, N = {precision}")]
    PrecisionTooLarge { p: u64, precision: u32 },
    #[error("invalid ring parameters: {0}")]
    InvalidParameters(String),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("element is not divisible by p^{k}")]
    NotDivisible { k: u32 },
    #[error("expected {expected} coordinates, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("point lies outside the disc v >= 1")]
    OutsideDisc,
    #[error("malformed scalar: {0}")]
    Schema(String),
}

/// Ring operations shared by plain and affinoid coefficients, so that
/// distributions and matrices can be written once for both.
pub trait Coefficient: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn ring(&self) -> &Ring;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, s: &PadicScalar) -> Self;
    fn is_zero(&self) -> bool;
    fn try_inverse(&self) -> Result<Self, CoeffError>;
    /// Smallest valuation among the underlying p-adic digits.
    fn min_valuation(&self) -> Valuation;
    fn from_scalar(s: PadicScalar, like: &Self) -> Self;
}

impl Coefficient for PadicScalar {
    fn ring(&self) -> &Ring {
        PadicScalar::ring(self)
    }
    fn zero_like(&self) -> Self {
        PadicScalar::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        PadicScalar::one(self.ring())
    }
    fn add(&self, other: &Self) -> Self {
        PadicScalar::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        PadicScalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        PadicScalar::mul(self, other)
    }
    fn scale(&self, s: &PadicScalar) -> Self {
        PadicScalar::mul(self, s)
    }
    fn is_zero(&self) -> bool {
        PadicScalar::is_zero(self)
    }
    fn try_inverse(&self) -> Result<Self, CoeffError> {
        self.unit_inverse()
    }
    fn min_valuation(&self) -> Valuation {
        self.valuation()
    }
    fn from_scalar(s: PadicScalar, _like: &Self) -> Self {
        s
    }
}

impl Coefficient for AffinoidScalar {
    fn ring(&self) -> &Ring {
        AffinoidScalar::ring(self)
    }
    fn zero_like(&self) -> Self {
        AffinoidScalar::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        AffinoidScalar::one(self.ring())
    }
    fn add(&self, other: &Self) -> Self {
        AffinoidScalar::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        AffinoidScalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        AffinoidScalar::mul(self, other)
    }
    fn scale(&self, s: &PadicScalar) -> Self {
        AffinoidScalar::scale(self, s)
    }
    fn is_zero(&self) -> bool {
        AffinoidScalar::is_zero(self)
    }
    fn try_inverse(&self) -> Result<Self, CoeffError> {
        self.unit_inverse()
    }
    fn min_valuation(&self) -> Valuation {
        AffinoidScalar::min_valuation(self)
    }
    fn from_scalar(s: PadicScalar, _like: &Self) -> Self {
        AffinoidScalar::constant(s)
    }
}

/// Builds a descriptor; thin wrapper kept for the operation name used by the CLI.
pub fn ring_make(p: u64, precision: u32, m: u64, k: usize, series_degree: u32) -> Result<Ring, CoeffError> {
    RingDescriptor::new(p, precision, m, k, series_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn ring(p: u64, n: u32, m: u64) -> Ring {
        ring_make(p, n, m, 0, 0).unwrap()
    }

    #[test]
    fn plain_ring_descriptor() {
        let r = ring(3, 8, 1);
        assert_eq!(r.degree(), 1);
        assert_eq!(r.modulus(), 6561);
    }

    #[test]
    fn zeta3_minimal_polynomial() {
        let r = ring(3, 8, 3);
        let z = PadicScalar::zeta(&r);
        let lhs = z.mul(&z).add(&z).add(&PadicScalar::one(&r));
        assert!(lhs.is_zero());
        assert!(z.pow_u64(3) == PadicScalar::one(&r));
    }

    #[test]
    fn gaussian_ring_has_square_root_of_minus_one() {
        let r = ring_make(5, 6, 4, 1, 4).unwrap();
        let i = PadicScalar::zeta(&r);
        assert_eq!(i.mul(&i), PadicScalar::from_int(&r, -1));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(ring_make(9, 4, 1, 0, 0), Err(CoeffError::CompositePrime(9)));
        assert!(matches!(ring_make(5, 4, 3, 0, 0), Err(CoeffError::UnsupportedCyclotomic { .. })));
        assert!(ring_make(3, 4, 1, 0, 2).is_err());
    }

    #[test]
    fn valuation_examples() {
        let r = ring(3, 8, 1);
        assert_eq!(PadicScalar::from_int(&r, 9).valuation(), Valuation::Finite(Rational64::from_integer(2)));
        assert_eq!(PadicScalar::from_int(&r, 4).valuation(), Valuation::Finite(Rational64::from_integer(0)));
        assert_eq!(PadicScalar::zero(&r).valuation(), Valuation::AtLeast(8));
        let r3 = ring(3, 8, 3);
        let pi = PadicScalar::zeta(&r3).sub(&PadicScalar::one(&r3));
        assert_eq!(pi.valuation(), Valuation::Finite(Rational64::new(1, 2)));
    }

    #[test]
    fn unit_inverse_examples() {
        let r = ring(5, 3, 1);
        let x = PadicScalar::from_int(&r, 6);
        assert_eq!(x.unit_inverse().unwrap(), PadicScalar::from_int(&r, 1 - 5 + 25));
        let r = ring(3, 4, 1);
        assert_eq!(PadicScalar::from_int(&r, 2).unit_inverse().unwrap(), PadicScalar::from_int(&r, 41));
        assert_eq!(PadicScalar::from_int(&r, 3).unit_inverse(), Err(CoeffError::NotAUnit));
    }

    #[test]
    fn specialize_geometric_sum() {
        let r = ring_make(3, 8, 1, 1, 3).unwrap();
        let terms = (0..=3).map(|d| (vec![d], PadicScalar::one(&r)));
        let f = AffinoidScalar::from_terms(&r, terms).unwrap();
        let got = f.specialize(&[PadicScalar::from_int(&r, 3)]).unwrap();
        assert_eq!(got.value, PadicScalar::from_int(&r, 40));
        assert_eq!(got.precision, 4);
    }

    #[test]
    fn specialize_rejects_points_outside_disc() {
        let r = ring_make(3, 8, 1, 1, 3).unwrap();
        let f = AffinoidScalar::one(&r);
        assert_eq!(f.specialize(&[PadicScalar::from_int(&r, 2)]), Err(CoeffError::OutsideDisc));
        assert!(matches!(f.specialize(&[]), Err(CoeffError::Arity { .. })));
    }

    #[test]
    fn json_round_trip() {
        let r = ring(3, 8, 3);
        let z = PadicScalar::zeta(&r).add(&PadicScalar::from_int(&r, 17));
        let back = PadicScalar::from_json(&r, &z.to_json()).unwrap();
        assert_eq!(back, z);
    }
}
