use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};

use super::ring::{inverse_mod, Ring};
use super::CoeffError;

/// p-adic valuation of a finite-precision element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(Rational64),
    /// Indistinguishable from zero; the true valuation is at least this.
    AtLeast(u32),
}

impl Valuation {
    pub fn is_zero(&self) -> bool {
        matches!(self, Valuation::Finite(v) if v.is_zero())
    }

    /// Lower bound usable in comparisons; `AtLeast(n)` counts as `n`.
    pub fn lower_bound(&self) -> Rational64 {
        match *self {
            Valuation::Finite(v) => v,
            Valuation::AtLeast(n) => Rational64::from_integer(n as i64),
        }
    }

    pub fn as_f64(&self) -> f64 {
        let v = self.lower_bound();
        *v.numer() as f64 / *v.denom() as f64
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Valuation::AtLeast(a), Valuation::AtLeast(b)) => a.partial_cmp(b),
            _ => self.lower_bound().partial_cmp(&other.lower_bound()),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

/// A value together with the absolute precision (in p-digits) it is known to.
#[derive(Debug, Clone, PartialEq)]
pub struct Approx<T> {
    pub value: T,
    pub precision: u32,
}

/// Element of Z/p^N[ζ_{p^s}], stored in the ζ-basis.
#[derive(Clone)]
pub struct PadicScalar {
    ring: Ring,
    coeffs: Vec<u64>,
}

impl PartialEq for PadicScalar {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && (Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring)
    }
}
impl Eq for PadicScalar {}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            write!(f, "{} (mod {}^{})", self.coeffs[0], self.ring.p(), self.ring.precision())
        } else {
            write!(f, "{:?} (mod {}^{})", self.coeffs, self.ring.p(), self.ring.precision())
        }
    }
}

impl PadicScalar {
    pub fn zero(ring: &Ring) -> Self {
        PadicScalar { ring: ring.clone(), coeffs: vec![0; ring.degree()] }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::from_int(ring, 1)
    }

    pub fn from_int(ring: &Ring, value: i64) -> Self {
        let mut s = Self::zero(ring);
        s.coeffs[0] = ring.reduce_i128(value as i128);
        s
    }

    pub fn from_bigint(ring: &Ring, value: &BigInt) -> Self {
        let m = BigInt::from(ring.modulus());
        let r = value.mod_floor(&m);
        let mut s = Self::zero(ring);
        s.coeffs[0] = r.to_u64().expect("reduced below modulus");
        s
    }

    /// Reduces a rational with p-unit denominator.
    pub fn from_rational(ring: &Ring, value: &BigRational) -> Result<Self, CoeffError> {
        let den = value.denom().mod_floor(&BigInt::from(ring.modulus())).to_u64().unwrap_or(0);
        let inv = inverse_mod(den, ring.modulus()).ok_or(CoeffError::NotAUnit)?;
        let num = Self::from_bigint(ring, value.numer());
        Ok(num.mul_int(inv as i64))
    }

    pub fn from_coeffs(ring: &Ring, coeffs: &[i64]) -> Result<Self, CoeffError> {
        if coeffs.len() > ring.degree() {
            return Err(CoeffError::InvalidParameters(format!(
                "{} coefficients for a ring of degree {}",
                coeffs.len(),
                ring.degree()
            )));
        }
        let mut s = Self::zero(ring);
        for (slot, &c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = ring.reduce_i128(c as i128);
        }
        Ok(s)
    }

    /// Primitive p^s-th root of unity times the tame Teichmüller root: a primitive m-th root of unity.
    pub fn zeta(ring: &Ring) -> Self {
        let tame = Self::from_int(ring, ring.tame_root_value() as i64);
        if ring.wild_exponent() == 0 {
            return tame;
        }
        let mut x = Self::zero(ring);
        if ring.degree() > 1 {
            x.coeffs[1] = 1;
        } else {
            // Φ_2(x) = x + 1 for p = 2, s = 1.
            x.coeffs[0] = ring.reduce_i128(-1);
        }
        tame.mul(&x)
    }

    /// A root of unity of exact order `order`, which must divide m.
    pub fn root_of_unity(ring: &Ring, order: u64) -> Result<Self, CoeffError> {
        let m = ring.cyclotomic_order();
        if order == 0 || !m.is_multiple_of(order) {
            return Err(CoeffError::InvalidParameters(format!("order {order} does not divide m = {m}")));
        }
        Ok(Self::zeta(ring).pow_u64(m / order))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Integer representative when the element lies in Z/p^N.
    pub fn as_integer(&self) -> Option<u64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    /// Symmetric integer representative in (-p^N/2, p^N/2].
    pub fn as_signed_integer(&self) -> Option<i64> {
        let c = self.as_integer()? as i128;
        let m = self.ring.modulus() as i128;
        Some(if c > m / 2 { (c - m) as i64 } else { c as i64 })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_ring(&self, other: &Self) {
        debug_assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring,
            "mixed rings {:?} vs {:?}",
            self.ring,
            other.ring
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_ring(other);
        let m = self.ring.modulus();
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| ((a as u128 + b as u128) % m as u128) as u64).collect();
        PadicScalar { ring: self.ring.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_ring(other);
        let m = self.ring.modulus();
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| ((a as u128 + m as u128 - b as u128) % m as u128) as u64).collect();
        PadicScalar { ring: self.ring.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        Self::zero(&self.ring).sub(self)
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let m = self.ring.modulus() as u128;
        let k = self.ring.reduce_i128(k as i128) as u128;
        let coeffs = self.coeffs.iter().map(|&a| ((a as u128 * k) % m) as u64).collect();
        PadicScalar { ring: self.ring.clone(), coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_ring(other);
        let e = self.ring.degree();
        let m = self.ring.modulus() as u128;
        if e == 1 {
            let v = (self.coeffs[0] as u128 * other.coeffs[0] as u128) % m;
            return PadicScalar { ring: self.ring.clone(), coeffs: vec![v as u64] };
        }
        let mut prod = vec![0u128; 2 * e - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                prod[i + j] = (prod[i + j] + a as u128 * b as u128) % m;
            }
        }
        let phi = self.ring.cyclotomic_poly();
        for top in (e..2 * e - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (k, &f) in phi[..e].iter().enumerate() {
                if f != 0 {
                    let idx = top - e + k;
                    prod[idx] = (prod[idx] + m - (c * f as u128) % m) % m;
                }
            }
        }
        PadicScalar { ring: self.ring.clone(), coeffs: prod[..e].iter().map(|&c| c as u64).collect() }
    }

    pub fn pow_u64(&self, mut exp: u64) -> Self {
        let mut acc = Self::one(&self.ring);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// Integer power; negative exponents need a unit.
    pub fn pow(&self, exp: i64) -> Result<Self, CoeffError> {
        if exp >= 0 {
            Ok(self.pow_u64(exp as u64))
        } else {
            Ok(self.unit_inverse()?.pow_u64(exp.unsigned_abs()))
        }
    }

    /// Coefficients in the basis π^k, π = ζ_{p^s} − 1.
    fn uniformizer_coeffs(&self) -> Vec<u64> {
        let e = self.ring.degree();
        if e == 1 {
            return self.coeffs.clone();
        }
        let m = self.ring.modulus() as u128;
        // Taylor shift a(π + 1) by repeated synthetic division.
        let mut a: Vec<u128> = self.coeffs.iter().map(|&c| c as u128).collect();
        for i in 0..e {
            for j in (i..e - 1).rev() {
                a[j] = (a[j] + a[j + 1]) % m;
            }
        }
        a.into_iter().map(|c| c as u64).collect()
    }

    pub fn valuation(&self) -> Valuation {
        let p = self.ring.p();
        let e = self.ring.degree() as i64;
        let mut best: Option<Rational64> = None;
        for (k, c) in self.uniformizer_coeffs().into_iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut v = 0i64;
            let mut c = c;
            while c % p == 0 {
                c /= p;
                v += 1;
            }
            let val = Rational64::new(v * e + k as i64, e);
            best = Some(match best {
                Some(b) if b <= val => b,
                _ => val,
            });
        }
        match best {
            Some(v) => Valuation::Finite(v),
            None => Valuation::AtLeast(self.ring.precision()),
        }
    }

    pub fn is_unit(&self) -> bool {
        // Residue field is F_p, reached by ζ ↦ 1.
        let s: u128 = self.coeffs.iter().map(|&c| c as u128).sum();
        !s.is_multiple_of(self.ring.p() as u128)
    }

    pub fn unit_inverse(&self) -> Result<Self, CoeffError> {
        if !self.is_unit() {
            return Err(CoeffError::NotAUnit);
        }
        let m = self.ring.modulus();
        let residue: u128 = self.coeffs.iter().map(|&c| c as u128).sum::<u128>() % m as u128;
        let start = inverse_mod(residue as u64, m).ok_or(CoeffError::NotAUnit)?;
        let one = Self::one(&self.ring);
        let two = Self::from_int(&self.ring, 2);
        let mut y = Self::from_int(&self.ring, start as i64);
        for _ in 0..128 {
            let xy = self.mul(&y);
            if xy == one {
                return Ok(y);
            }
            y = y.mul(&two.sub(&xy));
        }
        Err(CoeffError::NotAUnit)
    }

    /// Multiplies by p^k.
    pub fn mul_p_power(&self, k: u32) -> Self {
        let p = self.ring.p() as i64;
        let mut out = self.clone();
        for _ in 0..k {
            out = out.mul_int(p);
        }
        out
    }

    /// Exact division by p^k; the result is known to precision N − k.
    pub fn div_p_power(&self, k: u32) -> Result<Approx<Self>, CoeffError> {
        let pk = (self.ring.p() as u128).pow(k);
        if self.coeffs.iter().any(|&c| !(c as u128).is_multiple_of(pk)) {
            return Err(CoeffError::NotDivisible { k });
        }
        let coeffs = self.coeffs.iter().map(|&c| (c as u128 / pk) as u64).collect();
        Ok(Approx {
            value: PadicScalar { ring: self.ring.clone(), coeffs },
            precision: self.ring.precision().saturating_sub(k),
        })
    }

    /// Largest k ≤ N with every ζ-basis coefficient divisible by p^k.
    pub fn p_divisibility(&self) -> u32 {
        let p = self.ring.p();
        let mut best = self.ring.precision();
        for &c in &self.coeffs {
            if c == 0 {
                continue;
            }
            let mut v = 0;
            let mut c = c;
            while c % p == 0 {
                c /= p;
                v += 1;
            }
            best = best.min(v);
        }
        best
    }

    /// True when self ≡ other modulo p^k.
    pub fn eq_mod(&self, other: &Self, k: u32) -> bool {
        self.sub(other).p_divisibility() >= k.min(self.ring.precision())
    }

    /// Reduces to a ring of smaller (or equal) precision with the same shape.
    pub fn reduce_to(&self, ring: &Ring) -> Self {
        let m = ring.modulus();
        PadicScalar { ring: ring.clone(), coeffs: self.coeffs.iter().map(|&c| c % m).collect() }
    }

    /// Lifts the canonical representative into a ring of larger precision.
    pub fn lift_to(&self, ring: &Ring) -> Self {
        PadicScalar { ring: ring.clone(), coeffs: self.coeffs.clone() }
    }

    /// Base-p digits of each ζ-basis coefficient, little-endian, N digits each.
    pub fn digits(&self) -> Vec<Vec<u64>> {
        let p = self.ring.p();
        self.coeffs
            .iter()
            .map(|&c| {
                let mut c = c;
                (0..self.ring.precision())
                    .map(|_| {
                        let d = c % p;
                        c /= p;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_digits(ring: &Ring, digits: &[Vec<u64>]) -> Result<Self, CoeffError> {
        if digits.len() != ring.degree() {
            return Err(CoeffError::Schema(format!("expected {} coefficients, found {}", ring.degree(), digits.len())));
        }
        let p = ring.p();
        let mut coeffs = Vec::with_capacity(digits.len());
        for ds in digits {
            if ds.len() > ring.precision() as usize || ds.iter().any(|&d| d >= p) {
                return Err(CoeffError::Schema("digit out of range".into()));
            }
            let mut c = 0u64;
            for &d in ds.iter().rev() {
                c = c * p + d;
            }
            coeffs.push(c);
        }
        Ok(PadicScalar { ring: ring.clone(), coeffs })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.ring.p(),
            "N": self.ring.precision(),
            "m": self.ring.cyclotomic_order(),
            "coeffs": self.digits(),
        })
    }

    pub fn from_json(ring: &Ring, value: &serde_json::Value) -> Result<Self, CoeffError> {
        let field = |name: &str| value.get(name).and_then(|v| v.as_u64()).ok_or_else(|| CoeffError::Schema(format!("missing integer field {name}")));
        if field("p")? != ring.p() || field("N")? != ring.precision() as u64 || field("m")? != ring.cyclotomic_order() {
            return Err(CoeffError::Schema("scalar descriptor does not match ring".into()));
        }
        let digits: Vec<Vec<u64>> = serde_json::from_value(value.get("coeffs").cloned().unwrap_or_default()).map_err(|e| CoeffError::Schema(e.to_string()))?;
        Self::from_digits(ring, &digits)
    }
}

/// p^exponent · mantissa, for quantities with negative valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct PadicNumber {
    pub exponent: i64,
    pub mantissa: PadicScalar,
}

impl PadicNumber {
    pub fn from_scalar(s: PadicScalar) -> Self {
        PadicNumber { exponent: 0, mantissa: s }
    }

    pub fn valuation(&self) -> Valuation {
        match self.mantissa.valuation() {
            Valuation::Finite(v) => Valuation::Finite(v + Rational64::from_integer(self.exponent)),
            Valuation::AtLeast(n) => Valuation::AtLeast((n as i64 + self.exponent).max(0) as u32),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        PadicNumber { exponent: self.exponent + other.exponent, mantissa: self.mantissa.mul(&other.mantissa) }
    }

    /// Pulls all p-power factors of an integral rational into the exponent.
    pub fn from_rational(ring: &Ring, value: &BigRational) -> Result<Self, CoeffError> {
        if value.is_zero() {
            return Ok(PadicNumber { exponent: 0, mantissa: PadicScalar::zero(ring) });
        }
        let p = BigInt::from(ring.p());
        let mut num = value.numer().abs();
        let mut den = value.denom().clone();
        let mut exponent = 0i64;
        while (&num % &p).is_zero() {
            num /= &p;
            exponent += 1;
        }
        while (&den % &p).is_zero() {
            den /= &p;
            exponent -= 1;
        }
        if value.is_negative() {
            num = -num;
        }
        let mantissa = PadicScalar::from_rational(ring, &BigRational::new(num, den))?;
        Ok(PadicNumber { exponent, mantissa })
    }
}
