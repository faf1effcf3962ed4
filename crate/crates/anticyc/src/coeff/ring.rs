use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CoeffError;

/// Largest modulus p^N we accept so that products fit in u128.
const MODULUS_CAP: u128 = 1 << 62;

/// Parameters of a finite-precision coefficient ring.
///
/// The ring is Z/p^N[ζ_{p^s}] in the ζ-basis, with the tame part of ζ_m realised
/// by a Teichmüller lift inside Z/p^N. Optional weight variables turn it into a
/// truncated affinoid ring.
#[derive(Clone, PartialEq, Eq)]
pub struct RingDescriptor {
    prime: u64,
    precision: u32,
    cyclotomic_order: u64,
    weight_variables: usize,
    series_degree: u32,
    modulus: u64,
    tame_order: u64,
    wild_exponent: u32,
    degree: usize,
    cyclotomic_poly: Vec<u64>,
    tame_root: u64,
}

pub type Ring = Arc<RingDescriptor>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub m: u64,
    #[serde(default)]
    pub k: usize,
    #[serde(default, rename = "D")]
    pub series_degree: u32,
}

impl fmt::Debug for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Ring(p={}, N={}, m={}, k={}, D={})",
            self.prime, self.precision, self.cyclotomic_order, self.weight_variables, self.series_degree
        )
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % modulus as u128) as u64;
        }
        base = ((base as u128 * base as u128) % modulus as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `modulus`, if it exists.
pub(crate) fn inverse_mod(a: u64, modulus: u64) -> Option<u64> {
    let eg = (a as i128).extended_gcd(&(modulus as i128));
    if eg.gcd != 1 {
        return None;
    }
    Some(eg.x.rem_euclid(modulus as i128) as u64)
}

fn primitive_root_mod_p(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let order = p - 1;
    let mut factors = Vec::new();
    let mut rest = order;
    let mut d = 2;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            factors.push(d);
            while rest.is_multiple_of(d) {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        factors.push(rest);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, order / q, p) != 1))
        .expect("every prime has a primitive root")
}

impl RingDescriptor {
    pub fn new(p: u64, precision: u32, m: u64, k: usize, series_degree: u32) -> Result<Ring, CoeffError> {
        if !is_prime(p) {
            return Err(CoeffError::CompositePrime(p));
        }
        if precision == 0 || m == 0 {
            return Err(CoeffError::InvalidParameters("N and m must be positive".into()));
        }
        if k == 0 && series_degree != 0 {
            return Err(CoeffError::InvalidParameters("series degree must be 0 without weight variables".into()));
        }
        let mut modulus: u128 = 1;
        for _ in 0..precision {
            modulus *= p as u128;
            if modulus > MODULUS_CAP {
                return Err(CoeffError::PrecisionTooLarge { p, precision });
            }
        }
        let mut tame_order = m;
        let mut wild_exponent = 0u32;
        while tame_order.is_multiple_of(p) {
            tame_order /= p;
            wild_exponent += 1;
        }
        if !(p - 1).is_multiple_of(tame_order) {
            return Err(CoeffError::UnsupportedCyclotomic { p, m });
        }
        let modulus = modulus as u64;
        let (degree, cyclotomic_poly) = if wild_exponent == 0 {
            (1, vec![0])
        } else {
            let stride = p.pow(wild_exponent - 1) as usize;
            let degree = (p as usize - 1) * stride;
            let mut poly = vec![0u64; degree + 1];
            for i in 0..p as usize {
                poly[i * stride] = 1;
            }
            (degree, poly)
        };
        let generator = primitive_root_mod_p(p);
        let teich = pow_mod(generator, modulus, modulus);
        let tame_root = pow_mod(teich, (p - 1) / tame_order, modulus);
        Ok(Arc::new(RingDescriptor {
            prime: p,
            precision,
            cyclotomic_order: m,
            weight_variables: k,
            series_degree,
            modulus,
            tame_order,
            wild_exponent,
            degree,
            cyclotomic_poly,
            tame_root,
        }))
    }

    pub fn from_spec(spec: &RingSpec) -> Result<Ring, CoeffError> {
        Self::new(spec.p, spec.precision, spec.m, spec.k, spec.series_degree)
    }

    pub fn spec(&self) -> RingSpec {
        RingSpec {
            p: self.prime,
            precision: self.precision,
            m: self.cyclotomic_order,
            k: self.weight_variables,
            series_degree: self.series_degree,
        }
    }

    /// Same ring at a different p-adic precision.
    pub fn with_precision(&self, precision: u32) -> Result<Ring, CoeffError> {
        Self::new(self.prime, precision, self.cyclotomic_order, self.weight_variables, self.series_degree)
    }

    pub fn p(&self) -> u64 {
        self.prime
    }
    pub fn precision(&self) -> u32 {
        self.precision
    }
    pub fn cyclotomic_order(&self) -> u64 {
        self.cyclotomic_order
    }
    pub fn weight_variables(&self) -> usize {
        self.weight_variables
    }
    pub fn series_degree(&self) -> u32 {
        self.series_degree
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    /// Rank of the ring over Z/p^N, also the ramification degree.
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn ramification(&self) -> u64 {
        self.degree as u64
    }
    pub fn tame_order(&self) -> u64 {
        self.tame_order
    }
    pub fn wild_exponent(&self) -> u32 {
        self.wild_exponent
    }
    pub(crate) fn cyclotomic_poly(&self) -> &[u64] {
        &self.cyclotomic_poly
    }
    pub(crate) fn tame_root_value(&self) -> u64 {
        self.tame_root
    }

    /// Hex digest identifying the descriptor in external files.
    pub fn content_hash(&self) -> String {
        let text = format!(
            "p={};N={};m={};k={};D={}",
            self.prime, self.precision, self.cyclotomic_order, self.weight_variables, self.series_degree
        );
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub(crate) fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }
}
