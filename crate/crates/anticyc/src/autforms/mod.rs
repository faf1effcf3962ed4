//! Algebraic modular forms on a finite class-set model, with the U_p operator,
//! classical projection and localization at an isolated eigenvalue.
//!
//! A model lists the classes x_1..x_h, their stabilizer orders, and for every class x
//! and every coset δ_j = n_j·t_p·k'_j of Iw·t_p·Iw/Iw the class x_t with x·δ_j = γ·x_t·k
//! together with the Iwahori element k. Then (U_p φ)(x) = Σ_j (δ_j·k^{-1}) ⋆ φ(x_t).

mod form;
mod synthetic;
#[cfg(test)]
mod tests;

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::branching::{BranchingError, MatrixPair};
use crate::coeff::{CoeffError, Ring};
use crate::dist::action::MonoidElement;
use crate::dist::DistError;
use crate::linalg::EigenError;
use crate::weights::WeightError;

pub use form::{
    classical_basis, classical_project, divide_by_alpha, eigen_ring, find_eigenform, lift_eigenform, localize, up_apply, up_matrix, working_degree, ClassicalForm, EigenForm, Localization, ModularForm,
    EIGEN_GUARD_DIGITS,
};
pub use synthetic::{bundled_model, named_spec, synthetic_model, toy_weight, EigenTarget, SyntheticSpec, NAMED_MODELS, TOY_PRECISION, TOY_REPORT_DEGREE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AutformsError {
    #[error("schema: {0}")]
    Schema(String),
    #[error("inconsistent class-set model: {0}")]
    Inconsistent(String),
    #[error("class {class} has {found} U_p cosets, expected {expected}")]
    CosetCount { class: usize, expected: usize, found: usize },
    #[error("truncation degree {have} is below the algebraic degree {needed}")]
    TruncationTooSmall { needed: u32, have: u32 },
    #[error("no eigenvalue near the requested one")]
    EmptyEigenspace,
    #[error("slope {slope} is critical for the weight (bound {bound})")]
    Critical { slope: u32, bound: i64 },
    #[error("generator found no model after {0} attempts")]
    GeneratorExhausted(u64),
    #[error("forms of different shape")]
    Shape,
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Branching(#[from] BranchingError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// An integral matrix pair (g, g') of sizes n+1 and n, as nested rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerPair {
    pub big: Vec<Vec<i64>>,
    pub small: Vec<Vec<i64>>,
}

/// One row of the U_p table: the target class and the returning Iwahori element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetEntry(pub usize, pub IntegerPair);

/// One H-class: its index, the G-class it maps to and the order of its stabilizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodEntry(pub usize, pub usize, pub u64);

/// A coset representative δ_j = unipotent · t_p · iwahori.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetRep {
    pub unipotent: IntegerPair,
    pub iwahori: IntegerPair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSetModel {
    pub n: usize,
    pub p: u64,
    pub classes: Vec<String>,
    pub stabilizers: Vec<u64>,
    pub up_cosets: Vec<Vec<CosetEntry>>,
    pub h_period: Vec<PeriodEntry>,
    /// Representatives in canonical order; the canonical n_j·t_p when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coset_reps: Option<Vec<CosetRep>>,
    /// Away-from-p Hecke eigenvalues declared for the forms of this model.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub hecke_scalars: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// Sum of (j − i) over the strictly upper entries of both components: the exponent of the
/// number of U_p cosets.
pub fn coset_exponent(n: usize) -> u32 {
    (n * (n + 1) * (2 * n + 1) / 6) as u32
}

/// |Iw·t_p·Iw / Iw| = p^{n(n+1)(2n+1)/6}.
pub fn coset_count(n: usize, p: u64) -> usize {
    p.pow(coset_exponent(n)) as usize
}

/// Strictly upper positions of both components in coordinate order, with their contraction exponents.
fn upper_positions(n: usize) -> Vec<(bool, usize, usize)> {
    let mut out = Vec::new();
    for r in 0..=n {
        for c in r + 1..=n {
            out.push((true, r, c));
        }
    }
    for r in 0..n {
        for c in r + 1..n {
            out.push((false, r, c));
        }
    }
    out
}

fn identity_rows(size: usize) -> Vec<Vec<i64>> {
    (0..size).map(|r| (0..size).map(|c| i64::from(r == c)).collect()).collect()
}

/// The canonical representatives n_j: entry (i, k) ranges over [0, p^{k−i}), first coordinate fastest.
pub fn canonical_unipotents(n: usize, p: u64) -> Vec<IntegerPair> {
    let positions = upper_positions(n);
    let count = coset_count(n, p);
    (0..count)
        .map(|mut j| {
            let mut pair = IntegerPair { big: identity_rows(n + 1), small: identity_rows(n) };
            for &(big, r, c) in &positions {
                let radix = p.pow((c - r) as u32) as usize;
                let digit = (j % radix) as i64;
                j /= radix;
                if big {
                    pair.big[r][c] = digit;
                } else {
                    pair.small[r][c] = digit;
                }
            }
            pair
        })
        .collect()
}

fn int_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<Vec<i64>>, AutformsError> {
    let n = a.len();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let v: i128 = (0..n).map(|k| a[r][k] as i128 * b[k][c] as i128).sum();
                    i64::try_from(v).map_err(|_| AutformsError::Inconsistent("integer overflow in matrix product".into()))
                })
                .collect()
        })
        .collect()
}

/// Inverse of an upper unipotent integer matrix (back substitution).
fn unipotent_inverse(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut inv = identity_rows(n);
    for c in 0..n {
        for r in (0..c).rev() {
            let s: i64 = (r + 1..=c).map(|k| a[r][k] * inv[k][c]).sum();
            inv[r][c] = -s;
        }
    }
    inv
}

impl IntegerPair {
    pub fn identity(n: usize) -> Self {
        IntegerPair { big: identity_rows(n + 1), small: identity_rows(n) }
    }

    fn shape_ok(&self, n: usize) -> bool {
        self.big.len() == n + 1 && self.big.iter().all(|r| r.len() == n + 1) && self.small.len() == n && self.small.iter().all(|r| r.len() == n)
    }

    pub fn to_pair(&self, ring: &Ring) -> MatrixPair {
        MatrixPair::from_ints(ring, &self.big, &self.small)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AutformsError> {
        Ok(IntegerPair { big: int_mul(&self.big, &other.big)?, small: int_mul(&self.small, &other.small)? })
    }

    /// Lower entries divisible by p and diagonal entries units.
    pub fn is_iwahori(&self, p: u64) -> bool {
        let p = p as i64;
        let ok = |m: &Vec<Vec<i64>>| (0..m.len()).all(|r| (0..=r).all(|c| if r == c { m[r][c].rem_euclid(p) != 0 } else { m[r][c].rem_euclid(p) == 0 }));
        ok(&self.big) && ok(&self.small)
    }

    pub fn is_upper_unipotent(&self) -> bool {
        let ok = |m: &Vec<Vec<i64>>| (0..m.len()).all(|r| (0..=r).all(|c| m[r][c] == i64::from(r == c)));
        ok(&self.big) && ok(&self.small)
    }

    /// t_p^{-1}·self·t_p for an upper unipotent pair, if integral.
    fn contract_inverse(&self, p: u64) -> Option<Self> {
        let scale = |m: &Vec<Vec<i64>>| -> Option<Vec<Vec<i64>>> {
            let n = m.len();
            let mut out = m.clone();
            for (r, row) in out.iter_mut().enumerate() {
                for (c, x) in row.iter_mut().enumerate().skip(r + 1).take(n) {
                    let q = p.pow((c - r) as u32) as i64;
                    if *x % q != 0 {
                        return None;
                    }
                    *x /= q;
                }
            }
            Some(out)
        };
        Some(IntegerPair { big: scale(&self.big)?, small: scale(&self.small)? })
    }

    /// t_p·self·t_p^{-1} for an upper unipotent pair.
    fn contract(&self, p: u64) -> Self {
        let scale = |m: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
            let mut out = m.clone();
            for (r, row) in out.iter_mut().enumerate() {
                for (c, x) in row.iter_mut().enumerate().skip(r + 1) {
                    *x *= p.pow((c - r) as u32) as i64;
                }
            }
            out
        };
        IntegerPair { big: scale(&self.big), small: scale(&self.small) }
    }

    fn random_iwahori(rng: &mut ChaCha8Rng, n: usize, p: u64, principal_small: bool) -> Self {
        let p = p as i64;
        let unit = |rng: &mut ChaCha8Rng, principal: bool| -> i64 {
            loop {
                let u: i64 = rng.gen_range(-12..13);
                if principal && u.rem_euclid(p) == 1 || !principal && u.rem_euclid(p) != 0 {
                    return u;
                }
            }
        };
        let build = |rng: &mut ChaCha8Rng, size: usize, principal: bool| -> Vec<Vec<i64>> {
            (0..size)
                .map(|r| {
                    (0..size)
                        .map(|c| match r.cmp(&c) {
                            std::cmp::Ordering::Equal => unit(rng, principal),
                            std::cmp::Ordering::Greater => p * rng.gen_range(-3..4),
                            std::cmp::Ordering::Less => rng.gen_range(-6..7),
                        })
                        .collect()
                })
                .collect()
        };
        let big = build(rng, n + 1, false);
        let small = build(rng, n, principal_small);
        IntegerPair { big, small }
    }

    fn random_unipotent(rng: &mut ChaCha8Rng, n: usize) -> Self {
        let mut pair = IntegerPair::identity(n);
        for (big, r, c) in upper_positions(n) {
            let v = rng.gen_range(-4..5);
            if big {
                pair.big[r][c] = v;
            } else {
                pair.small[r][c] = v;
            }
        }
        pair
    }
}

/// Rational numbers for masses and period weights.
pub type Mass = Rational64;

impl ClassSetModel {
    pub fn from_json_str(text: &str) -> Result<Self, AutformsError> {
        let model: ClassSetModel = serde_json::from_str(text).map_err(|e| AutformsError::Schema(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self, AutformsError> {
        let text = std::fs::read_to_string(path).map_err(|e| AutformsError::Schema(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn h(&self) -> usize {
        self.classes.len()
    }

    /// Checks shapes, stabilizers, the coset count, that every return element is Iwahori and
    /// that every representative lies in its canonical coset.
    pub fn validate(&self) -> Result<(), AutformsError> {
        let h = self.h();
        if h == 0 {
            return Err(AutformsError::Schema("no classes".into()));
        }
        if self.n == 0 || self.n > 3 {
            return Err(AutformsError::Schema(format!("unsupported rank {}", self.n)));
        }
        if !crate::coeff::is_prime(self.p) {
            return Err(AutformsError::Schema(format!("{} is not prime", self.p)));
        }
        if self.stabilizers.len() != h || self.stabilizers.contains(&0) {
            return Err(AutformsError::Schema("one positive stabilizer order per class is required".into()));
        }
        if self.up_cosets.len() != h {
            return Err(AutformsError::Schema("one U_p coset list per class is required".into()));
        }
        let expected = coset_count(self.n, self.p);
        for (class, row) in self.up_cosets.iter().enumerate() {
            if row.len() != expected {
                return Err(AutformsError::CosetCount { class, expected, found: row.len() });
            }
            for (j, CosetEntry(target, k)) in row.iter().enumerate() {
                if *target >= h {
                    return Err(AutformsError::Inconsistent(format!("class {class}, coset {j}: target {target} out of range")));
                }
                if !k.shape_ok(self.n) {
                    return Err(AutformsError::Schema(format!("class {class}, coset {j}: Iwahori element has the wrong shape")));
                }
                if !k.is_iwahori(self.p) {
                    return Err(AutformsError::Inconsistent(format!("class {class}, coset {j}: return element is not in Iw_G")));
                }
            }
        }
        if let Some(reps) = &self.coset_reps {
            if reps.len() != expected {
                return Err(AutformsError::CosetCount { class: usize::MAX, expected, found: reps.len() });
            }
            for (j, (rep, canon)) in reps.iter().zip(canonical_unipotents(self.n, self.p)).enumerate() {
                if !rep.unipotent.shape_ok(self.n) || !rep.iwahori.shape_ok(self.n) || !rep.unipotent.is_upper_unipotent() || !rep.iwahori.is_iwahori(self.p) {
                    return Err(AutformsError::Inconsistent(format!("representative {j} is not of the form n·t_p·k")));
                }
                let inv = IntegerPair { big: unipotent_inverse(&canon.big), small: unipotent_inverse(&canon.small) };
                if inv.mul(&rep.unipotent)?.contract_inverse(self.p).is_none() {
                    return Err(AutformsError::Inconsistent(format!("representative {j} lies outside its coset")));
                }
            }
        }
        for PeriodEntry(_, g, w) in &self.h_period {
            if *g >= h || *w == 0 {
                return Err(AutformsError::Schema("period entries need a valid class and a positive stabilizer".into()));
            }
        }
        Ok(())
    }

    /// Σ 1/|stab|.
    pub fn mass(&self) -> Mass {
        self.stabilizers.iter().map(|&s| Rational64::new(1, s as i64)).sum()
    }

    /// Σ over H-classes of 1/|stab|, the total weight of the period sum.
    pub fn period_mass(&self) -> Mass {
        self.h_period.iter().map(|PeriodEntry(_, _, w)| Rational64::new(1, *w as i64)).sum()
    }

    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("model serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The representatives in use: (unipotent, Iwahori) with δ_j = unipotent·t_p·Iwahori.
    pub fn representatives(&self) -> Vec<CosetRep> {
        match &self.coset_reps {
            Some(r) => r.clone(),
            None => canonical_unipotents(self.n, self.p).into_iter().map(|u| CosetRep { unipotent: u, iwahori: IntegerPair::identity(self.n) }).collect(),
        }
    }

    /// The monoid elements δ_j·k_{x,j}^{-1} = n_j·t_p·(k'_j·k_{x,j}^{-1}) for every class and coset,
    /// written over `guard`.
    pub fn step_elements(&self, guard: &Ring) -> Result<Vec<Vec<(usize, MonoidElement)>>, AutformsError> {
        let reps = self.representatives();
        self.up_cosets
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&reps)
                    .map(|(CosetEntry(target, k), rep)| {
                        let inverse = k.to_pair(guard).inverse()?;
                        let iwahori = rep.iwahori.to_pair(guard).mul(&inverse);
                        Ok((*target, MonoidElement::new(rep.unipotent.to_pair(guard), 1, iwahori)?))
                    })
                    .collect()
            })
            .collect()
    }

    /// The same operator written with freshly randomized representatives: δ'_j = n_j·(t_p u t_p^{-1})·t_p·k'
    /// with random integral u and Iwahori k', and the return elements adjusted to k·u·k'.
    pub fn rerandomized(&self, seed: u64) -> Result<Self, AutformsError> {
        if self.coset_reps.is_some() {
            return Err(AutformsError::Inconsistent("re-randomization starts from canonical representatives".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut reps = Vec::new();
        let mut adjust = Vec::new();
        for canon in canonical_unipotents(self.n, self.p) {
            let u = IntegerPair::random_unipotent(&mut rng, self.n);
            let k = IntegerPair::random_iwahori(&mut rng, self.n, self.p, false);
            reps.push(CosetRep { unipotent: canon.mul(&u.contract(self.p))?, iwahori: k.clone() });
            adjust.push(u.mul(&k)?);
        }
        let up_cosets = self
            .up_cosets
            .iter()
            .map(|row| row.iter().zip(&adjust).map(|(CosetEntry(t, k), a)| Ok(CosetEntry(*t, k.mul(a)?))).collect::<Result<Vec<_>, AutformsError>>())
            .collect::<Result<Vec<_>, _>>()?;
        let out = ClassSetModel { up_cosets, coset_reps: Some(reps), ..self.clone() };
        out.validate()?;
        Ok(out)
    }
}
