use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;

use super::ring::Ring;
use super::scalar::{Approx, PadicScalar, Valuation};
use super::CoeffError;

/// Truncated power series in the ring's weight variables.
#[derive(Clone, PartialEq)]
pub struct AffinoidScalar {
    ring: Ring,
    terms: BTreeMap<Vec<u32>, PadicScalar>,
}

impl fmt::Debug for AffinoidScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl AffinoidScalar {
    pub fn zero(ring: &Ring) -> Self {
        AffinoidScalar { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(c: PadicScalar) -> Self {
        let ring = c.ring().clone();
        let mut out = Self::zero(&ring);
        out.set(vec![0; ring.weight_variables()], c);
        out
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(PadicScalar::one(ring))
    }

    /// The weight variable w_i.
    pub fn variable(ring: &Ring, i: usize) -> Result<Self, CoeffError> {
        if i >= ring.weight_variables() {
            return Err(CoeffError::Arity { expected: ring.weight_variables(), found: i + 1 });
        }
        let mut out = Self::zero(ring);
        if ring.series_degree() >= 1 {
            let mut deg = vec![0; ring.weight_variables()];
            deg[i] = 1;
            out.set(deg, PadicScalar::one(ring));
        }
        Ok(out)
    }

    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Vec<u32>, PadicScalar)>) -> Result<Self, CoeffError> {
        let mut out = Self::zero(ring);
        for (deg, c) in terms {
            if deg.len() != ring.weight_variables() {
                return Err(CoeffError::Arity { expected: ring.weight_variables(), found: deg.len() });
            }
            if deg.iter().sum::<u32>() > ring.series_degree() {
                return Err(CoeffError::InvalidParameters(format!("multi-degree {deg:?} exceeds truncation")));
            }
            let c = out.coefficient(&deg).add(&c);
            out.set(deg, c);
        }
        Ok(out)
    }

    fn set(&mut self, deg: Vec<u32>, c: PadicScalar) {
        if c.is_zero() {
            self.terms.remove(&deg);
        } else {
            self.terms.insert(deg, c);
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &PadicScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, deg: &[u32]) -> PadicScalar {
        self.terms.get(deg).cloned().unwrap_or_else(|| PadicScalar::zero(&self.ring))
    }

    pub fn constant_term(&self) -> PadicScalar {
        self.coefficient(&vec![0; self.ring.weight_variables()])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (deg, c) in &other.terms {
            let v = out.coefficient(deg).add(c);
            out.set(deg.clone(), v);
        }
        out
    }

    pub fn neg(&self) -> Self {
        AffinoidScalar { ring: self.ring.clone(), terms: self.terms.iter().map(|(d, c)| (d.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        let mut out = Self::zero(&self.ring);
        for (deg, c) in &self.terms {
            out.set(deg.clone(), c.mul(s));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cap = self.ring.series_degree();
        let mut out = Self::zero(&self.ring);
        for (da, a) in &self.terms {
            let ta: u32 = da.iter().sum();
            for (db, b) in &other.terms {
                if ta + db.iter().sum::<u32>() > cap {
                    continue;
                }
                let deg: Vec<u32> = da.iter().zip(db).map(|(x, y)| x + y).collect();
                let v = out.coefficient(&deg).add(&a.mul(b));
                out.set(deg, v);
            }
        }
        out
    }

    pub fn is_unit(&self) -> bool {
        self.constant_term().is_unit()
    }

    /// Inverse when the constant term is a unit; the non-constant part is nilpotent after truncation.
    pub fn unit_inverse(&self) -> Result<Self, CoeffError> {
        let c0 = self.constant_term();
        let c0_inv = c0.unit_inverse()?;
        // self = c0 (1 + g) with g of positive degree.
        let g = self.scale(&c0_inv).sub(&Self::one(&self.ring));
        let mut term = Self::one(&self.ring);
        let mut sum = Self::one(&self.ring);
        let minus_g = g.neg();
        for _ in 0..self.ring.series_degree() {
            term = term.mul(&minus_g);
            sum = sum.add(&term);
        }
        Ok(sum.scale(&c0_inv))
    }

    pub fn pow(&self, exp: i64) -> Result<Self, CoeffError> {
        let base = if exp < 0 { self.unit_inverse()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one(&self.ring);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Minimum valuation over coefficients (Gauss norm on the closed unit polydisc).
    pub fn min_valuation(&self) -> Valuation {
        let mut best = Valuation::AtLeast(self.ring.precision());
        for c in self.terms.values() {
            let v = c.valuation();
            if v < best {
                best = v;
            }
        }
        best
    }

    /// Evaluates at a point of the disc v(w_i) ≥ 1.
    ///
    /// Truncation leaves an error of valuation at least v_min·(D+1), where v_min is the
    /// smallest valuation among the coordinates, so the result is tagged with
    /// min(N, v_min·(D+1)) whenever the point is nonzero.
    pub fn specialize(&self, point: &[PadicScalar]) -> Result<Approx<PadicScalar>, CoeffError> {
        let k = self.ring.weight_variables();
        if point.len() != k {
            return Err(CoeffError::Arity { expected: k, found: point.len() });
        }
        let mut vmin: Option<Rational64> = None;
        for x in point {
            match x.valuation() {
                Valuation::AtLeast(_) => {}
                Valuation::Finite(v) => {
                    if v < Rational64::from_integer(1) {
                        return Err(CoeffError::OutsideDisc);
                    }
                    vmin = Some(vmin.map_or(v, |m| m.min(v)));
                }
            }
        }
        let mut acc = PadicScalar::zero(&self.ring);
        for (deg, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(deg) {
                term = term.mul(&x.pow_u64(e as u64));
            }
            acc = acc.add(&term);
        }
        let n = self.ring.precision();
        let precision = match vmin {
            None => n,
            Some(v) => {
                let bound = v * Rational64::from_integer(self.ring.series_degree() as i64 + 1);
                let floor = (bound.numer() / bound.denom()) as u32;
                n.min(floor)
            }
        };
        Ok(Approx { value: acc, precision })
    }

    /// Substitutes a classical point exactly: only valid when the series is a polynomial of degree ≤ D
    /// that is known to be exact (no truncation tail), e.g. constants and linear families.
    pub fn evaluate_polynomial(&self, point: &[PadicScalar]) -> Result<PadicScalar, CoeffError> {
        Ok(self.specialize_unchecked(point))
    }

    fn specialize_unchecked(&self, point: &[PadicScalar]) -> PadicScalar {
        let mut acc = PadicScalar::zero(&self.ring);
        for (deg, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(deg) {
                term = term.mul(&x.pow_u64(e as u64));
            }
            acc = acc.add(&term);
        }
        acc
    }
}

/// Multi-indices of total degree ≤ d in k variables, ordered by total degree.
pub fn multi_indices(k: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; k]];
    if k == 0 {
        return out;
    }
    for total in 1..=d {
        let mut level = Vec::new();
        compositions(k, total, &mut vec![0; k], 0, &mut level);
        out.extend(level);
    }
    out
}

fn compositions(k: usize, remaining: u32, current: &mut Vec<u32>, pos: usize, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == k {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for x in (0..=remaining).rev() {
        current[pos] = x;
        compositions(k, remaining - x, current, pos + 1, out);
    }
    current[pos] = 0;
}
