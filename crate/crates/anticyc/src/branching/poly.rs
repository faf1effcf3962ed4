//! Exact polynomials in the entries of a matrix pair (g, g').

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeff::{CoeffError, Coefficient, PadicScalar, Ring};

/// Variable layout: entries of the (n+1)×(n+1) matrix g, then of the n×n matrix g'.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Layout {
    pub n: usize,
}

impl Layout {
    pub fn big(&self, r: usize, c: usize) -> usize {
        r * (self.n + 1) + c
    }
    pub fn small(&self, r: usize, c: usize) -> usize {
        (self.n + 1) * (self.n + 1) + r * self.n + c
    }
    pub fn nvars(&self) -> usize {
        (self.n + 1) * (self.n + 1) + self.n * self.n
    }
}

pub type Monomial = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(m, BigRational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value of a constant polynomial.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&vec![0; self.nvars]).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Applies Σ_v target(v) ∂/∂v over the given (source, target) variable pairs.
    pub fn derivation(&self, pairs: &[(usize, usize)]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            for &(src, dst) in pairs {
                let e = m[src];
                if e == 0 {
                    continue;
                }
                let mut nm = m.clone();
                nm[src] -= 1;
                nm[dst] += 1;
                out.add_term(nm, c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    pub fn eval_rational(&self, values: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in values.iter().zip(m) {
                for _ in 0..e {
                    t *= v;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_padic(&self, ring: &Ring, values: &[PadicScalar]) -> Result<PadicScalar, CoeffError> {
        let max_deg = self.terms.keys().flat_map(|m| m.iter().copied()).max().unwrap_or(0) as usize;
        let powers: Vec<Vec<PadicScalar>> = values
            .iter()
            .map(|v| {
                let mut row = vec![PadicScalar::one(ring)];
                for k in 1..=max_deg {
                    let next = row[k - 1].mul(v);
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc = PadicScalar::zero(ring);
        for (m, c) in &self.terms {
            let mut t = PadicScalar::from_rational(ring, c)?;
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[i][e as usize]);
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Evaluation with values in any coefficient type (e.g. power series in local coordinates).
    pub fn eval_generic<T: Coefficient>(&self, ring: &Ring, values: &[T]) -> Result<T, CoeffError> {
        let like = &values[0];
        let max_deg = self.terms.keys().flat_map(|m| m.iter().copied()).max().unwrap_or(0) as usize;
        let powers: Vec<Vec<T>> = values
            .iter()
            .map(|v| {
                let mut row = vec![v.one_like()];
                for k in 1..=max_deg {
                    let next = row[k - 1].mul(v);
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc = like.zero_like();
        for (m, c) in &self.terms {
            let mut t = T::from_scalar(PadicScalar::from_rational(ring, c)?, like);
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[i][e as usize]);
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Total degree of the top monomial, or 0 for constants.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|&e| e as u32).sum()).max().unwrap_or(0)
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn max_abs_coefficient(&self) -> BigRational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
    }
}

/// Determinant of the submatrix on the given variable grid, expanded over permutations.
pub fn minor(nvars: usize, grid: &[Vec<usize>]) -> Poly {
    let k = grid.len();
    let mut out = Poly::zero(nvars);
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let sign = permutation_sign(&perm);
        let mut m = vec![0u8; nvars];
        for (r, &c) in perm.iter().enumerate() {
            m[grid[r][c]] += 1;
        }
        out.add_term(m, BigRational::from_integer(BigInt::from(sign)));
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Exact determinant over the rationals by Leibniz expansion (small matrices only).
pub fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let k = m.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut acc = BigRational::zero();
    if k == 0 {
        return BigRational::one();
    }
    loop {
        let mut t = BigRational::from_integer(BigInt::from(permutation_sign(&perm)));
        for (r, &c) in perm.iter().enumerate() {
            t *= &m[r][c];
        }
        acc += t;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    acc
}
