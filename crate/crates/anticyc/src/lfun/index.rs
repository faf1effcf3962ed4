//! Brute-force index of consecutive level groups in the conjugated model c_β = u·t_p^β.
//!
//! An element n of N(Z/p^M) (both components) belongs to the deeper level exactly when
//! c_{β+1}^{-1}·(c_β n c_β^{-1})·c_{β+1} lies in Iw_G; the index is |N(Z/p^M)| over the count.

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

use super::LfunError;

/// Largest number of unipotent pairs enumerated.
const ENUMERATION_GUARD: u128 = 20_000_000;

type Mat = Vec<Vec<Rational64>>;

fn identity(size: usize) -> Mat {
    (0..size).map(|r| (0..size).map(|c| if r == c { Rational64::one() } else { Rational64::zero() }).collect()).collect()
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|r| (0..n).map(|c| (0..n).map(|k| a[r][k] * b[k][c]).sum()).collect()).collect()
}

fn inverse(a: &Mat) -> Mat {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = identity(n);
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero()).expect("invertible");
        m.swap(k, pivot);
        inv.swap(k, pivot);
        let scale = m[k][k].recip();
        for c in 0..n {
            m[k][c] *= scale;
            inv[k][c] *= scale;
        }
        for r in 0..n {
            if r != k && !m[r][k].is_zero() {
                let f = m[r][k];
                for c in 0..n {
                    let (mk, ik) = (m[k][c], inv[k][c]);
                    m[r][c] -= f * mk;
                    inv[r][c] -= f * ik;
                }
            }
        }
    }
    inv
}

/// t_p^β on a component of the given size: diag(p^{β(size−1)}, …, p^β, 1).
fn torus_power(size: usize, p: i64, beta: u32) -> Mat {
    let mut m = identity(size);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational64::from_integer(p.pow(beta * (size - 1 - i) as u32));
    }
    m
}

/// Identity with a last column of ones.
fn g0(size: usize) -> Mat {
    let mut m = identity(size);
    for row in m.iter_mut() {
        row[size - 1] = Rational64::one();
    }
    m
}

fn is_iwahori(m: &Mat, p: i64) -> bool {
    m.iter().enumerate().all(|(r, row)| {
        row.iter().enumerate().all(|(c, x)| {
            if !x.is_integer() {
                return false;
            }
            let v = x.to_integer().rem_euclid(p);
            match r.cmp(&c) {
                std::cmp::Ordering::Equal => v != 0,
                std::cmp::Ordering::Greater => v == 0,
                std::cmp::Ordering::Less => true,
            }
        })
    })
}

/// Conjugating element c_β for one component, with u = g_0 on the big one.
fn conjugator(size: usize, big: bool, p: i64, beta: u32) -> Mat {
    let u = if big { g0(size) } else { identity(size) };
    mul(&u, &torus_power(size, p, beta))
}

/// For one component: the number of n ∈ N(Z/p^M) passing the membership test, and |N(Z/p^M)|.
fn component_count(size: usize, big: bool, p: i64, beta: u32, modulus_exponent: u32) -> (u128, u128) {
    let positions: Vec<(usize, usize)> = (0..size).flat_map(|r| (r + 1..size).map(move |c| (r, c))).collect();
    let q = p.pow(modulus_exponent);
    let total = (q as u128).pow(positions.len() as u32);
    let c = conjugator(size, big, p, beta);
    let c_inv = inverse(&c);
    let d = conjugator(size, big, p, beta + 1);
    let d_inv = inverse(&d);
    let mut passing = 0u128;
    let mut digits = vec![0i64; positions.len()];
    for _ in 0..total {
        let mut n = identity(size);
        for (&(r, col), &x) in positions.iter().zip(&digits) {
            n[r][col] = Rational64::from_integer(x);
        }
        let m = mul(&mul(&d_inv, &mul(&mul(&c, &n), &c_inv)), &d);
        if is_iwahori(&m, p) {
            passing += 1;
        }
        for x in digits.iter_mut() {
            *x += 1;
            if *x < q {
                break;
            }
            *x = 0;
        }
    }
    (passing, total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub n: usize,
    pub p: u64,
    pub beta: u32,
    pub enumerated: u128,
    /// log_p of the enumerated index, when it is a power of p.
    pub enumerated_exponent: Option<u32>,
    /// n(n+1)(n+2)/3.
    pub formula_exponent: u32,
    pub matches: bool,
}

/// The enumerated index for (n, p, β), with entries taken modulo p^{n+1}.
pub fn enumerate_index(n: usize, p: u64, beta: u32) -> Result<u128, LfunError> {
    if beta == 0 {
        return Err(LfunError::BetaZero);
    }
    let modulus_exponent = n as u32 + 1;
    let dim = (n * n) as u32;
    let size = (p as u128).checked_pow(modulus_exponent * dim).ok_or(LfunError::EnumerationTooLarge(u128::MAX))?;
    if size > ENUMERATION_GUARD {
        return Err(LfunError::EnumerationTooLarge(size));
    }
    let p = p as i64;
    let (pass_big, total_big) = component_count(n + 1, true, p, beta, modulus_exponent);
    let (pass_small, total_small) = component_count(n, false, p, beta, modulus_exponent);
    Ok((total_big * total_small) / (pass_big * pass_small))
}

/// Compares the enumeration with p^{n(n+1)(n+2)/3}.
pub fn index_check(n: usize, p: u64, beta: u32) -> Result<IndexReport, LfunError> {
    let enumerated = enumerate_index(n, p, beta)?;
    let mut rest = enumerated;
    let mut exponent = 0u32;
    while rest > 1 && rest % p as u128 == 0 {
        rest /= p as u128;
        exponent += 1;
    }
    let enumerated_exponent = (rest == 1).then_some(exponent);
    let formula_exponent = (n * (n + 1) * (n + 2) / 3) as u32;
    Ok(IndexReport { n, p, beta, enumerated, enumerated_exponent, formula_exponent, matches: enumerated_exponent == Some(formula_exponent) })
}
