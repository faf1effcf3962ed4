//! p-adic spectral tools over Z/p^N: Newton polygons, Hensel lifting of an isolated
//! root of a characteristic polynomial, eigenvector refinement and linear solves with
//! precision bookkeeping.

use num_rational::Rational64;
use thiserror::Error;

use crate::coeff::{Approx, CoeffError, PadicScalar, Ring, Valuation};

use super::PadicMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("expected exactly one root of valuation {slope}, found {count}")]
    NotIsolated { slope: i64, count: usize },
    #[error("no simple root modulo p for the normalized polynomial")]
    NoResidue,
    #[error("matrix is not square")]
    NotSquare,
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("system is singular to working precision")]
    Singular,
    #[error("solution is not integral")]
    NotIntegral,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// One edge of a Newton polygon: `length` roots of valuation `valuation`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub valuation: Rational64,
    pub length: usize,
}

/// Newton polygon of Σ c_i x^i (coefficients low to high). Coefficients that vanish to
/// working precision are treated as zero; `zero_roots` counts roots at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolygon {
    pub segments: Vec<Segment>,
    pub zero_roots: usize,
}

impl NewtonPolygon {
    pub fn of(poly: &[PadicScalar]) -> Self {
        let points: Vec<(usize, Rational64)> = poly
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match c.valuation() {
                Valuation::Finite(v) => Some((i, v)),
                Valuation::AtLeast(_) => None,
            })
            .collect();
        let zero_roots = points.first().map(|p| p.0).unwrap_or(0);
        let mut segments = Vec::new();
        let mut cur = 0;
        while cur + 1 < points.len() {
            let (i0, v0) = points[cur];
            let mut best = cur + 1;
            let mut best_slope = (points[best].1 - v0) / Rational64::from_integer((points[best].0 - i0) as i64);
            for (k, &(i, v)) in points.iter().enumerate().skip(cur + 2) {
                let s = (v - v0) / Rational64::from_integer((i - i0) as i64);
                if s <= best_slope {
                    best = k;
                    best_slope = s;
                }
            }
            segments.push(Segment { valuation: -best_slope, length: points[best].0 - i0 });
            cur = best;
        }
        segments.reverse();
        NewtonPolygon { segments, zero_roots }
    }

    /// Number of roots of valuation exactly v.
    pub fn count(&self, v: Rational64) -> usize {
        self.segments.iter().filter(|s| s.valuation == v).map(|s| s.length).sum()
    }

    /// Root valuations with multiplicity, smallest first.
    pub fn valuations(&self) -> Vec<Rational64> {
        let mut out: Vec<Rational64> = self.segments.iter().flat_map(|s| std::iter::repeat_n(s.valuation, s.length)).collect();
        out.sort();
        out
    }
}

fn eval(poly: &[PadicScalar], x: &PadicScalar) -> PadicScalar {
    poly.iter().rev().fold(PadicScalar::zero(x.ring()), |acc, c| acc.mul(x).add(c))
}

fn derivative(poly: &[PadicScalar]) -> Vec<PadicScalar> {
    poly.iter().enumerate().skip(1).map(|(i, c)| c.mul_int(i as i64)).collect()
}

/// The unique root of valuation `slope` (a non-negative integer), found by Hensel
/// lifting the normalized polynomial P(p^slope·y)/p^m whose reduction has a simple
/// nonzero root.
pub fn isolated_root(poly: &[PadicScalar], slope: u32) -> Result<Approx<PadicScalar>, EigenError> {
    let ring = poly[0].ring().clone();
    let np = NewtonPolygon::of(poly);
    let count = np.count(Rational64::from_integer(slope as i64));
    if count != 1 {
        return Err(EigenError::NotIsolated { slope: slope as i64, count });
    }
    let big_n = ring.precision();
    let shifted: Vec<PadicScalar> = poly.iter().enumerate().map(|(i, c)| c.mul_p_power(slope * i as u32)).collect();
    let m = shifted.iter().map(|c| c.p_divisibility()).min().unwrap_or(0);
    if m >= big_n {
        return Err(EigenError::Precision("characteristic polynomial vanishes to working precision".into()));
    }
    let prec = big_n - m;
    let small = ring.with_precision(prec)?;
    let normalized: Vec<PadicScalar> = shifted.iter().map(|c| Ok(c.div_p_power(m)?.value.reduce_to(&small))).collect::<Result<_, CoeffError>>()?;
    let dnorm = derivative(&normalized);
    let p = ring.p();
    let mut found = None;
    for r in 1..p {
        let y = PadicScalar::from_int(&small, r as i64);
        if eval(&normalized, &y).p_divisibility() >= 1 && eval(&dnorm, &y).is_unit() {
            if found.is_some() {
                return Err(EigenError::NoResidue);
            }
            found = Some(y);
        }
    }
    let mut y = found.ok_or(EigenError::NoResidue)?;
    for _ in 0..2 * prec + 2 {
        let step = eval(&normalized, &y).mul(&eval(&dnorm, &y).unit_inverse()?);
        if step.is_zero() {
            break;
        }
        y = y.sub(&step);
    }
    let value = y.lift_to(&ring).mul_p_power(slope);
    Ok(Approx { value, precision: (prec + slope).min(big_n) })
}

/// An approximate eigenpair with the number of p-adic digits certified by the residual.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: PadicScalar,
    pub vector: Vec<PadicScalar>,
    pub precision: u32,
    /// Index of the coordinate normalized to 1.
    pub pivot: usize,
}

/// Residual digits: the largest k with A·v ≡ α·v (mod p^k).
pub fn residual_digits(a: &PadicMatrix, value: &PadicScalar, vector: &[PadicScalar]) -> u32 {
    let av = a.mul_vec(vector);
    av.iter().zip(vector).map(|(x, v)| x.sub(&value.mul(v)).p_divisibility()).min().unwrap_or(a.ring().precision())
}

/// Integral kernel vector of a corank-one matrix by full-pivoting elimination. Choosing
/// minimal-valuation pivots keeps the back-substitution integral with the free coordinate 1.
pub fn kernel_vector(a: &PadicMatrix) -> Result<(Vec<PadicScalar>, usize), EigenError> {
    if !a.is_square() {
        return Err(EigenError::NotSquare);
    }
    let n = a.rows();
    let ring = a.ring().clone();
    let mut m: Vec<Vec<PadicScalar>> = (0..n).map(|r| (0..n).map(|c| a.get(r, c).clone()).collect()).collect();
    let mut col_of: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n.saturating_sub(1) {
        let (pr, pc, e) = (k..n)
            .flat_map(|r| (k..n).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, m[r][c].p_divisibility()))
            .min_by_key(|&(r, c, e)| (e, c, r))
            .expect("nonempty submatrix");
        if e >= ring.precision() {
            return Err(EigenError::Singular);
        }
        m.swap(k, pr);
        for row in m.iter_mut() {
            row.swap(k, pc);
        }
        col_of.swap(k, pc);
        let unit_inv = m[k][k].div_p_power(e)?.value.unit_inverse()?;
        for r in k + 1..n {
            if m[r][k].is_zero() {
                continue;
            }
            let factor = m[r][k].div_p_power(e)?.value.mul(&unit_inv);
            for c in k..n {
                let v = m[r][c].sub(&factor.mul(&m[k][c]));
                m[r][c] = v;
            }
        }
        pivots.push(e);
    }
    let mut x = vec![PadicScalar::zero(&ring); n];
    x[n - 1] = PadicScalar::one(&ring);
    for k in (0..n - 1).rev() {
        let mut num = PadicScalar::zero(&ring);
        for c in k + 1..n {
            num = num.sub(&m[k][c].mul(&x[c]));
        }
        let e = pivots[k];
        let unit_inv = m[k][k].div_p_power(e)?.value.unit_inverse()?;
        let q = num.div_p_power(e).map_err(|_| EigenError::NotIntegral)?;
        x[k] = q.value.mul(&unit_inv);
    }
    let mut out = vec![PadicScalar::zero(&ring); n];
    for (k, &c) in col_of.iter().enumerate() {
        out[c] = x[k].clone();
    }
    Ok((out, col_of[n - 1]))
}

/// The eigenpair for the unique eigenvalue of valuation `slope`: a start from the
/// characteristic polynomial and an elimination kernel, then Newton steps on
/// (A − λ)x = 0, x_pivot = 1. The precision is the certified residual.
pub fn isolated_eigenpair(a: &PadicMatrix, slope: u32) -> Result<EigenPair, EigenError> {
    if !a.is_square() {
        return Err(EigenError::NotSquare);
    }
    let ring = a.ring().clone();
    let n = a.rows();
    let alpha = isolated_root(&a.charpoly(), slope)?;
    let one = PadicScalar::one(&ring);
    let shifted = a.sub(&PadicMatrix::identity(&one, n).scale(&alpha.value));
    let (mut x, pivot) = kernel_vector(&shifted)?;
    let mut value = alpha.value;
    let mut best = residual_digits(a, &value, &x);
    for _ in 0..8 {
        if best >= ring.precision() {
            break;
        }
        // Jacobian of (x, λ) ↦ ((A − λ)x, x_pivot − 1) with the pivot row replacing the constraint.
        let size = n + 1;
        let mut jac = PadicMatrix::zeros(&one, size, size);
        for r in 0..n {
            for c in 0..n {
                let mut v = a.get(r, c).clone();
                if r == c {
                    v = v.sub(&value);
                }
                jac.set(r, c, v);
            }
            jac.set(r, n, x[r].neg());
        }
        jac.set(n, pivot, one.clone());
        let ax = a.mul_vec(&x);
        let mut rhs: Vec<PadicScalar> = ax.iter().zip(&x).map(|(y, xi)| y.sub(&value.mul(xi)).neg()).collect();
        rhs.push(x[pivot].sub(&one).neg());
        let Ok(step) = solve(&jac, &rhs) else { break };
        let cand: Vec<PadicScalar> = x.iter().zip(&step.value).map(|(u, d)| u.add(d)).collect();
        let cand_value = value.add(&step.value[n]);
        let digits = residual_digits(a, &cand_value, &cand);
        if digits <= best {
            break;
        }
        x = cand;
        value = cand_value;
        best = digits;
    }
    Ok(EigenPair { value, vector: x, precision: best, pivot })
}

/// Number of eigenvalues β with v(β − α) ≥ threshold, read off the Newton polygon of P(x + α).
pub fn cluster_size(poly: &[PadicScalar], alpha: &PadicScalar, threshold: u32) -> usize {
    let n = poly.len();
    // Taylor shift by Horner-style repeated synthetic division.
    let mut coeffs = poly.to_vec();
    let mut shifted = Vec::with_capacity(n);
    for _ in 0..n {
        let mut rem = PadicScalar::zero(alpha.ring());
        let mut next = vec![PadicScalar::zero(alpha.ring()); coeffs.len().saturating_sub(1)];
        for k in (0..coeffs.len()).rev() {
            let v = coeffs[k].add(&rem.mul(alpha));
            if k > 0 {
                next[k - 1] = v.clone();
            }
            rem = v;
        }
        shifted.push(rem);
        coeffs = next;
    }
    let np = NewtonPolygon::of(&shifted);
    np.zero_roots + np.segments.iter().filter(|s| s.valuation >= Rational64::from_integer(threshold as i64)).map(|s| s.length).sum::<usize>()
}

/// Solves A·x = b over Z_p by full-pivoting elimination. The returned precision counts
/// the digits lost to non-unit pivots; `NotIntegral` when the solution leaves Z_p.
pub fn solve(a: &PadicMatrix, b: &[PadicScalar]) -> Result<Approx<Vec<PadicScalar>>, EigenError> {
    if !a.is_square() || a.rows() != b.len() {
        return Err(EigenError::NotSquare);
    }
    let n = a.rows();
    let ring: Ring = a.ring().clone();
    let big_n = ring.precision();
    let mut m: Vec<Vec<PadicScalar>> = (0..n).map(|r| (0..n).map(|c| a.get(r, c).clone()).chain(std::iter::once(b[r].clone())).collect()).collect();
    let mut col_of: Vec<usize> = (0..n).collect();
    let mut lost = 0u32;
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let (pr, pc, e) = (k..n)
            .flat_map(|r| (k..n).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, m[r][c].p_divisibility()))
            .min_by_key(|&(r, c, e)| (e, c, r))
            .expect("nonempty submatrix");
        if e + lost >= big_n {
            return Err(EigenError::Singular);
        }
        m.swap(k, pr);
        for row in m.iter_mut() {
            row.swap(k, pc);
        }
        col_of.swap(k, pc);
        let unit_inv = m[k][k].div_p_power(e)?.value.unit_inverse()?;
        for r in k + 1..n {
            if m[r][k].is_zero() {
                continue;
            }
            let factor = m[r][k].div_p_power(e)?.value.mul(&unit_inv);
            for c in k..=n {
                let v = m[r][c].sub(&factor.mul(&m[k][c]));
                m[r][c] = v;
            }
        }
        lost += e;
        pivots.push(e);
    }
    let mut x = vec![PadicScalar::zero(&ring); n];
    for k in (0..n).rev() {
        let mut num = m[k][n].clone();
        for c in k + 1..n {
            num = num.sub(&m[k][c].mul(&x[c]));
        }
        let e = pivots[k];
        if num.p_divisibility() < e {
            return Err(EigenError::NotIntegral);
        }
        let unit_inv = m[k][k].div_p_power(e)?.value.unit_inverse()?;
        x[k] = num.div_p_power(e)?.value.mul(&unit_inv);
        lost += e;
    }
    let mut out = vec![PadicScalar::zero(&ring); n];
    for (k, &c) in col_of.iter().enumerate() {
        out[c] = x[k].clone();
    }
    Ok(Approx { value: out, precision: big_n.saturating_sub(lost) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::ring_make;

    fn ints(r: &Ring, v: &[i64]) -> Vec<PadicScalar> {
        v.iter().map(|&x| PadicScalar::from_int(r, x)).collect()
    }

    #[test]
    fn newton_polygon_of_known_roots() {
        let r = ring_make(3, 12, 1, 0, 0).unwrap();
        // (x − 2)(x − 3)(x − 18) = x³ − 23x² + 96x − 108
        let poly = ints(&r, &[-108, 96, -23, 1]);
        let np = NewtonPolygon::of(&poly);
        assert_eq!(np.valuations(), vec![Rational64::from_integer(0), Rational64::from_integer(1), Rational64::from_integer(2)]);
        let root = isolated_root(&poly, 1).unwrap();
        assert!(root.value.eq_mod(&PadicScalar::from_int(&r, 3), root.precision));
        assert!(root.precision >= 10);
        let unit = isolated_root(&poly, 0).unwrap();
        assert!(unit.value.eq_mod(&PadicScalar::from_int(&r, 2), unit.precision));
    }

    #[test]
    fn repeated_slope_is_rejected() {
        let r = ring_make(3, 10, 1, 0, 0).unwrap();
        // (x − 3)(x − 6)
        let poly = ints(&r, &[18, -9, 1]);
        assert_eq!(isolated_root(&poly, 1), Err(EigenError::NotIsolated { slope: 1, count: 2 }));
    }

    #[test]
    fn eigenpair_of_triangular_matrix() {
        let r = ring_make(3, 16, 1, 0, 0).unwrap();
        let a = PadicMatrix::from_ints(&r, 3, 3, &[2, 1, 5, 0, 3, 7, 0, 0, 9]);
        for slope in 0..3 {
            let ep = isolated_eigenpair(&a, slope).unwrap();
            assert!(ep.precision >= 8, "slope {slope}: {}", ep.precision);
            assert_eq!(ep.value.p_divisibility(), slope);
            assert!(residual_digits(&a, &ep.value, &ep.vector) >= ep.precision);
        }
    }

    #[test]
    fn solve_round_trip_and_non_integral() {
        let r = ring_make(5, 10, 1, 0, 0).unwrap();
        let a = PadicMatrix::from_ints(&r, 3, 3, &[5, 1, 0, 2, 3, 1, 0, 4, 10]);
        let x = ints(&r, &[3, -2, 7]);
        let b = a.mul_vec(&x);
        let sol = solve(&a, &b).unwrap();
        for (s, t) in sol.value.iter().zip(&x) {
            assert!(s.eq_mod(t, sol.precision));
        }
        let d = PadicMatrix::from_ints(&r, 2, 2, &[5, 0, 0, 1]);
        assert_eq!(solve(&d, &ints(&r, &[1, 1])), Err(EigenError::NotIntegral));
    }

    #[test]
    fn cluster_counts_nearby_roots() {
        let r = ring_make(3, 12, 1, 0, 0).unwrap();
        // roots 1, 1 + 27, 2
        let poly = ints(&r, &[-56, 86, -31, 1]);
        assert_eq!(cluster_size(&poly, &PadicScalar::one(&r), 3), 2);
        assert_eq!(cluster_size(&poly, &PadicScalar::one(&r), 4), 1);
    }
}
