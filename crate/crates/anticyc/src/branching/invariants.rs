//! Right-H-invariant vectors in the induced model, found as the kernel of the
//! Lie-algebra action on a spanning set of products of row minors.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{minor, Layout, Monomial, Poly};
use super::{BranchingError, InducedFunction};
use crate::weights::Weight;

type SparseVec<K> = BTreeMap<K, BigRational>;

/// Incremental Gaussian elimination over Q that records, for each input
/// column, either a new pivot or a kernel relation among earlier columns.
struct Eliminator<K: Ord + Clone> {
    pivots: Vec<(K, SparseVec<K>, SparseVec<usize>)>,
}

enum Reduced {
    Independent,
    Relation(SparseVec<usize>),
}

impl<K: Ord + Clone> Eliminator<K> {
    fn new() -> Self {
        Eliminator { pivots: Vec::new() }
    }

    fn push(&mut self, index: usize, column: &SparseVec<K>) -> Reduced {
        let mut v = column.clone();
        let mut combo: SparseVec<usize> = BTreeMap::new();
        combo.insert(index, BigRational::one());
        for (key, pv, pc) in &self.pivots {
            let Some(f) = v.get(key).cloned() else { continue };
            axpy(&mut v, &-f.clone(), pv);
            axpy(&mut combo, &-f, pc);
        }
        match v.iter().next().map(|(k, c)| (k.clone(), c.clone())) {
            None => Reduced::Relation(combo),
            Some((key, lead)) => {
                let inv = BigRational::one() / lead;
                for c in v.values_mut() {
                    *c *= &inv;
                }
                for c in combo.values_mut() {
                    *c *= &inv;
                }
                self.pivots.push((key, v, combo));
                Reduced::Independent
            }
        }
    }
}

fn axpy<K: Ord + Clone>(acc: &mut SparseVec<K>, f: &BigRational, v: &SparseVec<K>) {
    for (k, c) in v {
        let e = acc.entry(k.clone()).or_insert_with(BigRational::zero);
        *e += f * c;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

/// Indices of a maximal linearly independent subfamily, in input order.
pub(crate) fn independent_subset(polys: &[Poly]) -> Vec<usize> {
    let mut elim: Eliminator<Monomial> = Eliminator::new();
    let mut keep = Vec::new();
    for (i, p) in polys.iter().enumerate() {
        if let Reduced::Independent = elim.push(i, p.terms()) {
            keep.push(i);
        }
    }
    keep
}

/// Basis of the kernel of the linear map sending e_i to columns[i].
pub(crate) fn kernel<K: Ord + Clone>(columns: &[SparseVec<K>]) -> Vec<SparseVec<usize>> {
    let mut elim: Eliminator<K> = Eliminator::new();
    let mut out = Vec::new();
    for (i, c) in columns.iter().enumerate() {
        if let Reduced::Relation(r) = elim.push(i, c) {
            out.push(r);
        }
    }
    out
}

/// A product of row minors with its column content.
struct MinorProduct {
    poly: Poly,
    columns: Vec<u32>,
}

fn column_subsets(width: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, width: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in start..width {
            cur.push(c);
            rec(c + 1, width, k, cur, out);
            cur.pop();
        }
    }
    rec(0, width, k, &mut cur, &mut out);
    out
}

fn multisets(count: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, count: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..count {
            cur.push(i);
            rec(i, count, size, cur, out);
            cur.pop();
        }
    }
    rec(0, count, size, &mut cur, &mut out);
    out
}

/// All products with mult[k-1] minors of size k on the top rows of a width×width block.
fn minor_products(nvars: usize, width: usize, var: impl Fn(usize, usize) -> usize, mult: &[usize]) -> Vec<MinorProduct> {
    let mut acc = vec![MinorProduct { poly: Poly::one(nvars), columns: vec![0; width] }];
    for (idx, &m) in mult.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let k = idx + 1;
        let subsets = column_subsets(width, k);
        let minors: Vec<Poly> = subsets
            .iter()
            .map(|cols| {
                let grid: Vec<Vec<usize>> = (0..k).map(|r| cols.iter().map(|&c| var(r, c)).collect()).collect();
                minor(nvars, &grid)
            })
            .collect();
        let mut next = Vec::new();
        for choice in multisets(subsets.len(), m) {
            let mut poly = Poly::one(nvars);
            let mut columns = vec![0u32; width];
            for &i in &choice {
                poly = poly.mul(&minors[i]);
                for &c in &subsets[i] {
                    columns[c] += 1;
                }
            }
            for prev in &acc {
                let cols: Vec<u32> = prev.columns.iter().zip(&columns).map(|(a, b)| a + b).collect();
                next.push(MinorProduct { poly: prev.poly.mul(&poly), columns: cols });
            }
        }
        acc = next;
    }
    acc
}

/// Groups products by column content and keeps an independent subfamily in each group.
fn independent_by_columns(products: Vec<MinorProduct>) -> BTreeMap<Vec<u32>, Vec<Poly>> {
    let mut groups: BTreeMap<Vec<u32>, Vec<Poly>> = BTreeMap::new();
    for p in products {
        groups.entry(p.columns).or_default().push(p.poly);
    }
    groups
        .into_iter()
        .map(|(cols, polys)| {
            let keep = independent_subset(&polys);
            (cols, keep.into_iter().map(|i| polys[i].clone()).collect())
        })
        .collect()
}

/// Multiplicities of k-row minors for a dominant shape with last entry 0.
fn minor_multiplicities(shape: &[i64]) -> Vec<usize> {
    (0..shape.len().saturating_sub(1)).map(|k| (shape[k] - shape[k + 1]) as usize).collect()
}

/// Exponents of det g and det g' together with the minor multiplicities of both components.
pub(crate) struct ModelShape {
    pub det_big: i64,
    pub det_small: i64,
    pub big_mult: Vec<usize>,
    pub small_mult: Vec<usize>,
}

pub(crate) fn model_shape(w: &Weight) -> Result<ModelShape, BranchingError> {
    if !w.is_dominant() {
        return Err(BranchingError::NotDominant(w.clone()));
    }
    let n = w.n;
    let det_big = w.mu[n];
    let big_shape: Vec<i64> = w.mu.iter().map(|m| m - det_big).collect();
    // The small factor carries the contragredient character (−λ_n, …, −λ_1).
    let det_small = -w.lambda[0];
    let small_shape: Vec<i64> = (0..n).map(|i| -w.lambda[n - 1 - i] - det_small).collect();
    Ok(ModelShape {
        det_big,
        det_small,
        big_mult: minor_multiplicities(&big_shape),
        small_mult: minor_multiplicities(&small_shape),
    })
}

/// Generators of the Lie algebra of H acting on the right: the pairs (source, target)
/// of the derivation Σ_r g_{ra} ∂/∂g_{rb} + Σ_r g'_{ra} ∂/∂g'_{rb}.
fn lie_operators(layout: Layout) -> Vec<Vec<(usize, usize)>> {
    let n = layout.n;
    let mut ops = Vec::new();
    for a in 0..n.saturating_sub(1) {
        for (x, y) in [(a, a + 1), (a + 1, a)] {
            let mut pairs = Vec::new();
            for r in 0..=n {
                pairs.push((layout.big(r, y), layout.big(r, x)));
            }
            for r in 0..n {
                pairs.push((layout.small(r, y), layout.small(r, x)));
            }
            ops.push(pairs);
        }
    }
    ops
}

/// A spanning family of the whole induced model of weight w: products of minors of both components.
pub(crate) fn model_space(w: &Weight) -> Result<Vec<InducedFunction>, BranchingError> {
    let n = w.n;
    let layout = Layout { n };
    let nvars = layout.nvars();
    let shape = model_shape(w)?;
    let big = independent_by_columns(minor_products(nvars, n + 1, |r, c| layout.big(r, c), &shape.big_mult));
    let small = independent_by_columns(minor_products(nvars, n, |r, c| layout.small(r, c), &shape.small_mult));
    let mut out = Vec::new();
    for bpolys in big.values() {
        for spolys in small.values() {
            for b in bpolys {
                for s in spolys {
                    out.push(InducedFunction::from_parts(w.clone(), b.mul(s), shape.det_big, shape.det_small));
                }
            }
        }
    }
    Ok(out)
}

/// Solves for the H-invariant line in the induced model of weight w.
pub(crate) fn invariant_space(w: &Weight) -> Result<Vec<InducedFunction>, BranchingError> {
    let n = w.n;
    let layout = Layout { n };
    let nvars = layout.nvars();
    let shape = model_shape(w)?;
    let big = independent_by_columns(minor_products(nvars, n + 1, |r, c| layout.big(r, c), &shape.big_mult));
    let small = independent_by_columns(minor_products(nvars, n, |r, c| layout.small(r, c), &shape.small_mult));
    let shift = shape.det_big + shape.det_small;

    let mut basis: Vec<(Poly, Poly)> = Vec::new();
    for (bcols, bpolys) in &big {
        for (scols, spolys) in &small {
            let balanced = (0..n).all(|a| bcols[a] as i64 + scols[a] as i64 + shift == 0);
            if !balanced {
                continue;
            }
            for b in bpolys {
                for s in spolys {
                    basis.push((b.clone(), s.clone()));
                }
            }
        }
    }
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let ops = lie_operators(layout);
    let columns: Vec<BTreeMap<(usize, Monomial), BigRational>> = basis
        .iter()
        .map(|(b, s)| {
            let mut col = BTreeMap::new();
            for (k, op) in ops.iter().enumerate() {
                let image = b.derivation(op).mul(s).add(&b.mul(&s.derivation(op)));
                for (m, c) in image.terms() {
                    col.insert((k, m.clone()), c.clone());
                }
            }
            col
        })
        .collect();
    let relations = kernel(&columns);
    Ok(relations
        .into_iter()
        .map(|rel| {
            let mut poly = Poly::zero(nvars);
            for (i, c) in rel {
                poly = poly.add(&basis[i].0.mul(&basis[i].1).scale(&c));
            }
            InducedFunction::from_parts(w.clone(), poly, shape.det_big, shape.det_small)
        })
        .collect())
}
