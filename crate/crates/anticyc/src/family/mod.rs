//! Coleman families through a non-critical eigenform: order-by-order continuation of the
//! eigenpair in the weight variables, specialization, and the two-variable L-function.

#[cfg(test)]
mod tests;

use thiserror::Error;

use crate::autforms::{eigen_ring, find_eigenform, up_apply, up_matrix, AutformsError, ClassSetModel, EigenForm, ModularForm};
use crate::coeff::{multi_indices, ring_make, AffinoidScalar, Approx, CoeffError, PadicScalar, Ring};
use crate::dist::{DistError, Distribution, Truncation};
use crate::lfun::{period_sum, LfunError};
use crate::linalg::{isolated_eigenpair, solve, EigenError, Matrix, PadicMatrix};
use crate::weights::{AffinoidWeight, CritRange, Weight};

/// How many times the disc may be shrunk by a factor p before the lift is declared obstructed.
pub const MAX_SHRINK: u32 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("eigenvalue collision in the truncated spectrum: {0}")]
    Obstructed(EigenError),
    #[error("continuation leaves the integral lattice even after shrinking the disc {0} times")]
    NotIntegral(u32),
    #[error("point {0:?} is outside the disc of the family")]
    OutsideDisc(Vec<i64>),
    #[error("eigenvalue series is not p^{slope} times a unit")]
    EigenvalueShape { slope: u32 },
    #[error(transparent)]
    Autforms(#[from] AutformsError),
    #[error(transparent)]
    Lfun(#[from] LfunError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// Residual digits of U_pΦ − a_pΦ among coefficients of one total degree in the weight variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeResidual {
    pub degree: u32,
    pub digits: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColemanFamily {
    /// The disc as requested.
    pub omega: AffinoidWeight,
    /// The disc actually used: directions multiplied by p^shrink.
    pub effective: AffinoidWeight,
    pub shrink: u32,
    pub center: EigenForm,
    pub form: ModularForm<AffinoidScalar>,
    pub eigenvalue: AffinoidScalar,
    pub residuals: Vec<DegreeResidual>,
}

impl ColemanFamily {
    pub fn ring(&self) -> &Ring {
        self.form.ring()
    }

    /// Every degree certified to at least `digits`.
    pub fn certified(&self, digits: u32) -> bool {
        self.residuals.iter().all(|r| r.digits >= digits)
    }
}

fn dominated(i: &[u32], t: &[u32]) -> bool {
    i.iter().zip(t).all(|(a, b)| a <= b)
}

fn difference(t: &[u32], i: &[u32]) -> Vec<u32> {
    t.iter().zip(i).map(|(a, b)| a - b).collect()
}

fn reduce_affinoid(x: &AffinoidScalar, ring: &Ring) -> Result<AffinoidScalar, CoeffError> {
    AffinoidScalar::from_terms(ring, x.terms().map(|(d, c)| (d.clone(), c.reduce_to(ring))))
}

fn scaled_disc(omega: &AffinoidWeight, p: u64, shrink: u32) -> Result<AffinoidWeight, FamilyError> {
    let factor = p.pow(shrink) as i64;
    Ok(AffinoidWeight::new(omega.center.clone(), omega.directions.iter().map(|d| d.scaled(factor)).collect()).map_err(AutformsError::Weight)?)
}

enum Attempt {
    Done(ModularForm<AffinoidScalar>, AffinoidScalar, Vec<DegreeResidual>),
    Shrink,
}

fn continue_eigenpair(model: &ClassSetModel, disc: &AffinoidWeight, ring: &Ring, degree: u32, slope: u32, series_degree: u32) -> Result<Attempt, FamilyError> {
    let wide_plain = eigen_ring(ring)?;
    let k = disc.dimension();
    let wide = ring_make(ring.p(), wide_plain.precision(), ring.cyclotomic_order(), k, series_degree)?;
    let target = ring_make(ring.p(), ring.precision(), ring.cyclotomic_order(), k, series_degree)?;
    let trunc = Truncation::new(0, degree);
    let a: Matrix<AffinoidScalar> = up_matrix(model, disc, &AffinoidScalar::one(&wide), trunc)?;
    let size = a.rows();
    let indices = multi_indices(k, series_degree);
    let coefficient = |t: &[u32]| -> PadicMatrix { Matrix::from_fn(size, size, |r, c| a.get(r, c).coefficient(t)) };
    let a0 = coefficient(&indices[0]);
    let pair = isolated_eigenpair(&a0, slope).map_err(|e| match e {
        EigenError::NotIsolated { .. } => FamilyError::Obstructed(e),
        other => other.into(),
    })?;
    let one = PadicScalar::one(&wide);
    // J = [A_0 − α | −v_0; e_pivot | 0].
    let mut jac = PadicMatrix::zeros(&one, size + 1, size + 1);
    for r in 0..size {
        for c in 0..size {
            let mut x = a0.get(r, c).clone();
            if r == c {
                x = x.sub(&pair.value);
            }
            jac.set(r, c, x);
        }
        jac.set(r, size, pair.vector[r].neg());
    }
    jac.set(size, pair.pivot, one.clone());
    let mut vectors: Vec<Vec<PadicScalar>> = vec![pair.vector.clone()];
    let mut values: Vec<PadicScalar> = vec![pair.value.clone()];
    let matrices: Vec<PadicMatrix> = indices.iter().map(|t| coefficient(t)).collect();
    for (ti, t) in indices.iter().enumerate().skip(1) {
        let mut rhs = vec![PadicScalar::zero(&wide); size + 1];
        for (ii, i) in indices.iter().enumerate().take(ti + 1).skip(1) {
            if !dominated(i, t) {
                continue;
            }
            let rest = indices.iter().position(|x| *x == difference(t, i)).expect("index set is closed under differences");
            let av = matrices[ii].mul_vec(&vectors[rest]);
            for (slot, x) in rhs.iter_mut().zip(&av) {
                *slot = slot.sub(x);
            }
            if ii != ti {
                for (slot, x) in rhs.iter_mut().zip(&vectors[rest]) {
                    *slot = slot.add(&values[ii].mul(x));
                }
            }
        }
        match solve(&jac, &rhs) {
            Ok(sol) => {
                let mut v = sol.value;
                values.push(v.pop().expect("eigenvalue slot"));
                vectors.push(v);
            }
            Err(EigenError::NotIntegral) => return Ok(Attempt::Shrink),
            Err(e) => return Err(e.into()),
        }
    }
    let series = |coords: Vec<PadicScalar>| AffinoidScalar::from_terms(&wide, indices.iter().cloned().zip(coords));
    let vector: Vec<AffinoidScalar> = (0..size).map(|r| series(vectors.iter().map(|v| v[r].clone()).collect())).collect::<Result<_, _>>()?;
    let eigenvalue = series(values.clone())?;
    let av = a.mul_vec(&vector);
    let residual: Vec<AffinoidScalar> = av.iter().zip(&vector).map(|(x, y)| x.sub(&eigenvalue.mul(y))).collect();
    let residuals = (0..=series_degree)
        .map(|g| {
            let digits = indices.iter().filter(|t| t.iter().sum::<u32>() == g).flat_map(|t| residual.iter().map(move |x| x.coefficient(t).p_divisibility())).min().unwrap_or(u32::MAX);
            DegreeResidual { degree: g, digits: digits.min(ring.precision()) }
        })
        .collect();
    let reduced: Vec<AffinoidScalar> = vector.iter().map(|x| reduce_affinoid(x, &target)).collect::<Result<_, _>>()?;
    let form = ModularForm::from_vector(model, trunc, reduced)?;
    Ok(Attempt::Done(form, reduce_affinoid(&eigenvalue, &target)?, residuals))
}

/// Lifts the slope-`slope` eigenform at the center of `omega` to an affinoid eigenform
/// with weight-series truncated at total degree `series_degree`, shrinking the disc if needed.
pub fn lift_family(model: &ClassSetModel, omega: &AffinoidWeight, ring: &Ring, degree: u32, slope: u32, series_degree: u32) -> Result<ColemanFamily, FamilyError> {
    let center = find_eigenform(model, &omega.center, ring, degree, slope)?;
    for shrink in 0..=MAX_SHRINK {
        let effective = scaled_disc(omega, ring.p(), shrink)?;
        if let Attempt::Done(form, eigenvalue, residuals) = continue_eigenpair(model, &effective, ring, degree, slope, series_degree)? {
            return Ok(ColemanFamily { omega: omega.clone(), effective, shrink, center, form, eigenvalue, residuals });
        }
    }
    Err(FamilyError::NotIntegral(MAX_SHRINK))
}

/// A member of the family at an integer point of the original disc.
#[derive(Debug, Clone, PartialEq)]
pub struct Specialization {
    pub weight: Weight,
    pub form: ModularForm<PadicScalar>,
    pub eigenvalue: Approx<PadicScalar>,
    /// Digits to which the specialized moments are certified.
    pub precision: u32,
    /// Dominant and on the branching chain.
    pub classical: bool,
    pub crit_set: Option<CritRange>,
}

/// The coordinates of the point in the variables of the effective disc.
pub fn disc_point(family: &ColemanFamily, w0: &[i64]) -> Result<Vec<PadicScalar>, FamilyError> {
    let ring = family.ring();
    let p = ring.p() as i64;
    let scale = p.pow(family.shrink);
    if w0.len() != family.omega.dimension() || w0.iter().any(|&x| x % (scale * p) != 0) {
        return Err(FamilyError::OutsideDisc(w0.to_vec()));
    }
    Ok(w0.iter().map(|&x| PadicScalar::from_int(ring, x / scale)).collect())
}

pub fn specialize_family(family: &ColemanFamily, w0: &[i64]) -> Result<Specialization, FamilyError> {
    let point = disc_point(family, w0)?;
    let weight = family.omega.at(w0).map_err(AutformsError::Weight)?;
    let mut precision = family.ring().precision();
    let mut values = Vec::with_capacity(family.form.values.len());
    for d in &family.form.values {
        let s = d.specialize(&point)?;
        precision = precision.min(s.precision());
        values.push(s);
    }
    let eigenvalue = family.eigenvalue.specialize(&point)?;
    Ok(Specialization {
        classical: weight.is_dominant() && weight.satisfies_branching_chain(),
        crit_set: weight.crit_set(),
        weight,
        form: ModularForm { values },
        precision: precision.min(eigenvalue.precision),
        eigenvalue,
    })
}

/// a_p(w) = p^v·u(w) with u a unit series; returns u^{-1}.
fn unit_part_inverse(a: &AffinoidScalar, slope: u32) -> Result<AffinoidScalar, FamilyError> {
    let ring = a.ring();
    let terms = a
        .terms()
        .map(|(d, c)| c.div_p_power(slope).map(|q| (d.clone(), q.value)).map_err(|_| FamilyError::EigenvalueShape { slope }))
        .collect::<Result<Vec<_>, _>>()?;
    let unit = AffinoidScalar::from_terms(ring, terms)?;
    unit.unit_inverse().map_err(|_| FamilyError::EigenvalueShape { slope })
}

/// a_p^{-β}·(period sum of U_p^βΦ): the two-variable L-function at level β, truncated to `report_degree`.
pub fn family_lp(model: &ClassSetModel, family: &ColemanFamily, beta: u32, report_degree: u32) -> Result<Distribution<AffinoidScalar>, FamilyError> {
    if beta == 0 {
        return Err(LfunError::BetaZero.into());
    }
    let slope = family.center.slope;
    let inverse = unit_part_inverse(&family.eigenvalue, slope)?;
    let mut phi = family.form.clone();
    for _ in 0..beta {
        let image = up_apply(model, &phi, &family.effective)?;
        phi = ModularForm { values: image.values.iter().map(|d| d.scale(&inverse).mul_p_power(-(slope as i64))).collect() };
    }
    Ok(period_sum(model, &phi, &family.effective)?.truncate_degree(report_degree)?)
}
