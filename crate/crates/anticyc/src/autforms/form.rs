//! Forms with distribution values, the U_p operator and its eigenforms.

use crate::branching::model_basis;
use crate::coeff::{Coefficient, PadicScalar, Ring};
use crate::dist::action::{act_distribution, guard_ring, local_coordinates, unipotent_matrices, MonoidElement, TorusCharacter, GUARD_DIGITS};
use crate::dist::series::Series;
use crate::dist::{pair, Distribution, Domain, LocAnFunction, Scaled, Truncation};
use crate::linalg::eigen::cluster_size;
use crate::linalg::{isolated_eigenpair, Matrix, PadicMatrix};
use crate::weights::Weight;

use super::{AutformsError, ClassSetModel};

/// Extra digits used while computing eigenvectors, before reducing to the working precision.
pub const EIGEN_GUARD_DIGITS: u32 = 20;

/// A function on the classes with values in distributions on the unipotent coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularForm<T> {
    pub values: Vec<Distribution<T>>,
}

impl<T: Coefficient> ModularForm<T> {
    pub fn zero(model: &ClassSetModel, like: &T, trunc: Truncation) -> Result<Self, AutformsError> {
        let d = Distribution::zero(like, Domain::Unipotent { n: model.n }, trunc)?;
        Ok(ModularForm { values: vec![d; model.h()] })
    }

    pub fn ring(&self) -> &Ring {
        self.values[0].ring()
    }

    pub fn truncation(&self) -> Truncation {
        self.values[0].truncation()
    }

    pub fn level(&self) -> u32 {
        self.values[0].level()
    }

    fn zip(&self, other: &Self, op: impl Fn(&Distribution<T>, &Distribution<T>) -> Result<Distribution<T>, crate::dist::DistError>) -> Result<Self, AutformsError> {
        if self.values.len() != other.values.len() {
            return Err(AutformsError::Shape);
        }
        Ok(ModularForm { values: self.values.iter().zip(&other.values).map(|(a, b)| op(a, b)).collect::<Result<_, _>>()? })
    }

    pub fn add(&self, other: &Self) -> Result<Self, AutformsError> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AutformsError> {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn scale_padic(&self, s: &PadicScalar) -> Self {
        ModularForm { values: self.values.iter().map(|d| d.scale_padic(s)).collect() }
    }

    pub fn mul_p_power(&self, k: i64) -> Self {
        ModularForm { values: self.values.iter().map(|d| d.mul_p_power(k)).collect() }
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&Distribution<T>) -> Result<Distribution<U>, crate::dist::DistError>) -> Result<ModularForm<U>, AutformsError> {
        Ok(ModularForm { values: self.values.iter().map(f).collect::<Result<_, _>>()? })
    }

    pub fn coarsen(&self, level: u32) -> Result<Self, AutformsError> {
        self.map(|d| d.coarsen(level))
    }

    pub fn truncate_degree(&self, degree: u32) -> Result<Self, AutformsError> {
        self.map(|d| d.truncate_degree(degree))
    }

    /// Digits of agreement, the minimum over classes.
    pub fn agreement(&self, other: &Self) -> Result<i64, AutformsError> {
        if self.values.len() != other.values.len() {
            return Err(AutformsError::Shape);
        }
        let mut best = i64::MAX;
        for (a, b) in self.values.iter().zip(&other.values) {
            best = best.min(a.agreement(b)?);
        }
        Ok(best)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|d| d.is_zero())
    }

    /// All moments, class by class, written with exponent 0; fails on non-integral forms.
    pub fn to_vector(&self) -> Result<Vec<T>, AutformsError> {
        let mut out = Vec::new();
        for d in &self.values {
            let e = d.exponent();
            if e < 0 {
                return Err(AutformsError::Inconsistent("form is not integral".into()));
            }
            let f = PadicScalar::one(d.ring()).mul_p_power(e as u32);
            out.extend(d.moments().iter().map(|m| m.scale(&f)));
        }
        Ok(out)
    }

    pub fn from_vector(model: &ClassSetModel, trunc: Truncation, vector: Vec<T>) -> Result<Self, AutformsError> {
        let h = model.h();
        if h == 0 || !vector.len().is_multiple_of(h) {
            return Err(AutformsError::Shape);
        }
        let len = vector.len() / h;
        let domain = Domain::Unipotent { n: model.n };
        let values = vector.chunks(len).map(|c| Distribution::from_moments(domain, trunc, c.to_vec())).collect::<Result<_, _>>()?;
        Ok(ModularForm { values })
    }
}

fn is_zero_dist<T: Coefficient>(d: &Distribution<T>) -> bool {
    d.moments().iter().all(|m| m.is_zero())
}

fn apply_steps<T: Coefficient, C: TorusCharacter<T>>(steps: &[Vec<(usize, MonoidElement)>], phi: &ModularForm<T>, chi: &C) -> Result<ModularForm<T>, AutformsError> {
    let like = phi.values[0].moments()[0].zero_like();
    let trunc = Truncation::new(phi.level() + 1, phi.truncation().degree);
    let domain = phi.values[0].domain();
    let mut values = Vec::with_capacity(steps.len());
    for row in steps {
        let mut acc = Distribution::zero(&like, domain, trunc)?;
        for (target, gamma) in row {
            let source = &phi.values[*target];
            if is_zero_dist(source) {
                continue;
            }
            acc = acc.add(&act_distribution(gamma, source, chi)?)?;
        }
        values.push(acc);
    }
    Ok(ModularForm { values })
}

/// (U_p φ)(x) = Σ_j (δ_j k_{x,j}^{-1}) ⋆ φ(x_{t(j)}); the level rises by one.
pub fn up_apply<T: Coefficient, C: TorusCharacter<T>>(model: &ClassSetModel, phi: &ModularForm<T>, chi: &C) -> Result<ModularForm<T>, AutformsError> {
    if phi.values.len() != model.h() {
        return Err(AutformsError::Shape);
    }
    let guard = guard_ring(phi.ring(), phi.level() + 1)?;
    apply_steps(&model.step_elements(&guard)?, phi, chi)
}

/// Matrix of φ ↦ coarsen(U_p φ) on forms at `trunc` (columns: class-major basis vectors).
pub fn up_matrix<T: Coefficient, C: TorusCharacter<T>>(model: &ClassSetModel, chi: &C, like: &T, trunc: Truncation) -> Result<Matrix<T>, AutformsError> {
    let ring = like.ring().clone();
    let guard = guard_ring(&ring, trunc.level + 1)?;
    let steps = model.step_elements(&guard)?;
    let zero = ModularForm::zero(model, like, trunc)?;
    let size = zero.to_vector()?.len();
    let mut columns = Vec::with_capacity(size);
    for k in 0..size {
        let mut v = vec![like.zero_like(); size];
        v[k] = like.one_like();
        let e = ModularForm::from_vector(model, trunc, v)?;
        let image = apply_steps(&steps, &e, chi)?.coarsen(trunc.level)?;
        columns.push(image.to_vector()?);
    }
    Ok(Matrix::from_fn(size, size, |r, c| columns[c][r].clone()))
}

/// The widest ring (at most EIGEN_GUARD_DIGITS above `ring`) in which U_p can still be expanded at level 1.
pub fn eigen_ring(ring: &Ring) -> Result<Ring, AutformsError> {
    let mut extra = EIGEN_GUARD_DIGITS;
    loop {
        let wide = ring.with_precision(ring.precision() + extra);
        if let Ok(w) = &wide {
            if w.with_precision(w.precision() + 1 + GUARD_DIGITS).is_ok() {
                return Ok(w.clone());
            }
        }
        if extra == 0 {
            return Err(wide.err().map(AutformsError::from).unwrap_or_else(|| AutformsError::Inconsistent("no room for the guard ring".into())));
        }
        extra -= 1;
    }
}

/// Degree at which forms are computed so that moments up to `report` survive lifting.
/// A level-r moment of degree m inherits an error of order p^{work + 1 − m} from the truncation.
pub fn working_degree(report: u32, ring: &Ring) -> u32 {
    report + ring.precision()
}

/// An approximate U_p-eigenform of level 0 with eigenvalue of valuation `slope`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenForm {
    pub weight: Weight,
    pub slope: u32,
    pub alpha: PadicScalar,
    pub form: ModularForm<PadicScalar>,
    /// Digits certified by the residual of the level-0 eigen-equation, capped at the working precision.
    pub precision: u32,
    /// Characteristic polynomial of U_p on level-0 moments, in the wide ring.
    pub charpoly: Vec<PadicScalar>,
}

/// The eigenform for the unique eigenvalue of valuation `slope` on level-0 moments of degree ≤ `degree`.
pub fn find_eigenform(model: &ClassSetModel, weight: &Weight, ring: &Ring, degree: u32, slope: u32) -> Result<EigenForm, AutformsError> {
    let bound = weight.noncritical_bound();
    if slope as i64 >= bound {
        return Err(AutformsError::Critical { slope, bound });
    }
    let wide = eigen_ring(ring)?;
    let trunc = Truncation::new(0, degree);
    let a: PadicMatrix = up_matrix(model, weight, &PadicScalar::one(&wide), trunc)?;
    let found = isolated_eigenpair(&a, slope)?;
    let vector = found.vector.iter().map(|x| x.reduce_to(ring)).collect();
    Ok(EigenForm {
        weight: weight.clone(),
        slope,
        alpha: found.value.reduce_to(ring),
        form: ModularForm::from_vector(model, trunc, vector)?,
        precision: found.precision.min(ring.precision()),
        charpoly: a.charpoly(),
    })
}

/// α^{-1}·ψ for α = p^v·u.
pub fn divide_by_alpha<T: Coefficient>(psi: &ModularForm<T>, alpha: &PadicScalar, slope: u32) -> Result<ModularForm<T>, AutformsError> {
    let unit = alpha.div_p_power(slope)?.value.unit_inverse()?;
    Ok(psi.scale_padic(&unit).mul_p_power(-(slope as i64)))
}

/// φ_{r+1} = α^{-1} U_p φ_r starting from the level-0 eigenform, up to level `level`.
pub fn lift_eigenform(model: &ClassSetModel, eigen: &EigenForm, level: u32) -> Result<ModularForm<PadicScalar>, AutformsError> {
    let mut phi = eigen.form.clone();
    for _ in 0..level {
        phi = divide_by_alpha(&up_apply(model, &phi, &eigen.weight)?, &eigen.alpha, eigen.slope)?;
    }
    Ok(phi)
}

/// Size of the generalized eigenspace around α, counted as roots within p^threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Localization {
    pub dimension: usize,
    pub threshold: u32,
}

pub fn localize(eigen: &EigenForm, threshold: u32) -> Result<Localization, AutformsError> {
    let wide = eigen.charpoly[0].ring().clone();
    let dimension = cluster_size(&eigen.charpoly, &eigen.alpha.lift_to(&wide), threshold);
    if dimension == 0 {
        return Err(AutformsError::EmptyEigenspace);
    }
    Ok(Localization { dimension, threshold })
}

/// Restrictions to the unipotent coordinates (level 0) of a basis of the algebraic model of V_w.
pub fn classical_basis(weight: &Weight, ring: &Ring, degree: u32) -> Result<Vec<LocAnFunction<PadicScalar>>, AutformsError> {
    let basis = model_basis(weight)?;
    let needed = basis.iter().map(|f| f.poly.degree()).max().unwrap_or(0);
    if needed > degree {
        return Err(AutformsError::TruncationTooSmall { needed, have: degree });
    }
    let n = weight.n;
    let domain = Domain::Unipotent { n };
    let trunc = Truncation::new(0, degree);
    let guard = guard_ring(ring, 0)?;
    let zero = PadicScalar::zero(ring);
    basis
        .iter()
        .map(|f| {
            Ok(LocAnFunction::from_local(&zero, domain, trunc, |b| {
                let x: Vec<Series<PadicScalar>> = local_coordinates(&guard, b, 0, degree);
                let (big, small) = unipotent_matrices(n, &x)?;
                let mut values: Vec<Series<PadicScalar>> = big.entries().to_vec();
                values.extend(small.entries().iter().cloned());
                Ok(f.poly.eval_generic(&guard, &values)?.reduce_to(ring))
            })?)
        })
        .collect()
}

/// Pairings of each class value with the classical basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalForm {
    pub pairings: Vec<Vec<Scaled<PadicScalar>>>,
}

impl ClassicalForm {
    pub fn agreement(&self, other: &Self) -> i64 {
        self.pairings.iter().flatten().zip(other.pairings.iter().flatten()).map(|(a, b)| a.agreement(b)).min().unwrap_or(i64::MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.pairings.iter().flatten().all(|s| s.valuation().is_none())
    }
}

/// Image of φ in the classical quotient: its values paired with the algebraic model of V_w.
pub fn classical_project(phi: &ModularForm<PadicScalar>, weight: &Weight) -> Result<ClassicalForm, AutformsError> {
    let base = phi.coarsen(0)?;
    let basis = classical_basis(weight, phi.ring(), phi.truncation().degree)?;
    let pairings = base.values.iter().map(|d| basis.iter().map(|f| pair(d, f)).collect::<Result<Vec<_>, _>>()).collect::<Result<_, _>>()?;
    Ok(ClassicalForm { pairings })
}
