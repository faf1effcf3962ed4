use num_rational::{BigRational, Rational64};
use num_traits::Zero;

use super::*;
use crate::autforms::{find_eigenform, named_spec, synthetic_model, toy_weight, working_degree, TOY_PRECISION};
use crate::branching::build_u_direct;
use crate::coeff::ring_make;
use crate::dist::kappa::invariant_on_n1;

fn toy(name: &str, slope: u32) -> (ClassSetModel, EigenForm) {
    let (model, _) = synthetic_model(&named_spec(name).unwrap()).unwrap();
    let ring = ring_make(3, TOY_PRECISION, 1, 0, 0).unwrap();
    let eigen = find_eigenform(&model, &toy_weight(), &ring, working_degree(6, &ring), slope).unwrap();
    (model, eigen)
}

#[test]
fn generators_and_primitive_characters() {
    assert_eq!(unit_generator(3, 1), 2);
    assert_eq!(unit_generator(3, 2), 2);
    assert_eq!(unit_generator(7, 1), 3);
    assert_eq!(AnticyclotomicCharacter::primitive(3, 1, 0).len(), 1);
    assert_eq!(AnticyclotomicCharacter::primitive(3, 2, 0).len(), 4);
    assert_eq!(AnticyclotomicCharacter::primitive(5, 1, 0).len(), 3);
    assert!(!AnticyclotomicCharacter::new(0, 1, 0).is_primitive(3));
}

#[test]
fn quadratic_gauss_sum_mod_three() {
    let chi = AnticyclotomicCharacter::new(0, 1, 1);
    let g = gauss_sum(&chi, 1, 3, 6).unwrap();
    let ring = g.ring().clone();
    let zeta = PadicScalar::root_of_unity(&ring, 3).unwrap();
    assert_eq!(g, zeta.sub(&zeta.mul(&zeta)));
    let (product, ok) = gauss_identity(&chi, 3, 6).unwrap();
    assert!(ok);
    assert_eq!(product, PadicScalar::from_int(&ring, 3));
}

#[test]
fn gauss_identity_for_all_primitive_characters() {
    for p in [3u64, 5, 7] {
        for beta in [1u32, 2] {
            for chi in AnticyclotomicCharacter::primitive(p, beta, 0) {
                let (_, ok) = gauss_identity(&chi, p, 6).unwrap();
                assert!(ok, "p = {p}, beta = {beta}, chi = {chi:?}");
            }
        }
    }
}

#[test]
fn imprimitive_gauss_sum_is_rejected() {
    assert_eq!(gauss_sum(&AnticyclotomicCharacter::new(0, 1, 0), 1, 3, 6), Err(LfunError::NotPrimitive(1)));
    assert_eq!(gauss_sum(&AnticyclotomicCharacter::new(0, 2, 3), 1, 3, 6), Err(LfunError::NotPrimitive(2)));
}

#[test]
fn interpolation_factor_examples() {
    let f = interpolation_factor(1, 3, 1, Rational64::zero()).unwrap();
    assert_eq!(f.rational, BigRational::new(3.into(), 4.into()));
    assert_eq!(f.alpha_power, -1);
    assert_eq!(f.valuation, Rational64::from_integer(1));
    assert!(f.chain_consistent);
    let f = interpolation_factor(2, 3, 2, Rational64::from_integer(1)).unwrap();
    assert_eq!(f.exponent, 5);
    assert_eq!(f.valuation, Rational64::from_integer(6 - 2 * 6));
    assert!(f.chain_consistent);
    let ring = ring_make(3, 8, 1, 0, 0).unwrap();
    let alpha = PadicScalar::from_int(&ring, 6);
    let (shift, unit) = f.value(&alpha).unwrap();
    assert_eq!(shift, -6);
    assert!(unit.is_unit());
    assert_eq!(interpolation_factor(1, 3, 0, Rational64::zero()), Err(LfunError::BetaZero));
}

#[test]
fn index_enumeration_counts_contracted_unipotents() {
    assert_eq!(enumerate_index(1, 3, 1).unwrap(), 3);
    assert_eq!(enumerate_index(1, 2, 2).unwrap(), 2);
    assert_eq!(enumerate_index(2, 2, 1).unwrap(), 32);
    let report = index_check(1, 3, 1).unwrap();
    assert_eq!(report.enumerated_exponent, Some(1));
    assert_eq!(report.formula_exponent, 2);
}

#[test]
fn quadratic_character_on_diracs() {
    let ring = ring_make(3, 6, 1, 0, 0).unwrap();
    let one = PadicScalar::one(&ring);
    let trunc = Truncation::new(1, 3);
    let mu = Distribution::dirac(&one, Domain::Units, trunc, &[1]).unwrap().sub(&Distribution::dirac(&one, Domain::Units, trunc, &[5]).unwrap().scale(&PadicScalar::from_int(&ring, 4))).unwrap();
    let chi = AnticyclotomicCharacter::new(2, 1, 1);
    let value = integrate_character(&mu, &chi).unwrap();
    // 1·χ(1)·1² − 4·χ(5)·5² = 1 + 100.
    assert_eq!(value.value, PadicScalar::from_int(value.value.ring(), 101));
    let deep = AnticyclotomicCharacter::new(0, 2, 1);
    assert_eq!(integrate_character(&mu, &deep), Err(LfunError::InsufficientLevel { needed: 2, have: 1 }));
}

#[test]
fn zero_form_gives_zero_distribution() {
    let (model, eigen) = toy("n1-p3-two-class", 0);
    let zero = ModularForm::zero(&model, &PadicScalar::zero(eigen.form.ring()), Truncation::new(1, 4)).unwrap();
    assert!(period_sum(&model, &zero, &eigen.weight).unwrap().is_zero());
}

fn beta_independence(name: &str, slope: u32) {
    let (model, eigen) = toy(name, slope);
    let tolerance = TOY_PRECISION as i64 - 3 * slope as i64 - 2;
    let base = build_lp(&model, &eigen, 1, 6).unwrap().normalized(6).unwrap();
    assert!(!base.is_zero());
    for beta in [2, 3] {
        let other = build_lp(&model, &eigen, beta, 6).unwrap().normalized(6).unwrap();
        let agreement = base.agreement(&other).unwrap();
        assert!(agreement >= tolerance, "{name}: beta {beta} agrees to {agreement}");
    }
}

#[test]
fn beta_independence_ordinary() {
    beta_independence("n1-p3-two-class", 0);
}

#[test]
fn beta_independence_slope_one() {
    beta_independence("n1-p3-one-class", 1);
}

#[test]
fn critical_values_are_period_sums_of_invariants() {
    let (model, eigen) = toy("n1-p3-one-class", 1);
    let beta = 2;
    let l = build_lp(&model, &eigen, beta, 6).unwrap();
    let lifted = lift_eigenform(&model, &eigen, beta).unwrap();
    let ring = lifted.ring().clone();
    let guard = guard_ring(&ring, beta).unwrap();
    let u = MonoidElement::new(MatrixPair::g0(&guard, 1), 0, MatrixPair::identity(&guard, 1)).unwrap();
    for j in eigen.weight.crit_set().unwrap().iter() {
        let lhs = eval_character(&l, &AnticyclotomicCharacter::new(j, 0, 0)).unwrap();
        assert!(lhs.accessible);
        let invariant = invariant_on_n1(&build_u_direct(&eigen.weight.twisted(j)).unwrap(), &ring, lifted.truncation()).unwrap();
        let mut rhs: Option<Scaled<PadicScalar>> = None;
        for PeriodEntry(_, class, stab) in &model.h_period {
            let moved = act_distribution(&u, &lifted.values[*class], &eigen.weight).unwrap();
            let term = pair(&moved.scale_padic(&PadicScalar::from_int(&ring, *stab as i64).unit_inverse().unwrap()), &invariant).unwrap();
            rhs = Some(match rhs {
                None => term,
                Some(acc) => Scaled { exponent: acc.exponent.min(term.exponent), ..add_scaled(&acc, &term) },
            });
        }
        let rhs = rhs.unwrap();
        assert!(lhs.value.agreement(&rhs) >= 4, "j = {j}: {}", lhs.value.agreement(&rhs));
    }
    let outside = eval_character(&l, &AnticyclotomicCharacter::new(5, 0, 0)).unwrap();
    assert!(!outside.accessible);
}

fn add_scaled(a: &Scaled<PadicScalar>, b: &Scaled<PadicScalar>) -> Scaled<PadicScalar> {
    let e = a.exponent.min(b.exponent);
    let lift = |s: &Scaled<PadicScalar>| s.value.mul_p_power((s.exponent - e) as u32);
    let precision = (a.precision as i64 + a.exponent - e).min(b.precision as i64 + b.exponent - e) as u32;
    Scaled { exponent: e, value: lift(a).add(&lift(b)), precision }
}

#[test]
fn growth_is_certified_on_toys() {
    for (name, slope) in [("n1-p3-two-class", 0), ("n1-p3-one-class", 1)] {
        let (model, eigen) = toy(name, slope);
        let l = build_lp(&model, &eigen, 4, 6).unwrap();
        let cert = certify_growth(&l, 4).unwrap();
        assert!(cert.certified, "{name}: growth {}", cert.report.growth);
        assert!(cert.unique);
    }
}
