use num_rational::Rational64;

use super::*;
use crate::coeff::{ring_make, PadicScalar, Ring};
use crate::dist::Truncation;
use crate::weights::Weight;

fn toy_weight() -> Weight {
    Weight::new(1, vec![2, -2], vec![0]).unwrap()
}

fn ring8() -> Ring {
    ring_make(3, 8, 1, 0, 0).unwrap()
}

fn target(slope: u32) -> EigenTarget {
    EigenTarget { weight: toy_weight(), slope, degree: 8, ring: ring8(), min_precision: 8 }
}

fn toy(stabilizers: Vec<u64>, slope: u32) -> ClassSetModel {
    let spec = SyntheticSpec { n: 1, p: 3, stabilizers, seed: 1, max_attempts: 200, target: Some(target(slope)) };
    synthetic_model(&spec).unwrap().0
}

fn random_model(n: usize, h: usize, seed: u64) -> ClassSetModel {
    let spec = SyntheticSpec { n, p: 3, stabilizers: vec![1; h], seed, max_attempts: 1, target: None };
    synthetic_model(&spec).unwrap().0
}

fn identity_model(n: usize) -> ClassSetModel {
    let mut model = random_model(n, 1, 0);
    for row in &mut model.up_cosets {
        for entry in row.iter_mut() {
            *entry = CosetEntry(0, IntegerPair::identity(n));
        }
    }
    model
}

#[test]
fn coset_counts() {
    assert_eq!(coset_count(1, 3), 3);
    assert_eq!(coset_count(2, 3), 243);
    let reps = canonical_unipotents(2, 3);
    let mut sorted = reps.clone();
    sorted.sort_by(|a, b| (&a.big, &a.small).cmp(&(&b.big, &b.small)));
    sorted.dedup();
    assert_eq!(sorted.len(), 243);
    assert_eq!(reps[1].big[0][1], 1);
}

#[test]
fn wrong_coset_count_is_rejected() {
    let mut model = random_model(1, 1, 3);
    model.up_cosets[0].push(CosetEntry(0, IntegerPair::identity(1)));
    let err = ClassSetModel::from_json_str(&model.to_json_pretty()).unwrap_err();
    assert!(matches!(err, AutformsError::CosetCount { expected: 3, found: 4, .. }));
}

#[test]
fn non_iwahori_return_is_rejected() {
    let mut model = random_model(1, 1, 3);
    model.up_cosets[0][0].1.big[1][0] = 1;
    assert!(matches!(model.validate(), Err(AutformsError::Inconsistent(_))));
}

#[test]
fn mass_of_two_class_model() {
    let model = random_model(1, 2, 0);
    let model = ClassSetModel { stabilizers: vec![1, 2], ..model };
    assert_eq!(model.mass(), Rational64::new(3, 2));
}

#[test]
fn json_round_trip_and_hash() {
    let model = random_model(1, 2, 5);
    let back = ClassSetModel::from_json_str(&model.to_json_pretty()).unwrap();
    assert_eq!(back, model);
    assert_eq!(back.content_hash(), model.content_hash());
    assert_ne!(random_model(1, 2, 6).content_hash(), model.content_hash());
}

#[test]
fn identity_returns_give_p_power_diagonal() {
    let ring = ring8();
    let model = identity_model(1);
    let one = PadicScalar::one(&ring);
    let a = up_matrix(&model, &toy_weight(), &one, Truncation::new(0, 5)).unwrap();
    for m in 0..6 {
        assert_eq!(*a.get(m, m), one.mul_p_power(m as u32 + 1));
        for c in m + 1..6 {
            assert!(a.get(m, c).is_zero());
        }
    }
}

#[test]
fn identity_returns_scale_total_mass_by_coset_count() {
    let ring = ring_make(3, 6, 1, 0, 0).unwrap();
    let model = identity_model(2);
    let one = PadicScalar::one(&ring);
    let w = Weight::new(2, vec![1, 0, -1], vec![0, 0]).unwrap();
    let a = up_matrix(&model, &w, &one, Truncation::new(0, 0)).unwrap();
    assert_eq!(*a.get(0, 0), PadicScalar::from_int(&ring, 243));
}

#[test]
fn rerandomized_representatives_give_identical_operator() {
    let ring = ring8();
    let model = random_model(1, 2, 11);
    let other = model.rerandomized(99).unwrap();
    assert_ne!(other.up_cosets, model.up_cosets);
    let one = PadicScalar::one(&ring);
    let trunc = Truncation::new(1, 4);
    let a = up_matrix(&model, &toy_weight(), &one, trunc).unwrap();
    let b = up_matrix(&other, &toy_weight(), &one, trunc).unwrap();
    assert_eq!(a, b);
    assert!(other.rerandomized(1).is_err());
}

#[test]
fn rerandomized_representatives_rank_two() {
    let ring = ring_make(3, 6, 1, 0, 0).unwrap();
    let model = random_model(2, 1, 2);
    let other = model.rerandomized(7).unwrap();
    let w = Weight::new(2, vec![1, 0, -1], vec![0, 0]).unwrap();
    let one = PadicScalar::one(&ring);
    let a = up_matrix(&model, &w, &one, Truncation::new(0, 1)).unwrap();
    let b = up_matrix(&other, &w, &one, Truncation::new(0, 1)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn eigenform_lifts_compatibly() {
    let model = toy(vec![1], 1);
    let ring = ring8();
    let eigen = find_eigenform(&model, &toy_weight(), &ring, working_degree(8, &ring), 1).unwrap();
    assert_eq!(eigen.alpha.p_divisibility(), 1);
    assert!(eigen.precision >= 8);
    assert_eq!(localize(&eigen, 8).unwrap().dimension, 1);
    let level = |r: u32| lift_eigenform(&model, &eigen, r).unwrap();
    let (one, two, three) = (level(1), level(2), level(3));
    assert_eq!(three.level(), 3);
    let report = |f: &ModularForm<PadicScalar>| f.coarsen(1).unwrap().truncate_degree(8).unwrap();
    assert!(report(&one).agreement(&report(&two)).unwrap() >= 6);
    assert!(report(&one).agreement(&report(&three)).unwrap() >= 5);
    assert!(report(&one).coarsen(0).unwrap().agreement(&eigen.form.truncate_degree(8).unwrap()).unwrap() >= 7);
}

#[test]
fn classical_quotient_is_hecke_stable() {
    let model = toy(vec![1, 2], 0);
    let ring = ring8();
    let w = toy_weight();
    let eigen = find_eigenform(&model, &w, &ring, 8, 0).unwrap();
    let image = up_apply(&model, &eigen.form, &w).unwrap();
    let lhs = classical_project(&image, &w).unwrap();
    let rhs = classical_project(&eigen.form.scale_padic(&eigen.alpha), &w).unwrap();
    assert!(lhs.agreement(&rhs) >= 6, "agreement {}", lhs.agreement(&rhs));
    assert!(!lhs.is_zero());
}

#[test]
fn classical_basis_needs_enough_degree() {
    let err = classical_basis(&toy_weight(), &ring8(), 3).unwrap_err();
    assert_eq!(err, AutformsError::TruncationTooSmall { needed: 4, have: 3 });
    assert_eq!(classical_basis(&toy_weight(), &ring8(), 4).unwrap().len(), 5);
}

#[test]
fn critical_slope_is_refused() {
    let model = toy(vec![1], 1);
    assert!(matches!(find_eigenform(&model, &toy_weight(), &ring8(), 8, 5), Err(AutformsError::Critical { .. })));
}

fn shipped(name: &str) -> String {
    std::fs::read_to_string(format!("{}/data/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
#[ignore]
fn write_shipped_models() {
    for name in NAMED_MODELS {
        let (model, _) = synthetic_model(&named_spec(name).unwrap()).unwrap();
        std::fs::write(format!("{}/data/{name}.json", env!("CARGO_MANIFEST_DIR")), model.to_json_pretty() + "\n").unwrap();
    }
}

#[test]
fn shipped_models_are_reproducible() {
    for name in NAMED_MODELS {
        let (model, _) = synthetic_model(&named_spec(name).unwrap()).unwrap();
        assert_eq!(ClassSetModel::from_json_str(&shipped(name)).unwrap(), model, "{name}");
    }
}
