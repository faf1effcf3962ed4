use super::*;
use crate::autforms::{named_spec, synthetic_model, toy_weight, working_degree, TOY_PRECISION, TOY_REPORT_DEGREE};
use crate::lfun::build_lp;

const SERIES_DEGREE: u32 = 4;

fn toy_family(name: &str, slope: u32) -> (ClassSetModel, ColemanFamily) {
    let (model, _) = synthetic_model(&named_spec(name).unwrap()).unwrap();
    let ring = ring_make(3, TOY_PRECISION, 1, 0, 0).unwrap();
    let omega = AffinoidWeight::parallel(toy_weight()).unwrap();
    let family = lift_family(&model, &omega, &ring, working_degree(TOY_REPORT_DEGREE, &ring), slope, SERIES_DEGREE).unwrap();
    (model, family)
}

#[test]
fn multi_indices_are_graded() {
    let idx = multi_indices(2, 2);
    assert_eq!(idx.len(), 6);
    assert_eq!(idx[0], vec![0, 0]);
    assert!(idx.windows(2).all(|w| w[0].iter().sum::<u32>() <= w[1].iter().sum::<u32>()));
}

#[test]
fn center_specialization_is_the_eigenform() {
    let (_, family) = toy_family("n1-p3-two-class", 0);
    assert_eq!(family.shrink, 0);
    let s = specialize_family(&family, &[0]).unwrap();
    let ring = family.center.form.ring().clone();
    let form = s.form.map(|d| Ok(d.map_moments(|m| m.reduce_to(&ring).lift_to(&ring)))).unwrap();
    let center = family.center.form.clone();
    assert_eq!(form.to_vector().unwrap().iter().map(|x| x.coeffs().to_vec()).collect::<Vec<_>>(), center.to_vector().unwrap().iter().map(|x| x.coeffs().to_vec()).collect::<Vec<_>>());
    assert_eq!(s.eigenvalue.value.coeffs(), family.center.alpha.coeffs());
    assert!(s.classical);
}

#[test]
fn residual_is_certified_in_every_degree() {
    let (_, family) = toy_family("n1-p3-two-class", 0);
    assert_eq!(family.residuals.len(), SERIES_DEGREE as usize + 1);
    assert!(family.certified(TOY_PRECISION - 2), "{:?}", family.residuals);
}

#[test]
fn neighbor_specialization_is_an_eigenform() {
    let (model, family) = toy_family("n1-p3-two-class", 0);
    let s = specialize_family(&family, &[3]).unwrap();
    assert_eq!(s.weight, family.omega.at(&[3]).unwrap());
    let image = up_apply(&model, &s.form, &s.weight).unwrap().coarsen(0).unwrap();
    let expected = s.form.scale_padic(&s.eigenvalue.value);
    let agree = image.truncate_degree(TOY_REPORT_DEGREE).unwrap().agreement(&expected.truncate_degree(TOY_REPORT_DEGREE).unwrap()).unwrap();
    assert!(agree >= (TOY_PRECISION - SERIES_DEGREE - 1) as i64, "agreement {agree}");
}

#[test]
fn points_off_the_disc_are_rejected() {
    let (_, family) = toy_family("n1-p3-two-class", 0);
    assert!(matches!(specialize_family(&family, &[1]), Err(FamilyError::OutsideDisc(_))));
    assert!(matches!(specialize_family(&family, &[3, 3]), Err(FamilyError::OutsideDisc(_))));
}

#[test]
fn two_variable_function_specializes_to_the_center() {
    let (model, family) = toy_family("n1-p3-two-class", 0);
    let xi = family_lp(&model, &family, 1, TOY_REPORT_DEGREE).unwrap();
    let point = disc_point(&family, &[0]).unwrap();
    let at_center = xi.specialize(&point).unwrap();
    let ring = family.center.form.ring().clone();
    let at_center = at_center.map_moments(|m| m.reduce_to(&ring).lift_to(&ring));
    let direct = build_lp(&model, &family.center, 1, TOY_REPORT_DEGREE).unwrap();
    let agree = at_center.agreement(&direct.distribution).unwrap();
    assert!(agree >= (TOY_PRECISION - 2) as i64, "agreement {agree}");
}

#[test]
fn slope_one_family_specializes_to_eigenforms() {
    let (model, family) = toy_family("n1-p3-one-class", 1);
    assert!(family.certified(TOY_PRECISION - 2), "{:?}", family.residuals);
    assert_eq!(family.eigenvalue.constant_term().p_divisibility(), 1);
    for w in [3i64, -3, 9] {
        let s = specialize_family(&family, &[w]).unwrap();
        let image = up_apply(&model, &s.form, &s.weight).unwrap().coarsen(0).unwrap();
        let expected = s.form.scale_padic(&s.eigenvalue.value);
        let agree = image.truncate_degree(TOY_REPORT_DEGREE).unwrap().agreement(&expected.truncate_degree(TOY_REPORT_DEGREE).unwrap()).unwrap();
        assert!(agree >= s.precision.min(TOY_PRECISION - SERIES_DEGREE - 1) as i64, "w = {w}: agreement {agree}");
    }
    assert!(family_lp(&model, &family, 2, TOY_REPORT_DEGREE).is_ok());
}
