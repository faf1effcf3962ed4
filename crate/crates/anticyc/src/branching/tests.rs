use super::*;
use crate::coeff::ring_make;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn w(mu: &[i64], lambda: &[i64]) -> Weight {
    Weight::new(lambda.len(), mu.to_vec(), lambda.to_vec()).unwrap()
}

fn random_unit(ring: &Ring, rng: &mut ChaCha8Rng) -> PadicScalar {
    let p = ring.p() as i64;
    let m = ring.modulus() as i64;
    loop {
        let x = rng.gen_range(0..m);
        if x % p != 0 {
            return PadicScalar::from_int(ring, x);
        }
    }
}

fn random_int(ring: &Ring, rng: &mut ChaCha8Rng) -> PadicScalar {
    PadicScalar::from_int(ring, rng.gen_range(0..ring.modulus() as i64))
}

fn random_gl(ring: &Ring, n: usize, rng: &mut ChaCha8Rng) -> PadicMatrix {
    loop {
        let m = PadicMatrix::from_fn(n, n, |_, _| random_int(ring, rng));
        if m.det().is_unit() {
            return m;
        }
    }
}

fn random_pair(ring: &Ring, n: usize, rng: &mut ChaCha8Rng) -> MatrixPair {
    MatrixPair { big: random_gl(ring, n + 1, rng), small: random_gl(ring, n, rng) }
}

fn lower_borel(ring: &Ring, k: usize, rng: &mut ChaCha8Rng) -> (PadicMatrix, Vec<PadicScalar>) {
    let diag: Vec<PadicScalar> = (0..k).map(|_| random_unit(ring, rng)).collect();
    let m = PadicMatrix::from_fn(k, k, |r, c| {
        if r == c {
            diag[r].clone()
        } else if r > c {
            random_int(ring, rng)
        } else {
            PadicScalar::zero(ring)
        }
    });
    (m, diag)
}

#[test]
fn leading_minor_examples() {
    let r = ring_make(3, 8, 1, 0, 0).unwrap();
    let x = MatrixPair::from_ints(&r, &[vec![5, 0, 0], vec![1, 2, 0], vec![3, 4, 7]], &[vec![1, 2], vec![3, 4]]);
    assert_eq!(leading_minor(2, Component::Big, 1).unwrap().evaluate(&x).unwrap(), PadicScalar::from_int(&r, 5));
    assert_eq!(leading_minor(2, Component::Big, 3).unwrap().evaluate(&x).unwrap(), x.big.det());
    assert_eq!(leading_minor(2, Component::Small, 2).unwrap().evaluate(&x).unwrap(), PadicScalar::from_int(&r, -2));
    assert!(leading_minor(2, Component::Small, 3).is_err());
}

#[test]
fn rank_one_generators_have_closed_forms() {
    let r = ring_make(5, 6, 1, 0, 0).unwrap();
    let set = generators(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let x = random_pair(&r, 1, &mut rng);
        let (g, gp) = (&x.big, x.small.get(0, 0));
        let gp_inv = gp.unit_inverse().unwrap();
        assert_eq!(set.u[0].evaluate(&x).unwrap(), g.get(0, 1).clone());
        assert_eq!(set.v[0].evaluate(&x).unwrap(), g.get(0, 0).mul(&gp_inv));
        assert_eq!(set.u[1].evaluate(&x).unwrap(), g.det().mul(&gp_inv));
    }
    let g0 = MatrixPair::g0(&r, 1);
    for f in set.u.iter().chain(&set.v) {
        assert_eq!(f.evaluate(&g0).unwrap(), PadicScalar::one(&r));
    }
}

#[test]
fn generators_are_invariant_and_equivariant() {
    let r = ring_make(5, 6, 1, 0, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 1..=2 {
        let set = generators(n).unwrap();
        for f in set.u.iter().chain(&set.v) {
            for _ in 0..5 {
                let x = random_pair(&r, n, &mut rng);
                let h = random_gl(&r, n, &mut rng);
                let fx = f.evaluate(&x).unwrap();
                assert_eq!(f.evaluate(&x.mul(&MatrixPair::iota(&h))).unwrap(), fx);
                let (lb, tb) = lower_borel(&r, n + 1, &mut rng);
                let (ls, ts) = lower_borel(&r, n, &mut rng);
                let moved = MatrixPair { big: lb, small: ls }.mul(&x);
                let chi = weight_character(&f.weight, &tb, &ts).unwrap();
                assert_eq!(f.evaluate(&moved).unwrap(), chi.mul(&fx));
            }
        }
    }
}

#[test]
fn rank_two_generators_are_normalized_at_xi_and_v11_vanishes_on_g0() {
    let r = ring_make(3, 6, 1, 0, 0).unwrap();
    let set = generators(2).unwrap();
    let xi = MatrixPair::xi(&r, 2);
    for f in set.u.iter().chain(&set.v) {
        assert_eq!(f.evaluate(&xi).unwrap(), PadicScalar::one(&r));
    }
    assert!(set.v[0].evaluate(&MatrixPair::g0(&r, 2)).unwrap().is_zero());
}

#[test]
fn build_u_examples() {
    let one = build_u(&Weight::zero(1)).unwrap();
    assert_eq!(one.poly.as_constant(), Some(BigRational::one()));
    let set = generators(1).unwrap();
    assert_eq!(build_u(&w(&[1, 0], &[0])).unwrap(), set.u[0]);
    let mixed = w(&[1, 1], &[1]);
    assert_eq!(mixed.exponent_vector(), ExponentVector { c: vec![0, 1], d: vec![0] });
    assert_eq!(build_u(&mixed).unwrap(), build_u_direct(&mixed).unwrap());
    assert!(matches!(build_u(&w(&[0, 0], &[1])), Err(BranchingError::NotInterlacing(_))));
}

#[test]
fn product_matches_direct_solution() {
    for weight in [w(&[2, 1], &[1]), w(&[3, -1], &[0]), w(&[1, 0, 0], &[0, 0]), w(&[2, 1, -1], &[1, 0])] {
        assert_eq!(build_u(&weight).unwrap(), build_u_direct(&weight).unwrap(), "{weight:?}");
    }
    assert_eq!(invariant_dimension(&w(&[1, 0, 0], &[0, 0])).unwrap(), 1);
    assert_eq!(invariant_dimension(&w(&[1, 0, 0], &[2, 0])).unwrap(), 0);
}

#[test]
fn twist_identity_and_unit_ratio_in_rank_one() {
    let r = ring_make(3, 8, 1, 0, 0).unwrap();
    let set = generators(1).unwrap();
    let c = set.c_ratio();
    let g0 = MatrixPair::g0(&r, 1);
    assert_eq!(c.evaluate(&g0, false).unwrap(), Some(PadicScalar::one(&r)));
    let weight = w(&[2, -2], &[0]);
    let crit = weight.crit_set().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let x = random_n1(&r, 1, &mut rng);
        let vals = set.values_at(&x).unwrap();
        let cx = vals.c().unwrap();
        assert_eq!(c.evaluate(&x, false).unwrap(), Some(cx.clone()));
        let base = vals.product(&weight.exponent_vector()).unwrap();
        for j in crit.iter() {
            let twisted = build_u(&weight.twisted(j)).unwrap().evaluate(&x).unwrap();
            assert_eq!(base.mul(&cx.pow(j).unwrap()), twisted);
        }
    }
}

#[test]
fn ratio_is_rejected_off_support() {
    let r = ring_make(3, 8, 1, 0, 0).unwrap();
    let c = generators(1).unwrap().c_ratio();
    let x = MatrixPair::from_ints(&r, &[vec![0, 1], vec![1, 0]], &[vec![1]]);
    assert_eq!(c.evaluate(&x, true).unwrap(), None);
    assert_eq!(c.evaluate(&x, false), Err(BranchingError::OffSupport));
}

#[test]
fn factorization_examples() {
    let r = ring_make(3, 8, 1, 0, 0).unwrap();
    let g0 = MatrixPair::g0(&r, 1);
    let wit = factor_n1(&g0).unwrap();
    assert_eq!(wit.lower, MatrixPair::identity(&r, 1));
    let x = MatrixPair::from_ints(&r, &[vec![1, 4], vec![0, 1]], &[vec![1]]);
    let wit = factor_n1(&x).unwrap();
    assert_eq!(*wit.lower.big.get(0, 0), PadicScalar::from_int(&r, 4));
    assert_eq!(wit.reconstruct(), x);
    let r5 = ring_make(5, 6, 1, 0, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=3 {
        for _ in 0..5 {
            let x = random_n1(&r5, n, &mut rng);
            assert_eq!(factor_n1(&x).unwrap().reconstruct(), x);
        }
    }
    let bad = MatrixPair::from_ints(&r, &[vec![1, 2], vec![0, 1]], &[vec![1]]);
    assert!(factor_n1(&bad).is_err());
}

#[test]
fn orbit_identity() {
    for n in 1..=3 {
        let wit = orbit_witness(n);
        assert!(wit.product_matches);
        assert_eq!(wit.xi_determinant.abs(), 1);
    }
    assert!(orbit_witness(1).translate_small_is_identity);
    assert!(!orbit_witness(2).translate_small_is_identity);
}

#[test]
fn generator_json_round_trip() {
    let set = generators(2).unwrap();
    for f in set.u.iter().chain(&set.v) {
        assert_eq!(InducedFunction::from_json(&f.to_json()).unwrap(), *f);
    }
}
