use anticyc::coeff::{ring_make, PadicScalar, Ring};
use anticyc::dist::table::MomentTable;
use anticyc::dist::{Distribution, Domain, Truncation};
use proptest::prelude::*;

const PRECISION: u32 = 8;

fn plain_ring() -> Ring {
    ring_make(3, PRECISION, 1, 0, 0).unwrap()
}

fn cyclotomic_ring() -> Ring {
    ring_make(3, PRECISION, 9, 0, 0).unwrap()
}

fn scalar(ring: &Ring, coeffs: &[i64]) -> PadicScalar {
    PadicScalar::from_coeffs(ring, &coeffs[..ring.degree()]).unwrap()
}

fn coeff_vec() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-10_000i64..10_000, 6)
}

fn table_bytes(moments: &[i64], exponent: i64, precision: u32) -> Vec<u8> {
    let ring = plain_ring();
    let trunc = Truncation::new(1, 3);
    let like = PadicScalar::zero(&ring);
    let count = Distribution::zero(&like, Domain::Zp, trunc).unwrap().moments().len();
    let values = (0..count).map(|i| PadicScalar::from_int(&ring, moments[i % moments.len()])).collect();
    let d = Distribution::from_moments(Domain::Zp, trunc, values).unwrap().with_scaling(exponent, precision);
    MomentTable::new("form", vec![d], serde_json::json!({ "exponent": exponent })).unwrap().to_bytes()
}

proptest! {
    #[test]
    fn scalars_form_a_commutative_ring(a in coeff_vec(), b in coeff_vec(), c in coeff_vec(), cyclotomic in any::<bool>()) {
        let ring = if cyclotomic { cyclotomic_ring() } else { plain_ring() };
        let (x, y, z) = (scalar(&ring, &a), scalar(&ring, &b), scalar(&ring, &c));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert_eq!(x.add(&y).sub(&y), x.clone());
        prop_assert_eq!(x.mul(&PadicScalar::one(&ring)), x);
    }

    #[test]
    fn units_invert_and_divisibility_adds(a in -10_000i64..10_000, b in -10_000i64..10_000) {
        let ring = plain_ring();
        let (x, y) = (PadicScalar::from_int(&ring, a), PadicScalar::from_int(&ring, b));
        if x.is_unit() {
            prop_assert_eq!(x.mul(&x.unit_inverse().unwrap()), PadicScalar::one(&ring));
        }
        let product = x.mul(&y);
        prop_assert_eq!(product.p_divisibility(), (x.p_divisibility() + y.p_divisibility()).min(PRECISION));
    }

    #[test]
    fn moment_tables_round_trip(moments in prop::collection::vec(-500i64..500, 1..12), exponent in -4i64..4, precision in 1u32..=PRECISION) {
        let bytes = table_bytes(&moments, exponent, precision);
        let table = MomentTable::<PadicScalar>::from_bytes(&bytes).unwrap();
        prop_assert_eq!(table.to_bytes(), bytes);
        prop_assert_eq!(table.distributions[0].exponent(), exponent);
    }

    #[test]
    fn corrupted_tables_decode_or_fail_cleanly(position in any::<prop::sample::Index>(), byte in any::<u8>(), cut in any::<prop::sample::Index>()) {
        let bytes = table_bytes(&[1, 2, 3], 0, PRECISION);
        let mut flipped = bytes.clone();
        let i = position.index(bytes.len());
        flipped[i] = byte;
        if let Ok(table) = MomentTable::<PadicScalar>::from_bytes(&flipped) {
            let again = MomentTable::<PadicScalar>::from_bytes(&table.to_bytes()).unwrap();
            prop_assert_eq!(again, table);
        }
        let end = cut.index(bytes.len());
        prop_assert!(MomentTable::<PadicScalar>::from_bytes(&bytes[..end]).is_err());
    }
}
