//! The acceptance suite: twelve named checks, each producing a deterministic JSON report.

use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::autforms::{bundled_model, find_eigenform, toy_weight, up_matrix, working_degree, ClassSetModel, ModularForm, TOY_PRECISION, TOY_REPORT_DEGREE};
use crate::branching::{build_u, build_u_direct, factor_n1, invariant_dimension, orbit_witness, random_n1};
use crate::coeff::{multi_indices, ring_make, AffinoidScalar, PadicScalar, Ring};
use crate::dist::kappa::{invariant_on_n1, kappa};
use crate::dist::{growth_report, pair, Distribution, Domain, LocAnFunction, Truncation};
use crate::family::{lift_family, specialize_family};
use crate::lfun::{build_lp, certify_growth, gauss_identity, index_check, period_sum, AnticyclotomicCharacter};
use crate::weights::{AffinoidWeight, Weight};

/// Outcome of one acceptance check. Timing is kept out of the serialized form so reports are reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: Value,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub budget: Duration,
}

impl CriterionReport {
    pub fn within_budget(&self) -> bool {
        self.elapsed <= self.budget
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Every criterion, on the rank-one toys at p = 3.
    RankOne,
    /// The rank-two model: the U_p matrix at degree 1 and representative independence.
    RankTwo,
}

impl Profile {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "n1-p3" => Some(Profile::RankOne),
            "n2-p3" => Some(Profile::RankTwo),
            _ => None,
        }
    }
}

pub const CRITERIA: [(u8, &str, u64); 12] = [
    (1, "branching multiplicity one", 120),
    (2, "product formula equals direct invariant", 120),
    (3, "support lemma", 60),
    (4, "interpolation diagram", 180),
    (5, "specialization squares", 180),
    (6, "level independence", 120),
    (7, "growth certification", 60),
    (8, "gauss identity", 60),
    (9, "index formula", 120),
    (10, "family lift", 300),
    (11, "orbit identity", 1),
    (12, "representative independence", 60),
];

type Check = Result<(bool, Value), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Runs criterion `id` (1 to 12) of the rank-one profile.
pub fn run_criterion(id: u8) -> CriterionReport {
    let (_, name, budget) = CRITERIA.iter().copied().find(|c| c.0 == id).expect("criterion id in 1..=12");
    let start = Instant::now();
    let outcome = match id {
        1 => multiplicity_one(),
        2 => product_formula(),
        3 => support_lemma(),
        4 => interpolation_diagram(),
        5 => specialization_squares(),
        6 => level_independence(),
        7 => growth_certification(),
        8 => gauss_identities(),
        9 => index_formula(),
        10 => family_lift(),
        11 => orbit_identity(),
        _ => representative_independence(&["n1-p3-one-class", "n1-p3-two-class"], &toy_weight(), toy_ring(), Truncation::new(1, 4)),
    };
    finish(id, name, budget, start, outcome)
}

fn finish(id: u8, name: &'static str, budget: u64, start: Instant, outcome: Check) -> CriterionReport {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, json!({ "error": e })));
    CriterionReport { id, name, passed, detail, elapsed: start.elapsed(), budget: Duration::from_secs(budget) }
}

pub fn run_profile(profile: Profile) -> Vec<CriterionReport> {
    match profile {
        Profile::RankOne => (1..=12).map(run_criterion).collect(),
        Profile::RankTwo => {
            let weight = Weight::new(2, vec![1, 0, -1], vec![0, 0]).expect("weight");
            let ring = ring_make(3, 6, 1, 0, 0).expect("ring");
            let start = Instant::now();
            let shape = rank_two_matrix(&weight, &ring);
            let first = finish(0, "rank-two U_p matrix", 60, start, shape);
            let start = Instant::now();
            let second = finish(12, "representative independence", 60, start, representative_independence(&["n2-p3"], &weight, ring, Truncation::new(0, 1)));
            vec![first, second]
        }
    }
}

fn toy_ring() -> Ring {
    ring_make(3, TOY_PRECISION, 1, 0, 0).expect("toy ring")
}

/// Interlacing weights with every entry in [−bound, bound].
pub fn interlacing_weights(n: usize, bound: i64) -> Vec<Weight> {
    fn extend(seq: &mut Vec<i64>, len: usize, bound: i64, out: &mut Vec<Vec<i64>>) {
        if seq.len() == len {
            out.push(seq.clone());
            return;
        }
        let top = seq.last().copied().unwrap_or(bound);
        for x in (-bound..=top).rev() {
            seq.push(x);
            extend(seq, len, bound, out);
            seq.pop();
        }
    }
    let mut chains = Vec::new();
    extend(&mut Vec::new(), 2 * n + 1, bound, &mut chains);
    chains
        .into_iter()
        .map(|c| {
            let mu = c.iter().step_by(2).copied().collect();
            let lambda = c.iter().skip(1).step_by(2).copied().collect();
            Weight::new(n, mu, lambda).expect("well-formed weight")
        })
        .collect()
}

fn multiplicity_one() -> Check {
    let mut failures = Vec::new();
    let mut count = 0;
    for n in 1..=2 {
        for w in interlacing_weights(n, 3) {
            count += 1;
            let dim = invariant_dimension(&w).map_err(err)?;
            if dim != 1 {
                failures.push(json!({ "mu": w.mu, "lambda": w.lambda, "dimension": dim }));
            }
        }
    }
    Ok((failures.is_empty(), json!({ "weights": count, "failures": failures })))
}

fn product_formula() -> Check {
    let mut failures = Vec::new();
    let mut count = 0;
    for n in 1..=2 {
        for w in interlacing_weights(n, 3) {
            count += 1;
            if build_u(&w).map_err(err)? != build_u_direct(&w).map_err(err)? {
                failures.push(json!({ "mu": w.mu, "lambda": w.lambda }));
            }
        }
    }
    Ok((failures.is_empty(), json!({ "weights": count, "failures": failures })))
}

/// Unit values of u on N^1 for every interlacing weight with entries in [−1, 1], and exact factorization.
fn support_lemma() -> Check {
    let mut rows = Vec::new();
    let mut passed = true;
    for n in 1..=2usize {
        let weights = interlacing_weights(n, 1);
        let invariants = weights.iter().map(|w| build_u(w).map_err(err)).collect::<Result<Vec<_>, _>>()?;
        for p in [3u64, 5] {
            let ring = ring_make(p, 8, 1, 0, 0).map_err(err)?;
            let mut rng = ChaCha8Rng::seed_from_u64(31 + p);
            let mut non_unit = vec![0usize; weights.len()];
            let mut reconstructed = 0;
            for _ in 0..200 {
                let x = random_n1(&ring, n, &mut rng);
                for (slot, u) in non_unit.iter_mut().zip(&invariants) {
                    if !u.evaluate(&x).map_err(err)?.is_unit() {
                        *slot += 1;
                    }
                }
                if factor_n1(&x).is_ok_and(|f| f.reconstruct() == x) {
                    reconstructed += 1;
                }
            }
            let failing: Vec<Value> = weights
                .iter()
                .zip(&non_unit)
                .filter(|(_, &c)| c > 0)
                .map(|(w, &c)| json!({ "mu": w.mu, "lambda": w.lambda, "exponents_d": w.exponent_vector().d, "non_unit_samples": c }))
                .collect();
            passed &= failing.is_empty() && reconstructed == 200;
            rows.push(json!({ "n": n, "p": p, "weights": weights.len(), "samples": 200, "reconstructed": reconstructed, "non_unit_weights": failing }));
        }
    }
    Ok((passed, json!({ "cases": rows })))
}

fn random_padic(rng: &mut ChaCha8Rng, ring: &Ring) -> PadicScalar {
    PadicScalar::from_int(ring, rng.gen_range(0..ring.modulus()) as i64)
}

fn random_distribution(rng: &mut ChaCha8Rng, ring: &Ring, domain: Domain, trunc: Truncation) -> Result<Distribution<PadicScalar>, String> {
    let zero = Distribution::zero(&PadicScalar::zero(ring), domain, trunc).map_err(err)?;
    let moments = (0..zero.moments().len()).map(|_| random_padic(rng, ring)).collect();
    Distribution::from_moments(domain, trunc, moments).map_err(err)
}

fn random_affinoid(rng: &mut ChaCha8Rng, ring: &Ring) -> Result<AffinoidScalar, String> {
    let terms: Vec<(Vec<u32>, PadicScalar)> = multi_indices(ring.weight_variables(), ring.series_degree()).into_iter().map(|d| (d, random_padic(rng, ring))).collect();
    AffinoidScalar::from_terms(ring, terms).map_err(err)
}

fn random_affinoid_distribution(rng: &mut ChaCha8Rng, ring: &Ring, domain: Domain, trunc: Truncation) -> Result<Distribution<AffinoidScalar>, String> {
    let zero = Distribution::zero(&AffinoidScalar::zero(ring), domain, trunc).map_err(err)?;
    let moments = (0..zero.moments().len()).map(|_| random_affinoid(rng, ring)).collect::<Result<_, _>>()?;
    Distribution::from_moments(domain, trunc, moments).map_err(err)
}

fn interpolation_diagram() -> Check {
    let ring = toy_ring();
    let zero = PadicScalar::zero(&ring);
    let w = toy_weight();
    let trunc = Truncation::new(1, 6);
    let crit = w.crit_set().ok_or("toy weight has no critical set")?;
    let invariants = crit
        .iter()
        .map(|j| build_u_direct(&w.twisted(j)).map_err(err).and_then(|u| invariant_on_n1(&u, &ring, trunc).map_err(err)))
        .collect::<Result<Vec<_>, _>>()?;
    let powers = crit.iter().map(|j| LocAnFunction::power(&zero, Domain::Units, trunc, j).map_err(err)).collect::<Result<Vec<_>, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = i64::MAX;
    for _ in 0..50 {
        let xi = random_distribution(&mut rng, &ring, Domain::Unipotent { n: 1 }, trunc)?;
        let k = kappa(&xi, &w).map_err(err)?;
        for (zj, inv) in powers.iter().zip(&invariants) {
            let lhs = pair(&k, zj).map_err(err)?;
            let rhs = pair(&xi, inv).map_err(err)?;
            worst = worst.min(lhs.agreement(&rhs));
        }
    }
    Ok((worst >= 6, json!({ "samples": 50, "twists": crit.len(), "min_agreement": worst, "required": 6 })))
}

fn specialization_squares() -> Check {
    let ring = toy_ring();
    let affinoid = ring_make(3, TOY_PRECISION, 1, 1, 3).map_err(err)?;
    let omega = AffinoidWeight::parallel(toy_weight()).map_err(err)?;
    let required = TOY_PRECISION as i64 - 2;
    let points = [0i64, 9, -9, 18, 27];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let reduce = |d: &Distribution<PadicScalar>| d.map_moments(|m| m.reduce_to(&ring));
    let mut kappa_worst = i64::MAX;
    for i in 0..10 {
        let w0 = points[i % points.len()];
        let point = [PadicScalar::from_int(&affinoid, w0)];
        let xi = random_affinoid_distribution(&mut rng, &affinoid, Domain::Unipotent { n: 1 }, Truncation::new(1, 5))?;
        let top = kappa(&xi, &omega).map_err(err)?.specialize(&point).map_err(err)?;
        let bottom = kappa(&xi.specialize(&point).map_err(err)?, &omega.at(&[w0]).map_err(err)?).map_err(err)?;
        kappa_worst = kappa_worst.min(reduce(&top).agreement(&reduce(&bottom)).map_err(err)?);
    }
    let model = bundled_model("n1-p3-two-class").map_err(err)?;
    let mut period_worst = i64::MAX;
    for i in 0..10 {
        let w0 = points[i % points.len()];
        let point = [PadicScalar::from_int(&affinoid, w0)];
        let values = (0..model.h()).map(|_| random_affinoid_distribution(&mut rng, &affinoid, Domain::Unipotent { n: 1 }, Truncation::new(1, 5))).collect::<Result<Vec<_>, _>>()?;
        let phi = ModularForm { values };
        let top = period_sum(&model, &phi, &omega).map_err(err)?.specialize(&point).map_err(err)?;
        let special = phi.map(|d| d.specialize(&point)).map_err(err)?;
        let bottom = period_sum(&model, &special, &omega.at(&[w0]).map_err(err)?).map_err(err)?;
        period_worst = period_worst.min(reduce(&top).agreement(&reduce(&bottom)).map_err(err)?);
    }
    let passed = kappa_worst >= required && period_worst >= required;
    Ok((passed, json!({ "series_degree": 3, "points": points, "kappa_square": kappa_worst, "period_square": period_worst, "required": required })))
}

fn toy_eigen(name: &str, slope: u32) -> Result<(ClassSetModel, crate::autforms::EigenForm), String> {
    let model = bundled_model(name).map_err(err)?;
    let ring = toy_ring();
    let eigen = find_eigenform(&model, &toy_weight(), &ring, working_degree(TOY_REPORT_DEGREE, &ring), slope).map_err(err)?;
    Ok((model, eigen))
}

fn level_independence() -> Check {
    let mut rows = Vec::new();
    let mut passed = true;
    for (name, slope) in [("n1-p3-two-class", 0u32), ("n1-p3-one-class", 1)] {
        let (model, eigen) = toy_eigen(name, slope)?;
        let required = TOY_PRECISION as i64 - 3 * slope as i64 - 2;
        let base = build_lp(&model, &eigen, 1, TOY_REPORT_DEGREE).map_err(err)?.normalized(TOY_REPORT_DEGREE).map_err(err)?;
        let mut agreements = Vec::new();
        for beta in [2, 3] {
            let other = build_lp(&model, &eigen, beta, TOY_REPORT_DEGREE).map_err(err)?.normalized(TOY_REPORT_DEGREE).map_err(err)?;
            agreements.push(base.agreement(&other).map_err(err)?);
        }
        let ok = !base.is_zero() && agreements.iter().all(|&a| a >= required);
        passed &= ok;
        rows.push(json!({ "model": name, "slope": slope, "agreement_beta_2_3_vs_1": agreements, "required": required, "passed": ok }));
    }
    Ok((passed, json!({ "toys": rows })))
}

fn rational_json(x: Rational64) -> Value {
    json!(format!("{x}"))
}

fn growth_certification() -> Check {
    let mut rows = Vec::new();
    let mut passed = true;
    for (name, slope) in [("n1-p3-two-class", 0u32), ("n1-p3-one-class", 1)] {
        let (model, eigen) = toy_eigen(name, slope)?;
        let l = build_lp(&model, &eigen, 4, TOY_REPORT_DEGREE).map_err(err)?;
        let cert = certify_growth(&l, 4).map_err(err)?;
        passed &= cert.certified;
        rows.push(json!({ "model": name, "slope": slope, "growth": rational_json(cert.report.growth), "bound": rational_json(cert.bound), "certified": cert.certified }));
    }
    let ring = toy_ring();
    let dirac = Distribution::dirac(&PadicScalar::zero(&ring), Domain::Zp, Truncation::new(4, TOY_REPORT_DEGREE), &[1]).map_err(err)?;
    let dirac_growth = growth_report(&dirac).map_err(err)?.growth;
    passed &= dirac_growth == Rational64::from_integer(0);
    Ok((passed, json!({ "toys": rows, "dirac_growth": rational_json(dirac_growth) })))
}

fn gauss_identities() -> Check {
    let mut failures = Vec::new();
    let mut count = 0;
    for p in [3u64, 5, 7] {
        for beta in [1u32, 2] {
            for chi in AnticyclotomicCharacter::primitive(p, beta, 0) {
                count += 1;
                let (_, ok) = gauss_identity(&chi, p, 6).map_err(err)?;
                if !ok {
                    failures.push(json!({ "p": p, "beta": beta, "gen_exponent": chi.gen_exponent }));
                }
            }
        }
    }
    Ok((failures.is_empty(), json!({ "characters": count, "failures": failures })))
}

fn index_formula() -> Check {
    let mut rows = Vec::new();
    let mut passed = true;
    for n in [1usize, 2] {
        for p in [2u64, 3] {
            for beta in [1u32, 2] {
                let r = index_check(n, p, beta).map_err(err)?;
                passed &= r.matches;
                rows.push(serde_json::to_value(&r).map_err(err)?);
            }
        }
    }
    Ok((passed, json!({ "cases": rows })))
}

fn family_lift() -> Check {
    const SERIES_DEGREE: u32 = 4;
    let model = bundled_model("n1-p3-two-class").map_err(err)?;
    let ring = toy_ring();
    let omega = AffinoidWeight::parallel(toy_weight()).map_err(err)?;
    let family = lift_family(&model, &omega, &ring, working_degree(TOY_REPORT_DEGREE, &ring), 0, SERIES_DEGREE).map_err(err)?;
    let center = specialize_family(&family, &[0]).map_err(err)?;
    let plain = |v: Vec<PadicScalar>| v.into_iter().map(|x| x.reduce_to(&ring)).collect::<Vec<_>>();
    let center_exact = plain(center.form.to_vector().map_err(err)?) == family.center.form.to_vector().map_err(err)? && center.eigenvalue.value.reduce_to(&ring) == family.center.alpha;
    let neighbor = specialize_family(&family, &[3]).map_err(err)?;
    let image = crate::autforms::up_apply(&model, &neighbor.form, &neighbor.weight).map_err(err)?.coarsen(0).map_err(err)?;
    let expected = neighbor.form.scale_padic(&neighbor.eigenvalue.value);
    let neighbor_agreement = image.truncate_degree(TOY_REPORT_DEGREE).map_err(err)?.agreement(&expected.truncate_degree(TOY_REPORT_DEGREE).map_err(err)?).map_err(err)?;
    let neighbor_required = (TOY_PRECISION - SERIES_DEGREE - 1) as i64;
    let residual_required = TOY_PRECISION - 2;
    let passed = center_exact && neighbor_agreement >= neighbor_required && family.certified(residual_required);
    let residuals: Vec<Value> = family.residuals.iter().map(|r| json!({ "degree": r.degree, "digits": r.digits })).collect();
    Ok((
        passed,
        json!({
            "series_degree": SERIES_DEGREE,
            "shrink": family.shrink,
            "center_exact": center_exact,
            "neighbor_point": 3,
            "neighbor_agreement": neighbor_agreement,
            "neighbor_required": neighbor_required,
            "residuals": residuals,
            "residual_required": residual_required,
        }),
    ))
}

fn orbit_identity() -> Check {
    let rows: Vec<Value> = (1..=3).map(|n| serde_json::to_value(orbit_witness(n)).expect("witness serializes")).collect();
    let passed = (1..=3).all(|n| orbit_witness(n).product_matches);
    Ok((passed, json!({ "witnesses": rows })))
}

fn representative_independence(models: &[&str], weight: &Weight, ring: Ring, trunc: Truncation) -> Check {
    let one = PadicScalar::one(&ring);
    let mut rows = Vec::new();
    let mut passed = true;
    for name in models {
        let model = bundled_model(name).map_err(err)?;
        let base = up_matrix(&model, weight, &one, trunc).map_err(err)?;
        for seed in [7u64, 99] {
            let other = model.rerandomized(seed).map_err(err)?;
            let same = up_matrix(&other, weight, &one, trunc).map_err(err)? == base;
            passed &= same;
            rows.push(json!({ "model": name, "seed": seed, "identical": same }));
        }
    }
    Ok((passed, json!({ "runs": rows, "truncation": trunc })))
}

fn rank_two_matrix(weight: &Weight, ring: &Ring) -> Check {
    let model = bundled_model("n2-p3").map_err(err)?;
    let a = up_matrix(&model, weight, &PadicScalar::one(ring), Truncation::new(0, 1)).map_err(err)?;
    let size = a.rows();
    let words: Vec<u8> = a.entries().iter().flat_map(|x| x.coeffs().iter().flat_map(|w| w.to_le_bytes())).collect();
    Ok((size > 0 && a.is_square(), json!({ "cosets": model.up_cosets.first().map_or(0, |c| c.len()), "size": size, "hash": crate::dist::table::bytes_hash(&words) })))
}
