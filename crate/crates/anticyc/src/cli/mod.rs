//! Command-line driver: every module as a subcommand with JSON reports on stdout.
//!
//! Exit codes: 0 success, 2 precondition, 3 verification failure, 4 schema.

mod errors;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_rational::Rational64;
use serde_json::{json, Value};

use crate::autforms::{bundled_model, find_eigenform, synthetic_model, named_spec, up_matrix, working_degree, ClassSetModel, EigenForm, ModularForm};
use crate::branching::{build_u, build_u_direct, generators, invariant_dimension};
use crate::coeff::{ring_make, AffinoidScalar, PadicScalar, Ring};
use crate::dist::kappa::kappa;
use crate::dist::table::{bytes_hash, MomentTable, TableEntry};
use crate::dist::{Distribution, Domain, Truncation};
use crate::family::{family_lp, lift_family, specialize_family, disc_point, ColemanFamily, DegreeResidual};
use crate::lfun::{build_lp, certify_growth, eval_character, integrate_character, interpolation_factor, AnticyclotomicCharacter, PadicLFunction};
use crate::verify::{run_profile, Profile};
use crate::weights::{AffinoidWeight, Weight};

pub use errors::CliError;

#[derive(Debug, Parser)]
#[command(name = "anticyc", version, about = "Finite-precision anticyclotomic p-adic L-functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RingArgs {
    /// The prime p.
    #[arg(long, default_value_t = 3)]
    pub p: u64,
    /// Absolute precision N in p-digits.
    #[arg(long, default_value_t = 8)]
    pub precision: u32,
    /// Moment degree reported in outputs.
    #[arg(long, default_value_t = 6)]
    pub degree: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical set and h of a weight.
    Crit {
        #[arg(long)]
        weight: String,
    },
    /// The fundamental invariant generators of rank n.
    BranchGen {
        #[arg(long)]
        n: usize,
    },
    /// Multiplicity one and the product formula at one weight.
    BranchCheck {
        #[arg(long)]
        weight: String,
    },
    /// A point mass written as a moment table, as input for `kappa`.
    Dirac {
        /// Rank n of the unipotent domain.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: u32,
        /// Integer coordinates, comma separated.
        #[arg(long)]
        point: String,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pushforward of a distribution on N^1 to Z_p^×.
    Kappa {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// The matrix of U_p on truncated forms.
    UpMatrix {
        /// Class-set JSON file or `bundled:NAME`.
        model: String,
        #[arg(long)]
        weight: String,
        /// Level and degree as `r,d`.
        #[arg(long)]
        trunc: String,
        #[arg(long, default_value_t = 8)]
        precision: u32,
    },
    /// Eigenform, level-β lift and period-sum L-function.
    LpBuild {
        #[arg(long)]
        model: String,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        slope: u32,
        #[arg(long, default_value_t = 2)]
        beta: u32,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Value of an L-function at a character.
    LpEval {
        #[arg(long = "L")]
        l: PathBuf,
        /// JSON {"j":..,"beta":..,"gen_exponent":..}.
        #[arg(long = "char")]
        character: String,
    },
    /// Coleman family through an eigenform along the parallel direction.
    FamilyLift {
        #[arg(long)]
        model: String,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        slope: u32,
        /// Total degree D of the weight series.
        #[arg(long, default_value_t = 4)]
        series_degree: u32,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Specialization of a family, optionally with the two-variable L-function at a character.
    FamilyEval {
        #[arg(long)]
        family: PathBuf,
        /// Integer disc coordinates, comma separated.
        #[arg(long)]
        point: String,
        #[arg(long)]
        model: Option<String>,
        #[arg(long = "char")]
        character: Option<String>,
        #[arg(long, default_value_t = 1)]
        beta: u32,
    },
    /// Regenerates a shipped synthetic class-set model.
    GenModel {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// The acceptance suite for a named profile.
    VerifyAll {
        #[arg(long, default_value = "n1-p3")]
        profile: String,
    },
}

/// Parses arguments, runs, prints the report, and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(report) => {
            emit(&report);
            0
        }
        Err(e) => {
            let body = match &e {
                CliError::Verification(report) => report.clone(),
                other => json!({ "status": "error", "code": other.exit_code(), "error": other.to_string() }),
            };
            emit(&body);
            e.exit_code()
        }
    }
}

/// Writes the report; a closed stdout is not an error of the computation.
fn emit(report: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    let _ = writeln!(std::io::stdout(), "{text}");
}

pub fn run(command: &Command) -> Result<Value, CliError> {
    match command {
        Command::Crit { weight } => crit(&read_weight(weight)?),
        Command::BranchGen { n } => branch_gen(*n),
        Command::BranchCheck { weight } => branch_check(&read_weight(weight)?),
        Command::Dirac { n, level, point, ring, out } => dirac(*n, *level, point, ring, out),
        Command::Kappa { dist, weight, out } => kappa_cmd(dist, &read_weight(weight)?, out),
        Command::UpMatrix { model, weight, trunc, precision } => up_matrix_cmd(model, &read_weight(weight)?, trunc, *precision),
        Command::LpBuild { model, weight, slope, beta, ring, out } => lp_build(model, &read_weight(weight)?, *slope, *beta, ring, out),
        Command::LpEval { l, character } => lp_eval(l, character),
        Command::FamilyLift { model, weight, slope, series_degree, ring, out } => family_lift(model, &read_weight(weight)?, *slope, *series_degree, ring, out),
        Command::FamilyEval { family, point, model, character, beta } => family_eval(family, point, model.as_deref(), character.as_deref(), *beta),
        Command::GenModel { name, out } => gen_model(name, out),
        Command::VerifyAll { profile } => verify_all(profile),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Precondition(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Precondition(format!("{}: {e}", path.display())))
}

/// Inline JSON when the argument starts with `{`, otherwise a path to a JSON file.
fn read_json<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T, CliError> {
    let text = if arg.trim_start().starts_with('{') { arg.to_string() } else { String::from_utf8_lossy(&read_file(Path::new(arg))?).into_owned() };
    serde_json::from_str(&text).map_err(|e| CliError::Schema(e.to_string()))
}

fn read_weight(arg: &str) -> Result<Weight, CliError> {
    let w: Weight = read_json(arg)?;
    w.validate()?;
    Ok(w)
}

fn read_model(arg: &str) -> Result<(ClassSetModel, String), CliError> {
    let model = match arg.strip_prefix("bundled:") {
        Some(name) => bundled_model(name)?,
        None => ClassSetModel::from_json_str(&String::from_utf8_lossy(&read_file(Path::new(arg))?))?,
    };
    let hash = model.content_hash();
    Ok((model, hash))
}

fn parse_ints(arg: &str) -> Result<Vec<i64>, CliError> {
    arg.split(',').map(|s| s.trim().parse::<i64>().map_err(|e| CliError::Schema(format!("{arg}: {e}")))).collect()
}

pub fn scalar_json(x: &PadicScalar) -> Value {
    match x.coeffs() {
        [c] => json!(c),
        cs => json!(cs),
    }
}

fn rational_json(x: Rational64) -> Value {
    json!(x.to_string())
}

/// Critical range and h-invariant of a weight.
pub fn crit(w: &Weight) -> Result<Value, CliError> {
    let range = w.crit_set().ok_or_else(|| CliError::Precondition("weight has no critical set".into()))?;
    Ok(json!({ "crit": [range.min, range.max], "h": w.h() }))
}

fn branch_gen(n: usize) -> Result<Value, CliError> {
    let set = generators(n)?;
    Ok(json!({
        "n": n,
        "u": set.u.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
        "v": set.v.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
    }))
}

fn branch_check(w: &Weight) -> Result<Value, CliError> {
    let dimension = invariant_dimension(w)?;
    let exponents = w.exponent_vector();
    let mut report = json!({ "weight": w, "invariant_dimension": dimension, "exponents": { "c": exponents.c, "d": exponents.d } });
    if !w.interlaces() {
        report["interlaces"] = json!(false);
        return if dimension == 0 { Ok(report) } else { Err(CliError::Verification(report)) };
    }
    let product_matches = build_u(w)? == build_u_direct(w)?;
    report["interlaces"] = json!(true);
    report["product_matches_direct"] = json!(product_matches);
    if dimension == 1 && product_matches {
        Ok(report)
    } else {
        Err(CliError::Verification(report))
    }
}

fn dirac(n: usize, level: u32, point: &str, ring: &RingArgs, out: &Path) -> Result<Value, CliError> {
    let r = ring_make(ring.p, ring.precision, 1, 0, 0)?;
    let coords: Vec<u64> = parse_ints(point)?.into_iter().map(|x| u64::try_from(x).map_err(|_| CliError::Schema("coordinates must be non-negative".into()))).collect::<Result<_, _>>()?;
    let mu = Distribution::dirac(&PadicScalar::zero(&r), Domain::Unipotent { n }, Truncation::new(level, ring.degree), &coords)?;
    let bytes = MomentTable::new("distribution", vec![mu], Value::Null)?.to_bytes();
    write_file(out, &bytes)?;
    Ok(json!({ "out": out.display().to_string(), "out_hash": bytes_hash(&bytes) }))
}

fn kappa_cmd(dist: &Path, w: &Weight, out: &Path) -> Result<Value, CliError> {
    let input = read_file(dist)?;
    let table = MomentTable::<PadicScalar>::from_bytes(&input)?;
    let pushed = table.distributions.iter().map(|d| kappa(d, w)).collect::<Result<Vec<_>, _>>()?;
    let bytes = MomentTable::new("distribution", pushed, json!({ "weight": w }))?.to_bytes();
    write_file(out, &bytes)?;
    Ok(json!({ "input_hash": bytes_hash(&input), "weight": w, "out": out.display().to_string(), "out_hash": bytes_hash(&bytes) }))
}

fn parse_trunc(arg: &str) -> Result<Truncation, CliError> {
    match parse_ints(arg)?.as_slice() {
        [r, d] if *r >= 0 && *d >= 0 => Ok(Truncation::new(*r as u32, *d as u32)),
        _ => Err(CliError::Schema(format!("truncation must be `r,d`, found {arg}"))),
    }
}

fn up_matrix_cmd(model_arg: &str, w: &Weight, trunc: &str, precision: u32) -> Result<Value, CliError> {
    let (model, model_hash) = read_model(model_arg)?;
    let trunc = parse_trunc(trunc)?;
    let ring = ring_make(model.p, precision, 1, 0, 0)?;
    let a = up_matrix(&model, w, &PadicScalar::one(&ring), trunc)?;
    let rows: Vec<Vec<Value>> = (0..a.rows()).map(|r| (0..a.cols()).map(|c| scalar_json(a.get(r, c))).collect()).collect();
    let charpoly: Vec<Value> = a.charpoly().iter().map(scalar_json).collect();
    Ok(json!({ "model_hash": model_hash, "weight": w, "truncation": trunc, "precision": precision, "size": a.rows(), "matrix": rows, "charpoly": charpoly }))
}

fn eigenform(model: &ClassSetModel, w: &Weight, slope: u32, ring: &RingArgs) -> Result<(Ring, EigenForm), CliError> {
    if ring.p != model.p {
        return Err(CliError::Precondition(format!("ring prime {} differs from the model prime {}", ring.p, model.p)));
    }
    let r = ring_make(ring.p, ring.precision, 1, 0, 0)?;
    let eigen = find_eigenform(model, w, &r, working_degree(ring.degree, &r), slope)?;
    Ok((r, eigen))
}

fn lp_build(model_arg: &str, w: &Weight, slope: u32, beta: u32, ring: &RingArgs, out: &Path) -> Result<Value, CliError> {
    let (model, model_hash) = read_model(model_arg)?;
    let (_, eigen) = eigenform(&model, w, slope, ring)?;
    let l = build_lp(&model, &eigen, beta, ring.degree)?;
    let certificate = certify_growth(&l, beta)?;
    let base = l.normalized(ring.degree)?;
    let mut independence = Vec::new();
    for other in 1..beta {
        let lower = build_lp(&model, &eigen, other, ring.degree)?.normalized(ring.degree)?;
        independence.push(json!({ "beta": other, "agreement": base.agreement(&lower)? }));
    }
    let growth = json!({
        "levels": certificate.report.levels.iter().map(|l| json!({ "level": l.level, "norm_exponent": l.exponent.map(rational_json) })).collect::<Vec<_>>(),
        "growth": rational_json(certificate.report.growth),
        "bound": rational_json(certificate.bound),
        "certified": certificate.certified,
        "unique": certificate.unique,
    });
    let metadata = json!({
        "weight": w,
        "alpha": scalar_json(&eigen.alpha),
        "slope": slope,
        "beta": beta,
        "model_hash": model_hash,
        "eigen_precision": eigen.precision,
    });
    let bytes = MomentTable::new("lfunction", vec![l.distribution.clone()], metadata.clone())?.to_bytes();
    write_file(out, &bytes)?;
    Ok(json!({ "metadata": metadata, "growth": growth, "beta_independence": independence, "out": out.display().to_string(), "out_hash": bytes_hash(&bytes) }))
}

fn read_lfunction(path: &Path) -> Result<(PadicLFunction, String), CliError> {
    let bytes = read_file(path)?;
    let l = lfunction_from_bytes(&bytes).map_err(|e| match e {
        CliError::Schema(m) => CliError::Schema(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok((l, bytes_hash(&bytes)))
}

/// Decodes an L-function moment table.
pub fn lfunction_from_bytes(bytes: &[u8]) -> Result<PadicLFunction, CliError> {
    let table = MomentTable::<PadicScalar>::from_bytes(bytes)?;
    if table.kind != "lfunction" || table.distributions.len() != 1 {
        return Err(CliError::Schema("not an L-function table".into()));
    }
    let meta = &table.metadata;
    let weight: Weight = serde_json::from_value(meta["weight"].clone()).map_err(|e| CliError::Schema(e.to_string()))?;
    let field = |name: &str| meta[name].as_u64().ok_or_else(|| CliError::Schema(format!("metadata field {name}")));
    let distribution = table.distributions[0].clone();
    let alpha = PadicScalar::from_int(distribution.ring(), field("alpha")? as i64);
    Ok(PadicLFunction { weight, alpha, slope: field("slope")? as u32, beta: field("beta")? as u32, distribution })
}

fn character_json(value: &crate::dist::Scaled<PadicScalar>) -> Value {
    json!({ "exponent": value.exponent, "unit_part": scalar_json(&value.value), "precision": value.precision })
}

fn lp_eval(path: &Path, character: &str) -> Result<Value, CliError> {
    let (l, hash) = read_lfunction(path)?;
    let chi: AnticyclotomicCharacter = read_json(character)?;
    let mut report = character_report(&l, &chi)?;
    report["L_hash"] = json!(hash);
    Ok(report)
}

/// Value of an L-function at a character, with its interpolation data when accessible.
pub fn character_report(l: &PadicLFunction, chi: &AnticyclotomicCharacter) -> Result<Value, CliError> {
    let p = l.distribution.ring().p();
    if chi.beta >= 1 && !chi.is_primitive(p) {
        return Err(CliError::Precondition(format!("character is not primitive of conductor p^{}", chi.beta)));
    }
    let value = eval_character(l, chi)?;
    let mut report = json!({ "character": chi, "value": character_json(&value.value), "accessible": value.accessible });
    if value.accessible {
        if chi.beta >= 1 {
            let f = interpolation_factor(l.weight.n, p, chi.beta, Rational64::from_integer(l.slope as i64))?;
            report["interpolation_factor"] = json!({ "valuation": rational_json(f.valuation), "alpha_power": f.alpha_power, "exponent": f.exponent });
        }
    } else {
        report["tag"] = json!("no interpolation semantics");
    }
    Ok(report)
}

fn family_lift(model_arg: &str, w: &Weight, slope: u32, series_degree: u32, ring: &RingArgs, out: &Path) -> Result<Value, CliError> {
    let (model, model_hash) = read_model(model_arg)?;
    let r = ring_make(ring.p, ring.precision, 1, 0, 0)?;
    let omega = AffinoidWeight::parallel(w.clone())?;
    let family = lift_family(&model, &omega, &r, working_degree(ring.degree, &r), slope, series_degree)?;
    let mut eigenvalue = Vec::new();
    family.eigenvalue.write_words(&mut eigenvalue);
    let residuals: Vec<Value> = family.residuals.iter().map(|r| json!({ "degree": r.degree, "digits": r.digits })).collect();
    let metadata = json!({
        "omega": family.omega,
        "shrink": family.shrink,
        "slope": slope,
        "eigenvalue_words": eigenvalue,
        "center_alpha": scalar_json(&family.center.alpha),
        "center_precision": family.center.precision,
        "residuals": residuals,
        "model_hash": model_hash,
    });
    let bytes = MomentTable::new("family", family.form.values.clone(), metadata.clone())?.to_bytes();
    write_file(out, &bytes)?;
    let certified = family.certified(ring.precision.saturating_sub(2));
    let report = json!({ "metadata": metadata, "certified": certified, "out": out.display().to_string(), "out_hash": bytes_hash(&bytes) });
    if certified {
        Ok(report)
    } else {
        Err(CliError::Verification(report))
    }
}

fn read_family(path: &Path) -> Result<(ColemanFamily, String), CliError> {
    let bytes = read_file(path)?;
    let table = MomentTable::<AffinoidScalar>::from_bytes(&bytes)?;
    if table.kind != "family" {
        return Err(CliError::Schema(format!("{} is not a family table", path.display())));
    }
    let meta = &table.metadata;
    let schema = |e: serde_json::Error| CliError::Schema(e.to_string());
    let omega: AffinoidWeight = serde_json::from_value(meta["omega"].clone()).map_err(schema)?;
    let shrink = meta["shrink"].as_u64().ok_or_else(|| CliError::Schema("metadata field shrink".into()))? as u32;
    let slope = meta["slope"].as_u64().ok_or_else(|| CliError::Schema("metadata field slope".into()))? as u32;
    let words: Vec<u64> = serde_json::from_value(meta["eigenvalue_words"].clone()).map_err(schema)?;
    let residuals: Vec<Value> = serde_json::from_value(meta["residuals"].clone()).map_err(schema)?;
    let ring = table.ring().clone();
    let eigenvalue = AffinoidScalar::read_words(&ring, &mut words.into_iter())?;
    let form = ModularForm { values: table.distributions };
    let p = ring.p() as i64;
    let factor = p.pow(shrink);
    let effective = AffinoidWeight::new(omega.center.clone(), omega.directions.iter().map(|d| d.scaled(factor)).collect())?;
    let plain = ring_make(ring.p(), ring.precision(), ring.cyclotomic_order(), 0, 0)?;
    let zero = vec![PadicScalar::zero(&ring); omega.dimension()];
    let center_form = form.map(|d| d.specialize(&zero).map(|s| s.map_moments(|m| m.reduce_to(&plain))))?;
    let alpha = eigenvalue.constant_term().reduce_to(&plain);
    let center = EigenForm { weight: omega.center.clone(), slope, alpha, form: center_form, precision: meta["center_precision"].as_u64().unwrap_or(0) as u32, charpoly: Vec::new() };
    let residuals = residuals
        .iter()
        .map(|r| Ok(DegreeResidual { degree: r["degree"].as_u64().ok_or_else(|| CliError::Schema("residual degree".into()))? as u32, digits: r["digits"].as_u64().ok_or_else(|| CliError::Schema("residual digits".into()))? as u32 }))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok((ColemanFamily { omega, effective, shrink, center, form, eigenvalue, residuals }, bytes_hash(&bytes)))
}

fn family_eval(path: &Path, point: &str, model_arg: Option<&str>, character: Option<&str>, beta: u32) -> Result<Value, CliError> {
    let (family, hash) = read_family(path)?;
    let w0 = parse_ints(point)?;
    let s = specialize_family(&family, &w0)?;
    let mut report = json!({
        "family_hash": hash,
        "point": w0,
        "weight": s.weight,
        "classical": s.classical,
        "crit": s.crit_set.map(|c| json!([c.min, c.max])),
        "eigenvalue": scalar_json(&s.eigenvalue.value),
        "precision": s.precision,
    });
    if let Some(character) = character {
        let model_arg = model_arg.ok_or_else(|| CliError::Precondition("evaluating at a character needs --model".into()))?;
        let (model, model_hash) = read_model(model_arg)?;
        let chi: AnticyclotomicCharacter = read_json(character)?;
        let xi = family_lp(&model, &family, beta.max(chi.beta).max(1), s.form.values[0].degree().saturating_sub(family.ring().precision()))?;
        let special = xi.specialize(&disc_point(&family, &w0)?)?;
        let plain = ring_make(special.ring().p(), special.ring().precision(), special.ring().cyclotomic_order(), 0, 0)?;
        let special = special.map_moments(|m| m.reduce_to(&plain)).with_scaling(special.exponent(), special.precision());
        let value = integrate_character(&special, &chi)?;
        let accessible = s.crit_set.is_some_and(|c| c.contains(chi.j));
        report["model_hash"] = json!(model_hash);
        report["character"] = json!(chi);
        report["value"] = character_json(&value);
        report["accessible"] = json!(accessible);
        if !accessible {
            report["tag"] = json!("no interpolation semantics");
        }
    }
    Ok(report)
}

fn gen_model(name: &str, out: &Path) -> Result<Value, CliError> {
    let spec = named_spec(name).ok_or_else(|| CliError::Precondition(format!("no model named {name}")))?;
    let (model, attempt) = synthetic_model(&spec)?;
    let text = model.to_json_pretty();
    write_file(out, text.as_bytes())?;
    Ok(json!({ "name": name, "attempt": attempt, "model_hash": model.content_hash(), "out": out.display().to_string() }))
}

fn verify_all(profile: &str) -> Result<Value, CliError> {
    let profile = Profile::parse(profile).ok_or_else(|| CliError::Precondition(format!("unknown profile {profile}")))?;
    let reports = run_profile(profile);
    let passed = reports.iter().all(|r| r.passed);
    let report = json!({ "status": if passed { "pass" } else { "fail" }, "criteria": reports });
    if passed {
        Ok(report)
    } else {
        Err(CliError::Verification(report))
    }
}
