use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use ffdp::algebra::{factor, mult_order, parse_poly};
use ffdp::carlitz::{
    carlitz_cyclotomic, carlitz_poly, predict_splitting, specialized_cyclotomic, CarlitzOptions, CarlitzRing,
    GaloisAction,
};
use ffdp::noise::{
    find_normal_basis, is_normal_element, normal_basis_probability, NoiseKind, NoiseSpec, NormalBasis, Sample,
    DEFAULT_MAX_TRIES,
};
use ffdp::reduction::*;
use ffdp::residue::RingElem;
use ffdp::rng::{derive_stream, stream_rng};
use ffdp::{FieldCtx, Poly, Var};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{CliError, Command, ExperimentConfig};

const SECRET_STREAM: u64 = 0x5345;
const ORACLE_STREAM: u64 = 0x4f52;
const DIST_STREAM: u64 = 0x4453;
const BASIS_STREAM: u64 = 0x4e42;
const DEFAULT_SAMPLES_PER_QUERY: usize = 8;
const CALIBRATION_TRIALS: usize = 200;

/// Runs one parsed command; `Ok` carries the exit code.
pub fn execute(command: &Command, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Carlitz { common, poly: _, cyclotomic, ring, allow_higher_degree } => {
            let cfg = common.resolve()?;
            let text = if *ring {
                carlitz_ring_text(&cfg, *allow_higher_degree)?
            } else {
                let field = field(&cfg)?;
                let m = tpoly(&field, required(&cfg.m, "M")?, "M")?;
                let shown = if *cyclotomic {
                    carlitz_cyclotomic(&m).map(|c| c.to_string())
                } else {
                    carlitz_poly(&m).map(|c| c.to_string())
                };
                shown.map_err(failure)?
            };
            emit(&cfg, stdout, &(text + "\n"))?;
            Ok(0)
        }
        Command::Facts { common, qs, max_degree } => {
            let cfg = common.resolve()?;
            let (text, mismatches) = facts(&cfg, qs, *max_degree)?;
            emit(&cfg, stdout, &text)?;
            Ok(if mismatches == 0 { 0 } else { 2 })
        }
        Command::Reduce { common } => {
            let cfg = common.resolve()?;
            let (text, recovered) = reduce(&cfg)?;
            emit(&cfg, stdout, &text)?;
            Ok(if recovered { 0 } else { 2 })
        }
        Command::NormalBasis { common } => {
            let cfg = common.resolve()?;
            let text = normal_basis(&cfg)?;
            emit(&cfg, stdout, &text)?;
            Ok(0)
        }
        Command::Sample { common } => {
            let cfg = common.resolve()?;
            let text = sample(&cfg)?;
            emit(&cfg, stdout, &text)?;
            Ok(0)
        }
        Command::Advantage { common } => {
            let cfg = common.resolve()?;
            let text = advantage(&cfg)?;
            emit(&cfg, stdout, &text)?;
            Ok(0)
        }
    }
}

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn emit(cfg: &ExperimentConfig, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn pretty(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn required<'a>(value: &'a Option<String>, name: &str) -> Result<&'a str, CliError> {
    value.as_deref().ok_or_else(|| CliError::Usage(format!("--{name} is required")))
}

fn field(cfg: &ExperimentConfig) -> Result<Arc<FieldCtx>, CliError> {
    let f = match (cfg.q, cfg.p) {
        (Some(q), None) => FieldCtx::with_order(q),
        (None, Some(p)) => FieldCtx::new(p, cfg.e.unwrap_or(1), None),
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --q or --p/--e".into())),
        (None, None) => return Err(CliError::Usage("--q (or --p and --e) is required".into())),
    };
    f.map(Arc::new).map_err(|e| CliError::Usage(e.to_string()))
}

fn tpoly(field: &Arc<FieldCtx>, text: &str, name: &str) -> Result<Poly, CliError> {
    parse_poly(field, text, Var::T).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

fn build_ring(cfg: &ExperimentConfig, allow_higher_degree: bool) -> Result<CarlitzRing, CliError> {
    let field = field(cfg)?;
    let m = tpoly(&field, required(&cfg.m, "M")?, "M")?;
    let q_mod = tpoly(&field, required(&cfg.q_mod, "Q")?, "Q")?;
    let opts = CarlitzOptions { allow_higher_degree_modulus: allow_higher_degree, ..Default::default() };
    CarlitzRing::with_options(&m, &q_mod, opts).map_err(failure)
}

fn carlitz_ring_text(cfg: &ExperimentConfig, allow_higher_degree: bool) -> Result<String, CliError> {
    let ring = build_ring(cfg, allow_higher_degree)?;
    let mut value = serde_json::to_value(ring.descriptor()).expect("descriptor serializes");
    value["components"] = serde_json::to_value(ring.ring().descriptor().components).expect("descriptor serializes");
    Ok(pretty(&value).trim_end().to_string())
}

#[derive(Serialize)]
struct FactRow {
    q: u64,
    #[serde(rename = "M")]
    m: String,
    #[serde(rename = "Q")]
    q_mod: String,
    e: u64,
    f: u64,
    r: u64,
    observed_degrees: Vec<usize>,
    squarefree: bool,
    pass: bool,
}

fn monic_polys(field: &Arc<FieldCtx>, degree: usize) -> Vec<Poly> {
    let q = field.order() as u64;
    (0..q.pow(degree as u32))
        .map(|mut idx| {
            let mut coeffs = Vec::with_capacity(degree + 1);
            for _ in 0..degree {
                coeffs.push(field.elem((idx % q) as u32));
                idx /= q;
            }
            coeffs.push(field.one());
            Poly::new(field.clone(), coeffs, Var::T)
        })
        .collect()
}

fn fact_row(m: &Poly, q_mod: &Poly) -> Result<Option<FactRow>, CliError> {
    let pred = predict_splitting(m, q_mod).map_err(failure)?;
    if pred.ramified {
        return Ok(None);
    }
    let field = m.field();
    let c = field.neg(q_mod.coeff(0));
    let phi = specialized_cyclotomic(m, field, c).map_err(failure)?;
    let fac = factor(&phi).map_err(failure)?;
    let degrees = fac.degrees();
    let squarefree = fac.is_squarefree();
    let pass = squarefree && degrees.len() as u64 == pred.r && degrees.iter().all(|&d| d as u64 == pred.f);
    Ok(Some(FactRow {
        q: field.order() as u64,
        m: m.to_string(),
        q_mod: q_mod.to_string(),
        e: pred.e,
        f: pred.f,
        r: pred.r,
        observed_degrees: degrees,
        squarefree,
        pass,
    }))
}

/// Linear Q only: T specializes into F_q itself.
fn facts(cfg: &ExperimentConfig, qs: &[u64], max_degree: usize) -> Result<(String, usize), CliError> {
    let mut rows = Vec::new();
    if cfg.m.is_some() {
        let field = field(cfg)?;
        let m = tpoly(&field, required(&cfg.m, "M")?, "M")?;
        let qs: Vec<Poly> = match &cfg.q_mod {
            Some(text) => vec![tpoly(&field, text, "Q")?],
            None => monic_polys(&field, 1),
        };
        for q_mod in &qs {
            if q_mod.degree() != Some(1) {
                return Err(CliError::Usage("facts supports linear Q only".into()));
            }
            rows.extend(fact_row(&m, q_mod)?);
        }
    } else {
        for &q in qs {
            let field = Arc::new(FieldCtx::with_order(q).map_err(|e| CliError::Usage(e.to_string()))?);
            let linear = monic_polys(&field, 1);
            for degree in 1..=max_degree {
                for m in monic_polys(&field, degree) {
                    for q_mod in &linear {
                        rows.extend(fact_row(&m, q_mod)?);
                    }
                }
            }
        }
    }
    let mismatches = rows.iter().filter(|r| !r.pass).count();
    let doc = json!({ "rows": rows, "total": rows.len(), "mismatches": mismatches });
    Ok((pretty(&doc), mismatches))
}

#[derive(Deserialize)]
struct BasisArtifact {
    q: u32,
    #[serde(rename = "M")]
    m: String,
    #[serde(rename = "Q")]
    q_mod: String,
    generator: Vec<u32>,
}

fn load_basis(ring: &CarlitzRing, path: &Path) -> Result<NormalBasis, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read basis {}: {e}", path.display())))?;
    let art: BasisArtifact =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("basis {}: {e}", path.display())))?;
    let r = ring.ring();
    let same_ring = art.q == r.field().order()
        && art.m == ring.conductor().to_string()
        && art.q_mod == ring.modulus().to_string()
        && art.generator.len() == r.degree();
    if !same_ring || art.generator.iter().any(|&v| v >= r.field().order()) {
        return Err(CliError::Usage(format!("basis {} belongs to a different ring", path.display())));
    }
    let x = r.from_coeffs(art.generator.iter().map(|&v| r.field().elem(v)).collect());
    NormalBasis::from_generator(ring, &x).map_err(failure)
}

fn noise(cfg: &ExperimentConfig, ring: &CarlitzRing) -> Result<NoiseSpec, CliError> {
    let text = cfg.noise.as_deref().unwrap_or("bernoulli:0.1");
    let kind = NoiseKind::from_str(text).map_err(|e| CliError::Usage(format!("--noise: {e}")))?;
    let basis = match kind {
        NoiseKind::Normal(_) => {
            let path = cfg.basis.as_ref().ok_or_else(|| {
                CliError::Usage("normal noise needs --basis with a generator file from `normal-basis`".into())
            })?;
            Some(Arc::new(load_basis(ring, path)?))
        }
        _ => None,
    };
    NoiseSpec::from_kind(kind, basis).map_err(|e| CliError::Usage(format!("--noise: {e}")))
}

fn plant(cfg: &ExperimentConfig, ring: &CarlitzRing, d: usize) -> Vec<RingElem> {
    let mut rng = stream_rng(cfg.seed.unwrap_or(0), SECRET_STREAM);
    (0..d).map(|_| ring.ring().random(&mut rng)).collect()
}

fn rank(cfg: &ExperimentConfig) -> Result<usize, CliError> {
    match cfg.d.unwrap_or(1) {
        0 => Err(CliError::Usage("--d must be at least 1".into())),
        d => Ok(d),
    }
}

fn distinguisher<'a>(
    cfg: &ExperimentConfig,
    ring: &'a CarlitzRing,
    noise: &NoiseSpec,
    secrets: &[RingElem],
) -> Result<(Box<dyn Distinguisher + 'a>, String), CliError> {
    let spq = cfg.samples_per_query.unwrap_or(DEFAULT_SAMPLES_PER_QUERY);
    let seed = derive_stream(&[cfg.seed.unwrap_or(0), DIST_STREAM]);
    let kind = cfg.distinguisher.as_deref().unwrap_or("ml");
    let dist: Box<dyn Distinguisher + 'a> = match kind {
        "ml" => Box::new(
            MlDistinguisher::new(
                ring.ring(),
                noise.clone(),
                secrets.len(),
                spq,
                DEFAULT_ML_BOUND,
                CALIBRATION_TRIALS,
                seed,
            )
            .map_err(failure)?,
        ),
        "planted" => Box::new(PlantedDistinguisher::new(ring, noise, secrets.to_vec(), 0, spq, seed).map_err(failure)?),
        other => return Err(CliError::Usage(format!("--distinguisher: unknown kind {other:?} (ml, planted)"))),
    };
    Ok((dist, kind.to_string()))
}

fn oracle_seed(cfg: &ExperimentConfig) -> u64 {
    derive_stream(&[cfg.seed.unwrap_or(0), ORACLE_STREAM])
}

fn reduce(cfg: &ExperimentConfig) -> Result<(String, bool), CliError> {
    let ring = build_ring(cfg, false)?;
    let noise = noise(cfg, &ring)?;
    let d = rank(cfg)?;
    let secrets = plant(cfg, &ring, d);
    let oracle = SampleOracle::new(ring.ring(), secrets.clone(), noise.clone(), oracle_seed(cfg))
        .map_err(|e| CliError::Usage(format!("--noise: {e}")))?;
    let (dist, kind) = distinguisher(cfg, &ring, &noise, &secrets)?;
    let defaults = ReductionConfig::default();
    let config = ReductionConfig {
        delta: cfg.delta.unwrap_or(defaults.delta),
        mu: cfg.mu.unwrap_or(defaults.mu),
        repetitions: cfg.repetitions,
        max_samples: cfg.budget.unwrap_or(defaults.max_samples),
        workers: cfg.workers.unwrap_or(defaults.workers),
        seed: cfg.seed.unwrap_or(0),
        ..defaults
    };
    let timing = cfg.timing.unwrap_or(false);
    let (report, recovered) = if d == 1 {
        let mut report = full_reduction(&oracle, &ring, dist.as_ref(), &config).map_err(failure)?;
        if !timing {
            report.wall_time_secs = None;
        }
        let ok = report.recovered_secret == secrets[0];
        (serde_json::to_value(report).expect("report serializes"), ok)
    } else {
        let mut report = module_reduction(&oracle, &ring, dist.as_ref(), &config).map_err(failure)?;
        if !timing {
            report.wall_time_secs = None;
        }
        let ok = report.secrets == secrets;
        (serde_json::to_value(report).expect("report serializes"), ok)
    };
    let doc = json!({
        "config": cfg,
        "ring": ring.descriptor(),
        "distinguisher": { "kind": kind, "samples_per_query": dist.samples_per_query(), "advantage": dist.advantage() },
        "planted": secrets,
        "recovered": recovered,
        "report": report,
    });
    Ok((pretty(&doc), recovered))
}

fn is_cyclic(ring: &CarlitzRing) -> Result<bool, CliError> {
    let order = ring.group_order() as u64;
    let m = ring.conductor();
    if m.is_constant() {
        return Ok(true);
    }
    for u in ring.units() {
        if mult_order(u, m).map_err(failure)? == order {
            return Ok(true);
        }
    }
    Ok(false)
}

fn normal_basis(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let ring = build_ring(cfg, false)?;
    let r = ring.ring();
    let seed = cfg.seed.unwrap_or(0);
    let mut rng = stream_rng(seed, BASIS_STREAM);
    let basis = find_normal_basis(&ring, &mut rng, DEFAULT_MAX_TRIES).map_err(failure)?;
    let trials = cfg.trials.unwrap_or(10_000);
    let mut rng = stream_rng(seed, BASIS_STREAM + 1);
    let hits = (0..trials).filter(|_| is_normal_element(&ring, &r.random(&mut rng))).count();
    let cyclic = is_cyclic(&ring)?;
    let predicted =
        if cyclic { normal_basis_probability(ring.group_order() as u64, r.field().order() as u64).ok() } else { None };
    let invertible = ffdp::algebra::linalg::rank(r.field(), basis.matrix()) == r.degree();
    let doc = json!({
        "q": r.field().order(),
        "M": ring.conductor().to_string(),
        "Q": ring.modulus().to_string(),
        "group_order": ring.group_order(),
        "cyclic": cyclic,
        "generator": basis.generator(),
        "generator_poly": r.to_poly(basis.generator()).to_string(),
        "tries": basis.tries(),
        "matrix_invertible": invertible,
        "predicted_fraction": predicted.as_ref().map(|p| p.to_string()),
        "predicted_probability": predicted.as_ref().and_then(|p| p.to_f64()),
        "empirical_probability": if trials == 0 { None } else { Some(hits as f64 / trials as f64) },
        "trials": trials,
    });
    Ok(pretty(&doc))
}

fn sample(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let ring = build_ring(cfg, false)?;
    let noise = noise(cfg, &ring)?;
    let d = rank(cfg)?;
    let secrets = plant(cfg, &ring, d);
    let mut oracle = SampleOracle::new(ring.ring(), secrets, noise, oracle_seed(cfg))
        .map_err(|e| CliError::Usage(format!("--noise: {e}")))?;
    let mut out = String::new();
    for _ in 0..cfg.count.unwrap_or(10) {
        let s = oracle.draw();
        let line = if d == 1 {
            serde_json::to_string(&Sample { a: s.a[0].clone(), b: s.b })
        } else {
            serde_json::to_string(&s)
        };
        out.push_str(&line.expect("samples serialize"));
        out.push('\n');
    }
    Ok(out)
}

fn advantage(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let ring = build_ring(cfg, false)?;
    let r = ring.ring();
    let noise = noise(cfg, &ring)?;
    let d = rank(cfg)?;
    let secrets = plant(cfg, &ring, d);
    let oracle = SampleOracle::new(r, secrets.clone(), noise.clone(), oracle_seed(cfg))
        .map_err(|e| CliError::Usage(format!("--noise: {e}")))?;
    let (dist, kind) = distinguisher(cfg, &ring, &noise, &secrets)?;
    let hybrid = cfg.hybrid.unwrap_or(1);
    if hybrid > r.num_components() {
        return Err(CliError::Usage(format!("--hybrid must be at most {}", r.num_components())));
    }
    let seed = cfg.seed.unwrap_or(0);
    let ctx = StreamContext::plain(r, d, ring.identity());
    let mut structured = oracle.fork(1);
    let mut alternative = HybridSource::new(oracle.fork(2), r, hybrid, seed);
    let mut rng = stream_rng(seed, DIST_STREAM + 1);
    let trials = cfg.trials.unwrap_or(1000);
    let est =
        estimate_advantage(dist.as_ref(), &ctx, &mut structured, &mut alternative, trials, &mut rng).map_err(|e| {
            match e {
                ReductionError::InvalidParameters(m) => CliError::Usage(m),
                other => failure(other),
            }
        })?;
    let doc = json!({
        "distinguisher": { "kind": kind, "samples_per_query": dist.samples_per_query(), "declared_advantage": dist.advantage() },
        "hybrid": hybrid,
        "estimate": est,
    });
    Ok(pretty(&doc))
}
