use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::carlitz::GaloisAction;
use crate::noise::{ModuleSample, NoiseSpec};
use crate::residue::{ComponentElem, ResidueRing, RingElem};
use crate::rng::{derive_stream, stream_rng, StreamRng};

use super::distinguisher::{Distinguisher, StreamContext};
use super::oracle::{hybrid_mask, randomize_secret, SampleOracle, SampleSource};
use super::{repetitions, ReductionError};

const MASK_STREAM: u64 = 0x6d61_736b;
const VALIDATION_STREAM: u64 = 0x7661_6c69;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ReductionConfig {
    /// Advantage lower bound used to size the vote.
    pub delta: f64,
    /// Per-vote failure probability.
    pub mu: f64,
    /// Overrides the repetition count derived from (delta, mu); forced odd.
    pub repetitions: Option<usize>,
    pub max_samples: u64,
    pub workers: usize,
    pub seed: u64,
    pub validation_samples: usize,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig {
            delta: 0.25,
            mu: 0.01,
            repetitions: None,
            max_samples: 50_000_000,
            workers: 1,
            seed: 0,
            validation_samples: 32,
        }
    }
}

impl ReductionConfig {
    pub fn m(&self) -> Result<usize, ReductionError> {
        match self.repetitions {
            Some(0) => Err(ReductionError::InvalidParameters("repetitions must be positive".into())),
            Some(m) => Ok(m | 1),
            None => repetitions(self.delta, self.mu),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentSolution {
    pub residue: ComponentElem,
    /// Votes for H_i per guess, guesses in base-q index order.
    pub votes: Vec<u32>,
    pub repetitions: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PrimeRecovery {
    pub component: usize,
    pub galois_index: usize,
    pub galois: String,
    /// Residue of the recovered secret modulo this component.
    pub residue: Vec<u32>,
    /// Residue found at the target component for the transported secret.
    pub solved_residue: Vec<u32>,
    pub votes: Vec<u32>,
    pub repetitions: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CandidateSummary {
    pub i0: usize,
    pub outcome: String,
    pub samples_used: u64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ValidationSummary {
    pub mean_weight: f64,
    pub threshold: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ReductionReport {
    pub recovered_secret: RingElem,
    pub per_prime: Vec<PrimeRecovery>,
    pub i0_found: usize,
    pub repetitions: usize,
    pub candidates: Vec<CandidateSummary>,
    pub samples_used: u64,
    pub validation: Option<ValidationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

impl ReductionReport {
    /// crt_combine(per-prime residues) equals the recovered secret.
    pub fn crt_consistent(&self, ring: &ResidueRing) -> bool {
        let f = ring.field();
        let parts: Vec<ComponentElem> =
            self.per_prime.iter().map(|p| p.residue.iter().map(|&v| f.elem(v)).collect()).collect();
        ring.crt_combine(&parts).is_ok_and(|x| x == self.recovered_secret)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ModuleReductionReport {
    pub secrets: Vec<RingElem>,
    pub reports: Vec<ReductionReport>,
    pub samples_used: u64,
    pub validation: Option<ValidationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

/// Guess search on component `component` of secret `target`: for every guess g,
/// feeds the distinguisher m batches of (a + v, b + h + v·g) and keeps the
/// guesses whose majority vote says H_component.
#[allow(clippy::too_many_arguments)]
pub fn guess_and_search(
    source: &mut dyn FnMut() -> Result<ModuleSample, ReductionError>,
    ring: &ResidueRing,
    component: usize,
    target: usize,
    dist: &dyn Distinguisher,
    ctx: &StreamContext,
    m: usize,
    rng: &mut StreamRng,
) -> Result<ComponentSolution, ReductionError> {
    let guesses = ring.component_elements(component);
    let k = dist.samples_per_query();
    let mut votes = Vec::with_capacity(guesses.len());
    let mut accepted = Vec::new();
    for (gi, guess) in guesses.iter().enumerate() {
        let mut yes = 0u32;
        for _ in 0..m {
            let mut batch = Vec::with_capacity(k);
            for _ in 0..k {
                let mut s = source()?;
                let v_part = ring.component_random(component, rng);
                let v = ring.embed_component(&v_part, component)?;
                let vg = ring.embed_component(&ring.component_mul(&v_part, guess, component), component)?;
                let h = hybrid_mask(ring, component, rng);
                s.a[target] = ring.add(&s.a[target], &v);
                s.b = ring.add(&ring.add(&s.b, &h), &vg);
                batch.push(s);
            }
            if dist.distinguish(ctx, &batch, rng) {
                yes += 1;
            }
        }
        if 2 * yes as usize > m {
            accepted.push(gi);
        }
        votes.push(yes);
    }
    match accepted.as_slice() {
        [] => Err(ReductionError::NoGuessAccepted { component }),
        [gi] => Ok(ComponentSolution { residue: guesses[*gi].clone(), votes, repetitions: m }),
        many => Err(ReductionError::MultipleGuessesAccepted { component, accepted: many.len() }),
    }
}

/// Solves every component j by moving it onto `target` with the
/// smallest σ_g sending 𝔓_j to 𝔓_target, then pulls the residue back through
/// σ_g^{-1} and recombines by CRT.
pub fn galois_recover(
    action: &dyn GaloisAction,
    target: usize,
    solve: &mut dyn FnMut(usize) -> Result<ComponentSolution, ReductionError>,
) -> Result<(RingElem, Vec<PrimeRecovery>), ReductionError> {
    let ring = action.ring();
    let mut parts = Vec::with_capacity(ring.num_components());
    let mut records = Vec::with_capacity(ring.num_components());
    for j in 0..ring.num_components() {
        let g = action.transporter(j, target).expect("the Galois group acts transitively");
        let sol = solve(g)?;
        let lifted = ring.embed_component(&sol.residue, target)?;
        let pulled = action.apply(action.inverse(g), &lifted);
        let part = ring.component(&pulled, j);
        records.push(PrimeRecovery {
            component: j,
            galois_index: g,
            galois: action.label(g),
            residue: part.iter().map(|c| c.value()).collect(),
            solved_residue: sol.residue.iter().map(|c| c.value()).collect(),
            votes: sol.votes,
            repetitions: sol.repetitions,
        });
        parts.push(part);
    }
    Ok((ring.crt_combine(&parts)?, records))
}

/// Masked, Galois-transported view of an oracle with a sample budget.
struct Feed<'a> {
    oracle: SampleOracle<'a>,
    used: u64,
    limit: u64,
}

impl Feed<'_> {
    fn draw(&mut self, action: &dyn GaloisAction, mask: &[RingElem], g: usize) -> Result<ModuleSample, ReductionError> {
        if self.used >= self.limit {
            return Err(ReductionError::BudgetExhausted(self.limit));
        }
        self.used += 1;
        let ring = action.ring();
        let s = randomize_secret(ring, &self.oracle.draw(), mask);
        if g == action.identity() {
            return Ok(s);
        }
        Ok(ModuleSample { a: s.a.iter().map(|a| action.apply(g, a)).collect(), b: action.apply(g, &s.b) })
    }
}

struct Attempt {
    result: Result<(RingElem, Vec<PrimeRecovery>), ReductionError>,
    used: u64,
}

#[allow(clippy::too_many_arguments)]
fn attempt(
    oracle: &SampleOracle,
    action: &dyn GaloisAction,
    dist: &dyn Distinguisher,
    mask: &[RingElem],
    target: usize,
    i0: usize,
    m: usize,
    seed: u64,
    limit: u64,
) -> Attempt {
    let mut feed = Feed { oracle: oracle.fork(derive_stream(&[target as u64, i0 as u64, 1])), used: 0, limit };
    let mut rng = stream_rng(seed, derive_stream(&[target as u64, i0 as u64, 2]));
    let ring = action.ring();
    let mut solve = |g: usize| -> Result<ComponentSolution, ReductionError> {
        let ctx = StreamContext { mask: mask.to_vec(), galois: g };
        let mut reps = m;
        let mut retried = false;
        loop {
            let mut source = || feed.draw(action, mask, g);
            match guess_and_search(&mut source, ring, i0, target, dist, &ctx, reps, &mut rng) {
                Err(ReductionError::MultipleGuessesAccepted { .. }) if !retried => {
                    retried = true;
                    reps = (2 * reps) | 1;
                }
                other => return other,
            }
        }
    };
    let result = galois_recover(action, i0, &mut solve);
    Attempt { result, used: feed.used }
}

fn validate(
    oracle: &SampleOracle,
    secrets: &[RingElem],
    noise: &NoiseSpec,
    count: usize,
    stream: u64,
) -> ValidationSummary {
    let ring = oracle.ring();
    let n = ring.degree();
    let q = ring.field().order() as f64;
    let threshold = (noise.expected_weight(n) + n as f64 * (q - 1.0) / q) / 2.0;
    let mut feed = oracle.fork(stream);
    let total: usize = (0..count)
        .map(|_| {
            let s = feed.draw();
            let r = s.a.iter().zip(secrets).fold(s.b.clone(), |acc, (a, x)| ring.sub(&acc, &ring.mul(a, x)));
            noise.natural_weight(ring, &r)
        })
        .sum();
    let mean_weight = total as f64 / count.max(1) as f64;
    ValidationSummary { mean_weight, threshold, samples: count, passed: count > 0 && mean_weight < threshold }
}

fn budget_error(limit: u64) -> ReductionError {
    ReductionError::SecretNotFound(format!("sample budget of {limit} exhausted"))
}

/// Recovers every secret of an MFF-DP oracle, one at a time. While secret k is
/// targeted the guess shift v is added to a_k only.
pub fn module_reduction(
    oracle: &SampleOracle,
    action: &dyn GaloisAction,
    dist: &dyn Distinguisher,
    config: &ReductionConfig,
) -> Result<ModuleReductionReport, ReductionError> {
    let start = Instant::now();
    let ring = action.ring();
    if oracle.ring().modulus() != ring.modulus() {
        return Err(ReductionError::InvalidParameters("oracle and action live on different rings".into()));
    }
    if !ring.is_squarefree() {
        return Err(ReductionError::InvalidParameters("ring is ramified".into()));
    }
    let d = oracle.rank();
    let r = ring.num_components();
    let m = config.m()?;
    let limit = config.max_samples;
    let mut mask_rng = stream_rng(config.seed, MASK_STREAM);
    let mask: Vec<RingElem> = (0..d).map(|_| ring.random(&mut mask_rng)).collect();
    let pool = if config.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.workers)
                .build()
                .map_err(|e| ReductionError::InvalidParameters(e.to_string()))?,
        )
    } else {
        None
    };

    let mut used_total = 0u64;
    let mut found: Vec<RingElem> = Vec::with_capacity(d);
    let mut reports = Vec::with_capacity(d);
    for target in 0..d {
        let run =
            |i0: usize, remaining: u64| attempt(oracle, action, dist, &mask, target, i0, m, config.seed, remaining);
        let mut precomputed: Option<Vec<Attempt>> =
            pool.as_ref().map(|p| p.install(|| (0..r).into_par_iter().map(|i0| run(i0, limit)).collect()));
        let mut candidates = Vec::new();
        let mut accepted = None;
        for i0 in 0..r {
            let outcome = match precomputed.as_mut() {
                Some(all) => std::mem::replace(&mut all[i0], Attempt { result: Err(budget_error(0)), used: 0 }),
                None => run(i0, limit.saturating_sub(used_total)),
            };
            used_total += outcome.used;
            let starved = matches!(outcome.result, Err(ReductionError::BudgetExhausted(_))) && pool.is_none();
            if used_total > limit || starved {
                return Err(budget_error(limit));
            }
            let mut summary = CandidateSummary { i0, outcome: String::new(), samples_used: outcome.used };
            match outcome.result {
                Ok((masked, primes)) => {
                    let mut validation = None;
                    if d == 1 {
                        let count = config.validation_samples;
                        if used_total + count as u64 > limit {
                            return Err(budget_error(limit));
                        }
                        used_total += count as u64;
                        let v = validate(
                            oracle,
                            &[ring.sub(&masked, &mask[0])],
                            oracle.noise(),
                            count,
                            derive_stream(&[VALIDATION_STREAM, i0 as u64]),
                        );
                        summary.outcome = if v.passed { "recovered".into() } else { "rejected by validation".into() };
                        let passed = v.passed;
                        validation = Some(v);
                        if !passed {
                            candidates.push(summary);
                            continue;
                        }
                    } else {
                        summary.outcome = "recovered".into();
                    }
                    candidates.push(summary);
                    accepted = Some((i0, masked, primes, validation));
                    break;
                }
                Err(e) => {
                    summary.outcome = e.to_string();
                    candidates.push(summary);
                }
            }
        }
        let Some((i0, masked, primes, validation)) = accepted else {
            return Err(ReductionError::SecretNotFound(format!(
                "no candidate index recovered secret {target}: {}",
                candidates.iter().map(|c| format!("i0={} {}", c.i0, c.outcome)).collect::<Vec<_>>().join("; ")
            )));
        };
        let secret = ring.sub(&masked, &mask[target]);
        let per_prime = primes
            .into_iter()
            .map(|mut p| {
                p.residue = ring.component(&secret, p.component).iter().map(|c| c.value()).collect();
                p
            })
            .collect();
        found.push(secret.clone());
        reports.push(ReductionReport {
            recovered_secret: secret,
            per_prime,
            i0_found: i0,
            repetitions: m,
            candidates,
            samples_used: 0,
            validation,
            wall_time_secs: None,
        });
    }

    let mut validation = None;
    if d > 1 {
        let count = config.validation_samples;
        if used_total + count as u64 > limit {
            return Err(budget_error(limit));
        }
        used_total += count as u64;
        let v = validate(oracle, &found, oracle.noise(), count, derive_stream(&[VALIDATION_STREAM, u64::MAX]));
        if !v.passed {
            return Err(ReductionError::SecretNotFound(format!(
                "recovered secrets fail validation (mean weight {:.3} ≥ {:.3})",
                v.mean_weight, v.threshold
            )));
        }
        validation = Some(v);
    }
    Ok(ModuleReductionReport {
        secrets: found,
        reports,
        samples_used: used_total,
        validation,
        wall_time_secs: Some(start.elapsed().as_secs_f64()),
    })
}

/// End-to-end FF-DP driver: masks the secret, tries every boundary
/// index i0, and returns the first candidate that survives validation.
pub fn full_reduction(
    oracle: &SampleOracle,
    action: &dyn GaloisAction,
    dist: &dyn Distinguisher,
    config: &ReductionConfig,
) -> Result<ReductionReport, ReductionError> {
    if oracle.rank() != 1 {
        return Err(ReductionError::InvalidParameters("full_reduction expects a rank-1 oracle".into()));
    }
    let module = module_reduction(oracle, action, dist, config)?;
    let mut report = module.reports.into_iter().next().expect("one secret");
    report.samples_used = module.samples_used;
    report.wall_time_secs = module.wall_time_secs;
    Ok(report)
}
