use serde::Serialize;
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::algebra::FieldElem;
use crate::carlitz::GaloisAction;
use crate::noise::{ModuleSample, NoiseSpec};
use crate::residue::{ResidueRing, RingElem};
use crate::rng::{derive_stream, stream_rng, StreamRng};
use crate::stats::z_score;

use super::oracle::{hybridize, SampleOracle, SampleSource};
use super::ReductionError;

/// Largest number of candidate secret vectors the ML distinguisher enumerates.
pub const DEFAULT_ML_BOUND: u128 = 6561;

/// Public description of how the reduction derived a stream from the oracle:
/// the secret was shifted by `mask` and then moved by σ_`galois`.
#[derive(Clone, Debug)]
pub struct StreamContext {
    pub mask: Vec<RingElem>,
    pub galois: usize,
}

impl StreamContext {
    pub fn plain(ring: &ResidueRing, rank: usize, identity: usize) -> Self {
        StreamContext { mask: vec![ring.zero(); rank], galois: identity }
    }
}

/// Decides between H_i (vote `true`) and H_{i+1} (vote `false`).
pub trait Distinguisher: Sync {
    fn samples_per_query(&self) -> usize;

    /// Declared advantage ½(P(1 | H_i) − P(1 | H_{i+1})).
    fn advantage(&self) -> f64;

    fn distinguish(&self, ctx: &StreamContext, samples: &[ModuleSample], rng: &mut StreamRng) -> bool;
}

/// Generalized likelihood ratio: max over all secret vectors of the noise
/// log-likelihood of the residuals, against the uniform law.
pub struct MlDistinguisher<'a> {
    ring: &'a ResidueRing,
    noise: NoiseSpec,
    rank: usize,
    samples: usize,
    log_pmf: Vec<f64>,
    threshold: f64,
    advantage: f64,
}

impl<'a> MlDistinguisher<'a> {
    /// Builds and calibrates on H_0 against H_1 with `calibration` queries each.
    pub fn new(
        ring: &'a ResidueRing,
        noise: NoiseSpec,
        rank: usize,
        samples: usize,
        bound: u128,
        calibration: usize,
        seed: u64,
    ) -> Result<Self, ReductionError> {
        let size = ring.size().checked_pow(rank as u32).unwrap_or(u128::MAX);
        if size > bound {
            return Err(ReductionError::RingTooLarge { size, bound });
        }
        if samples == 0 || rank == 0 {
            return Err(ReductionError::InvalidParameters("ML distinguisher needs samples and rank".into()));
        }
        let log_pmf = noise.log_pmf_by_weight(ring.degree(), ring.field().order());
        let mut out = MlDistinguisher { ring, noise, rank, samples, log_pmf, threshold: 0.0, advantage: 0.0 };
        out.calibrate(calibration, seed)?;
        Ok(out)
    }

    fn calibrate(&mut self, trials: usize, seed: u64) -> Result<(), ReductionError> {
        let ring = self.ring;
        let mut rng = stream_rng(seed, derive_stream(&[0x4d4c, 0]));
        let mut structured = Vec::with_capacity(trials);
        let mut hybrid = Vec::with_capacity(trials);
        for t in 0..trials {
            let secrets: Vec<RingElem> = (0..self.rank).map(|_| ring.random(&mut rng)).collect();
            let mut oracle = SampleOracle::new(ring, secrets, self.noise.clone(), derive_stream(&[seed, t as u64]))?;
            let batch: Vec<ModuleSample> = (0..self.samples).map(|_| oracle.draw()).collect();
            structured.push(self.statistic(&batch));
            let batch: Vec<ModuleSample> =
                (0..self.samples).map(|_| hybridize(ring, &oracle.draw(), 1, &mut rng)).collect();
            hybrid.push(self.statistic(&batch));
        }
        let (threshold, gap) = best_threshold(&structured, &hybrid);
        self.threshold = threshold;
        self.advantage = gap / 2.0;
        Ok(())
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// max_s Σ_t log ψ(b_t − Σ_i a_{t,i} s_i) + t·n·ln q.
    pub fn statistic(&self, samples: &[ModuleSample]) -> f64 {
        let ring = self.ring;
        let f = ring.field();
        let n = ring.degree();
        let q = f.order();
        // natural coordinates of b_t and of a_{t,i}·X^j
        let x = ring.x();
        let prepared: Vec<(Vec<FieldElem>, Vec<Vec<FieldElem>>)> = samples
            .iter()
            .map(|s| {
                let b = self.noise.natural_coords(ring, &s.b);
                let mut cols = Vec::with_capacity(self.rank * n);
                for a in &s.a {
                    let mut cur = a.clone();
                    for _ in 0..n {
                        cols.push(self.noise.natural_coords(ring, &cur));
                        cur = ring.mul(&cur, &x);
                    }
                }
                (b, cols)
            })
            .collect();
        let width = self.rank * n;
        let mut digits = vec![0u32; width];
        let mut residual = vec![f.zero(); n];
        let mut best = f64::NEG_INFINITY;
        loop {
            let mut total = 0.0;
            for (b, cols) in &prepared {
                residual.copy_from_slice(b);
                for (&d, col) in digits.iter().zip(cols) {
                    if d == 0 {
                        continue;
                    }
                    let c = f.elem(d);
                    for (r, &v) in residual.iter_mut().zip(col) {
                        *r = f.sub(*r, f.mul(c, v));
                    }
                }
                let w = residual.iter().filter(|c| !c.is_zero()).count();
                total += self.log_pmf[w];
                if total <= best {
                    break;
                }
            }
            if total > best {
                best = total;
            }
            // next candidate in base-q order
            let mut k = 0;
            while k < width {
                digits[k] += 1;
                if digits[k] < q {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == width {
                break;
            }
        }
        best + (samples.len() * n) as f64 * (q as f64).ln()
    }
}

impl Distinguisher for MlDistinguisher<'_> {
    fn samples_per_query(&self) -> usize {
        self.samples
    }

    fn advantage(&self) -> f64 {
        self.advantage
    }

    fn distinguish(&self, _ctx: &StreamContext, samples: &[ModuleSample], _rng: &mut StreamRng) -> bool {
        self.statistic(samples) >= self.threshold
    }
}

/// Threshold maximizing P(stat ≥ τ | first) − P(stat ≥ τ | second), and that gap.
fn best_threshold(first: &[f64], second: &[f64]) -> (f64, f64) {
    let finite = |v: f64| if v.is_finite() { v } else { -1e300 };
    let mut values: Vec<f64> = first.iter().chain(second).map(|&v| finite(v)).collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    values.dedup();
    let frac = |xs: &[f64], t: f64| xs.iter().filter(|&&v| finite(v) >= t).count() as f64 / xs.len().max(1) as f64;
    let mut best = (f64::INFINITY, 0.0);
    for w in values.windows(2) {
        let t = if w[0] <= -1e299 { w[1] - 1.0 } else { (w[0] + w[1]) / 2.0 };
        let gap = frac(first, t) - frac(second, t);
        if gap > best.1 {
            best = (t, gap);
        }
    }
    best
}

/// Test oracle that knows the secrets: it looks at the residual b − Σ a_i s̃_i
/// at the boundary component, where s̃ are the secrets of the stream it is fed.
pub struct PlantedDistinguisher<'a> {
    action: &'a dyn GaloisAction,
    secrets: Vec<RingElem>,
    boundary: usize,
    samples: usize,
    zero_prob: f64,
    cutoff: usize,
    advantage: f64,
}

impl<'a> PlantedDistinguisher<'a> {
    pub fn new(
        action: &'a dyn GaloisAction,
        noise: &NoiseSpec,
        secrets: Vec<RingElem>,
        boundary: usize,
        samples: usize,
        seed: u64,
    ) -> Result<Self, ReductionError> {
        let ring = action.ring();
        if boundary >= ring.num_components() || samples == 0 {
            return Err(ReductionError::InvalidParameters(format!("boundary {boundary}, samples {samples}")));
        }
        let mut rng = stream_rng(seed, derive_stream(&[0x504c, boundary as u64]));
        let draws = 4000;
        let mut zeros = 0;
        for _ in 0..draws {
            let e = noise.sample(ring, &mut rng)?;
            if ring.component(&e, boundary).iter().all(|c| c.is_zero()) {
                zeros += 1;
            }
        }
        let zero_prob = zeros as f64 / draws as f64;
        let uniform = 1.0 / ring.component_size(boundary) as f64;
        let tail = |p: f64, c: usize| -> f64 {
            if c == 0 {
                return 1.0;
            }
            match Binomial::new(p.clamp(0.0, 1.0), samples as u64) {
                Ok(b) => 1.0 - b.cdf(c as u64 - 1),
                Err(_) => 0.0,
            }
        };
        let (cutoff, gap) = (1..=samples)
            .map(|c| (c, tail(zero_prob, c) - tail(uniform, c)))
            .fold((1, f64::NEG_INFINITY), |best, x| if x.1 > best.1 { x } else { best });
        Ok(PlantedDistinguisher { action, secrets, boundary, samples, zero_prob, cutoff, advantage: gap / 2.0 })
    }

    pub fn boundary(&self) -> usize {
        self.boundary
    }

    /// Estimated P(e ≡ 0 mod 𝔓_boundary) under the noise.
    pub fn zero_probability(&self) -> f64 {
        self.zero_prob
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
}

impl Distinguisher for PlantedDistinguisher<'_> {
    fn samples_per_query(&self) -> usize {
        self.samples
    }

    fn advantage(&self) -> f64 {
        self.advantage
    }

    fn distinguish(&self, ctx: &StreamContext, samples: &[ModuleSample], _rng: &mut StreamRng) -> bool {
        let ring = self.action.ring();
        let effective: Vec<RingElem> =
            self.secrets.iter().zip(&ctx.mask).map(|(s, m)| self.action.apply(ctx.galois, &ring.add(s, m))).collect();
        let zeros = samples
            .iter()
            .filter(|s| {
                let r = s.a.iter().zip(&effective).fold(s.b.clone(), |acc, (a, x)| ring.sub(&acc, &ring.mul(a, x)));
                ring.component(&r, self.boundary).iter().all(|c| c.is_zero())
            })
            .count();
        zeros >= self.cutoff
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct AdvantageEstimate {
    pub advantage: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_structured: f64,
    pub p_alternative: f64,
    pub trials: usize,
}

/// Plug-in estimate of ½(P(1 | structured) − P(1 | alternative)) with a 95%
/// normal-approximation interval.
pub fn estimate_advantage(
    dist: &dyn Distinguisher,
    ctx: &StreamContext,
    structured: &mut dyn SampleSource,
    alternative: &mut dyn SampleSource,
    trials: usize,
    rng: &mut StreamRng,
) -> Result<AdvantageEstimate, ReductionError> {
    if trials < 100 {
        return Err(ReductionError::InvalidParameters(format!("need at least 100 trials, got {trials}")));
    }
    let k = dist.samples_per_query();
    let run = |src: &mut dyn SampleSource, rng: &mut StreamRng| {
        (0..trials)
            .filter(|_| {
                let batch: Vec<ModuleSample> = (0..k).map(|_| src.draw()).collect();
                dist.distinguish(ctx, &batch, rng)
            })
            .count() as f64
            / trials as f64
    };
    let p1 = run(structured, rng);
    let p0 = run(alternative, rng);
    let n = trials as f64;
    let half = 0.5 * z_score(0.95) * (p1 * (1.0 - p1) / n + p0 * (1.0 - p0) / n).sqrt();
    let advantage = (p1 - p0) / 2.0;
    Ok(AdvantageEstimate {
        advantage,
        ci_low: advantage - half,
        ci_high: advantage + half,
        p_structured: p1,
        p_alternative: p0,
        trials,
    })
}
