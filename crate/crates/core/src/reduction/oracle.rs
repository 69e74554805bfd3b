use rand::Rng;

use crate::noise::{mffdp_sample, ModuleSample, NoiseError, NoiseKind, NoiseSpec};
use crate::residue::{ResidueRing, RingElem};
use crate::rng::{stream_rng, StreamRng};

pub trait SampleSource {
    fn draw(&mut self) -> ModuleSample;
}

/// Unbounded MFF-DP oracle for fixed secrets (d = 1 gives FF-DP).
#[derive(Clone, Debug)]
pub struct SampleOracle<'a> {
    ring: &'a ResidueRing,
    secrets: Vec<RingElem>,
    noise: NoiseSpec,
    seed: u64,
    rng: StreamRng,
}

impl<'a> SampleOracle<'a> {
    pub fn new(ring: &'a ResidueRing, secrets: Vec<RingElem>, noise: NoiseSpec, seed: u64) -> Result<Self, NoiseError> {
        if secrets.is_empty() {
            return Err(NoiseError::EmptySecret);
        }
        if let NoiseKind::FixedWeight(t) = noise.kind() {
            if t > ring.degree() {
                return Err(NoiseError::WeightOutOfRange { t, n: ring.degree() });
            }
        }
        if matches!(noise.kind(), NoiseKind::Normal(_)) && noise.basis().is_none() {
            return Err(NoiseError::MissingBasis);
        }
        Ok(SampleOracle { ring, secrets, noise, seed, rng: stream_rng(seed, 0) })
    }

    /// Independent oracle for the same secrets.
    pub fn fork(&self, stream: u64) -> SampleOracle<'a> {
        SampleOracle { rng: stream_rng(self.seed, stream), ..self.clone() }
    }

    pub fn ring(&self) -> &'a ResidueRing {
        self.ring
    }

    pub fn secrets(&self) -> &[RingElem] {
        &self.secrets
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn rank(&self) -> usize {
        self.secrets.len()
    }
}

impl SampleSource for SampleOracle<'_> {
    fn draw(&mut self) -> ModuleSample {
        mffdp_sample(self.ring, &self.secrets, &self.noise, &mut self.rng).expect("validated at construction")
    }
}

/// Uniform pairs over ring^d × ring.
pub struct UniformSource<'a> {
    ring: &'a ResidueRing,
    rank: usize,
    rng: StreamRng,
}

impl<'a> UniformSource<'a> {
    pub fn new(ring: &'a ResidueRing, rank: usize, seed: u64) -> Self {
        UniformSource { ring, rank, rng: stream_rng(seed, 0) }
    }
}

impl SampleSource for UniformSource<'_> {
    fn draw(&mut self) -> ModuleSample {
        let a = (0..self.rank).map(|_| self.ring.random(&mut self.rng)).collect();
        ModuleSample { a, b: self.ring.random(&mut self.rng) }
    }
}

/// The hybrid H_i built over another source.
pub struct HybridSource<'a, S> {
    inner: S,
    ring: &'a ResidueRing,
    index: usize,
    rng: StreamRng,
}

impl<'a, S: SampleSource> HybridSource<'a, S> {
    pub fn new(inner: S, ring: &'a ResidueRing, index: usize, seed: u64) -> Self {
        HybridSource { inner, ring, index, rng: stream_rng(seed, 1) }
    }
}

impl<S: SampleSource> SampleSource for HybridSource<'_, S> {
    fn draw(&mut self) -> ModuleSample {
        let s = self.inner.draw();
        hybridize(self.ring, &s, self.index, &mut self.rng)
    }
}

/// (a, b + Σ a_i·mask_i): samples for the secret s + mask.
pub fn randomize_secret(ring: &ResidueRing, sample: &ModuleSample, mask: &[RingElem]) -> ModuleSample {
    let b = sample.a.iter().zip(mask).fold(sample.b.clone(), |acc, (a, m)| ring.add(&acc, &ring.mul(a, m)));
    ModuleSample { a: sample.a.clone(), b }
}

/// Uniform on components 0..i, zero on the others.
pub fn hybrid_mask<R: Rng + ?Sized>(ring: &ResidueRing, i: usize, rng: &mut R) -> RingElem {
    let mut h = ring.zero();
    for j in 0..i.min(ring.num_components()) {
        let part = ring.component_random(j, rng);
        h = ring.add(&h, &ring.embed_component(&part, j).expect("unramified ring"));
    }
    h
}

/// (a, b + h) with h from `hybrid_mask`.
pub fn hybridize<R: Rng + ?Sized>(ring: &ResidueRing, sample: &ModuleSample, i: usize, rng: &mut R) -> ModuleSample {
    if i == 0 {
        return sample.clone();
    }
    ModuleSample { a: sample.a.clone(), b: ring.add(&sample.b, &hybrid_mask(ring, i, rng)) }
}
