use std::sync::{Arc, Mutex};

use ffdp::algebra::parse_poly;
use ffdp::carlitz::{CarlitzRing, GaloisAction};
use ffdp::noise::{ModuleSample, NoiseSpec};
use ffdp::reduction::*;
use ffdp::residue::{ResidueRing, RingElem};
use ffdp::rng::{stream_rng, StreamRng};
use ffdp::stats::{chi_square_gof, histogram};
use ffdp::{FieldCtx, Var};
use proptest::prelude::*;

fn carlitz(q: u64, m: &str, q_mod: &str) -> CarlitzRing {
    let f = Arc::new(FieldCtx::with_order(q).unwrap());
    CarlitzRing::new(&parse_poly(&f, m, Var::T).unwrap(), &parse_poly(&f, q_mod, Var::T).unwrap()).unwrap()
}

fn residual(ring: &ResidueRing, s: &ModuleSample, secrets: &[RingElem]) -> RingElem {
    s.a.iter().zip(secrets).fold(s.b.clone(), |acc, (a, x)| ring.sub(&acc, &ring.mul(a, x)))
}

fn uniform_counts(values: impl Iterator<Item = u64>, size: usize) -> Vec<u64> {
    let mut counts = vec![0u64; size];
    for (k, v) in histogram(values) {
        counts[k as usize] = v;
    }
    counts
}

#[test]
fn randomize_secret_shifts_the_secret() {
    let ring = carlitz(3, "t", "t+1");
    let r = ring.ring();
    let mut rng = stream_rng(1, 0);
    let s = r.random(&mut rng);
    let mut oracle = SampleOracle::new(r, vec![s.clone()], NoiseSpec::bernoulli(0.0).unwrap(), 1).unwrap();
    let zero = vec![r.zero()];
    for _ in 0..20 {
        let mask = vec![r.random(&mut rng)];
        let sample = oracle.draw();
        assert_eq!(randomize_secret(r, &sample, &zero), sample);
        let moved = randomize_secret(r, &sample, &mask);
        assert!(residual(r, &moved, &[r.add(&s, &mask[0])]).is_zero());
    }
    // the shifted secret s + mask is uniform
    let shifted = (0..9000).map(|_| r.index(&r.add(&s, &r.random(&mut rng))) as u64);
    assert!(chi_square_gof(&uniform_counts(shifted, 9), &[1.0 / 9.0; 9]).passes(0.01));
}

#[test]
fn hybrids_interpolate_between_structure_and_uniform() {
    let ring = carlitz(5, "t", "t+1");
    let r = ring.ring();
    assert_eq!(r.num_components(), 4);
    let mut rng = stream_rng(2, 0);
    let s = r.random(&mut rng);
    let mut oracle = SampleOracle::new(r, vec![s.clone()], NoiseSpec::bernoulli(0.0).unwrap(), 2).unwrap();
    let sample = oracle.draw();
    assert_eq!(hybridize(r, &sample, 0, &mut rng), sample);

    let mut hybrid = HybridSource::new(oracle.fork(5), r, 2, 3);
    let residuals: Vec<RingElem> = (0..5000).map(|_| residual(r, &hybrid.draw(), std::slice::from_ref(&s))).collect();
    for j in 0..4 {
        let values = residuals.iter().map(|e| r.component(e, j)[0].value() as u64);
        if j < 2 {
            assert!(chi_square_gof(&uniform_counts(values, 5), &[0.2; 5]).passes(0.01), "component {j}");
        } else {
            assert!(values.into_iter().all(|v| v == 0), "component {j}");
        }
    }

    let small = carlitz(3, "t", "t+1");
    let r3 = small.ring();
    let oracle = SampleOracle::new(r3, vec![r3.random(&mut rng)], NoiseSpec::bernoulli(0.0).unwrap(), 4).unwrap();
    let mut full = HybridSource::new(oracle, r3, r3.num_components(), 5);
    let bs = (0..9000).map(|_| r3.index(&full.draw().b) as u64);
    assert!(chi_square_gof(&uniform_counts(bs, 9), &[1.0 / 9.0; 9]).passes(0.01));
}

/// Checks every batch against the shifted-secret algebra, then answers like an
/// exact oracle for the boundary component.
struct Recorder<'a> {
    ring: &'a ResidueRing,
    secret: RingElem,
    component: usize,
    below: Mutex<Vec<u64>>,
}

impl Distinguisher for Recorder<'_> {
    fn samples_per_query(&self) -> usize {
        1
    }

    fn advantage(&self) -> f64 {
        0.5
    }

    fn distinguish(&self, _ctx: &StreamContext, samples: &[ModuleSample], _rng: &mut StreamRng) -> bool {
        let r = residual(self.ring, &samples[0], std::slice::from_ref(&self.secret));
        for j in self.component + 1..self.ring.num_components() {
            assert!(self.ring.component(&r, j).iter().all(|c| c.is_zero()));
        }
        let mut below = self.below.lock().unwrap();
        for j in 0..self.component {
            below.push(self.ring.component(&r, j)[0].value() as u64);
        }
        self.ring.component(&r, self.component).iter().all(|c| c.is_zero())
    }
}

#[test]
fn search_transform_matches_the_shift_algebra() {
    let ring = carlitz(5, "t", "t+1");
    let r = ring.ring();
    let mut rng = stream_rng(3, 0);
    let s = r.random(&mut rng);
    let mut oracle = SampleOracle::new(r, vec![s.clone()], NoiseSpec::bernoulli(0.0).unwrap(), 3).unwrap();
    let dist = Recorder { ring: r, secret: s.clone(), component: 2, below: Mutex::new(Vec::new()) };
    let ctx = StreamContext::plain(r, 1, ring.identity());
    let mut source = || Ok(oracle.draw());
    // v·(g − s) vanishes at the boundary for g = s mod 𝔓 and otherwise only when v does
    let sol = guess_and_search(&mut source, r, 2, 0, &dist, &ctx, 201, &mut rng).unwrap();
    assert_eq!(sol.residue, r.component(&s, 2));
    assert_eq!(sol.votes.len(), 5);
    for (g, &v) in sol.votes.iter().enumerate() {
        if g == r.component(&s, 2)[0].value() as usize {
            assert_eq!(v, 201);
        } else {
            assert!(v < 80, "guess {g}: {v}");
        }
    }
    let below = dist.below.into_inner().unwrap();
    assert!(chi_square_gof(&uniform_counts(below.into_iter(), 5), &[0.2; 5]).passes(0.01));
}

#[test]
fn planted_search_finds_the_boundary_residue() {
    let ring = carlitz(3, "t", "t+1");
    let r = ring.ring();
    let noise = NoiseSpec::bernoulli(0.1).unwrap();
    let m = repetitions(0.2, 0.001).unwrap() | 1;
    let mut ok = 0;
    for trial in 0..100u64 {
        let mut rng = stream_rng(100 + trial, 0);
        let s = r.random(&mut rng);
        let mut oracle = SampleOracle::new(r, vec![s.clone()], noise.clone(), trial).unwrap();
        let dist = PlantedDistinguisher::new(&ring, &noise, vec![s.clone()], 0, 1, trial).unwrap();
        let ctx = StreamContext::plain(r, 1, ring.identity());
        let mut source = || Ok(oracle.draw());
        if let Ok(sol) = guess_and_search(&mut source, r, 0, 0, &dist, &ctx, m, &mut rng) {
            ok += (sol.residue == r.component(&s, 0)) as usize;
        }
    }
    assert!(ok >= 99, "{ok}/100");
}

#[test]
fn noiseless_search_needs_one_repetition() {
    let ring = carlitz(2, "t^6+t^3+1", "t");
    let r = ring.ring();
    let exact = NoiseSpec::bernoulli(0.0).unwrap();
    let mut rng = stream_rng(4, 0);
    let s = r.random(&mut rng);
    let mut oracle = SampleOracle::new(r, vec![s.clone()], exact.clone(), 4).unwrap();
    // one sample would accept a wrong guess whenever v ≡ 0 at the boundary
    let dist = PlantedDistinguisher::new(&ring, &exact, vec![s.clone()], 0, 4, 4).unwrap();
    let ctx = StreamContext::plain(r, 1, ring.identity());
    let mut source = || Ok(oracle.draw());
    let sol = guess_and_search(&mut source, r, 0, 0, &dist, &ctx, 1, &mut rng).unwrap();
    assert_eq!(sol.votes.len(), 512);
    assert_eq!(sol.residue, r.component(&s, 0));
}

#[test]
fn galois_recovery_pulls_residues_back() {
    let ring = carlitz(5, "t", "t+1");
    let r = ring.ring();
    let noise = NoiseSpec::bernoulli(0.1).unwrap();
    let m = repetitions(0.2, 0.001).unwrap() | 1;
    for trial in 0..20u64 {
        let mut rng = stream_rng(200 + trial, 0);
        let s = r.random(&mut rng);
        let oracle = SampleOracle::new(r, vec![s.clone()], noise.clone(), trial).unwrap();
        let dist = PlantedDistinguisher::new(&ring, &noise, vec![s.clone()], 1, 1, trial).unwrap();
        let mut solve = |g: usize| {
            let mut feed = oracle.fork(g as u64 + 1);
            let mut source = || {
                let x = feed.draw();
                Ok(ModuleSample { a: vec![ring.apply(g, &x.a[0])], b: ring.apply(g, &x.b) })
            };
            let ctx = StreamContext { mask: vec![r.zero()], galois: g };
            guess_and_search(&mut source, r, 1, 0, &dist, &ctx, m, &mut rng)
        };
        let (secret, records) = galois_recover(&ring, 1, &mut solve).unwrap();
        assert_eq!(secret, s, "trial {trial}");
        for rec in &records {
            assert_eq!(ring.permutation(rec.galois_index)[rec.component], 1);
            let moved = ring.apply(rec.galois_index, &s);
            let expect: Vec<u32> = r.component(&moved, 1).iter().map(|c| c.value()).collect();
            assert_eq!(rec.solved_residue, expect);
        }
    }
}

fn ml_setup(q: u64, p: f64) -> (CarlitzRing, NoiseSpec) {
    (carlitz(q, "t", "t+1"), NoiseSpec::bernoulli(p).unwrap())
}

fn config(seed: u64) -> ReductionConfig {
    ReductionConfig { delta: 0.4, mu: 0.01, seed, ..Default::default() }
}

#[test]
fn full_reduction_recovers_secrets() {
    let (ring, noise) = ml_setup(3, 0.1);
    let r = ring.ring();
    let dist = MlDistinguisher::new(r, noise.clone(), 1, 8, DEFAULT_ML_BOUND, 200, 7).unwrap();
    for trial in 0..20u64 {
        let mut rng = stream_rng(300 + trial, 0);
        let s = r.random(&mut rng);
        let oracle = SampleOracle::new(r, vec![s.clone()], noise.clone(), trial).unwrap();
        let report = full_reduction(&oracle, &ring, &dist, &config(trial)).unwrap();
        assert_eq!(report.recovered_secret, s);
        assert!(report.crt_consistent(r));
        assert!(report.validation.as_ref().unwrap().passed);
        assert_eq!(report.per_prime.len(), r.num_components());
    }
}

#[test]
fn noiseless_full_reduction() {
    let ring = carlitz(5, "t", "t+1");
    let r = ring.ring();
    let exact = NoiseSpec::bernoulli(0.0).unwrap();
    let dist = MlDistinguisher::new(r, exact.clone(), 1, 3, DEFAULT_ML_BOUND, 200, 7).unwrap();
    for trial in 0..10u64 {
        let mut rng = stream_rng(400 + trial, 0);
        let s = r.random(&mut rng);
        let oracle = SampleOracle::new(r, vec![s.clone()], exact.clone(), trial).unwrap();
        let cfg = ReductionConfig { repetitions: Some(1), ..config(trial) };
        assert_eq!(full_reduction(&oracle, &ring, &dist, &cfg).unwrap().recovered_secret, s);
    }
}

#[test]
fn reduction_is_deterministic_and_worker_independent() {
    let (ring, noise) = ml_setup(3, 0.1);
    let r = ring.ring();
    let dist = MlDistinguisher::new(r, noise.clone(), 1, 8, DEFAULT_ML_BOUND, 200, 7).unwrap();
    let s = r.random(&mut stream_rng(5, 0));
    let oracle = SampleOracle::new(r, vec![s], noise, 5).unwrap();
    let strip = |mut rep: ReductionReport| {
        rep.wall_time_secs = None;
        serde_json::to_string(&rep).unwrap()
    };
    let one = strip(full_reduction(&oracle, &ring, &dist, &config(9)).unwrap());
    let again = strip(full_reduction(&oracle, &ring, &dist, &config(9)).unwrap());
    let parallel = strip(full_reduction(&oracle, &ring, &dist, &ReductionConfig { workers: 4, ..config(9) }).unwrap());
    assert_eq!(one, again);
    assert_eq!(one, parallel);
}

#[test]
fn sample_usage_grows_with_repetitions() {
    let (ring, noise) = ml_setup(3, 0.1);
    let r = ring.ring();
    let dist = MlDistinguisher::new(r, noise.clone(), 1, 8, DEFAULT_ML_BOUND, 200, 7).unwrap();
    let s = r.random(&mut stream_rng(6, 0));
    let oracle = SampleOracle::new(r, vec![s], noise, 6).unwrap();
    let used: Vec<u64> = [5usize, 15, 45]
        .iter()
        .map(|&m| {
            let cfg = ReductionConfig { repetitions: Some(m), ..config(6) };
            full_reduction(&oracle, &ring, &dist, &cfg).unwrap().samples_used
        })
        .collect();
    assert!(used[0] < used[1] && used[1] < used[2], "{used:?}");
}

#[test]
fn budget_is_enforced() {
    let (ring, noise) = ml_setup(3, 0.1);
    let r = ring.ring();
    let dist = MlDistinguisher::new(r, noise.clone(), 1, 8, DEFAULT_ML_BOUND, 200, 7).unwrap();
    let oracle = SampleOracle::new(r, vec![r.one()], noise, 7).unwrap();
    let cfg = ReductionConfig { max_samples: 10, ..config(7) };
    assert!(matches!(full_reduction(&oracle, &ring, &dist, &cfg), Err(ReductionError::SecretNotFound(_))));
}

#[test]
fn planted_advantage_matches_theory() {
    let ring = carlitz(3, "t", "t+1");
    let r = ring.ring();
    let noise = NoiseSpec::bernoulli(0.1).unwrap();
    let s = r.random(&mut stream_rng(8, 0));
    let dist = PlantedDistinguisher::new(&ring, &noise, vec![s.clone()], 0, 1, 8).unwrap();
    // (e_0, e_1) = (0, 0) or e_0 + e_1·c = 0 with both nonzero
    assert!((dist.zero_probability() - 0.815).abs() < 0.03);
    let oracle = SampleOracle::new(r, vec![s.clone()], noise.clone(), 8).unwrap();
    let ctx = StreamContext::plain(r, 1, ring.identity());
    let mut h0 = HybridSource::new(oracle.fork(1), r, 0, 1);
    let mut h1 = HybridSource::new(oracle.fork(2), r, 1, 2);
    let est = estimate_advantage(&dist, &ctx, &mut h0, &mut h1, 4000, &mut stream_rng(8, 1)).unwrap();
    assert!(2.0 * est.advantage > 0.3, "{est:?}");
    assert!(est.ci_low <= dist.advantage() + 0.03 && dist.advantage() - 0.03 <= est.ci_high, "{est:?}");

    let exact = NoiseSpec::bernoulli(0.0).unwrap();
    let sharp = PlantedDistinguisher::new(&ring, &exact, vec![s.clone()], 0, 8, 8).unwrap();
    let oracle = SampleOracle::new(r, vec![s], exact, 9).unwrap();
    let mut h0 = HybridSource::new(oracle.fork(1), r, 0, 1);
    let mut h1 = HybridSource::new(oracle.fork(2), r, 1, 2);
    let est = estimate_advantage(&sharp, &ctx, &mut h0, &mut h1, 1000, &mut stream_rng(9, 1)).unwrap();
    assert!((est.advantage - 0.5).abs() < 0.01, "{est:?}");
}

#[test]
fn ml_votes_separate_structure_from_uniform() {
    let ring = carlitz(3, "t", "t+1");
    let r = ring.ring();
    let mut last = f64::INFINITY;
    for p in [0.1, 0.3, 0.45] {
        let noise = NoiseSpec::bernoulli(p).unwrap();
        let dist = MlDistinguisher::new(r, noise.clone(), 1, 30, DEFAULT_ML_BOUND, 200, 7).unwrap();
        let oracle = SampleOracle::new(r, vec![r.random(&mut stream_rng(10, 0))], noise, 10).unwrap();
        let ctx = StreamContext::plain(r, 1, ring.identity());
        let mut structured = oracle.fork(1);
        let mut uniform = UniformSource::new(r, 1, 11);
        let est = estimate_advantage(&dist, &ctx, &mut structured, &mut uniform, 300, &mut stream_rng(10, 1)).unwrap();
        if p == 0.1 {
            assert!(est.p_structured >= 0.9 && est.p_alternative <= 0.6, "{est:?}");
        }
        assert!(est.advantage <= last + 0.05, "p = {p}: {est:?}");
        last = est.advantage;
    }
}

struct Constant;

impl Distinguisher for Constant {
    fn samples_per_query(&self) -> usize {
        1
    }
    fn advantage(&self) -> f64 {
        0.0
    }
    fn distinguish(&self, _: &StreamContext, _: &[ModuleSample], _: &mut StreamRng) -> bool {
        true
    }
}

#[test]
fn advantage_estimates_of_trivial_distinguishers() {
    let ring = carlitz(3, "t", "t+1");
    let r = ring.ring();
    let ctx = StreamContext::plain(r, 1, ring.identity());
    let mut a = UniformSource::new(r, 1, 1);
    let mut b = UniformSource::new(r, 1, 2);
    let est = estimate_advantage(&Constant, &ctx, &mut a, &mut b, 200, &mut stream_rng(1, 1)).unwrap();
    assert_eq!(est.advantage, 0.0);
    assert!(estimate_advantage(&Constant, &ctx, &mut a, &mut b, 99, &mut stream_rng(1, 1)).is_err());
}

#[test]
fn module_reduction_recovers_both_secrets() {
    let (ring, noise) = ml_setup(3, 0.05);
    let r = ring.ring();
    let single = MlDistinguisher::new(r, noise.clone(), 1, 8, DEFAULT_ML_BOUND, 200, 7).unwrap();
    let pair = MlDistinguisher::new(r, noise.clone(), 2, 8, DEFAULT_ML_BOUND, 200, 7).unwrap();
    for trial in 0..5u64 {
        let mut rng = stream_rng(500 + trial, 0);
        let s = r.random(&mut rng);
        let oracle = SampleOracle::new(r, vec![s.clone()], noise.clone(), trial).unwrap();
        let full = full_reduction(&oracle, &ring, &single, &config(trial)).unwrap();
        let module = module_reduction(&oracle, &ring, &single, &config(trial)).unwrap();
        assert_eq!(module.secrets, vec![full.recovered_secret.clone()]);
        assert_eq!(module.samples_used, full.samples_used);

        let secrets = vec![r.random(&mut rng), r.random(&mut rng)];
        let oracle = SampleOracle::new(r, secrets.clone(), noise.clone(), trial).unwrap();
        let report = module_reduction(&oracle, &ring, &pair, &config(trial)).unwrap();
        assert_eq!(report.secrets, secrets);
        assert!(report.validation.unwrap().passed);
        assert!(full_reduction(&oracle, &ring, &pair, &config(trial)).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn masking_composes(seed in any::<u64>()) {
        let ring = carlitz(5, "t", "t+1");
        let r = ring.ring();
        let mut rng = stream_rng(seed, 0);
        let sample = ModuleSample { a: vec![r.random(&mut rng), r.random(&mut rng)], b: r.random(&mut rng) };
        let m1 = vec![r.random(&mut rng), r.random(&mut rng)];
        let m2 = vec![r.random(&mut rng), r.random(&mut rng)];
        let sum: Vec<RingElem> = m1.iter().zip(&m2).map(|(x, y)| r.add(x, y)).collect();
        let twice = randomize_secret(r, &randomize_secret(r, &sample, &m1), &m2);
        prop_assert_eq!(twice, randomize_secret(r, &sample, &sum));
    }

    #[test]
    fn hybrid_masks_vanish_above_the_index(seed in any::<u64>(), i in 0usize..=4) {
        let ring = carlitz(5, "t", "t+1");
        let r = ring.ring();
        let h = hybrid_mask(r, i, &mut stream_rng(seed, 0));
        for j in i..r.num_components() {
            prop_assert!(r.component(&h, j).iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn galois_transport_moves_the_secret(seed in any::<u64>(), g in 0usize..4) {
        let ring = carlitz(5, "t", "t+1");
        let r = ring.ring();
        let mut rng = stream_rng(seed, 0);
        let s = r.random(&mut rng);
        let mut oracle = SampleOracle::new(r, vec![s.clone()], NoiseSpec::bernoulli(0.2).unwrap(), seed).unwrap();
        let x = oracle.draw();
        let e = residual(r, &x, std::slice::from_ref(&s));
        let moved = ModuleSample { a: vec![ring.apply(g, &x.a[0])], b: ring.apply(g, &x.b) };
        prop_assert_eq!(residual(r, &moved, &[ring.apply(g, &s)]), ring.apply(g, &e));
    }
}
