use std::sync::Arc;

use ffdp::algebra::linalg::{determinant, rank};
use ffdp::algebra::parse_poly;
use ffdp::carlitz::{CarlitzRing, GaloisAction};
use ffdp::noise::*;
use ffdp::rng::stream_rng;
use ffdp::stats::{chi_square_gof, chi_square_two_sample, histogram};
use ffdp::{FieldCtx, Var};
use proptest::prelude::*;
use rand::Rng;

fn carlitz(q: u64, m: &str, q_mod: &str) -> CarlitzRing {
    let f = Arc::new(FieldCtx::with_order(q).unwrap());
    CarlitzRing::new(&parse_poly(&f, m, Var::T).unwrap(), &parse_poly(&f, q_mod, Var::T).unwrap()).unwrap()
}

#[test]
fn bernoulli_marginals() {
    let ring = carlitz(3, "t", "t+1");
    let r = ring.ring();
    let mut rng = stream_rng(1, 0);
    assert!(sample_bernoulli(r, 0.0, &mut rng).unwrap().is_zero());
    assert_eq!(sample_bernoulli(r, 0.5, &mut rng), Err(NoiseError::InvalidNoiseRate(0.5)));
    let draws: Vec<_> = (0..100_000).map(|_| sample_bernoulli(r, 0.3, &mut rng).unwrap()).collect();
    for i in 0..2 {
        let mut counts = [0u64; 3];
        for e in &draws {
            counts[e.coeffs()[i].value() as usize] += 1;
        }
        let test = chi_square_gof(&counts, &[0.7, 0.15, 0.15]);
        assert!(test.passes(0.01), "coefficient {i}: {test:?}");
    }
    let n = draws.len() as f64;
    let mean = draws.iter().map(|e| e.hamming_weight() as f64).sum::<f64>() / n;
    let sd = (2.0 * 0.3 * 0.7 / n).sqrt();
    assert!((mean - 0.6).abs() < 3.0 * sd, "mean weight {mean}");
}

#[test]
fn fixed_weight_draws() {
    let ring3 = carlitz(3, "t", "t+1");
    let r = ring3.ring();
    let mut rng = stream_rng(2, 0);
    assert!(sample_fixed_weight(r, 0, &mut rng).unwrap().is_zero());
    assert_eq!(sample_fixed_weight(r, 3, &mut rng), Err(NoiseError::WeightOutOfRange { t: 3, n: 2 }));
    let hist = histogram((0..10_000).map(|_| r.index(&sample_fixed_weight(r, 1, &mut rng).unwrap())));
    // weight-one vectors of F_3^2: 1, 2, X, 2X
    assert_eq!(hist.keys().copied().collect::<Vec<_>>(), vec![1, 2, 3, 6]);
    let counts: Vec<u64> = hist.values().copied().collect();
    assert!(chi_square_gof(&counts, &[0.25; 4]).passes(0.01));

    let ring2 = carlitz(2, "t^2+t+1", "t");
    let all = sample_fixed_weight(ring2.ring(), 3, &mut rng).unwrap();
    assert_eq!(all.values(), vec![1, 1, 1]);
}

#[test]
fn normal_basis_examples() {
    let ring = carlitz(3, "t", "t+1");
    let r = ring.ring();
    let x = r.from_coeffs(vec![r.field().elem(1), r.field().elem(1)]);
    let basis = NormalBasis::from_generator(&ring, &x).unwrap();
    let images: Vec<Vec<u32>> = basis.matrix().iter().map(|row| row.iter().map(|c| c.value()).collect()).collect();
    assert_eq!(images, vec![vec![1, 1], vec![1, 2]]);
    assert_eq!(determinant(r.field(), basis.matrix()).value(), 1);
    assert_eq!(NormalBasis::from_generator(&ring, &r.zero()).unwrap_err(), NoiseError::NotNormal);

    let lapin = carlitz(2, "t^6+t^3+1", "t");
    let mut rng = stream_rng(3, 0);
    let basis = find_normal_basis(&lapin, &mut rng, DEFAULT_MAX_TRIES).unwrap();
    assert_eq!(rank(lapin.ring().field(), basis.matrix()), 63);
    assert!(is_normal_element(&lapin, basis.generator()));
    for g in [1usize, 5, 17] {
        assert_permutation(&action_in_normal_coords(&lapin, &basis, g));
    }
}

fn assert_permutation(m: &[Vec<ffdp::FieldElem>]) {
    let n = m.len();
    let mut seen = vec![false; n];
    for row in m {
        let ones: Vec<usize> = (0..n).filter(|&j| !row[j].is_zero()).collect();
        assert_eq!(ones.len(), 1);
        assert_eq!(row[ones[0]].value(), 1);
        assert!(!seen[ones[0]]);
        seen[ones[0]] = true;
    }
}

#[test]
fn empirical_normal_basis_rate_matches_formula() {
    for (q, m, q_mod, expected) in [(2u64, "t^2+t+1", "t", 3.0 / 8.0), (3, "t", "t+1", 4.0 / 9.0)] {
        let ring = carlitz(q, m, q_mod);
        let mut rng = stream_rng(4, q);
        let hits = (0..10_000).filter(|_| is_normal_element(&ring, &ring.ring().random(&mut rng))).count();
        let rate = hits as f64 / 10_000.0;
        assert!((rate - expected).abs() < 0.05, "q = {q}: {rate} vs {expected}");
    }
}

#[test]
fn normal_noise_coordinates_are_bernoulli() {
    let ring = carlitz(3, "t^2+1", "t+1");
    let mut rng = stream_rng(5, 0);
    let basis = Arc::new(find_normal_basis(&ring, &mut rng, DEFAULT_MAX_TRIES).unwrap());
    let r = ring.ring();
    assert!(sample_normal_noise(r, &basis, 0.0, &mut rng).unwrap().is_zero());
    let noise = NoiseSpec::normal(0.2, basis.clone()).unwrap();
    let mut counts = [0u64; 3];
    for _ in 0..20_000 {
        let e = noise.sample(r, &mut rng).unwrap();
        counts[noise.natural_coords(r, &e)[3].value() as usize] += 1;
    }
    assert!(chi_square_gof(&counts, &[0.8, 0.1, 0.1]).passes(0.01));
    for g in 0..ring.group_order() {
        assert_permutation(&action_in_normal_coords(&ring, &basis, g));
    }
}

#[test]
fn bernoulli_and_weight_noise_are_galois_invariant() {
    let ring = carlitz(5, "t", "t+1");
    let r = ring.ring();
    for noise in [NoiseSpec::bernoulli(0.2).unwrap(), NoiseSpec::fixed_weight(2)] {
        let mut rng = stream_rng(6, 0);
        let draws: Vec<_> = (0..20_000).map(|_| noise.sample(r, &mut rng).unwrap()).collect();
        let base = histogram(draws.iter().map(|e| r.index(e)));
        for g in 0..ring.group_order() {
            let mut rng = stream_rng(6, 1 + g as u64);
            let moved = histogram((0..20_000).map(|_| r.index(&ring.apply(g, &noise.sample(r, &mut rng).unwrap()))));
            assert!(chi_square_two_sample(&base, &moved).passes(0.01), "{noise} g = {g}");
        }
    }
}

#[test]
fn ffdp_samples() {
    let ring = carlitz(3, "t^2+t", "t+2");
    let r = ring.ring();
    assert_eq!(r.size(), 81);
    let mut rng = stream_rng(7, 0);
    let s = r.random(&mut rng);
    let exact = NoiseSpec::bernoulli(0.0).unwrap();
    for _ in 0..50 {
        let sample = ffdp_sample(r, &s, &exact, &mut rng).unwrap();
        assert_eq!(sample.b, r.mul(&sample.a, &s));
    }
    let noise = NoiseSpec::bernoulli(0.1).unwrap();
    let hist = histogram((0..10_000).map(|_| r.index(&ffdp_sample(r, &s, &noise, &mut rng).unwrap().a)));
    let mut counts = vec![0u64; 81];
    for (k, v) in hist {
        counts[k as usize] = v;
    }
    assert!(chi_square_gof(&counts, &[1.0 / 81.0; 81]).passes(0.01));

    // s = 0: b is exactly the noise draw that follows a
    let mut rng_a = stream_rng(8, 0);
    let mut rng_b = stream_rng(8, 0);
    let sample = ffdp_sample(r, &r.zero(), &noise, &mut rng_a).unwrap();
    let _ = r.random(&mut rng_b);
    assert_eq!(sample.b, noise.sample(r, &mut rng_b).unwrap());
}

#[test]
fn mffdp_samples() {
    let ring = carlitz(3, "t", "t+1");
    let r = ring.ring();
    let noise = NoiseSpec::bernoulli(0.1).unwrap();
    let mut rng = stream_rng(9, 0);
    let s = r.random(&mut rng);
    let mut rng_a = stream_rng(10, 0);
    let mut rng_b = stream_rng(10, 0);
    for _ in 0..20 {
        let single = ffdp_sample(r, &s, &noise, &mut rng_a).unwrap();
        let module = mffdp_sample(r, std::slice::from_ref(&s), &noise, &mut rng_b).unwrap();
        assert_eq!(ModuleSample::from(single), module);
    }
    let exact = NoiseSpec::bernoulli(0.0).unwrap();
    let secrets = vec![r.random(&mut rng), r.random(&mut rng)];
    for _ in 0..20 {
        let m = mffdp_sample(r, &secrets, &exact, &mut rng).unwrap();
        assert_eq!(m.b, r.add(&r.mul(&m.a[0], &secrets[0]), &r.mul(&m.a[1], &secrets[1])));
    }
    let zeros = vec![r.zero(), r.zero()];
    let weights: f64 =
        (0..5000).map(|_| mffdp_sample(r, &zeros, &noise, &mut rng).unwrap().b.hamming_weight() as f64).sum();
    assert!((weights / 5000.0 - 0.2).abs() < 0.03);
    assert_eq!(mffdp_sample(r, &[], &noise, &mut rng), Err(NoiseError::EmptySecret));
}

proptest! {
    #[test]
    fn samplers_are_seed_deterministic(seed in any::<u64>(), p in 0.0f64..0.49, t in 0usize..=4) {
        let ring = carlitz(5, "t", "t+1");
        let r = ring.ring();
        let draw = |seed| {
            let mut rng = stream_rng(seed, 3);
            let a = sample_bernoulli(r, p, &mut rng).unwrap();
            let b = sample_fixed_weight(r, t, &mut rng).unwrap();
            (a, b, rng.gen::<u64>())
        };
        prop_assert_eq!(draw(seed), draw(seed));
        let (_, w, _) = draw(seed);
        prop_assert_eq!(w.hamming_weight(), t);
    }
}
