use proptest::prelude::*;
use streamcount::hashcore::{HashFunction, HashedWord, RandomSource};

fn random_strings(count: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = RandomSource::new(seed);
    (0..count)
        .map(|_| {
            let len = 1 + (rng.next_u64() % 24) as usize;
            (0..len).map(|_| rng.next_u64() as u8).collect()
        })
        .collect()
}

#[test]
fn every_bit_position_is_balanced() {
    for seed in [0u64, 0xdead_beef] {
        let h = HashFunction::new(seed);
        let inputs = random_strings(1_000_000, seed ^ 1);
        let mut ones = [0u64; 64];
        for x in &inputs {
            let bits = h.hash(x).bits();
            for (i, c) in ones.iter_mut().enumerate() {
                *c += (bits >> i) & 1;
            }
        }
        for (i, &c) in ones.iter().enumerate() {
            let freq = c as f64 / inputs.len() as f64;
            assert!((freq - 0.5).abs() < 0.01, "seed {seed} bit {i}: {freq}");
        }
    }
}

#[test]
fn counter_inputs_are_balanced() {
    // Highly structured inputs: consecutive integers.
    let h = HashFunction::new(3);
    let n = 100_000u32;
    let mut ones = [0u64; 64];
    for i in 0..n {
        let bits = h.hash(&i.to_le_bytes()).bits();
        for (b, c) in ones.iter_mut().enumerate() {
            *c += (bits >> b) & 1;
        }
    }
    for &c in &ones {
        assert!((c as f64 / n as f64 - 0.5).abs() < 0.01);
    }
}

#[test]
fn seeds_agree_on_half_the_bits() {
    let a = HashFunction::new(1);
    let b = HashFunction::new(2);
    let inputs = random_strings(20_000, 5);
    let agree: u64 = inputs
        .iter()
        .map(|x| u64::from((!(a.hash(x).bits() ^ b.hash(x).bits())).count_ones()))
        .sum();
    let mean = agree as f64 / inputs.len() as f64;
    // sd of the per-word agreement is 4; the mean over 2e4 words has sd 0.03.
    assert!((mean - 32.0).abs() < 0.2, "{mean}");
}

fn frequency(trials: u64, mut f: impl FnMut() -> bool) -> f64 {
    (0..trials).filter(|_| f()).count() as f64 / trials as f64
}

#[test]
fn bernoulli_pow2_frequencies() {
    let mut rng = RandomSource::new(17);
    let f1 = frequency(100_000, || rng.bernoulli_pow2(1));
    assert!((f1 - 0.5).abs() < 0.01, "{f1}");

    let trials = 10_000_000u64;
    let p = 1.0 / 1024.0;
    let f10 = frequency(trials, || rng.bernoulli_pow2(10));
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((f10 - p).abs() < 3.0 * sigma, "{f10} vs {p} (sigma {sigma})");

    // More than one word of bits.
    assert!((0..1000).all(|_| !rng.bernoulli_pow2(70)));
}

#[test]
fn bernoulli_real_frequency() {
    let mut rng = RandomSource::new(23);
    let f = frequency(100_000, || rng.bernoulli_real(1.0 / 3.0).unwrap());
    assert!((f - 1.0 / 3.0).abs() < 0.01, "{f}");
}

proptest! {
    #[test]
    fn rho_is_the_leading_zero_run(bits in any::<u64>()) {
        let w = HashedWord::new(bits);
        let r = w.rho();
        prop_assert!((0..r).all(|i| !w.bit(i)));
        if r < 64 {
            prop_assert!(w.bit(r));
        } else {
            prop_assert_eq!(bits, 0);
        }
    }

    #[test]
    fn split_is_deterministic_and_lossless(x in proptest::collection::vec(any::<u8>(), 0..32), k in 0u32..64, seed in any::<u64>()) {
        let h = HashFunction::new(seed);
        let w = h.hash(&x);
        let (i1, r1) = w.split(k).unwrap();
        let (i2, r2) = h.hash(&x).split(k).unwrap();
        prop_assert_eq!((i1, r1), (i2, r2));
        prop_assert!(k == 0 || i1 < (1u64 << k));
        prop_assert_eq!(r1.width(), 64 - k);
        // Index bits followed by the rest reproduce the word.
        let rebuilt = if k == 0 { r1.bits() } else { (i1 << (64 - k)) | (r1.bits() >> k) };
        prop_assert_eq!(rebuilt, w.bits());
    }
}
