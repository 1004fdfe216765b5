use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repostlab_evalkit::{aggregate, f1, random_predictions, FoldScores};

#[test]
fn f1_hand_cases() {
    assert_eq!(f1(&[1, 0, 1], &[1, 0, 1]).unwrap(), 1.0);
    let v = f1(&[1, 0, 0, 0, 0, 0], &[1, 1, 0, 0, 0, 0]).unwrap();
    assert!((v - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(f1(&[0, 0], &[0, 0]).unwrap(), 0.0);
    assert_eq!(f1(&[1, 1], &[0, 0]).unwrap(), 0.0);
    assert!(f1(&[], &[]).is_err());
    assert!(f1(&[1], &[1, 0]).is_err());
    assert!(f1(&[2], &[1]).is_err());
}

#[test]
fn random_guessing_at_one_to_five_is_one_sixth() {
    let labels: Vec<u8> = (0..12_000).map(|i| u8::from(i % 6 == 0)).collect();
    let trials: Vec<f64> = (0..200).map(|s| f1(&labels, &random_predictions(labels.len(), 1.0 / 6.0, s)).unwrap()).collect();
    let mean = trials.iter().sum::<f64>() / trials.len() as f64;
    assert!((mean - 1.0 / 6.0).abs() < 0.01, "{mean}");
}

#[test]
fn aggregate_worked_examples() {
    let (mu, sigma) = aggregate(&[(0.8, 0.0), (0.6, 0.0)]);
    assert!((mu - 0.7).abs() < 1e-15);
    assert!((sigma - 0.1).abs() < 1e-15);
    assert_eq!(aggregate(&[(0.42, 0.05)]), (0.42, 0.05));
    let s = FoldScores {
        group: "g".into(),
        folds: vec![0.5, 0.7],
    };
    assert!((s.mu() - 0.6).abs() < 1e-15);
    assert!((s.sigma() - 0.1).abs() < 1e-15);
}

/// Pools every group's samples, replicated so each group carries equal weight,
/// and takes the population mean and standard deviation of the pool.
fn pooled_oracle(groups: &[Vec<f64>]) -> (f64, f64) {
    let lcm = groups.iter().map(Vec::len).fold(1usize, |a, b| a / gcd(a, b) * b);
    let pool: Vec<f64> = groups.iter().flat_map(|g| g.iter().flat_map(move |&v| std::iter::repeat_n(v, lcm / g.len()))).collect();
    let n = pool.len() as f64;
    let mean = pool.iter().sum::<f64>() / n;
    (mean, (pool.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[test]
fn aggregate_matches_pooled_mixture_on_random_group_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for set in 0..100 {
        let k = if set == 0 { 14 } else { rng.random_range(1..16) };
        let groups: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let n = if set % 2 == 0 { 10 } else { rng.random_range(1..8) };
                (0..n).map(|_| rng.random::<f64>()).collect()
            })
            .collect();
        let summaries: Vec<(f64, f64)> = groups
            .iter()
            .map(|g| {
                let s = FoldScores { group: String::new(), folds: g.clone() };
                (s.mu(), s.sigma())
            })
            .collect();
        let (mu, sigma) = aggregate(&summaries);
        let (om, os) = pooled_oracle(&groups);
        assert!((mu - om).abs() < 1e-12, "set {set}: {mu} vs {om}");
        assert!((sigma - os).abs() < 1e-12, "set {set}: {sigma} vs {os}");
    }
}

proptest! {
    #[test]
    fn f1_is_order_invariant(pairs in prop::collection::vec((0u8..2, 0u8..2), 1..60), seed in any::<u64>()) {
        let (y, p): (Vec<u8>, Vec<u8>) = pairs.iter().copied().unzip();
        let mut idx: Vec<usize> = (0..y.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(&mut idx[..], &mut rng);
        let y2: Vec<u8> = idx.iter().map(|&i| y[i]).collect();
        let p2: Vec<u8> = idx.iter().map(|&i| p[i]).collect();
        let a = f1(&y, &p).unwrap();
        prop_assert_eq!(a, f1(&y2, &p2).unwrap());
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn single_group_aggregate_is_identity(mu in 0.0f64..1.0, sigma in 0.0f64..0.5) {
        let (m, s) = aggregate(&[(mu, sigma)]);
        prop_assert!((m - mu).abs() < 1e-15);
        prop_assert!((s - sigma).abs() < 1e-15);
    }
}
