use proptest::prelude::*;
use repostlab_evalkit::{collinearity_screen, paired_t_test, pearson, wilcoxon_exact, wilcoxon_normal, wilcoxon_signed_rank, EvalError, WilcoxonMethod};
use repostlab_learners::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two-sided exact p by listing every sign assignment of the ranks.
fn brute_force_wilcoxon(d: &[f64]) -> f64 {
    let mut nz: Vec<f64> = d.iter().copied().filter(|x| *x != 0.0).collect();
    nz.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let n = nz.len();
    let mut ranks = vec![0.0; n];
    for i in 0..n {
        let same: Vec<usize> = (0..n).filter(|&j| nz[j].abs() == nz[i].abs()).collect();
        ranks[i] = same.iter().map(|&j| (j + 1) as f64).sum::<f64>() / same.len() as f64;
    }
    let observed: f64 = (0..n).filter(|&i| nz[i] > 0.0).map(|i| ranks[i]).sum();
    let (mut lo, mut hi) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w <= observed + 1e-9 {
            lo += 1;
        }
        if w >= observed - 1e-9 {
            hi += 1;
        }
    }
    (2.0 * lo.min(hi) as f64 / (1u64 << n) as f64).min(1.0)
}

#[test]
fn t_test_hand_oracle() {
    let t = paired_t_test(&[1.0, 2.0, 3.0, 4.0], &[0.0; 4]).unwrap();
    assert!((t.t - 3.872_983_346_207_417).abs() < 1e-9);
    assert_eq!(t.df, 3);
    assert!((t.p - 0.0305).abs() < 1e-3);
    assert!((t.p - 0.030_466_291_662_170_98).abs() < 1e-6);
    let t2 = paired_t_test(&[0.5, 0.6, 0.62, 0.7, 0.55], &[0.4, 0.41, 0.5, 0.52, 0.46]).unwrap();
    assert!((t2.p - 0.002_747_312_086_115_757).abs() < 1e-6);
}

#[test]
fn t_test_degenerate_and_dominant() {
    let a = [0.3, 0.5, 0.7];
    assert!(matches!(paired_t_test(&a, &a), Err(EvalError::ZeroVariance)));
    assert!(paired_t_test(&[1.0], &[0.0]).is_err());
    let b: Vec<f64> = (0..10).map(|i| 0.1 + 1e-4 * i as f64).collect();
    let c: Vec<f64> = b.iter().enumerate().map(|(i, v)| v + 0.5 + 1e-4 * ((i * 7) % 3) as f64).collect();
    assert!(paired_t_test(&c, &b).unwrap().p < 0.001);
}

#[test]
fn wilcoxon_all_positive_five() {
    let w = wilcoxon_exact(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.0; 5]).unwrap();
    assert_eq!(w.p, 0.0625);
    assert_eq!(w.w_plus, 15.0);
    assert_eq!(w.method, WilcoxonMethod::Exact);
}

#[test]
fn wilcoxon_symmetric_and_degenerate() {
    let w = wilcoxon_signed_rank(&[1.0, -1.0, 2.0, -2.0, 3.0, -3.0], &[0.0; 6]).unwrap();
    assert_eq!(w.p, 1.0);
    assert!(matches!(wilcoxon_signed_rank(&[1.0, 2.0], &[1.0, 2.0]), Err(EvalError::AllZero)));
}

#[test]
fn wilcoxon_exact_agrees_with_normal_at_fourteen() {
    let d = [0.05, 0.07, 0.02, 0.11, 0.04, -0.01, 0.09, 0.06, 0.03, 0.08, 0.12, 0.10, -0.025, 0.13];
    let zero = [0.0; 14];
    let e = wilcoxon_exact(&d, &zero).unwrap();
    let n = wilcoxon_normal(&d, &zero).unwrap();
    assert!((e.p - n.p).abs() < 0.02, "{} vs {}", e.p, n.p);
    assert!((e.p - brute_force_wilcoxon(&d)).abs() < 1e-12);
    let big: Vec<f64> = (1..=25).map(|i| i as f64 * if i % 4 == 0 { -1.0 } else { 1.0 }).collect();
    assert_eq!(wilcoxon_signed_rank(&big, &[0.0; 25]).unwrap().method, WilcoxonMethod::Normal);
}

#[test]
fn exact_wilcoxon_matches_enumeration_with_ties() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let n = rng.random_range(1..13);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-4i32..5) as f64 * 0.25).collect();
        if d.iter().all(|x| *x == 0.0) {
            continue;
        }
        let p = wilcoxon_exact(&d, &vec![0.0; n]).unwrap().p;
        assert!((p - brute_force_wilcoxon(&d)).abs() < 1e-12, "{d:?}");
    }
}

#[test]
fn collinearity_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
    assert!((pearson(&x, &x.iter().map(|v| 2.0 * v + 3.0).collect::<Vec<_>>()).unwrap() - 1.0).abs() < 1e-12);
    assert!(pearson(&x, &[1.0; 50]).is_none());
    let mut with_nan = x.clone();
    with_nan[3] = f64::NAN;
    assert!((pearson(&with_nan, &x).unwrap() - 1.0).abs() < 1e-12);

    let rows: Vec<Vec<f64>> = (0..1000).map(|_| (0..20).map(|_| rng.random::<f64>()).collect()).collect();
    let m = Matrix::from_rows(&rows).unwrap();
    let r = collinearity_screen(&m, 0.7).unwrap();
    assert_eq!(r.pairs, 190);
    assert_eq!(r.above, 0);
    assert_eq!(r.fraction, 0.0);

    let dup: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0], r[0], r[1], 7.0]).collect();
    let r = collinearity_screen(&Matrix::from_rows(&dup).unwrap(), 0.7).unwrap();
    assert_eq!((r.pairs, r.undefined, r.above), (6, 3, 1));
    assert_eq!(r.flagged[0].0, 0);
    assert!((r.fraction - 1.0 / 3.0).abs() < 1e-15);
    assert!(collinearity_screen(&Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap(), 0.7).is_err());
}

proptest! {
    #[test]
    fn both_tests_are_symmetric(pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 5..25)) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        if let (Ok(x), Ok(y)) = (paired_t_test(&a, &b), paired_t_test(&b, &a)) {
            prop_assert!((x.p - y.p).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&x.p));
        }
        if let (Ok(x), Ok(y)) = (wilcoxon_signed_rank(&a, &b), wilcoxon_signed_rank(&b, &a)) {
            prop_assert!((x.p - y.p).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&x.p));
        }
    }
}
