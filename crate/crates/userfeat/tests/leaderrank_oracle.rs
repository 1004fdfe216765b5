use proptest::prelude::*;
use repostlab_userfeat::{leaderrank, FollowGraph};

/// Dense power iteration over the graph plus a ground node (index n).
fn dense_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let m = n + 1;
    let mut adj = vec![vec![0.0; m]; m];
    for &(a, b) in edges {
        if a != b {
            adj[a][b] = 1.0;
        }
    }
    for i in 0..n {
        adj[i][n] = 1.0;
        adj[n][i] = 1.0;
    }
    let out: Vec<f64> = adj.iter().map(|r| r.iter().sum()).collect();
    let mut s: Vec<f64> = (0..m).map(|i| if i < n { 1.0 } else { 0.0 }).collect();
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..m).map(|j| (0..m).map(|i| adj[i][j] * s[i] / out[i]).sum()).collect();
        let delta: f64 = next.iter().zip(&s).map(|(a, b)| (a - b).abs()).sum();
        s = next;
        if delta < 1e-13 {
            break;
        }
    }
    (0..n).map(|i| s[i] + s[n] / n as f64).collect()
}

fn graph(n: usize, edges: &[(usize, usize)]) -> FollowGraph {
    let ids: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
    let e: Vec<(String, String)> = edges.iter().map(|(a, b)| (ids[*a].clone(), ids[*b].clone())).collect();
    FollowGraph::from_edges(&ids, &e)
}

#[test]
fn two_nodes_match_oracle() {
    let s = leaderrank(&graph(2, &[(0, 1)])).unwrap();
    let o = dense_oracle(2, &[(0, 1)]);
    assert!(s[1] > s[0]);
    for (a, b) in s.iter().zip(&o) {
        assert!((a - b).abs() < 1e-6, "{s:?} vs {o:?}");
    }
}

#[test]
fn star_hub_is_unique_maximum() {
    let edges: Vec<(usize, usize)> = (1..=5).map(|leaf| (leaf, 0)).collect();
    let s = leaderrank(&graph(6, &edges)).unwrap();
    let o = dense_oracle(6, &edges);
    for (a, b) in s.iter().zip(&o) {
        assert!((a - b).abs() < 1e-6);
    }
    assert!(s[1..].iter().all(|x| *x < s[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sums_to_node_count_and_matches_oracle(n in 1usize..9, raw in proptest::collection::vec((0usize..9, 0usize..9), 0..30)) {
        let edges: Vec<(usize, usize)> = raw.into_iter().filter(|(a, b)| *a < n && *b < n).collect();
        let s = leaderrank(&graph(n, &edges)).unwrap();
        prop_assert!((s.iter().sum::<f64>() - n as f64).abs() < 1e-6);
        prop_assert!(s.iter().all(|x| *x > 0.0));
        if n > 1 {
            let mut dedup = edges.clone();
            dedup.sort();
            dedup.dedup();
            let o = dense_oracle(n, &dedup);
            for (a, b) in s.iter().zip(&o) {
                prop_assert!((a - b).abs() < 1e-6, "{:?} vs {:?}", s, o);
            }
        }
    }
}
