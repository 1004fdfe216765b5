//! Follow graph and LeaderRank.

use std::collections::HashMap;

use repostlab_core::Corpus;

use crate::error::{Result, UserError};

pub const LEADERRANK_TOL: f64 = 1e-8;
pub const LEADERRANK_MAX_ITERS: usize = 10_000;

/// Directed follower → followee adjacency over corpus users, without self-loops
/// or duplicate edges.
#[derive(Debug, Clone, Default)]
pub struct FollowGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    followees: Vec<Vec<usize>>,
    followers: Vec<Vec<usize>>,
}

impl FollowGraph {
    pub fn from_edges<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> FollowGraph {
        let ids: Vec<String> = nodes.iter().map(|s| s.as_ref().to_string()).collect();
        let index: HashMap<String, usize> = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut followees = vec![Vec::new(); ids.len()];
        for (a, b) in edges {
            if let (Some(&i), Some(&j)) = (index.get(a.as_ref()), index.get(b.as_ref())) {
                if i != j {
                    followees[i].push(j);
                }
            }
        }
        FollowGraph::finish(ids, index, followees)
    }

    pub fn from_corpus(corpus: &Corpus) -> FollowGraph {
        let ids: Vec<String> = corpus.users().iter().map(|u| u.user_id.clone()).collect();
        let index: HashMap<String, usize> = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let followees = corpus
            .users()
            .iter()
            .enumerate()
            .map(|(i, u)| {
                u.following
                    .iter()
                    .filter_map(|f| index.get(f).copied())
                    .filter(|&j| j != i)
                    .collect()
            })
            .collect();
        FollowGraph::finish(ids, index, followees)
    }

    fn finish(ids: Vec<String>, index: HashMap<String, usize>, mut followees: Vec<Vec<usize>>) -> FollowGraph {
        let mut followers = vec![Vec::new(); ids.len()];
        for (i, out) in followees.iter_mut().enumerate() {
            out.sort_unstable();
            out.dedup();
            for &j in out.iter() {
                followers[j].push(i);
            }
        }
        FollowGraph {
            ids,
            index,
            followees,
            followers,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, node: usize) -> &str {
        &self.ids[node]
    }

    pub fn node(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn followees(&self, node: usize) -> &[usize] {
        &self.followees[node]
    }

    pub fn followers(&self, node: usize) -> &[usize] {
        &self.followers[node]
    }

    pub fn follows(&self, a: &str, b: &str) -> bool {
        match (self.node(a), self.node(b)) {
            (Some(i), Some(j)) => self.followees[i].binary_search(&j).is_ok(),
            _ => false,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.followees.iter().map(Vec::len).sum()
    }
}

/// LeaderRank scores by node index. A ground node is linked both ways to every
/// node; score flows from follower to followee. After convergence the ground
/// node's score is shared equally, so scores sum to the node count.
pub fn leaderrank(graph: &FollowGraph) -> Result<Vec<f64>> {
    let n = graph.len();
    if n == 0 {
        return Err(UserError::EmptyGraph);
    }
    let mut s = vec![1.0; n];
    let mut ground = 0.0;
    let mut next = vec![0.0; n];
    let mut iters = 0;
    loop {
        let from_ground = ground / n as f64;
        next.iter_mut().for_each(|x| *x = from_ground);
        let mut next_ground = 0.0;
        for i in 0..n {
            let share = s[i] / (graph.followees[i].len() + 1) as f64;
            for &j in &graph.followees[i] {
                next[j] += share;
            }
            next_ground += share;
        }
        let delta: f64 = next.iter().zip(&s).map(|(a, b)| (a - b).abs()).sum::<f64>() + (next_ground - ground).abs();
        std::mem::swap(&mut s, &mut next);
        ground = next_ground;
        iters += 1;
        if delta < LEADERRANK_TOL || iters >= LEADERRANK_MAX_ITERS {
            break;
        }
    }
    log::debug!("leaderrank: {n} nodes, {iters} iterations");
    let share = ground / n as f64;
    Ok(s.into_iter().map(|x| x + share).collect())
}
