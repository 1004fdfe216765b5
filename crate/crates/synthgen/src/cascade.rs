use rand::Rng;
use repostlab_core::{Metrics, PostType, RawPost, REPOST_WINDOW_SECS};
use serde::{Deserialize, Serialize};

use crate::config::WorldConfig;
use crate::vocab::FUNCTION_WORDS;
use crate::world::{logistic, stream, user_id, World};

/// Shortest delay between a post and a repost of it, in seconds.
const MIN_LATENCY: i64 = 60;

/// One (post, exposed user) pair and the outcome of its draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exposure {
    pub post: usize,
    pub user: usize,
    pub follows: bool,
    pub interacted: bool,
    pub probability: f64,
    pub reposted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Repost {
    /// Index of the parent in `World::posts`.
    pub parent: usize,
    pub post: RawPost,
}

#[derive(Debug, Clone, Default)]
pub struct Cascades {
    pub exposures: Vec<Exposure>,
    pub reposts: Vec<Repost>,
}

impl Cascades {
    pub fn repost_rate(&self) -> f64 {
        if self.exposures.is_empty() {
            return 0.0;
        }
        self.reposts.len() as f64 / self.exposures.len() as f64
    }
}

/// Exposes each original to all followers of its author and to each other
/// user with probability `non_follower_exposure`, then draws reposts. The
/// exposure set and the uniforms drawn per pair do not depend on the weights,
/// so changing a weight moves every pair's outcome in the same direction.
pub fn generate_cascades(world: &World, cfg: &WorldConfig) -> Cascades {
    let w = &cfg.weights;
    let n = world.users.len();
    let mean_activity = world.activity.iter().sum::<f64>() / n as f64;
    let k = world.hashtags.len() as f64;
    let mut out = Cascades::default();
    for (i, post) in world.posts.iter().enumerate() {
        let author = world.post_author[i];
        let h = world.post_hashtag[i];
        let mut rng = stream(cfg.seed, "cascade", i as u64);
        let mut exposed: Vec<(usize, bool)> = world.followers[author].iter().map(|&u| (u, true)).collect();
        for u in 0..n {
            let draw: f64 = rng.random();
            if u != author && draw < cfg.non_follower_exposure && !world.follows(u, author) {
                exposed.push((u, false));
            }
        }
        exposed.sort_unstable();
        for (u, follows) in exposed {
            let (decide, latency, kind): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
            let interacted = world.interacted[u].contains(&author);
            let z = w.base
                + w.alpha_follow * f64::from(u8::from(follows))
                + w.alpha_interact * f64::from(u8::from(interacted))
                + w.alpha_activity * (world.activity[u] - mean_activity)
                + w.beta_topic * (world.interest[u][h] * k - 1.0)
                + w.beta_sentiment * cfg.polarity(h) * f64::from(world.post_valence[i]);
            let probability = logistic(z);
            let reposted = decide < probability;
            out.exposures.push(Exposure {
                post: i,
                user: u,
                follows,
                interacted,
                probability,
                reposted,
            });
            if !reposted {
                continue;
            }
            let delay = MIN_LATENCY + (latency * (REPOST_WINDOW_SECS - MIN_LATENCY) as f64) as i64;
            let post_type = match kind {
                k if k < 0.8 => PostType::Repost,
                k if k < 0.92 => PostType::Quote,
                _ => PostType::Reply,
            };
            let text = match post_type {
                PostType::Repost => post.text.clone(),
                _ => format!("{} {}", FUNCTION_WORDS[(kind * 1000.0) as usize % FUNCTION_WORDS.len()], post.text),
            };
            out.reposts.push(Repost {
                parent: i,
                post: RawPost {
                    post_id: format!("r{i:06}x{u:05}"),
                    author_id: user_id(u),
                    created_at: post.created_at + delay.min(REPOST_WINDOW_SECS - 1),
                    text,
                    hashtags: post.hashtags.clone(),
                    post_type,
                    parent_id: Some(post.post_id.clone()),
                    metrics: Metrics::default(),
                    mentions: vec![post.author_id.clone()],
                },
            });
        }
    }
    out
}
