use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Gamma, Poisson};
use repostlab_core::{Corpus, Metrics, PostType, RawPost, UserRecord};

use crate::cascade::Cascades;
use crate::config::WorldConfig;
use crate::error::{Result, SynthError};
use crate::vocab::{build_vocabularies, FUNCTION_WORDS, NEGATIVE_WORDS, POSITIVE_WORDS};

const DAY: f64 = 86_400.0;
const HISTORY_SHARE_RATE: f64 = 0.35;
const MENTION_RATE: f64 = 0.2;
const RECIPROCITY: f64 = 0.2;

pub fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Independent generator per named phase so phases can change without
/// perturbing one another.
pub(crate) fn stream(seed: u64, phase: &str, index: u64) -> ChaCha8Rng {
    let mut h: u64 = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in phase.bytes().chain(index.to_le_bytes()) {
        h = (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3).rotate_left(23);
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// A generated world before cascades: user records, latent traits and the
/// original posts that cascades start from.
#[derive(Debug, Clone)]
pub struct World {
    pub config: WorldConfig,
    pub hashtags: Vec<String>,
    pub vocabularies: Vec<Vec<String>>,
    pub users: Vec<UserRecord>,
    /// Activity trait in (0, 1).
    pub activity: Vec<f64>,
    /// Per-user interest over hashtags; each row sums to 1.
    pub interest: Vec<Vec<f64>>,
    /// `followers[v]` lists the users following v, ascending.
    pub followers: Vec<Vec<usize>>,
    /// `interacted[u]` holds users whose posts u shared or whom u mentioned in its history.
    pub interacted: Vec<HashSet<usize>>,
    /// Original posts of the batch, sorted by creation time.
    pub posts: Vec<RawPost>,
    pub post_author: Vec<usize>,
    pub post_hashtag: Vec<usize>,
    pub post_valence: Vec<i8>,
}

pub fn user_id(u: usize) -> String {
    format!("u{u:05}")
}

struct TextGen<'a> {
    vocab: &'a [String],
    tag: &'a str,
}

impl TextGen<'_> {
    fn compose(&self, rng: &mut ChaCha8Rng, valence: i8) -> String {
        let n = rng.random_range(8..17);
        let mut words: Vec<&str> = Vec::with_capacity(n + 2);
        for _ in 0..n {
            let r: f64 = rng.random();
            if r < 0.55 {
                // Skewed towards the head of the vocabulary.
                let u: f64 = rng.random();
                words.push(&self.vocab[((u * u) * self.vocab.len() as f64) as usize]);
            } else {
                words.push(FUNCTION_WORDS[rng.random_range(0..FUNCTION_WORDS.len())]);
            }
        }
        let sentiment: &[&str] = match valence {
            1 => &POSITIVE_WORDS,
            -1 => &NEGATIVE_WORDS,
            _ => &[],
        };
        if !sentiment.is_empty() {
            for _ in 0..rng.random_range(1..3) {
                let at = rng.random_range(0..=words.len());
                words.insert(at, sentiment[rng.random_range(0..sentiment.len())]);
            }
        }
        let split = (words.len() / 2).max(1);
        let mut text = String::new();
        for (i, w) in words.iter().enumerate() {
            if i == 0 || i == split {
                if i > 0 {
                    text.push_str(". ");
                }
                let mut c = w.chars();
                if let Some(first) = c.next() {
                    text.extend(first.to_uppercase());
                    text.push_str(c.as_str());
                }
            } else {
                text.push(' ');
                text.push_str(w);
            }
        }
        text.push_str(". #");
        text.push_str(self.tag);
        text
    }
}

fn sample_valence(rng: &mut ChaCha8Rng) -> i8 {
    match rng.random_range(0..4) {
        0 => -1,
        1 => 1,
        _ => 0,
    }
}

/// Directed preferential attachment: user i follows `m` earlier users chosen
/// with probability proportional to follower count + 1; each new edge is
/// reciprocated with a small probability.
fn follow_graph(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut following: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut urn: Vec<usize> = Vec::new();
    for i in 0..n {
        let k = m.min(i);
        let mut chosen = HashSet::new();
        while chosen.len() < k {
            let j = urn[rng.random_range(0..urn.len())];
            chosen.insert(j);
        }
        let mut chosen: Vec<usize> = chosen.into_iter().collect();
        chosen.sort_unstable();
        for &j in &chosen {
            following[i].push(j);
            urn.push(j);
            if rng.random_bool(RECIPROCITY) {
                following[j].push(i);
                urn.push(i);
            }
        }
        urn.push(i);
    }
    for f in &mut following {
        f.sort_unstable();
        f.dedup();
    }
    following
}

pub fn generate_world(cfg: &WorldConfig) -> Result<World> {
    cfg.validate()?;
    let n = cfg.n_users;
    let hashtags = cfg.hashtag_names();
    let vocabularies = build_vocabularies(cfg, &mut stream(cfg.seed, "vocab", 0));

    let mut rng = stream(cfg.seed, "traits", 0);
    let beta = Beta::<f64>::new(1.5, 3.0).expect("valid beta");
    let gamma = Gamma::new(cfg.interest_concentration, 1.0).map_err(|e| SynthError::Config(e.to_string()))?;
    let activity: Vec<f64> = (0..n).map(|_| beta.sample(&mut rng).clamp(1e-3, 1.0 - 1e-3)).collect();
    let interest: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..cfg.n_hashtags).map(|_| gamma.sample(&mut rng).max(1e-12)).collect();
            let s: f64 = raw.iter().sum();
            raw.iter().map(|x| x / s).collect()
        })
        .collect();

    let following = follow_graph(n, cfg.attachment, &mut stream(cfg.seed, "graph", 0));
    let mut followers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, fs) in following.iter().enumerate() {
        for &v in fs {
            followers[v].push(u);
        }
    }

    // Histories, generated in global time order so shares point to earlier posts.
    let mut rng = stream(cfg.seed, "history", 0);
    let h_start = cfg.start_time - (cfg.history_days * DAY) as i64;
    let a_max = activity.iter().cloned().fold(0.0, f64::max);
    let mut slots: Vec<(i64, usize)> = Vec::new();
    for (u, &a) in activity.iter().enumerate() {
        if cfg.history_length == 0 {
            continue;
        }
        let count = ((cfg.history_length as f64) * (0.25 + 0.75 * a / a_max)).round().clamp(1.0, cfg.history_length as f64) as usize;
        for _ in 0..count {
            slots.push((rng.random_range(h_start..cfg.start_time), u));
        }
    }
    slots.sort_unstable();
    let mut histories: Vec<Vec<RawPost>> = vec![Vec::new(); n];
    let mut originals_of: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut interacted: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    let interest_idx: Vec<WeightedIndex<f64>> = interest.iter().map(|w| WeightedIndex::new(w).expect("positive interests")).collect();
    for &(t, u) in &slots {
        let k = histories[u].len();
        let post_id = format!("h{u:05}x{k:02}");
        let sources: Vec<usize> = following[u]
            .iter()
            .copied()
            .filter(|&f| originals_of[f].iter().any(|&(fu, fk)| histories[fu][fk].created_at < t))
            .collect();
        let post = if !sources.is_empty() && rng.random_bool(HISTORY_SHARE_RATE) {
            let f = sources[rng.random_range(0..sources.len())];
            let eligible: Vec<(usize, usize)> = originals_of[f].iter().copied().filter(|&(fu, fk)| histories[fu][fk].created_at < t).collect();
            let (pu, pk) = eligible[eligible.len() - 1 - rng.random_range(0..eligible.len().min(5))];
            let parent = &mut histories[pu][pk];
            let kind = match rng.random_range(0..10) {
                0..7 => PostType::Repost,
                7..9 => PostType::Quote,
                _ => PostType::Reply,
            };
            match kind {
                PostType::Repost => parent.metrics.reposts += 1,
                PostType::Quote => parent.metrics.quotes += 1,
                _ => parent.metrics.replies += 1,
            }
            let hashtags = parent.hashtags.clone();
            let text = match kind {
                PostType::Repost => parent.text.clone(),
                _ => format!("{} {}", FUNCTION_WORDS[rng.random_range(0..FUNCTION_WORDS.len())], parent.text),
            };
            let parent_id = parent.post_id.clone();
            interacted[u].insert(f);
            RawPost {
                post_id,
                author_id: user_id(u),
                created_at: t,
                text,
                hashtags,
                post_type: kind,
                parent_id: Some(parent_id),
                metrics: Metrics::default(),
                mentions: vec![user_id(f)],
            }
        } else {
            let h = interest_idx[u].sample(&mut rng);
            let valence = sample_valence(&mut rng);
            let gen = TextGen {
                vocab: &vocabularies[h],
                tag: &hashtags[h],
            };
            let mut mentions = Vec::new();
            if !following[u].is_empty() && rng.random_bool(MENTION_RATE) {
                let f = following[u][rng.random_range(0..following[u].len())];
                mentions.push(user_id(f));
                interacted[u].insert(f);
            }
            originals_of[u].push((u, k));
            RawPost {
                post_id,
                author_id: user_id(u),
                created_at: t,
                text: gen.compose(&mut rng, valence),
                hashtags: vec![hashtags[h].clone()],
                post_type: PostType::Original,
                parent_id: None,
                metrics: Metrics::default(),
                mentions,
            }
        };
        histories[u].push(post);
    }
    for (u, hist) in histories.iter_mut().enumerate() {
        for p in hist.iter_mut() {
            let shares = (p.metrics.reposts + p.metrics.quotes) as f64;
            p.metrics.likes = poisson(&mut rng, 0.05 * followers[u].len() as f64 + 2.0 * shares);
        }
    }

    // The post batch: authors weighted by a power of activity and by interest in the hashtag.
    let mut rng = stream(cfg.seed, "posts", 0);
    let span = (cfg.span_days * DAY) as i64;
    let mut drafts: Vec<(i64, usize, usize, usize, i8)> = Vec::new();
    for h in 0..cfg.n_hashtags {
        let weights: Vec<f64> = (0..n).map(|u| activity[u].powf(cfg.author_exponent) * interest[u][h]).collect();
        let pick = WeightedIndex::new(&weights).expect("positive weights");
        for k in 0..cfg.posts_per_hashtag {
            let t = cfg.start_time + rng.random_range(0..span.max(1));
            drafts.push((t, h, k, pick.sample(&mut rng), sample_valence(&mut rng)));
        }
    }
    drafts.sort_unstable();
    let mut posts = Vec::with_capacity(drafts.len());
    let (mut post_author, mut post_hashtag, mut post_valence) = (Vec::new(), Vec::new(), Vec::new());
    for (i, &(t, h, _, author, valence)) in drafts.iter().enumerate() {
        let gen = TextGen {
            vocab: &vocabularies[h],
            tag: &hashtags[h],
        };
        let mut mentions = Vec::new();
        if !following[author].is_empty() && rng.random_bool(MENTION_RATE / 2.0) {
            mentions.push(user_id(following[author][rng.random_range(0..following[author].len())]));
        }
        posts.push(RawPost {
            post_id: format!("p{i:06}"),
            author_id: user_id(author),
            created_at: t,
            text: gen.compose(&mut rng, valence),
            hashtags: vec![hashtags[h].clone()],
            post_type: PostType::Original,
            parent_id: None,
            metrics: Metrics::default(),
            mentions,
        });
        post_author.push(author);
        post_hashtag.push(h);
        post_valence.push(valence);
    }

    let mut rng = stream(cfg.seed, "profiles", 0);
    let mut by_followers: Vec<usize> = followers.iter().map(Vec::len).collect();
    by_followers.sort_unstable();
    let verified_cut = by_followers[(n * 99) / 100].max(1);
    let users = (0..n)
        .map(|u| {
            let registered_days = rng.random_range((cfg.history_days + 30.0)..(cfg.history_days + 3000.0));
            UserRecord {
                user_id: user_id(u),
                registered_at: cfg.start_time - (registered_days * DAY) as i64,
                follower_count: followers[u].len() as u64,
                followee_count: following[u].len() as u64,
                total_post_count: histories[u].len() as u64 + poisson(&mut rng, 400.0 * activity[u]),
                listed_count: poisson(&mut rng, followers[u].len() as f64 / 20.0),
                verified: followers[u].len() >= verified_cut,
                profile_url_present: rng.random_bool(0.6),
                following: following[u].iter().map(|&v| user_id(v)).collect(),
                history: std::mem::take(&mut histories[u]),
            }
        })
        .collect();

    Ok(World {
        config: cfg.clone(),
        hashtags,
        vocabularies,
        users,
        activity,
        interest,
        followers,
        interacted,
        posts,
        post_author,
        post_hashtag,
        post_valence,
    })
}

fn poisson(rng: &mut ChaCha8Rng, lambda: f64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).expect("positive rate").sample(rng) as u64
}

impl World {
    pub fn follows(&self, u: usize, v: usize) -> bool {
        self.followers[v].binary_search(&u).is_ok()
    }

    /// posts.jsonl records: originals with their cascade counts, then every
    /// repost, all sorted by (created_at, post_id).
    pub fn corpus_records(&self, cascades: &Cascades) -> (Vec<RawPost>, Vec<UserRecord>) {
        let mut originals = self.posts.clone();
        for e in &cascades.reposts {
            let i = e.parent;
            match e.post.post_type {
                PostType::Repost => originals[i].metrics.reposts += 1,
                PostType::Quote => originals[i].metrics.quotes += 1,
                PostType::Reply => originals[i].metrics.replies += 1,
                PostType::Original => {}
            }
        }
        let mut rng = stream(self.config.seed, "likes", 0);
        for (i, p) in originals.iter_mut().enumerate() {
            let shares = (p.metrics.reposts + p.metrics.quotes) as f64;
            p.metrics.likes = poisson(&mut rng, 0.05 * self.followers[self.post_author[i]].len() as f64 + 2.0 * shares);
        }
        let mut posts: Vec<RawPost> = originals.into_iter().chain(cascades.reposts.iter().map(|e| e.post.clone())).collect();
        posts.sort_by(|a, b| (a.created_at, &a.post_id).cmp(&(b.created_at, &b.post_id)));
        (posts, self.users.clone())
    }

    pub fn corpus(&self, cascades: &Cascades) -> Result<Corpus> {
        let (posts, users) = self.corpus_records(cascades);
        Ok(Corpus::from_parts(posts, users)?.0)
    }

    /// Writes `posts.jsonl` and `users.jsonl` into `dir`.
    pub fn write_corpus(&self, cascades: &Cascades, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let corpus = self.corpus(cascades)?;
        let (posts, users) = (dir.join("posts.jsonl"), dir.join("users.jsonl"));
        corpus.write_posts(&posts)?;
        corpus.write_users(&users)?;
        Ok((posts, users))
    }
}
