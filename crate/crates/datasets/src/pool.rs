use std::collections::{HashMap, HashSet};

use repostlab_core::{Corpus, RawPost, RepostEvent, REPOST_WINDOW_SECS};

/// Time-sorted original posts per hashtag plus every user's reposted-post set.
pub struct NegativeIndex<'a> {
    corpus: &'a Corpus,
    by_hashtag: HashMap<&'a str, Vec<usize>>,
    originals: Vec<usize>,
    reposted: HashMap<&'a str, HashSet<&'a str>>,
}

fn time_key(corpus: &Corpus, i: usize) -> (i64, &str) {
    let p = &corpus.posts()[i];
    (p.created_at, p.post_id.as_str())
}

impl<'a> NegativeIndex<'a> {
    pub fn new(corpus: &'a Corpus) -> Self {
        let mut by_hashtag: HashMap<&str, Vec<usize>> = HashMap::new();
        let mut originals = Vec::new();
        for (i, p) in corpus.posts().iter().enumerate() {
            if p.is_share() {
                continue;
            }
            originals.push(i);
            let mut tags: Vec<&str> = p.hashtags.iter().map(String::as_str).collect();
            tags.sort_unstable();
            tags.dedup();
            for h in tags {
                by_hashtag.entry(h).or_default().push(i);
            }
        }
        originals.sort_by(|&a, &b| time_key(corpus, a).cmp(&time_key(corpus, b)));
        for list in by_hashtag.values_mut() {
            list.sort_by(|&a, &b| time_key(corpus, a).cmp(&time_key(corpus, b)));
        }
        let mut reposted: HashMap<&str, HashSet<&str>> = HashMap::new();
        let shares = corpus.posts().iter().chain(corpus.users().iter().flat_map(|u| u.history.iter()));
        for p in shares {
            if let Some(parent) = p.parent_id.as_deref() {
                reposted.entry(p.author_id.as_str()).or_default().insert(parent);
            }
        }
        NegativeIndex {
            corpus,
            by_hashtag,
            originals,
            reposted,
        }
    }

    pub fn corpus(&self) -> &'a Corpus {
        self.corpus
    }

    pub fn has_reposted(&self, user: &str, post_id: &str) -> bool {
        self.reposted.get(user).is_some_and(|s| s.contains(post_id))
    }

    /// Whether `post` may serve as a negative for `recipient`.
    pub fn eligible(&self, post: &RawPost, recipient: &str, original_id: &str) -> bool {
        post.post_id != original_id && post.author_id != recipient && !self.has_reposted(recipient, &post.post_id)
    }

    /// Same-hashtag originals created in `[repost_time − 24h, repost_time)` that the
    /// recipient neither wrote nor reposted, excluding the positive's own original.
    pub fn negative_pool(&self, event: &RepostEvent) -> Vec<&'a RawPost> {
        let Some(list) = self.by_hashtag.get(event.hashtag.as_str()) else {
            return Vec::new();
        };
        let posts = self.corpus.posts();
        let lo = event.repost_time - REPOST_WINDOW_SECS;
        let start = list.partition_point(|&i| posts[i].created_at < lo);
        list[start..]
            .iter()
            .map(|&i| &posts[i])
            .take_while(|p| p.created_at < event.repost_time)
            .filter(|p| self.eligible(p, &event.recipient_id, &event.original_id))
            .collect()
    }

    /// Corpus originals created strictly before `t`, in time order.
    pub fn originals_before(&self, t: i64) -> &[usize] {
        let posts = self.corpus.posts();
        let end = self.originals.partition_point(|&i| posts[i].created_at < t);
        &self.originals[..end]
    }
}
