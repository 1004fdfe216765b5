use std::collections::HashMap;

use repostlab_core::{Corpus, RepostEvent};
use serde::{Deserialize, Serialize};

/// Why shares did not become positives.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositiveReport {
    pub shares: usize,
    pub missing_parent: usize,
    pub outside_window: usize,
    pub self_shares: usize,
    pub untagged_parent: usize,
    pub duplicates: usize,
    pub positives: usize,
}

/// Shares of posts present in the corpus, made within 24 hours of the parent.
/// One event per (parent, recipient), keeping the earliest share. Sorted by
/// (repost_time, original_id, recipient_id).
pub fn enumerate_positives(corpus: &Corpus) -> (Vec<RepostEvent>, PositiveReport) {
    let mut report = PositiveReport::default();
    let mut best: HashMap<(String, String), RepostEvent> = HashMap::new();
    for share in corpus.posts().iter().filter(|p| p.is_share()) {
        report.shares += 1;
        let Some(parent) = share.parent_id.as_deref().and_then(|id| corpus.post(id)) else {
            report.missing_parent += 1;
            continue;
        };
        if parent.author_id == share.author_id {
            report.self_shares += 1;
            continue;
        }
        let Some(hashtag) = parent.hashtags.first() else {
            report.untagged_parent += 1;
            continue;
        };
        let event = RepostEvent {
            original_id: parent.post_id.clone(),
            sender_id: parent.author_id.clone(),
            recipient_id: share.author_id.clone(),
            original_created_at: parent.created_at,
            repost_time: share.created_at,
            hashtag: hashtag.clone(),
        };
        if !event.within_window() {
            report.outside_window += 1;
            continue;
        }
        let key = (event.original_id.clone(), event.recipient_id.clone());
        match best.get(&key) {
            Some(prev) => {
                report.duplicates += 1;
                if event.repost_time < prev.repost_time {
                    best.insert(key, event);
                }
            }
            None => {
                best.insert(key, event);
            }
        }
    }
    let mut events: Vec<RepostEvent> = best.into_values().collect();
    events.sort_by(|a, b| {
        (a.repost_time, &a.original_id, &a.recipient_id).cmp(&(b.repost_time, &b.original_id, &b.recipient_id))
    });
    report.positives = events.len();
    (events, report)
}
