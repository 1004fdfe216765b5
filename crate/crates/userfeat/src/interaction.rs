use repostlab_core::{Instance, SECS_PER_DAY};

use crate::history::{HistorySummary, LDA_TOPICS};

/// Cosine similarity; NaN if either vector is zero or contains NaN.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return f64::NAN;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

fn mention_pair(author: &HistorySummary, target: &str) -> (f64, f64) {
    let count = author.mention_posts.get(target).copied().unwrap_or(0) as f64;
    let pct = if author.is_empty() {
        f64::NAN
    } else {
        100.0 * count / author.len() as f64
    };
    (count, pct)
}

/// Topic-oriented relationship vector: LDA weights summed over the posts in
/// either history that mention or share the other user, L1-normalized. All zero
/// when the users never interacted.
pub fn tors(sender: &HistorySummary, recipient: &HistorySummary) -> [f64; LDA_TOPICS] {
    let mut v = [0.0; LDA_TOPICS];
    let rows = sender
        .interaction_posts(&recipient.user_id)
        .into_iter()
        .map(|i| sender.lda_of(i))
        .chain(recipient.interaction_posts(&sender.user_id).into_iter().map(|i| recipient.lda_of(i)));
    for row in rows {
        for (acc, x) in v.iter_mut().zip(row) {
            *acc += x;
        }
    }
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|x| *x /= total);
    }
    v
}

/// 16 values: RS_Mention, RS_MentionPer, SR_Mention, SR_MentionPer,
/// RS_RepostLatency (days), SR_TORS1..10, SR_PathWidth.
pub fn interaction_features(sender: &HistorySummary, recipient: &HistorySummary, instance: &Instance, post_lda: &[f64]) -> [f64; 16] {
    let (rs, rs_pct) = mention_pair(recipient, &sender.user_id);
    let (sr, sr_pct) = mention_pair(sender, &recipient.user_id);
    let latency = (instance.event_time - instance.post_created_at) as f64 / SECS_PER_DAY;
    let t = tors(sender, recipient);
    let path_width = if t.iter().all(|x| *x == 0.0) {
        log::trace!("no interactions between {} and {}: path width set to 1", sender.user_id, recipient.user_id);
        1.0
    } else {
        let sim = cosine_similarity(post_lda, &t);
        if sim.is_nan() {
            1.0
        } else {
            1.0 - sim
        }
    };
    let mut out = [0.0; 16];
    out[..5].copy_from_slice(&[rs, rs_pct, sr, sr_pct, latency]);
    out[5..15].copy_from_slice(&t);
    out[15] = path_width;
    out
}

/// 157 values: sender mean M ∥ recipient mean M ∥ cosine similarity of their mean topic vectors.
pub fn historical_post_features(sender: &HistorySummary, recipient: &HistorySummary) -> Vec<f64> {
    let mut v = Vec::with_capacity(157);
    v.extend_from_slice(&sender.mean_m);
    v.extend_from_slice(&recipient.mean_m);
    v.push(cosine_similarity(&sender.mean_lda, &recipient.mean_lda));
    v
}
