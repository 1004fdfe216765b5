use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// A repost counts as a positive only when it happens within this many seconds of the original.
pub const REPOST_WINDOW_SECS: i64 = 86_400;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepostEvent {
    pub original_id: String,
    pub sender_id: String,
    pub recipient_id: String,
    pub original_created_at: i64,
    pub repost_time: i64,
    pub hashtag: String,
}

impl RepostEvent {
    pub fn latency_secs(&self) -> i64 {
        self.repost_time - self.original_created_at
    }

    pub fn within_window(&self) -> bool {
        let lat = self.latency_secs();
        lat > 0 && lat <= REPOST_WINDOW_SECS
    }
}

/// One (post, sender, recipient) decision to classify. Records are referenced by id and
/// resolved against the [`Corpus`](crate::Corpus) they were built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub instance_id: String,
    pub post_id: String,
    pub sender_id: String,
    pub recipient_id: String,
    /// Reference timestamp of the recipient (repost time for positives).
    pub event_time: i64,
    pub post_created_at: i64,
    pub hashtag: String,
    pub label: u8,
    /// Index of the positive this instance was built around, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<usize>,
}

impl Instance {
    pub fn pair(&self) -> (&str, &str) {
        (&self.sender_id, &self.recipient_id)
    }

    pub fn is_positive(&self) -> bool {
        self.label == 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.label > 1 {
            return Err(CoreError::Invariant {
                id: self.instance_id.clone(),
                message: format!("label {} is not binary", self.label),
            });
        }
        if self.event_time <= self.post_created_at {
            return Err(CoreError::Invariant {
                id: self.instance_id.clone(),
                message: "event_time must be later than the post's creation".into(),
            });
        }
        Ok(())
    }
}
