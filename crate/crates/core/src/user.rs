use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::post::RawPost;

/// Upper bound on the number of historical posts kept per user.
pub const MAX_HISTORY: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user_id: String,
    pub registered_at: i64,
    pub follower_count: u64,
    pub followee_count: u64,
    pub total_post_count: u64,
    pub listed_count: u64,
    pub verified: bool,
    pub profile_url_present: bool,
    pub following: Vec<String>,
    /// Newest last.
    pub history: Vec<RawPost>,
}

impl UserRecord {
    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| {
            Err(CoreError::Invariant {
                id: self.user_id.clone(),
                message,
            })
        };
        if self.user_id.is_empty() {
            return fail("empty user_id".into());
        }
        if self.history.len() > MAX_HISTORY {
            return fail(format!(
                "history has {} posts, at most {MAX_HISTORY} allowed",
                self.history.len()
            ));
        }
        if self
            .history
            .windows(2)
            .any(|w| w[0].created_at > w[1].created_at)
        {
            return fail("history is not sorted by created_at".into());
        }
        for p in &self.history {
            p.validate()?;
        }
        Ok(())
    }

    pub fn follows(&self, other: &str) -> bool {
        self.following.iter().any(|f| f == other)
    }

    /// History restricted to posts created at or before `t`.
    pub fn history_until(&self, t: i64) -> &[RawPost] {
        let end = self.history.partition_point(|p| p.created_at <= t);
        &self.history[..end]
    }
}
