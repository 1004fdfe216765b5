use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Provenance type of a post. Quotes and replies are treated as reposts for labeling
/// (see [`PostType::is_share`]) but keep their original type for activity percentages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PostType {
    Original,
    Repost,
    Quote,
    Reply,
}

impl PostType {
    pub const ALL: [PostType; 4] = [
        PostType::Original,
        PostType::Repost,
        PostType::Quote,
        PostType::Reply,
    ];

    /// True for every action that puts the parent on the actor's followers' timelines.
    pub fn is_share(self) -> bool {
        !matches!(self, PostType::Original)
    }

    pub fn index(self) -> usize {
        match self {
            PostType::Original => 0,
            PostType::Repost => 1,
            PostType::Quote => 2,
            PostType::Reply => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub reposts: u64,
    pub quotes: u64,
    pub replies: u64,
    pub likes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawPost {
    pub post_id: String,
    pub author_id: String,
    pub created_at: i64,
    pub text: String,
    pub hashtags: Vec<String>,
    pub post_type: PostType,
    pub parent_id: Option<String>,
    pub metrics: Metrics,
    pub mentions: Vec<String>,
}

impl RawPost {
    pub fn validate(&self) -> Result<()> {
        let fail = |message: &str| {
            Err(CoreError::Invariant {
                id: self.post_id.clone(),
                message: message.to_string(),
            })
        };
        if self.post_id.is_empty() {
            return fail("empty post_id");
        }
        if self.created_at <= 0 {
            return fail("created_at must be positive");
        }
        match (self.post_type, &self.parent_id) {
            (PostType::Original, Some(_)) => return fail("original post carries a parent_id"),
            (t, None) if t.is_share() => return fail("non-original post without parent_id"),
            _ => {}
        }
        if self.hashtags.iter().any(|h| h.chars().any(char::is_uppercase)) {
            return fail("hashtags must be lowercase");
        }
        Ok(())
    }

    pub fn is_share(&self) -> bool {
        self.post_type.is_share()
    }

    pub fn has_hashtag(&self, tag: &str) -> bool {
        self.hashtags.iter().any(|h| h == tag)
    }
}
