#![allow(dead_code)]

use repostlab_core::{Corpus, Instance, Metrics, PostType, RawPost, UserRecord};

pub const T0: i64 = 1_600_000_000;

pub fn original(id: &str, author: &str, t: i64, tag: &str) -> RawPost {
    RawPost {
        post_id: id.into(),
        author_id: author.into(),
        created_at: t,
        text: format!("text of {id}"),
        hashtags: vec![tag.into()],
        post_type: PostType::Original,
        parent_id: None,
        metrics: Metrics::default(),
        mentions: vec![],
    }
}

pub fn share(id: &str, author: &str, t: i64, parent: &str) -> RawPost {
    RawPost {
        post_id: id.into(),
        author_id: author.into(),
        created_at: t,
        text: String::new(),
        hashtags: vec![],
        post_type: PostType::Repost,
        parent_id: Some(parent.into()),
        metrics: Metrics::default(),
        mentions: vec![],
    }
}

pub fn user(id: &str) -> UserRecord {
    UserRecord {
        user_id: id.into(),
        registered_at: T0 - 1_000_000,
        follower_count: 0,
        followee_count: 0,
        total_post_count: 0,
        listed_count: 0,
        verified: false,
        profile_url_present: false,
        following: vec![],
        history: vec![],
    }
}

pub fn corpus(posts: Vec<RawPost>) -> Corpus {
    let mut ids: Vec<String> = posts.iter().map(|p| p.author_id.clone()).collect();
    ids.sort();
    ids.dedup();
    let users = ids.iter().map(|u| user(u)).collect();
    Corpus::from_parts(posts, users).unwrap().0
}

/// `tags` hashtags, each with 3·`per_tag` originals five minutes apart and
/// `per_tag` shares by distinct recipients one hour after their parent.
pub fn world(tags: usize, per_tag: usize) -> Corpus {
    let mut posts = Vec::new();
    for h in 0..tags {
        let tag = format!("tag{h}");
        for i in 0..3 * per_tag {
            posts.push(original(&format!("o{h}_{i:04}"), &format!("a{}", i % 20), T0 + 300 * i as i64 + h as i64, &tag));
        }
        for k in 0..per_tag {
            let parent = format!("o{h}_{:04}", k + per_tag);
            let t = T0 + 300 * (k + per_tag) as i64 + h as i64 + 3600;
            posts.push(share(&format!("s{h}_{k:04}"), &format!("r{}", (k + h * 7) % (per_tag + 3)), t, &parent));
        }
    }
    corpus(posts)
}

/// Deterministic stand-in for ranking vectors: a function of the post id digits.
pub fn toy_features(i: &Instance) -> Result<Vec<f64>, String> {
    let n: u64 = i.post_id.bytes().filter(u8::is_ascii_digit).fold(0, |a, b| a * 10 + u64::from(b - b'0'));
    Ok(vec![(n % 7) as f64 + 1.0, (n % 11) as f64, 1.0])
}
