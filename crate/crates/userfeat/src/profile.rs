use repostlab_core::{UserRecord, SECS_PER_DAY};

use crate::graph::FollowGraph;

/// Corpus-level context shared by every profile vector.
#[derive(Debug, Clone, Copy)]
pub struct ProfileContext<'a> {
    pub graph: &'a FollowGraph,
    pub leaderrank: &'a [f64],
    /// Indegree by graph node.
    pub indegree: &'a [usize],
    pub reference_date: i64,
    pub max_post_count: u64,
}

/// 15 values in U-P block order: 12 profile values, then LeaderRank, Indegree and
/// whether `user` follows `counterpart`.
pub fn profile_features(user: &UserRecord, counterpart: &str, ctx: &ProfileContext<'_>) -> [f64; 15] {
    let age_secs = ctx.reference_date - user.registered_at;
    if age_secs < 0 {
        log::warn!("user {} registered after the reference date; account age clamped to 0", user.user_id);
    }
    let age = age_secs.max(0) as f64 / SECS_PER_DAY;
    let per_day = |x: u64| if age > 0.0 { x as f64 / age } else { 0.0 };
    let spread = if ctx.max_post_count > 0 {
        user.total_post_count as f64 / ctx.max_post_count as f64
    } else {
        0.0
    };
    let node = ctx.graph.node(&user.user_id);
    let (lr, indegree) = match node {
        Some(i) => (ctx.leaderrank[i], ctx.indegree[i] as f64),
        None => (f64::NAN, f64::NAN),
    };
    let follows = ctx.graph.follows(&user.user_id, counterpart) || user.follows(counterpart);
    [
        age,
        user.follower_count as f64,
        user.followee_count as f64,
        user.total_post_count as f64,
        user.listed_count as f64,
        spread,
        per_day(user.follower_count),
        per_day(user.followee_count),
        per_day(user.total_post_count),
        per_day(user.listed_count),
        f64::from(u8::from(user.verified)),
        f64::from(u8::from(user.profile_url_present)),
        lr,
        indegree,
        f64::from(u8::from(follows)),
    ]
}
