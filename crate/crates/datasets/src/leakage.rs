use std::collections::HashSet;

use repostlab_core::Instance;

/// Drops training instances whose (sender, recipient) pair also occurs in `test`.
/// Returns the kept instances in input order and the number removed.
pub fn leakage_filter<'a>(train: Vec<&'a Instance>, test: &[&Instance]) -> (Vec<&'a Instance>, usize) {
    let pairs: HashSet<(&str, &str)> = test.iter().map(|i| i.pair()).collect();
    let before = train.len();
    let kept: Vec<&Instance> = train.into_iter().filter(|i| !pairs.contains(&i.pair())).collect();
    let removed = before - kept.len();
    if kept.is_empty() && before > 0 {
        log::warn!("leakage filtering removed every one of {before} training instances");
    }
    (kept, removed)
}
