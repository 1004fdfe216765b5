use std::fs;

use repostlab_core::{load_corpus, CoreError, Corpus, Metrics, PostType, RawPost, UserRecord};

fn post(id: &str, author: &str, t: i64, kind: PostType, parent: Option<&str>) -> RawPost {
    RawPost {
        post_id: id.into(),
        author_id: author.into(),
        created_at: t,
        text: format!("text of {id}"),
        hashtags: vec!["tag".into()],
        post_type: kind,
        parent_id: parent.map(String::from),
        metrics: Metrics { reposts: 1, quotes: 0, replies: 2, likes: 3 },
        mentions: vec![],
    }
}

fn user(id: &str, history: Vec<RawPost>) -> UserRecord {
    UserRecord {
        user_id: id.into(),
        registered_at: 1_000,
        follower_count: 1,
        followee_count: 1,
        total_post_count: history.len() as u64,
        listed_count: 0,
        verified: false,
        profile_url_present: true,
        following: vec![],
        history,
    }
}

fn write_lines<T: serde::Serialize>(path: &std::path::Path, records: &[T]) {
    let body: String = records
        .iter()
        .map(|r| serde_json::to_string(r).unwrap() + "\n")
        .collect();
    fs::write(path, body).unwrap();
}

#[test]
fn minimal_original_and_repost() {
    let dir = tempfile::tempdir().unwrap();
    let (pp, up) = (dir.path().join("posts.jsonl"), dir.path().join("users.jsonl"));
    write_lines(&pp, &[post("p1", "a", 100, PostType::Original, None), post("p2", "b", 200, PostType::Repost, Some("p1"))]);
    write_lines(&up, &[user("a", vec![]), user("b", vec![])]);
    let (corpus, report) = load_corpus(&pp, &up).unwrap();
    assert_eq!(corpus.posts().len(), 2);
    assert!(report.warnings.is_empty(), "{:?}", report.warnings);
    assert_eq!(corpus.post("p2").unwrap().parent_id.as_deref(), Some("p1"));
}

#[test]
fn dangling_parent_is_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let (pp, up) = (dir.path().join("posts.jsonl"), dir.path().join("users.jsonl"));
    write_lines(&pp, &[post("p2", "b", 200, PostType::Repost, Some("missing"))]);
    write_lines(&up, &[user("b", vec![])]);
    let (corpus, report) = load_corpus(&pp, &up).unwrap();
    assert_eq!(corpus.posts().len(), 1);
    assert_eq!(report.dangling_parents(), 1);
    assert_eq!(report.warnings.len(), 1);
}

#[test]
fn history_of_51_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (pp, up) = (dir.path().join("posts.jsonl"), dir.path().join("users.jsonl"));
    write_lines::<RawPost>(&pp, &[]);
    let history: Vec<_> = (0..51)
        .map(|i| post(&format!("h{i}"), "a", 100 + i, PostType::Original, None))
        .collect();
    write_lines(&up, &[user("a", history)]);
    match load_corpus(&pp, &up) {
        Err(CoreError::Invariant { id, message }) => {
            assert_eq!(id, "a");
            assert!(message.contains("51"));
        }
        other => panic!("expected invariant error, got {other:?}"),
    }
}

#[test]
fn malformed_line_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let (pp, up) = (dir.path().join("posts.jsonl"), dir.path().join("users.jsonl"));
    let good = serde_json::to_string(&post("p1", "a", 100, PostType::Original, None)).unwrap();
    fs::write(&pp, format!("{good}\n{{not json\n")).unwrap();
    write_lines(&up, &[user("a", vec![])]);
    match load_corpus(&pp, &up) {
        Err(CoreError::Malformed { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected malformed error, got {other:?}"),
    }
}

#[test]
fn duplicate_id_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let (pp, up) = (dir.path().join("posts.jsonl"), dir.path().join("users.jsonl"));
    write_lines(&pp, &[post("p1", "a", 100, PostType::Original, None), post("p1", "a", 101, PostType::Original, None)]);
    write_lines(&up, &[user("a", vec![])]);
    match load_corpus(&pp, &up) {
        Err(CoreError::DuplicateId { id, .. }) => assert_eq!(id, "p1"),
        other => panic!("expected duplicate error, got {other:?}"),
    }
}

#[test]
fn canonical_files_round_trip_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (pp, up) = (dir.path().join("posts.jsonl"), dir.path().join("users.jsonl"));
    let history = vec![post("h1", "a", 50, PostType::Original, None), post("h2", "a", 60, PostType::Reply, Some("h1"))];
    let (corpus, _) = Corpus::from_parts(
        vec![post("p1", "a", 100, PostType::Original, None), post("p2", "b", 200, PostType::Quote, Some("p1"))],
        vec![user("a", history), user("b", vec![])],
    )
    .unwrap();
    corpus.write_posts(&pp).unwrap();
    corpus.write_users(&up).unwrap();
    let (again, report) = load_corpus(&pp, &up).unwrap();
    assert!(report.warnings.is_empty());
    let (pp2, up2) = (dir.path().join("p2.jsonl"), dir.path().join("u2.jsonl"));
    again.write_posts(&pp2).unwrap();
    again.write_users(&up2).unwrap();
    assert_eq!(fs::read(&pp).unwrap(), fs::read(&pp2).unwrap());
    assert_eq!(fs::read(&up).unwrap(), fs::read(&up2).unwrap());
    assert!(again.any_post("h2").is_some());
}
