//! Loading, cross-linking and writing the two JSONL corpus files.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::post::RawPost;
use crate::user::UserRecord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadWarning {
    DanglingParent { post_id: String, parent_id: String },
    DanglingAuthor { post_id: String, author_id: String },
}

impl std::fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadWarning::DanglingParent { post_id, parent_id } => {
                write!(f, "post `{post_id}` references missing parent `{parent_id}`")
            }
            LoadWarning::DanglingAuthor { post_id, author_id } => {
                write!(f, "post `{post_id}` is authored by unknown user `{author_id}`")
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub warnings: Vec<LoadWarning>,
}

impl LoadReport {
    pub fn dangling_parents(&self) -> usize {
        self.warnings
            .iter()
            .filter(|w| matches!(w, LoadWarning::DanglingParent { .. }))
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PostLoc {
    Main(usize),
    History { user: usize, pos: usize },
}

/// Posts and users, indexed by id. Posts from `posts.jsonl` are the candidates for
/// repost events; historical posts embedded in user records are indexed too so that
/// parent references into histories resolve.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    posts: Vec<RawPost>,
    users: Vec<UserRecord>,
    post_index: HashMap<String, usize>,
    user_index: HashMap<String, usize>,
    any_index: HashMap<String, PostLoc>,
}

impl Corpus {
    /// Builds a corpus from in-memory records, applying the same checks as [`load_corpus`].
    pub fn from_parts(posts: Vec<RawPost>, users: Vec<UserRecord>) -> Result<(Corpus, LoadReport)> {
        Self::assemble(posts, users, Path::new("<posts>"), Path::new("<users>"))
    }

    fn assemble(
        posts: Vec<RawPost>,
        users: Vec<UserRecord>,
        posts_path: &Path,
        users_path: &Path,
    ) -> Result<(Corpus, LoadReport)> {
        let mut post_index = HashMap::with_capacity(posts.len());
        for (i, p) in posts.iter().enumerate() {
            p.validate()?;
            if post_index.insert(p.post_id.clone(), i).is_some() {
                return Err(CoreError::DuplicateId {
                    path: posts_path.to_path_buf(),
                    id: p.post_id.clone(),
                });
            }
        }
        let mut user_index = HashMap::with_capacity(users.len());
        for (i, u) in users.iter().enumerate() {
            u.validate()?;
            if user_index.insert(u.user_id.clone(), i).is_some() {
                return Err(CoreError::DuplicateId {
                    path: users_path.to_path_buf(),
                    id: u.user_id.clone(),
                });
            }
        }

        let mut any_index: HashMap<String, PostLoc> = post_index
            .iter()
            .map(|(k, &v)| (k.clone(), PostLoc::Main(v)))
            .collect();
        for (ui, u) in users.iter().enumerate() {
            for (pos, p) in u.history.iter().enumerate() {
                any_index
                    .entry(p.post_id.clone())
                    .or_insert(PostLoc::History { user: ui, pos });
            }
        }

        let mut report = LoadReport::default();
        let all_posts = posts.iter().chain(users.iter().flat_map(|u| u.history.iter()));
        let mut seen = BTreeSet::new();
        for p in all_posts {
            if !seen.insert(p.post_id.as_str()) {
                continue;
            }
            if let Some(parent) = &p.parent_id {
                if !any_index.contains_key(parent) {
                    report.warnings.push(LoadWarning::DanglingParent {
                        post_id: p.post_id.clone(),
                        parent_id: parent.clone(),
                    });
                }
            }
            if !user_index.contains_key(&p.author_id) {
                report.warnings.push(LoadWarning::DanglingAuthor {
                    post_id: p.post_id.clone(),
                    author_id: p.author_id.clone(),
                });
            }
        }
        for w in &report.warnings {
            log::warn!("{w}");
        }

        Ok((
            Corpus {
                posts,
                users,
                post_index,
                user_index,
                any_index,
            },
            report,
        ))
    }

    pub fn posts(&self) -> &[RawPost] {
        &self.posts
    }

    pub fn users(&self) -> &[UserRecord] {
        &self.users
    }

    /// Looks up a post from `posts.jsonl`.
    pub fn post(&self, id: &str) -> Option<&RawPost> {
        self.post_index.get(id).map(|&i| &self.posts[i])
    }

    /// Looks up a post anywhere, including user histories.
    pub fn any_post(&self, id: &str) -> Option<&RawPost> {
        self.any_index.get(id).map(|loc| match *loc {
            PostLoc::Main(i) => &self.posts[i],
            PostLoc::History { user, pos } => &self.users[user].history[pos],
        })
    }

    pub fn user(&self, id: &str) -> Option<&UserRecord> {
        self.user_index.get(id).map(|&i| &self.users[i])
    }

    pub fn user_position(&self, id: &str) -> Option<usize> {
        self.user_index.get(id).copied()
    }

    /// Sorted set of every hashtag carried by a post in `posts.jsonl`.
    pub fn hashtags(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .posts
            .iter()
            .flat_map(|p| p.hashtags.iter().map(String::as_str))
            .collect();
        set.into_iter().map(String::from).collect()
    }

    /// Latest timestamp anywhere in the corpus; used as the default reference date.
    pub fn max_timestamp(&self) -> i64 {
        let main = self.posts.iter().map(|p| p.created_at);
        let hist = self.users.iter().flat_map(|u| u.history.iter().map(|p| p.created_at));
        let reg = self.users.iter().map(|u| u.registered_at);
        main.chain(hist).chain(reg).max().unwrap_or(0)
    }

    pub fn write_posts(&self, path: &Path) -> Result<()> {
        write_jsonl(path, &self.posts)
    }

    pub fn write_users(&self, path: &Path) -> Result<()> {
        write_jsonl(path, &self.users)
    }
}

/// Reads and cross-links `posts.jsonl` and `users.jsonl`.
///
/// Malformed lines fail with their line number, duplicate ids fail naming the id, and
/// unresolved parent or author references are collected as warnings in the report.
pub fn load_corpus(posts_path: &Path, users_path: &Path) -> Result<(Corpus, LoadReport)> {
    let posts: Vec<RawPost> = read_jsonl(posts_path)?;
    let users: Vec<UserRecord> = read_jsonl(users_path)?;
    Corpus::assemble(posts, users, posts_path, users_path)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| CoreError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CoreError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| CoreError::Malformed {
            path: PathBuf::from(path),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| CoreError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| CoreError::io(path, e))?;
    }
    w.flush().map_err(|e| CoreError::io(path, e))
}
