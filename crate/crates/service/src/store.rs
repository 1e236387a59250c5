//! One JSON file per session under a data directory.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use dataedron_arxiv::ArxivEntry;
use dataedron_core::{Corpus, QueryHistory, SearchResult};
use serde::{Deserialize, Serialize};

use crate::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub w: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    /// Unix milliseconds.
    pub created: u64,
    pub updated: u64,
    pub params: Params,
    pub rho: String,
    /// Canonical form of the latest query.
    pub query: String,
    pub search: SearchResult,
    pub corpus: Corpus,
    pub entries: Vec<ArxivEntry>,
    pub history: QueryHistory,
}

pub(crate) fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 128 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

pub struct SessionStore {
    dir: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl SessionStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| ServiceError::Storage(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir,
            locks: Mutex::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    pub fn exists(&self, id: &str) -> bool {
        valid_id(id) && self.path(id).is_file()
    }

    pub fn load(&self, id: &str) -> Result<Session, ServiceError> {
        if !self.exists(id) {
            return Err(ServiceError::UnknownSession(id.to_owned()));
        }
        let path = self.path(id);
        let bytes = fs::read(&path).map_err(|e| ServiceError::Storage(format!("{}: {e}", path.display())))?;
        serde_json::from_slice(&bytes).map_err(|e| ServiceError::Storage(format!("{}: {e}", path.display())))
    }

    /// Writes through a temporary file and a rename, so readers never see a
    /// partial session.
    pub fn save(&self, session: &Session) -> Result<(), ServiceError> {
        if !valid_id(&session.id) {
            return Err(ServiceError::Storage(format!("invalid session id `{}`", session.id)));
        }
        let path = self.path(&session.id);
        let tmp = self.dir.join(format!(".{}.json.tmp", session.id));
        let json = serde_json::to_vec_pretty(session).map_err(|e| ServiceError::Storage(e.to_string()))?;
        let io = |e: std::io::Error| ServiceError::Storage(format!("{}: {e}", path.display()));
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(&json).map_err(io)?;
        f.sync_all().map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)?;
        Ok(())
    }

    pub fn ids(&self) -> Result<Vec<String>, ServiceError> {
        let rd = fs::read_dir(&self.dir).map_err(|e| ServiceError::Storage(e.to_string()))?;
        let mut ids: Vec<String> = rd
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().to_str()?.strip_suffix(".json").map(str::to_owned))
            .filter(|id| valid_id(id))
            .collect();
        ids.sort();
        Ok(ids)
    }

    fn lock_for(&self, id: &str) -> Arc<Mutex<()>> {
        self.locks
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .entry(id.to_owned())
            .or_default()
            .clone()
    }

    /// Runs `f` while holding the write lock of `id`.
    pub fn with_lock<T>(&self, id: &str, f: impl FnOnce() -> T) -> T {
        let lock = self.lock_for(id);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        f()
    }

    /// Runs `f` holding the locks of both sessions, always taken in id order.
    pub fn with_locks<T>(&self, a: &str, b: &str, f: impl FnOnce() -> T) -> T {
        if a == b {
            return self.with_lock(a, f);
        }
        let (first, second) = if a < b { (a, b) } else { (b, a) };
        let l1 = self.lock_for(first);
        let l2 = self.lock_for(second);
        let _g1 = l1.lock().unwrap_or_else(|e| e.into_inner());
        let _g2 = l2.lock().unwrap_or_else(|e| e.into_inner());
        f()
    }
}
