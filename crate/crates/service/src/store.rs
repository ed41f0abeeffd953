//! Bot registry with file-backed persistence, plus the in-memory session
//! table.
//!
//! Each bot lives in `<data_dir>/bots/<id>/` as three files: `meta.json`,
//! `config.json` (the config document as submitted and patched) and
//! `graph.tsv` (the original upload, byte for byte). Sessions are never
//! written to disk and are lost on restart.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

use crs_core::config::ConfigDocument;
use crs_core::kg::LoadStats;
use crs_core::{BotConfig, BotRuntime, KnowledgeGraph, Session};

use crate::error::ApiError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BotMeta {
    pub id: String,
    pub name: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    pub stats: LoadStats,
}

/// What `GET /bots` and friends return for one bot.
#[derive(Debug, Clone, Serialize)]
pub struct BotView {
    #[serde(flatten)]
    pub meta: BotMeta,
    pub config_document: ConfigDocument,
    pub config: BotConfig,
}

struct Live {
    document: ConfigDocument,
    runtime: BotRuntime,
}

pub struct Bot {
    pub meta: BotMeta,
    live: RwLock<Live>,
}

impl Bot {
    /// The runtime as of now. A turn holds on to this snapshot, so a config
    /// change lands at the next turn boundary.
    pub fn snapshot(&self) -> BotRuntime {
        self.live.read().expect("bot lock poisoned").runtime.clone()
    }

    pub fn view(&self) -> BotView {
        let live = self.live.read().expect("bot lock poisoned");
        BotView {
            meta: self.meta.clone(),
            config_document: live.document.clone(),
            config: (**live.runtime.config()).clone(),
        }
    }

    pub fn graph(&self) -> Arc<KnowledgeGraph> {
        self.snapshot().graph().clone()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionInfo {
    pub id: String,
    pub bot_id: String,
    pub seed: u64,
}

pub struct Store {
    dir: PathBuf,
    bots: RwLock<BTreeMap<String, Arc<Bot>>>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl Store {
    /// Opens `dir`, creating it if needed, and loads every persisted bot.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ApiError> {
        let dir = dir.into();
        let bots_dir = dir.join("bots");
        fs::create_dir_all(&bots_dir)?;
        let mut bots = BTreeMap::new();
        for entry in fs::read_dir(&bots_dir)? {
            let path = entry?.path();
            if !path.is_dir() {
                continue;
            }
            match load_bot(&path) {
                Ok(bot) => {
                    bots.insert(bot.meta.id.clone(), Arc::new(bot));
                }
                Err(e) => tracing::warn!(path = %path.display(), error = ?e, "skipping unreadable bot"),
            }
        }
        tracing::info!(count = bots.len(), dir = %dir.display(), "loaded bots");
        Ok(Store {
            dir,
            bots: RwLock::new(bots),
            sessions: RwLock::new(HashMap::new()),
        })
    }

    fn bot_dir(&self, id: &str) -> PathBuf {
        self.dir.join("bots").join(id)
    }

    pub fn create_bot(&self, name: String, tsv: &[u8], document: ConfigDocument) -> Result<BotView, ApiError> {
        let graph = Arc::new(KnowledgeGraph::from_bytes(tsv)?);
        let runtime = BotRuntime::from_document(graph.clone(), &document)?;
        let meta = BotMeta {
            id: uuid::Uuid::new_v4().to_string(),
            name,
            created_at: now_secs(),
            stats: graph.stats(),
        };

        let dir = self.bot_dir(&meta.id);
        fs::create_dir_all(&dir)?;
        write_atomic(&dir.join("graph.tsv"), tsv)?;
        write_atomic(&dir.join("config.json"), &to_json(&document)?)?;
        write_atomic(&dir.join("meta.json"), &to_json(&meta)?)?;

        let bot = Arc::new(Bot {
            meta: meta.clone(),
            live: RwLock::new(Live { document, runtime }),
        });
        let view = bot.view();
        self.bots.write().expect("store lock poisoned").insert(meta.id, bot);
        Ok(view)
    }

    pub fn list_bots(&self) -> Vec<BotView> {
        self.bots
            .read()
            .expect("store lock poisoned")
            .values()
            .map(|b| b.view())
            .collect()
    }

    pub fn bot(&self, id: &str) -> Result<Arc<Bot>, ApiError> {
        self.bots
            .read()
            .expect("store lock poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::bot_not_found(id))
    }

    /// Merges `patch` over the stored document. Nothing changes unless the
    /// merged document validates and is persisted.
    pub fn update_config(&self, id: &str, patch: ConfigDocument) -> Result<BotView, ApiError> {
        let bot = self.bot(id)?;
        let mut live = bot.live.write().expect("bot lock poisoned");
        let merged = live.document.merged(patch);
        let runtime = BotRuntime::from_document(live.runtime.graph().clone(), &merged)?;
        write_atomic(&self.bot_dir(id).join("config.json"), &to_json(&merged)?)?;
        *live = Live {
            document: merged,
            runtime,
        };
        drop(live);
        Ok(bot.view())
    }

    pub fn create_session(&self, bot_id: &str, seed: Option<u64>) -> Result<SessionInfo, ApiError> {
        self.bot(bot_id)?;
        let uuid = uuid::Uuid::new_v4();
        let seed = seed.unwrap_or(uuid.as_u64_pair().0);
        let info = SessionInfo {
            id: uuid.to_string(),
            bot_id: bot_id.to_string(),
            seed,
        };
        let session = Session::new(info.id.clone(), bot_id, seed);
        self.sessions
            .write()
            .expect("store lock poisoned")
            .insert(info.id.clone(), Arc::new(Mutex::new(session)));
        Ok(info)
    }

    pub fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .expect("store lock poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::session_not_found(id))
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, ApiError> {
    serde_json::to_vec_pretty(value).map_err(ApiError::internal)
}

fn load_bot(dir: &Path) -> Result<Bot, ApiError> {
    let meta: BotMeta = serde_json::from_slice(&fs::read(dir.join("meta.json"))?).map_err(ApiError::internal)?;
    let document = ConfigDocument::from_slice(&fs::read(dir.join("config.json"))?)?;
    let graph = Arc::new(KnowledgeGraph::from_bytes(&fs::read(dir.join("graph.tsv"))?)?);
    let runtime = BotRuntime::from_document(graph, &document)?;
    Ok(Bot {
        meta,
        live: RwLock::new(Live { document, runtime }),
    })
}
