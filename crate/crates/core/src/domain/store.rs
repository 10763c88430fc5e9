//! Embedded transactional store.
//!
//! Storage directory layout:
//!
//! ```text
//! <storage>/VERSION        schema version of snapshot.json and wal.jsonl
//! <storage>/snapshot.json  full state as of `seq`
//! <storage>/wal.jsonl      one committed transaction per line, seq > snapshot seq
//! <storage>/store.lock     held exclusively while a process has the store open
//! ```
//!
//! A transaction validates against the current state, produces a list of
//! [`Op`]s, appends them to the log (fsync'd unless disabled) and only then
//! applies them in memory. A failed validation therefore leaves both the
//! in-memory state and the files untouched. A torn final log line left by a
//! crash is discarded on open.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::clock::{Clock, SystemClock, Timestamp};
use crate::domain::error::DomainError;
use crate::domain::model::*;
use crate::domain::state::{Op, Snapshot, State};

pub const SCHEMA_VERSION: u32 = 1;

const VERSION_FILE: &str = "VERSION";
const SNAPSHOT_FILE: &str = "snapshot.json";
const WAL_FILE: &str = "wal.jsonl";
const LOCK_FILE: &str = "store.lock";

type Migration = fn(serde_json::Value) -> Result<serde_json::Value, DomainError>;

/// Forward migrations keyed by the version they upgrade from.
const MIGRATIONS: &[(u32, Migration)] = &[];

/// Notifications for the search index, drained by the owner of the index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexEvent {
    Upsert(ResourceId),
    Remove(ResourceId),
}

#[derive(Debug, Clone)]
pub struct StoreOptions {
    /// fsync the log after every commit.
    pub sync_writes: bool,
    /// Fold the log into a fresh snapshot after this many transactions.
    pub checkpoint_every: usize,
}

impl Default for StoreOptions {
    fn default() -> Self {
        Self {
            sync_writes: true,
            checkpoint_every: 512,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct WalRecord {
    seq: u64,
    ops: Vec<Op>,
}

struct Wal {
    dir: PathBuf,
    file: File,
    since_checkpoint: usize,
    options: StoreOptions,
    _lock: File,
}

impl Wal {
    fn append(&mut self, seq: u64, ops: &[Op]) -> Result<(), DomainError> {
        #[derive(Serialize)]
        struct Borrowed<'a> {
            seq: u64,
            ops: &'a [Op],
        }
        let mut line = serde_json::to_vec(&Borrowed { seq, ops })?;
        line.push(b'\n');
        self.file.write_all(&line)?;
        if self.options.sync_writes {
            self.file.sync_data()?;
        }
        self.since_checkpoint += 1;
        Ok(())
    }

    fn checkpoint(&mut self, state: &State) -> Result<(), DomainError> {
        write_snapshot(&self.dir, state)?;
        self.file.set_len(0)?;
        self.file.seek(SeekFrom::Start(0))?;
        self.file.sync_all()?;
        self.since_checkpoint = 0;
        Ok(())
    }
}

fn write_snapshot(dir: &Path, state: &State) -> Result<(), DomainError> {
    let tmp = dir.join(format!("{SNAPSHOT_FILE}.tmp"));
    {
        let mut file = File::create(&tmp)?;
        serde_json::to_writer(&mut file, &state.to_snapshot())?;
        file.sync_all()?;
    }
    fs::rename(&tmp, dir.join(SNAPSHOT_FILE))?;
    if let Ok(d) = File::open(dir) {
        let _ = d.sync_all();
    }
    Ok(())
}

fn migrate(mut value: serde_json::Value, from: u32) -> Result<serde_json::Value, DomainError> {
    let mut version = from;
    while version < SCHEMA_VERSION {
        let step = MIGRATIONS
            .iter()
            .find(|(v, _)| *v == version)
            .ok_or_else(|| DomainError::Storage(format!("no migration from schema {version}")))?;
        value = (step.1)(value)?;
        version += 1;
    }
    if let Some(obj) = value.as_object_mut() {
        obj.insert("schema_version".into(), SCHEMA_VERSION.into());
    }
    Ok(value)
}

struct Inner {
    state: State,
    wal: Option<Wal>,
}

/// The domain store. Cheap to share behind an `Arc`; all methods take `&self`.
pub struct Store {
    inner: RwLock<Inner>,
    clock: Arc<dyn Clock>,
    events: Mutex<Vec<IndexEvent>>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store").finish_non_exhaustive()
    }
}

impl Store {
    /// A store without files, for tests and throwaway instances.
    pub fn in_memory(clock: Arc<dyn Clock>) -> Self {
        Self {
            inner: RwLock::new(Inner {
                state: State::new(),
                wal: None,
            }),
            clock,
            events: Mutex::new(Vec::new()),
        }
    }

    pub fn open(dir: impl AsRef<Path>) -> Result<Self, DomainError> {
        Self::open_with(dir, Arc::new(SystemClock), StoreOptions::default())
    }

    pub fn open_with(
        dir: impl AsRef<Path>,
        clock: Arc<dyn Clock>,
        options: StoreOptions,
    ) -> Result<Self, DomainError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let lock = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(dir.join(LOCK_FILE))?;
        lock.try_lock().map_err(|_| {
            DomainError::Storage(format!("store at {} is in use by another process", dir.display()))
        })?;

        let version_path = dir.join(VERSION_FILE);
        let snapshot_path = dir.join(SNAPSHOT_FILE);
        let version = match fs::read_to_string(&version_path) {
            Ok(raw) => raw
                .trim()
                .parse::<u32>()
                .map_err(|_| DomainError::Storage(format!("bad VERSION file: {raw:?}")))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                if snapshot_path.exists() {
                    return Err(DomainError::Storage("snapshot without VERSION file".into()));
                }
                fs::write(&version_path, format!("{SCHEMA_VERSION}\n"))?;
                SCHEMA_VERSION
            }
            Err(e) => return Err(e.into()),
        };
        if version > SCHEMA_VERSION {
            return Err(DomainError::Storage(format!(
                "store schema {version} is newer than supported schema {SCHEMA_VERSION}"
            )));
        }

        let mut state = if snapshot_path.exists() {
            let raw: serde_json::Value = serde_json::from_slice(&fs::read(&snapshot_path)?)?;
            let snap: Snapshot = serde_json::from_value(migrate(raw, version)?)?;
            State::from_snapshot(snap)
        } else {
            State::new()
        };
        if version < SCHEMA_VERSION && dir.join(WAL_FILE).exists() {
            // Logs are only ever written at the current schema; an upgrade
            // requires a clean checkpoint first.
            let len = fs::metadata(dir.join(WAL_FILE))?.len();
            if len > 0 {
                return Err(DomainError::Storage(
                    "cannot migrate a store with a non-empty log".into(),
                ));
            }
        }

        let wal_path = dir.join(WAL_FILE);
        let replayed = replay_wal(&wal_path, &mut state)?;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&wal_path)?;
        let mut wal = Wal {
            dir: dir.clone(),
            file,
            since_checkpoint: replayed,
            options,
            _lock: lock,
        };
        if version < SCHEMA_VERSION {
            wal.checkpoint(&state)?;
            fs::write(&version_path, format!("{SCHEMA_VERSION}\n"))?;
        }
        Ok(Self {
            inner: RwLock::new(Inner {
                state,
                wal: Some(wal),
            }),
            clock,
            events: Mutex::new(Vec::new()),
        })
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    pub fn now(&self) -> Timestamp {
        self.clock.now()
    }

    /// Folds the log into the snapshot file. No-op for in-memory stores.
    pub fn checkpoint(&self) -> Result<(), DomainError> {
        let mut inner = self.inner.write().expect("store lock poisoned");
        let Inner { state, wal } = &mut *inner;
        if let Some(wal) = wal {
            wal.checkpoint(state)?;
        }
        Ok(())
    }

    /// Number of committed transactions since the store was created.
    pub fn seq(&self) -> u64 {
        self.read(|s| s.seq)
    }

    /// Deterministic serialization of the complete state.
    pub fn snapshot_bytes(&self) -> Vec<u8> {
        self.read(|s| serde_json::to_vec(&s.to_snapshot()).expect("state serializes"))
    }

    pub fn drain_index_events(&self) -> Vec<IndexEvent> {
        std::mem::take(&mut *self.events.lock().expect("event lock poisoned"))
    }

    pub(crate) fn read<R>(&self, f: impl FnOnce(&State) -> R) -> R {
        let inner = self.inner.read().expect("store lock poisoned");
        f(&inner.state)
    }

    /// Runs `f` against the current state under the writer lock and commits
    /// the ops it produced. Nothing is written when `f` fails or emits no ops.
    pub(crate) fn commit<R>(
        &self,
        f: impl FnOnce(&mut Tx<'_>) -> Result<R, DomainError>,
    ) -> Result<R, DomainError> {
        let mut inner = self.inner.write().expect("store lock poisoned");
        let now = self.clock.now();
        let mut tx = Tx::new(&inner.state, now);
        let out = f(&mut tx)?;
        let Tx { ops, events, .. } = tx;
        if ops.is_empty() {
            return Ok(out);
        }
        let Inner { state, wal } = &mut *inner;
        let seq = state.seq + 1;
        if let Some(wal) = wal.as_mut() {
            wal.append(seq, &ops)?;
        }
        for op in ops {
            state.apply(op);
        }
        state.seq = seq;
        if let Some(wal) = wal.as_mut() {
            if wal.since_checkpoint >= wal.options.checkpoint_every {
                wal.checkpoint(state)?;
            }
        }
        drop(inner);
        self.events
            .lock()
            .expect("event lock poisoned")
            .extend(events);
        Ok(out)
    }
}

fn replay_wal(path: &Path, state: &mut State) -> Result<usize, DomainError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(e.into()),
    };
    let mut reader = BufReader::new(file);
    let mut offset = 0u64;
    let mut applied = 0;
    let mut line = String::new();
    loop {
        line.clear();
        let n = reader.read_line(&mut line)?;
        if n == 0 {
            break;
        }
        let complete = line.ends_with('\n');
        match serde_json::from_str::<WalRecord>(line.trim_end()) {
            Ok(rec) if complete => {
                if rec.seq > state.seq {
                    for op in rec.ops {
                        state.apply(op);
                    }
                    state.seq = rec.seq;
                    applied += 1;
                }
                offset += n as u64;
            }
            _ => {
                let mut rest = String::new();
                reader.read_line(&mut rest)?;
                if !rest.is_empty() {
                    return Err(DomainError::Storage(format!(
                        "corrupt log record at byte {offset}"
                    )));
                }
                tracing::warn!(offset, "discarding torn log tail");
                let f = OpenOptions::new().write(true).open(path)?;
                f.set_len(offset)?;
                f.sync_all()?;
                break;
            }
        }
    }
    Ok(applied)
}

/// A transaction under construction.
pub(crate) struct Tx<'a> {
    pub state: &'a State,
    pub now: Timestamp,
    ops: Vec<Op>,
    events: Vec<IndexEvent>,
    next_id: u64,
    next_activity_id: u64,
}

impl<'a> Tx<'a> {
    fn new(state: &'a State, now: Timestamp) -> Self {
        Self {
            state,
            now,
            ops: Vec::new(),
            events: Vec::new(),
            next_id: state.next_id,
            next_activity_id: state.next_activity_id,
        }
    }

    pub fn alloc(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub fn push(&mut self, op: Op) {
        self.ops.push(op);
    }

    pub fn upserted(&mut self, id: ResourceId) {
        self.events.push(IndexEvent::Upsert(id));
    }

    pub fn removed(&mut self, id: ResourceId) {
        self.events.push(IndexEvent::Remove(id));
    }

    pub fn log(
        &mut self,
        actor: UserId,
        action_type: ActionType,
        subject: Subject,
        groups: Vec<GroupId>,
        details: BTreeMap<String, String>,
    ) {
        let id = ActivityId(self.next_activity_id);
        self.next_activity_id += 1;
        self.ops.push(Op::AppendActivity(ActivityLogEntry {
            id,
            actor,
            action_type,
            subject,
            timestamp: self.now,
            details,
            groups,
        }));
    }
}
