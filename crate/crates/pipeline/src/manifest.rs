//! Dataset manifest: one JSON document describing every sample and its
//! derived files.
//!
//! File paths inside the manifest are relative to the manifest's directory.
//! Saves replace the file atomically (temporary file, fsync, rename) and bump
//! `version`. A `<manifest>.lock` file holding the owner's process id keeps a
//! single writer; a lock whose process no longer exists is taken over.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use mattekit_core::connectivity::ScreeningStats;
use mattekit_core::metrics::MetricReport;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{PipelineError, Result};

pub const MANIFEST_FORMAT: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pending,
    Flagged,
    Accepted,
    Rejected,
    Refined,
}

impl Status {
    pub const ALL: [Status; 5] = [
        Status::Pending,
        Status::Flagged,
        Status::Accepted,
        Status::Rejected,
        Status::Refined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pending => "pending",
            Status::Flagged => "flagged",
            Status::Accepted => "accepted",
            Status::Rejected => "rejected",
            Status::Refined => "refined",
        }
    }

    pub fn can_move_to(self, to: Status) -> bool {
        use Status::*;
        matches!(
            (self, to),
            (Pending, Flagged) | (Pending, Accepted) | (Pending, Rejected) | (Flagged, Accepted) | (Flagged, Rejected) | (Accepted, Refined)
        )
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Status::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| format!("unknown status {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecidedBy {
    Auto,
    Human,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplePaths {
    pub rgb: String,
    pub alpha: String,
    pub inverse: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trimap: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub composites: Vec<Composite>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chroma_alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chroma_foreground: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Composite {
    pub path: String,
    pub background: String,
}

/// Outcome of re-extracting a sample from a solid key-colour composite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChromaResult {
    pub key: String,
    /// Largest per-channel difference between the keyed composite and its
    /// reconstruction from the extracted foreground and alpha.
    pub round_trip_max_error: u8,
    pub mad: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub paths: SamplePaths,
    pub status: Status,
    pub screening: ScreeningStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chroma: Option<ChromaResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decided_by: Option<DecidedBy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub created_at: String,
    pub updated_at: String,
}

impl SampleRecord {
    /// Moves along the status machine. Leaving `flagged` needs a human.
    pub fn transition(&mut self, to: Status, by: DecidedBy, now: &str) -> Result<()> {
        if !self.status.can_move_to(to) {
            return Err(PipelineError::Transition {
                id: self.id.clone(),
                from: self.status,
                to,
            });
        }
        if self.status == Status::Flagged && by != DecidedBy::Human {
            return Err(PipelineError::HumanRequired { id: self.id.clone() });
        }
        self.status = to;
        if to != Status::Refined {
            self.decided_by = Some(by);
        }
        self.updated_at = now.to_string();
        Ok(())
    }
}

/// A problem with one input that was skipped instead of aborting the batch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub stage: String,
    pub id: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub version: u64,
    pub created_at: String,
    pub updated_at: String,
    pub config: Config,
    pub vocabulary: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub prompts: Vec<String>,
    pub samples: Vec<SampleRecord>,
    #[serde(default)]
    pub issues: Vec<Issue>,
}

impl Manifest {
    pub fn new(config: Config, now: &str) -> Self {
        Self {
            format: MANIFEST_FORMAT,
            version: 0,
            created_at: now.to_string(),
            updated_at: now.to_string(),
            vocabulary: config.prompts.attributes.clone(),
            config,
            prompts: Vec::new(),
            samples: Vec::new(),
            issues: Vec::new(),
        }
    }

    pub fn sample(&self, id: &str) -> Option<&SampleRecord> {
        self.samples
            .binary_search_by(|s| s.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.samples[i])
    }

    pub fn sample_mut(&mut self, id: &str) -> Option<&mut SampleRecord> {
        match self.samples.binary_search_by(|s| s.id.as_str().cmp(id)) {
            Ok(i) => Some(&mut self.samples[i]),
            Err(_) => None,
        }
    }

    /// Inserts keeping samples sorted by id. Returns false for a duplicate id.
    pub fn insert(&mut self, record: SampleRecord) -> bool {
        match self.samples.binary_search_by(|s| s.id.cmp(&record.id)) {
            Ok(_) => false,
            Err(i) => {
                self.samples.insert(i, record);
                true
            }
        }
    }

    pub fn with_status(&self, status: Status) -> impl Iterator<Item = &SampleRecord> {
        self.samples.iter().filter(move |s| s.status == status)
    }

    pub fn counts(&self) -> BTreeMap<Status, usize> {
        let mut counts: BTreeMap<Status, usize> = Status::ALL.iter().map(|&s| (s, 0)).collect();
        for s in &self.samples {
            *counts.entry(s.status).or_default() += 1;
        }
        counts
    }

    /// Replaces the issues recorded for `stage` with `issues`.
    pub fn set_issues(&mut self, stage: &str, issues: Vec<Issue>) {
        self.issues.retain(|i| i.stage != stage);
        self.issues.extend(issues);
    }

    fn check(&self, path: &Path) -> Result<()> {
        let bad = |message: String| PipelineError::Manifest {
            path: path.to_path_buf(),
            message,
        };
        if self.format != MANIFEST_FORMAT {
            return Err(bad(format!("unsupported format {}", self.format)));
        }
        if self.samples.windows(2).any(|w| w[0].id >= w[1].id) {
            return Err(bad("sample ids must be unique and sorted".into()));
        }
        Ok(())
    }
}

/// Current time as RFC 3339 UTC, or `SOURCE_DATE_EPOCH` when set so that
/// repeated runs write identical files.
pub fn timestamp() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0));
    fixed
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn lock_path(manifest: &Path) -> PathBuf {
    let mut name = manifest.file_name().unwrap_or_default().to_os_string();
    name.push(".lock");
    manifest.with_file_name(name)
}

fn process_alive(pid: u32) -> bool {
    if pid == std::process::id() {
        return true;
    }
    if cfg!(target_os = "linux") {
        Path::new("/proc").join(pid.to_string()).exists()
    } else {
        true
    }
}

/// Exclusive ownership of a manifest file for the lifetime of the value.
#[derive(Debug)]
pub struct ManifestLock {
    path: PathBuf,
}

impl ManifestLock {
    pub fn acquire(manifest: &Path) -> Result<Self> {
        let path = lock_path(manifest);
        for _ in 0..2 {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut file) => {
                    writeln!(file, "{}", std::process::id()).map_err(|e| PipelineError::io(&path, e))?;
                    return Ok(Self { path });
                }
                Err(e) if e.kind() == ErrorKind::AlreadyExists => {
                    let owner = fs::read_to_string(&path)
                        .ok()
                        .and_then(|s| s.trim().parse::<u32>().ok());
                    match owner {
                        Some(pid) if process_alive(pid) => {
                            return Err(PipelineError::Locked {
                                path: manifest.to_path_buf(),
                                pid,
                            })
                        }
                        _ => {
                            let _ = fs::remove_file(&path);
                        }
                    }
                }
                Err(e) => return Err(PipelineError::io(&path, e)),
            }
        }
        Err(PipelineError::Manifest {
            path: manifest.to_path_buf(),
            message: "could not take over stale lock".into(),
        })
    }
}

impl Drop for ManifestLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// An open, locked manifest.
#[derive(Debug)]
pub struct ManifestStore {
    path: PathBuf,
    root: PathBuf,
    _lock: ManifestLock,
}

impl ManifestStore {
    /// Locks and loads `path`, creating a fresh manifest from `config` when
    /// the file does not exist yet.
    pub fn open_or_create(path: &Path, config: &Config) -> Result<(Self, Manifest)> {
        let store = Self::lock(path)?;
        let manifest = if path.exists() {
            store.load()?
        } else {
            Manifest::new(config.clone(), &timestamp())
        };
        Ok((store, manifest))
    }

    pub fn open(path: &Path) -> Result<(Self, Manifest)> {
        let store = Self::lock(path)?;
        let manifest = store.load()?;
        Ok((store, manifest))
    }

    fn lock(path: &Path) -> Result<Self> {
        let root = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&root).map_err(|e| PipelineError::io(&root, e))?;
        let lock = ManifestLock::acquire(path)?;
        Ok(Self {
            path: path.to_path_buf(),
            root,
            _lock: lock,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Directory that manifest-relative paths resolve against.
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn resolve(&self, relative: &str) -> PathBuf {
        self.root.join(relative)
    }

    pub fn load(&self) -> Result<Manifest> {
        read_manifest(&self.path)
    }

    /// Bumps the version and atomically replaces the file.
    pub fn save(&self, manifest: &mut Manifest) -> Result<()> {
        manifest.version += 1;
        manifest.updated_at = timestamp();
        let mut bytes = serde_json::to_vec_pretty(manifest).map_err(|e| PipelineError::Manifest {
            path: self.path.clone(),
            message: e.to_string(),
        })?;
        bytes.push(b'\n');
        write_atomic(&self.path, &bytes)
    }
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let bytes = fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    let manifest: Manifest = serde_json::from_slice(&bytes).map_err(|e| PipelineError::Manifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    manifest.check(path)?;
    Ok(manifest)
}

/// Writes `bytes` to a sibling temporary file, syncs it and renames it over
/// `path`, then syncs the directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(name);
    let io = |e| PipelineError::io(path, e);
    {
        let mut file = File::create(&tmp).map_err(io)?;
        file.write_all(bytes).map_err(io)?;
        file.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)?;
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        if let Ok(d) = File::open(dir) {
            let _ = d.sync_all();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, status: Status) -> SampleRecord {
        SampleRecord {
            id: id.into(),
            width: 1,
            height: 1,
            paths: SamplePaths::default(),
            status,
            screening: ScreeningStats::default(),
            metrics: None,
            chroma: None,
            decided_by: None,
            error: None,
            created_at: "t".into(),
            updated_at: "t".into(),
        }
    }

    #[test]
    fn transition_table() {
        use Status::*;
        let allowed: Vec<(Status, Status)> = Status::ALL
            .iter()
            .flat_map(|&a| Status::ALL.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| a.can_move_to(b))
            .collect();
        assert_eq!(
            allowed,
            vec![
                (Pending, Flagged),
                (Pending, Accepted),
                (Pending, Rejected),
                (Flagged, Accepted),
                (Flagged, Rejected),
                (Accepted, Refined)
            ]
        );
    }

    #[test]
    fn flagged_needs_a_human() {
        let mut r = record("a", Status::Flagged);
        assert!(matches!(
            r.transition(Status::Accepted, DecidedBy::Auto, "t"),
            Err(PipelineError::HumanRequired { .. })
        ));
        r.transition(Status::Accepted, DecidedBy::Human, "t2").unwrap();
        assert_eq!(r.decided_by, Some(DecidedBy::Human));
        assert_eq!(r.updated_at, "t2");
        r.transition(Status::Refined, DecidedBy::Auto, "t3").unwrap();
        assert_eq!(r.decided_by, Some(DecidedBy::Human));
        assert!(r.transition(Status::Pending, DecidedBy::Human, "t").is_err());
    }

    #[test]
    fn samples_stay_sorted_and_unique() {
        let mut m = Manifest::new(Config::default(), "t");
        assert!(m.insert(record("b", Status::Pending)));
        assert!(m.insert(record("a", Status::Flagged)));
        assert!(!m.insert(record("a", Status::Pending)));
        let ids: Vec<_> = m.samples.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert_eq!(m.sample("b").unwrap().status, Status::Pending);
        assert!(m.sample("c").is_none());
        assert_eq!(m.counts()[&Status::Flagged], 1);
        assert_eq!(m.counts()[&Status::Refined], 0);
    }

    #[test]
    fn status_strings() {
        for s in Status::ALL {
            assert_eq!(s.as_str().parse::<Status>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{s}\""));
        }
        assert!("done".parse::<Status>().is_err());
    }

    #[test]
    fn lock_path_is_a_sibling() {
        assert_eq!(lock_path(Path::new("/x/m.json")), PathBuf::from("/x/m.json.lock"));
    }

    proptest::proptest! {
        #[test]
        fn status_walks_stay_on_the_machine(steps in proptest::collection::vec((0usize..5, proptest::bool::ANY), 0..20)) {
            let mut r = record("p", Status::Pending);
            for (to, human) in steps {
                let (from, to) = (r.status, Status::ALL[to]);
                let by = if human { DecidedBy::Human } else { DecidedBy::Auto };
                let ok = r.transition(to, by, "t").is_ok();
                let allowed = from.can_move_to(to) && (from != Status::Flagged || human);
                proptest::prop_assert_eq!(ok, allowed);
                proptest::prop_assert_eq!(r.status, if ok { to } else { from });
            }
            if matches!(r.status, Status::Rejected | Status::Refined) {
                proptest::prop_assert!(Status::ALL.iter().all(|&s| !r.status.can_move_to(s)));
            }
        }
    }
}
