//! Loaded reports, the seed registry and the state directory behind the
//! triage API.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use aspectmine::assess::{candidate_quality, LabelError, SeedLabel, SeedRegistry};
use aspectmine::combine::grouped_callees;
use aspectmine::report::DocumentError;
use aspectmine::{Candidate, Catalog, Fraction, Report, Technique};

pub const REPORTS_DIR: &str = "reports";
pub const SEEDS_FILE: &str = "seeds.json";
pub const UI_DIR: &str = "ui";

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("cannot read state directory {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("report `{name}` has fingerprint {found}, session uses {expected}")]
    Fingerprint {
        name: String,
        expected: String,
        found: String,
    },
    #[error("two reports are named `{0}`")]
    DuplicateName(String),
}

/// Reports and labels of one triage session.
pub struct Session {
    state_dir: PathBuf,
    fingerprint: Option<String>,
    reports: RwLock<BTreeMap<String, Report>>,
    catalog: RwLock<Catalog>,
    registry: RwLock<SeedRegistry>,
}

impl Session {
    /// Opens `state_dir`, loading every `reports/*.json` and `seeds.json`.
    pub fn open(state_dir: &Path) -> Result<Self, SessionError> {
        let dir = state_dir.join(REPORTS_DIR);
        let mut reports = Vec::new();
        if dir.exists() {
            let entries = std::fs::read_dir(&dir).map_err(|source| SessionError::Io {
                path: dir.display().to_string(),
                source,
            })?;
            let mut paths: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            for p in paths {
                reports.push(Report::load(&p)?);
            }
        }
        let registry = SeedRegistry::load_or_default(&state_dir.join(SEEDS_FILE))?;
        Self::from_parts(state_dir, reports, registry)
    }

    pub fn from_parts(state_dir: &Path, reports: Vec<Report>, registry: SeedRegistry) -> Result<Self, SessionError> {
        let mut fingerprint: Option<String> = None;
        let mut by_name = BTreeMap::new();
        for r in reports {
            match &fingerprint {
                Some(f) if *f != r.fingerprint => {
                    return Err(SessionError::Fingerprint {
                        name: r.name.clone(),
                        expected: f.clone(),
                        found: r.fingerprint.clone(),
                    })
                }
                None => fingerprint = Some(r.fingerprint.clone()),
                _ => {}
            }
            if by_name.contains_key(&r.name) {
                return Err(SessionError::DuplicateName(r.name));
            }
            by_name.insert(r.name.clone(), r);
        }
        let catalog = Catalog::from_reports(by_name.values());
        Ok(Self {
            state_dir: state_dir.to_path_buf(),
            fingerprint,
            reports: RwLock::new(by_name),
            catalog: RwLock::new(catalog),
            registry: RwLock::new(registry),
        })
    }

    pub fn state_dir(&self) -> &Path {
        &self.state_dir
    }

    pub fn fingerprint(&self) -> Option<&str> {
        self.fingerprint.as_deref()
    }

    pub fn report_names(&self) -> Vec<String> {
        self.reports.read().unwrap().keys().cloned().collect()
    }

    pub fn with_report<T>(&self, name: &str, f: impl FnOnce(&Report) -> T) -> Option<T> {
        self.reports.read().unwrap().get(name).map(f)
    }

    pub fn with_reports<T>(&self, f: impl FnOnce(&BTreeMap<String, Report>) -> T) -> T {
        f(&self.reports.read().unwrap())
    }

    pub fn with_registry<T>(&self, f: impl FnOnce(&SeedRegistry) -> T) -> T {
        f(&self.registry.read().unwrap())
    }

    pub fn candidate(&self, id: &str) -> Option<Candidate> {
        self.catalog.read().unwrap().get(id).cloned()
    }

    /// Names of the loaded reports holding candidate `id`.
    pub fn reports_of(&self, id: &str) -> Vec<String> {
        self.reports
            .read()
            .unwrap()
            .values()
            .filter(|r| r.get(id).is_some())
            .map(|r| r.name.clone())
            .collect()
    }

    /// Adds or replaces a report (for instance a combination) and persists it.
    pub fn add_report(&self, report: Report) -> Result<(), SessionError> {
        if let Some(f) = &self.fingerprint {
            if *f != report.fingerprint {
                return Err(SessionError::Fingerprint {
                    name: report.name.clone(),
                    expected: f.clone(),
                    found: report.fingerprint.clone(),
                });
            }
        }
        let path = self.state_dir.join(REPORTS_DIR).join(report_file_name(&report.name));
        std::fs::create_dir_all(path.parent().unwrap()).map_err(|source| SessionError::Io {
            path: path.display().to_string(),
            source,
        })?;
        report.save(&path)?;
        let mut reports = self.reports.write().unwrap();
        self.catalog.write().unwrap().add(&report);
        reports.insert(report.name.clone(), report);
        Ok(())
    }

    /// Validates, stores and persists a label. Writers are serialized by
    /// the registry lock; the file is replaced atomically.
    pub fn put_label(&self, label: SeedLabel) -> Result<(SeedLabel, Option<Fraction>), PutError> {
        let catalog = self.catalog.read().unwrap();
        let candidate = catalog
            .get(&label.candidate_id)
            .ok_or_else(|| LabelError::UnknownCandidate(label.candidate_id.clone()))?;
        let mut registry = self.registry.write().unwrap();
        let mut next = registry.clone();
        let stored = next.label(&catalog, label)?.clone();
        if next != *registry {
            next.save(&self.state_dir.join(SEEDS_FILE)).map_err(PutError::Persist)?;
            *registry = next;
        }
        let quality = candidate_quality(candidate, &stored).ok();
        Ok((stored, quality))
    }

    /// Callees occurring in the candidates of partner techniques: grouped
    /// callees for fan-in and combined views, fan-in callees for grouped views.
    pub fn highlight_set(&self, technique: Technique) -> BTreeSet<String> {
        let reports = self.reports.read().unwrap();
        match technique {
            Technique::Fanin | Technique::Combined => {
                let concepts = reports.values().flat_map(|r| r.grouped_candidates().map(|(_, c)| c));
                grouped_callees(concepts).into_iter().map(str::to_string).collect()
            }
            Technique::Grouped => reports
                .values()
                .flat_map(|r| r.fanin_candidates().map(|(_, c)| c.callee.clone()))
                .collect(),
            Technique::Redirection => BTreeSet::new(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PutError {
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error("label not persisted: {0}")]
    Persist(DocumentError),
}

/// File name of a report in the state directory. Characters other than
/// ASCII letters, digits and `-` are written as `_xx` hex escapes.
pub fn report_file_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 5);
    for b in name.bytes() {
        if b.is_ascii_alphanumeric() || b == b'-' {
            out.push(b as char);
        } else {
            out.push_str(&format!("_{b:02x}"));
        }
    }
    out + ".json"
}
