//! Dataset scanning: discovery, include/exclude filtering, accessibility
//! checks and exact-duplicate elimination by content hash.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::Path;

use globset::{GlobBuilder, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::artifact::{self, DATASET_INFO};
use crate::error::{Error, Result};
use crate::id::compute_model_id;
use crate::pipeline::RunContext;
use crate::profile::ScanConfig;

/// Compiled glob patterns.
///
/// `*` stays inside one path segment and `**` crosses segments. A pattern
/// without a `/` is matched against the file name, otherwise against the
/// dataset-relative path.
#[derive(Clone, Debug)]
pub struct PatternSet {
    by_name: GlobSet,
    by_path: GlobSet,
}

impl PatternSet {
    pub fn new(patterns: &[String]) -> Result<Self> {
        let mut by_name = GlobSetBuilder::new();
        let mut by_path = GlobSetBuilder::new();
        for pattern in patterns {
            let glob = GlobBuilder::new(pattern)
                .literal_separator(true)
                .build()
                .map_err(|e| Error::InvalidGlob {
                    pattern: pattern.clone(),
                    message: e.kind().to_string(),
                })?;
            if pattern.contains('/') {
                by_path.add(glob);
            } else {
                by_name.add(glob);
            }
        }
        let build = |b: GlobSetBuilder| {
            b.build().map_err(|e| Error::InvalidGlob {
                pattern: patterns.join(", "),
                message: e.to_string(),
            })
        };
        Ok(PatternSet {
            by_name: build(by_name)?,
            by_path: build(by_path)?,
        })
    }

    pub fn is_match(&self, rel_path: &str) -> bool {
        let name = rel_path.rsplit('/').next().unwrap_or(rel_path);
        self.by_name.is_match(name) || self.by_path.is_match(rel_path)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanTotals {
    pub files_seen: u64,
    pub candidates: u64,
    pub unreadable: u64,
    pub too_large: u64,
    pub excluded: u64,
    pub duplicate_files: u64,
    pub duplicate_groups: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateGroup {
    pub hash: String,
    pub paths: Vec<String>,
    pub representative: String,
}

/// Contents of `dataset_info.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub dataset_root: String,
    pub scan_params: ScanConfig,
    pub totals: ScanTotals,
    pub extension_counts: BTreeMap<String, u64>,
    pub candidates: Vec<String>,
    pub duplicate_groups: Vec<DuplicateGroup>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Discovery {
    /// Every regular file under the root, sorted.
    pub seen: Vec<String>,
    pub kept: Vec<String>,
    pub excluded: Vec<String>,
}

fn relative_slash_path(root: &Path, path: &Path) -> Option<String> {
    let rel = path.strip_prefix(root).ok()?;
    let parts: Vec<String> = rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    Some(parts.join("/"))
}

/// Walks `root` recursively without following symlinks and applies the filters.
pub fn discover_files(config: &ScanConfig, root: &Path) -> Result<Discovery> {
    if !root.is_dir() {
        return Err(Error::DatasetPathMissing(root.to_path_buf()));
    }
    let include = PatternSet::new(&config.include)?;
    let exclude = PatternSet::new(&config.exclude)?;
    let mut seen = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        // Entries that cannot be listed are ignored; nothing can be said about them.
        let Ok(entry) = entry else { continue };
        if !entry.file_type().is_file() {
            continue;
        }
        if let Some(rel) = relative_slash_path(root, entry.path()) {
            seen.push(rel);
        }
    }
    seen.sort();
    let (kept, excluded) = seen
        .iter()
        .cloned()
        .partition(|rel| include.is_match(rel) && !exclude.is_match(rel));
    Ok(Discovery {
        seen,
        kept,
        excluded,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Accessibility {
    pub kept: Vec<String>,
    pub unreadable: Vec<String>,
    pub too_large: Vec<String>,
}

/// Moves unreadable and over-limit files into their own buckets. Never fails.
pub fn filter_accessibility(root: &Path, paths: &[String], size_limit_mb: Option<f64>) -> Accessibility {
    let limit_bytes = size_limit_mb.map(|mb| mb * 1024.0 * 1024.0);
    let mut out = Accessibility::default();
    for rel in paths {
        let full = root.join(rel);
        let Ok(meta) = fs::metadata(&full) else {
            out.unreadable.push(rel.clone());
            continue;
        };
        if File::open(&full).is_err() {
            out.unreadable.push(rel.clone());
        } else if limit_bytes.is_some_and(|limit| meta.len() as f64 > limit) {
            out.too_large.push(rel.clone());
        } else {
            out.kept.push(rel.clone());
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dedup {
    pub candidates: Vec<String>,
    pub duplicate_groups: Vec<DuplicateGroup>,
    /// Files that could not be read while hashing.
    pub unreadable: Vec<String>,
}

impl Dedup {
    pub fn duplicate_files(&self) -> u64 {
        self.duplicate_groups
            .iter()
            .map(|g| g.paths.len() as u64 - 1)
            .sum()
    }
}

/// Groups files by content hash; the lexicographically smallest path represents its group.
pub fn dedup_by_hash(root: &Path, paths: &[String]) -> Dedup {
    let hashed: Vec<(String, Option<String>)> = paths
        .par_iter()
        .map(|rel| {
            let hash = fs::read(root.join(rel)).ok().map(|b| compute_model_id(&b));
            (rel.clone(), hash)
        })
        .collect();

    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut out = Dedup::default();
    for (rel, hash) in hashed {
        match hash {
            Some(h) => groups.entry(h).or_default().push(rel),
            None => out.unreadable.push(rel),
        }
    }
    for (hash, mut members) in groups {
        members.sort();
        out.candidates.push(members[0].clone());
        if members.len() > 1 {
            out.duplicate_groups.push(DuplicateGroup {
                hash,
                representative: members[0].clone(),
                paths: members,
            });
        }
    }
    out.candidates.sort();
    out.unreadable.sort();
    out.duplicate_groups
        .sort_by(|a, b| a.representative.cmp(&b.representative));
    out
}

fn extension_of(rel: &str) -> String {
    let name = rel.rsplit('/').next().unwrap_or(rel);
    match name.rfind('.') {
        Some(i) if i > 0 => name[i + 1..].to_lowercase(),
        _ => String::new(),
    }
}

/// Builds the scan result for `root` without persisting it.
pub fn scan_dataset(config: &ScanConfig, root: &Path) -> Result<DatasetInfo> {
    let discovery = discover_files(config, root)?;
    let access = filter_accessibility(root, &discovery.kept, config.size_limit_mb);
    let dedup = dedup_by_hash(root, &access.kept);

    let mut extension_counts = BTreeMap::new();
    for rel in &discovery.seen {
        *extension_counts.entry(extension_of(rel)).or_insert(0) += 1;
    }
    let totals = ScanTotals {
        files_seen: discovery.seen.len() as u64,
        candidates: dedup.candidates.len() as u64,
        unreadable: (access.unreadable.len() + dedup.unreadable.len()) as u64,
        too_large: access.too_large.len() as u64,
        excluded: discovery.excluded.len() as u64,
        duplicate_files: dedup.duplicate_files(),
        duplicate_groups: dedup.duplicate_groups.len() as u64,
    };
    let resolved = fs::canonicalize(root).unwrap_or_else(|_| root.to_path_buf());
    Ok(DatasetInfo {
        dataset_root: resolved.to_string_lossy().replace('\\', "/"),
        scan_params: config.clone(),
        totals,
        extension_counts,
        candidates: dedup.candidates,
        duplicate_groups: dedup.duplicate_groups,
    })
}

/// Scan stage: discover, filter, deduplicate and persist `dataset_info.json`.
pub fn run_scan(ctx: &RunContext) -> Result<DatasetInfo> {
    let info = scan_dataset(&ctx.profile.scan, &ctx.dataset_root())?;
    artifact::write_artifact(&ctx.output_dir.join(DATASET_INFO), &info)?;
    Ok(info)
}
