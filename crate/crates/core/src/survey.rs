//! Counting transitive, OB and pre-primitive groups over a catalog of group files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupprops::invariant_partitions;
use crate::perm::{GroupFile, PermGroup};

/// `{"entries": [{"path": "t10_1.json", "degree": 10, "expect": {"ob": true}}, ..]}`;
/// paths are relative to the manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogManifest {
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub degree: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expect: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurveyEntry {
    pub path: String,
    pub name: String,
    pub degree: usize,
    pub transitive: bool,
    pub ob: bool,
    pub preprimitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurveyRow {
    pub degree: usize,
    pub groups: usize,
    pub transitive: usize,
    pub ob: usize,
    pub preprimitive: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Survey {
    pub rows: Vec<SurveyRow>,
    pub entries: Vec<SurveyEntry>,
    /// Annotated expectations that disagree with the computed values.
    pub mismatches: Vec<String>,
}

impl CatalogManifest {
    pub fn load(path: &Path) -> Result<(CatalogManifest, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let manifest = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Ok((manifest, path.parent().map(Path::to_path_buf).unwrap_or_default()))
    }
}

fn load_group(base: &Path, entry: &ManifestEntry) -> Result<PermGroup> {
    let path = base.join(&entry.path);
    let parse = |e: String| Error::Parse(format!("{}: {e}", path.display()));
    let text = std::fs::read_to_string(&path).map_err(|e| parse(e.to_string()))?;
    let file: GroupFile = serde_json::from_str(&text).map_err(|e| parse(e.to_string()))?;
    let group = file.realise().map_err(|e| parse(e.to_string()))?;
    if group.degree() != entry.degree {
        return Err(parse(format!("degree {} but the manifest says {}", group.degree(), entry.degree)));
    }
    Ok(group)
}

fn classify(path: &str, group: &PermGroup) -> Result<SurveyEntry> {
    let mut entry = SurveyEntry {
        path: path.to_string(),
        name: group.name().to_string(),
        degree: group.degree(),
        transitive: group.is_transitive(),
        ob: false,
        preprimitive: false,
    };
    if entry.transitive {
        let inv = invariant_partitions(group)?;
        entry.ob = inv.is_ob().holds;
        entry.preprimitive = inv.is_primitive() || inv.is_preprimitive()?.holds;
    }
    Ok(entry)
}

/// Loads every entry, then classifies them on `jobs` threads (all cores
/// when `None`). Output order follows the manifest.
pub fn survey(manifest: &CatalogManifest, base: &Path, jobs: Option<usize>) -> Result<Survey> {
    let groups: Vec<PermGroup> = manifest.entries.iter().map(|e| load_group(base, e)).collect::<Result<_>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Hypothesis(format!("thread pool: {e}")))?;
    let entries: Vec<SurveyEntry> = pool.install(|| {
        manifest.entries.par_iter().zip(&groups).map(|(e, g)| classify(&e.path, g)).collect::<Result<_>>()
    })?;

    let mut rows: BTreeMap<usize, SurveyRow> = BTreeMap::new();
    for e in &entries {
        let row = rows.entry(e.degree).or_insert(SurveyRow {
            degree: e.degree,
            groups: 0,
            transitive: 0,
            ob: 0,
            preprimitive: 0,
        });
        row.groups += 1;
        row.transitive += e.transitive as usize;
        row.ob += e.ob as usize;
        row.preprimitive += e.preprimitive as usize;
    }

    let mut mismatches = Vec::new();
    for (m, e) in manifest.entries.iter().zip(&entries) {
        for (key, &want) in &m.expect {
            let got = match key.as_str() {
                "transitive" => e.transitive,
                "ob" => e.ob,
                "preprimitive" => e.preprimitive,
                other => {
                    mismatches.push(format!("{}: unknown property {other}", m.path));
                    continue;
                }
            };
            if got != want {
                mismatches.push(format!("{}: {key} is {got}, expected {want}", m.path));
            }
        }
    }
    Ok(Survey { rows: rows.into_values().collect(), entries, mismatches })
}

impl Survey {
    pub fn row(&self, degree: usize) -> Option<&SurveyRow> {
        self.rows.iter().find(|r| r.degree == degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn write_catalog(dir: &Path, groups: &[(&str, PermGroup)], expect_ob: &[bool]) -> CatalogManifest {
        let mut entries = Vec::new();
        for ((name, g), &ob) in groups.iter().zip(expect_ob) {
            let path = format!("{name}.json");
            std::fs::write(dir.join(&path), serde_json::to_string(&g.to_file()).unwrap()).unwrap();
            entries.push(ManifestEntry { path, degree: g.degree(), expect: BTreeMap::from([("ob".into(), ob)]) });
        }
        CatalogManifest { entries }
    }

    #[test]
    fn regular_order_eight() {
        let dir = tempfile::tempdir().unwrap();
        let groups = fixtures::regular_order8();
        let manifest = write_catalog(dir.path(), &groups, &[true, true, true, true, false]);
        let one = survey(&manifest, dir.path(), Some(1)).unwrap();
        assert_eq!(one.rows, vec![SurveyRow { degree: 8, groups: 5, transitive: 5, ob: 4, preprimitive: 4 }]);
        assert!(one.mismatches.is_empty());
        let many = survey(&manifest, dir.path(), Some(4)).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn bad_entry_names_the_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("broken.json"), "{not json").unwrap();
        let manifest = CatalogManifest {
            entries: vec![ManifestEntry { path: "broken.json".into(), degree: 3, expect: BTreeMap::new() }],
        };
        match survey(&manifest, dir.path(), Some(1)) {
            Err(Error::Parse(msg)) => assert!(msg.contains("broken.json")),
            other => panic!("{other:?}"),
        }
    }
}
