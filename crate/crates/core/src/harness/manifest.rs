use std::collections::HashSet;
use std::path::{Path, PathBuf};

use super::HarnessError;
use crate::label::Label;

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub path: PathBuf,
    pub label: Label,
    pub group: Option<String>,
}

/// One dataset: the rows of a `id,path,label[,group]` CSV file.
#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    /// Dataset name, taken from the file stem.
    pub name: String,
    pub source: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

fn row_error(source: &Path, row: usize, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Validation(format!("{} row {row}: {msg}", source.display()))
}

/// Parse manifest text. Clip paths resolve against `base_dir`; rows are
/// numbered from 1 after the header. Stops at the first bad row.
pub fn parse_manifest_str(text: &str, source: &Path, base_dir: &Path) -> Result<Vec<ManifestEntry>, HarnessError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| HarnessError::Validation(format!("{}: unreadable header: {e}", source.display())))?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    let has_group = match cols.as_slice() {
        ["id", "path", "label"] => false,
        ["id", "path", "label", "group"] => true,
        _ => {
            return Err(HarnessError::Validation(format!(
                "{}: header must be id,path,label[,group], found {}",
                source.display(),
                cols.join(",")
            )))
        }
    };
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| row_error(source, row, e))?;
        let id = record.get(0).unwrap_or_default().to_string();
        if id.is_empty() {
            return Err(row_error(source, row, "empty id"));
        }
        if !seen.insert(id.clone()) {
            return Err(row_error(source, row, format!("duplicate id {id:?}")));
        }
        let rel = record.get(1).unwrap_or_default();
        if rel.is_empty() {
            return Err(row_error(source, row, "empty path"));
        }
        let raw_label = record.get(2).unwrap_or_default();
        let label: Label =
            raw_label.parse().map_err(|_| row_error(source, row, format!("label {raw_label:?} must be 0 or 1")))?;
        let group = if has_group { record.get(3).filter(|g| !g.is_empty()).map(str::to_string) } else { None };
        let path = base_dir.join(rel);
        if !path.is_file() {
            return Err(row_error(source, row, format!("audio file {} not found", path.display())));
        }
        entries.push(ManifestEntry { id, path, label, group });
    }
    if entries.is_empty() {
        return Err(HarnessError::Validation(format!("{}: no rows", source.display())));
    }
    Ok(entries)
}

pub fn parse_manifest(path: &Path) -> Result<Manifest, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Validation(format!("cannot read manifest {}: {e}", path.display())))?;
    let base_dir = path.parent().unwrap_or(Path::new(""));
    let entries = parse_manifest_str(&text, path, base_dir)?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "dataset".into());
    Ok(Manifest { name, source: path.to_path_buf(), entries })
}
