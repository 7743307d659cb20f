use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{CompanyMeta, CorpusError, DocumentRecord, ServiceArea};

pub const MANIFEST_HEADER: [&str; 7] =
    ["company_id", "display_name", "service_area", "country", "industry", "year", "path"];

/// Loads a manifest CSV and every text file it names.
///
/// Relative text paths resolve against the manifest's directory. Results
/// are sorted by `company_id`, documents additionally by year.
pub fn load_manifest(manifest_path: &Path) -> Result<(Vec<CompanyMeta>, Vec<DocumentRecord>), CorpusError> {
    if !manifest_path.is_file() {
        return Err(CorpusError::MissingFile(manifest_path.to_path_buf()));
    }
    let base = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(manifest_path)
        .map_err(|e| CorpusError::MalformedRow(1, e.to_string()))?;

    let header = reader.headers().map_err(|e| CorpusError::MalformedRow(1, e.to_string()))?;
    let header: Vec<&str> = header.iter().map(str::trim).collect();
    if header != MANIFEST_HEADER {
        return Err(CorpusError::MalformedRow(1, format!("unexpected header {:?}", header)));
    }

    let mut companies: BTreeMap<String, CompanyMeta> = BTreeMap::new();
    let mut docs: BTreeMap<(String, i32), (PathBuf, u64)> = BTreeMap::new();

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CorpusError::MalformedRow(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != MANIFEST_HEADER.len() {
            return Err(CorpusError::MalformedRow(
                line,
                format!("expected {} fields, found {}", MANIFEST_HEADER.len(), record.len()),
            ));
        }
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let company_id = field(0);
        if company_id.is_empty() {
            return Err(CorpusError::MalformedRow(line, "empty company_id".into()));
        }
        let service_area: ServiceArea = field(2).parse()?;
        let year: i32 = field(5)
            .parse()
            .map_err(|_| CorpusError::MalformedRow(line, format!("bad year `{}`", field(5))))?;
        let rel = field(6);
        if rel.is_empty() {
            return Err(CorpusError::MalformedRow(line, "empty path".into()));
        }
        let meta = CompanyMeta {
            company_id: company_id.to_string(),
            display_name: field(1).to_string(),
            service_area,
            country: field(3).to_string(),
            industry: field(4).to_string(),
        };
        match companies.entry(meta.company_id.clone()) {
            Entry::Vacant(slot) => {
                slot.insert(meta);
            }
            Entry::Occupied(existing) if *existing.get() != meta => {
                return Err(CorpusError::MalformedRow(
                    line,
                    format!("metadata for `{}` conflicts with an earlier row", company_id),
                ));
            }
            Entry::Occupied(_) => {}
        }
        match docs.entry((company_id.to_string(), year)) {
            Entry::Vacant(slot) => {
                slot.insert((base.join(rel), line));
            }
            Entry::Occupied(_) => {
                return Err(CorpusError::DuplicateCompanyYear(company_id.to_string(), year));
            }
        }
    }

    let mut records = Vec::with_capacity(docs.len());
    for ((company_id, year), (path, _line)) in docs {
        if !path.is_file() {
            return Err(CorpusError::MissingFile(path));
        }
        let raw_text = fs::read_to_string(&path).map_err(|source| CorpusError::Io { path: path.clone(), source })?;
        records.push(DocumentRecord { doc_id: format!("{company_id}-{year}"), company_id, year, raw_text });
    }
    Ok((companies.into_values().collect(), records))
}
