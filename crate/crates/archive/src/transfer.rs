//! Zip bulk import and export.
//!
//! Exports hold one `<id>.<ext>` entry per graph, a `manifest.txt` with one
//! `id<TAB>name<TAB>format` line per graph, and the conversion's loss report
//! as `losses/<id>.json`.

use std::collections::{BTreeMap, HashMap};
use std::io::{Cursor, Read, Write};

use chrono::{DateTime, Utc};
use oga_core::formats::{self, FormatId, LossReport};
use oga_core::metadata::Tag;
use oga_core::Metadata;
use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, ZipArchive, ZipWriter};

use crate::{GraphId, Result, Store, StoreError};

pub const MANIFEST_NAME: &str = "manifest.txt";
const LOSS_DIR: &str = "losses/";

#[derive(Debug, Clone, Default)]
pub struct ImportOptions {
    /// Creator recorded on every imported graph.
    pub creator: String,
    /// Format overrides by entry name; other entries use the manifest or
    /// content sniffing.
    pub formats: BTreeMap<String, FormatId>,
    pub tags: Vec<Tag>,
    /// Defaults to the import time.
    pub uploaded_at: Option<DateTime<Utc>>,
}

#[derive(Debug)]
pub struct ImportEntry {
    pub filename: String,
    pub result: Result<GraphId>,
}

struct ManifestLine {
    name: String,
    format: FormatId,
}

fn parse_manifest(text: &str) -> HashMap<String, ManifestLine> {
    text.lines()
        .filter_map(|line| {
            let mut parts = line.split('\t');
            let (id, name, format) = (parts.next()?, parts.next()?, parts.next()?);
            Some((
                id.to_string(),
                ManifestLine {
                    name: name.to_string(),
                    format: format.trim().parse().ok()?,
                },
            ))
        })
        .collect()
}

fn one_line(s: &str) -> String {
    s.replace(['\t', '\r', '\n'], " ")
}

fn corrupt(e: impl std::fmt::Display) -> StoreError {
    StoreError::CorruptArchive(e.to_string())
}

fn stem(path: &str) -> &str {
    let file = path.rsplit('/').next().unwrap_or(path);
    match file.rfind('.') {
        Some(i) if i > 0 => &file[..i],
        _ => file,
    }
}

impl Store {
    /// Imports every graph file in the archive independently. A container
    /// that cannot be read fails as a whole before anything is stored;
    /// otherwise each entry reports its own id or error.
    pub fn import_zip(&self, bytes: &[u8], options: &ImportOptions) -> Result<Vec<ImportEntry>> {
        let mut archive = ZipArchive::new(Cursor::new(bytes)).map_err(corrupt)?;
        let mut files = Vec::new();
        let mut manifest = HashMap::new();
        for i in 0..archive.len() {
            let mut entry = archive.by_index(i).map_err(corrupt)?;
            if entry.is_dir() {
                continue;
            }
            let name = entry.name().map_err(corrupt)?.into_owned();
            let mut data = Vec::new();
            entry.read_to_end(&mut data).map_err(corrupt)?;
            if name == MANIFEST_NAME {
                manifest = parse_manifest(&String::from_utf8_lossy(&data));
            } else if !name.starts_with(LOSS_DIR) && !name.starts_with("__MACOSX/") {
                files.push((name, data));
            }
        }
        let uploaded_at = options.uploaded_at.unwrap_or_else(Utc::now);
        let mut out = Vec::with_capacity(files.len());
        for (filename, data) in files {
            let listed = manifest.get(stem(&filename));
            let result = (|| {
                let format = match options.formats.get(&filename) {
                    Some(f) => *f,
                    None => match listed {
                        Some(line) => line.format,
                        None => formats::detect_format(&data)?,
                    },
                };
                let name = listed.map_or_else(|| stem(&filename).to_string(), |l| l.name.clone());
                let mut meta = Metadata::new(name, options.creator.clone(), uploaded_at)?;
                meta.set_tags(options.tags.iter().cloned());
                self.put_graph(&data, format, meta)
            })();
            out.push(ImportEntry { filename, result });
        }
        Ok(out)
    }

    /// Converts each graph to `format` and packs the results. Fails if any
    /// id is unknown or deleted.
    pub fn export_zip(&self, ids: &[GraphId], format: FormatId) -> Result<Vec<u8>> {
        let names = self.names(ids)?;
        let mut converted: Vec<(Vec<u8>, LossReport)> = Vec::with_capacity(ids.len());
        for id in ids {
            converted.push(formats::serialize(&self.canonical(id)?, format)?);
        }
        let options = SimpleFileOptions::default().compression_method(CompressionMethod::Deflated);
        let mut zip = ZipWriter::new(Cursor::new(Vec::new()));
        let mut manifest = String::new();
        let zip_err = |e: zip::result::ZipError| StoreError::Io(std::io::Error::other(e));
        for ((id, name), (bytes, report)) in ids.iter().zip(&names).zip(&converted) {
            zip.start_file(format!("{id}.{}", format.extension()), options)
                .map_err(zip_err)?;
            zip.write_all(bytes)?;
            zip.start_file(format!("{LOSS_DIR}{id}.json"), options).map_err(zip_err)?;
            let report = serde_json::to_vec_pretty(report).map_err(|e| StoreError::Corrupt(e.to_string()))?;
            zip.write_all(&report)?;
            manifest.push_str(&format!("{id}\t{}\t{}\n", one_line(name), format.as_str()));
        }
        zip.start_file(MANIFEST_NAME, options).map_err(zip_err)?;
        zip.write_all(manifest.as_bytes())?;
        Ok(zip.finish().map_err(zip_err)?.into_inner())
    }
}
