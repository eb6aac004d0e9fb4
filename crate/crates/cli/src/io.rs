//! File output: atomic writes, the episode CSV log, and git-style hashes.

use std::fs;
use std::path::Path;

use qtrl_core::EpisodeRecord;
use sha1::{Digest, Sha1};

use crate::error::{CliError, CliResult};

pub const LOG_HEADER: &str = "episode,total_reward,loss,delta_theta_sq_cum,elapsed_ms";

/// Writes `contents` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::invalid(path, "not a file path"))?
        .to_string_lossy();
    let tmp = path.with_file_name(format!(".{file_name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn log_csv(records: &[EpisodeRecord]) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for record in records {
        writer
            .serialize(record)
            .expect("serializing plain records into memory cannot fail");
    }
    let bytes = writer.into_inner().expect("in-memory writer");
    if records.is_empty() {
        format!("{LOG_HEADER}\n").into_bytes()
    } else {
        bytes
    }
}

pub fn read_log_csv(path: &Path) -> CliResult<Vec<EpisodeRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().collect::<Vec<_>>().join(",") != LOG_HEADER {
        return Err(CliError::invalid(
            path,
            format!("unexpected log header {header:?}"),
        ));
    }
    reader
        .deserialize()
        .collect::<Result<Vec<EpisodeRecord>, _>>()
        .map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            _ => unreachable!(),
        }
    } else {
        CliError::invalid(path, e.to_string())
    }
}

/// `git hash-object` of `contents`: SHA-1 over `"blob <len>\0" + contents`.
pub fn git_blob_hash(contents: &[u8]) -> String {
    let mut hasher = Sha1::new();
    hasher.update(format!("blob {}\0", contents.len()).as_bytes());
    hasher.update(contents);
    hex::encode(hasher.finalize())
}
