//! Event-log files and their digests.

use std::path::{Path, PathBuf};

use citybrain_core::EventLog;
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: line {line}: corrupt record ({reason})", .path.display())]
    CorruptRecord { path: PathBuf, line: usize, reason: &'static str },
}

/// SHA-256 of the log's file bytes, as lowercase hex.
pub fn log_digest(log: &EventLog) -> String {
    hex::encode(Sha256::digest(log.to_text().as_bytes()))
}

pub fn write_log(log: &EventLog, path: &Path) -> Result<(), LogError> {
    std::fs::write(path, log.to_text()).map_err(|source| LogError::Io { path: path.to_path_buf(), source })
}

pub fn read_log(path: &Path) -> Result<EventLog, LogError> {
    let text = std::fs::read_to_string(path).map_err(|source| LogError::Io { path: path.to_path_buf(), source })?;
    EventLog::parse_text(&text).map_err(|e| LogError::CorruptRecord { path: path.to_path_buf(), line: e.line, reason: e.reason })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario_file::{fixtures, parse_scenario};

    #[test]
    fn file_round_trip_and_truncation() {
        let scenario = parse_scenario(fixtures::FIRE_ALARM).unwrap();
        let log = citybrain_core::run(&scenario, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.log");
        write_log(&log, &path).unwrap();
        assert_eq!(read_log(&path).unwrap(), log);

        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() - 3]).unwrap();
        match read_log(&path) {
            Err(LogError::CorruptRecord { line, .. }) => assert_eq!(line, log.len()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(read_log(Path::new("/nonexistent/run.log")), Err(LogError::Io { .. })));
    }

    #[test]
    fn digest_is_sha256_of_text() {
        assert_eq!(
            log_digest(&EventLog::new()),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
