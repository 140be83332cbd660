//! Line-delimited JSON cache for [`RichCountTable`]s.
//!
//! The first line is a header `{schema_version, tool_version, q, ...}`; every
//! following line is one record `{schema_version, q, n, count, max_luf}` with
//! `count` as a decimal string.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::enumerate::{RichCountEntry, RichCountTable, TableProvenance};
use crate::error::CacheError;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "RICHLAB_CACHE_DIR";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    schema_version: u32,
    tool_version: String,
    q: u32,
    symmetric: bool,
    created_unix: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    schema_version: u32,
    q: u32,
    n: usize,
    count: String,
    max_luf: Option<usize>,
}

/// Renders the cache file contents.
pub fn render_cache(table: &RichCountTable) -> String {
    let header = Header {
        schema_version: SCHEMA_VERSION,
        tool_version: table.provenance.tool_version.clone(),
        q: table.q,
        symmetric: table.provenance.symmetric,
        created_unix: table.provenance.created_unix,
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for e in &table.entries {
        let record = Record {
            schema_version: SCHEMA_VERSION,
            q: table.q,
            n: e.n,
            count: e.count.to_str_radix(10),
            max_luf: e.max_luf,
        };
        out.push_str(&serde_json::to_string(&record).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn save_cache(table: &RichCountTable, path: &Path) -> Result<(), CacheError> {
    fs::write(path, render_cache(table)).map_err(|source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Stamps the current time into the table's provenance.
pub fn stamp_now(table: &mut RichCountTable) {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    table.provenance.created_unix = Some(now);
}

pub fn load_cache(path: &Path, expected_q: Option<u32>) -> Result<RichCountTable, CacheError> {
    let text = fs::read_to_string(path).map_err(|source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_cache(&text, path, expected_q)
}

pub fn parse_cache(
    text: &str,
    path: &Path,
    expected_q: Option<u32>,
) -> Result<RichCountTable, CacheError> {
    let malformed = |line: usize, reason: String| CacheError::Malformed {
        path: PathBuf::from(path),
        line,
        reason,
    };
    if !text.ends_with('\n') {
        return Err(malformed(
            text.lines().count().max(1),
            "file does not end with a newline (truncated?)".into(),
        ));
    }
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, first) = lines
        .next()
        .ok_or_else(|| malformed(1, "empty file".into()))?;

    let raw: serde_json::Value =
        serde_json::from_str(first).map_err(|e| malformed(1, format!("bad header: {e}")))?;
    let version = raw
        .get("schema_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| malformed(1, "header lacks schema_version".into()))?;
    if version != u64::from(SCHEMA_VERSION) {
        return Err(CacheError::VersionMismatch {
            found: version as u32,
            expected: SCHEMA_VERSION,
        });
    }
    let header: Header =
        serde_json::from_value(raw).map_err(|e| malformed(1, format!("bad header: {e}")))?;
    if let Some(q) = expected_q {
        if q != header.q {
            return Err(CacheError::QMismatch {
                found: header.q,
                expected: q,
            });
        }
    }

    let mut entries = Vec::new();
    for (line, text) in lines {
        let record: Record =
            serde_json::from_str(text).map_err(|e| malformed(line, format!("bad record: {e}")))?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(CacheError::VersionMismatch {
                found: record.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        if record.q != header.q {
            return Err(malformed(
                line,
                format!("record q = {} differs from header", record.q),
            ));
        }
        if record.n != entries.len() + 1 {
            return Err(malformed(
                line,
                format!("expected n = {}, found {}", entries.len() + 1, record.n),
            ));
        }
        let count = BigUint::parse_bytes(record.count.as_bytes(), 10)
            .filter(|_| record.count.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| {
                malformed(
                    line,
                    format!("count {:?} is not a decimal integer", record.count),
                )
            })?;
        entries.push(RichCountEntry {
            n: record.n,
            count,
            max_luf: record.max_luf,
        });
    }
    Ok(RichCountTable {
        q: header.q,
        entries,
        provenance: TableProvenance {
            symmetric: header.symmetric,
            tool_version: header.tool_version,
            created_unix: header.created_unix,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{count_rich, EnumOptions};

    fn table() -> RichCountTable {
        let mut t = count_rich(2, 9, &EnumOptions::default()).unwrap();
        stamp_now(&mut t);
        t
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r2.jsonl");
        let t = table();
        save_cache(&t, &path).unwrap();
        assert_eq!(load_cache(&path, Some(2)).unwrap(), t);
        assert_eq!(load_cache(&path, None).unwrap(), t);
    }

    #[test]
    fn record_layout() {
        let text = render_cache(&table());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 10);
        assert!(lines[0].starts_with(r#"{"schema_version":1,"tool_version":""#));
        assert_eq!(
            lines[8],
            r#"{"schema_version":1,"q":2,"n":8,"count":"252","max_luf":4}"#
        );
    }

    #[test]
    fn error_kinds() {
        let p = Path::new("mem");
        let text = render_cache(&table());

        let truncated = &text[..text.len() - 10];
        let e = parse_cache(truncated, p, Some(2)).unwrap_err();
        assert!(matches!(e, CacheError::Malformed { .. }), "{e}");
        assert_eq!(e.code(), 10);

        let e = parse_cache(&text, p, Some(3)).unwrap_err();
        assert!(matches!(
            e,
            CacheError::QMismatch {
                found: 2,
                expected: 3
            }
        ));
        assert_eq!(e.code(), 12);

        let bumped = text.replace("\"schema_version\":1", "\"schema_version\":2");
        let e = parse_cache(&bumped, p, Some(2)).unwrap_err();
        assert!(matches!(e, CacheError::VersionMismatch { found: 2, .. }));
        assert_eq!(e.code(), 11);

        assert!(matches!(
            parse_cache("", p, None),
            Err(CacheError::Malformed { .. })
        ));
        let bad_count = text.replace("\"252\"", "\"25x\"");
        assert!(matches!(
            parse_cache(&bad_count, p, None),
            Err(CacheError::Malformed { line: 9, .. })
        ));
        let gap: String = text
            .lines()
            .enumerate()
            .filter(|(i, _)| *i != 3)
            .map(|(_, l)| format!("{l}\n"))
            .collect();
        assert!(matches!(
            parse_cache(&gap, p, None),
            Err(CacheError::Malformed { .. })
        ));

        let e = load_cache(Path::new("/nonexistent/cache.jsonl"), None).unwrap_err();
        assert!(matches!(e, CacheError::Io { .. }));
    }
}
