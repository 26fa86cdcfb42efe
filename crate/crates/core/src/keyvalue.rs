//! Plain-text `key=value` files used for clutter schemes, height tables and
//! sweep manifests. Blank lines and `#` comments are ignored.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> Result<Vec<Entry>> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            msg: format!("expected key=value, got `{line}`"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: "empty key".into(),
            });
        }
        entries.push(Entry {
            line: idx + 1,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(entries)
}

impl Entry {
    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: format!("`{}`: {}", self.key, msg.into()),
        }
    }
}
