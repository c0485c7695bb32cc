use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One labelled review; 1 is positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub text: String,
    pub label: u8,
}

impl Review {
    pub fn new(text: impl Into<String>, label: u8) -> Self {
        Review {
            text: text.into(),
            label,
        }
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub path: PathBuf,
    /// Lowercase hex SHA-256 of the file bytes.
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub rows: Vec<Review>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.rows.iter().map(|r| r.label).collect()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Reads a `text<TAB>label` file.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let src = std::str::from_utf8(&bytes).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: 1 + bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count(),
        message: "file is not valid UTF-8".into(),
    })?;
    let rows = parse_dataset(src, &path.display().to_string())?;
    Ok(Dataset {
        rows,
        provenance: Provenance {
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        },
    })
}

/// Parses TSV text. The label is whatever follows the last tab, so review
/// text may itself contain tabs. A first line whose label field is not a
/// number is a header. Blank lines are skipped.
pub fn parse_dataset(src: &str, origin: &str) -> Result<Vec<Review>> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut rows = Vec::new();
    let mut seen_content = false;
    for (i, raw) in src.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        let Some((text, label)) = line.rsplit_once('\t') else {
            return Err(err(line_no, "expected `text<TAB>label`".into()));
        };
        let label = label.trim();
        if label.parse::<f64>().is_err() {
            if first {
                continue;
            }
            return Err(err(line_no, format!("label {label:?} is not a number")));
        }
        let label = match label {
            "0" => 0,
            "1" => 1,
            other => return Err(err(line_no, format!("label {other} is not 0 or 1"))),
        };
        rows.push(Review::new(text, label));
    }
    Ok(rows)
}

/// Writes rows as `text<TAB>label` under a `text<TAB>label` header.
pub fn write_tsv(path: impl AsRef<Path>, rows: &[Review]) -> Result<()> {
    let mut out = String::from("text\tlabel\n");
    for r in rows {
        if r.text.contains('\n') {
            return Err(Error::validation("review text contains a newline"));
        }
        let _ = writeln!(out, "{}\t{}", r.text, r.label);
    }
    std::fs::write(path.as_ref(), out).map_err(|e| Error::io(path.as_ref(), e))
}
