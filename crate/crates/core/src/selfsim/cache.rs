//! Plain-text cache files for enumerated groups.
//!
//! Layout: a header line `name level order checksum`, then the sorted wire
//! encodings of the elements, one per line. The checksum is the SHA-256 of
//! the element lines joined by `\n`; readers that meet a three-field header
//! skip the checksum and rely on the remaining validation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::LevelGroup;
use crate::error::{Error, Result};
use crate::treeauto::Portrait;

fn checksum(lines: &[String]) -> String {
    let mut h = Sha256::new();
    h.update(lines.join("\n").as_bytes());
    hex::encode(h.finalize())
}

pub fn render_group(name: &str, group: &LevelGroup) -> Result<String> {
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(Error::InvalidArgument(format!("cache name {name:?} must be one token")));
    }
    let mut lines: Vec<String> = group.elements().iter().map(Portrait::encode).collect();
    lines.sort();
    let mut out = format!("{name} {} {} {}\n", group.level(), group.order(), checksum(&lines));
    for l in &lines {
        out.push_str(l);
        out.push('\n');
    }
    Ok(out)
}

/// Parse a cache file, checking the header against `name` and `level`.
pub fn parse_group(text: &str, name: &str, level: usize) -> Result<LevelGroup> {
    let reject = |why: String| Error::Cache(why);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| reject("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 && fields.len() != 4 {
        return Err(reject(format!("malformed header {header:?}")));
    }
    if fields[0] != name {
        return Err(reject(format!("name {} does not match {name}", fields[0])));
    }
    if fields[1].parse::<usize>().ok() != Some(level) {
        return Err(reject(format!("level {} does not match {level}", fields[1])));
    }
    let order: usize = fields[2].parse().map_err(|_| reject(format!("bad order {:?}", fields[2])))?;
    let body: Vec<String> = lines.map(str::to_string).filter(|l| !l.is_empty()).collect();
    if body.len() != order {
        return Err(reject(format!("header says {order} elements, file has {}", body.len())));
    }
    if !body.windows(2).all(|w| w[0] < w[1]) {
        return Err(reject("element lines are not strictly sorted".into()));
    }
    if fields.len() == 4 && fields[3] != checksum(&body) {
        return Err(reject("checksum mismatch".into()));
    }
    let elements = body
        .iter()
        .map(|l| Portrait::decode(l).map_err(|e| reject(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    LevelGroup::from_elements(level, elements).map_err(|e| reject(e.to_string()))
}

/// File name used for `(system, name, level)`.
pub fn cache_path(dir: &Path, system: &str, name: &str, level: usize) -> PathBuf {
    let safe: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    dir.join(format!("{system}-{safe}-L{level}.grp"))
}

pub fn write_group(path: &Path, name: &str, group: &LevelGroup) -> Result<()> {
    let text = render_group(name, group)?;
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::Cache(e.to_string()))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::Cache(e.to_string()))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::Cache(e.to_string()))
}

pub fn read_group(path: &Path, name: &str, level: usize) -> Result<LevelGroup> {
    let text = fs::read_to_string(path).map_err(|e| Error::Cache(e.to_string()))?;
    parse_group(&text, name, level)
}

/// Read a cached group, or compute and store it when the file is missing
/// or rejected. Write failures are ignored; the cache is advisory.
pub fn load_or_compute(
    dir: Option<&Path>,
    system: &str,
    name: &str,
    level: usize,
    compute: impl FnOnce() -> Result<LevelGroup>,
) -> Result<LevelGroup> {
    let Some(dir) = dir else {
        return compute();
    };
    let path = cache_path(dir, system, name, level);
    if let Ok(g) = read_group(&path, name, level) {
        return Ok(g);
    }
    let g = compute()?;
    let _ = write_group(&path, name, &g);
    Ok(g)
}
