//! On-disk cache of Gram entries.
//!
//! Text file, one record per line after a `# nyman-gram-cache v1` header:
//!
//! ```text
//! <variant> <j> <k> <budget-fingerprint hex> <value bits hex> <err bits hex> <crc32 hex>
//! ```
//!
//! `j = 0` denotes `χ`, so `(0, k)` records hold the right-hand side. The
//! checksum covers everything before it on the line. Lines that fail to parse
//! or whose checksum does not match are dropped and recomputed. The file is
//! rewritten through a temporary file and an atomic rename, so readers never
//! observe a partial write; concurrent writers are not coordinated (last one
//! wins, every version is self-consistent).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;

const HEADER: &str = "# nyman-gram-cache v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CacheKey {
    pub variant: &'static str,
    pub j: u64,
    pub k: u64,
    pub fingerprint: u32,
}

#[derive(Debug, Default)]
pub struct GramCache {
    path: Option<PathBuf>,
    entries: BTreeMap<CacheKey, (f64, f64)>,
    dirty: bool,
    rejected: usize,
}

fn record_body(key: &CacheKey, value: f64, err: f64) -> String {
    format!(
        "{} {} {} {:08x} {:016x} {:016x}",
        key.variant,
        key.j,
        key.k,
        key.fingerprint,
        value.to_bits(),
        err.to_bits()
    )
}

fn parse_record(line: &str) -> Option<(CacheKey, f64, f64)> {
    let (body, crc) = line.rsplit_once(' ')?;
    if u32::from_str_radix(crc, 16).ok()? != crc32fast::hash(body.as_bytes()) {
        return None;
    }
    let mut it = body.split(' ');
    let variant = match it.next()? {
        "full" => "full",
        "zero" => "zero",
        _ => return None,
    };
    let j = it.next()?.parse().ok()?;
    let k = it.next()?.parse().ok()?;
    let fingerprint = u32::from_str_radix(it.next()?, 16).ok()?;
    let value = f64::from_bits(u64::from_str_radix(it.next()?, 16).ok()?);
    let err = f64::from_bits(u64::from_str_radix(it.next()?, 16).ok()?);
    if it.next().is_some() {
        return None;
    }
    Some((
        CacheKey {
            variant,
            j,
            k,
            fingerprint,
        },
        value,
        err,
    ))
}

impl GramCache {
    /// Cache that lives only in memory.
    pub fn in_memory() -> Self {
        GramCache::default()
    }

    /// Loads `path` if it exists; a missing file is an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut cache = GramCache {
            path: Some(path.clone()),
            ..Default::default()
        };
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e.into()),
        };
        for line in text.lines() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            match parse_record(line) {
                Some((key, v, e)) => {
                    cache.entries.insert(key, (v, e));
                }
                None => {
                    cache.rejected += 1;
                    cache.dirty = true;
                }
            }
        }
        Ok(cache)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Number of records dropped while loading.
    pub fn rejected(&self) -> usize {
        self.rejected
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &CacheKey) -> Option<(f64, f64)> {
        self.entries.get(key).copied()
    }

    pub fn insert(&mut self, key: CacheKey, value: f64, err: f64) {
        if self.entries.insert(key, (value, err)) != Some((value, err)) {
            self.dirty = true;
        }
    }

    /// Writes the cache back if it changed and has a path.
    pub fn flush(&mut self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if !self.dirty {
            return Ok(());
        }
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(
            ".{}.tmp{}",
            path.file_name().and_then(|s| s.to_str()).unwrap_or("gram-cache"),
            std::process::id()
        ));
        {
            let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
            writeln!(f, "{HEADER}")?;
            for (key, (v, e)) in &self.entries {
                let body = record_body(key, *v, *e);
                writeln!(f, "{body} {:08x}", crc32fast::hash(body.as_bytes()))?;
            }
            f.flush()?;
        }
        fs::rename(&tmp, path)?;
        self.dirty = false;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(j: u64, k: u64) -> CacheKey {
        CacheKey {
            variant: "full",
            j,
            k,
            fingerprint: 0xdead_beef,
        }
    }

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gram.txt");
        let mut c = GramCache::open(&path).unwrap();
        assert!(c.is_empty());
        c.insert(key(1, 2), 0.125, 1e-17);
        c.insert(key(2, 2), std::f64::consts::PI, 0.0);
        c.flush().unwrap();

        let c2 = GramCache::open(&path).unwrap();
        assert_eq!(c2.get(&key(1, 2)), Some((0.125, 1e-17)));
        assert_eq!(c2.get(&key(2, 2)), Some((std::f64::consts::PI, 0.0)));

        // Flip one hex digit of the first record's value.
        let text = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let bad = lines[1].replacen("3fc0", "3fc1", 1);
        assert_ne!(bad, lines[1]);
        lines[1] = bad;
        lines.push("garbage line".into());
        fs::write(&path, lines.join("\n")).unwrap();
        let c3 = GramCache::open(&path).unwrap();
        assert_eq!(c3.rejected(), 2);
        assert_eq!(c3.get(&key(1, 2)), None);
        assert_eq!(c3.get(&key(2, 2)), Some((std::f64::consts::PI, 0.0)));
    }
}
