//! Complete lists of isomorphism classes on a fixed number of vertices.
//!
//! Level `k` is generated from level `k - 1` by adding one vertex to each
//! class representative in all `3^(k-1)` ways and deduplicating canonical
//! keys. Every `k`-vertex coloring arises this way, since deleting its last
//! vertex leaves a graph isomorphic to some representative.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::canon::{canonical_form, CanonicalKey, Mode};
use crate::error::{Error, Result};
use crate::graph::{Color, ColoredGraph};

pub const MAX_CENSUS_LEVEL: usize = 6;
pub const CENSUS_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    level: usize,
    mode: Mode,
    members: Vec<CanonicalKey>,
    index: HashMap<u128, usize>,
}

impl Census {
    fn from_sorted(level: usize, mode: Mode, members: Vec<CanonicalKey>) -> Self {
        let index = members.iter().enumerate().map(|(i, k)| (k.code(), i)).collect();
        Census { level, mode, members, index }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[CanonicalKey] {
        &self.members
    }

    pub fn key(&self, id: usize) -> &CanonicalKey {
        &self.members[id]
    }

    /// Census ID of a canonical key of this level and mode.
    pub fn id_of(&self, key: &CanonicalKey) -> Option<usize> {
        if key.n() != self.level || key.mode() != self.mode {
            return None;
        }
        self.index.get(&key.code()).copied()
    }

    /// Census ID of an arbitrary graph on `level` vertices.
    pub fn id_of_graph(&self, g: &ColoredGraph) -> Result<usize> {
        if g.n() != self.level {
            return Err(Error::invalid(format!("graph has {} vertices, census level is {}", g.n(), self.level)));
        }
        let key = canonical_form(g, self.mode)?;
        Ok(self.index[&key.code()])
    }

    /// Census ID of a key given as text; the text must be canonical.
    pub fn id_of_text(&self, text: &str) -> Result<usize> {
        let key = CanonicalKey::parse(text, self.mode)?;
        self.id_of(&key)
            .ok_or_else(|| Error::UnknownKey(format!("{text} is not a level-{} census key", self.level)))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "CENSUS v{CENSUS_FORMAT_VERSION} level={} mode={} count={}\n",
            self.level,
            self.mode,
            self.len()
        );
        for k in &self.members {
            writeln!(out, "{k}").unwrap();
        }
        out
    }

    /// Parses and fully validates a census file.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty census file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "CENSUS" {
            return Err(Error::parse(1, "expected `CENSUS v1 level=<l> mode=<m> count=<c>`"));
        }
        if fields[1] != format!("v{CENSUS_FORMAT_VERSION}") {
            return Err(Error::parse(1, format!("unsupported census version {}", fields[1])));
        }
        let field = |i: usize, name: &str| -> Result<&str> {
            fields[i]
                .strip_prefix(name)
                .and_then(|s| s.strip_prefix('='))
                .ok_or_else(|| Error::parse(1, format!("expected {name}=...")))
        };
        let level: usize = field(2, "level")?.parse().map_err(|_| Error::parse(1, "bad level"))?;
        let mode: Mode = field(3, "mode")?.parse()?;
        let count: usize = field(4, "count")?.parse().map_err(|_| Error::parse(1, "bad count"))?;
        let mut members = Vec::with_capacity(count);
        for (i, line) in lines {
            let key = CanonicalKey::parse(line.trim(), mode).map_err(|e| Error::parse(i + 1, e.to_string()))?;
            if key.n() != level {
                return Err(Error::parse(i + 1, format!("key {key} is not on {level} vertices")));
            }
            if members.last().is_some_and(|prev| *prev >= key) {
                return Err(Error::parse(i + 1, "keys must be strictly increasing"));
            }
            members.push(key);
        }
        if members.len() != count {
            return Err(Error::parse(1, format!("header count {count} but {} keys listed", members.len())));
        }
        Ok(Census::from_sorted(level, mode, members))
    }
}

/// Builds the census from scratch (no caches).
pub fn enumerate_census(level: usize, mode: Mode) -> Result<Census> {
    if level == 0 || level > MAX_CENSUS_LEVEL {
        return Err(Error::Unsupported(format!("census level must be in 1..={MAX_CENSUS_LEVEL}, got {level}")));
    }
    let mut reps = vec![ColoredGraph::from_parts_unchecked(1, Vec::new())];
    let mut keys = vec![canonical_form(&reps[0], mode)?];
    for k in 2..=level {
        let extensions = 3usize.pow(k as u32 - 1);
        let found: Vec<Vec<CanonicalKey>> = reps
            .par_iter()
            .map(|rep| {
                let mut edges: Vec<Color> = vec![0; k - 1];
                (0..extensions)
                    .map(|code| {
                        let mut x = code;
                        for e in edges.iter_mut() {
                            *e = (x % 3) as Color;
                            x /= 3;
                        }
                        canonical_form(&rep.extend(&edges), mode).expect("level within bound")
                    })
                    .collect()
            })
            .collect();
        let set: BTreeSet<CanonicalKey> = found.into_iter().flatten().collect();
        keys = set.into_iter().collect();
        reps = keys.iter().map(|k| k.graph()).collect();
    }
    Ok(Census::from_sorted(level, mode, keys))
}

fn memo() -> &'static Mutex<HashMap<(usize, Mode), Arc<Census>>> {
    static MEMO: OnceLock<Mutex<HashMap<(usize, Mode), Arc<Census>>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// Process-wide memoized census.
pub fn census(level: usize, mode: Mode) -> Result<Arc<Census>> {
    if let Some(c) = memo().lock().unwrap().get(&(level, mode)) {
        return Ok(c.clone());
    }
    let built = Arc::new(enumerate_census(level, mode)?);
    Ok(memo().lock().unwrap().entry((level, mode)).or_insert(built).clone())
}

pub fn cache_file(dir: &Path, level: usize, mode: Mode) -> PathBuf {
    dir.join(format!("census-v{CENSUS_FORMAT_VERSION}-l{level}-{mode}.txt"))
}

/// Census backed by an on-disk cache. A missing, stale or corrupt file is
/// rebuilt and rewritten; the cache never changes the result.
pub fn census_cached(level: usize, mode: Mode, cache_dir: Option<&Path>) -> Result<Arc<Census>> {
    let Some(dir) = cache_dir else {
        return census(level, mode);
    };
    let path = cache_file(dir, level, mode);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(c) = Census::from_text(&text) {
            if c.level == level && c.mode == mode {
                let c = Arc::new(c);
                memo().lock().unwrap().entry((level, mode)).or_insert_with(|| c.clone());
                return Ok(c);
            }
        }
    }
    let c = census(level, mode)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, c.to_text())?;
    fs::rename(&tmp, &path)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_levels() {
        assert_eq!(enumerate_census(1, Mode::ColorBlind).unwrap().len(), 1);
        assert_eq!(enumerate_census(2, Mode::ColorBlind).unwrap().len(), 1);
        assert_eq!(enumerate_census(2, Mode::Exact).unwrap().len(), 3);
        let c3 = enumerate_census(3, Mode::ColorBlind).unwrap();
        let texts: Vec<String> = c3.members().iter().map(|k| k.text()).collect();
        assert_eq!(texts, ["3:000", "3:001", "3:012"]);
        assert_eq!(enumerate_census(3, Mode::Exact).unwrap().len(), 10);
        assert!(enumerate_census(0, Mode::Exact).is_err());
        assert!(enumerate_census(7, Mode::Exact).is_err());
    }

    #[test]
    fn text_round_trip_and_rejections() {
        let c = enumerate_census(4, Mode::ColorBlind).unwrap();
        let text = c.to_text();
        assert_eq!(Census::from_text(&text).unwrap(), c);
        let bad_count = text.replacen(&format!("count={}", c.len()), "count=1", 1);
        assert!(Census::from_text(&bad_count).is_err());
        let mut lines: Vec<&str> = text.lines().collect();
        lines.swap(1, 2);
        assert!(Census::from_text(&lines.join("\n")).is_err());
        assert!(Census::from_text("CENSUS v1 level=3 mode=colorblind count=1\n3:111\n").is_err());
    }

    #[test]
    fn disk_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = census_cached(4, Mode::Exact, Some(dir.path())).unwrap();
        let path = cache_file(dir.path(), 4, Mode::Exact);
        assert!(path.exists());
        let b = census_cached(4, Mode::Exact, Some(dir.path())).unwrap();
        assert_eq!(*a, *b);
        fs::write(&path, "garbage").unwrap();
        let c = census_cached(4, Mode::Exact, Some(dir.path())).unwrap();
        assert_eq!(*a, *c);
        assert!(fs::read_to_string(&path).unwrap().starts_with("CENSUS v1 level=4 mode=exact"));
    }

    #[test]
    fn ids_follow_sorted_order() {
        let c = census(4, Mode::ColorBlind).unwrap();
        for (i, k) in c.members().iter().enumerate() {
            assert_eq!(c.id_of(k), Some(i));
            assert_eq!(c.id_of_graph(&k.graph()).unwrap(), i);
            assert_eq!(c.id_of_text(&k.text()).unwrap(), i);
        }
        assert!(c.id_of_text("4:111111").is_err());
    }
}
