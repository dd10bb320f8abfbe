use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::points::{an_from_ap, prime_coefficient};
use super::EllipticCurve;
use crate::arith;
use crate::error::{Error, Result};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "ECBF_CACHE_DIR";

/// One file per curve holding `"l a_l"` lines in ascending `l`.
#[derive(Debug, Clone)]
pub struct ApCache {
    dir: PathBuf,
}

impl ApCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ApCache { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).map(ApCache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, e: &EllipticCurve) -> PathBuf {
        self.dir.join(format!("ap_{}.txt", e.cache_key()))
    }

    pub fn load(&self, e: &EllipticCurve) -> Result<BTreeMap<u64, i64>> {
        let path = self.path_for(e);
        if !path.exists() {
            return Ok(BTreeMap::new());
        }
        let text = fs::read_to_string(&path)?;
        let mut out = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let mut it = line.split_whitespace();
            let parsed = match (it.next(), it.next(), it.next()) {
                (Some(l), Some(a), None) => l.parse::<u64>().ok().zip(a.parse::<i64>().ok()),
                _ => None,
            };
            let (l, a) = parsed.ok_or_else(|| {
                Error::Parse(format!("{}:{}: expected \"l a_l\"", path.display(), i + 1))
            })?;
            out.insert(l, a);
        }
        Ok(out)
    }

    /// Returns `a_l` for all primes `l <= bound`, computing and persisting any missing ones.
    pub fn ensure(&self, e: &EllipticCurve, bound: u64) -> Result<BTreeMap<u64, i64>> {
        let mut known = self.load(e)?;
        let missing: Vec<u64> = arith::primes_up_to(bound)
            .into_iter()
            .filter(|l| !known.contains_key(l))
            .collect();
        if missing.is_empty() {
            return Ok(known);
        }
        let fresh: Vec<(u64, i64)> = missing
            .par_iter()
            .map(|&l| prime_coefficient(e, l).map(|a| (l, a)))
            .collect::<Result<_>>()?;
        known.extend(fresh);
        self.store(e, &known)?;
        Ok(known)
    }

    fn store(&self, e: &EllipticCurve, values: &BTreeMap<u64, i64>) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(e);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            for (l, a) in values {
                writeln!(f, "{l} {a}")?;
            }
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// `a_1..=a_bound`, backed by the cache.
    pub fn an_sequence(&self, e: &EllipticCurve, bound: usize) -> Result<Vec<i64>> {
        if bound == 0 {
            return Err(Error::Domain("bound must be at least 1".into()));
        }
        let ap = self.ensure(e, bound as u64)?;
        Ok(an_from_ap(e, &ap, bound))
    }
}
