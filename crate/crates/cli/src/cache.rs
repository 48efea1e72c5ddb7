//! Content-addressed store of minimal resolutions.
//!
//! The key is the SHA-256 of the module's canonical encoding (which covers
//! the algebra and the field), the homological bound and the window top.
//! Entries live in memory for the process and, when a directory is given,
//! as JSON files written through a temporary file and a rename. All writes
//! go through one mutex.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use dkoszul_core::gmod::{Generator, GradedModule};
use dkoszul_core::resolve::{minimal_resolution_to, Resolution, ResolutionProvider, ResolveError};
use dkoszul_core::scalar::Field;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const TAG: &[u8] = b"dkoszul-resolution-v1";

pub fn cache_key<F: Field>(m: &GradedModule<F>, h: usize, hi: i32) -> String {
    let mut bytes = TAG.to_vec();
    m.encode(&mut bytes);
    bytes.extend_from_slice(&(h as u64).to_le_bytes());
    bytes.extend_from_slice(&hi.to_le_bytes());
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct StoredLevel {
    /// `(vertex, degree)` per generator.
    gens: Vec<(usize, i32)>,
    /// Differential images as `(index, coefficient)` lists.
    images: Vec<Vec<(usize, String)>>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct Stored {
    field: String,
    lo: i32,
    hi: i32,
    levels: Vec<StoredLevel>,
}

#[derive(Default, Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    /// Stored entries that disagreed with a fresh computation.
    pub mismatches: usize,
}

pub struct Cache<F: Field> {
    dir: Option<PathBuf>,
    verify: bool,
    memory: Mutex<BTreeMap<String, Arc<Resolution<F>>>>,
    hits: AtomicUsize,
    misses: AtomicUsize,
    mismatches: AtomicUsize,
}

impl<F: Field> Cache<F> {
    /// `dir = None` keeps entries in memory only. With `verify`, every hit
    /// is recomputed and compared byte for byte.
    pub fn new(dir: Option<PathBuf>, verify: bool) -> Self {
        Cache {
            dir,
            verify,
            memory: Mutex::new(BTreeMap::new()),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
            mismatches: AtomicUsize::new(0),
        }
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            mismatches: self.mismatches.load(Ordering::Relaxed),
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn lookup(&self, m: &Arc<GradedModule<F>>, h: usize, hi: i32) -> Option<Arc<Resolution<F>>> {
        let key = cache_key(m, h, hi);
        if let Some(r) = self.memory.lock().unwrap().get(&key) {
            return Some(r.clone());
        }
        let text = fs::read_to_string(self.path(&key)?).ok()?;
        let stored: Stored = serde_json::from_str(&text).ok()?;
        let r = Arc::new(decode(m, &stored)?);
        self.memory.lock().unwrap().insert(key, r.clone());
        Some(r)
    }

    pub fn store(&self, m: &GradedModule<F>, h: usize, hi: i32, res: &Arc<Resolution<F>>) -> std::io::Result<()> {
        let key = cache_key(m, h, hi);
        let mut memory = self.memory.lock().unwrap();
        memory.insert(key.clone(), res.clone());
        if let Some(path) = self.path(&key) {
            write_atomic(&path, &serde_json::to_string(&encode(res)).expect("serializable"))?;
        }
        Ok(())
    }
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = path.parent().expect("cache file has a parent");
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}

fn encode<F: Field>(res: &Resolution<F>) -> Stored {
    let f = res.field();
    let (lo, hi) = res.window();
    Stored {
        field: f.descriptor().to_string(),
        lo,
        hi,
        levels: res
            .parts()
            .into_iter()
            .map(|(gens, images)| StoredLevel {
                gens: gens.iter().map(|g| (g.vertex, g.degree)).collect(),
                images: images
                    .iter()
                    .map(|img| img.iter().map(|(k, c)| (*k, f.format_elem(c))).collect())
                    .collect(),
            })
            .collect(),
    }
}

fn decode<F: Field>(m: &Arc<GradedModule<F>>, s: &Stored) -> Option<Resolution<F>> {
    let f = m.field();
    if s.field != f.descriptor().to_string() || s.lo != m.lo() {
        return None;
    }
    let mut parts = Vec::with_capacity(s.levels.len());
    for level in &s.levels {
        let gens = level.gens.iter().map(|&(v, d)| Generator::new(v, d)).collect();
        let mut images = Vec::with_capacity(level.images.len());
        for img in &level.images {
            let mut sv = Vec::with_capacity(img.len());
            for (k, c) in img {
                sv.push((*k, f.parse_elem(c)?));
            }
            images.push(sv);
        }
        parts.push((gens, images));
    }
    Resolution::from_parts(m.clone(), s.lo, s.hi, parts).ok()
}

impl<F: Field> ResolutionProvider<F> for Cache<F> {
    fn resolve(&self, m: &Arc<GradedModule<F>>, h: usize, hi: i32) -> Result<Arc<Resolution<F>>, ResolveError> {
        if let Some(hit) = self.lookup(m, h, hi) {
            if !self.verify {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(hit);
            }
            let fresh = Arc::new(minimal_resolution_to(m, h, hi)?);
            let (mut a, mut b) = (Vec::new(), Vec::new());
            hit.encode(&mut a);
            fresh.encode(&mut b);
            if a == b {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(hit);
            }
            self.mismatches.fetch_add(1, Ordering::Relaxed);
            let _ = self.store(m, h, hi, &fresh);
            return Ok(fresh);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let fresh = Arc::new(minimal_resolution_to(m, h, hi)?);
        let _ = self.store(m, h, hi, &fresh);
        Ok(fresh)
    }
}
