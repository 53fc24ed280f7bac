//! Binary on-disk cache for radial eigen-decompositions.
//!
//! Layout of one cache file (all integers little-endian):
//!   magic   "GRLB" (4 bytes)
//!   version u32
//!   d       u32
//!   m       u32
//!   n       u64   (interior grid nodes)
//!   k       u64   (number of cached modes)
//!   radius  f64
//!   mu      f64
//!   eigenvalues  k × f64
//!   profiles     k × n × f64, row-major
//!
//! A version bump invalidates every existing file (stale files read as a
//! cache miss, never as an error).

use crate::error::Result;
use crate::radial::{solve_modes, RadialGrid, RadialMode, RadialProblem};

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

pub const CACHE_MAGIC: &[u8; 4] = b"GRLB";
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheKey {
    pub d: u32,
    pub radius: f64,
    pub mu: f64,
    pub m: u32,
    pub n: u64,
    pub k: u64,
}

impl CacheKey {
    pub fn new(problem: &RadialProblem, grid: &RadialGrid, k_max: usize) -> Self {
        CacheKey {
            d: problem.d,
            radius: problem.radius,
            mu: problem.mu,
            m: problem.m,
            n: grid.n() as u64,
            k: k_max as u64,
        }
    }
}

/// File path for a key under `root`: cache/radial/<fields>.bin, with the
/// float fields encoded by their exact bit patterns.
pub fn cache_path(root: &Path, key: &CacheKey) -> PathBuf {
    root.join("radial").join(format!(
        "d{}_m{}_n{}_k{}_R{:016x}_mu{:016x}.bin",
        key.d,
        key.m,
        key.n,
        key.k,
        key.radius.to_bits(),
        key.mu.to_bits()
    ))
}

pub fn store(root: &Path, key: &CacheKey, eigenvalues: &[f64], profiles: &[Vec<f64>]) -> Result<()> {
    assert_eq!(eigenvalues.len(), key.k as usize);
    assert!(profiles.iter().all(|p| p.len() == key.n as usize));
    let path = cache_path(root, key);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut buf = Vec::with_capacity(40 + 8 * eigenvalues.len() * (1 + key.n as usize));
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    buf.extend_from_slice(&key.d.to_le_bytes());
    buf.extend_from_slice(&key.m.to_le_bytes());
    buf.extend_from_slice(&key.n.to_le_bytes());
    buf.extend_from_slice(&key.k.to_le_bytes());
    buf.extend_from_slice(&key.radius.to_le_bytes());
    buf.extend_from_slice(&key.mu.to_le_bytes());
    for v in eigenvalues {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for p in profiles {
        for v in p {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    // write-then-rename so concurrent readers never see a torn file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&buf)?;
    }
    fs::rename(&tmp, &path)?;
    Ok(())
}

/// Load a cache entry. Missing files, stale versions, or any key mismatch
/// read as `None`.
pub fn load(root: &Path, key: &CacheKey) -> Result<Option<(Vec<f64>, Vec<Vec<f64>>)>> {
    let path = cache_path(root, key);
    let mut bytes = Vec::new();
    match fs::File::open(&path) {
        Ok(mut f) => {
            f.read_to_end(&mut bytes)?;
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    }
    // header: 4 magic + 4 version + 4 d + 4 m + 8 n + 8 k + 8 radius + 8 mu
    let header = 48;
    let k = key.k as usize;
    let n = key.n as usize;
    let expect = header + 8 * k * (1 + n);
    if bytes.len() != expect || &bytes[0..4] != CACHE_MAGIC {
        return Ok(None);
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    if u32_at(4) != CACHE_VERSION
        || u32_at(8) != key.d
        || u32_at(12) != key.m
        || u64_at(16) != key.n
        || u64_at(24) != key.k
        || f64_at(32).to_bits() != key.radius.to_bits()
        || f64_at(40).to_bits() != key.mu.to_bits()
    {
        return Ok(None);
    }
    let eigenvalues: Vec<f64> = (0..k).map(|i| f64_at(header + 8 * i)).collect();
    let base = header + 8 * k;
    let profiles: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..n).map(|j| f64_at(base + 8 * (i * n + j))).collect())
        .collect();
    Ok(Some((eigenvalues, profiles)))
}

/// Solve the radial eigenproblem through the cache: load on a hit, otherwise
/// compute with `solve_modes` and store. Results are bit-identical across
/// warm and cold runs because the stored data is the solver output itself.
pub fn cached_solve_modes(
    root: &Path,
    problem: &RadialProblem,
    grid: &RadialGrid,
    k_max: usize,
) -> Result<Vec<RadialMode>> {
    let key = CacheKey::new(problem, grid, k_max);
    if let Some((eigenvalues, profiles)) = load(root, &key)? {
        let h = grid.h;
        let n = grid.n();
        let modes = eigenvalues
            .into_iter()
            .zip(profiles)
            .enumerate()
            .map(|(i, (eigenvalue, profile))| {
                let boundary_slope = (profile[n - 2] - 4.0 * profile[n - 1]) / (2.0 * h);
                RadialMode {
                    problem: *problem,
                    eigenvalue,
                    index: i + 1,
                    profile,
                    boundary_slope,
                }
            })
            .collect();
        return Ok(modes);
    }
    let modes = solve_modes(problem, grid, k_max)?;
    let eigenvalues: Vec<f64> = modes.iter().map(|m| m.eigenvalue).collect();
    let profiles: Vec<Vec<f64>> = modes.iter().map(|m| m.profile.clone()).collect();
    store(root, &key, &eigenvalues, &profiles)?;
    Ok(modes)
}
