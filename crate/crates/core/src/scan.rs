//! Scan for the even `n` without a continued-fraction witness, i.e. those
//! with `Δ_ρ*(C_n) = {1, n-2}`.
//!
//! Engine E1 tries every `a` for every `n`. Engine E2 inverts the search: for
//! each prime `t` it generates the regular expansions `[a_0, …, a_m]` with
//! `a_0 ≡ a_m ≡ 1` and `a_1, …, a_{m-1} ≡ 0 (mod t)`, whose continuants are
//! exactly the pairs `(n, a)` with `t | gcd(a_0 - 1, a_1, …, a_m - 1)`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::arith::{gcd, primes_up_to};
use crate::cyclic_cf::smallest_witness;
use crate::error::{Error, Result};

/// Largest `n` accepted by the scan; keeps every continuant product in `u64`.
pub const MAX_SCAN_BOUND: u64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    E1,
    E2,
    Both,
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub engine: Engine,
    pub shards: usize,
    /// Completed shards are appended here as `lo hi sha256`; their results go
    /// to the same path with a `.results` suffix so a rerun can resume.
    pub checkpoint: Option<PathBuf>,
    /// Collect the smallest witness for each non-exceptional even `n`.
    /// Resumed shards carry no witnesses, so this disables resuming.
    pub witnesses: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            engine: Engine::E2,
            shards: 1,
            checkpoint: None,
            witnesses: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub lo: u64,
    pub hi: u64,
    pub exceptional: Vec<u64>,
    /// Smallest witness `a` for every even non-exceptional `n` in range
    /// (empty when witnesses were not requested).
    pub witnesses: BTreeMap<u64, u64>,
    /// Shards restored from a checkpoint rather than recomputed.
    pub resumed_shards: usize,
}

struct ShardResult {
    exceptional: Vec<u64>,
    witnesses: Vec<(u64, u64)>,
}

fn e1_shard(lo: u64, hi: u64, witnesses: bool) -> ShardResult {
    let first = lo + lo % 2;
    let count = if first > hi { 0 } else { (hi - first) / 2 + 1 };
    let found: Vec<(u64, Option<u64>)> = (0..count)
        .into_par_iter()
        .map(|i| first + 2 * i)
        .map(|n| (n, smallest_witness(n)))
        .collect();
    let exceptional = found.iter().filter(|(_, w)| w.is_none()).map(|(n, _)| *n).collect();
    let witnesses = if witnesses {
        found.into_iter().filter_map(|(n, w)| w.map(|a| (n, a))).collect()
    } else {
        Vec::new()
    };
    ShardResult { exceptional, witnesses }
}

struct E2Shard<'a> {
    lo: u64,
    hi: u64,
    best: &'a [AtomicU64],
}

impl E2Shard<'_> {
    fn mark(&self, n: u64, a: u64) {
        if n >= self.lo && n.is_multiple_of(2) {
            self.best[((n - self.lo) / 2) as usize].fetch_min(a, Ordering::Relaxed);
        }
    }

    /// State after `a_0 … a_i`: `p = p_i`, `pp = p_{i-1}`, likewise `q`.
    fn extend(&self, t: u64, p: u64, pp: u64, q: u64, qp: u64) {
        // final quotient ≡ 1 mod t, at least t + 1
        let mut a = t + 1;
        while let Some(n) = a
            .checked_mul(p)
            .and_then(|x| x.checked_add(pp))
            .filter(|&n| n <= self.hi)
        {
            self.mark(n, a * q + qp);
            a += t;
        }
        // interior quotient ≡ 0 mod t, leaving room for a final one
        let mut a = t;
        loop {
            let np = a * p + pp;
            let room = (t + 1).checked_mul(np).and_then(|x| x.checked_add(p));
            if room.is_none_or(|r| r > self.hi) {
                break;
            }
            self.extend(t, np, p, a * q + qp, q);
            a += t;
        }
    }
}

fn e2_shard(lo: u64, hi: u64, witnesses: bool) -> ShardResult {
    let first = lo + lo % 2;
    if first > hi {
        return ShardResult {
            exceptional: Vec::new(),
            witnesses: Vec::new(),
        };
    }
    let slots = ((hi - first) / 2 + 1) as usize;
    let best: Vec<AtomicU64> = (0..slots).map(|_| AtomicU64::new(u64::MAX)).collect();
    let shard = E2Shard {
        lo: first,
        hi,
        best: &best,
    };
    // the shortest list [a_0, a_1] already has n >= (t+1)^2 + 1
    let seeds: Vec<(u64, u64)> = primes_up_to((hi as f64).sqrt() as u64 + 1)
        .into_iter()
        .flat_map(|t| {
            (1..)
                .map(move |k| k * t + 1)
                .take_while(move |&a0| a0.checked_mul(t + 1).is_some_and(|x| x < hi))
                .map(move |a0| (t, a0))
        })
        .collect();
    seeds.par_iter().for_each(|&(t, a0)| shard.extend(t, a0, 1, 1, 0));
    let mut exceptional = Vec::new();
    let mut wit = Vec::new();
    for (i, b) in best.iter().enumerate() {
        let n = first + 2 * i as u64;
        match b.load(Ordering::Relaxed) {
            u64::MAX => exceptional.push(n),
            a if witnesses => wit.push((n, a)),
            _ => {}
        }
    }
    ShardResult {
        exceptional,
        witnesses: wit,
    }
}

fn digest(exceptional: &[u64]) -> String {
    let mut h = Sha256::new();
    for n in exceptional {
        h.update(format!("{n}\n").as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn results_path(checkpoint: &Path) -> PathBuf {
    let mut s = checkpoint.as_os_str().to_owned();
    s.push(".results");
    PathBuf::from(s)
}

/// Completed shards recorded in a checkpoint, verified against their digests.
fn load_checkpoint(path: &Path) -> Result<HashMap<(u64, u64), Vec<u64>>> {
    let mut out = HashMap::new();
    if !path.exists() {
        return Ok(out);
    }
    let parse = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| Error::Checkpoint(format!("bad integer {s:?}")))
    };
    let mut digests = HashMap::new();
    for line in fs::read_to_string(path)?.lines().filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::Checkpoint(format!("line {line:?}")));
        }
        digests.insert((parse(f[0])?, parse(f[1])?), f[2].to_string());
    }
    let rp = results_path(path);
    if rp.exists() {
        for line in fs::read_to_string(rp)?.lines().filter(|l| !l.trim().is_empty()) {
            let f: Vec<u64> = line.split_whitespace().map(parse).collect::<Result<_>>()?;
            if f.len() < 2 {
                return Err(Error::Checkpoint(format!("results line {line:?}")));
            }
            let key = (f[0], f[1]);
            let list = f[2..].to_vec();
            if digests.get(&key) == Some(&digest(&list)) {
                out.insert(key, list);
            }
        }
    }
    Ok(out)
}

fn append_checkpoint(path: &Path, lo: u64, hi: u64, exceptional: &[u64]) -> Result<()> {
    let mut r = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(results_path(path))?;
    let mut line = format!("{lo} {hi}");
    for n in exceptional {
        line.push_str(&format!(" {n}"));
    }
    writeln!(r, "{line}")?;
    r.flush()?;
    let mut c = fs::OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(c, "{lo} {hi} {}", digest(exceptional))?;
    c.flush()?;
    Ok(())
}

/// Splits `[lo, hi]` into `k` contiguous pieces.
fn shard_bounds(lo: u64, hi: u64, k: usize) -> Vec<(u64, u64)> {
    let k = k.max(1) as u64;
    let width = (hi - lo + 1).div_ceil(k);
    (0..k)
        .map(|i| (lo + i * width, (lo + (i + 1) * width - 1).min(hi)))
        .filter(|(a, b)| a <= b)
        .collect()
}

/// All even `n ∈ [lo, hi]` with no witness `a`.
pub fn scan_exceptional(lo: u64, hi: u64, opts: &ScanOptions) -> Result<ScanReport> {
    if lo < 8 || lo > hi {
        return Err(Error::Precondition(format!("need 8 <= lo <= hi, got [{lo}, {hi}]")));
    }
    if hi > MAX_SCAN_BOUND {
        return Err(Error::Precondition(format!("hi must not exceed 2^62, got {hi}")));
    }
    let restored = match (&opts.checkpoint, opts.witnesses) {
        (Some(p), false) => load_checkpoint(p)?,
        _ => HashMap::new(),
    };
    let mut report = ScanReport {
        lo,
        hi,
        exceptional: Vec::new(),
        witnesses: BTreeMap::new(),
        resumed_shards: 0,
    };
    for (a, b) in shard_bounds(lo, hi, opts.shards) {
        if let Some(list) = restored.get(&(a, b)) {
            report.exceptional.extend(list);
            report.resumed_shards += 1;
            continue;
        }
        let res = match opts.engine {
            Engine::E1 => e1_shard(a, b, opts.witnesses),
            Engine::E2 => e2_shard(a, b, opts.witnesses),
            Engine::Both => {
                let (x, y) = rayon::join(|| e1_shard(a, b, opts.witnesses), || e2_shard(a, b, opts.witnesses));
                if x.exceptional != y.exceptional || x.witnesses != y.witnesses {
                    return Err(Error::EngineDisagreement { lo: a, hi: b });
                }
                x
            }
        };
        if let Some(p) = &opts.checkpoint {
            append_checkpoint(p, a, b, &res.exceptional)?;
        }
        report.exceptional.extend(res.exceptional);
        report.witnesses.extend(res.witnesses);
    }
    Ok(report)
}

/// Checks a witness directly: `a` coprime to `n`, `2 <= a <= n/2`, with the
/// gcd criterion above 1.
pub fn is_witness(n: u64, a: u64) -> bool {
    a >= 2 && 2 * a <= n && gcd(n, a) == 1 && crate::cyclic_cf::min_delta_quad_cf(n, a).is_ok_and(|g| g > 1)
}
