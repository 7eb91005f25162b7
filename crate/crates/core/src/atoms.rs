//! Enumeration of the atoms `A(G_0)` (minimal zero-sum sequences) over a
//! support set, and the Davenport constant `D(G_0)`.
//!
//! Every atom `U` with largest element `h` (in canonical order) factors as
//! `U = T·h` with `T` zero-sum free and `σ(T) = -h`. The search therefore
//! walks zero-sum free sequences `T` in non-decreasing element order, carrying
//! the set `Σ(T)` of nonempty subsums as a bit mask; `T` is extended by `h`
//! only while `-h ∉ Σ(T)`, and an atom is emitted whenever `-σ(T)` lies in the
//! support at or after the last element of `T`. Each atom is produced exactly
//! once.

use crate::arith::gcd;
use crate::budget::ResourceConfig;
use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::sequence::{GSequence, SupportSet};

/// Largest group order accepted by the enumerator.
pub const MAX_ENUMERATION_ORDER: u64 = 1024;

#[derive(Debug, Clone)]
pub struct AtomSet {
    support: SupportSet,
    atoms: Vec<GSequence>,
    davenport: u64,
}

impl AtomSet {
    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    /// Atoms sorted by (length, lexicographic element list).
    pub fn atoms(&self) -> &[GSequence] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `D(G_0)`, or 0 when there are no atoms.
    pub fn davenport(&self) -> u64 {
        self.davenport
    }

    pub fn of_length(&self, len: u64) -> impl Iterator<Item = &GSequence> {
        self.atoms.iter().filter(move |a| a.len() == len)
    }
}

#[derive(Clone, Copy)]
struct Mask<const W: usize>([u64; W]);

impl<const W: usize> Mask<W> {
    fn empty() -> Self {
        Mask([0; W])
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i >> 6] |= 1 << (i & 63);
    }

    /// `{x + h : x ∈ self}` given the translation table of `h`.
    #[inline]
    fn translated(&self, table: &[u32]) -> Self {
        let mut out = Self::empty();
        for (w, &word) in self.0.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                out.set(table[(w << 6) | b] as usize);
            }
        }
        out
    }

    fn union(mut self, other: &Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a |= b;
        }
        self
    }
}

struct Search {
    /// `translate[j][x]` = index of `x + g_j` for support position j.
    translate: Vec<Vec<u32>>,
    /// index -> index of the negative
    neg: Vec<u32>,
    /// group index -> support position
    position: Vec<Option<u32>>,
    support_idx: Vec<u32>,
    counts: Vec<u32>,
    found: Vec<GSequence>,
    max_atoms: u64,
    /// Longest zero-sum free sequence the search may hold.
    max_free_len: u64,
    cap_is_binding: bool,
}

/// Enumerates `A(G_0)` completely or fails with a budget error.
pub fn enumerate_atoms(support: &SupportSet, budget: &ResourceConfig) -> Result<AtomSet> {
    let group = support.group();
    let n = group.order();
    if n > MAX_ENUMERATION_ORDER {
        return Err(Error::Budget {
            what: "group order for atom enumeration",
            limit: MAX_ENUMERATION_ORDER,
        });
    }
    let n = n as usize;
    let elems: Vec<_> = group.elements().collect();
    let neg: Vec<u32> = elems
        .iter()
        .map(|g| group.index_of(&group.negate(g).expect("member")) as u32)
        .collect();
    let mut position = vec![None; n];
    for (p, &gi) in support.group_indices().iter().enumerate() {
        position[gi] = Some(p as u32);
    }
    let translate = support
        .elements()
        .iter()
        .map(|h| {
            elems
                .iter()
                .map(|x| group.index_of(&group.add(x, h).expect("member")) as u32)
                .collect()
        })
        .collect();
    // Every zero-sum free sequence has length < D(G) <= |G|.
    let natural = (n as u64).saturating_sub(1);
    let (max_free_len, cap_is_binding) = match budget.max_length {
        Some(l) if l.saturating_sub(1) < natural => (l.saturating_sub(1), true),
        _ => (natural, false),
    };
    let mut search = Search {
        translate,
        neg,
        position,
        support_idx: support.group_indices().iter().map(|&i| i as u32).collect(),
        counts: vec![0; support.len()],
        found: Vec::new(),
        max_atoms: budget.max_atoms,
        max_free_len,
        cap_is_binding,
    };
    match n {
        0..=64 => search.run::<1>()?,
        65..=128 => search.run::<2>()?,
        129..=256 => search.run::<4>()?,
        257..=512 => search.run::<8>()?,
        _ => search.run::<16>()?,
    }
    let mut atoms = search.found;
    atoms.sort_by(|a, b| a.cmp_len_lex(b));
    let davenport = atoms.iter().map(GSequence::len).max().unwrap_or(0);
    Ok(AtomSet {
        support: support.clone(),
        atoms,
        davenport,
    })
}

impl Search {
    fn run<const W: usize>(&mut self) -> Result<()> {
        self.dfs::<W>(0, 0, Mask::empty(), 0)
    }

    fn dfs<const W: usize>(&mut self, last: usize, sigma: usize, sums: Mask<W>, len: u64) -> Result<()> {
        let h = self.neg[sigma] as usize;
        if let Some(p) = self.position[h] {
            let p = p as usize;
            if p >= last {
                if self.found.len() as u64 >= self.max_atoms {
                    return Err(Error::Budget {
                        what: "atom count",
                        limit: self.max_atoms,
                    });
                }
                let mut c = self.counts.clone();
                c[p] += 1;
                self.found.push(GSequence::new(c));
            }
        }
        for j in last..self.support_idx.len() {
            let gi = self.support_idx[j] as usize;
            if gi == 0 || sums.get(self.neg[gi] as usize) {
                continue;
            }
            if len + 1 > self.max_free_len {
                if self.cap_is_binding {
                    return Err(Error::Budget {
                        what: "atom length",
                        limit: self.max_free_len + 1,
                    });
                }
                continue;
            }
            let mut next = sums.union(&sums.translated(&self.translate[j]));
            next.set(gi);
            let sigma_next = self.translate[j][sigma] as usize;
            self.counts[j] += 1;
            let r = self.dfs::<W>(j, sigma_next, next, len + 1);
            self.counts[j] -= 1;
            r?;
        }
        Ok(())
    }
}

/// Atoms of `B(G)` of length exactly `D(G)`, as sequences over the full group.
///
/// For cyclic groups these are `(ag)^n` with `gcd(a, n) = 1`, produced
/// directly; other groups are enumerated.
pub fn max_length_atoms(group: &AbelianGroup, budget: &ResourceConfig) -> Result<Vec<GSequence>> {
    if group.order() < 3 {
        return Err(Error::Precondition("max-length atoms need |G| >= 3".into()));
    }
    let full = SupportSet::full(group);
    if group.is_cyclic() {
        let n = group.order();
        Ok((1..n)
            .filter(|&a| gcd(a, n) == 1)
            .map(|a| {
                let mut c = vec![0u32; n as usize];
                c[a as usize] = n as u32;
                GSequence::new(c)
            })
            .collect())
    } else {
        let atoms = enumerate_atoms(&full, budget)?;
        let d = atoms.davenport();
        Ok(atoms.of_length(d).cloned().collect())
    }
}

/// `D(G)`; closed form `n` for cyclic groups, enumeration otherwise.
pub fn davenport(group: &AbelianGroup, budget: &ResourceConfig) -> Result<u64> {
    if group.is_cyclic() {
        return Ok(group.order());
    }
    Ok(enumerate_atoms(&SupportSet::full(group), budget)?.davenport())
}
