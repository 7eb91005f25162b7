//! Sets of lengths `L(B)`, distances, elasticity, `min Δ(G_0)` and the
//! almost-arithmetical-progression checker.

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::atoms::{enumerate_atoms, AtomSet};
use crate::budget::ResourceConfig;
use crate::error::{Error, Result};
use crate::lattice::kernel_functional_gcd;
use crate::sequence::{GSequence, SupportSet};

/// A finite set of lengths, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LengthSet {
    values: Vec<u64>,
}

impl LengthSet {
    pub fn new(values: impl IntoIterator<Item = u64>) -> Self {
        let mut values: Vec<u64> = values.into_iter().collect();
        values.sort_unstable();
        values.dedup();
        LengthSet { values }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.values.binary_search(&x).is_ok()
    }

    pub fn min(&self) -> Option<u64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.values.last().copied()
    }

    pub fn is_subset(&self, other: &LengthSet) -> bool {
        self.values.iter().all(|&x| other.contains(x))
    }

    /// `max L / min L`, with `ρ({0}) = 1`.
    pub fn rho(&self) -> Ratio<u64> {
        match (self.min(), self.max()) {
            (Some(lo), Some(hi)) if lo > 0 => Ratio::new(hi, lo),
            _ => Ratio::from_integer(1),
        }
    }

    /// Successive differences, sorted and deduplicated.
    pub fn deltas(&self) -> Vec<u64> {
        let mut d: Vec<u64> = self.values.windows(2).map(|w| w[1] - w[0]).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn sumset(&self, other: &LengthSet) -> LengthSet {
        LengthSet::new(
            self.values
                .iter()
                .flat_map(|&a| other.values.iter().map(move |&b| a + b)),
        )
    }

    /// Best AAP decomposition with difference `d`: longest central
    /// progression, then smallest bound `M`, then smallest shift `y`.
    pub fn is_aap(&self, d: u64) -> Option<AAPWitness> {
        assert!(d >= 1, "difference must be positive");
        let (&lo, &hi) = (self.values.first()?, self.values.last()?);
        if self.values.iter().any(|&x| x % d != lo % d) {
            return None;
        }
        let mut best: Option<(u64, u64, u64)> = None; // (ℓ, M, y)
        let mut i = 0;
        while i < self.values.len() {
            let y = self.values[i];
            let mut l = 0;
            while self.contains(y + (l + 1) * d) {
                l += 1;
            }
            let m = (y - lo).max(hi - y - l * d);
            let better = match best {
                None => true,
                Some((bl, bm, _)) => l > bl || (l == bl && m < bm),
            };
            if better {
                best = Some((l, m, y));
            }
            i += 1;
        }
        let (l, m, y) = best?;
        let rel = |x: u64| x as i64 - y as i64;
        Some(AAPWitness {
            y: y as i64,
            d,
            l,
            m,
            head: self.values.iter().filter(|&&x| x < y).map(|&x| rel(x)).collect(),
            tail: self
                .values
                .iter()
                .filter(|&&x| x > y + l * d)
                .map(|&x| rel(x))
                .collect(),
        })
    }
}

impl fmt::Display for LengthSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for LengthSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

/// `L = y + (L' ∪ {0, d, …, ℓd} ∪ L'')` with `L' ⊆ [-M, -1]` and
/// `L'' ⊆ ℓd + [1, M]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AAPWitness {
    pub y: i64,
    pub d: u64,
    pub l: u64,
    pub m: u64,
    pub head: Vec<i64>,
    pub tail: Vec<i64>,
}

impl AAPWitness {
    pub fn reconstruct(&self) -> LengthSet {
        let core = (0..=self.l).map(|i| (i * self.d) as i64);
        LengthSet::new(
            self.head
                .iter()
                .copied()
                .chain(core)
                .chain(self.tail.iter().copied())
                .map(|x| (self.y + x) as u64),
        )
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn zero(words: usize) -> Self {
        Bits(vec![0; words])
    }

    fn or_shifted_one(&mut self, src: &Bits) {
        let mut carry = 0;
        for (d, &s) in self.0.iter_mut().zip(&src.0) {
            *d |= (s << 1) | carry;
            carry = s >> 63;
        }
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn to_set(&self) -> LengthSet {
        let mut out = Vec::new();
        for (w, &word) in self.0.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                out.push((w * 64) as u64 + bits.trailing_zeros() as u64);
                bits &= bits - 1;
            }
        }
        LengthSet { values: out }
    }
}

/// Reusable memoized factorization-length engine over a fixed atom list.
///
/// A factorization of `B` must use an atom containing the smallest element
/// present in `B`; recursing only on those atoms visits each multiset of
/// atoms once per ordering of its minima, which removes permutation blowup.
pub struct LengthCalculator<'a> {
    atoms: &'a [GSequence],
    by_min: Vec<Vec<usize>>,
    memo: HashMap<Vec<u32>, Bits>,
    max_memo: u64,
}

impl<'a> LengthCalculator<'a> {
    pub fn new(support_len: usize, atoms: &'a [GSequence], max_memo: u64) -> Self {
        let mut by_min = vec![Vec::new(); support_len];
        for (j, a) in atoms.iter().enumerate() {
            if let Some(&p) = a.support_positions().first() {
                by_min[p].push(j);
            }
        }
        LengthCalculator {
            atoms,
            by_min,
            memo: HashMap::new(),
            max_memo,
        }
    }

    /// All factorization lengths of `b`; empty when `b` has no
    /// factorization into the given atoms.
    pub fn lengths(&mut self, b: &GSequence) -> Result<LengthSet> {
        if b.counts().len() != self.by_min.len() {
            return Err(Error::Precondition("sequence is over a different support".into()));
        }
        let words = (b.len() as usize + 1).div_ceil(64);
        let mut key = b.counts().to_vec();
        let bits = self.go(&mut key, words)?;
        Ok(bits.to_set())
    }

    fn go(&mut self, b: &mut Vec<u32>, words: usize) -> Result<Bits> {
        let Some(p) = b.iter().position(|&c| c > 0) else {
            let mut z = Bits::zero(words);
            z.0[0] = 1;
            return Ok(z);
        };
        // Lengths of a sub-multiset never exceed its size, so a stored entry
        // can be resized to any width that covers the current top-level `B`.
        if let Some(hit) = self.memo.get(b.as_slice()) {
            let mut r = hit.clone();
            r.0.resize(words, 0);
            return Ok(r);
        }
        let mut acc = Bits::zero(words);
        for idx in 0..self.by_min[p].len() {
            let j = self.by_min[p][idx];
            let a = &self.atoms[j];
            if !a.counts().iter().zip(b.iter()).all(|(x, y)| x <= y) {
                continue;
            }
            for (y, x) in b.iter_mut().zip(a.counts()) {
                *y -= x;
            }
            let sub = self.go(b, words);
            for (y, x) in b.iter_mut().zip(a.counts()) {
                *y += x;
            }
            acc.or_shifted_one(&sub?);
        }
        if self.memo.len() as u64 >= self.max_memo {
            return Err(Error::Budget {
                what: "length memo entries",
                limit: self.max_memo,
            });
        }
        self.memo.insert(b.clone(), acc.clone());
        Ok(acc)
    }

    /// Whether `b` factors at all into the given atoms.
    pub fn factorizable(&mut self, b: &GSequence) -> Result<bool> {
        let words = (b.len() as usize + 1).div_ceil(64);
        let mut key = b.counts().to_vec();
        Ok(!self.go(&mut key, words)?.is_empty())
    }
}

/// Exact `L(B)` for a zero-sum `B` over the atom set's support.
pub fn length_set(b: &GSequence, atoms: &AtomSet) -> Result<LengthSet> {
    length_set_with_budget(b, atoms, &ResourceConfig::default())
}

pub fn length_set_with_budget(b: &GSequence, atoms: &AtomSet, budget: &ResourceConfig) -> Result<LengthSet> {
    if !b.is_zero_sum(atoms.support()) {
        return Err(Error::NotZeroSum);
    }
    LengthCalculator::new(atoms.support().len(), atoms.atoms(), budget.max_memo).lengths(b)
}

/// `min Δ(G_0)` from an already enumerated atom set.
pub fn min_delta_of_atoms(atoms: &AtomSet) -> Result<Option<u64>> {
    let k = atoms.support().len();
    kernel_functional_gcd(
        atoms
            .atoms()
            .iter()
            .map(|a| (a.counts().iter().map(|&c| c as i64).collect(), 1)),
        k,
    )
}

/// `min Δ(G_0)`, or `None` when `Δ(G_0)` is empty (half-factorial case).
pub fn min_delta(support: &SupportSet, budget: &ResourceConfig) -> Result<Option<u64>> {
    min_delta_of_atoms(&enumerate_atoms(support, budget)?)
}

/// Elasticity of `B(G_0)`: `D(G_0)/2` when `G_0 = -G_0` (exact), otherwise
/// the same quantity as an upper bound. Never below 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoReport {
    pub value: Ratio<u64>,
    pub exact: bool,
}

pub fn rho_of_support(support: &SupportSet, budget: &ResourceConfig) -> Result<RhoReport> {
    let d = enumerate_atoms(support, budget)?.davenport();
    let half = Ratio::new(d, 2);
    Ok(RhoReport {
        value: half.max(Ratio::from_integer(1)),
        exact: support.is_symmetric(),
    })
}

/// Whether `B` has one factorization into atoms of length `D(G_0)` only and
/// one into atoms of length 2 only.
pub fn max_elasticity_witness(b: &GSequence, atoms: &AtomSet) -> Result<bool> {
    if !b.is_zero_sum(atoms.support()) || b.is_empty() {
        return Ok(false);
    }
    let k = atoms.support().len();
    let d = atoms.davenport();
    let longest: Vec<GSequence> = atoms.of_length(d).cloned().collect();
    let pairs: Vec<GSequence> = atoms.of_length(2).cloned().collect();
    let max_memo = ResourceConfig::default().max_memo;
    Ok(LengthCalculator::new(k, &longest, max_memo).factorizable(b)?
        && LengthCalculator::new(k, &pairs, max_memo).factorizable(b)?)
}
