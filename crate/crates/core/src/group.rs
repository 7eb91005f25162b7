//! Finite abelian groups in invariant-factor form and their elements.
//!
//! A group is stored as its invariant factor chain `n_1 | n_2 | ... | n_r`.
//! Elements are residue vectors; the canonical total order on elements is the
//! lexicographic order of residue vectors, which coincides with the order of
//! their mixed-radix linear index (first factor most significant). Every
//! enumeration downstream iterates in this order.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::arith::{factorize, gcd, inv_mod, lcm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupElement {
    residues: Vec<u64>,
}

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }
}

/// Group-isomorphism from a product of cyclic groups `C_{m_1} ⊕ ... ⊕ C_{m_k}`
/// onto its invariant-factor form.
#[derive(Debug, Clone)]
pub struct CyclicEmbedding {
    source: Vec<u64>,
    target: AbelianGroup,
    /// For each source factor: its prime-power components as
    /// (modulus p^e, target slot, CRT multiplier inside that slot).
    parts: Vec<Vec<(u64, usize, u64)>>,
}

impl CyclicEmbedding {
    pub fn target(&self) -> &AbelianGroup {
        &self.target
    }

    pub fn source_factors(&self) -> &[u64] {
        &self.source
    }

    /// Image of the source element with the given residues.
    pub fn embed(&self, residues: &[u64]) -> Result<GroupElement> {
        if residues.len() != self.source.len() {
            return Err(Error::RankMismatch {
                expected: self.source.len(),
                got: residues.len(),
            });
        }
        let f = self.target.factors();
        let mut out = vec![0u64; f.len()];
        for (i, &x) in residues.iter().enumerate() {
            for &(pe, slot, mult) in &self.parts[i] {
                let y = (x % self.source[i]) % pe;
                let n = f[slot] as u128;
                out[slot] = ((out[slot] as u128 + y as u128 * mult as u128) % n) as u64;
            }
        }
        Ok(GroupElement { residues: out })
    }

    /// Image of the i-th standard generator of the source product.
    pub fn generator(&self, i: usize) -> Result<GroupElement> {
        let mut r = vec![0u64; self.source.len()];
        if i >= r.len() {
            return Err(Error::InvalidElement(format!("no generator with index {i}")));
        }
        r[i] = 1 % self.source[i];
        self.embed(&r)
    }
}

impl AbelianGroup {
    /// Builds the group `C_{m_1} ⊕ ... ⊕ C_{m_k}` in invariant-factor form.
    ///
    /// Factors equal to 1 are dropped (so an all-ones or empty list yields the
    /// trivial group); a factor 0 is rejected.
    pub fn new(factors: &[u64]) -> Result<Self> {
        Ok(Self::from_cyclic_product(factors)?.0)
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn elementary(p: u64, rank: usize) -> Result<Self> {
        Self::new(&vec![p; rank])
    }

    pub fn trivial() -> Self {
        AbelianGroup { factors: Vec::new() }
    }

    /// Normalizes a cyclic product and returns the isomorphism onto the
    /// normalized group alongside it.
    pub fn from_cyclic_product(factors: &[u64]) -> Result<(Self, CyclicEmbedding)> {
        if let Some(&z) = factors.iter().find(|&&m| m == 0) {
            return Err(Error::InvalidGroup(format!("cyclic factor {z} is not allowed")));
        }
        if factors.iter().try_fold(1u64, |acc, &m| acc.checked_mul(m)).is_none() {
            return Err(Error::InvalidGroup("group order overflows u64".into()));
        }
        // prime -> list of (exponent, source index)
        let mut by_prime: BTreeMap<u64, Vec<(u32, usize)>> = BTreeMap::new();
        for (i, &m) in factors.iter().enumerate() {
            for (p, e) in factorize(m) {
                by_prime.entry(p).or_default().push((e, i));
            }
        }
        let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut slots = vec![1u64; rank];
        // (source index, p^e, slot)
        let mut comps: Vec<(usize, u64, usize)> = Vec::new();
        for (&p, list) in by_prime.iter_mut() {
            list.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            for (t, &(e, i)) in list.iter().enumerate() {
                let pe = p.pow(e);
                let slot = rank - 1 - t;
                slots[slot] *= pe;
                comps.push((i, pe, slot));
            }
        }
        let mut parts = vec![Vec::new(); factors.len()];
        for (i, pe, slot) in comps {
            let n = slots[slot];
            let cofactor = n / pe;
            let mult = cofactor * inv_mod(cofactor % pe, pe) % n;
            parts[i].push((pe, slot, mult));
        }
        let group = AbelianGroup { factors: slots };
        debug_assert!(group.factors.windows(2).all(|w| w[1] % w[0] == 0));
        let emb = CyclicEmbedding {
            source: factors.to_vec(),
            target: group.clone(),
            parts,
        };
        Ok((group, emb))
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    /// `1 + Σ (n_i - 1)`, the standard lower bound for the Davenport constant.
    pub fn dstar(&self) -> u64 {
        1 + self.factors.iter().map(|n| n - 1).sum::<u64>()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    pub fn is_elementary_two(&self) -> bool {
        !self.factors.is_empty() && self.factors.iter().all(|&n| n == 2)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.rank()],
        }
    }

    /// Element with the given residues, reduced mod each invariant factor.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        self.check_rank(residues.len())?;
        Ok(GroupElement {
            residues: residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &n)| r.rem_euclid(n as i64) as u64)
                .collect(),
        })
    }

    /// Element with exactly these residues; each must already be canonical.
    pub fn canonical_element(&self, residues: &[u64]) -> Result<GroupElement> {
        self.check_rank(residues.len())?;
        for (&r, &n) in residues.iter().zip(&self.factors) {
            if r >= n {
                return Err(Error::InvalidElement(format!("residue {r} not reduced mod {n}")));
            }
        }
        Ok(GroupElement {
            residues: residues.to_vec(),
        })
    }

    /// The standard generator of a cyclic group.
    pub fn generator(&self) -> Result<GroupElement> {
        if self.rank() != 1 {
            return Err(Error::InvalidGroup(
                "generator() needs a nontrivial cyclic group".into(),
            ));
        }
        Ok(GroupElement { residues: vec![1] })
    }

    fn check_rank(&self, got: usize) -> Result<()> {
        if got != self.rank() {
            Err(Error::RankMismatch {
                expected: self.rank(),
                got,
            })
        } else {
            Ok(())
        }
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        self.check_rank(g.residues.len())?;
        if g.residues.iter().zip(&self.factors).any(|(&r, &n)| r >= n) {
            return Err(Error::InvalidElement(format!("{g:?} is not canonical in {self}")));
        }
        Ok(())
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.check(g).is_ok()
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&b.residues)
                .zip(&self.factors)
                .map(|((&x, &y), &n)| (x + y) % n)
                .collect(),
        })
    }

    pub fn negate(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&self.factors)
                .map(|(&x, &n)| (n - x) % n)
                .collect(),
        })
    }

    pub fn scalar_mul(&self, k: i64, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&self.factors)
                .map(|(&x, &n)| {
                    let k = k.rem_euclid(n as i64) as u128;
                    ((k * x as u128) % n as u128) as u64
                })
                .collect(),
        })
    }

    /// Least k >= 1 with k·g = 0.
    pub fn element_order(&self, g: &GroupElement) -> Result<u64> {
        self.check(g)?;
        Ok(g.residues
            .iter()
            .zip(&self.factors)
            .map(|(&x, &n)| n / gcd(x, n))
            .fold(1, lcm))
    }

    /// Mixed-radix index of a canonical element; respects the canonical order.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.residues
            .iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&x, &n)| acc * n as usize + x as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut residues = vec![0u64; self.rank()];
        for (slot, &n) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = (index % n as usize) as u64;
            index /= n as usize;
        }
        GroupElement { residues }
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    /// True iff the subgroup generated by `gens` is the whole group.
    pub fn generates(&self, gens: &[GroupElement]) -> Result<bool> {
        for g in gens {
            self.check(g)?;
        }
        let n = self.order() as usize;
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut count = 1usize;
        let mut queue = VecDeque::from([self.zero()]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.add(&x, g)?;
                let i = self.index_of(&y);
                if !seen[i] {
                    seen[i] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        Ok(count == n)
    }

    /// Homocyclic decomposition `C_{p^k}^r`, if the group has that shape with
    /// p prime.
    pub fn prime_power_homocyclic(&self) -> Option<(u64, u32, usize)> {
        let first = *self.factors.first()?;
        if self.factors.iter().any(|&n| n != first) {
            return None;
        }
        match factorize(first).as_slice() {
            [(p, k)] => Some((*p, *k, self.rank())),
            _ => None,
        }
    }

    pub fn format_element(&self, g: &GroupElement) -> String {
        if self.rank() == 1 {
            g.residues[0].to_string()
        } else {
            let parts: Vec<String> = g.residues.iter().map(u64::to_string).collect();
            format!("({})", parts.join(","))
        }
    }

    /// Parses an element literal: a bare integer for cyclic groups, or a
    /// parenthesized residue tuple such as `(1,0,3)`.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        let inner = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
        let vals = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad residue {t:?} in element {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if self.is_trivial() && vals == [0] {
            return Ok(self.zero());
        }
        self.element(&vals)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "C1");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("C{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Group literal: `C4`, `C2xC2xC6` (case-insensitive, `x` separated). Also
/// accepts `C2^3` as shorthand for `C2xC2xC2`.
impl FromStr for AbelianGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower.is_empty() {
            return Err(Error::Parse("empty group literal".into()));
        }
        let mut factors = Vec::new();
        for part in lower.split('x') {
            let part = part.trim();
            let body = part
                .strip_prefix('c')
                .ok_or_else(|| Error::Parse(format!("expected 'C<n>' in group literal, got {part:?}")))?;
            let (n, reps) = match body.split_once('^') {
                Some((n, r)) => (
                    n,
                    r.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad power {r:?}")))?,
                ),
                None => (body, 1),
            };
            let n: u64 = n.parse().map_err(|_| Error::Parse(format!("bad cyclic order {n:?}")))?;
            factors.extend(std::iter::repeat_n(n, reps));
        }
        AbelianGroup::new(&factors)
    }
}
