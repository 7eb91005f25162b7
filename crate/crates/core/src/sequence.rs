//! Sequences over a support set `G_0 ⊂ G`, stored as multiplicity vectors.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::group::{AbelianGroup, GroupElement};

/// A duplicate-free subset of a group, sorted in canonical element order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportSet {
    group: AbelianGroup,
    elements: Vec<GroupElement>,
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn new(group: &AbelianGroup, elements: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let mut elements: Vec<GroupElement> = elements.into_iter().collect();
        for e in &elements {
            if !group.contains(e) {
                return Err(Error::InvalidElement(format!("{e:?} is not an element of {group}")));
            }
        }
        elements.sort();
        elements.dedup();
        let indices = elements.iter().map(|e| group.index_of(e)).collect();
        Ok(SupportSet {
            group: group.clone(),
            elements,
            indices,
        })
    }

    /// The whole group as a support set.
    pub fn full(group: &AbelianGroup) -> Self {
        let elements: Vec<GroupElement> = group.elements().collect();
        let indices = (0..elements.len()).collect();
        SupportSet {
            group: group.clone(),
            elements,
            indices,
        }
    }

    pub fn from_indices(group: &AbelianGroup, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        let elements = indices.iter().map(|&i| group.element_at(i)).collect();
        SupportSet {
            group: group.clone(),
            elements,
            indices,
        }
    }

    /// Parses a comma-separated element list such as `1,3,7,9` or
    /// `(1,0),(0,1)`.
    pub fn parse(group: &AbelianGroup, text: &str) -> Result<Self> {
        let elems = split_top_level(text)
            .into_iter()
            .map(|t| group.parse_element(t))
            .collect::<Result<Vec<_>>>()?;
        if elems.is_empty() {
            return Err(Error::Parse("empty support".into()));
        }
        SupportSet::new(group, elems)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Linear group indices of the elements, in support order.
    pub fn group_indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.elements.binary_search(g).ok()
    }

    pub fn contains_zero(&self) -> bool {
        self.elements.first().is_some_and(GroupElement::is_zero)
    }

    /// `G_0 = -G_0`.
    pub fn is_symmetric(&self) -> bool {
        self.elements
            .iter()
            .all(|g| self.position(&self.group.negate(g).expect("member")).is_some())
    }

    pub fn symmetric_closure(&self) -> SupportSet {
        let negs = self.elements.iter().map(|g| self.group.negate(g).expect("member"));
        SupportSet::new(&self.group, self.elements.iter().cloned().chain(negs)).expect("members")
    }

    pub fn format(&self) -> String {
        let parts: Vec<String> = self.elements.iter().map(|g| self.group.format_element(g)).collect();
        parts.join(",")
    }
}

/// Splits on commas that are not inside parentheses.
pub fn split_top_level(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

/// A sequence `S = ∏ g^{v_g(S)}` over a support set, as the vector of
/// multiplicities `v_g(S)` indexed by support position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GSequence {
    counts: Vec<u32>,
}

impl GSequence {
    pub fn new(counts: Vec<u32>) -> Self {
        GSequence { counts }
    }

    pub fn empty(support: &SupportSet) -> Self {
        GSequence {
            counts: vec![0; support.len()],
        }
    }

    /// Builds a sequence from (element, multiplicity) pairs.
    pub fn from_elements(support: &SupportSet, items: &[(GroupElement, u32)]) -> Result<Self> {
        let mut counts = vec![0u32; support.len()];
        for (g, m) in items {
            let pos = support.position(g).ok_or_else(|| {
                Error::InvalidElement(format!("{} is not in the support", support.group().format_element(g)))
            })?;
            counts[pos] += m;
        }
        Ok(GSequence { counts })
    }

    /// Parses `1^10,9^10` or `(1,0)^2,(0,1)`; a missing exponent means 1.
    pub fn parse(support: &SupportSet, text: &str) -> Result<Self> {
        let mut items = Vec::new();
        for tok in split_top_level(text) {
            let (elem, mult) = match tok.rsplit_once('^') {
                Some((e, m)) => (
                    e,
                    m.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad multiplicity in {tok:?}")))?,
                ),
                None => (tok, 1),
            };
            items.push((support.group().parse_element(elem)?, mult));
        }
        GSequence::from_elements(support, &items)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// `v_g(S)` for the element at support position `pos`.
    pub fn multiplicity(&self, pos: usize) -> u32 {
        self.counts[pos]
    }

    /// `|S|`.
    pub fn len(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// Support positions with nonzero multiplicity.
    pub fn support_positions(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c > 0).then_some(i))
            .collect()
    }

    /// `supp(S)` as group elements.
    pub fn supp(&self, support: &SupportSet) -> Vec<GroupElement> {
        self.support_positions()
            .into_iter()
            .map(|i| support.elements()[i].clone())
            .collect()
    }

    /// `σ(S)`.
    pub fn sum(&self, support: &SupportSet) -> GroupElement {
        let group = support.group();
        let mut acc = group.zero();
        for (g, &c) in support.elements().iter().zip(&self.counts) {
            if c > 0 {
                let t = group.scalar_mul(c as i64, g).expect("member");
                acc = group.add(&acc, &t).expect("member");
            }
        }
        acc
    }

    pub fn is_zero_sum(&self, support: &SupportSet) -> bool {
        self.sum(support).is_zero()
    }

    /// True iff `S` is a minimal zero-sum sequence: `σ(S) = 0`, `|S| ≥ 1`, and
    /// no proper nonempty subsequence sums to zero.
    pub fn is_atom(&self, support: &SupportSet) -> bool {
        if self.is_empty() || !self.is_zero_sum(support) {
            return false;
        }
        // A zero-sum S is minimal iff S with one element removed is zero-sum free.
        let mut rest = self.counts.clone();
        let last = rest.iter().rposition(|&c| c > 0).expect("nonempty");
        rest[last] -= 1;
        is_zero_sum_free(support, &rest)
    }

    pub fn product(&self, other: &GSequence) -> GSequence {
        GSequence {
            counts: self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn power(&self, k: u32) -> GSequence {
        GSequence {
            counts: self.counts.iter().map(|a| a * k).collect(),
        }
    }

    /// True iff `self` is a subsequence of `other`.
    pub fn divides(&self, other: &GSequence) -> bool {
        self.counts.iter().zip(&other.counts).all(|(a, b)| a <= b)
    }

    /// `-S`; every negated element must lie in the support.
    pub fn negated(&self, support: &SupportSet) -> Result<GSequence> {
        let group = support.group();
        let mut counts = vec![0u32; support.len()];
        for (g, &c) in support.elements().iter().zip(&self.counts) {
            if c > 0 {
                let pos = support
                    .position(&group.negate(g)?)
                    .ok_or_else(|| Error::InvalidElement("negation leaves the support".into()))?;
                counts[pos] += c;
            }
        }
        Ok(GSequence { counts })
    }

    /// Element list in canonical order, with repetition.
    pub fn expanded(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len() as usize);
        for (i, &c) in self.counts.iter().enumerate() {
            out.extend(std::iter::repeat_n(i, c as usize));
        }
        out
    }

    /// Ordering by (length, lexicographic element list).
    pub fn cmp_len_lex(&self, other: &GSequence) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.expanded().cmp(&other.expanded()))
    }

    /// Renders as `g^m · h^k · …`.
    pub fn format(&self, support: &SupportSet) -> String {
        let mut s = String::new();
        for (g, &c) in support.elements().iter().zip(&self.counts) {
            if c == 0 {
                continue;
            }
            if !s.is_empty() {
                s.push_str(" · ");
            }
            let _ = write!(s, "{}^{}", support.group().format_element(g), c);
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }

    /// Moves the sequence onto another support containing all of its elements.
    pub fn transport(&self, from: &SupportSet, to: &SupportSet) -> Result<GSequence> {
        let mut counts = vec![0u32; to.len()];
        for (g, &c) in from.elements().iter().zip(&self.counts) {
            if c > 0 {
                let pos = to
                    .position(g)
                    .ok_or_else(|| Error::InvalidElement("element missing from target support".into()))?;
                counts[pos] += c;
            }
        }
        Ok(GSequence { counts })
    }
}

/// No nonempty subsequence of the multiplicity vector sums to zero.
pub(crate) fn is_zero_sum_free(support: &SupportSet, counts: &[u32]) -> bool {
    let group = support.group();
    let n = group.order() as usize;
    // reachable nonempty subsums
    let mut reach = vec![false; n];
    for (g, &c) in support.elements().iter().zip(counts) {
        for _ in 0..c {
            if g.is_zero() {
                return false;
            }
            let gi = group.index_of(g);
            let mut next = reach.clone();
            next[gi] = true;
            for (x, &r) in reach.iter().enumerate() {
                if r {
                    let y = group.add(&group.element_at(x), g).expect("member");
                    next[group.index_of(&y)] = true;
                }
            }
            if next[0] {
                return false;
            }
            reach = next;
        }
    }
    true
}

/// The `g`-norm `‖S‖_g = (n_1 + … + n_ℓ)/ord(g)` where each element of `S` is
/// written as `n_i·g` with `n_i ∈ [1, ord(g)]`.
pub fn g_norm(support: &SupportSet, s: &GSequence, g: &GroupElement) -> Result<u64> {
    let group = support.group();
    let n = group.element_order(g)?;
    let mut total: u64 = 0;
    for (h, &c) in support.elements().iter().zip(s.counts()) {
        if c == 0 {
            continue;
        }
        let k = (1..=n)
            .find(|&k| group.scalar_mul(k as i64, g).expect("member") == *h)
            .ok_or(Error::NotInCyclicSubgroup)?;
        total += k * c as u64;
    }
    if !total.is_multiple_of(n) {
        return Err(Error::NotZeroSum);
    }
    Ok(total / n)
}
