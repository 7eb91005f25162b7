//! `Δ_ρ*(G)` by enumeration of qualifying supports, theorem dispatch for the
//! exact `Δ_ρ(G)`, and the realization construction for prescribed distance
//! sets.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::gcd;
use crate::atoms::{enumerate_atoms, max_length_atoms};
use crate::budget::ResourceConfig;
use crate::error::{Error, Result};
use crate::group::{AbelianGroup, GroupElement};
use crate::lengths::min_delta_of_atoms;
use crate::sequence::{GSequence, SupportSet};

/// A symmetric support that is a union of `±supp(U)` over atoms `U` of
/// length `D(G)`.
#[derive(Debug, Clone)]
pub struct QualifyingSupport {
    pub support: SupportSet,
    /// Max-length atoms (over the full group) supported inside `support`.
    pub generating_atoms: Vec<GSequence>,
}

type Mask = Vec<u64>;

fn mask_of(indices: impl IntoIterator<Item = usize>, words: usize) -> Mask {
    let mut m = vec![0u64; words];
    for i in indices {
        m[i >> 6] |= 1 << (i & 63);
    }
    m
}

fn mask_indices(m: &Mask) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, &word) in m.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            out.push(w * 64 + bits.trailing_zeros() as usize);
            bits &= bits - 1;
        }
    }
    out
}

fn is_submask(a: &Mask, b: &Mask) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn union(a: &Mask, b: &Mask) -> Mask {
    a.iter().zip(b).map(|(x, y)| x | y).collect()
}

/// Distinct sets `supp(U) ∪ -supp(U)` over the max-length atoms, each with
/// the atoms producing it.
fn support_classes(group: &AbelianGroup, budget: &ResourceConfig) -> Result<Vec<(Mask, Vec<GSequence>)>> {
    let full = SupportSet::full(group);
    let words = (group.order() as usize).div_ceil(64);
    let mut classes: HashMap<Mask, Vec<GSequence>> = HashMap::new();
    for u in max_length_atoms(group, budget)? {
        let mut idx = Vec::new();
        for p in u.support_positions() {
            let g = &full.elements()[p];
            idx.push(group.index_of(g));
            idx.push(group.index_of(&group.negate(g)?));
        }
        classes.entry(mask_of(idx, words)).or_default().push(u);
    }
    let mut out: Vec<_> = classes.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Every qualifying support of `G`, ordered by size then canonically.
pub fn qualifying_supports(group: &AbelianGroup, budget: &ResourceConfig) -> Result<Vec<QualifyingSupport>> {
    let classes = support_classes(group, budget)?;
    let masks = union_lattice(&classes, budget, |_| Ok(None))?;
    let mut out: Vec<QualifyingSupport> = masks
        .into_iter()
        .map(|(m, _)| {
            let generating_atoms = classes
                .iter()
                .filter(|(c, _)| is_submask(c, &m))
                .flat_map(|(_, atoms)| atoms.iter().cloned())
                .collect();
            QualifyingSupport {
                support: SupportSet::from_indices(group, mask_indices(&m)),
                generating_atoms,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.support
            .len()
            .cmp(&b.support.len())
            .then_with(|| a.support.group_indices().cmp(b.support.group_indices()))
    });
    Ok(out)
}

/// Walks all unions of nonempty class subsets level by level, evaluating
/// `min Δ` on each. Since `G_0 ⊆ G_1` implies `min Δ(G_1) | min Δ(G_0)`, a
/// union whose already-evaluated subsets have coprime values is assigned 1
/// without enumeration, and supersets of a support with value 1 are not
/// visited at all (their value is 1 as well).
fn union_lattice<F>(
    classes: &[(Mask, Vec<GSequence>)],
    budget: &ResourceConfig,
    eval: F,
) -> Result<Vec<(Mask, Option<u64>)>>
where
    F: Fn(&Mask) -> Result<Option<u64>> + Sync,
{
    let mut seen: HashMap<Mask, Option<u64>> = HashMap::new();
    let mut ones: Vec<Mask> = Vec::new();
    let mut pending: Vec<(Mask, u64)> = {
        let mut s: Vec<Mask> = classes.iter().map(|(m, _)| m.clone()).collect();
        s.dedup();
        s.into_iter().map(|m| (m, 0)).collect()
    };
    while !pending.is_empty() {
        if (seen.len() + pending.len()) as u64 > budget.max_supports {
            return Err(Error::Budget {
                what: "qualifying supports",
                limit: budget.max_supports,
            });
        }
        let values: Vec<Option<u64>> = pending
            .par_iter()
            .map(|(m, bound)| if *bound == 1 { Ok(Some(1)) } else { eval(m) })
            .collect::<Result<_>>()?;
        let level: Vec<(Mask, Option<u64>)> = pending.drain(..).map(|(m, _)| m).zip(values).collect();
        for (m, v) in &level {
            seen.insert(m.clone(), *v);
            if *v == Some(1) {
                ones.push(m.clone());
            }
        }
        let mut next: HashMap<Mask, u64> = HashMap::new();
        for (x, v) in &level {
            if *v == Some(1) {
                continue;
            }
            for (c, _) in classes {
                if is_submask(c, x) {
                    continue;
                }
                let y = union(x, c);
                if seen.contains_key(&y) {
                    continue;
                }
                let b = next.entry(y).or_insert(0);
                *b = gcd(*b, v.unwrap_or(0));
            }
        }
        pending = next
            .into_iter()
            .filter(|(y, _)| !ones.iter().any(|o| is_submask(o, y)))
            .collect();
        pending.sort();
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

fn support_min_delta(group: &AbelianGroup, m: &Mask, budget: &ResourceConfig) -> Result<Option<u64>> {
    let support = SupportSet::from_indices(group, mask_indices(m));
    min_delta_of_atoms(&enumerate_atoms(&support, budget)?)
}

/// `Δ_ρ*(G) = { min Δ(G_0) : G_0 qualifying, Δ(G_0) ≠ ∅ }`, by enumeration.
pub fn delta_rho_star(group: &AbelianGroup, budget: &ResourceConfig) -> Result<BTreeSet<u64>> {
    if group.order() <= 2 {
        return Ok(BTreeSet::new());
    }
    let classes = support_classes(group, budget)?;
    let values = union_lattice(&classes, budget, |m| support_min_delta(group, m, budget))?;
    Ok(values.into_iter().filter_map(|(_, v)| v).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    TheoremCyclic,
    TheoremElem2,
    TheoremRank2,
    #[serde(rename = "theorem-C2C2C2n")]
    TheoremC2C2C2n,
    TheoremPpower,
    SandwichOnly,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::TheoremCyclic => "theorem-cyclic",
            Provenance::TheoremElem2 => "theorem-elem2",
            Provenance::TheoremRank2 => "theorem-rank2",
            Provenance::TheoremC2C2C2n => "theorem-C2C2C2n",
            Provenance::TheoremPpower => "theorem-ppower",
            Provenance::SandwichOnly => "sandwich-only",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaRhoResult {
    pub delta_rho_star: BTreeSet<u64>,
    pub exact: Option<BTreeSet<u64>>,
    /// Divisors of elements of `delta_rho_star`.
    pub upper: BTreeSet<u64>,
    pub provenance: Provenance,
    /// Whether `delta_rho_star` came from enumeration rather than a theorem.
    pub star_enumerated: bool,
    /// The value `{1}` predicted for groups with `|G| > 4` that are neither
    /// cyclic nor elementary 2-groups, when no proven case applies. Never
    /// merged into `exact`.
    pub conjectured: Option<BTreeSet<u64>>,
}

impl DeltaRhoResult {
    /// `star ⊆ exact ⊆ upper` and `max star = max upper`.
    pub fn sandwich_holds(&self) -> bool {
        let inner = match &self.exact {
            Some(e) => self.delta_rho_star.is_subset(e) && e.is_subset(&self.upper),
            None => true,
        };
        inner && self.delta_rho_star.last() == self.upper.last()
    }
}

pub fn divisor_closure(set: &BTreeSet<u64>) -> BTreeSet<u64> {
    set.iter().flat_map(|&d| (1..=d).filter(move |k| d % k == 0)).collect()
}

/// All gcds of nonempty subsets.
pub fn gcd_closure(set: &BTreeSet<u64>) -> BTreeSet<u64> {
    let mut out: BTreeSet<u64> = BTreeSet::new();
    for &d in set {
        let mut add: Vec<u64> = out.iter().map(|&x| gcd(x, d)).collect();
        add.push(d);
        out.extend(add);
    }
    out
}

fn theorem_value(group: &AbelianGroup) -> Option<(Provenance, BTreeSet<u64>)> {
    let r = group.rank();
    let f = group.factors();
    if group.is_elementary_two() && r >= 2 {
        return Some((Provenance::TheoremElem2, BTreeSet::from([1, r as u64 - 1])));
    }
    if r == 2 {
        return Some((Provenance::TheoremRank2, BTreeSet::from([1])));
    }
    if r == 3 && f[0] == 2 && f[1] == 2 && f[2].is_multiple_of(2) && f[2] >= 4 {
        return Some((Provenance::TheoremC2C2C2n, BTreeSet::from([1])));
    }
    if let Some((p, k, rank)) = group.prime_power_homocyclic() {
        if rank >= 2 && p.pow(k) >= 3 {
            return Some((Provenance::TheoremPpower, BTreeSet::from([1])));
        }
    }
    None
}

/// Theorem dispatch: cyclic groups are enumerated (`Δ_ρ = Δ_ρ*`), the proven
/// classes are answered by formula, everything else gets sandwich bounds.
pub fn delta_rho(group: &AbelianGroup, budget: &ResourceConfig) -> Result<DeltaRhoResult> {
    delta_rho_with(group, budget, false)
}

/// As [`delta_rho`]; with `enumerate` set, `Δ_ρ*` is always computed by
/// enumeration, even where a theorem gives it.
pub fn delta_rho_with(group: &AbelianGroup, budget: &ResourceConfig, enumerate: bool) -> Result<DeltaRhoResult> {
    let finish = |star: BTreeSet<u64>, exact, provenance, star_enumerated, conjectured| DeltaRhoResult {
        upper: divisor_closure(&star),
        delta_rho_star: star,
        exact,
        provenance,
        star_enumerated,
        conjectured,
    };
    if group.order() <= 2 {
        return Ok(finish(
            BTreeSet::new(),
            Some(BTreeSet::new()),
            Provenance::TheoremCyclic,
            false,
            None,
        ));
    }
    if group.is_cyclic() {
        let star = delta_rho_star(group, budget)?;
        return Ok(finish(star.clone(), Some(star), Provenance::TheoremCyclic, true, None));
    }
    if let Some((prov, value)) = theorem_value(group) {
        // For these classes Δ_ρ* is nonempty and contained in Δ_ρ, which the
        // theorems pin down; for elementary 2-groups they coincide.
        let star = if enumerate {
            delta_rho_star(group, budget)?
        } else {
            value.clone()
        };
        return Ok(finish(star, Some(value), prov, enumerate, None));
    }
    let star = delta_rho_star(group, budget)?;
    let conjectured = (group.order() > 4).then(|| BTreeSet::from([1]));
    Ok(finish(star, None, Provenance::SandwichOnly, true, conjectured))
}

/// `1 ∈ Δ_ρ(G)` iff `G` is not cyclic of order 4, 6 or 10 (for `|G| >= 3`).
pub fn one_in_delta_rho(group: &AbelianGroup) -> bool {
    group.order() >= 3 && !(group.is_cyclic() && matches!(group.order(), 4 | 6 | 10))
}

/// A group and supports `G_i'` with `Δ(G_i') = {d_i}` and `ρ(G_i') = 2`,
/// placed in independent summands.
///
/// `d = 1` uses `{g, 3g} ⊂ C_8`; `d >= 2` uses independent `e_1, …, e_{d-1}`
/// of order `2d` together with `e_0 = -(e_1 + … + e_{d-1})`.
pub fn realize_delta_set(d_list: &[u64]) -> Result<(AbelianGroup, Vec<SupportSet>)> {
    if d_list.is_empty() || d_list.contains(&0) {
        return Err(Error::Precondition("distances must be positive and nonempty".into()));
    }
    let mut factors = Vec::new();
    let mut blocks = Vec::new();
    for &d in d_list {
        let start = factors.len();
        if d == 1 {
            factors.push(8);
        } else {
            factors.extend(std::iter::repeat_n(2 * d, d as usize - 1));
        }
        blocks.push((start, factors.len(), d));
    }
    let (group, emb) = AbelianGroup::from_cyclic_product(&factors)?;
    let mut supports = Vec::new();
    for (start, end, d) in blocks {
        let mut coords: Vec<Vec<u64>> = Vec::new();
        if d == 1 {
            for k in [1, 3] {
                let mut v = vec![0; factors.len()];
                v[start] = k;
                coords.push(v);
            }
        } else {
            let mut e0 = vec![0; factors.len()];
            for i in start..end {
                let mut v = vec![0; factors.len()];
                v[i] = 1;
                coords.push(v);
                e0[i] = 2 * d - 1;
            }
            coords.push(e0);
        }
        let elems: Vec<GroupElement> = coords.iter().map(|c| emb.embed(c)).collect::<Result<_>>()?;
        supports.push(SupportSet::new(&group, elems)?);
    }
    Ok((group, supports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lengths::{length_set, rho_of_support};
    use num_rational::Ratio;

    fn grp(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    fn b() -> ResourceConfig {
        ResourceConfig::default()
    }

    #[test]
    fn qualifying_support_examples() {
        let q = qualifying_supports(&grp("C10"), &b()).unwrap();
        let formatted: Vec<String> = q.iter().map(|s| s.support.format()).collect();
        assert_eq!(formatted, vec!["1,9", "3,7", "1,3,7,9"]);
        let q = qualifying_supports(&grp("C3"), &b()).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q[0].support.format(), "1,2");
        let q = qualifying_supports(&grp("C2xC2"), &b()).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q[0].support.format(), "(0,1),(1,0),(1,1)");
        assert_eq!(q[0].generating_atoms.len(), 1);
    }

    #[test]
    fn star_examples() {
        assert_eq!(delta_rho_star(&grp("C10"), &b()).unwrap(), set(&[2, 8]));
        assert_eq!(delta_rho_star(&grp("C2^3"), &b()).unwrap(), set(&[1, 2]));
        assert_eq!(delta_rho_star(&grp("C8"), &b()).unwrap(), set(&[1, 6]));
        assert_eq!(delta_rho_star(&grp("C2"), &b()).unwrap(), set(&[]));
    }

    #[test]
    fn dispatch_examples() {
        let r = delta_rho(&grp("C6"), &b()).unwrap();
        assert_eq!(r.exact, Some(set(&[4])));
        assert_eq!(r.provenance, Provenance::TheoremCyclic);
        let r = delta_rho(&grp("C3xC3"), &b()).unwrap();
        assert_eq!(r.exact, Some(set(&[1])));
        assert_eq!(r.provenance, Provenance::TheoremRank2);
        let r = delta_rho(&grp("C2xC2xC4"), &b()).unwrap();
        assert_eq!(r.exact, Some(set(&[1])));
        assert_eq!(r.provenance, Provenance::TheoremC2C2C2n);
        let r = delta_rho(&grp("C2^9"), &b()).unwrap();
        assert_eq!(r.exact, Some(set(&[1, 8])));
        assert!(!r.star_enumerated);
        let r = delta_rho(&grp("C3^3"), &b()).unwrap();
        assert_eq!(r.provenance, Provenance::TheoremPpower);
        for r in [
            delta_rho(&grp("C10"), &b()).unwrap(),
            delta_rho(&grp("C2xC4"), &b()).unwrap(),
        ] {
            assert!(r.sandwich_holds());
        }
    }

    #[test]
    fn one_in_delta_rho_examples() {
        assert!(!one_in_delta_rho(&grp("C4")));
        assert!(!one_in_delta_rho(&grp("C10")));
        assert!(one_in_delta_rho(&grp("C2xC4")));
        assert!(one_in_delta_rho(&grp("C12")));
    }

    #[test]
    fn closures() {
        assert_eq!(gcd_closure(&set(&[6, 10, 15])), set(&[1, 2, 3, 5, 6, 10, 15]));
        assert_eq!(gcd_closure(&set(&[4])), set(&[4]));
        assert_eq!(gcd_closure(&set(&[2, 3])), set(&[1, 2, 3]));
        let c = gcd_closure(&set(&[12, 18, 8]));
        assert_eq!(gcd_closure(&c), c);
        assert_eq!(divisor_closure(&set(&[2, 8])), set(&[1, 2, 4, 8]));
    }

    #[test]
    fn realizations_have_prescribed_distance() {
        for d in 1..=4u64 {
            let (g, sup) = realize_delta_set(&[d]).unwrap();
            let s = &sup[0];
            let atoms = enumerate_atoms(s, &b()).unwrap();
            assert_eq!(min_delta_of_atoms(&atoms).unwrap(), Some(d), "d = {d}");
            // ρ(G') = 2: the maximum of ρ(L(B)) over products of up to
            // max(d, 2) atoms
            let mut best = Ratio::from_integer(1u64);
            let k = d.max(2) as usize;
            let mut stack: Vec<(usize, GSequence, usize)> = vec![(0, GSequence::empty(s), 0)];
            while let Some((from, seq, used)) = stack.pop() {
                if used > 0 {
                    best = best.max(length_set(&seq, &atoms).unwrap().rho());
                }
                if used < k {
                    for j in from..atoms.len() {
                        stack.push((j, seq.product(&atoms.atoms()[j]), used + 1));
                    }
                }
            }
            assert_eq!(best, Ratio::from_integer(2), "d = {d}");
            assert!(rho_of_support(s, &b()).unwrap().value >= best);
            if d == 1 {
                assert_eq!(g, grp("C8"));
                assert_eq!(s.format(), "1,3");
            }
            // Δ(L) ⊆ {d} on a few products of atoms
            for a in atoms.atoms() {
                for c in atoms.atoms() {
                    let l = length_set(&a.product(c), &atoms).unwrap();
                    assert!(l.deltas().iter().all(|&x| x == d));
                }
            }
        }
        let (g, sup) = realize_delta_set(&[2]).unwrap();
        assert_eq!(g, grp("C4"));
        assert_eq!(sup[0].format(), "1,3");
        let (g, sup) = realize_delta_set(&[2, 3]).unwrap();
        assert_eq!(g.order(), 4 * 36);
        assert_eq!(sup.len(), 2);
    }
}
