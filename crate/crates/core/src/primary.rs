//! Finitely primary monoids of rank one, encoded as submonoids of
//! `Z_q × N_0` generated by `(unit class, value)` pairs, and the product
//! formulas for their distance invariants.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{gcd, gcd_all};
use crate::delta_rho::gcd_closure;
use crate::error::{Error, Result};
use crate::lattice::kernel_functional_gcd;
use crate::lengths::LengthSet;
use crate::sequence::split_top_level;

/// An element `ε p^v` with `ε` in the unit class group `Z_q`.
pub type FPElement = (u64, u64);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FPMonoid {
    q: u64,
    generators: Vec<FPElement>,
}

impl FPMonoid {
    pub fn new(q: u64, generators: &[FPElement]) -> Result<Self> {
        if q == 0 {
            return Err(Error::Precondition("unit modulus must be at least 1".into()));
        }
        if generators.is_empty() {
            return Err(Error::Precondition("at least one generator is required".into()));
        }
        for &(c, v) in generators {
            if c >= q {
                return Err(Error::Precondition(format!("unit class {c} not below q = {q}")));
            }
            if v == 0 {
                return Err(Error::Precondition("generator values must be positive".into()));
            }
        }
        let mut generators = generators.to_vec();
        generators.sort_by_key(|&(c, v)| (v, c));
        generators.dedup();
        Ok(FPMonoid { q, generators })
    }

    /// Numerical monoid `⟨v_1, …⟩` with trivial unit classes.
    pub fn numerical(values: &[u64]) -> Result<Self> {
        let gens: Vec<FPElement> = values.iter().map(|&v| (0, v)).collect();
        Self::new(1, &gens)
    }

    /// Parses `"1:3,0:5"` (class:value pairs).
    pub fn parse(q: u64, text: &str) -> Result<Self> {
        let mut gens = Vec::new();
        for item in split_top_level(text) {
            let (c, v) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("generator {item:?} is not class:value")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("{s:?} is not a non-negative integer")))
            };
            gens.push((num(c)?, num(v)?));
        }
        Self::new(q, &gens)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn generators(&self) -> &[FPElement] {
        &self.generators
    }

    fn max_value(&self) -> u64 {
        self.generators.iter().map(|g| g.1).max().unwrap()
    }

    /// `reach[v * q + c]` for all values up to `cap`.
    fn reachability(&self, cap: u64) -> Vec<bool> {
        let q = self.q as usize;
        let mut reach = vec![false; (cap as usize + 1) * q];
        reach[0] = true;
        for v in 1..=cap as usize {
            for &(gc, gv) in &self.generators {
                let gv = gv as usize;
                if gv > v {
                    continue;
                }
                for c in 0..q {
                    let from = (v - gv) * q + (c + q - gc as usize) % q;
                    if reach[from] {
                        reach[v * q + c] = true;
                    }
                }
            }
        }
        reach
    }

    /// Atoms: generators that are not a sum of two nonzero elements.
    pub fn atoms(&self) -> Vec<FPElement> {
        let q = self.q as usize;
        let reach = self.reachability(self.max_value());
        self.generators
            .iter()
            .copied()
            .filter(|&(c, v)| {
                !(1..v).any(|w| {
                    (0..q).any(|d| {
                        let rest = (v - w) as usize * q + (c as usize + q - d) % q;
                        reach[w as usize * q + d] && reach[rest]
                    })
                })
            })
            .collect()
    }

    pub fn contains(&self, x: FPElement) -> bool {
        x.0 < self.q && self.reachability(x.1)[x.1 as usize * self.q as usize + x.0 as usize]
    }

    /// Smallest `α` with every `(class, value)`, `value >= α`, in the monoid.
    /// Found by locating a run of `max generator value` consecutive values
    /// with every class present, after which adding generators fills all
    /// larger values.
    pub fn conductor(&self) -> Result<u64> {
        let w = self.max_value();
        if gcd_all(self.generators.iter().map(|g| g.1)) != 1 {
            return Err(Error::NotFinitelyPrimary(
                "generator values have a common divisor".into(),
            ));
        }
        let limit = 4 * self.q * w * w + 4 * w;
        let q = self.q as usize;
        let reach = self.reachability(limit);
        let full = |v: u64| (0..q).all(|c| reach[v as usize * q + c]);
        let mut run = 0;
        for v in 0..=limit {
            if full(v) {
                run += 1;
                if run == w {
                    let start = v + 1 - w;
                    // walk back to the first value after the last gap
                    let mut alpha = start;
                    while alpha > 0 && full(alpha - 1) {
                        alpha -= 1;
                    }
                    return Ok(alpha);
                }
            } else {
                run = 0;
            }
        }
        Err(Error::NotFinitelyPrimary(format!(
            "no complete window of width {w} below value {limit}"
        )))
    }
}

/// Atoms of `M`, certified complete by checking the cap covers twice the
/// largest generator value.
pub fn fp_atoms(m: &FPMonoid, value_cap: u64) -> Result<Vec<FPElement>> {
    let needed = 2 * m.max_value();
    if value_cap < needed {
        return Err(Error::CapTooSmall { cap: value_cap, needed });
    }
    Ok(m.atoms())
}

/// Exact `L(x)` by dynamic programming over the atoms.
pub fn fp_length_set(m: &FPMonoid, x: FPElement) -> Result<LengthSet> {
    if x.0 >= m.q || !m.contains(x) {
        return Err(Error::NotRepresentable);
    }
    let atoms = m.atoms();
    let q = m.q as usize;
    let max_len = (x.1 / atoms.iter().map(|a| a.1).min().unwrap()) as usize;
    let words = (max_len + 1).div_ceil(64);
    let states = (x.1 as usize + 1) * q;
    let mut table = vec![0u64; states * words];
    table[0] = 1;
    for v in 1..=x.1 as usize {
        for c in 0..q {
            let dst = (v * q + c) * words;
            for &(ac, av) in &atoms {
                let av = av as usize;
                if av > v {
                    continue;
                }
                let src = ((v - av) * q + (c + q - ac as usize) % q) * words;
                let mut carry = 0;
                for i in 0..words {
                    let s = table[src + i];
                    table[dst + i] |= (s << 1) | carry;
                    carry = s >> 63;
                }
            }
        }
    }
    let base = (x.1 as usize * q + x.0 as usize) * words;
    Ok(LengthSet::new(
        (0..=max_len)
            .filter(|&k| table[base + k / 64] >> (k % 64) & 1 == 1)
            .map(|k| k as u64),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalProfile {
    #[serde(serialize_with = "ser_ratio")]
    pub rho: Ratio<u64>,
    pub accepted: bool,
    pub min_delta: Option<u64>,
    /// gcd of consecutive differences of the distinct atom values; 0 when
    /// all atoms share one value.
    pub d: u64,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// `min Δ(M)` from the lattice of relations
/// `Σ x_i (v_i, c_i) ∈ {0} × qZ` among the atoms.
pub fn fp_min_delta(m: &FPMonoid) -> Result<Option<u64>> {
    let cols = m
        .atoms()
        .into_iter()
        .map(|(c, v)| (vec![v as i64, c as i64], 1))
        .chain(std::iter::once((vec![0, m.q as i64], 0)));
    kernel_functional_gcd(cols, 2)
}

pub fn local_profile(m: &FPMonoid) -> Result<LocalProfile> {
    m.conductor()?;
    let mut values: Vec<u64> = m.atoms().iter().map(|a| a.1).collect();
    values.sort_unstable();
    values.dedup();
    let (lo, hi) = (values[0], *values.last().unwrap());
    Ok(LocalProfile {
        rho: Ratio::new(hi, lo),
        // the unit class group Z_q is finite, hence torsion
        accepted: true,
        min_delta: fp_min_delta(m)?,
        d: values.windows(2).fold(0, |g, w| gcd(g, w[1] - w[0])),
    })
}

/// `Δ_ρ*` of a product of local factors with minimal distances `d_i`.
pub fn delta_rho_star_product(d_list: &[u64]) -> Result<BTreeSet<u64>> {
    if d_list.is_empty() || d_list.contains(&0) {
        return Err(Error::Precondition("distances must be positive and nonempty".into()));
    }
    Ok(gcd_closure(&d_list.iter().copied().collect()))
}

/// What the minimal distances of the maximal-elasticity local factors rule
/// out about a group `G` with the same system of sets of lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub gcd: u64,
    /// `G` must be cyclic of order 4, 6 or 10.
    pub cyclic_4_6_10: bool,
    /// `G` has neither rank two nor the form `C_{p^k}^r` (`r >= 2`, `p^k >= 3`).
    pub excludes_rank_two_and_prime_power: bool,
    /// Elementary 2-group ranks `1 + d_i` allowed besides cyclic groups,
    /// valid only under the conjecture that `Δ_ρ(G) = {1}` for every `G`
    /// with `|G| > 4` that is neither cyclic nor an elementary 2-group.
    pub conditional_elementary_ranks: Vec<u64>,
    pub conclusions: Vec<String>,
}

pub fn transfer_obstruction(d_list: &[u64]) -> Result<ObstructionReport> {
    if d_list.is_empty() || d_list.contains(&0) {
        return Err(Error::Precondition("distances must be positive and nonempty".into()));
    }
    let g = gcd_all(d_list.iter().copied());
    let big: BTreeSet<u64> = d_list.iter().copied().filter(|&d| d > 1).collect();
    let mut conclusions = Vec::new();
    if g > 1 {
        conclusions.push("any group G with the same system of sets of lengths is cyclic of order 4, 6, or 10".into());
    }
    if !big.is_empty() {
        conclusions.push("G does not have rank two and is not of the form C_{p^k}^r with r >= 2 and p^k >= 3".into());
        for d in &big {
            conclusions.push(format!(
                "conditional on the conjecture: G is cyclic or isomorphic to C2^{}",
                1 + d
            ));
        }
    }
    Ok(ObstructionReport {
        gcd: g,
        cyclic_4_6_10: g > 1,
        excludes_rank_two_and_prime_power: !big.is_empty(),
        conditional_elementary_ranks: big.iter().map(|d| d + 1).collect(),
        conclusions,
    })
}
