//! Continued-fraction formulas for `min Δ` of small supports in cyclic
//! groups, the witness criterion for `Δ_ρ*(C_n) ⊄ {1, n-2}`, and the
//! sufficient arithmetic conditions for such a witness.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::arith::{gcd, is_prime, is_square, primes_up_to};
use crate::error::{Error, Result};

/// Partial quotients `[a_0, …, a_m]` of a rational `n/a > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CFExpansion {
    quotients: Vec<u64>,
}

impl CFExpansion {
    pub fn new(quotients: Vec<u64>) -> Result<Self> {
        if quotients.is_empty() || quotients[1..].contains(&0) {
            return Err(Error::Precondition(
                "partial quotients after a_0 must be positive".into(),
            ));
        }
        Ok(CFExpansion { quotients })
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    /// `m`, the index of the last quotient.
    pub fn m(&self) -> usize {
        self.quotients.len() - 1
    }

    /// Last quotient at least 2, or a single term.
    pub fn is_regular(&self) -> bool {
        self.quotients.len() == 1 || *self.quotients.last().unwrap() >= 2
    }

    pub fn is_odd_length(&self) -> bool {
        self.quotients.len() % 2 == 1
    }

    /// Numerator and denominator in lowest terms, via continuants.
    pub fn value(&self) -> Result<(u64, u64)> {
        let (mut p, mut p_prev) = (1u64, 0u64);
        let (mut q, mut q_prev) = (0u64, 1u64);
        for &a in &self.quotients {
            let np = a
                .checked_mul(p)
                .and_then(|x| x.checked_add(p_prev))
                .ok_or(Error::Overflow("continuant"))?;
            let nq = a
                .checked_mul(q)
                .and_then(|x| x.checked_add(q_prev))
                .ok_or(Error::Overflow("continuant"))?;
            (p_prev, p) = (p, np);
            (q_prev, q) = (q, nq);
        }
        Ok((p, q))
    }

    /// Same value with an odd number of quotients.
    pub fn to_odd_length(&self) -> CFExpansion {
        if self.is_odd_length() {
            return self.clone();
        }
        let mut q = self.quotients.clone();
        let last = q.pop().unwrap();
        if last >= 2 {
            q.push(last - 1);
            q.push(1);
        } else {
            *q.last_mut().unwrap() += 1;
        }
        CFExpansion { quotients: q }
    }
}

impl fmt::Display for CFExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.quotients.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

fn check_pair(n: u64, a: u64) -> Result<()> {
    if a == 0 || a >= n {
        return Err(Error::Precondition(format!("need n > a >= 1, got n = {n}, a = {a}")));
    }
    let g = gcd(n, a);
    if g != 1 {
        return Err(Error::NotCoprime { n, a, gcd: g });
    }
    Ok(())
}

/// Euclidean expansion of `n/a`.
pub fn cf_regular(n: u64, a: u64) -> Result<CFExpansion> {
    check_pair(n, a)?;
    let (mut x, mut y) = (n, a);
    let mut q = Vec::new();
    while y != 0 {
        q.push(x / y);
        (x, y) = (y, x % y);
    }
    Ok(CFExpansion { quotients: q })
}

pub fn cf_odd_length(n: u64, a: u64) -> Result<CFExpansion> {
    Ok(cf_regular(n, a)?.to_odd_length())
}

/// `min Δ({g, ag}) ⊂ C_n` as `gcd(a_1, a_3, …, a_{m-1})` of the odd-length
/// expansion of `n/a`.
pub fn min_delta_pair_cf(n: u64, a: u64) -> Result<u64> {
    if n <= 3 || a < 2 {
        return Err(Error::Precondition(format!(
            "need n > 3 and a in [2, n-1], got n = {n}, a = {a}"
        )));
    }
    let cf = cf_odd_length(n, a)?;
    Ok(cf.quotients().iter().skip(1).step_by(2).fold(0, |g, &x| gcd(g, x)))
}

/// `gcd(a_0 - 1, a_1, …, a_{m-1}, a_m - 1)` over the regular expansion.
fn quad_gcd(q: &[u64]) -> u64 {
    let m = q.len() - 1;
    let mut g = gcd(q[0] - 1, q[m] - 1);
    for &x in &q[1..m] {
        if g == 1 {
            break;
        }
        g = gcd(g, x);
    }
    g
}

/// `min Δ({g, -g, ag, -ag}) ⊂ C_n` for `2 <= a < n/2`.
pub fn min_delta_quad_cf(n: u64, a: u64) -> Result<u64> {
    if a < 2 || 2 * a >= n {
        return Err(Error::Precondition(format!(
            "need 2 <= a < n/2, got n = {n}, a = {a} (use n - a)"
        )));
    }
    Ok(quad_gcd(cf_regular(n, a)?.quotients()))
}

/// Smallest `a ∈ [2, ⌊n/2⌋]` coprime to `n` whose regular expansion has
/// `gcd(a_0 - 1, a_1, …, a_{m-1}, a_m - 1) > 1`.
pub fn smallest_witness(n: u64) -> Option<u64> {
    (2..=n / 2).find(|&a| gcd(n, a) == 1 && quad_gcd(cf_regular(n, a).expect("coprime").quotients()) > 1)
}

/// The sufficient conditions guaranteeing a witness for `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterTag {
    /// `n` even and `n - 1` not prime.
    Cond1,
    /// `n` even, `3 ∤ n`, and `n - 3` not prime.
    Cond2,
    /// `n` even and `n ≡ 2q mod q²` for an odd prime `q` with `q² + 2q <= n`.
    Cond3,
    /// `n` even and `n ≡ q mod 2q + 1` for an odd `q >= 3` with `5q + 2 <= n`.
    Cond4,
    /// `n > 5` odd and `n - 1` a perfect square.
    Cond6,
}

impl FilterTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterTag::Cond1 => "cond1",
            FilterTag::Cond2 => "cond2",
            FilterTag::Cond3 => "cond3",
            FilterTag::Cond4 => "cond4",
            FilterTag::Cond6 => "cond6",
        }
    }
}

pub fn witness_filters(n: u64) -> BTreeSet<FilterTag> {
    let mut out = BTreeSet::new();
    let even = n.is_multiple_of(2);
    if even && !is_prime(n - 1) {
        out.insert(FilterTag::Cond1);
    }
    if even && !n.is_multiple_of(3) && n >= 3 && !is_prime(n - 3) {
        out.insert(FilterTag::Cond2);
    }
    if even {
        let root = (n as f64).sqrt() as u64 + 1;
        if primes_up_to(root)
            .into_iter()
            .filter(|&q| q > 2 && q * q + 2 * q <= n)
            .any(|q| n % (q * q) == 2 * q)
        {
            out.insert(FilterTag::Cond3);
        }
        if (3..)
            .step_by(2)
            .take_while(|&q| 5 * q + 2 <= n)
            .any(|q| n % (2 * q + 1) == q)
        {
            out.insert(FilterTag::Cond4);
        }
    }
    if !even && n > 5 && is_square(n - 1) {
        out.insert(FilterTag::Cond6);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansions() {
        assert_eq!(cf_regular(10, 3).unwrap().quotients(), &[3, 3]);
        assert_eq!(cf_regular(8, 3).unwrap().quotients(), &[2, 1, 2]);
        assert_eq!(cf_regular(17, 4).unwrap().quotients(), &[4, 4]);
        assert_eq!(cf_regular(7, 1).unwrap().quotients(), &[7]);
        assert_eq!(cf_odd_length(10, 3).unwrap().quotients(), &[3, 2, 1]);
        assert_eq!(cf_odd_length(8, 3).unwrap().quotients(), &[2, 1, 2]);
        assert_eq!(cf_odd_length(5, 2).unwrap().quotients(), &[2, 1, 1]);
        assert_eq!(cf_odd_length(13, 5).unwrap().quotients(), &[2, 1, 1, 1, 1]);
        assert!(matches!(cf_regular(10, 4), Err(Error::NotCoprime { gcd: 2, .. })));
        assert!(cf_regular(3, 5).is_err());
        let odd = CFExpansion::new(vec![2, 3, 1]).unwrap();
        assert_eq!(CFExpansion::new(vec![2, 4]).unwrap().to_odd_length(), odd);
        assert_eq!(
            CFExpansion::new(vec![2, 1, 1, 1]).unwrap().to_odd_length().quotients(),
            &[2, 1, 2]
        );
        assert_eq!(odd.to_string(), "[2,3,1]");
    }

    #[test]
    fn expansions_reconstruct() {
        for n in 2..=2000u64 {
            for a in 1..n {
                if gcd(n, a) != 1 {
                    continue;
                }
                let r = cf_regular(n, a).unwrap();
                assert!(r.is_regular());
                assert_eq!(r.value().unwrap(), (n, a));
                let o = r.to_odd_length();
                assert!(o.is_odd_length());
                assert_eq!(o.value().unwrap(), (n, a));
            }
        }
    }

    #[test]
    fn formula_examples() {
        assert_eq!(min_delta_pair_cf(10, 3).unwrap(), 2);
        assert_eq!(min_delta_pair_cf(8, 3).unwrap(), 1);
        assert_eq!(min_delta_pair_cf(13, 5).unwrap(), 1);
        assert_eq!(min_delta_quad_cf(10, 3).unwrap(), 2);
        assert_eq!(min_delta_quad_cf(17, 4).unwrap(), 3);
        assert_eq!(min_delta_quad_cf(8, 3).unwrap(), 1);
        assert!(min_delta_quad_cf(10, 7).is_err());
        assert!(min_delta_pair_cf(3, 2).is_err());
    }

    #[test]
    fn pair_formula_stays_below_n_minus_2() {
        // a = n - 1 gives {g, -g}, whose value is exactly n - 2
        for n in 4..300u64 {
            for a in 2..n - 1 {
                if gcd(n, a) == 1 {
                    assert!(min_delta_pair_cf(n, a).unwrap() < n - 2, "n = {n}, a = {a}");
                }
            }
        }
    }

    #[test]
    fn witnesses() {
        assert_eq!(smallest_witness(8), None);
        assert_eq!(smallest_witness(17), Some(4));
        assert_eq!(smallest_witness(10), Some(3));
        // n = m² + 1 has the witness m with gcd m - 1
        for m in 3..40u64 {
            let n = m * m + 1;
            assert_eq!(min_delta_quad_cf(n, m).unwrap(), m - 1);
        }
    }

    #[test]
    fn filters() {
        use FilterTag::*;
        assert_eq!(witness_filters(16), BTreeSet::from([Cond1]));
        let f26 = witness_filters(26);
        assert!(!f26.contains(&Cond2));
        assert!(f26.contains(&Cond1));
        assert_eq!(witness_filters(17), BTreeSet::from([Cond6]));
        assert_eq!(witness_filters(24), BTreeSet::from([Cond3, Cond4]));
        assert!(witness_filters(18).is_empty());
    }

    #[test]
    fn filters_are_sufficient() {
        for n in (8..=3000u64).step_by(2) {
            let f = witness_filters(n);
            if f.iter().any(|t| *t != FilterTag::Cond6) {
                assert!(smallest_witness(n).is_some(), "n = {n}: {f:?}");
            }
        }
        for n in (7..=3001u64).step_by(2) {
            if witness_filters(n).contains(&FilterTag::Cond6) {
                assert!(smallest_witness(n).is_some(), "n = {n}");
            }
        }
    }
}
