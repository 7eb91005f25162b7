//! Acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Reference values fall in two groups. Published values are copied below
//! verbatim. Derived values come from oracles written here from scratch:
//! exhaustive sets of lengths and a plain Euclid continued fraction.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zslen::arith::gcd;
use zslen::delta_rho::divisor_closure;
use zslen::*;

enum Verdict {
    Pass(String),
    Fail(String),
    /// The literal criterion is not met, and the reason has been
    /// established independently.
    Deviation(String),
}

type Criterion = fn() -> Verdict;

fn set(xs: &[u64]) -> BTreeSet<u64> {
    xs.iter().copied().collect()
}

fn group(f: &[u64]) -> AbelianGroup {
    AbelianGroup::new(f).unwrap()
}

fn budget() -> ResourceConfig {
    ResourceConfig::default()
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Verdict::Fail(format!($($msg)+));
        }
    };
}

fn within(t: Instant, limit: Duration) -> bool {
    t.elapsed() < limit
}

// delta_rho of C_4, ..., C_12
fn small_cyclic_table() -> Verdict {
    let published: [(u64, &[u64]); 9] = [
        (4, &[2]),
        (5, &[1, 3]),
        (6, &[4]),
        (7, &[1, 5]),
        (8, &[1, 6]),
        (9, &[1, 7]),
        (10, &[2, 8]),
        (11, &[1, 9]),
        (12, &[1, 10]),
    ];
    let t = Instant::now();
    for (n, want) in published {
        let r = delta_rho(&group(&[n]), &budget()).unwrap();
        ensure!(r.star_enumerated, "C{n}: star not enumerated");
        ensure!(
            r.exact.as_ref() == Some(&set(want)),
            "C{n}: exact {:?}, want {want:?}",
            r.exact
        );
        ensure!(r.delta_rho_star == set(want), "C{n}: star {:?}", r.delta_rho_star);
    }
    ensure!(within(t, Duration::from_secs(300)), "took {:?}", t.elapsed());
    Verdict::Pass(format!("9/9 groups match, {:?}", t.elapsed()))
}

const PUBLISHED_EXCEPTIONAL: [u64; 24] = [
    8, 12, 14, 18, 20, 30, 32, 44, 48, 54, 62, 72, 74, 84, 90, 102, 138, 182, 230, 252, 270, 450, 462, 2844,
];

/// gcd(a_0 - 1, a_1, ..., a_{m-1}, a_m - 1) of the regular expansion of n/a.
fn quad_gcd_oracle(n: u64, a: u64) -> u64 {
    let (mut x, mut y) = (n, a);
    let mut q = Vec::new();
    while y != 0 {
        q.push(x / y);
        (x, y) = (y, x % y);
    }
    let m = q.len() - 1;
    q[1..m].iter().fold(gcd(q[0] - 1, q[m] - 1), |g, &v| gcd(g, v))
}

// exceptional even n up to 3000
fn exceptional_scan() -> Verdict {
    let t = Instant::now();
    let run = |engine| {
        let opts = ScanOptions {
            engine,
            witnesses: false,
            ..ScanOptions::default()
        };
        scan_exceptional(8, 3000, &opts).unwrap().exceptional
    };
    let both = run(Engine::Both);
    let elapsed = t.elapsed();
    let (e1, e2) = (run(Engine::E1), run(Engine::E2));
    ensure!(e1 == e2 && e2 == both, "engines disagree: {e1:?} vs {e2:?}");
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    // independent oracle over every even n
    let oracle: Vec<u64> = (8..=3000u64)
        .step_by(2)
        .filter(|&n| !(2..=n / 2).any(|a| gcd(n, a) == 1 && quad_gcd_oracle(n, a) > 1))
        .collect();
    ensure!(oracle == both, "scan {both:?} differs from oracle {oracle:?}");
    let published = set(&PUBLISHED_EXCEPTIONAL);
    let computed: BTreeSet<u64> = both.iter().copied().collect();
    let missing: Vec<u64> = published.difference(&computed).copied().collect();
    let extra: Vec<u64> = computed.difference(&published).copied().collect();
    if missing.is_empty() && extra.is_empty() {
        return Verdict::Pass(format!("24 values, engines agree, {elapsed:?}"));
    }
    ensure!(
        missing.is_empty() && extra == [272],
        "missing {missing:?}, extra {extra:?}"
    );
    // confirm 272 straight from the definition: enumerate every qualifying
    // support of C_272 and collect the minimal distances
    let star = delta_rho_with(&group(&[272]), &budget(), true).unwrap().delta_rho_star;
    ensure!(star == set(&[1, 270]), "C272 star {star:?}");
    Verdict::Deviation(format!(
        "computed list is the published list plus 272; engines agree ({elapsed:?}); \
         no witness a <= 136 for 272, and enumeration gives delta_rho*(C272) = {{1,270}}"
    ))
}

// elementary 2-groups of rank 2, 3, 4
fn elementary_two_groups() -> Verdict {
    for r in 2..=4u64 {
        let g = group(&vec![2; r as usize]);
        let enumerated = delta_rho_with(&g, &budget(), true).unwrap();
        let want = set(&[1, r - 1]);
        ensure!(
            enumerated.delta_rho_star == want,
            "C2^{r} enumerated {:?}",
            enumerated.delta_rho_star
        );
        let by_rule = delta_rho(&g, &budget()).unwrap();
        ensure!(by_rule.exact == Some(want.clone()), "C2^{r} exact {:?}", by_rule.exact);
    }
    Verdict::Pass("C2^2, C2^3, C2^4 give {1, r-1} by enumeration".into())
}

// 1 in delta_rho* except for C_4, C_6, C_10
fn one_in_star_dichotomy() -> Verdict {
    let with_one: [&[u64]; 8] = [&[5], &[7], &[8], &[9], &[12], &[2, 2], &[2, 4], &[3, 3]];
    for f in with_one {
        let star = delta_rho_with(&group(f), &budget(), true).unwrap().delta_rho_star;
        ensure!(star.contains(&1), "{}: {star:?}", group(f));
        ensure!(one_in_delta_rho(&group(f)), "{}: rule disagrees", group(f));
    }
    for n in [4u64, 6, 10] {
        let star = delta_rho_with(&group(&[n]), &budget(), true).unwrap().delta_rho_star;
        ensure!(star.first().is_some_and(|&m| m > 1), "C{n}: {star:?}");
        ensure!(!one_in_delta_rho(&group(&[n])), "C{n}: rule disagrees");
    }
    Verdict::Pass("8 groups contain 1, C4/C6/C10 have min > 1".into())
}

// delta_rho* = {1} for rank two and C2+C2+C4
fn rank_two_and_c2c2c4() -> Verdict {
    let groups: [&[u64]; 4] = [&[3, 3], &[2, 4], &[2, 6], &[2, 2, 4]];
    let mut slowest = Duration::ZERO;
    for f in groups {
        let t = Instant::now();
        let star = delta_rho_with(&group(f), &budget(), true).unwrap().delta_rho_star;
        let el = t.elapsed();
        slowest = slowest.max(el);
        ensure!(star == set(&[1]), "{}: {star:?}", group(f));
        ensure!(el < Duration::from_secs(120), "{}: {el:?}", group(f));
    }
    Verdict::Pass(format!("4 groups give {{1}}, slowest {slowest:?}"))
}

// continued-fraction formulas against the kernel computation
fn cf_cross_oracle() -> Verdict {
    let t = Instant::now();
    let mut compared = 0;
    for n in 5..=60u64 {
        let c = group(&[n]);
        let el = |k: u64| c.element(&[k as i64]).unwrap();
        for a in (2..n).filter(|&a| gcd(a, n) == 1) {
            let pair = SupportSet::new(&c, [el(1), el(a)]).unwrap();
            let kernel = min_delta(&pair, &budget()).unwrap();
            let cf = min_delta_pair_cf(n, a).unwrap();
            ensure!(kernel == Some(cf), "pair n={n} a={a}: cf {cf}, kernel {kernel:?}");
            compared += 1;
            if 2 * a < n {
                let quad = SupportSet::new(&c, [el(1), el(a), el(n - 1), el(n - a)]).unwrap();
                let kernel = min_delta(&quad, &budget()).unwrap();
                let cf = min_delta_quad_cf(n, a).unwrap();
                ensure!(kernel == Some(cf), "quad n={n} a={a}: cf {cf}, kernel {kernel:?}");
                ensure!(cf == quad_gcd_oracle(n, a), "quad n={n} a={a}: oracle differs");
                compared += 1;
            }
        }
    }
    ensure!(within(t, Duration::from_secs(60)), "took {:?}", t.elapsed());
    Verdict::Pass(format!("{compared} comparisons, {:?}", t.elapsed()))
}

/// Exhaustive sets of lengths over one support, computed without the
/// library's length engine.
struct BruteForce {
    atoms: Vec<Vec<u32>>,
    memo: HashMap<Vec<u32>, BTreeSet<u64>>,
}

impl BruteForce {
    fn lengths(&mut self, b: &[u32]) -> BTreeSet<u64> {
        if b.iter().all(|&x| x == 0) {
            return set(&[0]);
        }
        if let Some(l) = self.memo.get(b) {
            return l.clone();
        }
        let mut out = BTreeSet::new();
        for i in 0..self.atoms.len() {
            if self.atoms[i].iter().zip(b).all(|(a, x)| a <= x) {
                let rest: Vec<u32> = b.iter().zip(&self.atoms[i]).map(|(x, a)| x - a).collect();
                out.extend(self.lengths(&rest).into_iter().map(|l| l + 1));
            }
        }
        self.memo.insert(b.to_vec(), out.clone());
        out
    }
}

/// Every distance observed in `L(B)` for zero-sum `B` with `|B| <= max_len`.
fn observed_distances(s: &SupportSet, atoms: &AtomSet, max_len: u64) -> BTreeSet<u64> {
    let g = s.group();
    let elems: Vec<GroupElement> = s.elements().to_vec();
    let mut bf = BruteForce {
        atoms: atoms.atoms().iter().map(|a| a.counts().to_vec()).collect(),
        memo: HashMap::new(),
    };
    let mut out = BTreeSet::new();
    let mut counts = vec![0u32; elems.len()];
    #[allow(clippy::too_many_arguments)]
    fn walk(
        pos: usize,
        len: u64,
        max_len: u64,
        sum: GroupElement,
        g: &AbelianGroup,
        elems: &[GroupElement],
        counts: &mut Vec<u32>,
        bf: &mut BruteForce,
        out: &mut BTreeSet<u64>,
    ) {
        if pos == elems.len() {
            if len > 0 && sum.is_zero() {
                let l: Vec<u64> = bf.lengths(counts).into_iter().collect();
                out.extend(l.windows(2).map(|w| w[1] - w[0]));
            }
            return;
        }
        let mut s = sum;
        for c in 0..=(max_len - len) as u32 {
            counts[pos] = c;
            walk(pos + 1, len + c as u64, max_len, s.clone(), g, elems, counts, bf, out);
            s = g.add(&s, &elems[pos]).unwrap();
        }
        counts[pos] = 0;
    }
    walk(0, 0, max_len, g.zero(), g, &elems, &mut counts, &mut bf, &mut out);
    out
}

const ORACLE_GROUPS: [&[u64]; 16] = [
    &[3],
    &[4],
    &[5],
    &[6],
    &[7],
    &[8],
    &[9],
    &[10],
    &[12],
    &[16],
    &[2, 2],
    &[2, 4],
    &[3, 3],
    &[2, 6],
    &[2, 2, 2],
    &[4, 4],
];

/// Random supports of 2 to 4 nonzero elements with at most 40 atoms.
fn random_supports(count: usize, seed: u64) -> Vec<(SupportSet, AtomSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let g = group(ORACLE_GROUPS.choose(&mut rng).unwrap());
        let mut nonzero: Vec<usize> = (1..g.order() as usize).collect();
        nonzero.shuffle(&mut rng);
        let k = rng.gen_range(2..=4usize).min(nonzero.len());
        let s = SupportSet::from_indices(&g, nonzero.into_iter().take(k));
        let atoms = enumerate_atoms(&s, &budget()).unwrap();
        if atoms.len() <= 40 {
            out.push((s, atoms));
        }
    }
    out
}

// kernel gcd against exhaustive sets of lengths
fn kernel_vs_brute_force() -> Verdict {
    let samples = random_supports(200, 7);
    let mut with_distances = 0;
    for (s, atoms) in &samples {
        let kernel = lengths::min_delta_of_atoms(atoms).unwrap();
        let seen = observed_distances(s, atoms, 4 * atoms.davenport());
        let brute = seen.iter().fold(0, |g, &d| gcd(g, d));
        let brute = (brute != 0).then_some(brute);
        ensure!(
            kernel == brute,
            "{{{}}} in {}: kernel {kernel:?}, brute {brute:?}",
            s.format(),
            s.group()
        );
        with_distances += usize::from(brute.is_some());
    }
    Verdict::Pass(format!("200 supports agree ({with_distances} with distances)"))
}

// finitely primary local profiles and products
fn local_profiles() -> Verdict {
    let p = local_profile(&FPMonoid::numerical(&[3, 5]).unwrap()).unwrap();
    ensure!(
        p.rho == num_rational::Ratio::new(5, 3) && p.d == 2 && p.min_delta == Some(2),
        "<3,5>: {p:?}"
    );
    let p = local_profile(&FPMonoid::parse(2, "1:3,0:5").unwrap()).unwrap();
    ensure!(
        p.rho == num_rational::Ratio::new(5, 3) && p.d == 2 && p.min_delta == Some(4),
        "<(1,3),(0,5)>: {p:?}"
    );
    let prod = delta_rho_star_product(&[2, 3]).unwrap();
    ensure!(prod == set(&[1, 2, 3]), "product {prod:?}");
    Verdict::Pass("<3,5> = (5/3, 2, 2), example monoid = (5/3, 2, 4), product {1,2,3}".into())
}

// structural properties
fn property_suites() -> Verdict {
    let b = budget();
    // sumset containment on products of atoms
    for (s, atoms) in random_supports(30, 11) {
        let list = atoms.atoms();
        for x in list.iter().take(6) {
            for y in list.iter().take(6) {
                let (lx, ly) = (length_set(x, &atoms).unwrap(), length_set(y, &atoms).unwrap());
                let xy = x.product(y);
                let lxy = length_set(&xy, &atoms).unwrap();
                ensure!(lx.sumset(&ly).is_subset(&lxy), "sumset fails on {}", s.format());
                let lxyy = length_set(&xy.product(y), &atoms).unwrap();
                ensure!(lxy.sumset(&ly).is_subset(&lxyy), "sumset fails on {}", s.format());
            }
        }
    }
    // every observed distance is a multiple of min delta, which is attained as their gcd
    for (s, atoms) in random_supports(40, 13) {
        let m = lengths::min_delta_of_atoms(&atoms).unwrap();
        let seen = observed_distances(&s, &atoms, 3 * atoms.davenport());
        if let Some(m) = m {
            ensure!(seen.iter().all(|d| d % m == 0), "{}: {seen:?} vs {m}", s.format());
        } else {
            ensure!(seen.is_empty(), "{}: distances without min delta", s.format());
        }
    }
    // sandwich bounds
    let groups: [&[u64]; 10] = [
        &[4],
        &[5],
        &[6],
        &[10],
        &[12],
        &[2, 2],
        &[2, 4],
        &[3, 3],
        &[2, 2, 2],
        &[2, 2, 4],
    ];
    for f in groups {
        let r = delta_rho_with(&group(f), &b, true).unwrap();
        ensure!(r.sandwich_holds(), "{}: {r:?}", group(f));
        ensure!(r.upper == divisor_closure(&r.delta_rho_star), "{}: upper", group(f));
    }
    // min delta divides |U| - 2 on symmetric supports
    let symmetric: Vec<SupportSet> = random_supports(100, 17)
        .into_iter()
        .map(|(s, _)| s.symmetric_closure())
        .collect();
    for s in &symmetric {
        let atoms = enumerate_atoms(s, &b).unwrap();
        let g = atoms.atoms().iter().fold(0, |g, u| gcd(g, u.len() - 2));
        if let Some(m) = lengths::min_delta_of_atoms(&atoms).unwrap() {
            ensure!(g % m == 0, "{}: {m} does not divide {g}", s.format());
        }
    }
    // filter hits are confirmed by the scan's witnesses
    let report = scan_exceptional(8, 3000, &ScanOptions::default()).unwrap();
    let mut hits = 0;
    for n in (8..=3000u64).step_by(2) {
        if !witness_filters(n).is_empty() {
            hits += 1;
            let a = report.witnesses.get(&n);
            ensure!(
                a.is_some_and(|&a| quad_gcd_oracle(n, a) > 1),
                "filter hit {n} lacks a witness"
            );
        }
    }
    Verdict::Pass(format!(
        "sumset, gcd, sandwich, 100 symmetric supports, {hits} filter hits"
    ))
}

// C_10 against C_2^9
fn cyclic_vs_elementary() -> Verdict {
    let c10 = delta_rho(&group(&[10]), &budget()).unwrap();
    let e = delta_rho(&group(&[2; 9]), &budget()).unwrap();
    ensure!(c10.exact == Some(set(&[2, 8])), "C10: {:?}", c10.exact);
    ensure!(
        !e.star_enumerated && e.provenance == Provenance::TheoremElem2,
        "C2^9 was enumerated"
    );
    ensure!(e.exact == Some(set(&[1, 8])), "C2^9: {:?}", e.exact);
    ensure!(!set(&[2, 8]).is_subset(&set(&[1, 8])), "containment");
    Verdict::Pass("{2,8} is not contained in {1,8}".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, Criterion); 10] = [
        ("delta_rho of C4..C12", small_cyclic_table),
        ("exceptional cyclic orders up to 3000", exceptional_scan),
        ("elementary 2-groups of rank 2..4", elementary_two_groups),
        ("1 in delta_rho* dichotomy", one_in_star_dichotomy),
        ("rank two and C2+C2+C4 give {1}", rank_two_and_c2c2c4),
        ("continued fractions vs kernel, n <= 60", cf_cross_oracle),
        ("kernel vs brute force, 200 supports", kernel_vs_brute_force),
        ("finitely primary profiles", local_profiles),
        ("property suites", property_suites),
        ("C10 vs C2^9", cyclic_vs_elementary),
    ];
    // straight to the stderr handle so the report survives output capture
    let report = |line: String| {
        let _ = writeln!(std::io::stderr(), "{line}");
    };
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        match f() {
            Verdict::Pass(msg) => report(format!("criterion {n:>2} PASS  {name}: {msg}")),
            Verdict::Fail(msg) => {
                report(format!("criterion {n:>2} FAIL  {name}: {msg}"));
                unexpected.push(n);
            }
            Verdict::Deviation(msg) => {
                report(format!(
                    "criterion {n:>2} FAIL  {name}: published list not reproduced: {msg}"
                ));
                // the only accepted deviation is the extra 272 in the scan
                if n != 2 {
                    unexpected.push(n);
                }
            }
        }
    }
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
