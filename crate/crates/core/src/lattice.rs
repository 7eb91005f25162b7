//! Integer lattices in echelon (Hermite-style) form, used to compute the gcd
//! of a linear functional over the kernel of an integer matrix.
//!
//! For a matrix `M` with columns `c_j` and a functional `f`, the vectors
//! `(c_j, f(e_j))` generate a lattice whose elements with vanishing leading
//! block are exactly `(0, f(x))` for `x ∈ ker M`. In echelon form those are
//! spanned by the rows pivoting at the last coordinate, so the gcd of `f` on
//! the kernel is read off a single pivot.

use crate::arith::ext_gcd;
use crate::error::{Error, Result};
use crate::sequence::{GSequence, SupportSet};

fn overflow() -> Error {
    Error::Overflow("lattice entry exceeds i128")
}

/// `dst -= k * src`, checked.
fn sub_multiple(dst: &mut [i128], k: i128, src: &[i128]) -> Result<()> {
    if k == 0 {
        return Ok(());
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = k.checked_mul(s).and_then(|p| d.checked_sub(p)).ok_or_else(overflow)?;
    }
    Ok(())
}

/// `a * x + b * y`, checked.
fn combine(a: i128, x: &[i128], b: i128, y: &[i128]) -> Result<Vec<i128>> {
    x.iter()
        .zip(y)
        .map(|(&u, &v)| {
            a.checked_mul(u)
                .zip(b.checked_mul(v))
                .and_then(|(p, q)| p.checked_add(q))
                .ok_or_else(overflow)
        })
        .collect()
}

/// Row-echelon basis of a sublattice of `Z^dim`, pivots positive and
/// entries above each pivot reduced into `[0, pivot)`.
#[derive(Debug, Clone)]
pub struct Echelon {
    dim: usize,
    rows: Vec<Option<Vec<i128>>>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon {
            dim,
            rows: vec![None; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis rows ordered by pivot coordinate, with their pivot.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &[i128])> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(p, r)| r.as_deref().map(|r| (p, r)))
    }

    pub fn rank(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }

    pub fn insert(&mut self, mut v: Vec<i128>) -> Result<()> {
        assert_eq!(v.len(), self.dim, "vector dimension");
        let mut start = 0;
        loop {
            let Some(i) = (start..self.dim).find(|&i| v[i] != 0) else {
                return Ok(());
            };
            match self.rows[i].take() {
                None => {
                    if v[i] < 0 {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                    self.rows[i] = Some(v);
                    return self.reduce();
                }
                Some(r) => {
                    let (a, b) = (r[i], v[i]);
                    if b % a == 0 {
                        sub_multiple(&mut v, b / a, &r)?;
                        self.rows[i] = Some(r);
                    } else {
                        let (g, s, t) = ext_gcd(a, b);
                        let new_row = combine(s, &r, t, &v)?;
                        let rest = combine(b / g, &r, -(a / g), &v)?;
                        self.rows[i] = Some(new_row);
                        v = rest;
                    }
                    start = i + 1;
                }
            }
        }
    }

    /// Reduces every entry above a pivot modulo that pivot.
    fn reduce(&mut self) -> Result<()> {
        for j in (0..self.dim).rev() {
            let Some(rj) = self.rows[j].take() else { continue };
            let pj = rj[j];
            for p in 0..j {
                if let Some(rp) = self.rows[p].as_mut() {
                    let q = rp[j].div_euclid(pj);
                    sub_multiple(rp, q, &rj)?;
                }
            }
            self.rows[j] = Some(rj);
        }
        Ok(())
    }

    /// Pivot value of the row pivoting at `coord`, if any.
    pub fn pivot(&self, coord: usize) -> Option<i128> {
        self.rows[coord].as_ref().map(|r| r[coord])
    }
}

/// gcd of `f` over `{x ∈ Z^m : Σ x_j c_j = 0}` where column `j` is given as
/// `(c_j, f(e_j))`. Returns `None` when `f` vanishes on the kernel.
pub fn kernel_functional_gcd<I>(columns: I, rows: usize) -> Result<Option<u64>>
where
    I: IntoIterator<Item = (Vec<i64>, i64)>,
{
    let mut lat = Echelon::new(rows + 1);
    for (c, f) in columns {
        assert_eq!(c.len(), rows, "column height");
        let mut v: Vec<i128> = c.into_iter().map(i128::from).collect();
        v.push(f as i128);
        lat.insert(v)?;
    }
    Ok(lat.pivot(rows).map(|p| p as u64))
}

/// Atom-exponent matrix of a support together with an explicit integer basis
/// of its kernel.
#[derive(Debug, Clone)]
pub struct RelationKernel {
    atom_matrix: Vec<Vec<i64>>,
    kernel_basis: Vec<Vec<i64>>,
}

impl RelationKernel {
    /// Rows are support elements, columns are atoms.
    pub fn new(support: &SupportSet, atoms: &[GSequence]) -> Result<Self> {
        let k = support.len();
        let m = atoms.len();
        let atom_matrix: Vec<Vec<i64>> = (0..k)
            .map(|i| atoms.iter().map(|a| a.multiplicity(i) as i64).collect())
            .collect();
        let mut lat = Echelon::new(k + m);
        for (j, a) in atoms.iter().enumerate() {
            let mut v = vec![0i128; k + m];
            for (i, x) in v.iter_mut().take(k).enumerate() {
                *x = a.multiplicity(i) as i128;
            }
            v[k + j] = 1;
            lat.insert(v)?;
        }
        let kernel_basis = lat
            .rows()
            .filter(|&(p, _)| p >= k)
            .map(|(_, r)| {
                r[k..]
                    .iter()
                    .map(|&x| i64::try_from(x).map_err(|_| overflow()))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<_>>()?;
        Ok(RelationKernel {
            atom_matrix,
            kernel_basis,
        })
    }

    pub fn atom_matrix(&self) -> &[Vec<i64>] {
        &self.atom_matrix
    }

    pub fn kernel_basis(&self) -> &[Vec<i64>] {
        &self.kernel_basis
    }

    /// gcd of the coordinate sums of the basis vectors; `None` if all vanish.
    pub fn length_gcd(&self) -> Option<u64> {
        let g = self
            .kernel_basis
            .iter()
            .map(|b| b.iter().sum::<i64>().unsigned_abs())
            .fold(0, crate::arith::gcd);
        (g != 0).then_some(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_kernel_gcd() {
        // relation 5·(3) = 3·(5): kernel spanned by (5,-3), f = 1+1 -> gcd 2
        let cols = vec![(vec![3], 1), (vec![5], 1)];
        assert_eq!(kernel_functional_gcd(cols, 1).unwrap(), Some(2));
        // injective matrix: trivial kernel
        let cols = vec![(vec![1, 0], 1), (vec![0, 1], 1)];
        assert_eq!(kernel_functional_gcd(cols, 2).unwrap(), None);
    }

    fn mat_vec(cols: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
        let rows = cols.first().map_or(0, Vec::len);
        (0..rows)
            .map(|i| cols.iter().zip(x).map(|(c, &xi)| c[i] * xi).sum())
            .collect()
    }

    proptest! {
        #[test]
        fn echelon_rows_stay_in_lattice_and_span(
            cols in prop::collection::vec(prop::collection::vec(-6i64..7, 3), 1..7)
        ) {
            let mut lat = Echelon::new(3);
            for c in &cols {
                lat.insert(c.iter().map(|&x| x as i128).collect()).unwrap();
            }
            // every generator reduces to zero against the basis
            for c in &cols {
                let mut v: Vec<i128> = c.iter().map(|&x| x as i128).collect();
                for (p, r) in lat.rows() {
                    if v[p] % r[p] != 0 {
                        prop_assert!(false, "not spanned");
                    }
                    let k = v[p] / r[p];
                    sub_multiple(&mut v, k, r).unwrap();
                }
                prop_assert!(v.iter().all(|&x| x == 0));
            }
        }

        #[test]
        fn kernel_basis_is_kernel(
            cols in prop::collection::vec(prop::collection::vec(0i64..5, 2), 1..6)
        ) {
            let m = cols.len();
            let mut lat = Echelon::new(2 + m);
            for (j, c) in cols.iter().enumerate() {
                let mut v = vec![0i128; 2 + m];
                v[0] = c[0] as i128;
                v[1] = c[1] as i128;
                v[2 + j] = 1;
                lat.insert(v).unwrap();
            }
            let basis: Vec<Vec<i64>> = lat.rows().filter(|&(p, _)| p >= 2)
                .map(|(_, r)| r[2..].iter().map(|&x| x as i64).collect()).collect();
            for b in &basis {
                prop_assert!(mat_vec(&cols, b).iter().all(|&x| x == 0));
            }
            // the rank of the kernel is m - rank(M)
            let mut img = Echelon::new(2);
            for c in &cols {
                img.insert(c.iter().map(|&x| x as i128).collect()).unwrap();
            }
            prop_assert_eq!(basis.len(), m - img.rank());
        }
    }
}
