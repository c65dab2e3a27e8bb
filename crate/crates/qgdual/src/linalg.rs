//! Sparse row-major matrices over any [`Scalar`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qpoly::{LaurentPoly, Rational};
use crate::scalar::Scalar;

/// Rows hold `(column, value)` pairs sorted by column, with no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<S> {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, S)>>,
}

/// One differing entry between two operators.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryDiff<S> {
    pub row: usize,
    pub col: usize,
    pub lhs: S,
    pub rhs: S,
}

impl<S: Scalar> Operator<S> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| S::one()).collect())
    }

    pub fn diagonal(d: Vec<S>) -> Self {
        let n = d.len();
        let rows = d
            .into_iter()
            .enumerate()
            .map(|(i, v)| if v.is_zero() { vec![] } else { vec![(i, v)] })
            .collect();
        Self { nrows: n, ncols: n, rows }
    }

    /// Builds from triplets, summing duplicates.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, S)>,
    {
        let mut buckets: Vec<Vec<(usize, S)>> = vec![Vec::new(); nrows];
        for (r, c, v) in entries {
            assert!(r < nrows && c < ncols, "entry ({r},{c}) out of bounds");
            buckets[r].push((c, v));
        }
        let rows = buckets.into_iter().map(compress_row).collect();
        Self { nrows, ncols, rows }
    }

    pub fn from_dense(m: &[Vec<S>]) -> Self {
        let nrows = m.len();
        let ncols = m.first().map_or(0, |r| r.len());
        Self::from_triplets(
            nrows,
            ncols,
            m.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, v)| (i, j, v.clone()))),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Side length; panics on non-square operators.
    pub fn dim(&self) -> usize {
        assert_eq!(self.nrows, self.ncols, "operator is not square");
        self.nrows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, S)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => self.rows[i][k].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        let mut out = vec![vec![S::zero(); self.ncols]; self.nrows];
        for (i, j, v) in self.entries() {
            out[i][j] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// Entries whose residual exceeds `tol` (exact rings: any nonzero entry).
    pub fn first_nonzero(&self, tol: f64) -> Option<(usize, usize, S)> {
        self.entries()
            .find(|(_, _, v)| v.residual() > tol)
            .map(|(i, j, v)| (i, j, v.clone()))
    }

    /// Largest absolute row sum; meaningful for float rings only.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows())
            .map(|i| self.row(i).iter().map(|(_, v)| v.residual()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.residual()).fold(0.0, f64::max)
    }

    /// First entry where `self` and `other` differ by more than `tol`.
    pub fn first_difference(&self, other: &Self, tol: f64) -> Option<EntryDiff<S>> {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        for i in 0..self.nrows {
            let mut cols: Vec<usize> = self.rows[i]
                .iter()
                .chain(other.rows[i].iter())
                .map(|(c, _)| *c)
                .collect();
            cols.sort_unstable();
            cols.dedup();
            for j in cols {
                let a = self.get(i, j);
                let b = other.get(i, j);
                if (a.clone() - b.clone()).residual() > tol {
                    return Some(EntryDiff { row: i, col: j, lhs: a, rhs: b });
                }
            }
        }
        None
    }

    pub fn map<T: Scalar, F: Fn(&S) -> T>(&self, f: F) -> Operator<T> {
        Operator::from_triplets(
            self.nrows,
            self.ncols,
            self.entries().map(|(i, j, v)| (i, j, f(v))),
        )
    }

    /// Entrywise map that may fail.
    pub fn try_map<T: Scalar, F: Fn(&S) -> Result<T>>(&self, f: F) -> Result<Operator<T>> {
        let mut out = Vec::with_capacity(self.nnz());
        for (i, j, v) in self.entries() {
            out.push((i, j, f(v)?));
        }
        Ok(Operator::from_triplets(self.nrows, self.ncols, out))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.entries().map(|(i, j, v)| (j, i, v.clone())),
        )
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| v.mul_ref(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.entries()
                .map(|(i, j, v)| (i, j, v.clone()))
                .chain(other.entries().map(|(i, j, v)| (i, j, v.clone()))),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&(-S::one())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch in product");
        let rows: Vec<Vec<(usize, S)>> = self
            .rows
            .par_iter()
            .map(|r| {
                let mut acc: Vec<(usize, S)> = Vec::new();
                for (k, a) in r {
                    for (j, b) in &other.rows[*k] {
                        acc.push((*j, a.mul_ref(b)));
                    }
                }
                compress_row(acc)
            })
            .collect();
        Self {
            nrows: self.nrows,
            ncols: other.ncols,
            rows,
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Kronecker product, left factor most significant.
    pub fn kron(&self, other: &Self) -> Self {
        let (br, bc) = (other.nrows, other.ncols);
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.entries() {
            for (k, l, b) in other.entries() {
                entries.push((i * br + k, j * bc + l, a.mul_ref(b)));
            }
        }
        Self::from_triplets(self.nrows * br, self.ncols * bc, entries)
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.ncols);
        self.rows
            .iter()
            .map(|r| {
                let mut acc = S::zero();
                for (j, a) in r {
                    acc.add_ref(&a.mul_ref(&v[*j]));
                }
                acc
            })
            .collect()
    }

    /// Restriction to the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.ncols];
        for (k, c) in cols.iter().enumerate() {
            pos[*c] = k;
        }
        let mut entries = Vec::new();
        for (a, r) in rows.iter().enumerate() {
            for (c, v) in &self.rows[*r] {
                if pos[*c] != usize::MAX {
                    entries.push((a, pos[*c], v.clone()));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), entries)
    }

    pub fn row_sums(&self) -> Vec<S> {
        self.rows
            .iter()
            .map(|r| {
                let mut acc = S::zero();
                for (_, v) in r {
                    acc.add_ref(v);
                }
                acc
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && self.first_difference(&self.transpose(), 0.0).is_none()
    }
}

fn compress_row<S: Scalar>(mut r: Vec<(usize, S)>) -> Vec<(usize, S)> {
    r.sort_by_key(|(c, _)| *c);
    let mut out: Vec<(usize, S)> = Vec::with_capacity(r.len());
    for (c, v) in r {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => lv.add_ref(&v),
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

/// Rank over Q of Laurent-polynomial vectors after substituting a rational q.
///
/// Specialization can only lower rank, so full rank here certifies linear
/// independence over the field of rational functions in q.
pub fn rank_at(vectors: &[Vec<LaurentPoly>], q: &Rational) -> usize {
    let mut m: Vec<Vec<Rational>> = vectors
        .iter()
        .map(|v| v.iter().map(|p| p.eval_rational(q)).collect())
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !num::Zero::is_zero(&m[r][col])) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for r in 0..m.len() {
            if r != rank && !num::Zero::is_zero(&m[r][col]) {
                let f = &m[r][col] / &pivot;
                for c in col..ncols {
                    let t = &m[rank][c] * &f;
                    m[r][c] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Divides every entry exactly, failing with the offending entry.
pub fn div_exact_entries<S: Scalar>(op: &Operator<S>, d: &S) -> Result<Operator<S>> {
    op.try_map(|v| {
        v.div_exact(d)
            .ok_or_else(|| Error::Inexact(format!("{} / {}", v.to_text(), d.to_text())))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Operator<f64> {
        Operator::from_dense(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn product_and_commutator() {
        let a = m(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let b = m(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(a.mul(&b), m(&[&[1.0, 0.0], &[0.0, 0.0]]));
        assert_eq!(a.commutator(&b), m(&[&[1.0, 0.0], &[0.0, -1.0]]));
    }

    #[test]
    fn kron_ordering() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let i = Operator::<f64>::identity(2);
        let k = a.kron(&i);
        assert_eq!(k.get(0, 2), 2.0);
        assert_eq!(k.get(3, 1), 3.0);
        assert_eq!(i.kron(&a).get(1, 0), 3.0);
    }

    #[test]
    fn rank_detects_dependence() {
        let v1 = vec![LaurentPoly::q(), LaurentPoly::one()];
        let v2 = vec![LaurentPoly::q_pow(2), LaurentPoly::q()];
        let q = Rational::new(2.into(), 3.into());
        assert_eq!(rank_at(&[v1.clone(), v2], &q), 1);
        assert_eq!(rank_at(&[v1, vec![LaurentPoly::one(), LaurentPoly::zero()]], &q), 2);
    }
}
