//! `F_p`-subspaces ("subgroups") in reduced row-echelon form, and their
//! exhaustive enumeration.

use std::collections::HashSet;

use crate::algebra::space::FpSpace;
use crate::error::{Error, Result};

/// An `F_p`-subspace of `F_p^e`, stored as its unique reduced row-echelon basis.
///
/// The pivot of a row is its lowest-index nonzero coordinate; pivots increase
/// down the rows, each pivot entry is 1 and every other row is 0 there.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubgroupBasis {
    space: FpSpace,
    rows: Vec<Vec<u32>>,
}

impl SubgroupBasis {
    pub fn zero(space: FpSpace) -> Self {
        SubgroupBasis { space, rows: Vec::new() }
    }

    pub fn full(space: FpSpace) -> Self {
        let rows = (0..space.dim()).map(|k| space.digits(space.basis_point(k))).collect();
        SubgroupBasis { space, rows }
    }

    pub fn space(&self) -> &FpSpace {
        &self.space
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.dim()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// `p^dim`.
    pub fn order(&self) -> usize {
        (self.space.p() as usize).pow(self.dim() as u32)
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn row_points(&self) -> Vec<usize> {
        self.rows.iter().map(|r| self.space.from_digits(r)).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.space.dim()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| leading(r).expect("basis rows are nonzero")).collect()
    }

    /// Membership by elimination against the basis.
    pub fn contains_digits(&self, v: &[u32]) -> bool {
        let p = self.space.p();
        let mut v = v.to_vec();
        for row in &self.rows {
            let piv = leading(row).unwrap();
            let c = v[piv];
            if c != 0 {
                sub_scaled(&mut v, row, c, p);
            }
        }
        v.iter().all(|&c| c == 0)
    }

    pub fn contains(&self, x: usize) -> bool {
        self.contains_digits(&self.space.digits(x))
    }

    /// All `p^dim` elements as points, in sorted order.
    pub fn elements(&self) -> Vec<usize> {
        let mut out = vec![0usize];
        for r in self.row_points() {
            let base = out.clone();
            for c in 1..self.space.p() {
                let step = self.space.scale(c, r);
                out.extend(base.iter().map(|&x| self.space.add(x, step)));
            }
        }
        out.sort_unstable();
        out
    }
}

fn leading(v: &[u32]) -> Option<usize> {
    v.iter().position(|&c| c != 0)
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime, so a^(p-2) is the inverse
    let (mut base, mut exp, mut acc) = (a as u64 % p as u64, p as u64 - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// `v -= c · row` over `F_p`.
fn sub_scaled(v: &mut [u32], row: &[u32], c: u32, p: u32) {
    let p64 = p as u64;
    for (x, &r) in v.iter_mut().zip(row) {
        if r != 0 {
            *x = ((*x as u64 + p64 - c as u64 * r as u64 % p64) % p64) as u32;
        }
    }
}

fn scale_to_monic(v: &mut [u32], p: u32) {
    if let Some(piv) = leading(v) {
        let s = inv_mod(v[piv], p) as u64;
        for x in v.iter_mut() {
            *x = (*x as u64 * s % p as u64) as u32;
        }
    }
}

/// Reduced row-echelon basis of the span of `vectors`.
pub fn echelonize(vectors: &[Vec<u32>], space: FpSpace) -> Result<SubgroupBasis> {
    let e = space.dim();
    let p = space.p();
    for v in vectors {
        if v.len() != e {
            return Err(Error::DimensionMismatch { expected: e, got: v.len() });
        }
        if let Some(&c) = v.iter().find(|&&c| c >= p) {
            return Err(Error::InvalidParameter(format!("coordinate {c} not reduced mod {p}")));
        }
    }
    let mut rows: Vec<Vec<u32>> = vectors.to_vec();
    let mut rank = 0;
    for col in 0..e {
        let Some(found) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, found);
        scale_to_monic(&mut rows[rank], p);
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let c = row[col];
                sub_scaled(row, &pivot_row, c, p);
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    Ok(SubgroupBasis { space, rows })
}

pub fn echelonize_points(points: &[usize], space: FpSpace) -> Result<SubgroupBasis> {
    let vectors: Vec<Vec<u32>> = points.iter().map(|&x| space.digits(x)).collect();
    echelonize(&vectors, space)
}

/// Incrementally built span, for early-exit rank tests.
#[derive(Debug, Clone)]
pub struct SpanBuilder {
    space: FpSpace,
    rows: Vec<(usize, Vec<u32>)>,
    // p = 2 fast path: rows as bit masks with their pivot bit
    bits: Vec<(usize, usize)>,
}

impl SpanBuilder {
    pub fn new(space: FpSpace) -> Self {
        SpanBuilder { space, rows: Vec::new(), bits: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        if self.space.p() == 2 {
            self.bits.len()
        } else {
            self.rows.len()
        }
    }

    /// Adds `x` to the spanning set; returns whether the rank grew.
    pub fn insert(&mut self, x: usize) -> bool {
        if self.space.p() == 2 {
            let mut v = x;
            for &(piv, row) in &self.bits {
                if v & piv != 0 {
                    v ^= row;
                }
            }
            if v == 0 {
                return false;
            }
            self.bits.push((v & v.wrapping_neg(), v));
            return true;
        }
        let p = self.space.p();
        let mut v = self.space.digits(x);
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                sub_scaled(&mut v, row, c, p);
            }
        }
        match leading(&v) {
            None => false,
            Some(piv) => {
                scale_to_monic(&mut v, p);
                self.rows.push((piv, v));
                true
            }
        }
    }
}

/// Limits on exhaustive subgroup enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumBudget {
    /// Largest ambient space, in points.
    pub max_points: usize,
    /// Largest number of subgroups a single enumeration may yield.
    pub max_subgroups: u128,
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget { max_points: 1 << 16, max_subgroups: 100_000_000 }
    }
}

/// Number of `k`-dimensional subspaces of `F_p^n` (Gaussian binomial), saturating.
pub fn gaussian_binomial(n: usize, k: usize, p: u32) -> u128 {
    if k > n {
        return 0;
    }
    // row[j] = [i; j]_p, built up over i
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            let pj = (p as u128).checked_pow(j as u32).unwrap_or(u128::MAX);
            row[j] = row[j - 1].saturating_add(pj.saturating_mul(row[j]));
        }
    }
    row[k]
}

/// Every subgroup of `space` with dimension in `min_dim..=max_dim`, each once.
///
/// Order: increasing dimension, then pivot sets in lexicographic order, then
/// the free coordinates counted little-endian.
pub fn enumerate_subgroups(
    space: FpSpace,
    min_dim: usize,
    max_dim: usize,
    budget: &EnumBudget,
) -> Result<SubgroupIter> {
    if min_dim > max_dim || max_dim > space.dim() {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= min_dim <= max_dim <= {}, got {min_dim}..={max_dim}",
            space.dim()
        )));
    }
    if space.size() > budget.max_points {
        return Err(Error::BudgetExceeded(format!(
            "F_{}^{} has {} points, enumeration allows at most {}",
            space.p(),
            space.dim(),
            space.size(),
            budget.max_points
        )));
    }
    let count = count_subgroups(space, min_dim, max_dim);
    if count > budget.max_subgroups {
        return Err(Error::EnumerationTooLarge { count, bound: budget.max_subgroups });
    }
    let mut it = SubgroupIter {
        space,
        max_dim,
        dim: min_dim,
        pivots: (0..min_dim).collect(),
        free: Vec::new(),
        counter: Vec::new(),
        done: false,
    };
    it.reset_free();
    Ok(it)
}

pub fn count_subgroups(space: FpSpace, min_dim: usize, max_dim: usize) -> u128 {
    (min_dim..=max_dim).map(|k| gaussian_binomial(space.dim(), k, space.p())).fold(0u128, |a, b| a.saturating_add(b))
}

#[derive(Debug, Clone)]
pub struct SubgroupIter {
    space: FpSpace,
    max_dim: usize,
    dim: usize,
    pivots: Vec<usize>,
    /// (row, column) positions not fixed by the echelon shape.
    free: Vec<(usize, usize)>,
    counter: Vec<u32>,
    done: bool,
}

impl SubgroupIter {
    fn reset_free(&mut self) {
        let e = self.space.dim();
        self.free.clear();
        for (r, &piv) in self.pivots.iter().enumerate() {
            for col in piv + 1..e {
                if !self.pivots.contains(&col) {
                    self.free.push((r, col));
                }
            }
        }
        self.counter = vec![0; self.free.len()];
    }

    fn current(&self) -> SubgroupBasis {
        let e = self.space.dim();
        let mut rows: Vec<Vec<u32>> = self
            .pivots
            .iter()
            .map(|&piv| {
                let mut r = vec![0u32; e];
                r[piv] = 1;
                r
            })
            .collect();
        for (&(r, col), &c) in self.free.iter().zip(&self.counter) {
            rows[r][col] = c;
        }
        SubgroupBasis { space: self.space, rows }
    }

    fn advance(&mut self) {
        let p = self.space.p();
        for c in self.counter.iter_mut() {
            *c += 1;
            if *c < p {
                return;
            }
            *c = 0;
        }
        if next_combination(&mut self.pivots, self.space.dim()) {
            self.reset_free();
            return;
        }
        self.dim += 1;
        if self.dim > self.max_dim {
            self.done = true;
            return;
        }
        self.pivots = (0..self.dim).collect();
        self.reset_free();
    }
}

impl Iterator for SubgroupIter {
    type Item = SubgroupBasis;

    fn next(&mut self) -> Option<SubgroupBasis> {
        if self.done {
            return None;
        }
        let out = self.current();
        self.advance();
        Some(out)
    }
}

/// Next `k`-subset of `0..n` in lexicographic order; false when exhausted.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Whether a nonempty finite set of points is closed under addition.
pub fn is_closed_under_addition(set: &[usize], space: &FpSpace) -> Result<bool> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("closure test needs a nonempty set".into()));
    }
    let members: HashSet<usize> = set.iter().copied().collect();
    Ok(members.iter().all(|&x| members.iter().all(|&y| members.contains(&space.add(x, y)))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(p: u32, e: usize) -> FpSpace {
        FpSpace::new(p, e).unwrap()
    }

    #[test]
    fn echelonize_plane() {
        let b = echelonize(&[vec![1, 0], vec![0, 1], vec![1, 1]], sp(2, 2)).unwrap();
        assert_eq!(b.rows(), &[vec![1, 0], vec![0, 1]]);
        assert_eq!(b.dim(), 2);
    }

    #[test]
    fn echelonize_empty_is_zero_subgroup() {
        let b = echelonize(&[], sp(3, 4)).unwrap();
        assert_eq!(b.dim(), 0);
        assert_eq!(b.elements(), vec![0]);
        assert_eq!(b, SubgroupBasis::zero(sp(3, 4)));
    }

    // Span of (1,1,0), (0,1,1) over F_3 enumerated by hand: 9 elements.
    #[test]
    fn echelonize_over_f3() {
        let s = sp(3, 3);
        let b = echelonize(&[vec![1, 1, 0], vec![0, 1, 1]], s).unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.rows(), &[vec![1, 0, 2], vec![0, 1, 1]]);
        assert!(b.contains_digits(&[1, 2, 1]));
        let mut brute = Vec::new();
        for a in 0..3u32 {
            for c in 0..3u32 {
                let v = [a % 3, (a + c) % 3, c % 3];
                brute.push(s.from_digits(&v));
            }
        }
        brute.sort_unstable();
        assert_eq!(b.elements(), brute);
        for x in 0..s.size() {
            assert_eq!(b.contains(x), brute.contains(&x));
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(matches!(
            echelonize(&[vec![1, 0, 0]], sp(2, 2)),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn counts_match_examples() {
        let b = EnumBudget::default();
        assert_eq!(enumerate_subgroups(sp(2, 3), 2, 2, &b).unwrap().count(), 7);
        assert_eq!(enumerate_subgroups(sp(3, 2), 1, 1, &b).unwrap().count(), 4);
        for e in 0..5 {
            let zs: Vec<_> = enumerate_subgroups(sp(2, e), 0, 0, &b).unwrap().collect();
            assert_eq!(zs, vec![SubgroupBasis::zero(sp(2, e))]);
        }
        assert_eq!(gaussian_binomial(8, 4, 2), 200_787);
        assert_eq!(gaussian_binomial(4, 2, 3), 130);
    }

    #[test]
    fn enumeration_budget_names_the_bound() {
        let tight = EnumBudget { max_points: 1 << 16, max_subgroups: 10 };
        match enumerate_subgroups(sp(2, 4), 0, 4, &tight) {
            Err(Error::EnumerationTooLarge { count, bound }) => {
                assert_eq!(count, 67);
                assert_eq!(bound, 10);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(enumerate_subgroups(sp(2, 17), 0, 1, &EnumBudget::default()).is_err());
    }

    #[test]
    fn enumerated_subgroups_are_canonical_and_closed() {
        let s = sp(3, 3);
        let all: Vec<_> = enumerate_subgroups(s, 0, 3, &EnumBudget::default()).unwrap().collect();
        let distinct: HashSet<_> = all.iter().map(|b| b.elements()).collect();
        assert_eq!(distinct.len(), all.len());
        for b in &all {
            let again = echelonize(b.rows(), s).unwrap();
            assert_eq!(&again, b);
            assert!(is_closed_under_addition(&b.elements(), &s).unwrap());
            assert_eq!(b.elements().len(), b.order());
        }
    }

    #[test]
    fn closure_examples() {
        let s = sp(2, 2);
        assert!(is_closed_under_addition(&[0], &s).unwrap());
        assert!(!is_closed_under_addition(&[1, 2], &s).unwrap());
        assert!(is_closed_under_addition(&[], &s).is_err());
    }

    #[test]
    fn span_builder_rank() {
        for p in [2, 3] {
            let s = sp(p, 4);
            let mut sb = SpanBuilder::new(s);
            let pts = [5usize, 7, 12, 5, 0];
            let grew: Vec<bool> = pts.iter().map(|&x| sb.insert(x)).collect();
            let expected = echelonize_points(&pts, s).unwrap().dim();
            assert_eq!(sb.rank(), expected);
            assert!(!grew[3] && !grew[4]);
        }
    }
}
