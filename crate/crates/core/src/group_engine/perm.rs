use std::fmt;

use crate::algebra::FpSpace;
use crate::error::{Error, Result};

/// A permutation of `0..N` stored as its image table. Acts on the right:
/// `a.then(b)` maps `x` to `b(a(x))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    table: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { table: (0..n as u32).collect() }
    }

    pub fn from_table(table: Vec<u32>) -> Result<Self> {
        let n = table.len();
        let mut seen = vec![false; n];
        for &y in &table {
            let y = y as usize;
            if y >= n {
                return Err(Error::NotAPermutation(format!("image {y} out of range 0..{n}")));
            }
            if seen[y] {
                return Err(Error::NotAPermutation(format!("image {y} occurs twice")));
            }
            seen[y] = true;
        }
        Ok(Permutation { table })
    }

    pub fn from_images(images: &[usize]) -> Result<Self> {
        if images.iter().any(|&y| y > u32::MAX as usize) {
            return Err(Error::NotAPermutation("degree too large".into()));
        }
        Self::from_table(images.iter().map(|&y| y as u32).collect())
    }

    /// Product of disjoint or overlapping cycles, applied left to right.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut acc = Permutation::identity(n);
        for cycle in cycles {
            let mut table: Vec<u32> = (0..n as u32).collect();
            for (k, &x) in cycle.iter().enumerate() {
                let y = cycle[(k + 1) % cycle.len()];
                if x >= n || y >= n {
                    return Err(Error::NotAPermutation(format!("cycle point out of range 0..{n}")));
                }
                table[x] = y as u32;
            }
            acc = acc.then(&Permutation::from_table(table)?);
        }
        Ok(acc)
    }

    /// The translation `x ↦ x + v` of an `F_p`-space.
    pub fn translation(space: &FpSpace, v: usize) -> Self {
        Permutation { table: (0..space.size()).map(|x| space.add(x, v) as u32).collect() }
    }

    pub(crate) fn from_table_unchecked(table: Vec<u32>) -> Self {
        debug_assert!(Self::from_table(table.clone()).is_ok());
        Permutation { table }
    }

    pub fn degree(&self) -> usize {
        self.table.len()
    }

    pub fn image(&self, x: usize) -> usize {
        self.table[x] as usize
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn into_table(self) -> Vec<u32> {
        self.table
    }

    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation { table: self.table.iter().map(|&y| other.table[y as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Permutation { table: inv }
    }

    pub fn pow(&self, k: usize) -> Permutation {
        let mut acc = Permutation::identity(self.degree());
        for _ in 0..k {
            acc = acc.then(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    pub fn smallest_moved(&self) -> Option<usize> {
        self.table.iter().enumerate().position(|(x, &y)| x != y as usize)
    }

    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.table.len()];
        let mut cycles = 0;
        for start in 0..self.table.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.table[x] as usize;
            }
        }
        cycles
    }

    pub fn is_even(&self) -> bool {
        (self.degree() - self.cycle_count()).is_multiple_of(2)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_invert() {
        let a = Permutation::from_cycles(5, &[&[0, 1]]).unwrap();
        let b = Permutation::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
        // 0 -a-> 1 -b-> 2
        assert_eq!(a.then(&b).image(0), 2);
        assert!(a.then(&a.inverse()).is_identity());
        assert!(b.pow(5).is_identity());
        assert!(!a.is_even());
        assert!(b.is_even());
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_table(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_table(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn translation_has_order_p() {
        let s = FpSpace::new(3, 2).unwrap();
        let t = Permutation::translation(&s, 5);
        assert!(!t.is_identity());
        assert!(t.pow(3).is_identity());
    }
}
