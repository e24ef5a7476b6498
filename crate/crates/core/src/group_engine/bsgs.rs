//! Deterministic Schreier–Sims.
//!
//! Base points are taken greedily as the smallest point moved by a strong
//! generator that fixes the current base. Each level keeps a Schreier vector
//! (the generator that first reached every orbit point) instead of explicit
//! coset representatives, so memory stays linear in `N` per level.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::One;

use super::perm::Permutation;
use crate::error::{Error, Result};

/// Default largest degree accepted by [`bsgs`].
pub const DEFAULT_MAX_DEGREE: usize = 1 << 16;

const UNREACHED: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

#[derive(Debug, Clone)]
struct Level {
    point: usize,
    /// Indices into the strong generating set.
    gens: Vec<usize>,
    orbit: Vec<usize>,
    /// Per point: the strong generator whose edge reached it, or a marker.
    label: Vec<u32>,
}

impl Level {
    fn new(point: usize, degree: usize) -> Self {
        let mut label = vec![UNREACHED; degree];
        label[point] = ROOT;
        Level { point, gens: Vec::new(), orbit: vec![point], label }
    }

    fn add_gen(&mut self, gi: usize, strong: &[Permutation]) {
        self.gens.push(gi);
        let old = self.orbit.len();
        for idx in 0..old {
            let y = strong[gi].image(self.orbit[idx]);
            if self.label[y] == UNREACHED {
                self.label[y] = gi as u32;
                self.orbit.push(y);
            }
        }
        let mut idx = old;
        while idx < self.orbit.len() {
            let x = self.orbit[idx];
            for &g in &self.gens {
                let y = strong[g].image(x);
                if self.label[y] == UNREACHED {
                    self.label[y] = g as u32;
                    self.orbit.push(y);
                }
            }
            idx += 1;
        }
    }

    fn in_orbit(&self, x: usize) -> bool {
        self.label[x] != UNREACHED
    }
}

/// A base and strong generating set with its stabiliser chain.
#[derive(Debug, Clone)]
pub struct GroupBsgs {
    degree: usize,
    generators: Vec<Permutation>,
    strong: Vec<Permutation>,
    strong_inv: Vec<Permutation>,
    levels: Vec<Level>,
    order: BigUint,
}

pub fn bsgs(generators: &[Permutation]) -> Result<GroupBsgs> {
    bsgs_with_limit(generators, DEFAULT_MAX_DEGREE)
}

pub fn bsgs_with_limit(generators: &[Permutation], max_degree: usize) -> Result<GroupBsgs> {
    let Some(first) = generators.first() else {
        return Err(Error::InvalidParameter("at least one generator is required".into()));
    };
    let degree = first.degree();
    if let Some(bad) = generators.iter().find(|g| g.degree() != degree) {
        return Err(Error::DimensionMismatch { expected: degree, got: bad.degree() });
    }
    if degree > max_degree {
        return Err(Error::BudgetExceeded(format!("degree {degree} exceeds the BSGS limit {max_degree}")));
    }
    let mut g = GroupBsgs {
        degree,
        generators: generators.to_vec(),
        strong: Vec::new(),
        strong_inv: Vec::new(),
        levels: Vec::new(),
        order: BigUint::one(),
    };
    g.schreier_sims();
    g.order = g.levels.iter().fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()));
    Ok(g)
}

impl GroupBsgs {
    fn push_strong(&mut self, h: Permutation) -> usize {
        self.strong_inv.push(h.inverse());
        self.strong.push(h);
        self.strong.len() - 1
    }

    fn schreier_sims(&mut self) {
        let mut seen = HashSet::new();
        for gen in &self.generators {
            if !gen.is_identity() && seen.insert(gen.clone()) {
                self.strong_inv.push(gen.inverse());
                self.strong.push(gen.clone());
            }
        }
        for gi in 0..self.strong.len() {
            let fixes_base = self.levels.iter().all(|l| self.strong[gi].image(l.point) == l.point);
            if fixes_base {
                let b = self.strong[gi].smallest_moved().expect("non-identity");
                self.levels.push(Level::new(b, self.degree));
            }
        }
        for li in 0..self.levels.len() {
            let stabilising: Vec<usize> = (0..self.strong.len())
                .filter(|&gi| self.levels[..li].iter().all(|l| self.strong[gi].image(l.point) == l.point))
                .collect();
            for gi in stabilising {
                self.levels[li].add_gen(gi, &self.strong);
            }
        }

        // Schreier generators already shown to lie in the next stabiliser.
        // Stabilisers only grow, so these checks stay valid.
        let mut checked: Vec<HashSet<(usize, usize)>> = vec![HashSet::new(); self.levels.len()];
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let li = i as usize;
            let mut descended = None;
            'scan: for oi in 0..self.levels[li].orbit.len() {
                let beta = self.levels[li].orbit[oi];
                let mut u_beta: Option<Permutation> = None;
                for gk in 0..self.levels[li].gens.len() {
                    let gi = self.levels[li].gens[gk];
                    if !checked[li].insert((beta, gi)) {
                        continue;
                    }
                    let u = u_beta.get_or_insert_with(|| self.transversal(li, beta));
                    let candidate = u.then(&self.strong[gi]).into_table();
                    let (h, j) = self.strip(candidate, li);
                    let h = Permutation::from_table_unchecked(h);
                    if h.is_identity() {
                        continue;
                    }
                    if j == self.levels.len() {
                        let b = h.smallest_moved().expect("non-identity");
                        self.levels.push(Level::new(b, self.degree));
                        checked.push(HashSet::new());
                    }
                    let hi = self.push_strong(h);
                    for l in li + 1..=j {
                        self.levels[l].add_gen(hi, &self.strong);
                    }
                    descended = Some(j);
                    break 'scan;
                }
            }
            match descended {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
    }

    /// Coset representative `u` at level `li` with `point^u = beta`.
    fn transversal(&self, li: usize, beta: usize) -> Permutation {
        let level = &self.levels[li];
        let mut path = Vec::new();
        let mut x = beta;
        while x != level.point {
            let gi = level.label[x] as usize;
            path.push(gi);
            x = self.strong_inv[gi].image(x);
        }
        let mut u = Permutation::identity(self.degree);
        for &gi in path.iter().rev() {
            u = u.then(&self.strong[gi]);
        }
        u
    }

    /// Sifts `g` through the chain from level `start`; returns the residue and
    /// the level at which it left the chain (`levels.len()` if it got through).
    fn strip(&self, mut g: Vec<u32>, start: usize) -> (Vec<u32>, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(start) {
            let mut beta = g[level.point] as usize;
            if !level.in_orbit(beta) {
                return (g, l);
            }
            while beta != level.point {
                let inv = &self.strong_inv[level.label[beta] as usize];
                for y in g.iter_mut() {
                    *y = inv.table()[*y as usize];
                }
                beta = inv.image(beta);
            }
        }
        let n = self.levels.len();
        (g, n)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    /// Fundamental orbit lengths, one per base point.
    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Membership by sifting.
    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, j) = self.strip(g.table().to_vec(), 0);
        j == self.levels.len() && h.iter().enumerate().all(|(x, &y)| x == y as usize)
    }
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FpSpace;

    #[test]
    fn translations_of_f2_squared() {
        let s = FpSpace::new(2, 2).unwrap();
        let gens = [Permutation::translation(&s, 1), Permutation::translation(&s, 2)];
        let g = bsgs(&gens).unwrap();
        assert_eq!(g.order(), &BigUint::from(4u32));
    }

    #[test]
    fn transposition_and_five_cycle() {
        let gens = [
            Permutation::from_cycles(5, &[&[0, 1]]).unwrap(),
            Permutation::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap(),
        ];
        let g = bsgs(&gens).unwrap();
        assert_eq!(g.order(), &BigUint::from(120u32));
        assert_eq!(g.order(), &factorial(5));
    }

    #[test]
    fn identity_group() {
        let g = bsgs(&[Permutation::identity(6)]).unwrap();
        assert_eq!(g.order(), &BigUint::one());
        assert!(g.base().is_empty());
        assert!(g.contains(&Permutation::identity(6)));
        assert!(!g.contains(&Permutation::from_cycles(6, &[&[0, 1]]).unwrap()));
    }

    #[test]
    fn degree_mismatch_and_empty() {
        assert!(bsgs(&[]).is_err());
        assert!(matches!(
            bsgs(&[Permutation::identity(3), Permutation::identity(4)]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(bsgs_with_limit(&[Permutation::identity(10)], 8), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn membership_in_dihedral_group() {
        // D_6 acting on a hexagon
        let r = Permutation::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]).unwrap();
        let s = Permutation::from_cycles(6, &[&[1, 5], &[2, 4]]).unwrap();
        let g = bsgs(&[r.clone(), s.clone()]).unwrap();
        assert_eq!(g.order(), &BigUint::from(12u32));
        assert!(g.contains(&r.then(&s).then(&r)));
        assert!(!g.contains(&Permutation::from_cycles(6, &[&[0, 1]]).unwrap()));
        let product: BigUint = g.orbit_lengths().iter().fold(BigUint::one(), |a, &l| a * BigUint::from(l));
        assert_eq!(&product, g.order());
    }

    #[test]
    fn generators_sift_to_identity() {
        let gens = [
            Permutation::from_cycles(9, &[&[0, 1, 2], &[3, 4, 5]]).unwrap(),
            Permutation::from_cycles(9, &[&[2, 3, 6, 7]]).unwrap(),
            Permutation::from_cycles(9, &[&[7, 8]]).unwrap(),
        ];
        let g = bsgs(&gens).unwrap();
        assert_eq!(g.order(), &factorial(9));
        for s in g.strong_generators() {
            assert!(g.contains(s));
        }
    }
}
