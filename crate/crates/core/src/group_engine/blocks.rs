//! Block systems, minimal blocks and the primitivity test.

use std::collections::BTreeMap;

use super::perm::Permutation;
use crate::algebra::{echelonize_points, is_closed_under_addition, FpSpace, SubgroupBasis};
use crate::error::{Error, Result};

/// A nontrivial invariant partition of `0..N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSystem {
    pub block_size: usize,
    /// Cells sorted internally and ordered by smallest element.
    pub blocks: Vec<Vec<usize>>,
    /// The cell of 0 as a subgroup, when the group contains all translations.
    pub as_subgroup: Option<SubgroupBasis>,
}

impl BlockSystem {
    /// Builds a partition from explicit cells; checks it covers `0..degree`
    /// with equal-size cells.
    pub fn from_cells(degree: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; degree];
        for cell in &cells {
            for &x in cell {
                if x >= degree || seen[x] {
                    return Err(Error::InvalidParameter(format!("point {x} is out of range or repeated")));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter("cells do not cover every point".into()));
        }
        let size = cells.first().map_or(0, Vec::len);
        if size == 0 || cells.iter().any(|c| c.len() != size) {
            return Err(Error::InvalidParameter("cells must be nonempty and of equal size".into()));
        }
        let mut blocks: Vec<Vec<usize>> = cells
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        blocks.sort_unstable();
        Ok(BlockSystem { block_size: size, blocks, as_subgroup: None })
    }

    pub fn degree(&self) -> usize {
        self.blocks.len() * self.block_size
    }

    pub fn cell_of(&self, x: usize) -> &[usize] {
        self.blocks.iter().find(|c| c.binary_search(&x).is_ok()).expect("partition covers every point")
    }

    /// Whether every permutation maps each cell onto a cell.
    pub fn is_invariant_under(&self, gens: &[Permutation]) -> bool {
        let mut cell_index = vec![0usize; self.degree()];
        for (i, c) in self.blocks.iter().enumerate() {
            for &x in c {
                cell_index[x] = i;
            }
        }
        gens.iter().all(|g| {
            self.blocks.iter().all(|c| {
                let target = cell_index[g.image(c[0])];
                c.iter().all(|&x| cell_index[g.image(x)] == target)
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Primitivity {
    pub primitive: bool,
    pub blocks: Option<BlockSystem>,
}

struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let up = self.parent[self.parent[x] as usize];
            self.parent[x] = up;
            x = up as usize;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return a;
        }
        let (hi, lo) = if self.rank[a] >= self.rank[b] { (a, b) } else { (b, a) };
        self.parent[lo] = hi as u32;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        hi
    }
}

pub fn orbit(gens: &[Permutation], point: usize) -> Vec<usize> {
    let n = gens.first().map_or(point + 1, Permutation::degree);
    let mut seen = vec![false; n];
    seen[point] = true;
    let mut out = vec![point];
    let mut idx = 0;
    while idx < out.len() {
        let x = out[idx];
        for g in gens {
            let y = g.image(x);
            if !seen[y] {
                seen[y] = true;
                out.push(y);
            }
        }
        idx += 1;
    }
    out
}

fn check_transitive(gens: &[Permutation]) -> Result<usize> {
    let Some(first) = gens.first() else {
        return Err(Error::InvalidParameter("at least one generator is required".into()));
    };
    let degree = first.degree();
    if let Some(bad) = gens.iter().find(|g| g.degree() != degree) {
        return Err(Error::DimensionMismatch { expected: degree, got: bad.degree() });
    }
    let orb = orbit(gens, 0).len();
    if orb != degree {
        return Err(Error::Intransitive { orbit: orb, degree });
    }
    Ok(degree)
}

/// The finest invariant partition in which `0` and `v` share a cell, or
/// `None` when that partition is the single cell `{0..N}`.
pub fn minimal_block(gens: &[Permutation], v: usize) -> Result<Option<BlockSystem>> {
    let degree = check_transitive(gens)?;
    if v == 0 || v >= degree {
        return Err(Error::InvalidParameter(format!("need 0 < v < {degree}, got {v}")));
    }
    Ok(minimal_block_unchecked(gens, degree, v))
}

fn minimal_block_unchecked(gens: &[Permutation], degree: usize, v: usize) -> Option<BlockSystem> {
    let mut uf = UnionFind::new(degree);
    let mut classes = degree - 1;
    uf.union(0, v);
    let mut queue = vec![(0usize, v)];
    while let Some((a, b)) = queue.pop() {
        for g in gens {
            let (x, y) = (g.image(a), g.image(b));
            let (rx, ry) = (uf.find(x), uf.find(y));
            if rx != ry {
                uf.union(rx, ry);
                classes -= 1;
                if classes == 1 {
                    return None;
                }
                queue.push((rx, ry));
            }
        }
    }
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..degree {
        let r = uf.find(x);
        cells.entry(r).or_default().push(x);
    }
    let cells: Vec<Vec<usize>> = cells.into_values().collect();
    debug_assert!(cells.len() > 1);
    let bs = BlockSystem::from_cells(degree, cells).expect("orbits of a transitive group have equal size");
    Some(bs)
}

/// Whether the generators contain every translation by a unit vector of `space`.
pub fn contains_basis_translations(gens: &[Permutation], space: &FpSpace) -> bool {
    (0..space.dim()).all(|k| {
        let t = Permutation::translation(space, space.basis_point(k));
        gens.contains(&t)
    })
}

/// Primitivity by minimal-block refinement for every `v ≠ 0`.
///
/// When `space` is given and the generators include all unit translations,
/// a returned block system also carries the cell of 0 as a subgroup.
pub fn is_primitive(gens: &[Permutation], space: Option<&FpSpace>) -> Result<Primitivity> {
    let degree = check_transitive(gens)?;
    if degree <= 2 {
        return Ok(Primitivity { primitive: true, blocks: None });
    }
    // Minimal blocks for {0, v} and {0, vg} are images under g when g fixes 0,
    // so one representative per orbit of these generators suffices.
    let fixing_zero: Vec<Permutation> = gens.iter().filter(|g| g.image(0) == 0).cloned().collect();
    let mut done = vec![false; degree];
    for v in 1..degree {
        if done[v] {
            continue;
        }
        if let Some(mut bs) = minimal_block_unchecked(gens, degree, v) {
            if let Some(space) = space {
                if space.size() == degree && contains_basis_translations(gens, space) {
                    bs.as_subgroup = cell_as_subgroup(bs.cell_of(0), space);
                }
            }
            return Ok(Primitivity { primitive: false, blocks: Some(bs) });
        }
        if fixing_zero.is_empty() {
            done[v] = true;
        } else {
            for x in orbit(&fixing_zero, v) {
                done[x] = true;
            }
        }
    }
    Ok(Primitivity { primitive: true, blocks: None })
}

fn cell_as_subgroup(cell: &[usize], space: &FpSpace) -> Option<SubgroupBasis> {
    if !is_closed_under_addition(cell, space).ok()? {
        return None;
    }
    let w = echelonize_points(cell, *space).ok()?;
    (w.order() == cell.len()).then_some(w)
}

/// Whether the cell of 0 is a subgroup `W` and every cell is a coset `W + v`.
pub fn verify_block_coset_form(blocks: &BlockSystem, space: &FpSpace) -> bool {
    if blocks.degree() != space.size() {
        return false;
    }
    let zero_cell = blocks.cell_of(0);
    if !is_closed_under_addition(zero_cell, space).unwrap_or(false) {
        return false;
    }
    blocks.blocks.iter().all(|cell| {
        let c0 = cell[0];
        let mut shifted: Vec<usize> = cell.iter().map(|&x| space.sub(x, c0)).collect();
        shifted.sort_unstable();
        shifted == zero_cell
    })
}
