//! Structural checks on the mixing layer and a direct search for subgroups
//! whose cosets are blocks of the one-round group.

use crate::algebra::{enumerate_subgroups, EnumBudget, FpSpace, SubgroupBasis, VSpace};
use crate::cipher::{bricklayer_point, MixingLayer, SBox};
use crate::error::{Error, Result};
use crate::group_engine::BlockSystem;

/// Largest brick count for the subset scan.
pub const MAX_BRICKS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixingReport {
    pub proper: bool,
    /// One-based brick indices `I` with `(⊕_{i∈I} V_i)λ = ⊕_{i∈I} V_i`.
    pub invariant_subset: Option<Vec<usize>>,
}

/// Per brick, the bitmask of bricks that its image under `λ` touches.
fn brick_reach(layer: &MixingLayer, space: &VSpace) -> Vec<u32> {
    let mp = space.m_p();
    (0..space.n())
        .map(|i| {
            let mut mask = 0u32;
            for &y in &layer.basis_images()[i * mp..(i + 1) * mp] {
                for j in 0..space.n() {
                    if space.project(y, j) != 0 {
                        mask |= 1 << j;
                    }
                }
            }
            mask
        })
        .collect()
}

/// Proper iff no sum of bricks other than `{0}` and `V` is `λ`-invariant.
/// Since `λ` is invertible, `W_Iλ ⊆ W_I` already forces equality.
pub fn is_proper_mixing_layer(layer: &MixingLayer, space: &VSpace) -> Result<MixingReport> {
    let n = space.n();
    if n > MAX_BRICKS {
        return Err(Error::BudgetExceeded(format!("{n} bricks exceed the subset scan limit of {MAX_BRICKS}")));
    }
    let reach = brick_reach(layer, space);
    let full = (1u32 << n) - 1;
    for mask in 1..full {
        let invariant = (0..n).filter(|&i| mask >> i & 1 == 1).all(|i| reach[i] & !mask == 0);
        if invariant {
            let subset = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            return Ok(MixingReport { proper: false, invariant_subset: Some(subset) });
        }
    }
    Ok(MixingReport { proper: true, invariant_subset: None })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprimitivityWitness {
    pub w: SubgroupBasis,
    /// The defining condition re-checked over every `u ∈ W`, not just a basis.
    pub verified: bool,
}

impl ImprimitivityWitness {
    /// The cosets `W + v`.
    pub fn blocks(&self) -> BlockSystem {
        let s = *self.w.space();
        let elements = self.w.elements();
        let mut seen = vec![false; s.size()];
        let mut cells = Vec::new();
        for v in 0..s.size() {
            if seen[v] {
                continue;
            }
            let cell: Vec<usize> = elements.iter().map(|&u| s.add(u, v)).collect();
            cell.iter().for_each(|&x| seen[x] = true);
            cells.push(cell);
        }
        BlockSystem::from_cells(s.size(), cells).expect("cosets partition V")
    }
}

/// Default limits for the witness search: at most `2^10` points and `10^6`
/// candidate subgroups.
pub fn default_witness_budget() -> EnumBudget {
    EnumBudget { max_points: 1 << 10, max_subgroups: 1_000_000 }
}

pub fn find_imprimitivity_witness(
    bricks: &[SBox],
    layer: &MixingLayer,
    space: &VSpace,
) -> Result<Option<ImprimitivityWitness>> {
    find_imprimitivity_witness_with_budget(bricks, layer, space, &default_witness_budget())
}

/// First proper nontrivial `W` (by dimension, then echelon order) with
/// `(u+v)γ − vγ ∈ Wλ⁻¹` for all `u ∈ W`, `v ∈ V`.
///
/// Only the basis rows of `W` are tested: with `D_v(u) = (u+v)γ − vγ` one has
/// `D_v(u₁+u₂) = D_v(u₁) + D_{v+u₁}(u₂)`, so the condition for all `v` on a
/// spanning set extends to all of `W`.
pub fn find_imprimitivity_witness_with_budget(
    bricks: &[SBox],
    layer: &MixingLayer,
    space: &VSpace,
    budget: &EnumBudget,
) -> Result<Option<ImprimitivityWitness>> {
    if bricks.len() != space.n() {
        return Err(Error::DimensionMismatch { expected: space.n(), got: bricks.len() });
    }
    let pts: FpSpace = *space.points();
    let candidates = enumerate_subgroups(pts, 1, pts.dim() - 1, budget)?;
    let gamma: Vec<usize> = (0..pts.size()).map(|x| bricklayer_point(space, bricks, x)).collect();
    let lambda_inv = layer.to_permutation().inverse();
    let mut member = vec![false; pts.size()];
    for w in candidates {
        let elements = w.elements();
        member.iter_mut().for_each(|m| *m = false);
        for &x in &elements {
            member[lambda_inv.image(x)] = true;
        }
        let holds =
            |us: &[usize]| us.iter().all(|&u| (0..pts.size()).all(|v| member[pts.sub(gamma[pts.add(u, v)], gamma[v])]));
        if holds(&w.row_points()) {
            let verified = holds(&elements);
            return Ok(Some(ImprimitivityWitness { w, verified }));
        }
    }
    Ok(None)
}
