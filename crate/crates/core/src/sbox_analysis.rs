//! Differential criteria on a single brick: weak δ-uniformity, strong
//! r-anti-invariance and the "no difference image is a coset" condition.
//!
//! Throughout, the brick is viewed as `F_p^{m_p}` with `m_p = f·m`.

use serde::Serialize;

use crate::algebra::{echelonize_points, enumerate_subgroups, EnumBudget, SpanBuilder, SubgroupBasis};
use crate::cipher::SBox;
use crate::error::{Error, Result};

/// `Im(f̂_a)` where `f̂_a(x) = f(x + a) − f(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferenceImage {
    pub a: usize,
    /// Sorted, without repeats.
    pub image: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformityReport {
    pub delta: u64,
    pub min_image_size: usize,
    pub witness_a: usize,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntiInvarianceReport {
    pub r: usize,
    /// Pairs `(U, f(U))` with `f(U)` a subgroup and `U` large but proper.
    pub violations: Vec<(SubgroupBasis, SubgroupBasis)>,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetReport {
    pub passes: bool,
    /// Smallest shift whose difference image is a coset.
    pub witness_a: Option<usize>,
}

pub fn difference_image(f: &SBox, a: usize) -> Result<DifferenceImage> {
    let s = f.space();
    if a == 0 || !s.contains(a) {
        return Err(Error::InvalidParameter(format!("shift must be a nonzero point of the brick, got {a}")));
    }
    let mut hit = vec![false; s.size()];
    for x in 0..s.size() {
        hit[s.sub(f.apply(s.add(x, a)), f.apply(x))] = true;
    }
    let image = (0..s.size()).filter(|&y| hit[y]).collect();
    Ok(DifferenceImage { a, image })
}

/// Passes iff `|Im(f̂_a)| > p^{m_p−1}/δ` for every `a ≠ 0`.
pub fn check_weak_uniformity(f: &SBox, delta: u64) -> Result<UniformityReport> {
    let s = f.space();
    if delta < s.p() as u64 {
        return Err(Error::InvalidParameter(format!("delta must be at least p = {}, got {delta}", s.p())));
    }
    if s.dim() < 2 {
        return Err(Error::InvalidParameter("weak uniformity needs a brick of F_p-dimension at least 2".into()));
    }
    let mut best = (usize::MAX, 0);
    for a in 1..s.size() {
        let size = difference_image(f, a)?.image.len();
        if size < best.0 {
            best = (size, a);
        }
    }
    let bound = (s.size() / s.p() as usize) as u128;
    Ok(UniformityReport {
        delta,
        min_image_size: best.0,
        witness_a: best.1,
        passes: best.0 as u128 * delta as u128 > bound,
    })
}

pub fn check_anti_invariance(f: &SBox, r: usize) -> Result<AntiInvarianceReport> {
    check_anti_invariance_with_budget(f, r, &EnumBudget::default())
}

/// Scans every subgroup `U` with `p^{m_p−r} ≤ |U| < p^{m_p}` for a subgroup image.
pub fn check_anti_invariance_with_budget(f: &SBox, r: usize, budget: &EnumBudget) -> Result<AntiInvarianceReport> {
    let s = *f.space();
    let mp = s.dim();
    if r < 1 || r >= mp {
        return Err(Error::InvalidParameter(format!("need 1 <= r < {mp}, got {r}")));
    }
    let mut violations = Vec::new();
    for u in enumerate_subgroups(s, mp - r, mp - 1, budget)? {
        if let Some(w) = image_subgroup(f, &u)? {
            violations.push((u, w));
        }
    }
    let passes = violations.is_empty();
    Ok(AntiInvarianceReport { r, violations, passes })
}

/// `f(U)` if it is a subgroup.
fn image_subgroup(f: &SBox, u: &SubgroupBasis) -> Result<Option<SubgroupBasis>> {
    let s = *f.space();
    let elements = u.elements();
    // f(U) contains f(0); it can only be a subgroup through 0
    let base = f.apply(0);
    if !elements.iter().any(|&x| f.apply(x) == 0) {
        return Ok(None);
    }
    let mut span = SpanBuilder::new(s);
    for &x in &elements {
        span.insert(s.sub(f.apply(x), base));
        if span.rank() > u.dim() {
            return Ok(None);
        }
    }
    // f(U) − f(0) lies in a space of the same size, so equals it; with 0 ∈ f(U)
    // that translate is f(U) itself.
    let images: Vec<usize> = elements.iter().map(|&x| f.apply(x)).collect();
    echelonize_points(&images, s).map(Some)
}

/// Whether `set` is `d + H` for some subgroup `H`.
pub fn is_coset(set: &[usize], space: &crate::algebra::FpSpace) -> bool {
    let Some(&d0) = set.first() else { return false };
    let p = space.p() as usize;
    let mut size = set.len();
    while size.is_multiple_of(p) {
        size /= p;
    }
    if size != 1 {
        return false;
    }
    let mut span = SpanBuilder::new(*space);
    for &d in set {
        span.insert(space.sub(d, d0));
        if p.pow(span.rank() as u32) > set.len() {
            return false;
        }
    }
    true
}

/// Passes iff no `Im(f̂_a)`, `a ≠ 0`, is a coset of a subgroup.
pub fn check_coset_condition(f: &SBox) -> CosetReport {
    let s = f.space();
    let witness_a = (1..s.size()).find(|&a| {
        let d = difference_image(f, a).expect("a is a nonzero brick point");
        is_coset(&d.image, s)
    });
    CosetReport { passes: witness_a.is_none(), witness_a }
}

/// Concrete form of the size bound for weakly `p^r`-uniform bricks: if every
/// `Im(f̂_a)` for `a ∈ shifts ∖ {0}` lies inside `W`, then `|W| ≥ p^{m_p−r}`.
/// Returns `false` when the containment holds but the bound does not.
pub fn min_subgroup_order_bound(f: &SBox, r: usize, w: &SubgroupBasis, shifts: &[usize]) -> bool {
    let s = f.space();
    let contained = shifts
        .iter()
        .filter(|&&a| a != 0)
        .all(|&a| difference_image(f, a).is_ok_and(|d| d.image.iter().all(|&y| w.contains(y))));
    let floor = s.dim().saturating_sub(r);
    !contained || w.dim() >= floor
}

/// Largest `r` (below `m_p`) for which `f` is strongly `r`-anti-invariant, or
/// `None` if it fails already at `r = 1`. Uses monotonicity in `r`.
pub fn strongest_anti_invariance(f: &SBox, budget: &EnumBudget) -> Result<Option<usize>> {
    let mut best = None;
    for r in 1..f.space().dim() {
        if check_anti_invariance_with_budget(f, r, budget)?.passes {
            best = Some(r);
        } else {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FieldSpec, FpSpace};

    fn inversion_f8() -> SBox {
        SBox::field_inversion(&"2^3/1,1,0,1".parse::<FieldSpec>().unwrap()).unwrap()
    }

    #[test]
    fn additive_difference_images_are_singletons() {
        let s = FpSpace::new(2, 3).unwrap();
        let id = SBox::identity(s);
        assert_eq!(difference_image(&id, 3).unwrap().image, vec![3]);
        assert!(difference_image(&id, 0).is_err());
        // x ↦ 2x on F_3^2
        let t = FpSpace::new(3, 2).unwrap();
        let dbl = SBox::from_fn(t, |x| t.scale(2, x)).unwrap();
        for a in 1..9 {
            assert_eq!(difference_image(&dbl, a).unwrap().image, vec![t.scale(2, a)]);
        }
    }

    // Images enumerated independently over all 8 inputs.
    #[test]
    fn inversion_difference_images() {
        let f = inversion_f8();
        let expected: [&[usize]; 7] =
            [&[1, 3, 5, 7], &[4, 5, 6, 7], &[1, 3, 4, 6], &[2, 3, 6, 7], &[1, 2, 5, 6], &[2, 3, 4, 5], &[1, 2, 4, 7]];
        for (a, img) in (1..8).zip(expected) {
            assert_eq!(difference_image(&f, a).unwrap().image, img);
        }
    }

    #[test]
    fn uniformity_examples() {
        let id = SBox::identity(FpSpace::new(2, 3).unwrap());
        let rep = check_weak_uniformity(&id, 2).unwrap();
        assert_eq!(rep.min_image_size, 1);
        assert!(!rep.passes);
        assert!(!check_weak_uniformity(&SBox::identity(FpSpace::new(3, 2).unwrap()), 3).unwrap().passes);

        let rep = check_weak_uniformity(&inversion_f8(), 2).unwrap();
        assert_eq!(rep.min_image_size, 4);
        assert_eq!(rep.witness_a, 1);
        assert!(rep.passes);

        assert!(check_weak_uniformity(&id, 1).is_err());
        assert!(check_weak_uniformity(&SBox::identity(FpSpace::new(2, 1).unwrap()), 2).is_err());
    }

    #[test]
    fn anti_invariance_examples() {
        let f = inversion_f8();
        let rep = check_anti_invariance(&f, 1).unwrap();
        assert!(rep.passes);
        let rep = check_anti_invariance(&f, 2).unwrap();
        // lines always map to 2-point sets containing 0, which are subgroups
        assert!(!rep.passes);
        assert!(rep.violations.iter().all(|(u, _)| u.dim() == 1));
        assert_eq!(rep.violations.len(), 7);

        let id = SBox::identity(FpSpace::new(2, 3).unwrap());
        let rep = check_anti_invariance(&id, 1).unwrap();
        assert_eq!(rep.violations.len(), 7);
        assert!(rep.violations.iter().all(|(u, w)| u == w));
        assert!(check_anti_invariance(&id, 0).is_err());
        assert!(check_anti_invariance(&id, 3).is_err());
    }

    #[test]
    fn anti_invariance_without_fixed_zero() {
        // x ↦ x + 1 maps each subgroup to a coset that is not a subgroup
        let s = FpSpace::new(2, 3).unwrap();
        let shift = SBox::from_fn(s, |x| x ^ 1).unwrap();
        let rep = check_anti_invariance(&shift, 1).unwrap();
        // planes containing 1 are fixed
        assert_eq!(rep.violations.len(), 3);
    }

    #[test]
    fn coset_examples() {
        let id = SBox::identity(FpSpace::new(2, 3).unwrap());
        assert_eq!(check_coset_condition(&id), CosetReport { passes: false, witness_a: Some(1) });
        let rep = check_coset_condition(&inversion_f8());
        assert!(!rep.passes);
        assert_eq!(rep.witness_a, Some(1));

        let s = FpSpace::new(2, 3).unwrap();
        assert!(is_coset(&[1, 3, 5, 7], &s));
        assert!(is_coset(&[1, 2, 4, 7], &s));
        assert!(!is_coset(&[0, 1, 2], &s));
        assert!(!is_coset(&[0, 1, 2, 4], &s));
        assert!(!is_coset(&[], &s));
    }

    #[test]
    fn subgroup_order_bound() {
        let s = FpSpace::new(2, 3).unwrap();
        let f = inversion_f8();
        let all: Vec<usize> = (0..8).collect();
        assert!(min_subgroup_order_bound(&f, 1, &SubgroupBasis::full(s), &all));
        // identity has singleton images, so a line containing them breaks the bound
        let id = SBox::identity(s);
        let line = echelonize_points(&[1], s).unwrap();
        assert!(!min_subgroup_order_bound(&id, 1, &line, &[0, 1]));
        assert!(min_subgroup_order_bound(&id, 2, &line, &[0, 1]));
    }

    #[test]
    fn strongest_r() {
        let budget = EnumBudget::default();
        assert_eq!(strongest_anti_invariance(&inversion_f8(), &budget).unwrap(), Some(1));
        assert_eq!(strongest_anti_invariance(&SBox::identity(FpSpace::new(2, 3).unwrap()), &budget).unwrap(), None);
    }
}
