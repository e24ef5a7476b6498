//! Permutation groups on `V`: exact orders, transitivity, block systems and
//! recognition of `Alt(V)` / `Sym(V)`.

mod blocks;
mod bsgs;
mod perm;

pub use blocks::{
    contains_basis_translations, is_primitive, minimal_block, orbit, verify_block_coset_form, BlockSystem, Primitivity,
};
pub use bsgs::{bsgs, bsgs_with_limit, factorial, GroupBsgs, DEFAULT_MAX_DEGREE};
pub use perm::Permutation;

use num_bigint::BigUint;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum AltSymClass {
    ProperSubgroup,
    Alt,
    Sym,
}

pub fn is_transitive(g: &GroupBsgs) -> bool {
    let n = g.degree();
    if g.generators().is_empty() {
        return n <= 1;
    }
    orbit(g.generators(), 0).len() == n
}

/// `Sym` iff `|G| = N!`, `Alt` iff `|G| = N!/2`.
pub fn classify_alt_sym(g: &GroupBsgs) -> AltSymClass {
    let full = factorial(g.degree());
    let class = if *g.order() == full {
        AltSymClass::Sym
    } else if g.order() * BigUint::from(2u32) == full {
        AltSymClass::Alt
    } else {
        AltSymClass::ProperSubgroup
    };
    // Parity cross-check: Alt(N) has only even elements, and an odd generator
    // in a group of order >= N!/2 forces Sym(N).
    if g.degree() >= 2 {
        let any_odd = g.generators().iter().any(|p| !p.is_even());
        match class {
            AltSymClass::Alt => debug_assert!(!any_odd),
            AltSymClass::Sym if g.degree() > 2 => debug_assert!(any_odd),
            _ => {}
        }
    }
    class
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FpSpace;

    #[test]
    fn classify_examples() {
        let sym5 = bsgs(&[
            Permutation::from_cycles(5, &[&[0, 1]]).unwrap(),
            Permutation::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap(),
        ])
        .unwrap();
        assert_eq!(classify_alt_sym(&sym5), AltSymClass::Sym);

        let mut three_cycles = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    if a != b && b != c && a != c {
                        three_cycles.push(Permutation::from_cycles(4, &[&[a, b, c]]).unwrap());
                    }
                }
            }
        }
        let alt4 = bsgs(&three_cycles).unwrap();
        assert_eq!(alt4.order(), &BigUint::from(12u32));
        assert_eq!(classify_alt_sym(&alt4), AltSymClass::Alt);

        let s = FpSpace::new(2, 4).unwrap();
        let t: Vec<_> = (0..4).map(|k| Permutation::translation(&s, 1 << k)).collect();
        let tg = bsgs(&t).unwrap();
        assert_eq!(tg.order(), &BigUint::from(16u32));
        assert_eq!(classify_alt_sym(&tg), AltSymClass::ProperSubgroup);
    }

    #[test]
    fn transitivity_examples() {
        let s = FpSpace::new(3, 2).unwrap();
        let t: Vec<_> = (0..2).map(|k| Permutation::translation(&s, s.basis_point(k))).collect();
        assert!(is_transitive(&bsgs(&t).unwrap()));
        assert!(!is_transitive(&bsgs(&[Permutation::identity(3)]).unwrap()));
        assert!(!is_transitive(&bsgs(&[Permutation::from_cycles(4, &[&[0, 1]]).unwrap()]).unwrap()));
    }
}
