//! Structural predicates of a finite algebra.
//!
//! Everything is computed directly from the tables. Fields that need the
//! constant 0, the join or the product are `None` on fragments that lack it.

use serde::Serialize;

use crate::algebra::{Elem, FiniteAlgebra};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Properties {
    pub size: usize,
    pub trivial: bool,
    pub bounded: bool,
    pub fragment: &'static str,
    pub totally_ordered: bool,
    pub prelinear: Option<bool>,
    pub divisible: Option<bool>,
    /// Least n ≥ 1 such that xⁿ = xⁿ⁻¹ holds identically.
    pub n_potent: Option<usize>,
    pub stonean: Option<bool>,
    pub pseudocomplemented: Option<bool>,
    pub cancellative_hoop: Option<bool>,
    pub idempotents: Option<Vec<Elem>>,
    pub atoms: Vec<Elem>,
    pub nodes: Vec<Elem>,
    pub negation_fixpoints: Option<Vec<Elem>>,
    pub top_join_irreducible: bool,
    pub regular_elements: Option<Vec<Elem>>,
    pub heyting: bool,
    pub boolean: bool,
    pub hoop: bool,
    pub bounded_hoop: bool,
    pub bl: bool,
    pub mv: bool,
}

pub fn properties(a: &FiniteAlgebra) -> Properties {
    let sig = a.signature();
    let divisible = sig.mul.then(|| is_divisible(a));
    let prelinear = sig.join.then(|| is_prelinear(a));
    let hoop = sig.meet && divisible == Some(true);
    let bounded_hoop = hoop && sig.bottom;
    let bl = bounded_hoop && prelinear == Some(true);
    let neg = |x: Elem| a.neg(x);
    let mv = bl && a.elements().all(|x| neg(neg(x)) == x);
    Properties {
        size: a.size(),
        trivial: a.is_trivial(),
        bounded: sig.bottom,
        fragment: sig.fragment_name(),
        totally_ordered: a.is_totally_ordered(),
        prelinear,
        divisible,
        n_potent: sig.mul.then(|| n_potency(a)),
        stonean: (sig.bottom && sig.join).then(|| a.elements().all(|x| a.join(neg(x), neg(neg(x))) == a.top())),
        pseudocomplemented: (sig.bottom && sig.meet).then(|| is_pseudocomplemented(a)),
        cancellative_hoop: sig.mul.then(|| {
            a.elements().all(|x| a.elements().all(|y| a.imp(x, a.mul(x, y)) == y))
        }),
        idempotents: sig.mul.then(|| idempotents(a)),
        atoms: atoms(a),
        nodes: nodes(a),
        negation_fixpoints: sig.bottom.then(|| a.elements().filter(|&x| neg(x) == x).collect()),
        top_join_irreducible: top_join_irreducible(a),
        regular_elements: sig.bottom.then(|| regular_elements(a)),
        heyting: is_heyting(a),
        boolean: is_boolean(a),
        hoop,
        bounded_hoop,
        bl,
        mv,
    }
}

/// x(x→y) = y(y→x).
pub fn is_divisible(a: &FiniteAlgebra) -> bool {
    a.signature().mul
        && a.elements().all(|x| a.elements().all(|y| a.mul(x, a.imp(x, y)) == a.mul(y, a.imp(y, x))))
}

/// (x→y) ∨ (y→x) = 1, with the join taken from the order if needed.
pub fn is_prelinear(a: &FiniteAlgebra) -> bool {
    a.elements().all(|x| {
        a.elements().all(|y| a.lub(a.imp(x, y), a.imp(y, x)) == Some(a.top()))
    })
}

pub fn is_pseudocomplemented(a: &FiniteAlgebra) -> bool {
    match a.bottom() {
        Some(z) => a.elements().all(|x| a.meet(x, a.neg(x)) == z),
        None => false,
    }
}

/// Bounded, with a join, and x·y = x∧y.
pub fn is_heyting(a: &FiniteAlgebra) -> bool {
    let sig = a.signature();
    sig.bottom
        && sig.join
        && sig.mul
        && a.elements().all(|x| a.elements().all(|y| a.mul(x, y) == a.meet(x, y)))
}

pub fn is_boolean(a: &FiniteAlgebra) -> bool {
    is_heyting(a) && a.elements().all(|x| a.join(x, a.neg(x)) == a.top())
}

/// Divisible with a meet; bounded hoops additionally carry 0.
pub fn is_hoop(a: &FiniteAlgebra) -> bool {
    a.signature().meet && is_divisible(a)
}

pub fn is_bounded_hoop(a: &FiniteAlgebra) -> bool {
    a.is_bounded() && is_hoop(a)
}

pub fn is_bl(a: &FiniteAlgebra) -> bool {
    is_bounded_hoop(a) && is_prelinear(a)
}

pub fn is_mv(a: &FiniteAlgebra) -> bool {
    is_bl(a) && a.elements().all(|x| a.neg(a.neg(x)) == x)
}

pub fn n_potency(a: &FiniteAlgebra) -> usize {
    // x^n = x^(n-1) for all x; a finite chain of powers stabilises within n steps
    (1..=a.size() + 1)
        .find(|&n| a.elements().all(|x| a.pow(x, n) == a.pow(x, n - 1)))
        .expect("powers stabilise in a finite algebra")
}

pub fn idempotents(a: &FiniteAlgebra) -> Vec<Elem> {
    a.elements().filter(|&x| a.mul(x, x) == x).collect()
}

/// Upper covers of the least element.
pub fn atoms(a: &FiniteAlgebra) -> Vec<Elem> {
    match a.least() {
        Some(z) => a.upper_covers(z),
        None => Vec::new(),
    }
}

/// Elements comparable with every element.
pub fn nodes(a: &FiniteAlgebra) -> Vec<Elem> {
    a.elements().filter(|&x| a.elements().all(|y| a.comparable(x, y))).collect()
}

pub fn coatoms(a: &FiniteAlgebra) -> Vec<Elem> {
    a.lower_covers(a.top())
}

/// No a, b < 1 with a ∨ b = 1. In a finite algebra this means at most one
/// coatom.
pub fn top_join_irreducible(a: &FiniteAlgebra) -> bool {
    coatoms(a).len() <= 1
}

pub fn regular_elements(a: &FiniteAlgebra) -> Vec<Elem> {
    a.elements().filter(|&x| a.neg(a.neg(x)) == x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::RawAlgebra;

    fn l3() -> FiniteAlgebra {
        RawAlgebra::new("L3", 3, 2, |a, b| if a <= b { 2 } else { 2 - a + b })
            .bottom(0)
            .meet(|a, b| a.min(b))
            .join(|a, b| a.max(b))
            .mul(|a, b| (a + b).saturating_sub(2))
            .validate()
            .unwrap()
    }

    fn g3() -> FiniteAlgebra {
        RawAlgebra::new("G3", 3, 2, |a, b| if a <= b { 2 } else { b })
            .bottom(0)
            .meet(|a, b| a.min(b))
            .join(|a, b| a.max(b))
            .mul(|a, b| a.min(b))
            .validate()
            .unwrap()
    }

    fn b4() -> FiniteAlgebra {
        RawAlgebra::new("B4", 4, 3, |x, y| (!x | y) & 3)
            .bottom(0)
            .meet(|x, y| x & y)
            .join(|x, y| x | y)
            .mul(|x, y| x & y)
            .validate()
            .unwrap()
    }

    #[test]
    fn lukasiewicz_three() {
        let p = properties(&l3());
        assert_eq!(p.divisible, Some(true));
        assert_eq!(p.prelinear, Some(true));
        assert_eq!(p.n_potent, Some(3));
        assert_eq!(p.negation_fixpoints, Some(vec![1]));
        assert!(p.mv && p.bl && !p.heyting);
    }

    #[test]
    fn goedel_three() {
        let p = properties(&g3());
        assert_eq!(p.n_potent, Some(2));
        assert!(p.heyting && !p.boolean);
        assert_eq!(p.nodes, vec![0, 1, 2]);
        assert_eq!(p.stonean, Some(true));
        assert_eq!(p.regular_elements, Some(vec![0, 2]));
    }

    #[test]
    fn boolean_four() {
        let p = properties(&b4());
        assert!(!p.top_join_irreducible);
        assert!(p.boolean);
        assert_eq!(p.atoms, vec![1, 2]);
        assert_eq!(p.nodes, vec![0, 3]);
    }

    #[test]
    fn fragments_report_not_applicable() {
        let bck = g3().reduct(crate::algebra::Signature::BCK).unwrap();
        let p = properties(&bck);
        assert_eq!(p.divisible, None);
        assert_eq!(p.negation_fixpoints, None);
        assert!(p.top_join_irreducible);
    }
}
