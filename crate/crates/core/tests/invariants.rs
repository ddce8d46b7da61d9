use std::sync::OnceLock;

use proptest::prelude::*;
use reslat::congruences::{filter_generate, quotient};
use reslat::freealg::{free_algebra, FreeAlgebraResult, VarietySpec};
use reslat::modelgen::{enumerate_models, ModelQuery};
use reslat::morphisms::{enumerate_homs, is_isomorphic, verify, HomFilter};
use reslat::ordsum::{decompose, ordinal_sum, ordinal_sum_family};
use reslat::properties::{is_bounded_hoop, is_divisible, is_heyting, is_hoop, is_prelinear};
use reslat::term::satisfies_equation;
use reslat::{catalog, Elem, Equation, FiniteAlgebra, Limits, Operation, Term};

/// Catalog algebras followed by every bounded algebra of size at most 5.
fn pool() -> &'static [FiniteAlgebra] {
    static POOL: OnceLock<Vec<FiniteAlgebra>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut v = catalog::all();
        v.extend(enumerate_models(&ModelQuery::up_to(5), &Limits::default()).unwrap());
        v
    })
}

/// Free algebras small enough to search over repeatedly.
fn free_algebras() -> &'static [(VarietySpec, FreeAlgebraResult)] {
    static FREE: OnceLock<Vec<(VarietySpec, FreeAlgebraResult)>> = OnceLock::new();
    FREE.get_or_init(|| {
        [("BA", 1), ("BA", 2), ("GD3", 1), ("GD3", 2), ("MV3", 1), ("GD4", 1), ("GD4", 2)]
            .iter()
            .map(|&(name, k)| {
                let spec = VarietySpec::parse(name, &Limits::default()).unwrap();
                let free = free_algebra(&spec, k, &Limits::default()).unwrap();
                (spec, free)
            })
            .collect()
    })
}

fn small_pool() -> Vec<&'static FiniteAlgebra> {
    pool().iter().filter(|a| a.size() <= 4).collect()
}

fn pick() -> impl Strategy<Value = &'static FiniteAlgebra> {
    (0..pool().len()).prop_map(|i| &pool()[i])
}

fn pairs(a: &FiniteAlgebra) -> impl Iterator<Item = (Elem, Elem)> + '_ {
    a.elements().flat_map(move |x| a.elements().map(move |y| (x, y)))
}

fn triples(a: &FiniteAlgebra) -> impl Iterator<Item = (Elem, Elem, Elem)> + '_ {
    pairs(a).flat_map(move |(x, y)| a.elements().map(move |z| (x, y, z)))
}

fn idempotents(a: &FiniteAlgebra) -> Vec<Elem> {
    a.elements().filter(|&u| a.mul(u, u) == u).collect()
}

/// Join-free, 0-free terms in `vars` variables.
fn term(vars: usize) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![(0..vars).prop_map(Term::var), Just(Term::One)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        (inner.clone(), inner, prop_oneof![Just(Operation::Mul), Just(Operation::Imp), Just(Operation::Meet)])
            .prop_map(|(a, b, op)| Term::bin(op, a, b))
    })
}

fn holds(a: &FiniteAlgebra, e: &Equation) -> bool {
    satisfies_equation(a, e).unwrap().holds
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn residuation(a in pick()) {
        for (x, y, z) in triples(a) {
            prop_assert_eq!(a.leq(a.mul(x, y), z), a.leq(x, a.imp(y, z)));
        }
    }

    #[test]
    fn divisible_meet_is_definable(a in pick()) {
        prop_assume!(is_divisible(a));
        for (x, y) in pairs(a) {
            prop_assert_eq!(a.meet(x, y), a.mul(x, a.imp(x, y)));
        }
    }

    #[test]
    fn join_from_implication_in_divisible_prelinear(a in pick()) {
        prop_assume!(is_divisible(a) && is_prelinear(a));
        for (x, y) in pairs(a) {
            let lhs = a.meet(a.imp(a.imp(x, y), y), a.imp(a.imp(y, x), x));
            prop_assert_eq!(lhs, a.join(x, y));
        }
    }

    #[test]
    fn double_negation_is_multiplicative(a in pick()) {
        prop_assume!(is_bounded_hoop(a));
        let nn = |x| a.neg(a.neg(x));
        for (x, y) in pairs(a) {
            prop_assert_eq!(nn(a.mul(x, y)), a.mul(nn(x), nn(y)));
        }
    }

    #[test]
    fn heyting_identities(a in pick()) {
        prop_assume!(is_heyting(a));
        let i = |x, y| a.imp(x, y);
        for (x, y, z) in triples(a) {
            if a.leq(x, z) && i(x, y) == y {
                prop_assert_eq!(i(z, y), y);
            }
            prop_assert!(a.leq(x, i(i(x, y), y)));
            prop_assert_eq!(i(i(i(x, y), y), i(x, y)), i(x, y));
            prop_assert_eq!(i(i(x, y), i(i(x, y), y)), i(i(x, y), y));
            if a.leq(x, y) {
                prop_assert_eq!(a.meet(x, i(y, z)), a.meet(x, z));
            }
        }
        for (y, c) in pairs(a) {
            prop_assert_eq!(i(a.join(y, i(y, c)), c), c);
            prop_assert_eq!(i(i(i(y, c), c), c), i(y, c));
        }
    }

    #[test]
    fn idempotents_in_hoops(a in pick()) {
        prop_assume!(is_hoop(a));
        for u in idempotents(a) {
            for (x, y) in pairs(a) {
                prop_assert_eq!(a.imp(u, a.imp(x, y)), a.imp(a.imp(u, x), a.imp(u, y)));
                prop_assert_eq!(a.imp(u, a.mul(x, y)), a.mul(a.imp(u, x), a.imp(u, y)));
            }
        }
    }

    #[test]
    fn idempotents_in_bounded_hoops(a in pick()) {
        prop_assume!(is_bounded_hoop(a));
        let nn = |x| a.neg(a.neg(x));
        for u in idempotents(a) {
            let v = nn(u);
            for (x, y) in pairs(a) {
                prop_assert_eq!(a.imp(a.imp(u, y), v), v);
                prop_assert_eq!(a.mul(u, x), a.meet(u, x));
                prop_assert_eq!(a.imp(u, a.mul(u, x)), a.imp(u, x));
                let (ux, uy) = (a.imp(u, x), a.imp(u, y));
                prop_assert_eq!(a.mul(v, a.imp(ux, uy)), a.imp(ux, a.mul(v, uy)));
                let lhs = a.imp(ux, uy);
                prop_assert_eq!(lhs, a.imp(a.mul(v, ux), a.mul(v, uy)));
                prop_assert_eq!(lhs, a.imp(a.mul(v, ux), uy));
            }
        }
    }

    #[test]
    fn json_round_trip(a in pick()) {
        let text = a.to_json();
        let back = FiniteAlgebra::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(&back, a);
    }

    #[test]
    fn sums_are_algebras_and_keep_divisibility(l in pick(), u in pick(), e in (term(1), term(1))) {
        let s = ordinal_sum(l, u).unwrap();
        prop_assert_eq!(s.size(), l.size() + u.size() - 1);
        if is_divisible(l) && is_divisible(u) {
            prop_assert!(is_divisible(&s));
        }
        let eq = Equation::new(e.0, e.1);
        if holds(l, &eq) && holds(&u.zero_free(), &eq) {
            prop_assert!(holds(&s, &eq), "{} fails in {}", eq, s.name());
        }
    }

    #[test]
    fn sums_of_prelinear_chains_are_prelinear(l in pick(), u in pick()) {
        prop_assume!(l.is_totally_ordered() && u.is_totally_ordered() && is_prelinear(l) && is_prelinear(u));
        prop_assert!(is_prelinear(&ordinal_sum(l, u).unwrap()));
    }

    #[test]
    fn sums_are_associative(a in pick(), b in pick(), c in pick()) {
        prop_assume!(a.size() * b.size() * c.size() <= 80);
        let left = ordinal_sum(&ordinal_sum(a, b).unwrap(), c).unwrap();
        let right = ordinal_sum(a, &ordinal_sum(b, c).unwrap()).unwrap();
        prop_assert!(is_isomorphic(&left, &right).is_some());
    }

    #[test]
    fn decompose_round_trip(a in pick()) {
        let d = decompose(a);
        let back = ordinal_sum_family(&d.components).unwrap();
        prop_assert!(is_isomorphic(&back, a).is_some());
        for (c, emb) in d.components.iter().zip(&d.embeddings) {
            prop_assert_eq!(emb.len(), c.size());
        }
    }

    #[test]
    fn homomorphisms_verify_and_compose(i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let small = small_pool();
        let (a, b, c) = (small[i % small.len()], small[j % small.len()], small[k % small.len()]);
        let ab = enumerate_homs(a, b, HomFilter::All, None);
        let bc = enumerate_homs(b, c, HomFilter::All, None);
        for f in &ab {
            prop_assert!(verify(a, b, &f.map).is_ok());
            for g in &bc {
                let h = f.then(g, c);
                prop_assert!(verify(a, c, &h.map).is_ok());
            }
        }
    }

    #[test]
    fn quotients_keep_equations(a in pick(), seed in 0usize..8, e in (term(2), term(2))) {
        let seed = seed % a.size();
        let f = filter_generate(a, &[seed]).unwrap();
        let (q, g) = quotient(a, &f).unwrap();
        prop_assert!(verify(a, &q, &g.map).is_ok());
        let eq = Equation::new(e.0, e.1);
        if holds(a, &eq) {
            prop_assert!(holds(&q, &eq));
        }
    }

    #[test]
    fn free_algebras_extend_assignments(c in 0usize..7, images in proptest::collection::vec(0usize..8, 2)) {
        let (spec, free) = &free_algebras()[c];
        let g = &spec.generators[0];
        let images: Vec<Elem> = images[..free.rank].iter().map(|&x| x % g.size()).collect();
        let ext = free.all_extensions(g, &images);
        prop_assert_eq!(ext.len(), 1);
        for (x, &img) in free.generator_elements.iter().zip(&images) {
            prop_assert_eq!(ext[0].map[*x], img);
        }
    }
}
