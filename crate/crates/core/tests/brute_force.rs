//! Exhaustive cross-checks against naive searches.

use reslat::congruences::{all_filters, is_subdirectly_irreducible};
use reslat::freealg::{free_algebra, regular_subalgebra_of_free, VarietySpec};
use reslat::modelgen::{enumerate_models, ModelProperty, ModelQuery};
use reslat::morphisms::{closure_in, direct_product, enumerate_homs, find_retraction, has_hom, is_isomorphic, verify, HomFilter};
use reslat::ordsum::{decompose, ordinal_sum};
use reslat::projectivity::classify_projective_heyting;
use reslat::properties::{atoms, is_boolean, is_heyting, properties};
use reslat::{catalog, Elem, FiniteAlgebra, Limits, Operation};

fn models(max: usize) -> Vec<FiniteAlgebra> {
    enumerate_models(&ModelQuery::up_to(max), &Limits::default()).unwrap()
}

fn ops(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Vec<Operation> {
    let (sa, sb) = (a.signature(), b.signature());
    [Operation::Meet, Operation::Join, Operation::Mul, Operation::Imp]
        .into_iter()
        .filter(|&o| sa.has(o) && sb.has(o))
        .collect()
}

/// Checks every operation on every pair, plus the constants.
fn naive_is_hom(a: &FiniteAlgebra, b: &FiniteAlgebra, f: &[Elem]) -> bool {
    if f[a.top()] != b.top() {
        return false;
    }
    if let (Some(x), Some(y)) = (a.bottom(), b.bottom()) {
        if f[x] != y {
            return false;
        }
    }
    ops(a, b)
        .iter()
        .all(|&o| a.elements().all(|x| a.elements().all(|y| f[a.op(o, x, y)] == b.op(o, f[x], f[y]))))
}

fn all_maps(n: usize, m: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..m).map(move |y| [v.clone(), vec![y]].concat())).collect();
    }
    out
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    // restricted growth strings
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn go(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur[i] = b;
            go(i + 1, max.max(b), cur, out);
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    go(1, 0, &mut cur, &mut out);
    out
}

fn naive_congruences(a: &FiniteAlgebra) -> usize {
    let os = ops(a, a);
    partitions(a.size())
        .into_iter()
        .filter(|p| {
            os.iter().all(|&o| {
                a.elements().all(|x| {
                    a.elements().all(|x2| {
                        p[x] != p[x2] || a.elements().all(|y| p[a.op(o, x, y)] == p[a.op(o, x2, y)])
                    })
                })
            })
        })
        .count()
}

#[test]
fn homs_match_brute_force() {
    let mut small: Vec<FiniteAlgebra> = catalog::all().into_iter().filter(|a| a.size() <= 3).collect();
    small.extend(models(3));
    let mut checked = 0;
    for a in &small {
        for b in &small {
            let fast: Vec<Vec<Elem>> = enumerate_homs(a, b, HomFilter::All, None).into_iter().map(|h| h.map).collect();
            let mut slow: Vec<Vec<Elem>> = all_maps(a.size(), b.size()).into_iter().filter(|f| naive_is_hom(a, b, f)).collect();
            slow.sort();
            let mut sorted = fast.clone();
            sorted.sort();
            assert_eq!(sorted, slow, "{} -> {}", a.name(), b.name());
            for f in &fast {
                assert!(verify(a, b, f).is_ok());
            }
            for (filter, keep) in [
                (HomFilter::Injective, (|f: &[Elem], m: usize| distinct(f) == f.len() && m > 0) as fn(&[Elem], usize) -> bool),
                (HomFilter::Surjective, |f: &[Elem], m: usize| distinct(f) == m),
            ] {
                let n = enumerate_homs(a, b, filter, None).len();
                assert_eq!(n, slow.iter().filter(|f| keep(f, b.size())).count());
            }
            checked += 1;
        }
    }
    assert!(checked > 20);
}

fn distinct(f: &[Elem]) -> usize {
    let mut v = f.to_vec();
    v.sort();
    v.dedup();
    v.len()
}

#[test]
fn filters_match_congruences() {
    let mut algebras = models(5);
    algebras.extend(catalog::all().into_iter().filter(|a| a.size() <= 5));
    for a in &algebras {
        let filters = all_filters(a, &Limits::default()).unwrap();
        assert_eq!(filters.len(), naive_congruences(a), "{}", a.name());
    }
}

#[test]
fn sums_are_functorial_in_the_upper_summand() {
    let lowers = ["B2", "B4", "G3", "L3"].map(|n| catalog::lookup(n).unwrap());
    let uppers: Vec<FiniteAlgebra> = ["B2", "G3", "L3", "B4", "L4", "G4"].iter().map(|n| catalog::lookup(n).unwrap().zero_free()).collect();
    let mut checked = 0;
    for u in &lowers {
        for b in &uppers {
            for c in &uppers {
                let (ub, uc) = (ordinal_sum(u, b).unwrap(), ordinal_sum(u, c).unwrap());
                for g in enumerate_homs(b, c, HomFilter::All, None) {
                    let lower = u.size() - 1;
                    let lift = |y: Elem| if y == c.top() { uc.top() } else { lower + y };
                    let map: Vec<Elem> =
                        ub.elements().map(|p| if p < lower { p } else if p == ub.top() { uc.top() } else { lift(g.map[p - lower]) }).collect();
                    // lower joins reaching the top of u land on the least upper element
                    let expected = properties(u).top_join_irreducible || g.map[b.least().unwrap()] == c.least().unwrap();
                    assert_eq!(naive_is_hom(&ub, &uc, &map), expected, "{} then {:?}", ub.name(), g.map);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 50);
}

fn subalgebras(a: &FiniteAlgebra) -> Vec<FiniteAlgebra> {
    let mut seen: Vec<Vec<Elem>> = Vec::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << a.size()) {
        let seeds: Vec<Elem> = a.elements().filter(|i| mask & (1 << i) != 0).collect();
        let u = closure_in(a, a.signature(), &seeds);
        if !seen.contains(&u) {
            let (s, _) = reslat::morphisms::subalgebra_generate(a, &u).unwrap();
            seen.push(u);
            out.push(s);
        }
    }
    out
}

#[test]
fn two_plus_two_plus_two_splits_goedel_algebras() {
    let a = catalog::lookup("G4").unwrap();
    let goedel = enumerate_models(&ModelQuery::up_to(6).with(ModelProperty::Heyting).with(ModelProperty::Prelinear), &Limits::default()).unwrap();
    let outside = |b: &FiniteAlgebra| !has_hom(&a, b, HomFilter::Injective);
    let class: Vec<&FiniteAlgebra> = goedel.iter().filter(|b| outside(b)).collect();
    assert!(class.len() > 3);
    for b in &class {
        for f in all_filters(b, &Limits::default()).unwrap() {
            let (q, _) = reslat::congruences::quotient(b, &f).unwrap();
            assert!(outside(&q), "quotient of {}", b.name());
        }
        for s in subalgebras(b) {
            assert!(outside(&s), "subalgebra of {}", b.name());
        }
        for c in &class {
            if b.size() * c.size() <= 6 {
                let (p, _) = direct_product(&[(*b).clone(), (*c).clone()], &Limits::default()).unwrap();
                assert!(outside(&p), "{} x {}", b.name(), c.name());
            }
        }
    }
    // the complement really contains A
    assert!(goedel.iter().any(|b| !outside(b)));
}

#[test]
fn projective_heyting_algebras_are_irreducible() {
    let mut heyting: Vec<FiniteAlgebra> = models(6).into_iter().filter(is_heyting).collect();
    heyting.extend(catalog::all().into_iter().filter(is_heyting));
    let mut projective = 0;
    for a in &heyting {
        let c = classify_projective_heyting(a).unwrap();
        if c.projective {
            projective += 1;
            assert!(is_subdirectly_irreducible(a, &Limits::default()).unwrap(), "{}", a.name());
            assert!(properties(a).top_join_irreducible);
            for comp in decompose(a).components {
                assert!(atoms(&comp).len() <= 2, "{}", a.name());
            }
        }
    }
    assert!(projective >= 5);
}

fn bounded_varieties() -> Vec<VarietySpec> {
    ["BA", "GD3", "GD4", "MV3", "MV4", "V(B4)", "V(H_242)", "V(SUM_4_2)"]
        .iter()
        .map(|n| VarietySpec::parse(n, &Limits::default()).unwrap())
        .collect()
}

/// Varieties whose free algebra on two generators fits the default caps.
const SMALL: [&str; 5] = ["BA", "GD3", "GD4", "MV3", "V(B4)"];

#[test]
fn free_on_nothing_is_two() {
    for v in bounded_varieties() {
        let f = free_algebra(&v, 0, &Limits::default()).unwrap();
        assert!(is_isomorphic(&f.algebra, &catalog::two()).is_some(), "{}", v.name);
    }
}

#[test]
fn two_is_a_retract_of_free_algebras() {
    for v in bounded_varieties() {
        for k in 0..=2 {
            let f = match free_algebra(&v, k, &Limits::default()) {
                Err(e) if e.is_size_limit() && k == 2 && !SMALL.contains(&v.name.as_str()) => continue,
                r => r.unwrap(),
            };
            let r = find_retraction(&catalog::two(), &f.algebra).unwrap_or_else(|| panic!("{} {k}", v.name));
            assert!(r.is_identity_composite());
        }
    }
}

#[test]
fn free_algebras_have_the_universal_property() {
    for name in ["BA", "GD3", "GD4", "MV3", "V(B4)"] {
        let v = VarietySpec::parse(name, &Limits::default()).unwrap();
        for k in 1..=2 {
            let free = free_algebra(&v, k, &Limits::default()).unwrap();
            for g in &v.generators {
                assert!(g.size().pow(k as u32) <= 2000);
                for images in all_maps(k, g.size()) {
                    let ext = free.all_extensions(g, &images);
                    assert_eq!(ext.len(), 1, "{name} k={k} {images:?}");
                    assert!(naive_is_hom(&free.algebra, g, &ext[0].map));
                }
            }
        }
    }
}

#[test]
fn regular_elements_of_free_algebras_form_free_boolean_algebras() {
    for name in ["BA", "GD3", "GD4", "V(B4)", "V(H_242)", "V(SUM_4_2)"] {
        let v = VarietySpec::parse(name, &Limits::default()).unwrap();
        for k in 1..=2u32 {
            let r = match regular_subalgebra_of_free(&v, k as usize, &Limits::default()) {
                Err(e) if e.is_size_limit() && k == 2 && !SMALL.contains(&name) => continue,
                r => r.unwrap(),
            };
            assert_eq!(r.size(), 1 << (1 << k), "{name} k={k}");
            assert!(is_boolean(&r));
        }
    }
}

#[test]
fn irreducible_stonean_bl_chains_start_with_two() {
    let bl = enumerate_models(&ModelQuery::up_to(6).with(ModelProperty::Bl).with(ModelProperty::Stonean), &Limits::default()).unwrap();
    let mut seen = 0;
    for a in bl.iter().filter(|a| is_subdirectly_irreducible(a, &Limits::default()).unwrap()) {
        assert!(a.is_totally_ordered(), "{}", a.name());
        let d = decompose(a);
        assert!(is_isomorphic(&d.components[0], &catalog::two()).is_some(), "{}", a.name());
        seen += 1;
    }
    assert!(seen >= 5);
}
