//! Free algebras of finitely generated varieties and variety membership.
//!
//! `F_V(k)` is built as the subalgebra of a direct product generated by the
//! k coordinate tuples. There is one coordinate per pair (generating algebra
//! G of V, assignment of the k variables into G), and the i-th free
//! generator is the tuple reading off the i-th variable.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{Elem, FiniteAlgebra, Operation, RawAlgebra, Signature, Table};
use crate::catalog;
use crate::congruences::{self, filter_generate, quotient};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::morphisms::{self, find_hom, subalgebra_on, HomFilter, HomOptions, Homomorphism};
use crate::properties;
use crate::term::{satisfies, Equation, Quasiequation, Term};

/// A variety given by finitely many finite generating algebras.
#[derive(Clone, Debug)]
pub struct VarietySpec {
    pub name: String,
    pub generators: Vec<FiniteAlgebra>,
    /// Identities expected to hold; checked on the generators.
    pub equations: Vec<Quasiequation>,
}

impl VarietySpec {
    pub fn new(name: impl Into<String>, generators: Vec<FiniteAlgebra>) -> Result<VarietySpec> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument("a variety needs at least one generating algebra".into()));
        }
        Ok(VarietySpec { name: name.into(), generators, equations: Vec::new() })
    }

    pub fn with_equations(mut self, equations: Vec<Quasiequation>) -> Result<VarietySpec> {
        for q in &equations {
            for g in &self.generators {
                if !satisfies(g, q)?.holds {
                    return Err(Error::InvalidArgument(format!("{} fails `{q}`", g.name())));
                }
            }
        }
        self.equations = equations;
        Ok(self)
    }

    /// `V(A)` for a single generating algebra, with its name.
    pub fn generated_by(alg: FiniteAlgebra) -> VarietySpec {
        VarietySpec { name: format!("V({})", alg.name()), generators: vec![alg], equations: Vec::new() }
    }

    /// Built-in names `BA`, `GD3`..`GD6`, `MV3`..`MV5`, or `V(e, …)` over
    /// algebra expressions.
    pub fn parse(text: &str, limits: &Limits) -> Result<VarietySpec> {
        let text = text.trim();
        let builtin = |gens: Vec<FiniteAlgebra>| VarietySpec::new(text, gens);
        if text == "BA" {
            return builtin(vec![catalog::two()]);
        }
        if let Some(n) = text.strip_prefix("GD").and_then(|n| n.parse::<usize>().ok()) {
            if (2..=6).contains(&n) {
                return builtin(vec![catalog::goedel_chain(n)]);
            }
        }
        if let Some(n) = text.strip_prefix("MV").and_then(|n| n.parse::<usize>().ok()) {
            if (2..=5).contains(&n) {
                return builtin(vec![catalog::lukasiewicz_chain(n)]);
            }
        }
        if let Some(inner) = text.strip_prefix("V(").and_then(|r| r.strip_suffix(')')) {
            let gens = split_top_level(inner)
                .iter()
                .map(|e| catalog::resolve(e, limits))
                .collect::<Result<Vec<_>>>()?;
            return VarietySpec::new(text, gens);
        }
        Err(Error::InvalidArgument(format!("unknown variety `{text}`")))
    }

    /// Operations shared by all generators; 0 only if all are bounded.
    pub fn signature(&self) -> Signature {
        self.generators.iter().skip(1).fold(self.generators[0].signature(), |s, g| s.intersection(&g.signature()))
    }

    pub fn is_bounded(&self) -> bool {
        self.signature().bottom
    }

    pub(crate) fn shared_generators(&self) -> Result<Vec<FiniteAlgebra>> {
        let sig = self.signature();
        self.generators.iter().map(|g| if g.signature() == sig { Ok(g.clone()) } else { g.reduct(sig) }).collect()
    }

    /// Brings `b` to the signature of the variety.
    pub fn align(&self, b: &FiniteAlgebra) -> Result<FiniteAlgebra> {
        let sig = self.signature();
        if b.signature() == sig {
            return Ok(b.clone());
        }
        if !sig.is_subsignature_of(&b.signature()) {
            return Err(Error::SignatureMismatch(format!(
                "{} lacks operations of {}",
                b.name(),
                self.name
            )));
        }
        b.reduct(sig)
    }
}

fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur).trim().to_string());
        } else {
            cur.push(c);
        }
    }
    out.push(cur.trim().to_string());
    out
}

/// A computed free algebra and the data to read terms into it.
#[derive(Clone, Debug)]
pub struct FreeAlgebraResult {
    pub algebra: FiniteAlgebra,
    /// Elements that are the free generators x0, x1, ….
    pub generator_elements: Vec<Elem>,
    /// Coordinates as (generating algebra index, assignment).
    pub coordinates: Vec<(usize, Vec<Elem>)>,
    /// The tuple of each element, one entry per coordinate.
    pub tuples: Vec<Vec<u8>>,
    pub variety: String,
    pub rank: usize,
}

impl FreeAlgebraResult {
    /// The element denoted by `t`, with variables read as free generators.
    pub fn element_of_term(&self, t: &Term) -> Result<Elem> {
        if t.arity() > self.rank {
            return Err(Error::InvalidArgument(format!("term uses {} variables, rank is {}", t.arity(), self.rank)));
        }
        t.eval(&self.algebra, &self.generator_elements)
    }

    /// The homomorphism onto coordinate `c`, that is, the extension of one
    /// assignment into one generating algebra.
    pub fn coordinate_projection(&self, c: usize, target: &FiniteAlgebra) -> Homomorphism {
        let map = self.tuples.iter().map(|t| t[c] as Elem).collect();
        Homomorphism::from_map(&self.algebra, target, map)
    }

    /// The unique homomorphism sending x_i to `images[i]`, if one exists.
    pub fn extend(&self, target: &FiniteAlgebra, images: &[Elem]) -> Option<Homomorphism> {
        find_hom(&self.algebra, target, &self.extension_options(target, images))
    }

    fn extension_options(&self, target: &FiniteAlgebra, images: &[Elem]) -> HomOptions {
        let mut domains: Vec<Vec<Elem>> = vec![target.elements().collect(); self.algebra.size()];
        for (g, &img) in self.generator_elements.iter().zip(images) {
            domains[*g] = vec![img];
        }
        HomOptions {
            domains: Some(domains),
            generators: Some(self.generator_elements.clone()),
            ..HomOptions::default()
        }
    }

    /// Every homomorphism extending `images`; the universal property says
    /// there is exactly one when `target` is in the variety.
    pub fn all_extensions(&self, target: &FiniteAlgebra, images: &[Elem]) -> Vec<Homomorphism> {
        morphisms::search_homs(&self.algebra, target, &self.extension_options(target, images))
    }
}

/// `F_V(k)` by closure in the product over all assignments.
pub fn free_algebra(v: &VarietySpec, k: usize, limits: &Limits) -> Result<FreeAlgebraResult> {
    let gens = v.shared_generators()?;
    let sig = v.signature();
    if let Some(g) = gens.iter().find(|g| g.size() > 256) {
        return Err(Error::InvalidArgument(format!("generating algebra {} exceeds 256 elements", g.name())));
    }
    let mut coord_count: usize = 0;
    for g in &gens {
        coord_count = coord_count.saturating_add(g.size().saturating_pow(k as u32));
    }
    limits.check("free algebra coordinates", coord_count, limits.max_coordinates)?;
    let mut coordinates: Vec<(usize, Vec<Elem>)> = Vec::with_capacity(coord_count);
    for (i, g) in gens.iter().enumerate() {
        let total = g.size().pow(k as u32);
        for code in 0..total {
            let mut assign = vec![0; k];
            let mut c = code;
            for j in (0..k).rev() {
                assign[j] = c % g.size();
                c /= g.size();
            }
            coordinates.push((i, assign));
        }
    }
    let coord_alg: Vec<&FiniteAlgebra> = coordinates.iter().map(|(i, _)| &gens[*i]).collect();
    let cap = limits.element_cap();

    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut members: Vec<Vec<u8>> = Vec::new();
    let mut derivation: Vec<Derivation> = Vec::new();
    let mut add = |t: Vec<u8>, d: Derivation, members: &mut Vec<Vec<u8>>, derivation: &mut Vec<Derivation>| -> Result<usize> {
        if let Some(&i) = index.get(&t) {
            return Ok(i);
        }
        let i = members.len();
        if i >= cap {
            return Err(Error::SizeLimitExceeded { what: "free algebra elements", needed: i + 1, limit: cap });
        }
        index.insert(t.clone(), i);
        members.push(t);
        derivation.push(d);
        Ok(i)
    };
    let top_t: Vec<u8> = coord_alg.iter().map(|g| g.top() as u8).collect();
    add(top_t, Derivation::One, &mut members, &mut derivation)?;
    if sig.bottom {
        let z: Vec<u8> = coord_alg.iter().map(|g| g.bottom().expect("bounded") as u8).collect();
        add(z, Derivation::Zero, &mut members, &mut derivation)?;
    }
    let mut generator_elements = Vec::with_capacity(k);
    for j in 0..k {
        let t: Vec<u8> = coordinates.iter().map(|(_, a)| a[j] as u8).collect();
        generator_elements.push(add(t, Derivation::Var(j), &mut members, &mut derivation)?);
    }
    let ops = sig.operations();
    // results[op][p] holds op(p, q) for q ≤ p; for imp also rev[p][q] = q → p
    let mut results: Vec<Vec<Vec<u32>>> = vec![Vec::new(); ops.len()];
    let mut reverse_imp: Vec<Vec<u32>> = Vec::new();
    let combine = |op: Operation, x: &[u8], y: &[u8]| -> Vec<u8> {
        x.iter().zip(y).zip(&coord_alg).map(|((&a, &b), g)| g.op(op, a as Elem, b as Elem) as u8).collect()
    };
    let mut p = 0;
    while p < members.len() {
        for (oi, &op) in ops.iter().enumerate() {
            let mut row = Vec::with_capacity(p + 1);
            let mut rev = Vec::new();
            for q in 0..=p {
                let t = combine(op, &members[p], &members[q]);
                let r = add(t, Derivation::Op(op, p, q), &mut members, &mut derivation)?;
                row.push(r as u32);
                if op == Operation::Imp {
                    let t = combine(op, &members[q], &members[p]);
                    let r = add(t, Derivation::Op(op, q, p), &mut members, &mut derivation)?;
                    rev.push(r as u32);
                }
            }
            results[oi].push(row);
            if op == Operation::Imp {
                reverse_imp.push(rev);
            }
        }
        p += 1;
    }
    let n = members.len();
    // canonical numbering: sorted tuples
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| members[a].cmp(&members[b]));
    let mut rank = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let lookup = |oi: usize, op: Operation, a: usize, b: usize| -> usize {
        let r = if b <= a {
            results[oi][a][b]
        } else if op == Operation::Imp {
            reverse_imp[b][a]
        } else {
            results[oi][b][a]
        };
        r as usize
    };
    let table = |op: Operation| -> Table {
        let oi = ops.iter().position(|&o| o == op).expect("operation");
        Table::from_fn(n, |i, j| rank[lookup(oi, op, order[i], order[j])])
    };
    let labels = derivation_labels(&derivation);
    let algebra = FiniteAlgebra::trusted(RawAlgebra {
        name: format!("F_{}({k})", v.name),
        size: n,
        top: rank[0],
        bottom: sig.bottom.then(|| rank[1]),
        meet: sig.meet.then(|| table(Operation::Meet)),
        join: sig.join.then(|| table(Operation::Join)),
        mul: sig.mul.then(|| table(Operation::Mul)),
        imp: table(Operation::Imp),
        labels: Some(order.iter().map(|&old| labels[old].clone()).collect()),
    });
    let tuples = order.iter().map(|&old| members[old].clone()).collect();
    Ok(FreeAlgebraResult {
        algebra,
        generator_elements: generator_elements.iter().map(|&g| rank[g]).collect(),
        coordinates,
        tuples,
        variety: v.name.clone(),
        rank: k,
    })
}

#[derive(Clone, Copy, Debug)]
enum Derivation {
    One,
    Zero,
    Var(usize),
    Op(Operation, usize, usize),
}

fn derivation_labels(ds: &[Derivation]) -> Vec<String> {
    const MAX_LABEL: usize = 32;
    let mut out: Vec<String> = Vec::with_capacity(ds.len());
    for (i, d) in ds.iter().enumerate() {
        let s = match *d {
            Derivation::One => "1".to_string(),
            Derivation::Zero => "0".to_string(),
            Derivation::Var(j) => crate::term::var_name(j),
            Derivation::Op(op, p, q) => {
                let wrap = |s: &str| if s.contains(' ') { format!("({s})") } else { s.to_string() };
                if op == Operation::Imp && ds.get(q).is_some_and(|d| matches!(d, Derivation::Zero)) {
                    format!("~{}", wrap(&out[p]))
                } else {
                    format!("{} {} {}", wrap(&out[p]), op.symbol(), wrap(&out[q]))
                }
            }
        };
        let s = if s.len() > MAX_LABEL { format!("t{i}") } else { s };
        // keep labels unique; later derivations of the same element never reach here
        out.push(s);
    }
    out
}

/// `F_V(k)` modulo the congruence generated by `relations`.
pub fn finitely_presented(
    v: &VarietySpec,
    k: usize,
    relations: &[Equation],
    limits: &Limits,
) -> Result<(FiniteAlgebra, Homomorphism, FreeAlgebraResult)> {
    let free = free_algebra(v, k, limits)?;
    let fa = &free.algebra;
    let mut seeds = Vec::new();
    for rel in relations {
        let p = free.element_of_term(&rel.lhs)?;
        let q = free.element_of_term(&rel.rhs)?;
        seeds.push(fa.imp(p, q));
        seeds.push(fa.imp(q, p));
    }
    let filter = filter_generate(fa, &seeds)?;
    let (q, g) = quotient(fa, &filter)?;
    let rels: Vec<String> = relations.iter().map(ToString::to_string).collect();
    let name = if rels.is_empty() { fa.name().to_string() } else { format!("{}/<{}>", fa.name(), rels.join("; ")) };
    let q = q.with_name(name);
    let g = Homomorphism::from_map(fa, &q, g.map);
    Ok((q, g, free))
}

#[derive(Clone, Debug, Serialize)]
pub struct Membership {
    pub member: bool,
    /// `quotients` when decided from the subdirectly irreducible quotients
    /// alone, `free` when the free-algebra route also ran.
    pub method: &'static str,
    pub free_size: Option<usize>,
    /// Homomorphism from the free algebra onto the subject.
    pub witness: Option<Vec<Elem>>,
    /// A subdirectly irreducible quotient outside HS of the generators.
    pub obstruction: Option<String>,
}

/// All subuniverses of a small algebra.
fn subuniverses(g: &FiniteAlgebra) -> Vec<Vec<Elem>> {
    let n = g.size();
    let mut out: Vec<Vec<Elem>> = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let seeds: Vec<Elem> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let c = morphisms::closure_in(g, g.signature(), &seeds);
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Whether `q` is a homomorphic image of a subalgebra of some generator.
fn in_hs(q: &FiniteAlgebra, gens: &[FiniteAlgebra]) -> bool {
    gens.iter().any(|g| {
        subuniverses(g).iter().any(|u| {
            u.len() >= q.size() && {
                let s = subalgebra_on(g, u, g.name().to_string());
                morphisms::has_hom(&s, q, HomFilter::Surjective)
            }
        })
    })
}

/// `b ∈ V`, decided from the subdirectly irreducible quotients of `b` (each
/// must lie in HS of the generators) and confirmed by a surjection from a
/// free algebra whenever that fits in the caps.
pub fn variety_membership(b: &FiniteAlgebra, v: &VarietySpec, limits: &Limits) -> Result<Membership> {
    let b = v.align(b)?;
    let gens = v.shared_generators()?;
    for q in &v.equations {
        if !satisfies(&b, q)?.holds {
            return Ok(Membership { member: false, method: "equations", free_size: None, witness: None, obstruction: Some(format!("fails {q}")) });
        }
    }
    let quotient_verdict = if b.signature().mul && gens.iter().all(|g| g.size() <= 12) {
        let mut verdict = Ok(());
        for f in congruences::all_filters(&b, limits)? {
            let (q, _) = quotient(&b, &f)?;
            if q.is_trivial() || !congruences::is_subdirectly_irreducible(&q, limits)? {
                continue;
            }
            if !in_hs(&q, &gens) {
                verdict = Err(format!("{} / filter {:?}", b.name(), f.elements));
                break;
            }
        }
        Some(verdict)
    } else {
        None
    };
    if let Some(Err(obstruction)) = &quotient_verdict {
        return Ok(Membership { member: false, method: "quotients", free_size: None, witness: None, obstruction: Some(obstruction.clone()) });
    }
    let gen_b = morphisms::generating_set_in(&b, b.signature());
    let free = match free_algebra(v, gen_b.len(), limits) {
        Ok(f) => f,
        Err(e) if e.is_size_limit() && quotient_verdict.is_some() => {
            return Ok(Membership { member: true, method: "quotients", free_size: None, witness: None, obstruction: None });
        }
        Err(e) => return Err(e),
    };
    let hom = free.extend(&b, &gen_b);
    let member = hom.is_some();
    if quotient_verdict.is_some() && !member {
        return Err(Error::Inconsistent(format!("membership of {} in {} disagrees between methods", b.name(), v.name)));
    }
    Ok(Membership {
        member,
        method: "free",
        free_size: Some(free.algebra.size()),
        witness: hom.map(|h| h.map),
        obstruction: (!member).then(|| format!("no homomorphism from {} onto {}", free.algebra.name(), b.name())),
    })
}

/// The Boolean algebra of regular elements {x : ¬¬x = x} of `F_V(k)`.
pub fn regular_subalgebra_of_free(v: &VarietySpec, k: usize, limits: &Limits) -> Result<FiniteAlgebra> {
    let gens = v.shared_generators()?;
    if !v.is_bounded() || !gens.iter().all(properties::is_pseudocomplemented) {
        return Err(Error::NotPseudocomplemented(v.name.clone()));
    }
    let free = free_algebra(v, k, limits)?;
    let f = &free.algebra;
    let reg = properties::regular_elements(f);
    let mut index = vec![usize::MAX; f.size()];
    for (i, &e) in reg.iter().enumerate() {
        index[e] = i;
    }
    let n = reg.len();
    let neg = |x: Elem| f.neg(x);
    let at = |x: Elem| {
        let i = index[x];
        assert!(i != usize::MAX, "regular elements are not closed");
        i
    };
    let meet = Table::from_fn(n, |i, j| at(f.meet(reg[i], reg[j])));
    let join = Table::from_fn(n, |i, j| at(neg(f.meet(neg(reg[i]), neg(reg[j])))));
    let imp = Table::from_fn(n, |i, j| at(neg(f.meet(reg[i], neg(reg[j])))));
    let raw = RawAlgebra {
        name: format!("R({})", f.name()),
        size: n,
        top: at(f.top()),
        bottom: f.bottom().map(at),
        mul: Some(meet.clone()),
        meet: Some(meet),
        join: Some(join),
        imp,
        labels: Some(reg.iter().map(|&e| f.label(e)).collect()),
    };
    let r = FiniteAlgebra::validate(raw)?;
    if !properties::is_boolean(&r) {
        return Err(Error::Inconsistent("regular elements do not form a Boolean algebra".into()));
    }
    let expected = 1usize.checked_shl(1u32 << k).unwrap_or(usize::MAX);
    if r.size() != expected {
        return Err(Error::Inconsistent(format!("{} regular elements, expected {expected}", r.size())));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{goedel_chain, lukasiewicz_chain, two};
    use crate::morphisms::{find_retraction, is_isomorphic};

    #[test]
    fn boolean_free_algebras() {
        let v = VarietySpec::generated_by(two());
        let l = Limits::default();
        let f0 = free_algebra(&v, 0, &l).unwrap();
        assert!(is_isomorphic(&f0.algebra, &two()).is_some());
        let f1 = free_algebra(&v, 1, &l).unwrap();
        assert_eq!(f1.algebra.size(), 4);
        assert_eq!(free_algebra(&v, 2, &l).unwrap().algebra.size(), 16);
    }

    #[test]
    fn known_sizes() {
        let l = Limits::default();
        let g3 = VarietySpec::generated_by(goedel_chain(3));
        assert_eq!(free_algebra(&g3, 1, &l).unwrap().algebra.size(), 6);
        assert_eq!(free_algebra(&g3, 2, &l).unwrap().algebra.size(), 162);
        let l3 = VarietySpec::generated_by(lukasiewicz_chain(3));
        assert_eq!(free_algebra(&l3, 1, &l).unwrap().algebra.size(), 12);
    }

    #[test]
    fn universal_property() {
        let l = Limits::default();
        let v = VarietySpec::generated_by(lukasiewicz_chain(3));
        let f = free_algebra(&v, 1, &l).unwrap();
        for g in &v.generators {
            for a in g.elements() {
                assert_eq!(f.all_extensions(g, &[a]).len(), 1);
            }
        }
        assert!(find_retraction(&two(), &f.algebra).is_some());
    }

    #[test]
    fn presentations() {
        let l = Limits::default();
        let v = VarietySpec::generated_by(two());
        let (q, g, _) = finitely_presented(&v, 1, &[Equation::parse("x = 1").unwrap()], &l).unwrap();
        assert_eq!(q.size(), 2);
        assert!(g.surjective);
        let (q, _, free) = finitely_presented(&v, 1, &[], &l).unwrap();
        assert_eq!(q.size(), free.algebra.size());
    }

    #[test]
    fn membership() {
        let l = Limits::default();
        let l3 = VarietySpec::generated_by(lukasiewicz_chain(3));
        assert!(variety_membership(&two(), &l3, &l).unwrap().member);
        let ba = VarietySpec::generated_by(two());
        assert!(!variety_membership(&lukasiewicz_chain(3), &ba, &l).unwrap().member);
        assert!(variety_membership(&crate::catalog::trivial(), &ba, &l).unwrap().member);
        let g3 = VarietySpec::generated_by(goedel_chain(3));
        let m = variety_membership(&goedel_chain(5), &g3, &l).unwrap();
        assert!(!m.member);
        assert_eq!(m.method, "quotients");
    }

    #[test]
    fn regular_elements_of_free_goedel_algebras() {
        let l = Limits::default();
        let g3 = VarietySpec::generated_by(goedel_chain(3));
        assert_eq!(regular_subalgebra_of_free(&g3, 1, &l).unwrap().size(), 4);
        assert_eq!(regular_subalgebra_of_free(&g3, 2, &l).unwrap().size(), 16);
        let l3 = VarietySpec::generated_by(lukasiewicz_chain(3));
        assert!(matches!(regular_subalgebra_of_free(&l3, 1, &l), Err(Error::NotPseudocomplemented(_))));
    }

    #[test]
    fn builtin_varieties() {
        let l = Limits::default();
        assert_eq!(VarietySpec::parse("GD4", &l).unwrap().generators[0].size(), 4);
        assert_eq!(VarietySpec::parse("V(B2,L3)", &l).unwrap().generators.len(), 2);
        assert!(VarietySpec::parse("XX", &l).is_err());
    }
}
