//! Deductive filters, their congruences, quotients and subdirect
//! irreducibility.
//!
//! A filter is an up-set containing 1 and closed under the product. The
//! congruence of a filter F relates a and b when a→b and b→a lie in F.

use serde::Serialize;

use crate::algebra::{Elem, FiniteAlgebra, Operation, RawAlgebra, Table};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::morphisms::Homomorphism;
use crate::properties;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Filter {
    /// Sorted member indices.
    pub elements: Vec<Elem>,
}

impl Filter {
    pub fn contains(&self, x: Elem) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_subset(&self, other: &Filter) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    /// The least element; every finite filter is principal.
    pub fn generator(&self, a: &FiniteAlgebra) -> Elem {
        *self
            .elements
            .iter()
            .find(|&&x| self.elements.iter().all(|&y| a.leq(x, y)))
            .expect("finite filters are principal")
    }
}

fn require_mul(a: &FiniteAlgebra) -> Result<()> {
    if a.signature().mul {
        Ok(())
    } else {
        Err(Error::UnsupportedConnective { op: Operation::Mul, algebra: a.name().to_string() })
    }
}

pub fn is_filter(a: &FiniteAlgebra, set: &[Elem]) -> bool {
    let mut inside = vec![false; a.size()];
    for &x in set {
        inside[x] = true;
    }
    inside[a.top()]
        && set.iter().all(|&x| a.elements().all(|y| !a.leq(x, y) || inside[y]))
        && set.iter().all(|&x| set.iter().all(|&y| inside[a.mul(x, y)]))
}

/// Up-closure of the product closure of `seeds ∪ {1}`.
pub fn filter_generate(a: &FiniteAlgebra, seeds: &[Elem]) -> Result<Filter> {
    require_mul(a)?;
    if let Some(&bad) = seeds.iter().find(|&&s| s >= a.size()) {
        return Err(Error::InvalidArgument(format!("element {bad} is out of range")));
    }
    let mut inside = vec![false; a.size()];
    let mut products = vec![a.top()];
    inside[a.top()] = true;
    for &s in seeds {
        if !inside[s] {
            inside[s] = true;
            products.push(s);
        }
    }
    let mut i = 0;
    while i < products.len() {
        let p = products[i];
        i += 1;
        for j in 0..i {
            let r = a.mul(p, products[j]);
            if !inside[r] {
                inside[r] = true;
                products.push(r);
            }
        }
    }
    let elements: Vec<Elem> = a.elements().filter(|&y| products.iter().any(|&p| a.leq(p, y))).collect();
    Ok(Filter { elements })
}

/// All filters, smallest first; sizes ascend, so the list extends inclusion.
pub fn all_filters(a: &FiniteAlgebra, limits: &Limits) -> Result<Vec<Filter>> {
    require_mul(a)?;
    limits.check("filter enumeration", a.size(), limits.element_cap())?;
    let mut out: Vec<Filter> = Vec::new();
    for x in a.elements() {
        let f = filter_generate(a, &[x])?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out.sort_by(|f, g| f.len().cmp(&g.len()).then_with(|| f.elements.cmp(&g.elements)));
    // each filter is the up-set of exactly one idempotent
    let idem = properties::idempotents(a);
    if idem.len() != out.len() || out.iter().any(|f| a.mul(f.generator(a), f.generator(a)) != f.generator(a)) {
        return Err(Error::Inconsistent(format!("filters of {} do not match its idempotents", a.name())));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Congruence {
    /// Blocks ordered by least member.
    pub blocks: Vec<Vec<Elem>>,
    /// Block index of each element.
    pub class_of: Vec<usize>,
}

impl Congruence {
    pub fn related(&self, x: Elem, y: Elem) -> bool {
        self.class_of[x] == self.class_of[y]
    }
}

pub fn congruence_from_filter(a: &FiniteAlgebra, f: &Filter) -> Congruence {
    let mut class_of = vec![usize::MAX; a.size()];
    let mut blocks: Vec<Vec<Elem>> = Vec::new();
    for x in a.elements() {
        if class_of[x] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let block: Vec<Elem> = a
            .elements()
            .filter(|&y| class_of[y] == usize::MAX && f.contains(a.imp(x, y)) && f.contains(a.imp(y, x)))
            .collect();
        for &y in &block {
            class_of[y] = id;
        }
        blocks.push(block);
    }
    Congruence { blocks, class_of }
}

/// `a / θ_F` together with the canonical surjection.
pub fn quotient(a: &FiniteAlgebra, f: &Filter) -> Result<(FiniteAlgebra, Homomorphism)> {
    if !is_filter(a, &f.elements) {
        return Err(Error::InvalidArgument("not a filter".into()));
    }
    let theta = congruence_from_filter(a, f);
    let n = theta.blocks.len();
    let reps: Vec<Elem> = theta.blocks.iter().map(|b| b[0]).collect();
    let sig = a.signature();
    let table = |op: Operation| Table::from_fn(n, |i, j| theta.class_of[a.op(op, reps[i], reps[j])]);
    let labels = theta
        .blocks
        .iter()
        .map(|b| if b.len() == 1 { a.label(b[0]) } else { format!("[{}]", a.label(b[0])) })
        .collect();
    let gen = a.label(f.generator(a));
    let raw = RawAlgebra {
        name: format!("{}/{}", a.name(), gen),
        size: n,
        top: theta.class_of[a.top()],
        bottom: a.bottom().map(|z| theta.class_of[z]),
        meet: sig.meet.then(|| table(Operation::Meet)),
        join: sig.join.then(|| table(Operation::Join)),
        mul: sig.mul.then(|| table(Operation::Mul)),
        imp: table(Operation::Imp),
        labels: Some(labels),
    };
    let q = FiniteAlgebra::validate(raw)?;
    let g = Homomorphism::checked(a, &q, theta.class_of.clone())
        .map_err(|e| Error::Inconsistent(format!("canonical surjection: {e}")))?;
    Ok((q, g))
}

/// The filter lattice has a single atom. Cross-checked against the top
/// having exactly one lower cover.
pub fn is_subdirectly_irreducible(a: &FiniteAlgebra, limits: &Limits) -> Result<bool> {
    let filters = all_filters(a, limits)?;
    let nontrivial: Vec<&Filter> = filters.iter().filter(|f| f.len() > 1).collect();
    let atoms = nontrivial
        .iter()
        .filter(|f| !nontrivial.iter().any(|g| g.len() < f.len() && g.is_subset(f)))
        .count();
    let by_filters = atoms == 1;
    let by_order = properties::coatoms(a).len() == 1;
    if by_filters != by_order {
        return Err(Error::Inconsistent(format!(
            "subdirect irreducibility criteria disagree on {}",
            a.name()
        )));
    }
    Ok(by_filters)
}

/// Only 0 is sent to 0.
pub fn zero_preimage_trivial(g: &Homomorphism, source: &FiniteAlgebra, target: &FiniteAlgebra) -> Result<bool> {
    let (Some(z), Some(zt)) = (source.bottom(), target.bottom()) else {
        return Err(Error::InvalidArgument("both algebras must be bounded".into()));
    };
    Ok(source.elements().all(|x| (g.map[x] == zt) == (x == z)))
}
