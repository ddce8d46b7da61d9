//! Homomorphism search, isomorphism, subalgebras, products and retractions.
//!
//! The search is a backtracking constraint solver. Constants are fixed
//! first, then images of a small generating set of the source are chosen in
//! index order; every assignment is propagated through the operation tables
//! so that the rest of the map is usually forced.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Elem, FiniteAlgebra, Operation, RawAlgebra, Signature, Table};
use crate::error::{Error, Result};
use crate::limits::Limits;

const NONE: usize = usize::MAX;

/// The operations and constants a map between `a` and `b` must preserve.
pub fn shared_signature(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Signature {
    a.signature().intersection(&b.signature())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homomorphism {
    pub source: String,
    pub target: String,
    pub map: Vec<Elem>,
    pub injective: bool,
    pub surjective: bool,
}

impl Homomorphism {
    /// Wraps a map that is already known to be a homomorphism.
    pub fn from_map(a: &FiniteAlgebra, b: &FiniteAlgebra, map: Vec<Elem>) -> Homomorphism {
        let mut h = Homomorphism::from_map_sized(map, b.size());
        h.source = a.name().to_string();
        h.target = b.name().to_string();
        h
    }

    /// Checks the map against the tables and wraps it.
    pub fn checked(a: &FiniteAlgebra, b: &FiniteAlgebra, map: Vec<Elem>) -> Result<Homomorphism> {
        verify(a, b, &map)?;
        Ok(Homomorphism::from_map(a, b, map))
    }

    pub fn identity(a: &FiniteAlgebra) -> Homomorphism {
        Homomorphism::from_map(a, a, a.elements().collect())
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x]
    }

    /// `next ∘ self`, landing in `target`.
    pub fn then(&self, next: &Homomorphism, target: &FiniteAlgebra) -> Homomorphism {
        let map: Vec<Elem> = self.map.iter().map(|&y| next.map[y]).collect();
        let mut out = Homomorphism::from_map_sized(map, target.size());
        out.source = self.source.clone();
        out.target = next.target.clone();
        out
    }

    fn from_map_sized(map: Vec<Elem>, target_size: usize) -> Homomorphism {
        let mut hit = vec![false; target_size];
        for &y in &map {
            hit[y] = true;
        }
        let injective = hit.iter().filter(|&&h| h).count() == map.len();
        let surjective = hit.iter().all(|&h| h);
        Homomorphism { source: String::new(), target: String::new(), map, injective, surjective }
    }

    /// The partition of the source into fibres, in order of first element.
    pub fn kernel_blocks(&self) -> Vec<Vec<Elem>> {
        let mut blocks: Vec<Vec<Elem>> = Vec::new();
        let mut seen: Vec<(Elem, usize)> = Vec::new();
        for (x, &y) in self.map.iter().enumerate() {
            match seen.iter().find(|(t, _)| *t == y) {
                Some(&(_, i)) => blocks[i].push(x),
                None => {
                    seen.push((y, blocks.len()));
                    blocks.push(vec![x]);
                }
            }
        }
        blocks
    }

    pub fn same_kernel(&self, other: &Homomorphism) -> bool {
        let n = self.map.len();
        n == other.map.len()
            && (0..n).all(|x| (0..n).all(|y| (self.map[x] == self.map[y]) == (other.map[x] == other.map[y])))
    }
}

/// Independent preservation check over every pair and every shared
/// operation.
pub fn verify(a: &FiniteAlgebra, b: &FiniteAlgebra, map: &[Elem]) -> Result<()> {
    if map.len() != a.size() {
        return Err(Error::NotAHomomorphism(format!("map has {} entries, source has {}", map.len(), a.size())));
    }
    if let Some(&y) = map.iter().find(|&&y| y >= b.size()) {
        return Err(Error::NotAHomomorphism(format!("image {y} is out of range")));
    }
    let sig = shared_signature(a, b);
    if map[a.top()] != b.top() {
        return Err(Error::NotAHomomorphism("top is not preserved".into()));
    }
    if sig.bottom && map[a.bottom().expect("bounded")] != b.bottom().expect("bounded") {
        return Err(Error::NotAHomomorphism("bottom is not preserved".into()));
    }
    for op in sig.operations() {
        for x in a.elements() {
            for y in a.elements() {
                if map[a.op(op, x, y)] != b.op(op, map[x], map[y]) {
                    return Err(Error::NotAHomomorphism(format!("{op} fails at ({x},{y})")));
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HomFilter {
    #[default]
    All,
    Injective,
    Surjective,
    Bijective,
}

/// Options for [`search_homs`].
#[derive(Clone, Debug, Default)]
pub struct HomOptions {
    pub filter: HomFilter,
    /// Applied after sorting.
    pub limit: Option<usize>,
    /// Allowed images per source element.
    pub domains: Option<Vec<Vec<Elem>>>,
    /// A generating set of the source in the shared signature, if known.
    pub generators: Option<Vec<Elem>>,
    pub workers: usize,
}

impl HomOptions {
    pub fn filter(filter: HomFilter) -> HomOptions {
        HomOptions { filter, ..HomOptions::default() }
    }
}

struct Engine<'a> {
    a: &'a FiniteAlgebra,
    b: &'a FiniteAlgebra,
    ops: Vec<Operation>,
    allowed: Option<Vec<bool>>,
    injective: bool,
    surjective: bool,
    order: Vec<Elem>,
}

#[derive(Clone)]
struct State {
    map: Vec<Elem>,
    used: Vec<u32>,
    trail: Vec<Elem>,
    unused_targets: usize,
}

impl<'a> Engine<'a> {
    fn new(a: &'a FiniteAlgebra, b: &'a FiniteAlgebra, opts: &HomOptions) -> Engine<'a> {
        let sig = shared_signature(a, b);
        let allowed = opts.domains.as_ref().map(|doms| {
            let mut bits = vec![false; a.size() * b.size()];
            for (x, dom) in doms.iter().enumerate() {
                for &y in dom {
                    bits[x * b.size() + y] = true;
                }
            }
            bits
        });
        let gens = match &opts.generators {
            Some(g) => g.clone(),
            None => generating_set_in(a, sig),
        };
        let mut order = gens;
        let mut seen = vec![false; a.size()];
        order.retain(|&g| !std::mem::replace(&mut seen[g], true));
        order.extend(a.elements().filter(|&x| !seen[x]));
        let (injective, surjective) = match opts.filter {
            HomFilter::All => (false, false),
            HomFilter::Injective => (true, false),
            HomFilter::Surjective => (false, true),
            HomFilter::Bijective => (true, true),
        };
        Engine { a, b, ops: sig.operations(), allowed, injective, surjective, order }
    }

    fn fresh(&self) -> State {
        State { map: vec![NONE; self.a.size()], used: vec![0; self.b.size()], trail: Vec::new(), unused_targets: self.b.size() }
    }

    fn is_allowed(&self, x: Elem, y: Elem) -> bool {
        self.allowed.as_ref().is_none_or(|bits| bits[x * self.b.size() + y])
    }

    fn set(&self, st: &mut State, x: Elem, y: Elem) -> bool {
        if !self.is_allowed(x, y) || (self.injective && st.used[y] > 0) {
            return false;
        }
        st.map[x] = y;
        if st.used[y] == 0 {
            st.unused_targets -= 1;
        }
        st.used[y] += 1;
        st.trail.push(x);
        true
    }

    fn undo(&self, st: &mut State, mark: usize) {
        while st.trail.len() > mark {
            let x = st.trail.pop().expect("trail");
            let y = st.map[x];
            st.used[y] -= 1;
            if st.used[y] == 0 {
                st.unused_targets += 1;
            }
            st.map[x] = NONE;
        }
    }

    /// Assigns `x ↦ y` and everything it forces.
    fn assign(&self, st: &mut State, x: Elem, y: Elem) -> bool {
        if st.map[x] != NONE {
            return st.map[x] == y;
        }
        if !self.set(st, x, y) {
            return false;
        }
        let mut queue_pos = st.trail.len() - 1;
        while queue_pos < st.trail.len() {
            let p = st.trail[queue_pos];
            queue_pos += 1;
            let mut i = 0;
            while i < st.trail.len() {
                let q = st.trail[i];
                i += 1;
                for &op in &self.ops {
                    let pairs: &[(Elem, Elem)] =
                        if op == Operation::Imp && p != q { &[(p, q), (q, p)] } else { &[(p, q)] };
                    for &(s, t) in pairs {
                        let r = self.a.op(op, s, t);
                        let v = self.b.op(op, st.map[s], st.map[t]);
                        if st.map[r] == NONE {
                            if !self.set(st, r, v) {
                                return false;
                            }
                        } else if st.map[r] != v {
                            return false;
                        }
                    }
                }
            }
        }
        !self.surjective || self.a.size() - st.trail.len() >= st.unused_targets
    }

    fn seed(&self, st: &mut State) -> bool {
        if !self.assign(st, self.a.top(), self.b.top()) {
            return false;
        }
        if let (true, Some(za), Some(zb)) = (self.bottom_shared(), self.a.bottom(), self.b.bottom()) {
            if !self.assign(st, za, zb) {
                return false;
            }
        }
        true
    }

    fn bottom_shared(&self) -> bool {
        self.a.is_bounded() && self.b.is_bounded()
    }

    fn next_free(&self, st: &State) -> Option<Elem> {
        self.order.iter().copied().find(|&x| st.map[x] == NONE)
    }

    /// Visits complete maps until `visit` returns false.
    fn dfs(&self, st: &mut State, visit: &mut dyn FnMut(&[Elem]) -> bool) -> bool {
        let Some(x) = self.next_free(st) else {
            if self.surjective && st.unused_targets > 0 {
                return true;
            }
            return visit(&st.map);
        };
        for y in self.b.elements() {
            let mark = st.trail.len();
            if self.assign(st, x, y) && !self.dfs(st, visit) {
                self.undo(st, mark);
                return false;
            }
            self.undo(st, mark);
        }
        true
    }
}

/// All homomorphisms `a → b` matching the options, sorted by map.
pub fn search_homs(a: &FiniteAlgebra, b: &FiniteAlgebra, opts: &HomOptions) -> Vec<Homomorphism> {
    let maps = search_maps(a, b, opts);
    maps.into_iter().map(|m| Homomorphism::from_map(a, b, m)).collect()
}

fn search_maps(a: &FiniteAlgebra, b: &FiniteAlgebra, opts: &HomOptions) -> Vec<Vec<Elem>> {
    let eng = Engine::new(a, b, opts);
    let mut root = eng.fresh();
    if !eng.seed(&mut root) {
        return Vec::new();
    }
    let mut out: Vec<Vec<Elem>> = match (opts.workers > 1, eng.next_free(&root)) {
        (true, Some(x)) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.workers).build().expect("thread pool");
            let parts: Vec<Vec<Vec<Elem>>> = pool.install(|| {
                b.elements()
                    .collect::<Vec<_>>()
                    .into_par_iter()
                    .map(|y| {
                        let mut st = root.clone();
                        let mut found = Vec::new();
                        if eng.assign(&mut st, x, y) {
                            eng.dfs(&mut st, &mut |m| {
                                found.push(m.to_vec());
                                true
                            });
                        }
                        found.sort();
                        found
                    })
                    .collect()
            });
            merge_sorted(parts)
        }
        _ => {
            let mut found = Vec::new();
            eng.dfs(&mut root, &mut |m| {
                found.push(m.to_vec());
                true
            });
            found.sort();
            found
        }
    };
    if let Some(limit) = opts.limit {
        out.truncate(limit);
    }
    out
}

fn merge_sorted(parts: Vec<Vec<Vec<Elem>>>) -> Vec<Vec<Elem>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut iters: Vec<std::vec::IntoIter<Vec<Elem>>> = parts.into_iter().map(Vec::into_iter).collect();
    let mut heap = BinaryHeap::new();
    for (i, it) in iters.iter_mut().enumerate() {
        if let Some(m) = it.next() {
            heap.push(Reverse((m, i)));
        }
    }
    let mut out = Vec::new();
    while let Some(Reverse((m, i))) = heap.pop() {
        out.push(m);
        if let Some(next) = iters[i].next() {
            heap.push(Reverse((next, i)));
        }
    }
    out
}

/// The first homomorphism found in search order, without sorting.
pub fn find_hom(a: &FiniteAlgebra, b: &FiniteAlgebra, opts: &HomOptions) -> Option<Homomorphism> {
    let eng = Engine::new(a, b, opts);
    let mut st = eng.fresh();
    if !eng.seed(&mut st) {
        return None;
    }
    let mut found = None;
    eng.dfs(&mut st, &mut |m| {
        found = Some(m.to_vec());
        false
    });
    found.map(|m| Homomorphism::from_map(a, b, m))
}

pub fn enumerate_homs(a: &FiniteAlgebra, b: &FiniteAlgebra, filter: HomFilter, limit: Option<usize>) -> Vec<Homomorphism> {
    search_homs(a, b, &HomOptions { filter, limit, ..HomOptions::default() })
}

pub fn has_hom(a: &FiniteAlgebra, b: &FiniteAlgebra, filter: HomFilter) -> bool {
    find_hom(a, b, &HomOptions::filter(filter)).is_some()
}

/// Some isomorphism `a → b`, if any.
pub fn is_isomorphic(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<Homomorphism> {
    if a.size() != b.size() || a.signature() != b.signature() {
        return None;
    }
    let profile = |x: &FiniteAlgebra| {
        let mut p: Vec<(usize, usize)> = x
            .elements()
            .map(|e| (x.elements().filter(|&f| x.leq(f, e)).count(), x.elements().filter(|&f| x.leq(e, f)).count()))
            .collect();
        p.sort();
        p
    };
    if profile(a) != profile(b) {
        return None;
    }
    find_hom(a, b, &HomOptions::filter(HomFilter::Bijective))
}

/// Least subset containing `seeds` and the constants, closed under the
/// operations of `sig`. Returned sorted.
pub fn closure_in(a: &FiniteAlgebra, sig: Signature, seeds: &[Elem]) -> Vec<Elem> {
    closure_capped(a, sig, seeds, usize::MAX).expect("uncapped")
}

fn closure_capped(a: &FiniteAlgebra, sig: Signature, seeds: &[Elem], cap: usize) -> Option<Vec<Elem>> {
    let mut inside = vec![false; a.size()];
    let mut members: Vec<Elem> = Vec::new();
    let push = |x: Elem, members: &mut Vec<Elem>, inside: &mut Vec<bool>| {
        if !inside[x] {
            inside[x] = true;
            members.push(x);
        }
    };
    push(a.top(), &mut members, &mut inside);
    if sig.bottom {
        if let Some(z) = a.bottom() {
            push(z, &mut members, &mut inside);
        }
    }
    for &s in seeds {
        push(s, &mut members, &mut inside);
    }
    let ops = sig.operations();
    let mut done = 0;
    while done < members.len() {
        let p = members[done];
        done += 1;
        let mut i = 0;
        while i < done {
            let q = members[i];
            i += 1;
            for &op in &ops {
                push(a.op(op, p, q), &mut members, &mut inside);
                if op == Operation::Imp {
                    push(a.op(op, q, p), &mut members, &mut inside);
                }
            }
            if members.len() > cap {
                return None;
            }
        }
    }
    members.sort_unstable();
    Some(members)
}

/// A small generating set of `a` in its own signature.
pub fn generating_set(a: &FiniteAlgebra) -> Vec<Elem> {
    generating_set_in(a, a.signature())
}

/// Smallest generating set found by increasing-size search (up to four
/// elements, within a budget), otherwise a greedy one.
pub fn generating_set_in(a: &FiniteAlgebra, sig: Signature) -> Vec<Elem> {
    let n = a.size();
    let base = closure_in(a, sig, &[]);
    if base.len() == n {
        return Vec::new();
    }
    let candidates: Vec<Elem> = a.elements().filter(|x| base.binary_search(x).is_err()).collect();
    let mut budget: usize = if n <= 64 { 20_000 } else { 0 };
    for k in 1..=4usize {
        let mut combo: Vec<usize> = (0..k).collect();
        if k > candidates.len() {
            break;
        }
        loop {
            if budget == 0 {
                break;
            }
            budget -= 1;
            let seeds: Vec<Elem> = combo.iter().map(|&i| candidates[i]).collect();
            if closure_capped(a, sig, &seeds, n).is_some_and(|c| c.len() == n) {
                return seeds;
            }
            if !next_combination(&mut combo, candidates.len()) {
                break;
            }
        }
    }
    // greedy: repeatedly add the first element outside the current closure
    let mut seeds = Vec::new();
    let mut cl = base;
    while cl.len() < n {
        let x = a.elements().find(|x| cl.binary_search(x).is_err()).expect("missing element");
        seeds.push(x);
        cl = closure_in(a, sig, &seeds);
    }
    // drop redundant seeds, last first
    let mut i = seeds.len();
    while i > 0 {
        i -= 1;
        let mut fewer = seeds.clone();
        fewer.remove(i);
        if closure_in(a, sig, &fewer).len() == n {
            seeds = fewer;
        }
    }
    seeds
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Builds the subalgebra on a closed, sorted subset.
pub(crate) fn subalgebra_on(a: &FiniteAlgebra, elems: &[Elem], name: String) -> FiniteAlgebra {
    let mut index = vec![NONE; a.size()];
    for (i, &e) in elems.iter().enumerate() {
        index[e] = i;
    }
    let n = elems.len();
    let sig = a.signature();
    let table = |op: Operation| Table::from_fn(n, |i, j| index[a.op(op, elems[i], elems[j])]);
    FiniteAlgebra::trusted(RawAlgebra {
        name,
        size: n,
        top: index[a.top()],
        bottom: a.bottom().map(|z| index[z]),
        meet: sig.meet.then(|| table(Operation::Meet)),
        join: sig.join.then(|| table(Operation::Join)),
        mul: sig.mul.then(|| table(Operation::Mul)),
        imp: table(Operation::Imp),
        labels: Some(elems.iter().map(|&e| a.label(e)).collect()),
    })
}

/// The subalgebra generated by `seeds`, with its inclusion into `a`.
pub fn subalgebra_generate(a: &FiniteAlgebra, seeds: &[Elem]) -> Result<(FiniteAlgebra, Homomorphism)> {
    if let Some(&bad) = seeds.iter().find(|&&s| s >= a.size()) {
        return Err(Error::InvalidArgument(format!("element {bad} is out of range")));
    }
    let elems = closure_in(a, a.signature(), seeds);
    let labels: Vec<String> = seeds.iter().map(|&s| a.label(s)).collect();
    let sub = subalgebra_on(a, &elems, format!("sub({};{})", a.name(), labels.join(",")));
    let inclusion = Homomorphism::from_map(&sub, a, elems);
    Ok((sub, inclusion))
}

/// Componentwise product with tuples in lexicographic order, first factor
/// most significant.
pub fn direct_product(factors: &[FiniteAlgebra], limits: &Limits) -> Result<(FiniteAlgebra, Vec<Homomorphism>)> {
    let [first, rest @ ..] = factors else {
        return Err(Error::InvalidArgument("product of an empty family".into()));
    };
    if rest.is_empty() {
        return Ok((first.clone(), vec![Homomorphism::identity(first)]));
    }
    let mut sig = first.signature();
    for f in rest {
        sig = sig.intersection(&f.signature());
    }
    let mut n: usize = 1;
    for f in factors {
        n = n.saturating_mul(f.size());
    }
    limits.check("direct product", n, limits.max_product_size)?;
    limits.check("direct product (dense tables)", n, limits.element_cap())?;
    let sizes: Vec<usize> = factors.iter().map(FiniteAlgebra::size).collect();
    let decode = |mut p: usize| -> Vec<Elem> {
        let mut t = vec![0; sizes.len()];
        for i in (0..sizes.len()).rev() {
            t[i] = p % sizes[i];
            p /= sizes[i];
        }
        t
    };
    let encode = |t: &[Elem]| t.iter().zip(&sizes).fold(0, |acc, (&x, &s)| acc * s + x);
    let tuples: Vec<Vec<Elem>> = (0..n).map(decode).collect();
    let table = |op: Operation| {
        Table::from_fn(n, |p, q| {
            let t: Vec<Elem> = factors.iter().enumerate().map(|(i, f)| f.op(op, tuples[p][i], tuples[q][i])).collect();
            encode(&t)
        })
    };
    let tops: Vec<Elem> = factors.iter().map(FiniteAlgebra::top).collect();
    let bottom = if sig.bottom {
        let zs: Vec<Elem> = factors.iter().map(|f| f.bottom().expect("bounded")).collect();
        Some(encode(&zs))
    } else {
        None
    };
    let labels = tuples
        .iter()
        .map(|t| {
            let parts: Vec<String> = t.iter().zip(factors).map(|(&x, f)| f.label(x)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let names: Vec<&str> = factors.iter().map(FiniteAlgebra::name).collect();
    let prod = FiniteAlgebra::trusted(RawAlgebra {
        name: format!("prod({})", names.join(",")),
        size: n,
        top: encode(&tops),
        bottom,
        meet: sig.meet.then(|| table(Operation::Meet)),
        join: sig.join.then(|| table(Operation::Join)),
        mul: sig.mul.then(|| table(Operation::Mul)),
        imp: table(Operation::Imp),
        labels: Some(labels),
    });
    let projections = factors
        .iter()
        .enumerate()
        .map(|(i, f)| Homomorphism::from_map(&prod, f, tuples.iter().map(|t| t[i]).collect()))
        .collect();
    Ok((prod, projections))
}

/// `section: A → B` and `projection: B → A` with `projection ∘ section = id`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Retraction {
    pub section: Homomorphism,
    pub projection: Homomorphism,
}

impl Retraction {
    pub fn is_identity_composite(&self) -> bool {
        self.section.map.iter().enumerate().all(|(x, &y)| self.projection.map[y] == x)
    }
}

/// A retraction of `b` onto `a`, if any.
pub fn find_retraction(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<Retraction> {
    if a.size() > b.size() {
        return None;
    }
    let eng = Engine::new(a, b, &HomOptions::filter(HomFilter::Injective));
    let mut st = eng.fresh();
    if !eng.seed(&mut st) {
        return None;
    }
    let mut found = None;
    eng.dfs(&mut st, &mut |f| {
        if let Some(g) = retraction_for(a, b, f) {
            found = Some(Retraction {
                section: Homomorphism::from_map(a, b, f.to_vec()),
                projection: g,
            });
            false
        } else {
            true
        }
    });
    found
}

/// A hom `g: B → A` with `g ∘ f = id`, for an injective `f: A → B`.
fn retraction_for(a: &FiniteAlgebra, b: &FiniteAlgebra, f: &[Elem]) -> Option<Homomorphism> {
    let mut domains: Vec<Vec<Elem>> = vec![a.elements().collect(); b.size()];
    for (x, &y) in f.iter().enumerate() {
        domains[y] = vec![x];
    }
    find_hom(b, a, &HomOptions { filter: HomFilter::Surjective, domains: Some(domains), ..HomOptions::default() })
}

/// A hom `h: A → B` with `g ∘ h = id`, for a surjective `g: B → A`.
pub fn find_section(g: &Homomorphism, b: &FiniteAlgebra, a: &FiniteAlgebra) -> Option<Homomorphism> {
    let mut domains: Vec<Vec<Elem>> = vec![Vec::new(); a.size()];
    for (y, &x) in g.map.iter().enumerate() {
        domains[x].push(y);
    }
    if domains.iter().any(Vec::is_empty) {
        return None;
    }
    find_hom(a, b, &HomOptions { domains: Some(domains), ..HomOptions::default() })
}
