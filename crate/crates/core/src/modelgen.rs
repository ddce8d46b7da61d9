//! Enumeration of finite bounded commutative integral residuated lattices,
//! one per isomorphism class.
//!
//! Lattices come first: naturally labelled posets with 0 and 1, reduced to
//! one representative per isomorphism type. For each lattice the product is
//! found by backtracking over the upper triangle of its table, keeping only
//! integral, monotone, associative tables that distribute over joins. The
//! residual is then the largest solution of z·x ≤ y. A table is emitted only
//! if it is lexicographically least among its images under the lattice
//! automorphisms.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Elem, FiniteAlgebra, RawAlgebra, Signature};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::properties;
use crate::term::{satisfies, Quasiequation};

/// A finite bounded lattice on {0..n-1} with 0 least and n-1 greatest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub n: usize,
    leq: Vec<bool>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    /// Permutations of the carrier preserving the order.
    pub automorphisms: Vec<Vec<Elem>>,
}

impl Lattice {
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a * self.n + b]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a * self.n + b]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a * self.n + b]
    }

    fn from_order(n: usize, leq: Vec<bool>) -> Option<Lattice> {
        let le = |a: Elem, b: Elem| leq[a * n + b];
        let bound = |a: Elem, b: Elem, upper: bool| -> Option<Elem> {
            let cands: Vec<Elem> =
                (0..n).filter(|&c| if upper { le(a, c) && le(b, c) } else { le(c, a) && le(c, b) }).collect();
            cands.iter().copied().find(|&c| cands.iter().all(|&d| if upper { le(c, d) } else { le(d, c) }))
        };
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                meet[a * n + b] = bound(a, b, false)?;
                join[a * n + b] = bound(a, b, true)?;
            }
        }
        let mut lat = Lattice { n, leq, meet, join, automorphisms: Vec::new() };
        lat.automorphisms = inner_permutations(n)
            .into_iter()
            .filter(|p| (0..n).all(|a| (0..n).all(|b| lat.leq(a, b) == lat.leq(p[a], p[b]))))
            .collect();
        Some(lat)
    }
}

/// All permutations of {0..n-1} fixing 0 and n-1.
fn inner_permutations(n: usize) -> Vec<Vec<Elem>> {
    if n <= 2 {
        return vec![(0..n).collect()];
    }
    let inner: Vec<Elem> = (1..n - 1).collect();
    let mut out = Vec::new();
    permute(&inner, &mut Vec::new(), &mut vec![false; inner.len()], &mut |p| {
        let mut full = vec![0];
        full.extend_from_slice(p);
        full.push(n - 1);
        out.push(full);
    });
    out
}

fn permute(items: &[Elem], cur: &mut Vec<Elem>, used: &mut Vec<bool>, f: &mut dyn FnMut(&[Elem])) {
    if cur.len() == items.len() {
        f(cur);
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            cur.push(items[i]);
            permute(items, cur, used, f);
            cur.pop();
            used[i] = false;
        }
    }
}

/// One representative of every lattice of size `n`, chains first.
pub fn lattices(n: usize) -> Vec<Lattice> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![Lattice::from_order(1, vec![true]).expect("one point")];
    }
    let top = n - 1;
    let free_pairs: Vec<(Elem, Elem)> = (1..top).flat_map(|i| (i + 1..top).map(move |j| (i, j))).collect();
    let perms = inner_permutations(n);
    let mut best: Vec<(Vec<bool>, Vec<bool>)> = Vec::new();
    for mask in 0u64..(1u64 << free_pairs.len()) {
        let mut leq = vec![false; n * n];
        for a in 0..n {
            leq[a * n + a] = true;
            leq[a] = true;
            leq[a * n + top] = true;
        }
        for (bit, &(i, j)) in free_pairs.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                leq[i * n + j] = true;
            }
        }
        let transitive = (0..n).all(|a| {
            (0..n).all(|b| !leq[a * n + b] || (0..n).all(|c| !leq[b * n + c] || leq[a * n + c]))
        });
        if !transitive {
            continue;
        }
        // canonical relabelling: the naturally labelled image with the
        // largest encoding
        let mut canon: Option<(Vec<bool>, Vec<bool>)> = None;
        for p in &perms {
            let mut img = vec![false; n * n];
            for a in 0..n {
                for b in 0..n {
                    img[p[a] * n + p[b]] = leq[a * n + b];
                }
            }
            let natural = (0..n).all(|a| (0..a).all(|b| !img[a * n + b]));
            if !natural {
                continue;
            }
            let code: Vec<bool> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).map(|(a, b)| img[a * n + b]).collect();
            if canon.as_ref().is_none_or(|(c, _)| code > *c) {
                canon = Some((code, img));
            }
        }
        let canon = canon.expect("identity is natural");
        if !best.iter().any(|(c, _)| *c == canon.0) {
            best.push(canon);
        }
    }
    best.sort_by(|a, b| b.0.cmp(&a.0));
    best.into_iter().filter_map(|(_, leq)| Lattice::from_order(n, leq)).collect()
}

const UNSET: Elem = usize::MAX;

struct MonoidSearch<'a> {
    lat: &'a Lattice,
    n: usize,
    table: Vec<Elem>,
    cells: Vec<(Elem, Elem)>,
    found: Vec<Vec<Elem>>,
}

impl<'a> MonoidSearch<'a> {
    fn new(lat: &'a Lattice) -> MonoidSearch<'a> {
        let n = lat.n;
        let top = n - 1;
        let mut table = vec![UNSET; n * n];
        for x in 0..n {
            table[x * n + top] = x;
            table[top * n + x] = x;
            table[x] = 0;
            table[x * n] = 0;
        }
        let cells = (1..top.max(1)).flat_map(|i| (i..top).map(move |j| (i, j))).collect();
        MonoidSearch { lat, n, table, cells, found: Vec::new() }
    }

    fn get(&self, x: Elem, y: Elem) -> Elem {
        self.table[x * self.n + y]
    }

    fn put(&mut self, x: Elem, y: Elem, v: Elem) {
        self.table[x * self.n + y] = v;
        self.table[y * self.n + x] = v;
    }

    fn consistent(&self, i: Elem, j: Elem) -> bool {
        let n = self.n;
        let lat = self.lat;
        let v = self.get(i, j);
        // monotone in each argument
        for (p, q) in [(i, j), (j, i)] {
            for x in 0..n {
                let w = self.get(x, q);
                if w == UNSET {
                    continue;
                }
                if lat.leq(x, p) && !lat.leq(w, v) || lat.leq(p, x) && !lat.leq(v, w) {
                    return false;
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = self.get(x, y);
                if xy == UNSET {
                    continue;
                }
                for z in 0..n {
                    let yz = self.get(y, z);
                    if yz == UNSET {
                        continue;
                    }
                    let l = self.get(xy, z);
                    let r = self.get(x, yz);
                    if l != UNSET && r != UNSET && l != r {
                        return false;
                    }
                    // x·(y ∨ z) = x·y ∨ x·z
                    let xz = self.get(x, z);
                    let xjoin = self.get(x, lat.join(y, z));
                    if xz != UNSET && xjoin != UNSET && xjoin != lat.join(xy, xz) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, k: usize) {
        if k == self.cells.len() {
            if self.is_orbit_minimum() {
                self.found.push(self.table.clone());
            }
            return;
        }
        let (i, j) = self.cells[k];
        let cap = self.lat.meet(i, j);
        for v in 0..self.n {
            if !self.lat.leq(v, cap) {
                continue;
            }
            self.put(i, j, v);
            if self.consistent(i, j) {
                self.run(k + 1);
            }
        }
        self.put(i, j, UNSET);
    }

    fn is_orbit_minimum(&self) -> bool {
        let n = self.n;
        let mut inv = vec![0; n];
        self.lat.automorphisms.iter().all(|p| {
            for (a, &pa) in p.iter().enumerate() {
                inv[pa] = a;
            }
            for x in 0..n {
                for y in 0..n {
                    let moved = p[self.get(inv[x], inv[y])];
                    let here = self.get(x, y);
                    if moved != here {
                        return here < moved;
                    }
                }
            }
            true
        })
    }
}

/// Every residuated product on `lat`, one per isomorphism class, as full
/// bounded algebras.
pub fn algebras_on(lat: &Lattice, name_prefix: &str) -> Vec<FiniteAlgebra> {
    let mut search = MonoidSearch::new(lat);
    search.run(0);
    let n = lat.n;
    let top = n - 1;
    search
        .found
        .iter()
        .enumerate()
        .map(|(t, mul)| {
            let imp = move |x: Elem, y: Elem| -> Elem {
                (0..n).filter(|&z| lat.leq(mul[z * n + x], y)).fold(0, |acc, z| lat.join(acc, z))
            };
            let labels = (0..n).map(|i| match i {
                0 => "0".to_string(),
                i if i == top => "1".to_string(),
                i => format!("e{i}"),
            });
            RawAlgebra::new(format!("{name_prefix}.{}", t + 1), n, top, imp)
                .bottom(0)
                .meet(|a, b| lat.meet(a, b))
                .join(|a, b| lat.join(a, b))
                .mul(|a, b| mul[a * n + b])
                .labels(labels)
                .validate()
                .expect("search emits residuated lattices")
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelProperty {
    Divisible,
    Prelinear,
    /// x·x = x, that is Heyting when combined with boundedness.
    Idempotent,
    Heyting,
    Boolean,
    Hoop,
    Bl,
    Mv,
    Chain,
    Stonean,
    Involutive,
    SubdirectlyIrreducible,
    SumIrreducible,
    NotTrivial,
}

impl ModelProperty {
    pub fn parse(s: &str) -> Result<ModelProperty> {
        Ok(match s.trim() {
            "divisible" => ModelProperty::Divisible,
            "prelinear" | "mtl" => ModelProperty::Prelinear,
            "2-potent" | "idempotent" => ModelProperty::Idempotent,
            "heyting" => ModelProperty::Heyting,
            "boolean" => ModelProperty::Boolean,
            "hoop" | "bounded-hoop" => ModelProperty::Hoop,
            "bl" => ModelProperty::Bl,
            "mv" => ModelProperty::Mv,
            "chain" | "totally-ordered" => ModelProperty::Chain,
            "stonean" => ModelProperty::Stonean,
            "involutive" => ModelProperty::Involutive,
            "si" | "subdirectly-irreducible" => ModelProperty::SubdirectlyIrreducible,
            "sum-irreducible" => ModelProperty::SumIrreducible,
            "nontrivial" => ModelProperty::NotTrivial,
            other => return Err(Error::Parse(format!("unknown property `{other}`"))),
        })
    }

    pub fn holds(self, a: &FiniteAlgebra) -> bool {
        match self {
            ModelProperty::Divisible | ModelProperty::Hoop => properties::is_divisible(a),
            ModelProperty::Prelinear => properties::is_prelinear(a),
            ModelProperty::Idempotent => a.elements().all(|x| a.mul(x, x) == x),
            ModelProperty::Heyting => properties::is_heyting(a),
            ModelProperty::Boolean => properties::is_boolean(a),
            ModelProperty::Bl => properties::is_bl(a),
            ModelProperty::Mv => properties::is_mv(a),
            ModelProperty::Chain => a.is_totally_ordered(),
            ModelProperty::Stonean => a.elements().all(|x| a.join(a.neg(x), a.neg(a.neg(x))) == a.top()),
            ModelProperty::Involutive => a.elements().all(|x| a.neg(a.neg(x)) == x),
            ModelProperty::SubdirectlyIrreducible => properties::coatoms(a).len() == 1,
            ModelProperty::SumIrreducible => crate::ordsum::is_sum_irreducible(a),
            ModelProperty::NotTrivial => !a.is_trivial(),
        }
    }
}

impl fmt::Display for ModelProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Clone, Debug)]
pub struct ModelQuery {
    pub min_size: usize,
    pub max_size: usize,
    /// Fragment of the emitted algebras; reducts of the full algebras.
    pub signature: Signature,
    pub properties: Vec<ModelProperty>,
    pub satisfy: Vec<Quasiequation>,
    pub refute: Vec<Quasiequation>,
    /// Permits sizes beyond the configured cap.
    pub allow_large: bool,
}

impl ModelQuery {
    pub fn up_to(max_size: usize) -> ModelQuery {
        ModelQuery {
            min_size: 1,
            max_size,
            signature: Signature::FULL,
            properties: Vec::new(),
            satisfy: Vec::new(),
            refute: Vec::new(),
            allow_large: false,
        }
    }

    pub fn with(mut self, p: ModelProperty) -> ModelQuery {
        self.properties.push(p);
        self
    }

    pub fn sizes(mut self, min: usize, max: usize) -> ModelQuery {
        self.min_size = min;
        self.max_size = max;
        self
    }

    pub fn in_signature(mut self, s: Signature) -> ModelQuery {
        self.signature = s;
        self
    }
}

/// All algebras of each size in the range, in canonical order.
pub fn enumerate_models(q: &ModelQuery, limits: &Limits) -> Result<Vec<FiniteAlgebra>> {
    if q.max_size > limits.max_model_size && !q.allow_large {
        return Err(Error::SizeLimitExceeded { what: "model size", needed: q.max_size, limit: limits.max_model_size });
    }
    if !q.signature.is_well_formed() || !(q.signature.meet && q.signature.mul) {
        return Err(Error::InvalidArgument(
            "model enumeration covers lattice-ordered fragments with a product".into(),
        ));
    }
    let mut out = Vec::new();
    for n in q.min_size.max(1)..=q.max_size {
        let lats = lattices(n);
        let per_lattice = |(li, lat): (usize, &Lattice)| -> Result<Vec<FiniteAlgebra>> {
            let mut keep = Vec::new();
            for a in algebras_on(lat, &format!("M{n}.{}", li + 1)) {
                if !q.properties.iter().all(|p| p.holds(&a)) {
                    continue;
                }
                let a = if q.signature == Signature::FULL { a } else { a.reduct(q.signature)? };
                if accepts(&a, q)? {
                    keep.push(a);
                }
            }
            Ok(keep)
        };
        let parts: Vec<Result<Vec<FiniteAlgebra>>> = if limits.workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(limits.workers).build().expect("thread pool");
            pool.install(|| lats.par_iter().enumerate().map(per_lattice).collect())
        } else {
            lats.iter().enumerate().map(per_lattice).collect()
        };
        for p in parts {
            out.extend(p?);
        }
    }
    Ok(out)
}

fn accepts(a: &FiniteAlgebra, q: &ModelQuery) -> Result<bool> {
    for e in &q.satisfy {
        if !satisfies(a, e)?.holds {
            return Ok(false);
        }
    }
    for e in &q.refute {
        if satisfies(a, e)?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}
