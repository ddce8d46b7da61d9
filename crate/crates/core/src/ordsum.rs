//! Ordinal sums: construction, node splitting and decomposition.
//!
//! In `L ⊕ U` the non-top elements of `L` sit below every element of `U`,
//! and the two tops are identified. Across the two blocks the product and
//! the meet are the lower argument, `a → b = 1` for `a` below and `b` above,
//! and `b → a = a`. A join of two lower elements that reaches the top of `L`
//! is replaced by the least element of `U`.

use serde::Serialize;

use crate::algebra::{Elem, FiniteAlgebra, Operation, RawAlgebra, Table};
use crate::error::{Error, Result};
use crate::properties;

/// Which block of a sum an element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Block {
    Lower(Elem),
    Upper(Elem),
    Top,
}

struct Layout {
    blocks: Vec<Block>,
    lower: Vec<Elem>,
    upper: Vec<Elem>,
}

impl Layout {
    fn new(l: &FiniteAlgebra, u: &FiniteAlgebra) -> Layout {
        let n = l.size() + u.size() - 1;
        let top = n - 1;
        let mut blocks = Vec::with_capacity(n);
        let mut lower = vec![top; l.size()];
        let mut upper = vec![top; u.size()];
        for x in l.elements().filter(|&x| x != l.top()) {
            lower[x] = blocks.len();
            blocks.push(Block::Lower(x));
        }
        for y in u.elements().filter(|&y| y != u.top()) {
            upper[y] = blocks.len();
            blocks.push(Block::Upper(y));
        }
        blocks.push(Block::Top);
        Layout { blocks, lower, upper }
    }
}

fn disambiguate(taken: &[String], label: &str) -> String {
    if !taken.iter().any(|t| t == label) {
        return label.to_string();
    }
    (2..)
        .map(|k| format!("{label}_{k}"))
        .find(|cand| !taken.iter().any(|t| t == cand))
        .expect("some suffix is free")
}

/// `lower ⊕ upper`. The upper summand is used as its 0-free reduct; the
/// result is bounded exactly when `lower` is. A trivial summand on either
/// side is a unit.
pub fn ordinal_sum(lower: &FiniteAlgebra, upper: &FiniteAlgebra) -> Result<FiniteAlgebra> {
    ordinal_sum_at(lower, upper, 0)
}

fn ordinal_sum_at(l: &FiniteAlgebra, u: &FiniteAlgebra, junction: usize) -> Result<FiniteAlgebra> {
    let lsig = l.signature();
    let usig = u.signature().without_bottom();
    let mut sig = lsig.intersection(&usig);
    sig.bottom = lsig.bottom;
    let u_least = u.least();
    if lsig.join && !properties::top_join_irreducible(l) && u_least.is_none() {
        return Err(Error::SumDoesNotExist { junction });
    }
    let lay = Layout::new(l, u);
    let n = lay.blocks.len();
    let top = n - 1;
    let blocks = &lay.blocks;
    let lift_l = |x: Elem| lay.lower[x];
    let lift_u = |y: Elem| lay.upper[y];
    let as_l = |p: Elem| match blocks[p] {
        Block::Lower(x) => Some(x),
        Block::Top => Some(l.top()),
        Block::Upper(_) => None,
    };
    let as_u = |p: Elem| match blocks[p] {
        Block::Upper(y) => Some(y),
        Block::Top => Some(u.top()),
        Block::Lower(_) => None,
    };
    let is_lower = |p: Elem| matches!(blocks[p], Block::Lower(_));

    let op = |o: Operation, p: Elem, q: Elem| -> Elem {
        // the shared top counts as a lower element here
        if let (Some(x), Some(y)) = (as_l(p), as_l(q)) {
            let r = l.op(o, x, y);
            if o == Operation::Join && r == l.top() && x != l.top() && y != l.top() {
                return u_least.map_or(top, lift_u);
            }
            return lift_l(r);
        }
        if let (Some(x), Some(y)) = (as_u(p), as_u(q)) {
            return lift_u(u.op(o, x, y));
        }
        // one argument strictly below, the other strictly above
        let (lo, hi) = if is_lower(p) { (p, q) } else { (q, p) };
        match o {
            Operation::Meet | Operation::Mul => lo,
            Operation::Join => hi,
            Operation::Imp => {
                if is_lower(p) {
                    top
                } else {
                    q
                }
            }
        }
    };

    let table = |o: Operation| Table::from_fn(n, |p, q| op(o, p, q));
    let mut labels: Vec<String> = Vec::with_capacity(n);
    for b in blocks {
        let name = match *b {
            Block::Lower(x) => l.label(x),
            Block::Upper(y) => u.label(y),
            Block::Top => l.label(l.top()),
        };
        let name = disambiguate(&labels, &name);
        labels.push(name);
    }
    let raw = RawAlgebra {
        name: format!("ordsum({},{})", l.name(), u.name()),
        size: n,
        top,
        // a trivial lower summand leaves only the shared top, so 0 moves up
        bottom: sig.bottom.then(|| {
            if l.is_trivial() {
                u_least.map_or(top, lift_u)
            } else {
                lift_l(l.bottom().expect("bounded lower"))
            }
        }),
        meet: sig.meet.then(|| table(Operation::Meet)),
        join: sig.join.then(|| table(Operation::Join)),
        mul: sig.mul.then(|| table(Operation::Mul)),
        imp: table(Operation::Imp),
        labels: Some(labels),
    };
    FiniteAlgebra::validate(raw)
}

/// Left fold of [`ordinal_sum`]. A failing junction `j` sits between
/// components `j` and `j + 1`.
pub fn ordinal_sum_family(components: &[FiniteAlgebra]) -> Result<FiniteAlgebra> {
    let (first, rest) = components
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("ordinal sum of an empty family".into()))?;
    let mut acc = first.clone();
    for (j, c) in rest.iter().enumerate() {
        acc = ordinal_sum_at(&acc, c, j)?;
    }
    Ok(acc)
}

/// Restricts `a` to `elems` (listed in the order they should receive),
/// with `top` as the top. Operations whose value falls outside the subset
/// are redirected through `fix`.
fn restrict(
    a: &FiniteAlgebra,
    name: String,
    elems: &[Elem],
    bottom: Option<Elem>,
    fix: impl Fn(Operation, Elem) -> Elem,
) -> Result<FiniteAlgebra> {
    let mut index = vec![usize::MAX; a.size()];
    for (i, &e) in elems.iter().enumerate() {
        index[e] = i;
    }
    let n = elems.len();
    let sig = a.signature();
    let table = |o: Operation| {
        Table::from_fn(n, |i, j| {
            let r = fix(o, a.op(o, elems[i], elems[j]));
            let k = index[r];
            assert!(k != usize::MAX, "restriction is not closed");
            k
        })
    };
    let raw = RawAlgebra {
        name,
        size: n,
        top: index[a.top()],
        bottom: bottom.map(|b| index[b]),
        meet: sig.meet.then(|| table(Operation::Meet)),
        join: sig.join.then(|| table(Operation::Join)),
        mul: sig.mul.then(|| table(Operation::Mul)),
        imp: table(Operation::Imp),
        labels: Some(elems.iter().map(|&e| a.label(e)).collect()),
    };
    FiniteAlgebra::validate(raw)
}

/// The blocks `(A∖↑s) ∪ {1}` and `↑s` if `s` splits `a` as an ordinal sum.
fn split_blocks(a: &FiniteAlgebra, s: Elem) -> Option<(Vec<Elem>, Vec<Elem>)> {
    if s == a.top() || Some(s) == a.least() {
        return None;
    }
    if !a.elements().all(|x| a.comparable(x, s)) {
        return None;
    }
    let below: Vec<Elem> = a.elements().filter(|&x| a.lt(x, s)).collect();
    let above: Vec<Elem> = a.elements().filter(|&x| a.leq(s, x)).collect();
    if below.is_empty() {
        return None;
    }
    let sig = a.signature();
    let in_below = |x: Elem| a.lt(x, s);
    let top = a.top();
    for &x in &below {
        for &y in &above {
            if y == top {
                continue;
            }
            if sig.mul && (a.mul(x, y) != x) {
                return None;
            }
            if a.imp(y, x) != x || a.imp(x, y) != top {
                return None;
            }
        }
        for &y in &below {
            let i = a.imp(x, y);
            if !(in_below(i) || i == top) {
                return None;
            }
            if sig.mul && !(in_below(a.mul(x, y))) {
                return None;
            }
            if sig.join {
                let j = a.join(x, y);
                if !(in_below(j) || j == s) {
                    return None;
                }
            }
        }
    }
    for &x in &above {
        for &y in &above {
            if sig.mul && !a.leq(s, a.mul(x, y)) {
                return None;
            }
        }
    }
    Some((below, above))
}

/// Splits at `s` without the Heyting precondition. The lower part keeps the
/// bottom, the upper part is 0-free.
fn split_at(a: &FiniteAlgebra, s: Elem) -> Option<(FiniteAlgebra, Vec<Elem>, FiniteAlgebra, Vec<Elem>)> {
    let (mut below, above) = split_blocks(a, s)?;
    below.push(a.top());
    let top = a.top();
    let lower = restrict(a, format!("{}|<{}", a.name(), a.label(s)), &below, a.bottom(), |o, r| {
        if o == Operation::Join && r == s {
            top
        } else {
            r
        }
    })
    .ok()?;
    let upper = restrict(a, format!("{}|>={}", a.name(), a.label(s)), &above, None, |_, r| r).ok()?;
    // the split must reassemble to exactly `a`
    let back = ordinal_sum(&lower, &upper).ok()?;
    let mut embed = Vec::with_capacity(back.size());
    embed.extend(below.iter().take(below.len() - 1).copied());
    embed.extend(above.iter().copied().filter(|&x| x != top));
    embed.push(top);
    for o in a.signature().operations() {
        for p in back.elements() {
            for q in back.elements() {
                if embed[back.op(o, p, q)] != a.op(o, embed[p], embed[q]) {
                    return None;
                }
            }
        }
    }
    Some((lower, below, upper, above))
}

/// `A = A_s ⊕ A^s` for a node `s` of a finite Heyting algebra.
pub fn node_split(a: &FiniteAlgebra, s: Elem) -> Result<(FiniteAlgebra, FiniteAlgebra)> {
    if !properties::is_heyting(a) {
        return Err(Error::NotHeyting(a.name().to_string()));
    }
    if s >= a.size() {
        return Err(Error::InvalidArgument(format!("element {s} is out of range")));
    }
    if !a.elements().all(|x| a.comparable(x, s)) {
        return Err(Error::NotANode(a.label(s)));
    }
    if s == a.top() || Some(s) == a.bottom() {
        return Err(Error::InvalidArgument("split point must differ from 0 and 1".into()));
    }
    let (lower, _, upper, _) = split_at(a, s)
        .ok_or_else(|| Error::Inconsistent(format!("node {} of a Heyting algebra does not split", a.label(s))))?;
    Ok((lower, upper))
}

/// Sum-irreducible components listed bottom-up, with the map of each
/// component's elements into the decomposed algebra.
#[derive(Clone, Debug, Serialize)]
pub struct SumDecomposition {
    #[serde(skip)]
    pub components: Vec<FiniteAlgebra>,
    pub embeddings: Vec<Vec<Elem>>,
}

impl SumDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(FiniteAlgebra::size).collect()
    }

    /// Sums the components back up.
    pub fn reassemble(&self) -> Result<FiniteAlgebra> {
        ordinal_sum_family(&self.components)
    }
}

/// The first split point in index order, if any.
pub fn first_split_point(a: &FiniteAlgebra) -> Option<Elem> {
    a.elements().find(|&s| split_at(a, s).is_some())
}

pub fn decompose(a: &FiniteAlgebra) -> SumDecomposition {
    let identity: Vec<Elem> = a.elements().collect();
    let mut out = SumDecomposition { components: Vec::new(), embeddings: Vec::new() };
    decompose_into(a, &identity, &mut out);
    for (i, c) in out.components.iter_mut().enumerate() {
        *c = c.clone().with_name(format!("{}[{i}]", a.name()));
    }
    out
}

fn decompose_into(a: &FiniteAlgebra, embed: &[Elem], out: &mut SumDecomposition) {
    let split = a.elements().find_map(|s| split_at(a, s));
    match split {
        None => {
            out.components.push(a.clone());
            out.embeddings.push(embed.to_vec());
        }
        Some((lower, below, upper, above)) => {
            let lower_embed: Vec<Elem> = below.iter().map(|&x| embed[x]).collect();
            let upper_embed: Vec<Elem> = above.iter().map(|&x| embed[x]).collect();
            decompose_into(&lower, &lower_embed, out);
            decompose_into(&upper, &upper_embed, out);
        }
    }
}

pub fn is_sum_irreducible(a: &FiniteAlgebra) -> bool {
    first_split_point(a).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{satisfies, Quasiequation};

    fn two() -> FiniteAlgebra {
        RawAlgebra::new("B2", 2, 1, |a, b| if a <= b { 1 } else { b })
            .bottom(0)
            .meet(|a, b| a.min(b))
            .join(|a, b| a.max(b))
            .mul(|a, b| a.min(b))
            .labels(["0", "1"])
            .validate()
            .unwrap()
    }

    fn b4() -> FiniteAlgebra {
        RawAlgebra::new("B4", 4, 3, |x, y| (!x | y) & 3)
            .bottom(0)
            .meet(|x, y| x & y)
            .join(|x, y| x | y)
            .mul(|x, y| x & y)
            .labels(["0", "a", "b", "1"])
            .validate()
            .unwrap()
    }

    #[test]
    fn two_plus_two_is_a_three_chain() {
        let s = ordinal_sum(&two(), &two()).unwrap();
        assert_eq!(s.size(), 3);
        assert!(s.is_totally_ordered());
        assert_eq!(s.mul(1, 1), 1);
        assert_eq!(s.imp(1, 0), 0);
        assert_eq!(s.bottom(), Some(0));
    }

    #[test]
    fn boolean_four_plus_two() {
        let s = ordinal_sum(&b4(), &two()).unwrap();
        assert_eq!(s.labels().unwrap(), &["0", "a", "b", "0_2", "1"]);
        assert_eq!(s.join(1, 2), 3);
        let prelin = Quasiequation::parse("(x -> y) | (y -> x)").unwrap();
        let sat = satisfies(&s, &prelin).unwrap();
        assert_eq!(sat.counterexample, Some(vec![1, 2]));
        let d = decompose(&s);
        assert_eq!(d.sizes(), vec![4, 2]);
    }

    #[test]
    fn trivial_upper_is_identity() {
        let t = RawAlgebra::new("1", 1, 0, |_, _| 0).meet(|_, _| 0).join(|_, _| 0).mul(|_, _| 0).validate().unwrap();
        let s = ordinal_sum(&b4(), &t).unwrap();
        assert_eq!(s.to_file().imp, b4().to_file().imp);
    }

    #[test]
    fn family_and_decomposition() {
        let g4 = ordinal_sum_family(&[two(), two(), two()]).unwrap();
        assert_eq!(g4.size(), 4);
        assert!(g4.is_totally_ordered());
        let d = decompose(&g4);
        assert_eq!(d.sizes(), vec![2, 2, 2]);
        assert!(d.components[0].is_bounded());
        assert!(!d.components[1].is_bounded() && !d.components[2].is_bounded());
        let h = ordinal_sum_family(&[two(), b4(), two()]).unwrap();
        assert_eq!(h.size(), 6);
        assert_eq!(decompose(&h).sizes(), vec![2, 4, 2]);
        assert!(is_sum_irreducible(&b4()));
        assert!(is_sum_irreducible(&two()));
        assert!(!is_sum_irreducible(&g4));
    }

    #[test]
    fn node_split_examples() {
        let g3 = ordinal_sum(&two(), &two()).unwrap();
        let (l, u) = node_split(&g3, 1).unwrap();
        assert_eq!((l.size(), u.size()), (2, 2));
        assert!(matches!(node_split(&b4(), 1), Err(Error::NotANode(_))));
    }

    #[test]
    fn embeddings_map_tops_to_top() {
        let h = ordinal_sum_family(&[two(), b4(), two()]).unwrap();
        let d = decompose(&h);
        for (c, e) in d.components.iter().zip(&d.embeddings) {
            assert_eq!(e[c.top()], h.top());
        }
    }
}
