//! Finite algebras in the signature {∧, ∨, ·, →, 0, 1} and its fragments.
//!
//! Elements are dense indices `0..n`. Every algebra carries an implication
//! table; meet, join and product are optional so that hoop, pocrim and BCK
//! fragments share one representation. The partial order is computed once at
//! construction time and stored as a bit matrix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element index.
pub type Elem = usize;

/// Largest carrier that a dense table can hold.
pub const MAX_DENSE_ELEMENTS: usize = u16::MAX as usize;

/// A binary operation of the signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    Meet,
    Join,
    Mul,
    Imp,
}

impl Operation {
    pub const ALL: [Operation; 4] = [Operation::Meet, Operation::Join, Operation::Mul, Operation::Imp];

    pub fn name(self) -> &'static str {
        match self {
            Operation::Meet => "meet",
            Operation::Join => "join",
            Operation::Mul => "mul",
            Operation::Imp => "imp",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Operation::Meet => "&",
            Operation::Join => "|",
            Operation::Mul => "*",
            Operation::Imp => "->",
        }
    }

    pub fn is_commutative(self) -> bool {
        !matches!(self, Operation::Imp)
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which operations and constants are populated. The implication and the
/// constant 1 are always present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub meet: bool,
    pub join: bool,
    pub mul: bool,
    pub bottom: bool,
}

impl Signature {
    /// Bounded residuated lattices: {∧, ∨, ·, →, 0, 1}.
    pub const FULL: Signature = Signature { meet: true, join: true, mul: true, bottom: true };
    /// Residuated lattices without 0.
    pub const LATTICE: Signature = Signature { meet: true, join: true, mul: true, bottom: false };
    /// Bounded hoops: {∧, ·, →, 0, 1}.
    pub const BOUNDED_HOOP: Signature = Signature { meet: true, join: false, mul: true, bottom: true };
    /// Hoops: {∧, ·, →, 1}.
    pub const HOOP: Signature = Signature { meet: true, join: false, mul: true, bottom: false };
    /// Pocrims: {·, →, 1}.
    pub const POCRIM: Signature = Signature { meet: false, join: false, mul: true, bottom: false };
    /// BCK-algebras: {→, 1}.
    pub const BCK: Signature = Signature { meet: false, join: false, mul: false, bottom: false };

    pub fn has(&self, op: Operation) -> bool {
        match op {
            Operation::Meet => self.meet,
            Operation::Join => self.join,
            Operation::Mul => self.mul,
            Operation::Imp => true,
        }
    }

    /// The populated operations in canonical order.
    pub fn operations(&self) -> Vec<Operation> {
        Operation::ALL.into_iter().filter(|op| self.has(*op)).collect()
    }

    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        (!self.meet || other.meet)
            && (!self.join || other.join)
            && (!self.mul || other.mul)
            && (!self.bottom || other.bottom)
    }

    pub fn intersection(&self, other: &Signature) -> Signature {
        Signature {
            meet: self.meet && other.meet,
            join: self.join && other.join,
            mul: self.mul && other.mul,
            bottom: self.bottom && other.bottom,
        }
    }

    pub fn without_bottom(&self) -> Signature {
        Signature { bottom: false, ..*self }
    }

    pub fn with_bottom(&self) -> Signature {
        Signature { bottom: true, ..*self }
    }

    /// A join requires a meet; everything else combines freely.
    pub fn is_well_formed(&self) -> bool {
        !self.join || self.meet
    }

    pub fn fragment_name(&self) -> &'static str {
        match (self.meet, self.join, self.mul, self.bottom) {
            (true, true, true, true) => "bounded residuated lattice",
            (true, true, true, false) => "residuated lattice",
            (true, false, true, true) => "bounded residuated semilattice",
            (true, false, true, false) => "residuated semilattice",
            (false, false, true, _) => "pocrim",
            (false, false, false, _) => "BCK",
            _ => "partial fragment",
        }
    }

    /// Parses a comma separated list of operation names, plus the optional
    /// word `bottom`. Fragment names (`full`, `lattice`, `bounded-hoop`,
    /// `hoop`, `pocrim`, `bck`) are accepted as shorthands.
    pub fn parse(text: &str) -> Result<Signature> {
        match text.trim() {
            "full" => return Ok(Signature::FULL),
            "lattice" => return Ok(Signature::LATTICE),
            "bounded-hoop" => return Ok(Signature::BOUNDED_HOOP),
            "hoop" => return Ok(Signature::HOOP),
            "pocrim" => return Ok(Signature::POCRIM),
            "bck" => return Ok(Signature::BCK),
            _ => {}
        }
        let mut sig = Signature::BCK;
        for word in text.split(',').map(str::trim).filter(|w| !w.is_empty()) {
            match word {
                "meet" => sig.meet = true,
                "join" => sig.join = true,
                "mul" => sig.mul = true,
                "imp" => {}
                "bottom" | "0" => sig.bottom = true,
                other => return Err(Error::Parse(format!("unknown signature item `{other}`"))),
            }
        }
        if !sig.is_well_formed() {
            return Err(Error::Parse("join requires meet".into()));
        }
        Ok(sig)
    }
}

/// A dense n×n operation table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Table {
    n: usize,
    data: Vec<u16>,
}

impl Table {
    pub fn from_fn(n: usize, mut f: impl FnMut(Elem, Elem) -> Elem) -> Table {
        assert!(n <= MAX_DENSE_ELEMENTS, "table too large");
        let mut data = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let v = f(a, b);
                debug_assert!(v < n);
                data.push(v as u16);
            }
        }
        Table { n, data }
    }

    fn from_rows(rows: &[Vec<usize>], n: usize, op: Operation) -> Result<Table> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedTables(format!("{op} table is not {n}x{n}")));
        }
        for (a, row) in rows.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::MalformedTables(format!(
                        "{op}({a},{b}) = {v} is out of range"
                    )));
                }
            }
        }
        Ok(Table::from_fn(n, |a, b| rows[a][b]))
    }

    #[inline]
    pub fn get(&self, a: Elem, b: Elem) -> Elem {
        self.data[a * self.n + b] as Elem
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|a| (0..self.n).map(|b| self.get(a, b)).collect()).collect()
    }
}

/// The named axioms checked by [`FiniteAlgebra::validate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    MeetIdempotent,
    MeetCommutative,
    MeetAssociative,
    OrderAntisymmetric,
    OrderTransitive,
    TopGreatest,
    BottomLeast,
    OrderAgreement,
    JoinIdempotent,
    JoinCommutative,
    JoinAssociative,
    Absorption,
    JoinOrder,
    MulCommutative,
    MulAssociative,
    MulUnit,
    Integrality,
    Residuation,
    BckIdentity,
    BckTop,
    BckUnit,
    BckSuffixing,
    BckExchange,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::MeetIdempotent => "meet idempotence",
            Axiom::MeetCommutative => "meet commutativity",
            Axiom::MeetAssociative => "meet associativity",
            Axiom::OrderAntisymmetric => "order antisymmetry",
            Axiom::OrderTransitive => "order transitivity",
            Axiom::TopGreatest => "top is greatest",
            Axiom::BottomLeast => "bottom is least",
            Axiom::OrderAgreement => "a->b = 1 iff a <= b",
            Axiom::JoinIdempotent => "join idempotence",
            Axiom::JoinCommutative => "join commutativity",
            Axiom::JoinAssociative => "join associativity",
            Axiom::Absorption => "absorption",
            Axiom::JoinOrder => "join induces the order",
            Axiom::MulCommutative => "product commutativity",
            Axiom::MulAssociative => "product associativity",
            Axiom::MulUnit => "top is the product unit",
            Axiom::Integrality => "integrality",
            Axiom::Residuation => "residuation",
            Axiom::BckIdentity => "x->x = 1",
            Axiom::BckTop => "x->1 = 1",
            Axiom::BckUnit => "1->x = x",
            Axiom::BckSuffixing => "(x->y)->((y->z)->(x->z)) = 1",
            Axiom::BckExchange => "x->((x->y)->y) = 1",
        };
        f.write_str(s)
    }
}

/// One violated axiom with the first witnessing tuple found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<Elem>,
}

/// Every violated axiom of a rejected candidate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub name: String,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn find(&self, axiom: Axiom) -> Option<&Violation> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.name)?;
        for (i, v) in self.violations.iter().enumerate() {
            let sep = if i == 0 { " " } else { "; " };
            write!(f, "{sep}{} at {:?}", v.axiom, v.witness)?;
        }
        Ok(())
    }
}

/// The on-disk JSON form of an algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    pub size: usize,
    pub top: usize,
    pub bottom: Option<usize>,
    pub signature: Vec<Operation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meet: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub join: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mul: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imp: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Unvalidated tables, the input of [`FiniteAlgebra::validate`].
#[derive(Clone, Debug)]
pub struct RawAlgebra {
    pub name: String,
    pub size: usize,
    pub top: Elem,
    pub bottom: Option<Elem>,
    pub meet: Option<Table>,
    pub join: Option<Table>,
    pub mul: Option<Table>,
    pub imp: Table,
    pub labels: Option<Vec<String>>,
}

impl RawAlgebra {
    /// Starts a candidate from an implication function.
    pub fn new(name: impl Into<String>, size: usize, top: Elem, imp: impl FnMut(Elem, Elem) -> Elem) -> RawAlgebra {
        RawAlgebra {
            name: name.into(),
            size,
            top,
            bottom: None,
            meet: None,
            join: None,
            mul: None,
            imp: Table::from_fn(size, imp),
            labels: None,
        }
    }

    pub fn bottom(mut self, bottom: Elem) -> Self {
        self.bottom = Some(bottom);
        self
    }

    pub fn meet(mut self, f: impl FnMut(Elem, Elem) -> Elem) -> Self {
        self.meet = Some(Table::from_fn(self.size, f));
        self
    }

    pub fn join(mut self, f: impl FnMut(Elem, Elem) -> Elem) -> Self {
        self.join = Some(Table::from_fn(self.size, f));
        self
    }

    pub fn mul(mut self, f: impl FnMut(Elem, Elem) -> Elem) -> Self {
        self.mul = Some(Table::from_fn(self.size, f));
        self
    }

    pub fn labels<S: Into<String>>(mut self, labels: impl IntoIterator<Item = S>) -> Self {
        self.labels = Some(labels.into_iter().map(Into::into).collect());
        self
    }

    pub fn validate(self) -> Result<FiniteAlgebra> {
        FiniteAlgebra::validate(self)
    }
}

/// A validated finite algebra. Immutable once built.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    top: Elem,
    bottom: Option<Elem>,
    meet: Option<Table>,
    join: Option<Table>,
    mul: Option<Table>,
    imp: Table,
    labels: Option<Vec<String>>,
    leq: Vec<bool>,
}

impl PartialEq for FiniteAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.size == other.size
            && self.top == other.top
            && self.bottom == other.bottom
            && self.meet == other.meet
            && self.join == other.join
            && self.mul == other.mul
            && self.imp == other.imp
            && self.labels == other.labels
    }
}

impl FiniteAlgebra {
    /// Checks every axiom of the populated fragment and returns the algebra,
    /// or a report naming each violated axiom with a witness.
    pub fn validate(raw: RawAlgebra) -> Result<FiniteAlgebra> {
        check_shape(&raw)?;
        let leq = derive_order(&raw);
        let violations = check_axioms(&raw, &leq);
        if !violations.is_empty() {
            return Err(Error::AxiomViolation(ValidationReport { name: raw.name, violations }));
        }
        Ok(FiniteAlgebra::assemble(raw, leq))
    }

    /// Builds an algebra whose axioms are guaranteed by construction
    /// (subalgebras, products, free algebras). Only shape is checked; debug
    /// builds also run full validation on small carriers.
    pub(crate) fn trusted(raw: RawAlgebra) -> FiniteAlgebra {
        check_shape(&raw).expect("trusted construction produced malformed tables");
        let leq = derive_order(&raw);
        if cfg!(debug_assertions) && raw.size <= 24 {
            let violations = check_axioms(&raw, &leq);
            assert!(violations.is_empty(), "trusted construction violates axioms: {violations:?}");
        }
        FiniteAlgebra::assemble(raw, leq)
    }

    fn assemble(raw: RawAlgebra, leq: Vec<bool>) -> FiniteAlgebra {
        FiniteAlgebra {
            name: raw.name,
            size: raw.size,
            top: raw.top,
            bottom: raw.bottom,
            meet: raw.meet,
            join: raw.join,
            mul: raw.mul,
            imp: raw.imp,
            labels: raw.labels,
            leq,
        }
    }

    pub fn from_file(file: &AlgebraFile) -> Result<FiniteAlgebra> {
        let n = file.size;
        if n == 0 {
            return Err(Error::MalformedTables("size must be positive".into()));
        }
        if n > MAX_DENSE_ELEMENTS {
            return Err(Error::MalformedTables(format!("size {n} exceeds {MAX_DENSE_ELEMENTS}")));
        }
        let listed = |op: Operation| file.signature.contains(&op);
        let table = |op: Operation, rows: &Option<Vec<Vec<usize>>>| -> Result<Option<Table>> {
            match (listed(op), rows) {
                (true, Some(rows)) => Ok(Some(Table::from_rows(rows, n, op)?)),
                (true, None) => Err(Error::MalformedTables(format!("signature lists {op} but no table is given"))),
                (false, Some(_)) => Err(Error::MalformedTables(format!("{op} table given but not listed in signature"))),
                (false, None) => Ok(None),
            }
        };
        let imp = table(Operation::Imp, &file.imp)?
            .ok_or_else(|| Error::MalformedTables("the imp table is required".into()))?;
        let raw = RawAlgebra {
            name: file.name.clone(),
            size: n,
            top: file.top,
            bottom: file.bottom,
            meet: table(Operation::Meet, &file.meet)?,
            join: table(Operation::Join, &file.join)?,
            mul: table(Operation::Mul, &file.mul)?,
            imp,
            labels: file.labels.clone(),
        };
        FiniteAlgebra::validate(raw)
    }

    pub fn to_file(&self) -> AlgebraFile {
        AlgebraFile {
            name: self.name.clone(),
            size: self.size,
            top: self.top,
            bottom: self.bottom,
            signature: self.signature().operations(),
            meet: self.meet.as_ref().map(Table::rows),
            join: self.join.as_ref().map(Table::rows),
            mul: self.mul.as_ref().map(Table::rows),
            imp: Some(self.imp.rows()),
            labels: self.labels.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<FiniteAlgebra> {
        let file: AlgebraFile = serde_json::from_str(text)?;
        FiniteAlgebra::from_file(&file)
    }

    /// Serializes with one table row per line.
    pub fn to_json(&self) -> String {
        let file = self.to_file();
        let mut out = String::from("{\n");
        let q = |s: &str| serde_json::to_string(s).expect("string serialization");
        out.push_str(&format!("  \"name\": {},\n", q(&file.name)));
        out.push_str(&format!("  \"size\": {},\n", file.size));
        out.push_str(&format!("  \"top\": {},\n", file.top));
        match file.bottom {
            Some(b) => out.push_str(&format!("  \"bottom\": {b},\n")),
            None => out.push_str("  \"bottom\": null,\n"),
        }
        let sig: Vec<String> = file.signature.iter().map(|op| q(op.name())).collect();
        out.push_str(&format!("  \"signature\": [{}]", sig.join(", ")));
        for (op, rows) in [
            (Operation::Meet, &file.meet),
            (Operation::Join, &file.join),
            (Operation::Mul, &file.mul),
            (Operation::Imp, &file.imp),
        ] {
            if let Some(rows) = rows {
                out.push_str(&format!(",\n  \"{}\": [\n", op.name()));
                let lines: Vec<String> = rows
                    .iter()
                    .map(|r| {
                        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                        format!("    [{}]", cells.join(", "))
                    })
                    .collect();
                out.push_str(&lines.join(",\n"));
                out.push_str("\n  ]");
            }
        }
        if let Some(labels) = &file.labels {
            let ls: Vec<String> = labels.iter().map(|l| q(l)).collect();
            out.push_str(&format!(",\n  \"labels\": [{}]", ls.join(", ")));
        }
        out.push_str("\n}\n");
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn bottom(&self) -> Option<Elem> {
        self.bottom
    }

    pub fn is_bounded(&self) -> bool {
        self.bottom.is_some()
    }

    pub fn is_trivial(&self) -> bool {
        self.size == 1
    }

    pub fn signature(&self) -> Signature {
        Signature {
            meet: self.meet.is_some(),
            join: self.join.is_some(),
            mul: self.mul.is_some(),
            bottom: self.bottom.is_some(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, a: Elem) -> String {
        match &self.labels {
            Some(ls) => ls[a].clone(),
            None => a.to_string(),
        }
    }

    /// Resolves an element by label, falling back to a numeric index.
    pub fn element_by_label(&self, text: &str) -> Option<Elem> {
        let text = text.trim();
        if let Some(ls) = &self.labels {
            if let Some(i) = ls.iter().position(|l| l == text) {
                return Some(i);
            }
        }
        text.parse::<usize>().ok().filter(|&i| i < self.size)
    }

    pub fn table(&self, op: Operation) -> Option<&Table> {
        match op {
            Operation::Meet => self.meet.as_ref(),
            Operation::Join => self.join.as_ref(),
            Operation::Mul => self.mul.as_ref(),
            Operation::Imp => Some(&self.imp),
        }
    }

    /// Applies `op`; panics if the operation is not in the signature.
    #[inline]
    pub fn op(&self, op: Operation, a: Elem, b: Elem) -> Elem {
        match op {
            Operation::Meet => self.meet(a, b),
            Operation::Join => self.join(a, b),
            Operation::Mul => self.mul(a, b),
            Operation::Imp => self.imp(a, b),
        }
    }

    #[inline]
    pub fn imp(&self, a: Elem, b: Elem) -> Elem {
        self.imp.get(a, b)
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul.as_ref().expect("algebra has no product").get(a, b)
    }

    /// Meet from the table, or the greatest lower bound of the order when
    /// the fragment has none.
    #[inline]
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        match &self.meet {
            Some(t) => t.get(a, b),
            None => self.glb(a, b).expect("meet does not exist in this order"),
        }
    }

    /// Join from the table, or the least upper bound of the order when the
    /// fragment has none.
    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        match &self.join {
            Some(t) => t.get(a, b),
            None => self.lub(a, b).expect("join does not exist in this order"),
        }
    }

    /// ¬a = a → 0. Panics on unbounded algebras.
    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.imp(a, self.bottom.expect("negation needs a bottom"))
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a * self.size + b]
    }

    #[inline]
    pub fn lt(&self, a: Elem, b: Elem) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: Elem, b: Elem) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// a^k with a^0 = 1.
    pub fn pow(&self, a: Elem, k: usize) -> Elem {
        (0..k).fold(self.top, |acc, _| self.mul(acc, a))
    }

    /// The least element of the order, if there is one.
    pub fn least(&self) -> Option<Elem> {
        self.bottom.or_else(|| self.elements().find(|&a| self.elements().all(|b| self.leq(a, b))))
    }

    pub fn lub(&self, a: Elem, b: Elem) -> Option<Elem> {
        let ups: Vec<Elem> = self.elements().filter(|&c| self.leq(a, c) && self.leq(b, c)).collect();
        ups.iter().copied().find(|&c| ups.iter().all(|&d| self.leq(c, d)))
    }

    pub fn glb(&self, a: Elem, b: Elem) -> Option<Elem> {
        let downs: Vec<Elem> = self.elements().filter(|&c| self.leq(c, a) && self.leq(c, b)).collect();
        downs.iter().copied().find(|&c| downs.iter().all(|&d| self.leq(d, c)))
    }

    pub fn is_totally_ordered(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.comparable(a, b)))
    }

    /// The upper covers of `a`.
    pub fn upper_covers(&self, a: Elem) -> Vec<Elem> {
        self.elements()
            .filter(|&b| self.lt(a, b) && !self.elements().any(|c| self.lt(a, c) && self.lt(c, b)))
            .collect()
    }

    pub fn lower_covers(&self, a: Elem) -> Vec<Elem> {
        self.elements()
            .filter(|&b| self.lt(b, a) && !self.elements().any(|c| self.lt(b, c) && self.lt(c, a)))
            .collect()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> FiniteAlgebra {
        self.name = name.into();
        self
    }

    pub fn with_labels(mut self, labels: Option<Vec<String>>) -> FiniteAlgebra {
        if let Some(ls) = &labels {
            assert_eq!(ls.len(), self.size, "label count must match the carrier");
        }
        self.labels = labels;
        self
    }

    /// Restricts to a smaller signature on the same carrier.
    pub fn reduct(&self, target: Signature) -> Result<FiniteAlgebra> {
        if !target.is_subsignature_of(&self.signature()) {
            return Err(Error::SignatureNotShrinking(self.name.clone()));
        }
        if !target.is_well_formed() {
            return Err(Error::SignatureMismatch("join requires meet".into()));
        }
        let raw = RawAlgebra {
            name: self.name.clone(),
            size: self.size,
            top: self.top,
            bottom: if target.bottom { self.bottom } else { None },
            meet: if target.meet { self.meet.clone() } else { None },
            join: if target.join { self.join.clone() } else { None },
            mul: if target.mul { self.mul.clone() } else { None },
            imp: self.imp.clone(),
            labels: self.labels.clone(),
        };
        Ok(FiniteAlgebra::trusted(raw))
    }

    /// The 0-free reduct.
    pub fn zero_free(&self) -> FiniteAlgebra {
        self.reduct(self.signature().without_bottom()).expect("dropping 0 always shrinks")
    }

    /// Adds the least element as the constant 0.
    pub fn with_bottom(&self) -> Result<FiniteAlgebra> {
        if self.bottom.is_some() {
            return Ok(self.clone());
        }
        let least = self
            .least()
            .ok_or_else(|| Error::InvalidArgument(format!("{} has no least element", self.name)))?;
        let mut out = self.clone();
        out.bottom = Some(least);
        Ok(out)
    }

    /// Raw copy of the tables, for constructions that rebuild variants.
    pub fn to_raw(&self) -> RawAlgebra {
        RawAlgebra {
            name: self.name.clone(),
            size: self.size,
            top: self.top,
            bottom: self.bottom,
            meet: self.meet.clone(),
            join: self.join.clone(),
            mul: self.mul.clone(),
            imp: self.imp.clone(),
            labels: self.labels.clone(),
        }
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} elements, {})", self.name, self.size, self.signature().fragment_name())
    }
}

fn check_shape(raw: &RawAlgebra) -> Result<()> {
    let n = raw.size;
    if n == 0 {
        return Err(Error::MalformedTables("size must be positive".into()));
    }
    if raw.top >= n {
        return Err(Error::MalformedTables(format!("top {} is out of range", raw.top)));
    }
    if let Some(b) = raw.bottom {
        if b >= n {
            return Err(Error::MalformedTables(format!("bottom {b} is out of range")));
        }
    }
    if raw.join.is_some() && raw.meet.is_none() {
        return Err(Error::MalformedTables("a join table requires a meet table".into()));
    }
    for (op, t) in [
        (Operation::Meet, raw.meet.as_ref()),
        (Operation::Join, raw.join.as_ref()),
        (Operation::Mul, raw.mul.as_ref()),
        (Operation::Imp, Some(&raw.imp)),
    ] {
        if let Some(t) = t {
            if t.size() != n {
                return Err(Error::MalformedTables(format!("{op} table has the wrong dimension")));
            }
        }
    }
    if let Some(ls) = &raw.labels {
        if ls.len() != n {
            return Err(Error::MalformedTables(format!("{} labels for {n} elements", ls.len())));
        }
    }
    Ok(())
}

fn derive_order(raw: &RawAlgebra) -> Vec<bool> {
    let n = raw.size;
    let mut leq = vec![false; n * n];
    for a in 0..n {
        for b in 0..n {
            leq[a * n + b] = match &raw.meet {
                Some(m) => m.get(a, b) == a,
                None => raw.imp.get(a, b) == raw.top,
            };
        }
    }
    leq
}

fn check_axioms(raw: &RawAlgebra, leq: &[bool]) -> Vec<Violation> {
    let n = raw.size;
    let le = |a: Elem, b: Elem| leq[a * n + b];
    let mut out = Vec::new();
    let mut record = |axiom: Axiom, witness: Option<Vec<Elem>>| {
        if let Some(witness) = witness {
            out.push(Violation { axiom, witness });
        }
    };
    let pairs = || (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)));
    let triples = || (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))));

    if let Some(m) = &raw.meet {
        record(Axiom::MeetIdempotent, (0..n).find(|&a| m.get(a, a) != a).map(|a| vec![a]));
        record(
            Axiom::MeetCommutative,
            pairs().find(|&(a, b)| m.get(a, b) != m.get(b, a)).map(|(a, b)| vec![a, b]),
        );
        record(
            Axiom::MeetAssociative,
            triples()
                .find(|&(a, b, c)| m.get(m.get(a, b), c) != m.get(a, m.get(b, c)))
                .map(|(a, b, c)| vec![a, b, c]),
        );
    }
    record(
        Axiom::OrderAntisymmetric,
        pairs().find(|&(a, b)| a != b && le(a, b) && le(b, a)).map(|(a, b)| vec![a, b]),
    );
    record(
        Axiom::OrderTransitive,
        triples()
            .find(|&(a, b, c)| le(a, b) && le(b, c) && !le(a, c))
            .map(|(a, b, c)| vec![a, b, c]),
    );
    record(Axiom::TopGreatest, (0..n).find(|&a| !le(a, raw.top)).map(|a| vec![a]));
    if let Some(z) = raw.bottom {
        record(Axiom::BottomLeast, (0..n).find(|&a| !le(z, a)).map(|a| vec![a]));
    }
    if raw.meet.is_some() {
        record(
            Axiom::OrderAgreement,
            pairs()
                .find(|&(a, b)| (raw.imp.get(a, b) == raw.top) != le(a, b))
                .map(|(a, b)| vec![a, b]),
        );
    }
    if let (Some(j), Some(m)) = (&raw.join, &raw.meet) {
        record(Axiom::JoinIdempotent, (0..n).find(|&a| j.get(a, a) != a).map(|a| vec![a]));
        record(
            Axiom::JoinCommutative,
            pairs().find(|&(a, b)| j.get(a, b) != j.get(b, a)).map(|(a, b)| vec![a, b]),
        );
        record(
            Axiom::JoinAssociative,
            triples()
                .find(|&(a, b, c)| j.get(j.get(a, b), c) != j.get(a, j.get(b, c)))
                .map(|(a, b, c)| vec![a, b, c]),
        );
        record(
            Axiom::Absorption,
            pairs()
                .find(|&(a, b)| m.get(a, j.get(a, b)) != a || j.get(a, m.get(a, b)) != a)
                .map(|(a, b)| vec![a, b]),
        );
        record(
            Axiom::JoinOrder,
            pairs().find(|&(a, b)| (j.get(a, b) == b) != le(a, b)).map(|(a, b)| vec![a, b]),
        );
    }
    if let Some(p) = &raw.mul {
        record(
            Axiom::MulCommutative,
            pairs().find(|&(a, b)| p.get(a, b) != p.get(b, a)).map(|(a, b)| vec![a, b]),
        );
        record(
            Axiom::MulAssociative,
            triples()
                .find(|&(a, b, c)| p.get(p.get(a, b), c) != p.get(a, p.get(b, c)))
                .map(|(a, b, c)| vec![a, b, c]),
        );
        record(Axiom::MulUnit, (0..n).find(|&a| p.get(raw.top, a) != a).map(|a| vec![a]));
        record(
            Axiom::Integrality,
            pairs().find(|&(a, b)| !le(p.get(a, b), a)).map(|(a, b)| vec![a, b]),
        );
        record(
            Axiom::Residuation,
            triples()
                .find(|&(a, b, c)| le(p.get(a, b), c) != le(a, raw.imp.get(b, c)))
                .map(|(a, b, c)| vec![a, b, c]),
        );
    } else {
        let i = |a: Elem, b: Elem| raw.imp.get(a, b);
        let t = raw.top;
        record(Axiom::BckIdentity, (0..n).find(|&a| i(a, a) != t).map(|a| vec![a]));
        record(Axiom::BckTop, (0..n).find(|&a| i(a, t) != t).map(|a| vec![a]));
        record(Axiom::BckUnit, (0..n).find(|&a| i(t, a) != a).map(|a| vec![a]));
        record(
            Axiom::BckSuffixing,
            triples()
                .find(|&(a, b, c)| i(i(a, b), i(i(b, c), i(a, c))) != t)
                .map(|(a, b, c)| vec![a, b, c]),
        );
        record(
            Axiom::BckExchange,
            pairs().find(|&(a, b)| i(a, i(i(a, b), b)) != t).map(|(a, b)| vec![a, b]),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> RawAlgebra {
        RawAlgebra::new("2", 2, 1, |a, b| if a <= b { 1 } else { b })
            .bottom(0)
            .meet(|a, b| a.min(b))
            .join(|a, b| a.max(b))
            .mul(|a, b| a.min(b))
    }

    #[test]
    fn two_element_boolean_algebra_validates() {
        let a = two().validate().unwrap();
        assert_eq!(a.size(), 2);
        assert!(a.leq(0, 1) && !a.leq(1, 0));
        assert_eq!(a.signature(), Signature::FULL);
    }

    #[test]
    fn four_element_boolean_algebra_validates() {
        // elements 0=00, a=01, b=10, 1=11
        let b4 = RawAlgebra::new("4", 4, 3, |x, y| (!x | y) & 3)
            .bottom(0)
            .meet(|x, y| x & y)
            .join(|x, y| x | y)
            .mul(|x, y| x & y)
            .validate()
            .unwrap();
        // exhaustive residuation over all 64 triples
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert_eq!(b4.leq(b4.mul(a, b), c), b4.leq(a, b4.imp(b, c)));
                }
            }
        }
        assert_eq!(b4.mul(1, 2), 0);
        assert_eq!(b4.join(1, 2), 3);
    }

    #[test]
    fn broken_residual_reports_witness() {
        // 3-chain with min as product, but m -> 0 set to 1
        let raw = RawAlgebra::new("bad", 3, 2, |a, b| if a <= b || (a, b) == (1, 0) { 2 } else { b })
            .bottom(0)
            .meet(|a, b| a.min(b))
            .join(|a, b| a.max(b))
            .mul(|a, b| a.min(b));
        match raw.validate() {
            Err(Error::AxiomViolation(report)) => {
                let v = report.find(Axiom::Residuation).expect("residuation must fail");
                assert_eq!(v.witness, vec![1, 1, 0]);
            }
            other => panic!("expected an axiom violation, got {other:?}"),
        }
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let file = AlgebraFile {
            name: "x".into(),
            size: 2,
            top: 1,
            bottom: Some(0),
            signature: vec![Operation::Imp],
            meet: None,
            join: None,
            mul: None,
            imp: Some(vec![vec![1, 1], vec![0, 7]]),
            labels: None,
        };
        assert!(matches!(FiniteAlgebra::from_file(&file), Err(Error::MalformedTables(_))));
        let short = AlgebraFile { imp: Some(vec![vec![1, 1]]), ..file };
        assert!(matches!(FiniteAlgebra::from_file(&short), Err(Error::MalformedTables(_))));
    }

    #[test]
    fn trivial_algebra_is_valid() {
        let t = RawAlgebra::new("1", 1, 0, |_, _| 0)
            .bottom(0)
            .meet(|_, _| 0)
            .join(|_, _| 0)
            .mul(|_, _| 0)
            .validate()
            .unwrap();
        assert!(t.is_trivial());
    }

    #[test]
    fn bck_fragment_orders_by_implication() {
        let g3 = RawAlgebra::new("G3", 3, 2, |a, b| if a <= b { 2 } else { b }).validate().unwrap();
        assert_eq!(g3.signature(), Signature::BCK);
        assert!(g3.leq(0, 1) && g3.leq(1, 2) && !g3.leq(2, 1));
        assert_eq!(g3.meet(0, 1), 0);
    }

    #[test]
    fn json_round_trip_is_identical() {
        let a = two().labels(["0", "1"]).validate().unwrap();
        let text = a.to_json();
        let b = FiniteAlgebra::from_json(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(text, b.to_json());
    }

    #[test]
    fn reduct_needs_a_smaller_signature() {
        let a = two().validate().unwrap();
        let hoop = a.reduct(Signature::HOOP).unwrap();
        assert_eq!(hoop.signature(), Signature::HOOP);
        assert!(matches!(hoop.reduct(Signature::FULL), Err(Error::SignatureNotShrinking(_))));
    }
}
