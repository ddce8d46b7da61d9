//! Terms, equations and quasiequations over {∧, ∨, ·, →, 0, 1}.
//!
//! Concrete syntax: variables `x y z w u v` (indices 0..5) or `xN`;
//! constants `0` and `1`; infix `&`/`∧`, `|`/`∨`, `*`/`·`, `->`/`→`; prefix
//! `~`/`¬` for negation (`~t` is `t -> 0`). Different binary operators may not
//! be mixed without parentheses. `->` associates to the right. An equation is
//! `s = t` (or `s ≈ t`); a bare term `t` stands for `t = 1`. A quasiequation is
//! `s1 = t1, s2 = t2 => s = t`.

use std::fmt;

use crate::algebra::{Elem, FiniteAlgebra, Operation};
use crate::error::{Error, Result};

const NAMED_VARS: [&str; 6] = ["x", "y", "z", "w", "u", "v"];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Zero,
    One,
    Bin(Operation, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn bin(op: Operation, a: Term, b: Term) -> Term {
        Term::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn meet(self, other: Term) -> Term {
        Term::bin(Operation::Meet, self, other)
    }

    pub fn join(self, other: Term) -> Term {
        Term::bin(Operation::Join, self, other)
    }

    pub fn mul(self, other: Term) -> Term {
        Term::bin(Operation::Mul, self, other)
    }

    pub fn imp(self, other: Term) -> Term {
        Term::bin(Operation::Imp, self, other)
    }

    pub fn neg(self) -> Term {
        self.imp(Term::Zero)
    }

    pub fn parse(text: &str) -> Result<Term> {
        let mut p = Parser::new(text)?;
        let t = p.term()?;
        p.expect_end()?;
        Ok(t)
    }

    /// One more than the largest variable index, 0 for ground terms.
    pub fn arity(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Zero | Term::One => 0,
            Term::Bin(_, a, b) => a.arity().max(b.arity()),
        }
    }

    fn visit_ops(&self, f: &mut impl FnMut(Option<Operation>)) {
        match self {
            Term::Var(_) | Term::One => {}
            Term::Zero => f(None),
            Term::Bin(op, a, b) => {
                f(Some(*op));
                a.visit_ops(f);
                b.visit_ops(f);
            }
        }
    }

    /// Fails if the term uses a connective or constant that `alg` lacks.
    pub fn check_support(&self, alg: &FiniteAlgebra) -> Result<()> {
        let sig = alg.signature();
        let mut err = None;
        self.visit_ops(&mut |op| {
            if err.is_some() {
                return;
            }
            match op {
                None if !sig.bottom => err = Some(Error::UnsupportedBottom(alg.name().to_string())),
                Some(op) if !sig.has(op) => {
                    err = Some(Error::UnsupportedConnective { op, algebra: alg.name().to_string() })
                }
                _ => {}
            }
        });
        err.map_or(Ok(()), Err)
    }

    pub fn eval(&self, alg: &FiniteAlgebra, assignment: &[Elem]) -> Result<Elem> {
        self.check_support(alg)?;
        if assignment.len() < self.arity() {
            return Err(Error::InvalidArgument(format!(
                "term needs {} variables, {} assigned",
                self.arity(),
                assignment.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&e| e >= alg.size()) {
            return Err(Error::InvalidArgument(format!("element {bad} is out of range")));
        }
        Ok(self.eval_unchecked(alg, assignment))
    }

    /// Evaluates without support checks. Panics on unsupported connectives.
    pub fn eval_unchecked(&self, alg: &FiniteAlgebra, assignment: &[Elem]) -> Elem {
        match self {
            Term::Var(i) => assignment[*i],
            Term::Zero => alg.bottom().expect("bottom"),
            Term::One => alg.top(),
            Term::Bin(op, a, b) => {
                let x = a.eval_unchecked(alg, assignment);
                let y = b.eval_unchecked(alg, assignment);
                alg.op(*op, x, y)
            }
        }
    }

    /// Flattens the term into a postfix program for repeated evaluation.
    pub fn compile(&self, alg: &FiniteAlgebra) -> Result<Compiled> {
        self.check_support(alg)?;
        let mut code = Vec::new();
        self.emit(alg, &mut code);
        Ok(Compiled { code, arity: self.arity() })
    }

    fn emit(&self, alg: &FiniteAlgebra, code: &mut Vec<Instr>) {
        match self {
            Term::Var(i) => code.push(Instr::Var(*i)),
            Term::Zero => code.push(Instr::Const(alg.bottom().expect("bottom"))),
            Term::One => code.push(Instr::Const(alg.top())),
            Term::Bin(op, a, b) => {
                a.emit(alg, code);
                b.emit(alg, code);
                code.push(Instr::Op(*op));
            }
        }
    }

    fn precedence_atom(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Zero | Term::One) || self.as_negation().is_some()
    }

    fn as_negation(&self) -> Option<&Term> {
        match self {
            Term::Bin(Operation::Imp, a, b) if **b == Term::Zero => Some(a),
            _ => None,
        }
    }
}

pub fn var_name(i: usize) -> String {
    NAMED_VARS.get(i).map_or_else(|| format!("x{i}"), |s| s.to_string())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(inner) = self.as_negation() {
            return if inner.precedence_atom() { write!(f, "~{inner}") } else { write!(f, "~({inner})") };
        }
        match self {
            Term::Var(i) => f.write_str(&var_name(*i)),
            Term::Zero => f.write_str("0"),
            Term::One => f.write_str("1"),
            Term::Bin(op, a, b) => {
                let side = |t: &Term, right: bool| -> String {
                    let same = matches!(t, Term::Bin(o, _, _) if o == op && t.as_negation().is_none());
                    // flat chains print without parentheses where parsing agrees
                    let flat = same && (op.is_commutative() || right);
                    if t.precedence_atom() || flat {
                        t.to_string()
                    } else {
                        format!("({t})")
                    }
                };
                write!(f, "{} {} {}", side(a, false), op.symbol(), side(b, true))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Instr {
    Var(usize),
    Const(Elem),
    Op(Operation),
}

/// A term compiled against one algebra.
#[derive(Clone, Debug)]
pub struct Compiled {
    code: Vec<Instr>,
    arity: usize,
}

impl Compiled {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, alg: &FiniteAlgebra, assignment: &[Elem], stack: &mut Vec<Elem>) -> Elem {
        stack.clear();
        for ins in &self.code {
            match *ins {
                Instr::Var(i) => stack.push(assignment[i]),
                Instr::Const(c) => stack.push(c),
                Instr::Op(op) => {
                    let b = stack.pop().expect("stack");
                    let a = stack.pop().expect("stack");
                    stack.push(alg.op(op, a, b));
                }
            }
        }
        stack[0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Equation {
        Equation { lhs, rhs }
    }

    pub fn parse(text: &str) -> Result<Equation> {
        let mut p = Parser::new(text)?;
        let e = p.equation()?;
        p.expect_end()?;
        Ok(e)
    }

    pub fn arity(&self) -> usize {
        self.lhs.arity().max(self.rhs.arity())
    }

    pub fn check_support(&self, alg: &FiniteAlgebra) -> Result<()> {
        self.lhs.check_support(alg)?;
        self.rhs.check_support(alg)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quasiequation {
    pub premises: Vec<Equation>,
    pub conclusion: Equation,
}

impl Quasiequation {
    pub fn parse(text: &str) -> Result<Quasiequation> {
        let mut p = Parser::new(text)?;
        let q = p.quasiequation()?;
        p.expect_end()?;
        Ok(q)
    }

    pub fn arity(&self) -> usize {
        self.premises.iter().map(Equation::arity).fold(self.conclusion.arity(), usize::max)
    }

    pub fn check_support(&self, alg: &FiniteAlgebra) -> Result<()> {
        for p in &self.premises {
            p.check_support(alg)?;
        }
        self.conclusion.check_support(alg)
    }
}

impl From<Equation> for Quasiequation {
    fn from(conclusion: Equation) -> Self {
        Quasiequation { premises: Vec::new(), conclusion }
    }
}

impl fmt::Display for Quasiequation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.premises.is_empty() {
            let ps: Vec<String> = self.premises.iter().map(ToString::to_string).collect();
            write!(f, "{} => ", ps.join(", "))?;
        }
        write!(f, "{}", self.conclusion)
    }
}

/// Outcome of an exhaustive check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Satisfaction {
    pub holds: bool,
    /// The first falsifying assignment, variables in index order.
    pub counterexample: Option<Vec<Elem>>,
}

/// Checks a (quasi)equation under every assignment, in lexicographic order
/// with variable 0 most significant.
pub fn satisfies(alg: &FiniteAlgebra, q: &Quasiequation) -> Result<Satisfaction> {
    q.check_support(alg)?;
    let k = q.arity();
    let compile = |e: &Equation| -> Result<(Compiled, Compiled)> { Ok((e.lhs.compile(alg)?, e.rhs.compile(alg)?)) };
    let premises: Vec<(Compiled, Compiled)> = q.premises.iter().map(compile).collect::<Result<_>>()?;
    let conclusion = compile(&q.conclusion)?;
    let n = alg.size();
    let mut assign = vec![0; k];
    let mut stack = Vec::new();
    loop {
        let mut applies = true;
        for (l, r) in &premises {
            if l.eval(alg, &assign, &mut stack) != r.eval(alg, &assign, &mut stack) {
                applies = false;
                break;
            }
        }
        if applies && conclusion.0.eval(alg, &assign, &mut stack) != conclusion.1.eval(alg, &assign, &mut stack) {
            return Ok(Satisfaction { holds: false, counterexample: Some(assign) });
        }
        // odometer step, last variable fastest
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(Satisfaction { holds: true, counterexample: None });
            }
            i -= 1;
            assign[i] += 1;
            if assign[i] < n {
                break;
            }
            assign[i] = 0;
        }
    }
}

pub fn satisfies_equation(alg: &FiniteAlgebra, e: &Equation) -> Result<Satisfaction> {
    satisfies(alg, &Quasiequation::from(e.clone()))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Var(usize),
    Zero,
    One,
    Op(Operation),
    Not,
    LParen,
    RParen,
    Eq,
    Comma,
    Implies,
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        i += 1;
        match c {
            c if c.is_whitespace() => {}
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            ',' => out.push(Tok::Comma),
            '&' | '∧' => out.push(Tok::Op(Operation::Meet)),
            '|' | '∨' => out.push(Tok::Op(Operation::Join)),
            '*' | '·' => out.push(Tok::Op(Operation::Mul)),
            '→' => out.push(Tok::Op(Operation::Imp)),
            '~' | '¬' => out.push(Tok::Not),
            '≈' => out.push(Tok::Eq),
            '⟹' | '⇒' => out.push(Tok::Implies),
            '-' if next == Some('>') => {
                i += 1;
                out.push(Tok::Op(Operation::Imp));
            }
            '=' if next == Some('>') => {
                i += 1;
                out.push(Tok::Implies);
            }
            '=' => out.push(Tok::Eq),
            '0' => out.push(Tok::Zero),
            '1' => out.push(Tok::One),
            c if c.is_ascii_lowercase() => {
                let start = i - 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let idx = if word.len() > 1 && c == 'x' {
                    word[1..].parse::<usize>().map_err(|_| Error::Parse(format!("bad variable `{word}`")))?
                } else if word.len() == 1 {
                    NAMED_VARS
                        .iter()
                        .position(|v| *v == word)
                        .ok_or_else(|| Error::Parse(format!("unknown variable `{word}`")))?
                } else {
                    return Err(Error::Parse(format!("unknown variable `{word}`")));
                };
                out.push(Tok::Var(idx));
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser> {
        Ok(Parser { toks: tokenize(text)?, pos: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect_end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(Error::Parse(format!("unexpected trailing token {t:?}"))),
        }
    }

    fn quasiequation(&mut self) -> Result<Quasiequation> {
        let mut eqs = vec![self.equation()?];
        while self.peek() == Some(&Tok::Comma) {
            self.bump();
            eqs.push(self.equation()?);
        }
        if self.peek() == Some(&Tok::Implies) {
            self.bump();
            let conclusion = self.equation()?;
            return Ok(Quasiequation { premises: eqs, conclusion });
        }
        if eqs.len() > 1 {
            return Err(Error::Parse("premise list without `=>`".into()));
        }
        Ok(Quasiequation::from(eqs.pop().expect("one equation")))
    }

    fn equation(&mut self) -> Result<Equation> {
        let lhs = self.term()?;
        if self.peek() == Some(&Tok::Eq) {
            self.bump();
            let rhs = self.term()?;
            Ok(Equation::new(lhs, rhs))
        } else {
            Ok(Equation::new(lhs, Term::One))
        }
    }

    fn term(&mut self) -> Result<Term> {
        let first = self.unary()?;
        let mut operands = vec![first];
        let mut op: Option<Operation> = None;
        while let Some(Tok::Op(o)) = self.peek().cloned() {
            if let Some(prev) = op {
                if prev != o {
                    return Err(Error::Parse(format!(
                        "mixed operators `{}` and `{}` need parentheses",
                        prev.symbol(),
                        o.symbol()
                    )));
                }
            }
            op = Some(o);
            self.bump();
            operands.push(self.unary()?);
        }
        let Some(op) = op else {
            return Ok(operands.pop().expect("one operand"));
        };
        if op == Operation::Imp {
            let mut acc = operands.pop().expect("operand");
            while let Some(t) = operands.pop() {
                acc = Term::bin(op, t, acc);
            }
            Ok(acc)
        } else {
            let mut it = operands.into_iter();
            let mut acc = it.next().expect("operand");
            for t in it {
                acc = Term::bin(op, acc, t);
            }
            Ok(acc)
        }
    }

    fn unary(&mut self) -> Result<Term> {
        match self.bump() {
            Some(Tok::Not) => Ok(self.unary()?.neg()),
            Some(Tok::Var(i)) => Ok(Term::Var(i)),
            Some(Tok::Zero) => Ok(Term::Zero),
            Some(Tok::One) => Ok(Term::One),
            Some(Tok::LParen) => {
                let t = self.term()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(t),
                    _ => Err(Error::Parse("missing `)`".into())),
                }
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::RawAlgebra;

    fn chain(n: usize, lukasiewicz: bool) -> FiniteAlgebra {
        let top = n - 1;
        let mul = move |a: usize, b: usize| {
            if lukasiewicz {
                (a + b).saturating_sub(top)
            } else {
                a.min(b)
            }
        };
        let imp = move |a: usize, b: usize| {
            if a <= b {
                top
            } else if lukasiewicz {
                top - a + b
            } else {
                b
            }
        };
        RawAlgebra::new("chain", n, top, imp)
            .bottom(0)
            .meet(|a, b| a.min(b))
            .join(|a, b| a.max(b))
            .mul(mul)
            .validate()
            .unwrap()
    }

    #[test]
    fn parses_and_prints() {
        let t = Term::parse("(x -> y) | (y -> x)").unwrap();
        assert_eq!(t.to_string(), "(x -> y) | (y -> x)");
        assert_eq!(Term::parse("x -> y -> z").unwrap(), Term::var(0).imp(Term::var(1).imp(Term::var(2))));
        assert_eq!(Term::parse("~~x").unwrap(), Term::var(0).neg().neg());
        assert_eq!(Term::parse("x12").unwrap(), Term::Var(12));
        assert!(Term::parse("x & y | z").is_err());
        assert!(Term::parse("x & (y").is_err());
        for s in ["x * y * z", "~(x & y)", "(x -> y) -> x", "x -> (y -> z)", "~x | ~~x"] {
            let t = Term::parse(s).unwrap();
            assert_eq!(Term::parse(&t.to_string()).unwrap(), t, "{s}");
        }
    }

    #[test]
    fn quasiequation_syntax() {
        let q = Quasiequation::parse("x*x = x => (x -> y) -> ~~x = ~~x").unwrap();
        assert_eq!(q.premises.len(), 1);
        assert_eq!(q.arity(), 2);
        let bare = Quasiequation::parse("x -> x").unwrap();
        assert_eq!(bare.conclusion.rhs, Term::One);
    }

    #[test]
    fn evaluation_examples() {
        let two = chain(2, false);
        assert_eq!(Term::parse("x -> x").unwrap().eval(&two, &[0]).unwrap(), 1);
        let l3 = chain(3, true);
        assert_eq!(Term::parse("~x").unwrap().eval(&l3, &[1]).unwrap(), 1);
        let g3 = chain(3, false);
        assert_eq!(Term::parse("x * x").unwrap().eval(&g3, &[1]).unwrap(), 1);
    }

    #[test]
    fn unsupported_connectives() {
        let hoop = chain(3, false).reduct(crate::algebra::Signature::HOOP).unwrap();
        let t = Term::parse("x | y").unwrap();
        assert!(matches!(t.eval(&hoop, &[0, 1]), Err(Error::UnsupportedConnective { op: Operation::Join, .. })));
        assert!(matches!(Term::parse("~x").unwrap().eval(&hoop, &[0]), Err(Error::UnsupportedBottom(_))));
    }

    #[test]
    fn satisfaction_and_counterexamples() {
        let g3 = chain(3, false);
        let prelin = Quasiequation::parse("(x -> y) | (y -> x) = 1").unwrap();
        assert!(satisfies(&g3, &prelin).unwrap().holds);
        let q = Quasiequation::parse("x * x = x => (x -> y) -> ~~x = ~~x").unwrap();
        assert!(satisfies(&g3, &q).unwrap().holds);
        let l3 = chain(3, true);
        let boolean = Quasiequation::parse("x | ~x").unwrap();
        let s = satisfies(&l3, &boolean).unwrap();
        assert_eq!(s.counterexample, Some(vec![1]));
    }
}
