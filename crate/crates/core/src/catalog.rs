//! Built-in algebras and a small expression language over them.
//!
//! Expressions: a catalog name, a path to an algebra file, or
//! `ordsum(e, …)`, `prod(e, …)` and `reduct(e, fragment)`.

use std::path::Path;

use crate::algebra::{FiniteAlgebra, RawAlgebra, Signature};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::morphisms::direct_product;
use crate::ordsum::ordinal_sum_family;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Expression over other entries, when the entry is not given by tables.
    pub expression: Option<&'static str>,
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry { name: "T1", description: "trivial one-element algebra", expression: None },
    CatalogEntry { name: "B2", description: "two-element Boolean algebra", expression: None },
    CatalogEntry { name: "B4", description: "four-element Boolean algebra 0 < a, b < 1", expression: None },
    CatalogEntry { name: "G3", description: "three-element Goedel chain 0 < m < 1", expression: None },
    CatalogEntry { name: "G4", description: "four-element Goedel chain", expression: None },
    CatalogEntry { name: "G5", description: "five-element Goedel chain", expression: None },
    CatalogEntry { name: "G6", description: "six-element Goedel chain", expression: None },
    CatalogEntry { name: "L3", description: "three-element Lukasiewicz chain 0 < m < 1, m*m = 0", expression: None },
    CatalogEntry { name: "L4", description: "four-element Lukasiewicz chain", expression: None },
    CatalogEntry { name: "L5", description: "five-element Lukasiewicz chain", expression: None },
    CatalogEntry {
        name: "SUM_4_2",
        description: "four-element Boolean algebra with a two-element chain on top; not prelinear",
        expression: Some("ordsum(B4,B2)"),
    },
    CatalogEntry {
        name: "PROD_3_2",
        description: "product of the three-element Goedel chain and 2, generated by (m,0)",
        expression: Some("prod(G3,B2)"),
    },
    CatalogEntry { name: "H_242", description: "Heyting algebra 2 + 4 + 2", expression: Some("ordsum(B2,B4,B2)") },
    CatalogEntry { name: "2xL3", description: "product of 2 and the three-element Lukasiewicz chain", expression: Some("prod(B2,L3)") },
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn two() -> FiniteAlgebra {
    goedel_chain(2).with_name("B2")
}

pub fn trivial() -> FiniteAlgebra {
    RawAlgebra::new("T1", 1, 0, |_, _| 0)
        .bottom(0)
        .meet(|_, _| 0)
        .join(|_, _| 0)
        .mul(|_, _| 0)
        .labels(["0"])
        .validate()
        .expect("trivial algebra")
}

pub fn boolean_four() -> FiniteAlgebra {
    // bit encoding: 0 = 00, a = 01, b = 10, 1 = 11
    RawAlgebra::new("B4", 4, 3, |x, y| (!x | y) & 3)
        .bottom(0)
        .meet(|x, y| x & y)
        .join(|x, y| x | y)
        .mul(|x, y| x & y)
        .labels(["0", "a", "b", "1"])
        .validate()
        .expect("B4")
}

fn chain_labels(n: usize, fractions: bool) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0 => "0".to_string(),
            i if i == n - 1 => "1".to_string(),
            _ if n == 3 => "m".to_string(),
            i if fractions => format!("{i}/{}", n - 1),
            i => format!("c{i}"),
        })
        .collect()
}

/// The n-element Goedel chain: product is the minimum.
pub fn goedel_chain(n: usize) -> FiniteAlgebra {
    assert!(n >= 2, "chains have at least two elements");
    let top = n - 1;
    RawAlgebra::new(format!("G{n}"), n, top, move |a, b| if a <= b { top } else { b })
        .bottom(0)
        .meet(|a, b| a.min(b))
        .join(|a, b| a.max(b))
        .mul(|a, b| a.min(b))
        .labels(chain_labels(n, false))
        .validate()
        .expect("Goedel chain")
}

/// The n-element Lukasiewicz chain on {0, 1/(n-1), …, 1}.
pub fn lukasiewicz_chain(n: usize) -> FiniteAlgebra {
    assert!(n >= 2, "chains have at least two elements");
    let top = n - 1;
    RawAlgebra::new(format!("L{n}"), n, top, move |a, b| (top - a + b).min(top))
        .bottom(0)
        .meet(|a, b| a.min(b))
        .join(|a, b| a.max(b))
        .mul(move |a, b| (a + b).saturating_sub(top))
        .labels(chain_labels(n, true))
        .validate()
        .expect("Lukasiewicz chain")
}

/// A catalog entry by name.
pub fn lookup(name: &str) -> Option<FiniteAlgebra> {
    let table = |name: &str| -> Option<FiniteAlgebra> {
        Some(match name {
            "T1" => trivial(),
            "B2" => two(),
            "B4" => boolean_four(),
            _ => {
                let (kind, n) = name.split_at(1);
                let n: usize = n.parse().ok()?;
                match kind {
                    "G" if (3..=6).contains(&n) => goedel_chain(n),
                    "L" if (3..=5).contains(&n) => lukasiewicz_chain(n),
                    _ => return None,
                }
            }
        })
    };
    if let Some(a) = table(name) {
        return Some(a);
    }
    let entry = ENTRIES.iter().find(|e| e.name == name)?;
    let expr = entry.expression?;
    let a = resolve(expr, &Limits::default()).expect("catalog expressions resolve");
    Some(a.with_name(name))
}

/// Every catalog algebra, in catalog order.
pub fn all() -> Vec<FiniteAlgebra> {
    ENTRIES.iter().map(|e| lookup(e.name).expect("catalog entry")).collect()
}

/// Evaluates an algebra expression.
pub fn resolve(expr: &str, limits: &Limits) -> Result<FiniteAlgebra> {
    let expr = expr.trim();
    if let Some(open) = expr.find('(') {
        let head = expr[..open].trim();
        if matches!(head, "ordsum" | "prod" | "reduct") {
            let inner = expr[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in `{expr}`")))?;
            let args = split_args(inner)?;
            return match head {
                "ordsum" => {
                    let parts: Vec<FiniteAlgebra> = args.iter().map(|a| resolve(a, limits)).collect::<Result<_>>()?;
                    ordinal_sum_family(&parts)
                }
                "prod" => {
                    let parts: Vec<FiniteAlgebra> = args.iter().map(|a| resolve(a, limits)).collect::<Result<_>>()?;
                    Ok(direct_product(&parts, limits)?.0)
                }
                _ => {
                    let [base, sig] = args.as_slice() else {
                        return Err(Error::Parse("reduct takes an algebra and a fragment".into()));
                    };
                    resolve(base, limits)?.reduct(Signature::parse(sig)?)
                }
            };
        }
    }
    if let Some(a) = lookup(expr) {
        return Ok(a);
    }
    let path = Path::new(expr);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {expr}: {e}")))?;
        return FiniteAlgebra::from_json(&text);
    }
    Err(Error::InvalidArgument(format!("unknown algebra `{expr}`")))
}

fn split_args(s: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth = depth.checked_sub(1).ok_or_else(|| Error::Parse("unbalanced parentheses".into()))?;
                cur.push(c);
            }
            ',' if depth == 0 => out.push(std::mem::take(&mut cur).trim().to_string()),
            _ => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced parentheses".into()));
    }
    out.push(cur.trim().to_string());
    if out.iter().any(String::is_empty) {
        return Err(Error::Parse("empty argument".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphisms::is_isomorphic;

    #[test]
    fn every_entry_loads() {
        for e in entries() {
            let a = lookup(e.name).unwrap();
            assert_eq!(a.name(), e.name);
        }
    }

    #[test]
    fn named_shapes() {
        let s = lookup("SUM_4_2").unwrap();
        assert_eq!(s.labels().unwrap(), &["0", "a", "b", "0_2", "1"]);
        let p = lookup("PROD_3_2").unwrap();
        assert_eq!(p.size(), 6);
        assert!(p.labels().unwrap().iter().any(|l| l == "(m,0)"));
        assert_eq!(lookup("H_242").unwrap().size(), 6);
        assert_eq!(lookup("B2").unwrap().size(), 2);
        let e = resolve("ordsum(B4,B2)", &Limits::default()).unwrap();
        assert!(is_isomorphic(&e, &s).is_some());
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        for a in all() {
            let text = a.to_json();
            let b = FiniteAlgebra::from_json(&text).unwrap();
            assert_eq!(a, b);
            assert_eq!(b.to_json(), text);
        }
    }

    #[test]
    fn reduct_expressions() {
        let h = resolve("reduct(G3, hoop)", &Limits::default()).unwrap();
        assert_eq!(h.signature(), Signature::HOOP);
        assert!(resolve("prod(B2", &Limits::default()).is_err());
        assert!(resolve("nope", &Limits::default()).is_err());
    }
}
