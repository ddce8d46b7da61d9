//! Projectivity in locally finite varieties and the constructions behind it.
//!
//! `is_projective_lf` is the general procedure: a finite algebra is
//! projective iff the canonical surjection from a free algebra onto it has a
//! section. The other entry points build explicit retractions (hoops, bounded
//! hoops, MV), classify finite projective Heyting algebras by their ordinal
//! sum decomposition, and assemble unification reports.

use serde::Serialize;

use crate::algebra::{Elem, FiniteAlgebra, Signature};
use crate::catalog::{boolean_four, two};
use crate::congruences::{filter_generate, quotient, zero_preimage_trivial};
use crate::error::{Error, Result};
use crate::freealg::{free_algebra, variety_membership, FreeAlgebraResult, VarietySpec};
use crate::limits::Limits;
use crate::modelgen::{enumerate_models, ModelQuery};
use crate::morphisms::{
    self, direct_product, find_hom, find_section, has_hom, is_isomorphic, search_homs, verify, HomFilter,
    HomOptions, Homomorphism, Retraction,
};
use crate::ordsum::decompose;
use crate::properties;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Projective,
    NotProjective,
    UnknownCap,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectivityVerdict {
    pub subject: String,
    pub variety: String,
    pub verdict: Verdict,
    /// `retract-of-free` or `hom-onto-2`.
    pub method: &'static str,
    /// Section into the free algebra and the canonical surjection back.
    pub witness: Option<Retraction>,
    pub obstruction: Option<String>,
    pub free_size: Option<usize>,
}

impl ProjectivityVerdict {
    pub fn is_projective(&self) -> bool {
        self.verdict == Verdict::Projective
    }
}

fn has_hom_onto_two(a: &FiniteAlgebra) -> bool {
    has_hom(a, &two(), HomFilter::Surjective)
}

fn hom_onto_two(a: &FiniteAlgebra) -> Option<Homomorphism> {
    find_hom(a, &two(), &HomOptions::filter(HomFilter::Surjective))
}

/// Best available reason for a negative verdict.
fn obstruction_for(a: &FiniteAlgebra) -> String {
    if a.is_bounded() && !has_hom_onto_two(a) {
        "no homomorphism onto 2".into()
    } else if !properties::top_join_irreducible(a) {
        "top join-reducible".into()
    } else {
        "the canonical surjection from the free algebra has no section".into()
    }
}

fn check_member(a: &FiniteAlgebra, v: &VarietySpec, limits: &Limits) -> Result<Option<FiniteAlgebra>> {
    let a = v.align(a)?;
    match variety_membership(&a, v, limits) {
        Ok(m) if m.member => Ok(Some(a)),
        Ok(_) => Err(Error::NotInVariety { algebra: a.name().to_string(), variety: v.name.clone() }),
        Err(e) if e.is_size_limit() => Ok(None),
        Err(e) => Err(e),
    }
}

fn unknown(a: &FiniteAlgebra, v: &VarietySpec, method: &'static str, why: String) -> ProjectivityVerdict {
    ProjectivityVerdict {
        subject: a.name().to_string(),
        variety: v.name.clone(),
        verdict: Verdict::UnknownCap,
        method,
        witness: None,
        obstruction: Some(why),
        free_size: None,
    }
}

/// The free algebra on a generating set of `a` and the surjection sending
/// the free generators to it.
fn canonical_surjection(a: &FiniteAlgebra, v: &VarietySpec, limits: &Limits) -> Result<(FreeAlgebraResult, Homomorphism)> {
    let gens = morphisms::generating_set_in(a, a.signature());
    let free = free_algebra(v, gens.len(), limits)?;
    let g = free
        .extend(a, &gens)
        .ok_or_else(|| Error::Inconsistent(format!("{} is a member but receives no map from the free algebra", a.name())))?;
    if !g.surjective {
        return Err(Error::Inconsistent(format!("generators of {} do not generate it", a.name())));
    }
    Ok((free, g))
}

fn reverify(section: &Homomorphism, g: &Homomorphism, a: &FiniteAlgebra, f: &FiniteAlgebra) -> Result<Retraction> {
    verify(a, f, &section.map).map_err(|e| Error::Inconsistent(format!("section fails: {e}")))?;
    let r = Retraction { section: section.clone(), projection: g.clone() };
    if !r.is_identity_composite() {
        return Err(Error::Inconsistent("section does not compose to the identity".into()));
    }
    Ok(r)
}

/// Projectivity of a finite member of a locally finite variety, decided as
/// being a retract of a finitely generated free algebra.
pub fn is_projective_lf(a: &FiniteAlgebra, v: &VarietySpec, limits: &Limits) -> Result<ProjectivityVerdict> {
    let method = "retract-of-free";
    let Some(a) = check_member(a, v, limits)? else {
        return Ok(unknown(a, v, method, "membership check exceeds the caps".into()));
    };
    let (free, g) = match canonical_surjection(&a, v, limits) {
        Ok(x) => x,
        Err(e) if e.is_size_limit() => return Ok(unknown(&a, v, method, e.to_string())),
        Err(e) => return Err(e),
    };
    let f = &free.algebra;
    let section = find_section(&g, f, &a);
    let mut out = ProjectivityVerdict {
        subject: a.name().to_string(),
        variety: v.name.clone(),
        verdict: Verdict::NotProjective,
        method,
        witness: None,
        obstruction: None,
        free_size: Some(f.size()),
    };
    match section {
        Some(h) => {
            out.verdict = Verdict::Projective;
            out.witness = Some(reverify(&h, &g, &a, f)?);
        }
        None => out.obstruction = Some(obstruction_for(&a)),
    }
    Ok(out)
}

/// A hoop retraction together with the idempotent endomorphism behind it.
#[derive(Clone, Debug, Serialize)]
pub struct HoopRetraction {
    pub retraction: Retraction,
    /// Least element of the filter g⁻¹(1).
    pub u: Elem,
    /// x ↦ u→x on the source.
    pub endomorphism: Vec<Elem>,
}

fn as_hoop(a: &FiniteAlgebra) -> Result<FiniteAlgebra> {
    if !properties::is_hoop(a) {
        return Err(Error::NotAHoop(a.name().to_string()));
    }
    let sig = a.signature();
    if sig == Signature::HOOP {
        Ok(a.clone())
    } else {
        a.reduct(Signature::HOOP)
    }
}

fn least_in(a: &FiniteAlgebra, set: &[Elem]) -> Elem {
    *set.iter().find(|&&x| set.iter().all(|&y| a.leq(x, y))).expect("finite filters have a least element")
}

fn section_through(f: &[Elem], g: &Homomorphism, a_size: usize) -> Vec<Elem> {
    let mut h = vec![usize::MAX; a_size];
    for (b, &x) in g.map.iter().enumerate() {
        if h[x] == usize::MAX {
            h[x] = f[b];
        }
    }
    h
}

/// For a surjection g: B → A of finite hoops, the section a ↦ u→b with
/// g(b) = a, where u is the least element of g⁻¹(1). Works on the
/// {∧,·,→} reducts.
pub fn hoop_retraction(g: &Homomorphism, b: &FiniteAlgebra, a: &FiniteAlgebra) -> Result<HoopRetraction> {
    let b = as_hoop(b)?;
    let a = as_hoop(a)?;
    if g.map.len() != b.size() || !g.surjective {
        return Err(Error::NotSurjective);
    }
    let top_block: Vec<Elem> = b.elements().filter(|&x| g.map[x] == a.top()).collect();
    let u = least_in(&b, &top_block);
    if b.mul(u, u) != u {
        return Err(Error::Inconsistent(format!("least element of the top block of {} is not idempotent", b.name())));
    }
    let f: Vec<Elem> = b.elements().map(|x| b.imp(u, x)).collect();
    let fh = Homomorphism::checked(&b, &b, f.clone()).map_err(|e| Error::Inconsistent(format!("u→x: {e}")))?;
    if b.elements().any(|x| f[f[x]] != f[x]) {
        return Err(Error::Inconsistent("u→x is not idempotent".into()));
    }
    if !fh.same_kernel(g) {
        return Err(Error::Inconsistent("ker(u→x) differs from ker(g)".into()));
    }
    let h = section_through(&f, g, a.size());
    let section = Homomorphism::checked(&a, &b, h).map_err(|e| Error::Inconsistent(format!("section: {e}")))?;
    let retraction = Retraction { section, projection: Homomorphism::from_map(&b, &a, g.map.clone()) };
    if !retraction.is_identity_composite() {
        return Err(Error::Inconsistent("g∘h is not the identity".into()));
    }
    Ok(HoopRetraction { retraction, u, endomorphism: f })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundedHoopEndomorphism {
    pub endomorphism: Homomorphism,
    pub idempotent: bool,
}

/// x ↦ (u→x)(¬u→φ(x)) for an idempotent u and φ: A → 2, with 2 read as
/// the subalgebra {0,1} of A.
pub fn bounded_hoop_endomorphism(a: &FiniteAlgebra, u: Elem, phi: &Homomorphism) -> Result<BoundedHoopEndomorphism> {
    if !properties::is_bounded_hoop(a) {
        return Err(Error::NotBoundedHoop(a.name().to_string()));
    }
    if u >= a.size() || a.mul(u, u) != u {
        return Err(Error::NotIdempotentElement(format!("{u} in {}", a.name())));
    }
    let z = a.bottom().expect("bounded");
    let lift = |x: Elem| if phi.map[x] == 0 { z } else { a.top() };
    if phi.map.len() != a.size() || phi.map.iter().any(|&y| y > 1) {
        return Err(Error::InvalidArgument("φ must map into the two-element algebra".into()));
    }
    let nu = a.neg(u);
    let map: Vec<Elem> = a.elements().map(|x| a.mul(a.imp(u, x), a.imp(nu, lift(x)))).collect();
    let endomorphism =
        Homomorphism::checked(a, a, map).map_err(|e| Error::Inconsistent(format!("bounded hoop endomorphism: {e}")))?;
    let idempotent = a.elements().all(|x| endomorphism.map[endomorphism.map[x]] == endomorphism.map[x]);
    Ok(BoundedHoopEndomorphism { endomorphism, idempotent })
}

/// The retraction built from a surjection g: B → A of bounded hoops and a
/// homomorphism φ: A → 2.
pub fn bounded_hoop_retraction(
    g: &Homomorphism,
    b: &FiniteAlgebra,
    a: &FiniteAlgebra,
    phi: &Homomorphism,
) -> Result<Retraction> {
    if !g.surjective {
        return Err(Error::NotSurjective);
    }
    let top_block: Vec<Elem> = b.elements().filter(|&x| g.map[x] == a.top()).collect();
    let u = least_in(b, &top_block);
    let phi_b = Homomorphism::from_map(b, &two(), g.map.iter().map(|&x| phi.map[x]).collect());
    let e = bounded_hoop_endomorphism(b, u, &phi_b)?;
    if !e.idempotent || !e.endomorphism.same_kernel(g) {
        return Err(Error::Inconsistent("bounded hoop endomorphism does not match ker(g)".into()));
    }
    let h = section_through(&e.endomorphism.map, g, a.size());
    let section = Homomorphism::checked(a, b, h).map_err(|e| Error::Inconsistent(format!("section: {e}")))?;
    let r = Retraction { section, projection: g.clone() };
    if !r.is_identity_composite() {
        return Err(Error::Inconsistent("g∘h is not the identity".into()));
    }
    Ok(r)
}

/// Projectivity of a finite bounded hoop by the existence of a
/// homomorphism onto 2, cross-checked against `is_projective_lf`.
pub fn bounded_hoop_projective(a: &FiniteAlgebra, v: &VarietySpec, limits: &Limits) -> Result<ProjectivityVerdict> {
    if !properties::is_bounded_hoop(a) {
        return Err(Error::NotBoundedHoop(a.name().to_string()));
    }
    let gens = v.shared_generators()?;
    if !gens.iter().all(properties::is_bounded_hoop) {
        // hypotheses fail on the variety: no shortcut
        return is_projective_lf(a, v, limits);
    }
    let general = is_projective_lf(a, v, limits)?;
    let aligned = v.align(a)?;
    let phi = hom_onto_two(&aligned);
    let mut out = ProjectivityVerdict {
        subject: aligned.name().to_string(),
        variety: v.name.clone(),
        verdict: if phi.is_some() { Verdict::Projective } else { Verdict::NotProjective },
        method: "hom-onto-2",
        witness: None,
        obstruction: phi.is_none().then(|| "no homomorphism onto 2".to_string()),
        free_size: general.free_size,
    };
    if general.verdict == Verdict::UnknownCap {
        out.obstruction.get_or_insert_with(|| "free algebra exceeds the caps; witness not built".into());
        return Ok(out);
    }
    if general.verdict != out.verdict {
        return Err(Error::Inconsistent(format!(
            "hom onto 2 and retract of free disagree on {} in {}",
            aligned.name(),
            v.name
        )));
    }
    if let Some(phi) = phi {
        let (free, g) = canonical_surjection(&aligned, v, limits)?;
        let prelinear = gens.iter().all(properties::is_prelinear);
        out.witness = Some(match bounded_hoop_retraction(&g, &free.algebra, &aligned, &phi) {
            Ok(r) => r,
            // without prelinearity the join need not be preserved
            Err(Error::Inconsistent(_)) if !prelinear => general.witness.expect("projective verdict has a witness"),
            Err(e) => return Err(e),
        });
    }
    Ok(out)
}

/// A lifting f: A → B with g∘f = h, for g: B → C surjective with only 0
/// sent to 0.
pub fn is_zero_projective_instance(
    a: &FiniteAlgebra,
    h: &Homomorphism,
    b: &FiniteAlgebra,
    g: &Homomorphism,
    c: &FiniteAlgebra,
) -> Result<Option<Homomorphism>> {
    if !g.surjective {
        return Err(Error::NotSurjective);
    }
    if !zero_preimage_trivial(g, b, c)? {
        return Err(Error::ZeroFiberNotTrivial);
    }
    let mut fibres: Vec<Vec<Elem>> = vec![Vec::new(); c.size()];
    for (y, &z) in g.map.iter().enumerate() {
        fibres[z].push(y);
    }
    let domains: Vec<Vec<Elem>> = a.elements().map(|x| fibres[h.map[x]].clone()).collect();
    let f = find_hom(a, b, &HomOptions { domains: Some(domains), ..HomOptions::default() });
    if f.is_none() && [a, b, c].iter().all(|x| properties::is_bounded_hoop(x)) {
        return Err(Error::Inconsistent("bounded hoops must admit a lifting here".into()));
    }
    Ok(f)
}

#[derive(Clone, Debug, Serialize)]
pub struct HeytingClassification {
    pub projective: bool,
    /// `B2`, `B4`, or the size of a component that is neither.
    pub components: Vec<String>,
    pub atoms_per_component: Vec<usize>,
    pub subdirectly_irreducible: bool,
    pub reason: Option<String>,
}

/// Projective iff the sum-irreducible components are each 2 or 4 and the
/// last one is 2.
pub fn classify_projective_heyting(a: &FiniteAlgebra) -> Result<HeytingClassification> {
    if !properties::is_heyting(a) {
        return Err(Error::NotHeyting(a.name().to_string()));
    }
    let dec = decompose(a);
    let two = two();
    let four = boolean_four();
    let mut components = Vec::new();
    let mut atoms = Vec::new();
    for c in &dec.components {
        let c = c.with_bottom()?;
        atoms.push(properties::atoms(&c).len());
        components.push(if is_isomorphic(&c, &two).is_some() {
            "B2".to_string()
        } else if is_isomorphic(&c, &four).is_some() {
            "B4".to_string()
        } else {
            format!("size {}", c.size())
        });
    }
    let reason = if a.is_trivial() {
        Some("trivial".to_string())
    } else if components.last().map(String::as_str) != Some("B2") {
        Some("last component is not 2".to_string())
    } else {
        components
            .iter()
            .position(|c| c != "B2" && c != "B4")
            .map(|i| format!("component {i} is neither 2 nor 4"))
    };
    Ok(HeytingClassification {
        projective: reason.is_none(),
        components,
        atoms_per_component: atoms,
        subdirectly_irreducible: properties::coatoms(a).len() == 1,
        reason,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MvWitness {
    /// Size of A′ in A ≅ 2 × A′.
    pub complement_size: usize,
    /// The isomorphism A → 2 × A′.
    pub iso: Homomorphism,
    /// a ↦ (g(a), a) into 2 × A, and the second projection.
    pub retraction: Retraction,
}

/// For a finite MV member with a homomorphism onto 2: the splitting
/// A ≅ 2 × A′ and the retraction of 2 × A onto A.
pub fn mv_projective_witness(a: &FiniteAlgebra, v: &VarietySpec, limits: &Limits) -> Result<Option<MvWitness>> {
    let a = match check_member(a, v, limits)? {
        Some(a) => a,
        None => return Err(Error::SizeLimitExceeded { what: "membership check", needed: a.size(), limit: limits.max_closure_size }),
    };
    let Some(g) = hom_onto_two(&a) else {
        return Ok(None);
    };
    let two = two();
    let two = if a.signature() == two.signature() { two } else { two.reduct(a.signature())? };
    let (p, projections) = direct_product(&[two.clone(), a.clone()], limits)?;
    let h: Vec<Elem> = a.elements().map(|x| g.map[x] * a.size() + x).collect();
    let section = Homomorphism::checked(&a, &p, h).map_err(|e| Error::Inconsistent(format!("⟨g, id⟩: {e}")))?;
    let retraction = Retraction { section, projection: projections[1].clone() };
    if !retraction.is_identity_composite() {
        return Err(Error::Inconsistent("second projection does not undo ⟨g, id⟩".into()));
    }
    // a complemented e with A/↑e ≅ 2 splits A as A/↑e × A/↑¬e
    for e in properties::idempotents(&a) {
        let ne = a.neg(e);
        if a.join(e, ne) != a.top() {
            continue;
        }
        let (q1, c1) = quotient(&a, &filter_generate(&a, &[e])?)?;
        if q1.size() != 2 {
            continue;
        }
        let (q2, c2) = quotient(&a, &filter_generate(&a, &[ne])?)?;
        let (pq, _) = direct_product(&[q1, q2.clone()], limits)?;
        let map: Vec<Elem> = a.elements().map(|x| c1.map[x] * q2.size() + c2.map[x]).collect();
        if let Ok(iso) = Homomorphism::checked(&a, &pq, map) {
            if iso.injective && iso.surjective {
                return Ok(Some(MvWitness { complement_size: q2.size(), iso, retraction }));
            }
        }
    }
    Err(Error::Inconsistent(format!("{} maps onto 2 but does not split off a factor 2", a.name())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnificationType {
    StrongUnitaryConsistent,
    Counterexample,
    UnknownCap,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnificationReport {
    pub subject: String,
    pub variety: String,
    pub unifiable: bool,
    /// Projective targets tried, with their sizes.
    pub targets: Vec<(String, usize)>,
    pub unifiers: Vec<Homomorphism>,
    /// `generality[i][j]`: unifier i is at least as general as unifier j.
    pub generality: Vec<Vec<bool>>,
    /// Indices of unifiers at least as general as every other one.
    pub most_general: Vec<usize>,
    pub subject_projective: Verdict,
    pub verdict: UnificationType,
    pub truncated: bool,
}

/// Per-target bound on listed unifiers.
const MAX_UNIFIERS_PER_TARGET: usize = 32;

/// m with m∘u1 = u2, if any.
fn factor_through(u1: &Homomorphism, p1: &FiniteAlgebra, u2: &Homomorphism, p2: &FiniteAlgebra) -> bool {
    let mut domains: Vec<Vec<Elem>> = vec![p2.elements().collect(); p1.size()];
    for (x, &y) in u1.map.iter().enumerate() {
        let want = u2.map[x];
        if domains[y].len() == 1 && domains[y][0] != want {
            return false;
        }
        domains[y] = vec![want];
    }
    find_hom(p1, p2, &HomOptions { domains: Some(domains), ..HomOptions::default() }).is_some()
}

/// Unifiers of a finite algebra into projective targets of size at most
/// `cap`, ordered by generality.
pub fn unification_report(fp: &FiniteAlgebra, v: &VarietySpec, cap: usize, limits: &Limits) -> Result<UnificationReport> {
    let fp = v.align(fp)?;
    let own = is_projective_lf(&fp, v, limits)?;
    let unifiable = if fp.is_bounded() { has_hom_onto_two(&fp) } else { true };

    // targets: free algebras, the subject when projective, and small
    // certified projective members
    let mut targets: Vec<FiniteAlgebra> = Vec::new();
    let push = |t: FiniteAlgebra, targets: &mut Vec<FiniteAlgebra>| {
        if !targets.iter().any(|s| is_isomorphic(s, &t).is_some()) {
            targets.push(t);
        }
    };
    if own.is_projective() {
        push(fp.clone(), &mut targets);
    }
    for k in 0.. {
        match free_algebra(v, k, limits) {
            Ok(f) if f.algebra.size() <= cap => push(f.algebra, &mut targets),
            Ok(_) => break,
            Err(e) if e.is_size_limit() => break,
            Err(e) => return Err(e),
        }
    }
    let sig = v.signature();
    let model_cap = cap.min(limits.max_model_size);
    if sig.meet && sig.mul && model_cap >= 1 {
        for m in enumerate_models(&ModelQuery::up_to(model_cap), limits)? {
            let m = if sig.is_subsignature_of(&m.signature()) { m.reduct(sig)? } else { continue };
            let member = matches!(variety_membership(&m, v, limits), Ok(r) if r.member);
            if member && is_projective_lf(&m, v, limits)?.is_projective() {
                push(m, &mut targets);
            }
        }
    }

    let mut unifiers = Vec::new();
    let mut owner = Vec::new();
    let mut truncated = false;
    for (ti, t) in targets.iter().enumerate() {
        let found = search_homs(&fp, t, &HomOptions { limit: Some(MAX_UNIFIERS_PER_TARGET + 1), ..HomOptions::default() });
        truncated |= found.len() > MAX_UNIFIERS_PER_TARGET;
        for u in found.into_iter().take(MAX_UNIFIERS_PER_TARGET) {
            unifiers.push(u);
            owner.push(ti);
        }
    }
    let n = unifiers.len();
    let generality: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n).map(|j| factor_through(&unifiers[i], &targets[owner[i]], &unifiers[j], &targets[owner[j]])).collect()
        })
        .collect();
    for i in 0..n {
        if !generality[i][i] {
            return Err(Error::Inconsistent("generality is not reflexive".into()));
        }
        for j in 0..n {
            if generality[i][j] && (0..n).any(|k| generality[j][k] && !generality[i][k]) {
                return Err(Error::Inconsistent("generality is not transitive".into()));
            }
        }
    }
    if own.is_projective() && n == 0 {
        return Err(Error::Inconsistent("projective subject but no unifier found".into()));
    }
    let most_general = (0..n).filter(|&i| (0..n).all(|j| generality[i][j])).collect();
    let verdict = match own.verdict {
        Verdict::UnknownCap => UnificationType::UnknownCap,
        Verdict::Projective => UnificationType::StrongUnitaryConsistent,
        Verdict::NotProjective if !unifiable => UnificationType::StrongUnitaryConsistent,
        Verdict::NotProjective => UnificationType::Counterexample,
    };
    Ok(UnificationReport {
        subject: fp.name().to_string(),
        variety: v.name.clone(),
        unifiable,
        targets: targets.iter().map(|t| (t.name().to_string(), t.size())).collect(),
        unifiers,
        generality,
        most_general,
        subject_projective: own.verdict,
        verdict,
        truncated,
    })
}
