use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use reslat::catalog;
use reslat::congruences::{self, Filter};
use reslat::freealg::{self, VarietySpec};
use reslat::modelgen::{self, ModelProperty, ModelQuery};
use reslat::morphisms::{self, HomFilter, HomOptions, Homomorphism};
use reslat::ordsum;
use reslat::projectivity;
use reslat::properties;
use reslat::term::{satisfies, var_name, Equation, Quasiequation};
use reslat::{Elem, FiniteAlgebra, Limits, Signature};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::report::{algebra_value, digest, Input};
use crate::Command;

pub struct Outcome {
    pub inputs: Vec<Input>,
    pub result: Value,
    pub summary: Vec<String>,
}

struct Ctx {
    limits: Limits,
    inputs: Vec<Input>,
    summary: Vec<String>,
}

impl Ctx {
    fn algebra(&mut self, expr: &str) -> Result<FiniteAlgebra> {
        let a = catalog::resolve(expr, &self.limits).with_context(|| format!("loading `{expr}`"))?;
        self.inputs.push(Input::of(&a));
        Ok(a)
    }

    fn variety(&mut self, expr: &str) -> Result<VarietySpec> {
        let v = load_variety(expr, &self.limits)?;
        for g in &v.generators {
            self.inputs.push(Input::of(g));
        }
        Ok(v)
    }

    fn say(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }
}

#[derive(Deserialize)]
struct VarietyFile {
    name: String,
    generators: Vec<String>,
    #[serde(default)]
    equations: Vec<String>,
}

/// A builtin variety name, `V(e, …)`, or a variety file.
fn load_variety(expr: &str, limits: &Limits) -> Result<VarietySpec> {
    let path = Path::new(expr);
    if !path.is_file() {
        return Ok(VarietySpec::parse(expr, limits)?);
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {expr}"))?;
    let file: VarietyFile = serde_json::from_str(&text).map_err(reslat::Error::from).with_context(|| format!("parsing {expr}"))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let gens = file
        .generators
        .iter()
        .map(|g| {
            let local = base.join(g);
            let target = if local.is_file() { local.to_string_lossy().into_owned() } else { g.clone() };
            catalog::resolve(&target, limits).with_context(|| format!("generator `{g}`"))
        })
        .collect::<Result<Vec<_>>>()?;
    let eqs = file.equations.iter().map(|e| Quasiequation::parse(e)).collect::<reslat::Result<Vec<_>>>()?;
    Ok(VarietySpec::new(file.name, gens)?.with_equations(eqs)?)
}

/// A label, or an index.
fn element(a: &FiniteAlgebra, s: &str) -> Result<Elem> {
    let s = s.trim();
    if let Some(e) = a.element_by_label(s) {
        return Ok(e);
    }
    match s.parse::<usize>() {
        Ok(i) if i < a.size() => Ok(i),
        _ => Err(reslat::Error::InvalidArgument(format!("`{s}` is not an element of {}", a.name())).into()),
    }
}

fn elements(a: &FiniteAlgebra, list: &str) -> Result<Vec<Elem>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(|s| element(a, s)).collect()
}

fn labels(a: &FiniteAlgebra, xs: &[Elem]) -> Vec<String> {
    xs.iter().map(|&x| a.label(x)).collect()
}

/// Name of the first catalog algebra isomorphic to `c`, or its own name.
fn catalog_name(c: &FiniteAlgebra) -> String {
    let c = c.with_bottom().unwrap_or_else(|_| c.clone());
    catalog::all()
        .into_iter()
        .find(|e| morphisms::is_isomorphic(e, &c).is_some())
        .map_or_else(|| c.name().to_string(), |e| e.name().to_string())
}

fn write_algebra(path: &Path, a: &FiniteAlgebra) -> Result<()> {
    std::fs::write(path, a.to_json()).with_context(|| format!("writing {}", path.display()))
}

fn maybe_write(out: &Option<PathBuf>, a: &FiniteAlgebra, ctx: &mut Ctx) -> Result<()> {
    if let Some(p) = out {
        write_algebra(p, a)?;
        ctx.say(format!("wrote {}", p.display()));
    }
    Ok(())
}

fn maps(hs: &[Homomorphism]) -> Value {
    json!(hs.iter().map(|h| &h.map).collect::<Vec<_>>())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum HomFile {
    Map(Vec<Elem>),
    Full { source: Option<String>, target: Option<String>, map: Vec<Elem> },
}

impl HomFile {
    fn parts(self) -> (Option<String>, Option<String>, Vec<Elem>) {
        match self {
            HomFile::Map(m) => (None, None, m),
            HomFile::Full { source, target, map } => (source, target, map),
        }
    }
}

fn read_hom(path: &Path) -> Result<(Option<String>, Option<String>, Vec<Elem>)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let h: HomFile = serde_json::from_str(&text).map_err(reslat::Error::from).with_context(|| format!("parsing {}", path.display()))?;
    Ok(h.parts())
}

pub fn run(cmd: &Command, limits: Limits) -> Result<Outcome> {
    let mut ctx = Ctx { limits, inputs: Vec::new(), summary: Vec::new() };
    let result = dispatch(cmd, &mut ctx)?;
    Ok(Outcome { inputs: ctx.inputs, result, summary: ctx.summary })
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<Value> {
    Ok(match cmd {
        Command::Check { algebra, equations } => {
            let a = ctx.algebra(algebra)?;
            let mut checks = Vec::new();
            let mut all = true;
            let mut first_witness = Value::Null;
            for text in equations {
                let q = Quasiequation::parse(text)?;
                let s = satisfies(&a, &q)?;
                let witness = s.counterexample.as_ref().map(|cx| {
                    let m: serde_json::Map<String, Value> =
                        cx.iter().enumerate().map(|(i, &x)| (var_name(i), json!(a.label(x)))).collect();
                    Value::Object(m)
                });
                if !s.holds && all {
                    first_witness = witness.clone().unwrap_or(Value::Null);
                }
                all &= s.holds;
                ctx.say(format!("{q}: {}", if s.holds { "holds" } else { "fails" }));
                checks.push(json!({ "equation": q.to_string(), "satisfied": s.holds, "witness": witness }));
            }
            ctx.say(format!("{} validates ({} elements, {})", a.name(), a.size(), a.signature().fragment_name()));
            json!({ "algebra": a.name(), "valid": true, "satisfied": all, "witness": first_witness, "checks": checks })
        }
        Command::Props { algebra } => {
            let a = ctx.algebra(algebra)?;
            let p = properties::properties(&a);
            ctx.say(format!("{}: {} elements", a.name(), a.size()));
            serde_json::to_value(p)?
        }
        Command::Ordsum { algebras, out } => {
            let parts = algebras.iter().map(|e| ctx.algebra(e)).collect::<Result<Vec<_>>>()?;
            let s = ordsum::ordinal_sum_family(&parts)?;
            maybe_write(out, &s, ctx)?;
            ctx.say(format!("{} has {} elements", s.name(), s.size()));
            json!({
                "components": parts.iter().map(|p| json!({"name": p.name(), "size": p.size()})).collect::<Vec<_>>(),
                "algebra": algebra_value(&s),
            })
        }
        Command::Decompose { algebra } => {
            let a = ctx.algebra(algebra)?;
            let d = ordsum::decompose(&a);
            let names: Vec<String> = d.components.iter().map(catalog_name).collect();
            ctx.say(format!("{} = {}", a.name(), names.join(" + ")));
            json!({ "components": names, "sizes": d.sizes(), "embeddings": d.embeddings })
        }
        Command::Homs { source, target, surjective, injective, bijective, limit } => {
            let a = ctx.algebra(source)?;
            let b = ctx.algebra(target)?;
            let filter = match (surjective, injective, bijective) {
                (true, _, _) => HomFilter::Surjective,
                (_, true, _) => HomFilter::Injective,
                (_, _, true) => HomFilter::Bijective,
                _ => HomFilter::All,
            };
            let opts = HomOptions { filter, limit: *limit, workers: ctx.limits.workers, ..HomOptions::default() };
            let hs = morphisms::search_homs(&a, &b, &opts);
            ctx.say(format!("{} homomorphisms {} -> {}", hs.len(), a.name(), b.name()));
            maps(&hs)
        }
        Command::Iso { a, b } => {
            let x = ctx.algebra(a)?;
            let y = ctx.algebra(b)?;
            let iso = morphisms::is_isomorphic(&x, &y);
            ctx.say(if iso.is_some() { "isomorphic" } else { "not isomorphic" });
            json!({ "isomorphic": iso.is_some(), "map": iso.map(|h| h.map) })
        }
        Command::Retract { a, b } => {
            let x = ctx.algebra(a)?;
            let y = ctx.algebra(b)?;
            let r = morphisms::find_retraction(&x, &y);
            ctx.say(if r.is_some() { "retract found" } else { "no retraction" });
            json!({
                "retract": r.is_some(),
                "section": r.as_ref().map(|r| &r.section.map),
                "projection": r.as_ref().map(|r| &r.projection.map),
            })
        }
        Command::Prod { algebras, out } => {
            let parts = algebras.iter().map(|e| ctx.algebra(e)).collect::<Result<Vec<_>>>()?;
            let (p, projections) = morphisms::direct_product(&parts, &ctx.limits)?;
            maybe_write(out, &p, ctx)?;
            ctx.say(format!("{} has {} elements", p.name(), p.size()));
            json!({ "algebra": algebra_value(&p), "projections": maps(&projections) })
        }
        Command::Subgen { algebra, elements: list } => {
            let a = ctx.algebra(algebra)?;
            let seeds = elements(&a, list)?;
            let (s, inc) = morphisms::subalgebra_generate(&a, &seeds)?;
            ctx.say(format!("generated {} of {} elements", s.size(), a.size()));
            json!({ "elements": inc.map, "labels": labels(&a, &inc.map), "algebra": algebra_value(&s) })
        }
        Command::Filters { algebra } => {
            let a = ctx.algebra(algebra)?;
            let fs = congruences::all_filters(&a, &ctx.limits)?;
            ctx.say(format!("{} filters", fs.len()));
            json!(fs
                .iter()
                .map(|f| json!({ "generator": a.label(f.generator(&a)), "elements": f.elements, "labels": labels(&a, &f.elements) }))
                .collect::<Vec<_>>())
        }
        Command::Quotient { algebra, elements: list } => {
            let a = ctx.algebra(algebra)?;
            let seeds = elements(&a, list)?;
            let f: Filter = congruences::filter_generate(&a, &seeds)?;
            let (q, g) = congruences::quotient(&a, &f)?;
            ctx.say(format!("{} has {} elements", q.name(), q.size()));
            json!({ "filter": f.elements, "map": g.map, "algebra": algebra_value(&q) })
        }
        Command::Si { algebra } => {
            let a = ctx.algebra(algebra)?;
            let si = congruences::is_subdirectly_irreducible(&a, &ctx.limits)?;
            ctx.say(format!("{} is {}subdirectly irreducible", a.name(), if si { "" } else { "not " }));
            json!({ "subdirectly_irreducible": si })
        }
        Command::Free { variety, gens, out } => {
            let v = ctx.variety(variety)?;
            let f = freealg::free_algebra(&v, *gens, &ctx.limits)?;
            maybe_write(out, &f.algebra, ctx)?;
            ctx.say(format!("{} has {} elements", f.algebra.name(), f.algebra.size()));
            json!({
                "size": f.algebra.size(),
                "generators": f.generator_elements,
                "algebra": algebra_value(&f.algebra),
            })
        }
        Command::Member { algebra, variety } => {
            let b = ctx.algebra(algebra)?;
            let v = ctx.variety(variety)?;
            let m = freealg::variety_membership(&b, &v, &ctx.limits)?;
            ctx.say(format!("{} {} {}", b.name(), if m.member { "is in" } else { "is not in" }, v.name));
            serde_json::to_value(m)?
        }
        Command::Fp { variety, gens, relations, out } => {
            let v = ctx.variety(variety)?;
            let rels = relations.iter().map(|r| Equation::parse(r)).collect::<reslat::Result<Vec<_>>>()?;
            let (q, g, free) = freealg::finitely_presented(&v, *gens, &rels, &ctx.limits)?;
            maybe_write(out, &q, ctx)?;
            ctx.say(format!("{} elements (free algebra has {})", q.size(), free.algebra.size()));
            json!({ "size": q.size(), "free_size": free.algebra.size(), "map": g.map, "algebra": algebra_value(&q) })
        }
        Command::Gen { size, min_size, props, signature, satisfy, refute, allow_large, out } => {
            let mut q = ModelQuery::up_to(*size).sizes(*min_size, *size);
            q.allow_large = *allow_large;
            if let Some(s) = signature {
                q.signature = Signature::parse(s)?;
            }
            for p in props {
                q.properties.push(ModelProperty::parse(p)?);
            }
            q.satisfy = satisfy.iter().map(|e| Quasiequation::parse(e)).collect::<reslat::Result<_>>()?;
            q.refute = refute.iter().map(|e| Quasiequation::parse(e)).collect::<reslat::Result<_>>()?;
            let models = modelgen::enumerate_models(&q, &ctx.limits)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                for m in &models {
                    write_algebra(&dir.join(format!("{}.json", m.name())), m)?;
                }
                ctx.say(format!("wrote {} files to {}", models.len(), dir.display()));
            }
            ctx.say(format!("{} algebras", models.len()));
            json!({
                "count": models.len(),
                "models": models
                    .iter()
                    .map(|m| json!({ "name": m.name(), "size": m.size(), "sha256": digest(&m.to_json()) }))
                    .collect::<Vec<_>>(),
                "algebras": if out.is_some() { Value::Null } else { json!(models.iter().map(algebra_value).collect::<Vec<_>>()) },
            })
        }
        Command::Projective { algebra, variety, general } => {
            let a = ctx.algebra(algebra)?;
            let v = ctx.variety(variety)?;
            let hoops = properties::is_bounded_hoop(&a);
            let verdict = if *general || !hoops {
                projectivity::is_projective_lf(&a, &v, &ctx.limits)?
            } else {
                projectivity::bounded_hoop_projective(&a, &v, &ctx.limits)?
            };
            ctx.say(format!("{}: {:?}", a.name(), verdict.verdict));
            serde_json::to_value(verdict)?
        }
        Command::ClassifyHeyting { algebra } => {
            let a = ctx.algebra(algebra)?;
            let c = projectivity::classify_projective_heyting(&a)?;
            ctx.say(format!("{}: {}", a.name(), if c.projective { "projective" } else { "not projective" }));
            serde_json::to_value(c)?
        }
        Command::Zeroproj { algebra, h, g, via, onto } => {
            let a = ctx.algebra(algebra)?;
            let (_, h_target, h_map) = read_hom(h)?;
            let (g_source, g_target, g_map) = read_hom(g)?;
            let c_expr = onto.clone().or(h_target).or(g_target).ok_or_else(|| anyhow!("name C with --onto"))?;
            let b_expr = via.clone().or(g_source).ok_or_else(|| anyhow!("name B with --via"))?;
            let b = ctx.algebra(&b_expr)?;
            let c = ctx.algebra(&c_expr)?;
            let hh = Homomorphism::checked(&a, &c, h_map).context("h")?;
            let gg = Homomorphism::checked(&b, &c, g_map).context("g")?;
            let f = projectivity::is_zero_projective_instance(&a, &hh, &b, &gg, &c)?;
            ctx.say(if f.is_some() { "lifting found" } else { "no lifting" });
            json!({ "lifting": f.map(|f| f.map) })
        }
        Command::Unify { variety, gens, relations, cap } => {
            let v = ctx.variety(variety)?;
            let rels = relations.iter().map(|r| Equation::parse(r)).collect::<reslat::Result<Vec<_>>>()?;
            let (fp, _, _) = freealg::finitely_presented(&v, *gens, &rels, &ctx.limits)?;
            let r = projectivity::unification_report(&fp, &v, *cap, &ctx.limits)?;
            ctx.say(format!(
                "{}: {} ({} unifiers)",
                fp.name(),
                if r.unifiable { "unifiable" } else { "not unifiable" },
                r.unifiers.len()
            ));
            serde_json::to_value(r)?
        }
        Command::Catalog => {
            let entries: Vec<Value> = catalog::entries()
                .iter()
                .map(|e| {
                    let a = catalog::lookup(e.name).expect("catalog entries load");
                    json!({
                        "name": e.name,
                        "description": e.description,
                        "expression": e.expression,
                        "size": a.size(),
                        "sha256": digest(&a.to_json()),
                    })
                })
                .collect();
            ctx.say(format!("{} entries", entries.len()));
            json!(entries)
        }
    })
}
