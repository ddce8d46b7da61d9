use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn reslat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reslat")).args(args).env_remove("RESLAT_CONFIG").output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = reslat(args);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {:?}", out));
    (out.status.code().unwrap(), v)
}

fn ok(args: &[&str]) -> Value {
    let (code, v) = report(args);
    assert_eq!(code, 0, "{v}");
    v["result"].clone()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("reslat-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn prelinearity_fails_on_four_plus_two() {
    let r = ok(&["check", "SUM_4_2", "--eq", "(x->y)|(y->x)=1"]);
    assert_eq!(r["satisfied"], false);
    assert_eq!(r["witness"], json!({"x": "a", "y": "b"}));
    let r = ok(&["check", "G4", "--eq", "(x->y)|(y->x)=1", "--eq", "x*x=x"]);
    assert_eq!(r["satisfied"], true);
    assert_eq!(r["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn three_element_lukasiewicz_chain_is_not_projective() {
    let r = ok(&["projective", "L3", "--variety", "MV3"]);
    assert_eq!(r["verdict"], "not_projective");
    assert!(r["obstruction"].is_string());
    let r = ok(&["projective", "B2", "--variety", "MV3"]);
    assert_eq!(r["verdict"], "projective");
    assert!(r["witness"].is_object());
}

#[test]
fn goedel_chain_decomposes_into_twos() {
    let r = ok(&["decompose", "G4"]);
    assert_eq!(r["components"], json!(["B2", "B2", "B2"]));
    let r = ok(&["decompose", "H_242"]);
    assert_eq!(r["components"], json!(["B2", "B4", "B2"]));
}

#[test]
fn report_envelope() {
    let (_, v) = report(&["props", "B4"]);
    assert_eq!(v["tool"], "reslat");
    assert_eq!(v["command"], json!(["props", "B4"]));
    assert_eq!(v["inputs"][0]["name"], "B4");
    assert_eq!(v["inputs"][0]["size"], 4);
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["result"]["boolean"], true);
    assert!(v.get("error").is_none());
}

#[test]
fn summaries_go_to_stderr() {
    let loud = reslat(&["si", "G3"]);
    assert!(!loud.stderr.is_empty());
    let quiet = reslat(&["-q", "si", "G3"]);
    assert!(quiet.stderr.is_empty());
    let a: Value = serde_json::from_slice(&loud.stdout).unwrap();
    let b: Value = serde_json::from_slice(&quiet.stdout).unwrap();
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["result"]["subdirectly_irreducible"], true);
}

#[test]
fn exit_codes() {
    let (code, v) = report(&["check", "nope"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "malformed_input");
    assert_eq!(report(&["check", "B2", "--eq", "x->"]).0, 2);
    let (code, v) = report(&["gen", "--size", "7"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "cap_exceeded");
    assert_eq!(report(&["prod", "G6", "G6", "G6", "--max-product-size", "100"]).0, 3);
    // a negative answer is still a success
    let (code, v) = report(&["iso", "G3", "L3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["isomorphic"], false);
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &["homs", "B4", "G3"][..],
        &["gen", "--size", "4", "--props", "divisible"],
        &["unify", "--variety", "BA", "--gens", "1", "--rel", "x=1"],
        &["filters", "PROD_3_2"],
    ] {
        let a = reslat(args);
        let b = reslat(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let par = reslat(&[args, &["--workers", "4"][..]].concat());
        let one: Value = serde_json::from_slice(&a.stdout).unwrap();
        let many: Value = serde_json::from_slice(&par.stdout).unwrap();
        assert_eq!(one["result"], many["result"], "{args:?} with workers");
    }
}

#[test]
fn config_file_and_flags() {
    let dir = scratch("config");
    let cfg = dir.join("limits.json");
    std::fs::write(&cfg, r#"{"max_model_size": 3}"#).unwrap();
    let run = |extra: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_reslat"))
            .args(["gen", "--size", "4"])
            .args(extra)
            .env("RESLAT_CONFIG", &cfg)
            .output()
            .unwrap();
        out.status.code().unwrap()
    };
    assert_eq!(run(&[]), 3);
    assert_eq!(run(&["--max-model-size", "4"]), 0);
    assert_eq!(run(&["--allow-large"]), 0);
    assert_eq!(report(&["--config", s(&cfg), "gen", "--size", "4"]).0, 3);
    std::fs::write(&cfg, "{not json").unwrap();
    assert_eq!(report(&["--config", s(&cfg), "catalog"]).0, 2);
}

#[test]
fn generated_counts() {
    let r = ok(&["gen", "--size", "5"]);
    assert_eq!(r["count"], 37);
    let r = ok(&["gen", "--size", "4", "--min-size", "4", "--props", "bounded-hoop"]);
    let hoops = r["count"].as_u64().unwrap();
    let r = ok(&["gen", "--size", "4", "--min-size", "4", "--satisfy", "x&y=x*(x->y)"]);
    assert_eq!(r["count"].as_u64().unwrap(), hoops);
    let r = ok(&["gen", "--size", "4", "--min-size", "4", "--refute", "x*x=x"]);
    assert!(r["count"].as_u64().unwrap() < 7);
}

#[test]
fn generated_files_reload() {
    let dir = scratch("gen");
    let r = ok(&["gen", "--size", "4", "--props", "heyting", "--out", s(&dir)]);
    assert!(r["algebras"].is_null());
    let models = r["models"].as_array().unwrap();
    assert_eq!(models.len(), std::fs::read_dir(&dir).unwrap().count());
    for m in models {
        let path = dir.join(format!("{}.json", m["name"].as_str().unwrap()));
        let (code, v) = report(&["props", s(&path)]);
        assert_eq!(code, 0);
        assert_eq!(v["inputs"][0]["sha256"], m["sha256"]);
        assert_eq!(v["result"]["heyting"], true);
    }
}

#[test]
fn ordinal_sum_written_and_reloaded() {
    let dir = scratch("ordsum");
    let file = dir.join("sum.json");
    let r = ok(&["ordsum", "B4", "B2", "--out", s(&file)]);
    assert_eq!(r["algebra"]["size"], 5);
    assert_eq!(ok(&["iso", s(&file), "SUM_4_2"])["isomorphic"], true);
    let r = ok(&["ordsum", s(&file), "B4", "B2"]);
    assert_eq!(r["algebra"]["size"], 9);
    assert_eq!(ok(&["classify-heyting", "H_242"])["projective"], true);
}

#[test]
fn variety_files() {
    let dir = scratch("variety");
    std::fs::write(dir.join("g3.json"), reslat_json("G3")).unwrap();
    let vfile = dir.join("goedel.json");
    std::fs::write(&vfile, r#"{"name": "Goedel3", "generators": ["g3.json"], "equations": ["x*x=x"]}"#).unwrap();
    let r = ok(&["free", "--variety", s(&vfile), "--gens", "1"]);
    assert_eq!(r["size"], 6);
    assert_eq!(ok(&["member", "B4", "--variety", s(&vfile)])["member"], true);
    assert_eq!(ok(&["member", "L3", "--variety", s(&vfile)])["member"], false);
    std::fs::write(&vfile, r#"{"name": "bad", "generators": ["L3"], "equations": ["x*x=x"]}"#).unwrap();
    assert_eq!(report(&["free", "--variety", s(&vfile), "--gens", "1"]).0, 2);
}

/// The file form of a catalog algebra, via `prod` of one factor.
fn reslat_json(name: &str) -> String {
    let r = ok(&["prod", name]);
    let mut a = r["algebra"].clone();
    a["name"] = json!(name);
    serde_json::to_string(&a).unwrap()
}

#[test]
fn zero_projective_lifting_from_files() {
    let dir = scratch("zeroproj");
    let h = dir.join("h.json");
    let g = dir.join("g.json");
    std::fs::write(&h, "[0, 1]").unwrap();
    std::fs::write(&g, r#"{"source": "G3", "target": "B2", "map": [0, 1, 1]}"#).unwrap();
    let r = ok(&["zeroproj", "B2", s(&h), s(&g)]);
    assert_eq!(r["lifting"], json!([0, 2]));
    std::fs::write(&g, "[0, 1, 1]").unwrap();
    assert_eq!(report(&["zeroproj", "B2", s(&h), s(&g)]).0, 2);
    let r = ok(&["zeroproj", "B2", s(&h), s(&g), "--via", "G3", "--onto", "B2"]);
    assert_eq!(r["lifting"], json!([0, 2]));
    std::fs::write(&g, "[0, 0, 1]").unwrap();
    let (code, v) = report(&["zeroproj", "B2", s(&h), s(&g), "--via", "G3", "--onto", "B2"]);
    assert_eq!(code, 2, "{v}");
}

#[test]
fn morphism_commands() {
    assert_eq!(ok(&["homs", "B2", "B4"]), json!([[0, 3]]));
    assert_eq!(ok(&["homs", "B4", "B2", "--surjective"]).as_array().unwrap().len(), 2);
    assert_eq!(ok(&["homs", "B4", "B2", "--limit", "1"]).as_array().unwrap().len(), 1);
    let r = ok(&["retract", "B2", "G3"]);
    assert_eq!(r["retract"], true);
    assert_eq!(ok(&["subgen", "B4", "a"])["elements"].as_array().unwrap().len(), 4);
    assert_eq!(ok(&["quotient", "G3", "m"])["algebra"]["size"], 2);
    assert_eq!(ok(&["filters", "G4"]).as_array().unwrap().len(), 4);
    let r = ok(&["fp", "--variety", "BA", "--gens", "2", "--rel", "x=y"]);
    assert_eq!(r["size"], 4);
    assert_eq!(r["free_size"], 16);
}

#[test]
fn catalog_lists_every_entry() {
    let r = ok(&["catalog"]);
    let names: Vec<&str> = r.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for want in ["B2", "B4", "G3", "G6", "L3", "L5", "SUM_4_2", "PROD_3_2", "H_242"] {
        assert!(names.contains(&want), "{want}");
    }
}
