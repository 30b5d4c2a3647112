use std::process::Command as Proc;

use crforge_cli::manifest::{parse_expr, Expr};
use crforge_cli::selftest::FIXTURES;
use crforge_cli::{run, Manifest, Report};
use crforge_core::fixtures;
use proptest::prelude::*;
use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}.crf", env!("CARGO_MANIFEST_DIR"))
}

fn crforge(args: &[&str]) -> crforge_cli::Output {
    run(std::iter::once("crforge").chain(args.iter().copied()))
}

fn records(stdout: &str) -> Vec<Value> {
    stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn fixtures_round_trip() {
    for (name, text) in FIXTURES {
        let m = Manifest::parse(text).unwrap();
        let again = Manifest::parse(&m.render()).unwrap();
        assert_eq!(again, m, "{name}");
        assert_eq!(again.render(), m.render());
    }
}

#[test]
fn quadric_manifest_matches_library_fixture() {
    let m = Manifest::parse("order 8\nmanifold M dim 2 codim 1 vars(z, w) { Im(w) - |z|^2 }\n").unwrap();
    assert_eq!(m.manifold("M", 8).unwrap(), fixtures::quadric(8).unwrap());
    assert_eq!(m.manifold("M", 5).unwrap(), fixtures::quadric(5).unwrap());
}

#[test]
fn product_manifest_and_twist_match_library() {
    let text = std::fs::read_to_string(fixture("product")).unwrap();
    let m = Manifest::parse(&text).unwrap();
    assert_eq!(m.manifold("M", 10).unwrap(), fixtures::product_hypersurface(10).unwrap());
    assert_eq!(m.map("H", 10).unwrap(), fixtures::divergent_twist(10).unwrap());
    assert_eq!(m.map("H", 6).unwrap(), fixtures::divergent_twist(6).unwrap());
}

#[test]
fn collapsing_manifest_matches_library() {
    let text = std::fs::read_to_string(fixture("collapsing")).unwrap();
    let m = Manifest::parse(&text).unwrap();
    assert_eq!(m.manifold("M", 10).unwrap(), fixtures::collapsing_source(10).unwrap());
    assert_eq!(m.manifold("M2", 10).unwrap(), fixtures::collapsing_target(10).unwrap());
    assert_eq!(m.map("H", 10).unwrap(), fixtures::collapsing_map(10));
}

#[test]
fn rationals_and_complexified_input() {
    let a = Manifest::parse("order 6\nmanifold M dim 2 codim 1 vars(z, w) { Im(w) - |z|^2 }\n").unwrap();
    let b = Manifest::parse("order 6\nmanifold M dim 2 codim 1 complexified vars(z, w) { (w - w_bar)/(2*i) - z*z_bar }\n").unwrap();
    assert_eq!(a.manifold("M", 6).unwrap(), b.manifold("M", 6).unwrap());
    let c = Manifest::parse("order 6\nmanifold M dim 2 codim 1 vars(z, w) { Im(w)*3/2 - 3/2*|z|^2 }\n").unwrap();
    // a rescaled defining function has the same normal form
    assert_eq!(a.manifold("M", 6).unwrap().q(), c.manifold("M", 6).unwrap().q());
}

#[test]
fn parse_errors_carry_positions() {
    let cases = [
        ("order 4\nmanifold M dim 2 codim 1 vars(z, w) { Im(w) - |q|^2 }\n", "2:39"),
        ("order 4\nmanifold M dim 2 codim 1 vars(z, w) { Im(w) + }\n", "2:47"),
        ("order 4\nmanifold M dim 2 codim 1 vars(z, w) { Im(w), Im(z) }\n", "arity"),
        ("order 4\nmanifold M dim 3 codim 1 vars(z, w) { Im(w) }\n", "arity"),
        ("order 4\nmanifold M dim 2 codim 1 vars(z, w) { Im(z*w) }\n", "not a manifold"),
        ("order 4\nmanifold M dim 2 codim 1 vars(z, w) { Im(w) }\nmap F : M -> N { z, w }\n", "`N`"),
        ("order 4\nmanifold M dim 2 codim 1 vars(z, w) { Im(w) }\nmap M : M -> M { z, w }\n", "duplicate"),
        ("order 4\nmanifold M dim 2 codim 1 vars(z, w) { Im(w) }\nmap F : M -> M { z, z_bar }\n", "not allowed"),
        ("order 4\nmanifold M dim 2 codim 1 vars(z, w) { Im(w) }\nmap F : M -> M { 1 + z, w }\n", "vanish"),
        ("manifold M dim 2 codim 1 vars(z, w) { Im(w) }\n", "order"),
        ("order 4\nseries h = h + z\nmanifold M dim 2 codim 1 vars(z, w) { Im(w) + h }\n", "itself"),
    ];
    for (text, needle) in cases {
        let e = Manifest::parse(text).unwrap_err().to_string();
        assert!(e.contains(needle), "{e:?} should mention {needle}");
    }
}

#[test]
fn empty_report_is_a_header() {
    let r = Report::new("check-map");
    assert_eq!(r.emit(crforge_cli::Format::Human), "crforge check-map: 0 check(s)\n");
    assert_eq!(r.emit(crforge_cli::Format::JsonLines), "");
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn finite_type_on_quadric() {
    let out = crforge(&["finite-type", "--input", &fixture("quadric"), "--manifold", "M", "--order", "8", "--format", "json-lines"]);
    assert_eq!(out.code, 0);
    let rec = &records(&out.stdout)[0];
    assert_eq!(rec["verdict"], "finite-type");
    assert_eq!(rec["certificate"]["j0"], 2);
    assert_eq!(rec["certificate"]["segre_ranks"], serde_json::json!([1, 2]));
    assert!(rec["certified_order"].is_u64());
    assert!(rec["millis"].is_null());
    for key in ["check", "inputs", "verdict", "certified_order", "certificate", "seed", "millis"] {
        assert!(rec.get(key).is_some(), "{key}");
    }
}

#[test]
fn twist_has_the_identity_reflection_ideal() {
    let out = crforge(&["ideal-equal", "--input", &fixture("product"), "--map", "H", "--map2", "Id", "--order", "10", "--format", "json-lines"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(records(&out.stdout)[0]["verdict"], "true");
}

#[test]
fn exit_codes() {
    let bad = crforge(&["check-map", "--input", &fixture("quadric"), "--map", "Bad", "--format", "json-lines"]);
    assert_eq!(bad.code, 1);
    let rec = &records(&bad.stdout)[0];
    assert_eq!(rec["certificate"]["degree"], 2);
    let inconclusive = crforge(&["finite-map", "--input", &fixture("collapsing"), "--map", "H"]);
    assert_eq!(inconclusive.code, 3);
    assert_eq!(crforge(&["check-map", "--input", &fixture("quadric"), "--map", "Aut"]).code, 0);
    assert_eq!(crforge(&["no-such-command"]).code, 2);
    assert_eq!(crforge(&["check-map", "--input", &fixture("quadric")]).code, 2);
    assert_eq!(crforge(&["check-map", "--input", "/nonexistent.crf"]).code, 2);
    assert_eq!(crforge(&["segre", "--input", &fixture("quadric"), "--order", "11"]).code, 2);
    assert_eq!(crforge(&["--help"]).code, 0);
}

#[test]
fn determine_is_deterministic_and_reports_counts() {
    let args = ["determine", "--input", &fixture("quadric"), "--map", "Id", "--jet-order", "1", "--trials", "16", "--seed", "11", "--format", "json-lines"];
    let a = crforge(&args);
    let b = crforge(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
    let rec = &records(&a.stdout)[0];
    assert_eq!(rec["seed"], 11);
    for key in ["survivors", "ideal_passes", "level_passes", "margin", "counterexamples"] {
        assert!(rec["certificate"].get(key).is_some(), "{key}");
    }
    let passing = crforge(&["determine", "--input", &fixture("quadric"), "--map", "Id", "--jet-order", "2", "--trials", "16", "--seed", "11"]);
    assert_eq!(passing.code, 0, "{}", passing.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let exe = env!("CARGO_BIN_EXE_crforge");
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Proc::new(exe);
        c.args(["determine", "--input", &fixture("product"), "--map", "Id", "--trials", "3", "--format", "json-lines"]);
        if let Some(f) = flag {
            c.args(["--seed", f]);
        }
        c.env_remove("CRFORGE_SEED");
        if let Some(e) = env {
            c.env("CRFORGE_SEED", e);
        }
        let out = c.output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v["seed"].as_u64().unwrap()
    };
    assert_eq!(run(Some("42"), None), 42);
    assert_eq!(run(Some("42"), Some("5")), 5);
    assert_eq!(run(None, None), 0);
}

#[test]
fn timing_fills_millis() {
    let out = crforge(&["check-generic", "--input", &fixture("quadric"), "--timing", "--format", "json-lines"]);
    assert!(records(&out.stdout)[0]["millis"].is_u64());
}

#[test]
fn every_command_runs_on_the_quadric() {
    let f = fixture("quadric");
    let cmds: &[&[&str]] = &[
        &["check-generic"],
        &["normal-form"],
        &["segre", "--segre-level", "2"],
        &["iterate-segre", "--segre-level", "2"],
        &["holo-nondeg"],
        &["reflection-ideal", "--map", "Aut"],
        &["rank", "--map", "Scale"],
        &["not-totally-degenerate", "--map", "Id"],
        &["finite-map", "--map", "Id"],
        &["build-system", "--map", "Aut", "--kind", "phi", "--level", "2"],
        &["build-system", "--map", "Aut", "--kind", "psi", "--tilde", "--segre-level", "1"],
        &["check-jet-solution", "--map", "Scale", "--kind", "theta", "--epsilon-bound", "2"],
        &["key-identity", "--map", "Aut", "--map2", "Aut"],
    ];
    for c in cmds {
        let mut args = c.to_vec();
        args.extend(["--input", &f, "--order", "7"]);
        let out = crforge(&args);
        assert_eq!(out.code, 0, "{c:?}: {}{}", out.stdout, out.stderr);
    }
}

#[test]
fn selftest_passes() {
    let out = crforge(&["selftest", "--format", "json-lines"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(records(&out.stdout).iter().all(|r| r["verdict"] == "as-expected"));
    assert_eq!(crforge(&["selftest", "--order", "6"]).code, 2);
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..20).prop_map(|n| Expr::Num(n.to_string())),
        prop::sample::select(vec!["z", "w", "i", "z_bar", "h"]).prop_map(|s| Expr::Var(s.to_string())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::Neg(b(a))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Div(b(x), b(y))),
            (inner.clone(), 0u32..4).prop_map(move |(x, k)| Expr::Pow(b(x), k)),
            inner.clone().prop_map(move |x| Expr::AbsSq(b(x))),
            (prop::sample::select(vec!["Im", "Re", "conj", "exp"]), inner)
                .prop_map(|(f, x)| Expr::Call(f.to_string(), vec![x])),
        ]
    })
}

proptest! {
    #[test]
    fn expressions_round_trip(e in expr_strategy()) {
        let text = e.to_string();
        prop_assert_eq!(parse_expr(&text).unwrap(), e, "{}", text);
    }
}
