//! The embedded fixture corpus with the verdicts each check must produce.

use serde_json::json;

use crate::commands::{run_command, Command, Family, Kind, Options};
use crate::error::CliError;
use crate::manifest::Manifest;
use crate::report::{Outcome, Record};

pub const DEFAULT_ORDER: u32 = 8;
const MIN_ORDER: u32 = 8;

pub const FIXTURES: &[(&str, &str)] = &[
    ("hyperplane", include_str!("../../../fixtures/hyperplane.crf")),
    ("quadric", include_str!("../../../fixtures/quadric.crf")),
    ("product", include_str!("../../../fixtures/product.crf")),
    ("collapsing", include_str!("../../../fixtures/collapsing.crf")),
];

enum Expect {
    Verdict(&'static str),
    AllPass,
}

struct Case {
    fixture: &'static str,
    command: Command,
    manifold: Option<&'static str>,
    map: Option<&'static str>,
    map2: Option<&'static str>,
    expect: Expect,
    tweak: fn(&mut Options),
}

fn none(_: &mut Options) {}

const fn case(fixture: &'static str, command: Command, expect: Expect) -> Case {
    Case { fixture, command, manifold: None, map: None, map2: None, expect, tweak: none }
}

impl Case {
    const fn manifold(mut self, m: &'static str) -> Case {
        self.manifold = Some(m);
        self
    }
    const fn map(mut self, m: &'static str) -> Case {
        self.map = Some(m);
        self
    }
    const fn map2(mut self, m: &'static str) -> Case {
        self.map2 = Some(m);
        self
    }
    const fn tweak(mut self, f: fn(&mut Options)) -> Case {
        self.tweak = f;
        self
    }
}

fn cases() -> Vec<Case> {
    use Command::*;
    use Expect::*;
    vec![
        case("hyperplane", CheckGeneric, Verdict("generic")),
        case("hyperplane", Segre, AllPass),
        case("hyperplane", FiniteType, Verdict("not-finite-type")),
        case("hyperplane", HoloNondeg, Verdict("degenerate")),
        case("hyperplane", CheckMap, Verdict("maps-into-target")),
        case("quadric", CheckGeneric, Verdict("generic")),
        case("quadric", Segre, AllPass),
        case("quadric", FiniteType, Verdict("finite-type")),
        case("quadric", HoloNondeg, Verdict("nondegenerate")),
        case("quadric", CheckMap, Verdict("maps-into-target")).map("Id"),
        case("quadric", CheckMap, Verdict("maps-into-target")).map("Aut"),
        case("quadric", CheckMap, Verdict("maps-into-target")).map("Scale"),
        case("quadric", CheckMap, Verdict("fails at degree 2")).map("Bad"),
        case("quadric", IdealEqual, Verdict("false")).map("Aut").map2("Id"),
        case("quadric", IdealEqual, Verdict("true")).map("Scale").map2("Scale"),
        case("quadric", NotTotallyDegenerate, Verdict("not-totally-degenerate")).map("Aut"),
        case("quadric", FiniteMap, Verdict("finite")).map("Aut"),
        case("quadric", BuildSystem, AllPass).map("Aut").tweak(|o| {
            o.kind = Some(Kind::Theta);
            o.tilde = true;
        }),
        case("quadric", CheckJetSolution, Verdict("solves")).map("Aut").tweak(|o| o.level = Some(2)),
        case("quadric", CheckJetSolution, Verdict("does-not-solve")).map("Aut").map2("Scale"),
        case("quadric", KeyIdentity, Verdict("holds")).map("Aut"),
        case("quadric", Determine, Verdict("determined")).map("Id").tweak(|o| {
            o.family = Some(Family::Mixed);
            o.trials = Some(12);
        }),
        case("product", CheckGeneric, Verdict("generic")),
        case("product", Segre, AllPass).tweak(|o| o.segre_level = Some(2)),
        case("product", FiniteType, Verdict("finite-type")),
        case("product", HoloNondeg, Verdict("degenerate")),
        case("product", CheckMap, Verdict("maps-into-target")).map("H"),
        case("product", IdealEqual, Verdict("true")).map("H").map2("Id"),
        case("product", FiniteMap, Verdict("finite")).map("H"),
        case("product", Determine, Verdict("determined")).map("Id").tweak(|o| {
            o.family = Some(Family::Twist);
            o.trials = Some(6);
        }),
        case("collapsing", CheckGeneric, Verdict("generic")).manifold("M"),
        case("collapsing", CheckGeneric, Verdict("generic")).manifold("M2"),
        case("collapsing", FiniteType, Verdict("finite-type")).manifold("M"),
        case("collapsing", HoloNondeg, Verdict("nondegenerate")).manifold("M2"),
        case("collapsing", CheckMap, Verdict("maps-into-target")).map("H"),
        case("collapsing", NotTotallyDegenerate, Verdict("not-totally-degenerate")).map("H"),
        case("collapsing", FiniteMap, Verdict("not-finite-up-to-order")).map("H"),
        case("collapsing", Rank, Verdict("rank >= 3")).map("H"),
    ]
}

pub fn run(order: u32, timing: bool) -> Result<Vec<Record>, CliError> {
    if order < MIN_ORDER {
        return Err(CliError::Usage(format!("selftest needs --order {MIN_ORDER} or higher")));
    }
    let manifests: Vec<(&str, Manifest)> =
        FIXTURES.iter().map(|(n, text)| Ok((*n, Manifest::parse(text)?))).collect::<Result<_, CliError>>()?;
    let mut out = Vec::new();
    for c in cases() {
        let mf = &manifests.iter().find(|(n, _)| *n == c.fixture).expect("known fixture").1;
        let mut opts = Options {
            order: Some(order),
            manifold: c.manifold.map(str::to_string),
            map: c.map.map(str::to_string),
            map2: c.map2.map(str::to_string),
            timing,
            ..Options::default()
        };
        (c.tweak)(&mut opts);
        let rep = run_command(Some(mf), c.command, &opts)?;
        let got: Vec<&str> = rep.records.iter().map(|r| r.verdict.as_str()).collect();
        let ok = match c.expect {
            Expect::Verdict(v) => got.first() == Some(&v),
            Expect::AllPass => rep.records.iter().all(|r| r.outcome == Outcome::Pass),
        };
        let order_stamp = rep.records.iter().filter_map(|r| r.certified_order).min();
        let millis = rep.records.iter().filter_map(|r| r.millis).max();
        let expected = match c.expect {
            Expect::Verdict(v) => v.to_string(),
            Expect::AllPass => "all pass".to_string(),
        };
        let mut r = Record::new(
            &format!("{}/{}", c.fixture, c.command.name()),
            if ok { Outcome::Pass } else { Outcome::Fail },
            if ok { "as-expected".to_string() } else { format!("unexpected: {}", got.join("; ")) },
            order_stamp,
        )
        .input("order", order)
        .certificate(json!({ "expected": expected, "got": got }));
        for (k, v) in [("manifold", c.manifold), ("map", c.map), ("map2", c.map2)] {
            if let Some(v) = v {
                r = r.input(k, v);
            }
        }
        r.millis = millis;
        out.push(r);
    }
    Ok(out)
}
