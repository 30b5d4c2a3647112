//! Subcommand dispatch.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use crforge_core::jets::jet_of_map;
use crforge_core::manifolds::{
    default_alpha_bound, finite_type, holo_nondegeneracy_check, FiniteTypeRoute, GenericManifold, HoloNondegVerdict,
    SegreMapping,
};
use crforge_core::powerseries::generic_rank;
use crforge_core::reflection::{
    assemble_from_tables, build_system, check_jet_solution, determination_experiment, finite_map_check, ideal_compare,
    key_identity_check, not_totally_degenerate, reflection_generators, restrict_jet, sends_into, ExperimentConfig,
    FiniteMapVerdict, KeyIdentityVerdict, MapCheck, PerturbationFamily, SystemKind,
};
use crforge_core::{Series, SeriesMap};

use crate::error::CliError;
use crate::manifest::Manifest;
use crate::report::{Format, Outcome, Record, Report};
use crate::selftest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    CheckGeneric,
    NormalForm,
    Segre,
    IterateSegre,
    FiniteType,
    HoloNondeg,
    CheckMap,
    ReflectionIdeal,
    IdealEqual,
    Rank,
    NotTotallyDegenerate,
    FiniteMap,
    BuildSystem,
    CheckJetSolution,
    KeyIdentity,
    Determine,
    Selftest,
}

impl Command {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Phi,
    Psi,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Dense,
    Automorphism,
    Twist,
    Mixed,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Options {
    /// Manifest file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Truncation order (at most the manifest order).
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub map2: Option<String>,
    #[arg(long)]
    pub manifold: Option<String>,
    #[arg(long)]
    pub target: Option<String>,
    /// Derivative bound `l`.
    #[arg(long)]
    pub level: Option<u32>,
    /// Segre level `j`.
    #[arg(long)]
    pub segre_level: Option<usize>,
    #[arg(long)]
    pub epsilon_bound: Option<u32>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, env = "CRFORGE_SEED")]
    pub seed: Option<u64>,
    /// System for build-system and friends.
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long)]
    pub tilde: bool,
    /// Jet order `K` at which candidates agree with the base map.
    #[arg(long)]
    pub jet_order: Option<u32>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub perturbation_degree: Option<u32>,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
    /// Record wall-clock time per check.
    #[arg(long)]
    pub timing: bool,
}

pub fn load(opts: &Options) -> Result<Manifest, CliError> {
    let path = opts.input.as_ref().ok_or_else(|| CliError::Usage("missing --input".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    Manifest::parse(&text)
}

/// Run one command against a parsed manifest (ignored by `selftest`).
pub fn run_command(manifest: Option<&Manifest>, cmd: Command, opts: &Options) -> Result<Report, CliError> {
    let mut report = Report::new(&cmd.name());
    if cmd == Command::Selftest {
        let order = opts.order.unwrap_or(selftest::DEFAULT_ORDER);
        for r in selftest::run(order, opts.timing)? {
            report.push(r);
        }
        return Ok(report);
    }
    let mf = manifest.ok_or_else(|| CliError::Usage("missing --input".into()))?;
    let ctx = Ctx { mf, opts, order: opts.order.unwrap_or(mf.order) };
    let start = Instant::now();
    let mut records = ctx.dispatch(cmd)?;
    if opts.timing {
        let ms = start.elapsed().as_millis() as u64;
        for r in &mut records {
            r.millis = Some(ms);
        }
    }
    for r in records {
        report.push(r);
    }
    Ok(report)
}

struct Ctx<'a> {
    mf: &'a Manifest,
    opts: &'a Options,
    order: u32,
}

fn only<'a>(names: impl Iterator<Item = &'a str>, what: &str, flag: &str) -> Result<String, CliError> {
    let v: Vec<&str> = names.collect();
    match v.as_slice() {
        [one] => Ok(one.to_string()),
        [] => Err(CliError::Usage(format!("the manifest declares no {what}"))),
        _ => Err(CliError::Usage(format!("missing {flag}: the manifest declares several {what}s"))),
    }
}

fn poly_json(s: &Series, names: &[String]) -> Value {
    Value::String(s.pretty(names))
}

fn verdict_of(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

impl Ctx<'_> {
    fn manifold_name(&self) -> Result<String, CliError> {
        match &self.opts.manifold {
            Some(n) => Ok(n.clone()),
            None => only(self.mf.manifolds.iter().map(|d| d.name.value.as_str()), "manifold", "--manifold"),
        }
    }

    fn manifold(&self) -> Result<(String, GenericManifold), CliError> {
        let name = self.manifold_name()?;
        let m = self.mf.manifold(&name, self.order)?;
        Ok((name, m))
    }

    fn map_name(&self) -> Result<String, CliError> {
        match &self.opts.map {
            Some(n) => Ok(n.clone()),
            None => only(self.mf.maps.iter().map(|d| d.name.value.as_str()), "map", "--map"),
        }
    }

    /// The map with its source and target manifolds.
    fn map_with(&self, name: &str) -> Result<(SeriesMap, GenericManifold, GenericManifold), CliError> {
        let d = self.mf.map_decl(name).ok_or_else(|| CliError::Usage(format!("no map named `{name}`")))?;
        let (src, tgt) = (d.source.value.clone(), d.target.value.clone());
        if let Some(m) = &self.opts.manifold {
            if *m != src {
                return Err(CliError::Usage(format!("map `{name}` has source `{src}`, not `{m}`")));
            }
        }
        if let Some(t) = &self.opts.target {
            if *t != tgt {
                return Err(CliError::Usage(format!("map `{name}` has target `{tgt}`, not `{t}`")));
            }
        }
        Ok((self.mf.map(name, self.order)?, self.mf.manifold(&src, self.order)?, self.mf.manifold(&tgt, self.order)?))
    }

    fn map2(&self, first: &str) -> Result<(String, SeriesMap), CliError> {
        let name = self.opts.map2.clone().ok_or_else(|| CliError::Usage("missing --map2".into()))?;
        let a = self.mf.map_decl(first).expect("checked");
        let b = self.mf.map_decl(&name).ok_or_else(|| CliError::Usage(format!("no map named `{name}`")))?;
        if a.source.value != b.source.value || a.target.value != b.target.value {
            return Err(CliError::Usage(format!("maps `{first}` and `{name}` have different source or target")));
        }
        Ok((name.clone(), self.mf.map(&name, self.order)?))
    }

    fn base(&self, check: &str, outcome: Outcome, verdict: impl Into<String>, order: Option<u32>) -> Record {
        Record::new(check, outcome, verdict, order).input("order", self.order)
    }

    fn dispatch(&self, cmd: Command) -> Result<Vec<Record>, CliError> {
        match cmd {
            Command::CheckGeneric => self.check_generic(),
            Command::NormalForm => self.normal_form(),
            Command::Segre => self.segre(),
            Command::IterateSegre => self.iterate_segre(),
            Command::FiniteType => self.finite_type(),
            Command::HoloNondeg => self.holo_nondeg(),
            Command::CheckMap => self.check_map(),
            Command::ReflectionIdeal => self.reflection_ideal(),
            Command::IdealEqual => self.ideal_equal(),
            Command::Rank => self.rank(),
            Command::NotTotallyDegenerate => self.not_totally_degenerate(),
            Command::FiniteMap => self.finite_map(),
            Command::BuildSystem => self.build_system(),
            Command::CheckJetSolution => self.check_jet_solution(),
            Command::KeyIdentity => self.key_identity(),
            Command::Determine => self.determine(),
            Command::Selftest => unreachable!("handled by run_command"),
        }
    }

    fn check_generic(&self) -> Result<Vec<Record>, CliError> {
        let (name, m) = self.manifold()?;
        let residual = m.reality_residual()?;
        let failure = residual.comps().iter().filter_map(|s| s.valuation()).min();
        let verdict = if failure.is_none() { "generic" } else { "not-real" };
        let cert = json!({
            "N": m.big_n(),
            "n": m.n(),
            "codim": m.codim(),
            "z": m.z_idx().iter().map(|&i| m.names()[i].clone()).collect::<Vec<_>>(),
            "w": m.w_idx().iter().map(|&i| m.names()[i].clone()).collect::<Vec<_>>(),
            "reality_failure_degree": failure,
        });
        Ok(vec![self
            .base("check-generic", verdict_of(failure.is_none()), verdict, Some(residual.order()))
            .input("manifold", name)
            .certificate(cert)])
    }

    fn q_names(m: &GenericManifold) -> Vec<String> {
        let mut names: Vec<String> = m.z_idx().iter().map(|&i| m.names()[i].clone()).collect();
        names.extend(m.names().iter().map(|s| format!("{s}_bar")));
        names
    }

    fn normal_form(&self) -> Result<Vec<Record>, CliError> {
        let (name, m) = self.manifold()?;
        let qn = Self::q_names(&m);
        let eqs: Vec<Value> = m
            .w_idx()
            .iter()
            .zip(m.q().comps())
            .map(|(&w, q)| Value::String(format!("{} = {}", m.names()[w], q.pretty(&qn))))
            .collect();
        Ok(vec![self
            .base("normal-form", Outcome::Pass, "computed", Some(m.q().order()))
            .input("manifold", name)
            .certificate(json!({ "equations": eqs }))])
    }

    fn segre(&self) -> Result<Vec<Record>, CliError> {
        let (name, m) = self.manifold()?;
        let jmax = self.opts.segre_level.unwrap_or(3);
        let s = SegreMapping::standard(&m);
        let mut out = Vec::new();
        let fail = s.check_parametrizes()?;
        out.push(
            self.base("segre-parametrizes", verdict_of(fail.is_none()), if fail.is_none() { "holds" } else { "fails" }, Some(m.order()))
                .input("manifold", name.clone())
                .certificate(json!({ "failure": fail.map(|f| json!({"component": f.component, "degree": f.degree})) })),
        );
        for j in 0..=jmax {
            let fail = s.check_iterate_identity(j)?;
            out.push(
                self.base("segre-iterate-identity", verdict_of(fail.is_none()), if fail.is_none() { "holds" } else { "fails" }, Some(m.order()))
                    .input("manifold", name.clone())
                    .input("j", j)
                    .certificate(json!({ "failure": fail.map(|f| json!({"component": f.component, "degree": f.degree})) })),
            );
        }
        for j in 0..jmax.min(2) {
            let fail = s.check_xi_identity(j)?;
            out.push(
                self.base("segre-retraction", verdict_of(fail.is_none()), if fail.is_none() { "holds" } else { "fails" }, Some(m.order()))
                    .input("manifold", name.clone())
                    .input("j", j)
                    .certificate(json!({ "failure": fail.map(|f| json!({"component": f.component, "degree": f.degree})) })),
            );
        }
        Ok(out)
    }

    fn iterate_segre(&self) -> Result<Vec<Record>, CliError> {
        let (name, m) = self.manifold()?;
        let j = self.opts.segre_level.unwrap_or(2);
        let v = SegreMapping::standard(&m).iterate(j)?;
        let n = m.n();
        let tn: Vec<String> = (1..=j).flat_map(|a| (1..=n).map(move |b| format!("t{a}_{b}"))).collect();
        let comps: Vec<Value> = v.comps().iter().map(|s| poly_json(s, &tn)).collect();
        let rank = if j == 0 { 0 } else { generic_rank(&v)?.rank };
        Ok(vec![self
            .base("iterate-segre", Outcome::Pass, format!("rank {rank}"), Some(v.order()))
            .input("manifold", name)
            .input("j", j)
            .certificate(json!({ "components": comps, "rank": rank }))])
    }

    fn finite_type(&self) -> Result<Vec<Record>, CliError> {
        let (name, m) = self.manifold()?;
        let route = match self.opts.segre_level {
            Some(j) => FiniteTypeRoute::Both { depth: 2 * m.big_n() - m.codim() + 1, j_bound: j },
            None => FiniteTypeRoute::default_for(&m),
        };
        let r = finite_type(&m, route)?;
        let outcome = if r.routes_disagree {
            Outcome::Inconclusive
        } else {
            verdict_of(r.finite_type)
        };
        let verdict = if r.routes_disagree {
            "routes-disagree"
        } else if r.finite_type {
            "finite-type"
        } else {
            "not-finite-type"
        };
        let order = [r.lie.as_ref().map(|l| l.certified_order), r.segre.as_ref().map(|s| s.certified_order)]
            .into_iter()
            .flatten()
            .min();
        let cert = json!({
            "j0": r.segre.as_ref().and_then(|s| s.j0),
            "segre_ranks": r.segre.as_ref().map(|s| s.ranks.clone()),
            "lie_span": r.lie.as_ref().map(|l| l.span_dim),
            "lie_target": r.lie.as_ref().map(|l| l.target),
            "lie_depth": r.lie.as_ref().map(|l| l.depth),
        });
        Ok(vec![self.base("finite-type", outcome, verdict, order).input("manifold", name).certificate(cert)])
    }

    fn holo_nondeg(&self) -> Result<Vec<Record>, CliError> {
        let (name, m) = self.manifold()?;
        let bound = self.opts.level.unwrap_or_else(|| default_alpha_bound(&m));
        let v = holo_nondegeneracy_check(&m, bound)?;
        let all = m.complexified_names();
        let (outcome, order, cert) = match &v {
            HoloNondegVerdict::Nondegenerate { rows, determinant, certified_order } => (
                Outcome::Pass,
                *certified_order,
                json!({ "rows": rows, "determinant": determinant.pretty(&all[..m.big_n()]) }),
            ),
            HoloNondegVerdict::Degenerate { field, certified_order } => (
                Outcome::Fail,
                *certified_order,
                json!({ "field": field.iter().map(|s| s.pretty(&all[..m.big_n()])).collect::<Vec<_>>() }),
            ),
            HoloNondegVerdict::Inconclusive { certified_order, reason } => {
                (Outcome::Inconclusive, *certified_order, json!({ "reason": reason }))
            }
        };
        Ok(vec![self
            .base("holo-nondeg", outcome, v.label(), Some(order))
            .input("manifold", name)
            .input("alpha_bound", bound)
            .certificate(cert)])
    }

    fn check_map(&self) -> Result<Vec<Record>, CliError> {
        let name = self.map_name()?;
        let (h, m, mp) = self.map_with(&name)?;
        let r = sends_into(&m, &mp, &h)?;
        let rec = self.base("check-map", Outcome::Pass, "", None).input("map", name);
        Ok(vec![match r {
            MapCheck::Holds { order } => Record { verdict: "maps-into-target".into(), certified_order: Some(order), ..rec },
            MapCheck::Fails { degree, generator, monomial, coefficient } => Record {
                verdict: format!("fails at degree {degree}"),
                outcome: Outcome::Fail,
                certified_order: Some(degree),
                ..rec
            }
            .certificate(json!({
                "degree": degree,
                "generator": generator,
                "monomial": monomial,
                "coefficient": coefficient.to_string(),
            })),
        }])
    }

    fn reflection_names(&self, m: &GenericManifold, mp: &GenericManifold) -> Vec<String> {
        let mut names = m.names().to_vec();
        names.extend(mp.names().iter().map(|s| format!("{s}'_bar")));
        names
    }

    fn reflection_ideal(&self) -> Result<Vec<Record>, CliError> {
        let name = self.map_name()?;
        let (h, m, mp) = self.map_with(&name)?;
        let r = reflection_generators(&mp, &h)?;
        let names = self.reflection_names(&m, &mp);
        let gens: Vec<Value> = r.generators.comps().iter().map(|s| poly_json(s, &names)).collect();
        Ok(vec![self
            .base("reflection-ideal", Outcome::Pass, "computed", Some(r.order))
            .input("map", name)
            .certificate(json!({ "generators": gens, "polynomial_data": r.polynomial_data }))])
    }

    fn ideal_equal(&self) -> Result<Vec<Record>, CliError> {
        let name = self.map_name()?;
        let (h, _m, mp) = self.map_with(&name)?;
        let (name2, h2) = self.map2(&name)?;
        let c = ideal_compare(&mp, &h, &h2)?;
        let cert = json!({
            "obstruction": c.obstruction.as_ref().map(|(g, d, mono, coeff)| json!({
                "generator": g, "degree": d, "monomial": mono, "coefficient": coeff.to_string()
            })),
        });
        Ok(vec![self
            .base("ideal-equal", verdict_of(c.equal), if c.equal { "true" } else { "false" }, Some(c.certified_order))
            .input("map", name)
            .input("map2", name2)
            .certificate(cert)])
    }

    fn rank(&self) -> Result<Vec<Record>, CliError> {
        let name = self.map_name()?;
        let (h, m, _) = self.map_with(&name)?;
        let r = generic_rank(&h)?;
        let cert = json!({
            "rank": r.rank,
            "method": r.method,
            "minor_rows": r.minor_rows,
            "minor_cols": r.minor_cols,
            "minor": r.minor.as_ref().map(|s| s.pretty(m.names())),
        });
        Ok(vec![self
            .base("rank", Outcome::Pass, format!("rank >= {}", r.rank), Some(r.certified_order))
            .input("map", name)
            .certificate(cert)])
    }

    fn not_totally_degenerate(&self) -> Result<Vec<Record>, CliError> {
        let name = self.map_name()?;
        let (h, m, mp) = self.map_with(&name)?;
        let r = not_totally_degenerate(&m, &mp, &h)?;
        let outcome = if r.certified { Outcome::Pass } else { Outcome::Inconclusive };
        let verdict = if r.certified { "not-totally-degenerate" } else { "unresolved" };
        Ok(vec![self
            .base("not-totally-degenerate", outcome, verdict, Some(r.certified_order))
            .input("map", name)
            .certificate(json!({ "rank": r.rank, "target": r.target }))])
    }

    fn finite_map(&self) -> Result<Vec<Record>, CliError> {
        let name = self.map_name()?;
        let (h, _, _) = self.map_with(&name)?;
        let v = finite_map_check(&h, self.order)?;
        let rec = self.base("finite-map", Outcome::Pass, "", None).input("map", name);
        Ok(vec![match v {
            FiniteMapVerdict::Finite { multiplicity, stabilized_at, exact, order } => Record {
                verdict: "finite".into(),
                certified_order: Some(order),
                ..rec
            }
            .certificate(json!({ "multiplicity": multiplicity, "stabilized_at": stabilized_at, "exact": exact })),
            FiniteMapVerdict::NotFiniteUpToOrder { order, evidence } => Record {
                verdict: "not-finite-up-to-order".into(),
                outcome: Outcome::Inconclusive,
                certified_order: Some(order),
                ..rec
            }
            .certificate(json!({ "evidence": evidence })),
        }])
    }

    fn kind(&self) -> SystemKind {
        match self.opts.kind.unwrap_or(Kind::Psi) {
            Kind::Phi => SystemKind::Phi,
            Kind::Psi => SystemKind::Psi,
            Kind::Theta => SystemKind::Theta,
        }
    }

    fn system_inputs(&self) -> (u32, usize, u32) {
        (self.opts.level.unwrap_or(1), self.opts.segre_level.unwrap_or(0), self.opts.epsilon_bound.unwrap_or(1))
    }

    fn build_system(&self) -> Result<Vec<Record>, CliError> {
        let name = self.map_name()?;
        let (h, m, mp) = self.map_with(&name)?;
        let kind = self.kind();
        let (l, j, eps) = self.system_inputs();
        let sys = build_system(&m, &mp, &h, kind, self.opts.tilde, l, j, eps)?;
        let entries: Vec<Value> = sys
            .entries
            .iter()
            .map(|e| {
                json!({
                    "nu": e.nu.exps(),
                    "epsilon": e.epsilon.as_ref().map(|x| x.exps()),
                    "component": e.component,
                    "terms": e.poly.terms().len(),
                })
            })
            .collect();
        let mut cert = json!({ "rest_vars": sys.rest_vars, "entries": entries });
        let mut outcome = Outcome::Pass;
        let mut verdict = format!("{} entries", sys.entries.len());
        if self.opts.tilde {
            let assembled = assemble_from_tables(&m, &mp, &h, &sys)?;
            let agree = assembled.len() == sys.entries.len()
                && assembled.iter().zip(&sys.entries).all(|(a, e)| a.poly.agrees_with(&e.poly));
            cert["tables_agree"] = json!(agree);
            if !agree {
                outcome = Outcome::Fail;
                verdict = "table assembly disagrees".into();
            }
        }
        Ok(vec![self
            .base("build-system", outcome, verdict, Some(self.order))
            .input("map", name)
            .input("kind", kind.label())
            .input("tilde", self.opts.tilde)
            .input("l", l)
            .input("j", j)
            .input("epsilon_bound", eps)
            .certificate(cert)])
    }

    fn check_jet_solution(&self) -> Result<Vec<Record>, CliError> {
        let name = self.map_name()?;
        let (h, m, mp) = self.map_with(&name)?;
        let (jet_name, jet_map) = match &self.opts.map2 {
            Some(_) => self.map2(&name)?,
            None => (name.clone(), h.clone()),
        };
        let kind = self.kind();
        let (l, j, eps) = self.system_inputs();
        let sys = build_system(&m, &mp, &h, kind, self.opts.tilde, l, j, eps)?;
        let r = check_jet_solution(&sys, &m, &jet_map)?;
        Ok(vec![self
            .base("check-jet-solution", verdict_of(r.solves), if r.solves { "solves" } else { "does-not-solve" }, Some(r.certified_order))
            .input("map", name)
            .input("jet", jet_name)
            .input("kind", kind.label())
            .input("tilde", self.opts.tilde)
            .input("l", l)
            .input("j", j)
            .certificate(json!({
                "first_failure": r.first_failure.map(|(e, d)| json!({"entry": e, "degree": d})),
            }))])
    }

    fn key_identity(&self) -> Result<Vec<Record>, CliError> {
        let name = self.map_name()?;
        let (h, m, mp) = self.map_with(&name)?;
        let (jet_name, h0) = match &self.opts.map2 {
            Some(_) => {
                let (n, x) = self.map2(&name)?;
                (n, Some(x))
            }
            None => (name.clone(), None),
        };
        let l = self.opts.level.unwrap_or(1);
        let j = self.opts.segre_level.unwrap_or(0);
        let source = h0.as_ref().unwrap_or(&h);
        let jz = jet_of_map(source, l, &(0..m.big_n()).collect::<Vec<_>>())?;
        let s = restrict_jet(&jz, &m, j)?;
        let v = key_identity_check(&m, &mp, &h, &s, l, j, h0.as_ref())?;
        let rec = self.base("key-identity", Outcome::Pass, "", None).input("map", name).input("jet", jet_name).input("l", l).input("j", j);
        Ok(vec![match v {
            KeyIdentityVerdict::PreconditionFailed { entry, degree } => Record {
                verdict: "precondition-failed".into(),
                outcome: Outcome::Inconclusive,
                certified_order: Some(degree),
                ..rec
            }
            .certificate(json!({ "entry": entry, "degree": degree })),
            KeyIdentityVerdict::Checked(r) => {
                let ok = r.holds && r.reformulation != Some(false);
                Record {
                    verdict: if ok { "holds".into() } else { "fails".into() },
                    outcome: verdict_of(ok),
                    certified_order: Some(r.certified_order),
                    ..rec
                }
                .certificate(json!({
                    "failure": r.failure.map(|(nu, g, d)| json!({"nu": nu.exps(), "generator": g, "degree": d})),
                    "reformulation": r.reformulation,
                }))
            }
        }])
    }

    fn determine(&self) -> Result<Vec<Record>, CliError> {
        let name = self.map_name()?;
        let (h0, m, mp) = self.map_with(&name)?;
        let k = self.opts.jet_order.unwrap_or(2);
        let family = match self.opts.family {
            Some(Family::Dense) => PerturbationFamily::Dense,
            Some(Family::Automorphism) => PerturbationFamily::QuadricAutomorphism,
            Some(Family::Twist) => PerturbationFamily::Twist,
            Some(Family::Mixed) => PerturbationFamily::Mixed,
            None => match h0.nvars() {
                2 => PerturbationFamily::Mixed,
                3 => PerturbationFamily::Twist,
                _ => PerturbationFamily::Dense,
            },
        };
        let cfg = ExperimentConfig {
            k,
            trials: self.opts.trials.unwrap_or(20),
            perturbation_degree: self.opts.perturbation_degree.unwrap_or((k + 2).min(self.order)),
            seed: self.opts.seed.unwrap_or(0),
            family,
            level: self.opts.level.unwrap_or(1),
        };
        let r = determination_experiment(&m, &mp, &h0, &cfg)?;
        let (outcome, verdict) = if !r.passed() {
            (Outcome::Fail, "counterexample")
        } else if r.vacuous {
            (Outcome::Inconclusive, "vacuous")
        } else {
            (Outcome::Pass, "determined")
        };
        Ok(vec![self
            .base("determine", outcome, verdict, Some(r.margin))
            .input("map", name)
            .input("jet_order", k)
            .input("family", format!("{family:?}"))
            .input("trials", cfg.trials)
            .input("perturbation_degree", cfg.perturbation_degree)
            .input("level", cfg.level)
            .certificate(json!({
                "candidates": r.candidates,
                "survivors": r.survivors,
                "ideal_passes": r.ideal_passes,
                "level_checks": r.level_checks,
                "level_passes": r.level_passes,
                "counterexamples": r.counterexamples,
                "margin": r.margin,
            }))
            .seed(r.seed)])
    }
}

pub fn emit(report: &Report, format: Format) -> String {
    report.emit(format)
}
