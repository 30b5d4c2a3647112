//! Randomized finite-determination experiments.
//!
//! Candidates are perturbations of `H0` whose `K`-jets agree with `H0`.
//! Those passing `sends_into` are survivors; each survivor must have the
//! same reflection ideal as `H0`, and the level-wise implication between
//! agreement along `v^j` and along `v^{j+1}` must not be violated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::{Coefficient, Rat};
use crate::error::{CrError, CrResult};
use crate::fixtures::{quadric_automorphism, twist_map};
use crate::manifolds::{segre_type, GenericManifold, SegreMapping};
use crate::powerseries::{MultiIndex, Series, SeriesMap};

use super::germ::{ideal_compare, reflection_generators, sends_into};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbationFamily {
    /// `H0` plus nonzero dense polynomial terms of degree in `(K, degree]`.
    Dense,
    /// `H0` composed with isotropy automorphisms of the quadric (`N = 2`).
    QuadricAutomorphism,
    /// `H0` composed with `(Z1 e^p, Z2 e^{-p}, Z3)` (`N = 3`), `p` of valuation `>= max(K, 1)`.
    Twist,
    /// Automorphisms on even trials, dense perturbations on odd ones.
    Mixed,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub k: u32,
    pub trials: usize,
    pub perturbation_degree: u32,
    pub seed: u64,
    pub family: PerturbationFamily,
    /// Derivative bound `l` in the level conclusion.
    pub level: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub trials: usize,
    /// Candidates whose `K`-jet equals that of `H0`.
    pub candidates: usize,
    pub survivors: usize,
    pub ideal_passes: usize,
    /// Level implications whose hypothesis held.
    pub level_checks: usize,
    pub level_passes: usize,
    /// Trial indices of survivors violating a conclusion.
    pub counterexamples: Vec<usize>,
    pub vacuous: bool,
    /// Lowest order at which any verdict was certified.
    pub margin: u32,
    pub seed: u64,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn small_gaussian(rng: &mut ChaCha8Rng) -> Coefficient {
    loop {
        let c = Coefficient::gaussian(rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        if !c.is_zero() {
            return c;
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, lo: u32, hi: u32, order: u32) -> Series {
    let mut s = Series::zero(nvars, order);
    for d in lo..=hi.min(order) {
        for m in MultiIndex::of_degree(nvars, d) {
            if rng.gen_bool(0.5) {
                s.add_term(m, &small_gaussian(rng));
            }
        }
    }
    s
}

fn dense(rng: &mut ChaCha8Rng, h0: &SeriesMap, k: u32, degree: u32) -> CrResult<SeriesMap> {
    let n = h0.nvars();
    let order = h0.order();
    if k + 1 > degree.min(order) {
        return Err(CrError::Invalid(format!("no room for perturbations of degree in ({k}, {degree}]")));
    }
    loop {
        let comps: Vec<Series> = h0
            .comps()
            .iter()
            .map(|c| if rng.gen_bool(0.5) { c.add(&random_poly(rng, n, k + 1, degree, order)) } else { c.clone() })
            .collect();
        let h = SeriesMap::new(n, comps)?;
        if !h.sub(h0)?.is_zero() {
            return Ok(h);
        }
    }
}

fn automorphism(rng: &mut ChaCha8Rng, h0: &SeriesMap) -> CrResult<SeriesMap> {
    if h0.nvars() != 2 {
        return Err(CrError::Invalid("automorphism family needs N = 2".into()));
    }
    let lambda = if rng.gen_bool(0.5) { Rat::from_int(1) } else { [Rat::from_int(2), Rat::new(1, 2), Rat::from_int(3)][rng.gen_range(0..3)].clone() };
    let u = if rng.gen_bool(0.5) {
        Coefficient::one()
    } else {
        [Coefficient::i(), Coefficient::from_int(-1), Coefficient::gaussian(0, -1), Coefficient::new(Rat::new(3, 5), Rat::new(4, 5))]
            [rng.gen_range(0..4)]
        .clone()
    };
    let a = if rng.gen_bool(0.5) { Coefficient::zero() } else { small_gaussian(rng) };
    let r = if rng.gen_bool(0.5) { Rat::from_int(0) } else { Rat::new(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 }, 2) };
    h0.compose(&quadric_automorphism(lambda, u, a, r, h0.order())?)
}

fn twist(rng: &mut ChaCha8Rng, h0: &SeriesMap, k: u32, degree: u32) -> CrResult<SeriesMap> {
    if h0.nvars() != 3 {
        return Err(CrError::Invalid("twist family needs N = 3".into()));
    }
    let lo = k.max(1);
    let p = loop {
        let p = random_poly(rng, 3, lo, degree.max(lo), h0.order());
        if !p.is_zero() {
            break p;
        }
    };
    h0.compose(&twist_map(&p)?)
}

fn candidate(cfg: &ExperimentConfig, h0: &SeriesMap, index: usize) -> CrResult<SeriesMap> {
    let mut rng = trial_rng(cfg.seed, index);
    match cfg.family {
        PerturbationFamily::Dense => dense(&mut rng, h0, cfg.k, cfg.perturbation_degree),
        PerturbationFamily::QuadricAutomorphism => automorphism(&mut rng, h0),
        PerturbationFamily::Twist => twist(&mut rng, h0, cfg.k, cfg.perturbation_degree),
        PerturbationFamily::Mixed if index % 2 == 0 => automorphism(&mut rng, h0),
        PerturbationFamily::Mixed => dense(&mut rng, h0, cfg.k, cfg.perturbation_degree),
    }
}

/// `j^k H = j^k H0`.
pub fn jets_agree(h: &SeriesMap, h0: &SeriesMap, k: u32) -> CrResult<bool> {
    Ok(h.sub(h0)?.comps().iter().all(|s| s.valuation().map_or(true, |v| v > k)))
}

/// Compare `d^delta_Z rho'(H(Z), zeta')` with the same for `H0` at
/// `Z = v^j(t^[j])`, `|delta| <= bound`. Returns the first mismatch
/// `(delta, degree)` and the certified order.
pub fn level_agreement(
    m: &GenericManifold,
    mp: &GenericManifold,
    h: &SeriesMap,
    h0: &SeriesMap,
    j: usize,
    bound: u32,
) -> CrResult<(Option<(MultiIndex, u32)>, u32)> {
    let big_n = m.big_n();
    let np = mp.big_n();
    let a = reflection_generators(mp, h)?.generators;
    let b = reflection_generators(mp, h0)?.generators;
    let diff = a.sub(&b)?;
    let v = SegreMapping::standard(m).iterate(j)?;
    let nt = v.nvars();
    let nv = nt + np;
    let mut order = u32::MAX;
    let mut first: Option<(MultiIndex, u32)> = None;
    for delta in MultiIndex::up_to_degree(big_n, bound) {
        for g in diff.comps() {
            let d = g.derivative_multi(&delta.concat(&MultiIndex::zero(np)))?;
            let mut inputs: Vec<Series> = v.comps().iter().map(|s| s.shift_vars(nv, 0)).collect();
            inputs.extend((nt..nv).map(|i| Series::var(nv, i, d.order())));
            let r = d.compose(&inputs)?;
            order = order.min(r.order());
            if let Some(dg) = r.valuation() {
                if first.as_ref().map_or(true, |(_, x)| dg < *x) {
                    first = Some((delta.clone(), dg));
                }
            }
        }
    }
    Ok((first, order))
}

pub fn determination_experiment(
    m: &GenericManifold,
    mp: &GenericManifold,
    h0: &SeriesMap,
    cfg: &ExperimentConfig,
) -> CrResult<ExperimentReport> {
    if !sends_into(m, mp, h0)?.holds() {
        return Err(CrError::Precondition("H0 does not send M into M'".into()));
    }
    let levels = segre_type(m, m.codim() + 1)?.j0.ok_or_else(|| CrError::Precondition("M is not of finite type".into()))?;
    let mut report = ExperimentReport {
        trials: cfg.trials,
        candidates: 0,
        survivors: 0,
        ideal_passes: 0,
        level_checks: 0,
        level_passes: 0,
        counterexamples: Vec::new(),
        vacuous: false,
        margin: h0.order(),
        seed: cfg.seed,
    };
    for index in 0..cfg.trials {
        let h = candidate(cfg, h0, index)?;
        if !jets_agree(&h, h0, cfg.k)? {
            continue;
        }
        report.candidates += 1;
        let check = sends_into(m, mp, &h)?;
        let crate::reflection::MapCheck::Holds { order } = check else { continue };
        report.survivors += 1;
        report.margin = report.margin.min(order);
        let mut bad = false;
        let cmp = ideal_compare(mp, &h, h0)?;
        report.margin = report.margin.min(cmp.certified_order);
        if cmp.equal {
            report.ideal_passes += 1;
        } else {
            bad = true;
        }
        for j in 0..levels {
            let (hyp, o1) = level_agreement(m, mp, &h, h0, j, cfg.k)?;
            if hyp.is_some() {
                continue;
            }
            report.level_checks += 1;
            let (concl, o2) = level_agreement(m, mp, &h, h0, j + 1, cfg.level)?;
            report.margin = report.margin.min(o1).min(o2);
            if concl.is_none() {
                report.level_passes += 1;
            } else {
                bad = true;
            }
        }
        if bad {
            report.counterexamples.push(index);
        }
    }
    report.vacuous = report.survivors == 0;
    Ok(report)
}
