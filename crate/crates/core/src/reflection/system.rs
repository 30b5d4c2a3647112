//! The jet systems `phi^[l]`, `psi^[l,j]` and `Theta^[l,j]` satisfied by
//! the jets of a map sending `M` into `M'`, and their expansions through
//! coefficient tables that only depend on the Segre mapping.
//!
//! Coefficient layouts (after the `Lambda^1_0` block of `N'` variables):
//! - phi: `(Z, t)`;
//! - psi: `t^[j+2]`;
//! - theta: `t^[j+1]`.
//!
//! Jet coordinates `Lambda_{nu, k}` with `k < N'` are the unknown `Lambda-hat^1`.

use std::collections::BTreeMap;

use crate::coeff::Coefficient;
use crate::error::{CrError, CrResult};
use crate::jets::{jet_of_map, prolong, universal_polynomials, JetCoord, JetPolynomial, JetValue, LambdaPoly};
use crate::manifolds::{GenericManifold, SegreMapping};
use crate::powerseries::{MultiIndex, Series, SeriesMap};

use super::germ::conj_map_on_segre;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Phi,
    Psi,
    Theta,
}

impl SystemKind {
    pub fn label(&self) -> &'static str {
        match self {
            SystemKind::Phi => "phi",
            SystemKind::Psi => "psi",
            SystemKind::Theta => "theta",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemEntry {
    pub nu: MultiIndex,
    /// Derivative in `t^{j+2}` (theta only).
    pub epsilon: Option<MultiIndex>,
    /// Generator of `I(M')`.
    pub component: usize,
    pub poly: JetPolynomial,
}

type OmegaKey = (MultiIndex, MultiIndex, MultiIndex, MultiIndex);

/// Tables built from the Segre mapping alone.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoefficientTables {
    /// `c[(beta, delta)](Z, t) = R_{beta delta}(j_Z gammabar)`.
    pub c: BTreeMap<(MultiIndex, MultiIndex), Series>,
    /// `u[(beta, delta)](t^[j+2]) = c(v^{j+1}, t^{j+2})`.
    pub u: BTreeMap<(MultiIndex, MultiIndex), Series>,
    /// `omega[(nu, eps, alpha, delta)]`, polynomial in `Lambda-hat^1` over `t^[j+1]`.
    pub omega: BTreeMap<OmegaKey, JetPolynomial>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSystem {
    pub kind: SystemKind,
    /// Built from `w' - Q'(z', zeta')` rather than `tau' - Qbar'(chi', Z')`.
    pub tilde: bool,
    pub l: u32,
    pub j: usize,
    pub epsilon_bound: u32,
    /// `N`, the jet base dimension.
    pub base_dim: usize,
    /// `N'`, size of the `Lambda^1_0` block.
    pub target_dim: usize,
    /// `n` of the source.
    pub n: usize,
    /// Coefficient variables after the `Lambda^1_0` block.
    pub rest_vars: usize,
    pub entries: Vec<SystemEntry>,
    pub tables: CoefficientTables,
}

/// Evaluate a constant-coefficient jet polynomial on a jet.
pub(crate) fn eval_lambda(q: &LambdaPoly, jet: &JetValue, nvars: usize, order: u32) -> CrResult<Series> {
    let mut acc = Series::zero(nvars, order);
    for (m, c) in q.terms() {
        let mut t = Series::constant(nvars, order, c.clone());
        for (x, e) in m.powers() {
            t = t.mul(&jet.value(x)?.pow(*e));
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

fn vars(nv: usize, range: std::ops::Range<usize>, order: u32) -> Vec<Series> {
    range.map(|i| Series::var(nv, i, order)).collect()
}

fn shifted(m: &SeriesMap, nv: usize, offset: usize) -> Vec<Series> {
    m.comps().iter().map(|s| s.shift_vars(nv, offset)).collect()
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn multi_binomial(e: &MultiIndex, e1: &MultiIndex) -> i64 {
    (0..e.nvars()).map(|i| binomial(e.get(i), e1.get(i))).product()
}

/// Everything derived from `gamma` that the systems need.
struct SegreData {
    n: usize,
    gamma_bar: SeriesMap,
    /// `v^0..v^{j+2}`.
    tower: Vec<SeriesMap>,
    xi: SeriesMap,
}

impl SegreData {
    fn new(m: &GenericManifold, j: usize) -> CrResult<SegreData> {
        let segre = SegreMapping::standard(m);
        Ok(SegreData { n: m.n(), gamma_bar: segre.gamma_bar(), tower: segre.tower(j + 2)?, xi: segre.xi(j)? })
    }

    /// Inputs sending `(Z, t)`-series to `t^[j+2]`: `Z = v^{j+1}`, `t = t^{j+2}`.
    fn psi_inputs(&self, j: usize, lead: usize) -> Vec<Series> {
        let n = self.n;
        let nv = lead + n * (j + 2);
        let order = self.gamma_bar.order();
        let mut inputs = shifted(&self.tower[j + 1], nv, lead);
        inputs.extend(vars(nv, lead + n * (j + 1)..nv, order));
        inputs
    }

    /// Inputs sending `t^[j+2]`-series to `t^[j+1]`: `t^{j+2} = xi^j`.
    fn theta_inputs(&self, j: usize, lead: usize) -> Vec<Series> {
        let nv = lead + self.n * (j + 1);
        let order = self.gamma_bar.order();
        let mut inputs = vars(nv, lead..nv, order);
        inputs.extend(shifted(&self.xi, nv, lead));
        inputs
    }
}

fn lambda0_vars(np: usize, nv: usize, order: u32) -> Vec<Series> {
    vars(nv, 0..np, order)
}

fn check_budget(m: &GenericManifold, mp: &GenericManifold, l: u32, eps: u32) -> CrResult<()> {
    let available = m.order().min(mp.order());
    if available < l + eps {
        return Err(CrError::OrderExceeded { requested: l + eps, available });
    }
    Ok(())
}

fn generators(mp: &GenericManifold, tilde: bool) -> CrResult<SeriesMap> {
    if tilde {
        mp.rho_tilde()
    } else {
        mp.rho_normal()
    }
}

/// `phi^[l]` in `(Lambda^1_0, Z, t)`, indexed by `(nu, component)`.
fn phi_entries(m: &GenericManifold, mp: &GenericManifold, h: &SeriesMap, tilde: bool, l: u32) -> CrResult<Vec<SystemEntry>> {
    let big_n = m.big_n();
    let np = mp.big_n();
    let rho = generators(mp, tilde)?;
    let pr = prolong(&rho, l, big_n)?;
    let mbar = conj_map_on_segre(m, h)?;
    let jm = jet_of_map(&mbar, l, &(0..big_n).collect::<Vec<_>>())?;
    let nv = np + big_n + m.n();
    let mut coeff_map = lambda0_vars(np, nv, rho.order());
    coeff_map.extend(shifted(&mbar, nv, np));
    let mut out = Vec::new();
    for (nu, row) in &pr.comps {
        for (k, p) in row.iter().enumerate() {
            let poly = p.substitute(&coeff_map, nv, |c| {
                if c.comp < np {
                    return Ok(None);
                }
                let v = jm.value(&JetCoord::new(c.nu.clone(), c.comp - np))?;
                Ok(Some(JetPolynomial::from_series(v.shift_vars(nv, np))))
            })?;
            out.push(SystemEntry { nu: nu.clone(), epsilon: None, component: k, poly });
        }
    }
    Ok(out)
}

fn substitute_coeffs(p: &JetPolynomial, coeff_map: &[Series], target: usize) -> CrResult<JetPolynomial> {
    p.substitute(coeff_map, target, |_| Ok(None))
}

fn theta_from_psi(psi: &[SystemEntry], sd: &SegreData, np: usize, j: usize, eps: u32) -> CrResult<Vec<SystemEntry>> {
    let n = sd.n;
    let nv = np + n * (j + 1);
    let lead = np + n * (j + 1);
    let mut coeff_map = lambda0_vars(np, nv, sd.gamma_bar.order());
    coeff_map.extend(sd.theta_inputs(j, np));
    let mut out = Vec::new();
    for e in psi {
        for epsilon in MultiIndex::up_to_degree(n, eps) {
            let mut d = e.poly.clone();
            for i in 0..n {
                if epsilon.get(i) > 0 {
                    d = d.coeff_derivative(lead + i, epsilon.get(i))?;
                }
            }
            let poly = substitute_coeffs(&d, &coeff_map, nv)?;
            out.push(SystemEntry { nu: e.nu.clone(), epsilon: Some(epsilon), component: e.component, poly });
        }
    }
    Ok(out)
}

/// `c`, `u` (psi and theta) and `omega` (theta) tables.
fn build_tables(
    m: &GenericManifold,
    np: usize,
    sd: &SegreData,
    kind: SystemKind,
    l: u32,
    j: usize,
    eps: u32,
) -> CrResult<CoefficientTables> {
    let big_n = m.big_n();
    let n = sd.n;
    let order = sd.gamma_bar.order();
    let jg = jet_of_map(&sd.gamma_bar, l, &(0..big_n).collect::<Vec<_>>())?;
    let r_tab = universal_polynomials(big_n, big_n, l);
    let mut tables = CoefficientTables::default();
    for (beta, row) in &r_tab.r {
        for (delta, q) in row {
            tables.c.insert((beta.clone(), delta.clone()), eval_lambda(q, &jg, big_n + n, order)?);
        }
    }
    if kind == SystemKind::Phi {
        return Ok(tables);
    }
    let inputs = sd.psi_inputs(j, 0);
    for (k, c) in &tables.c {
        tables.u.insert(k.clone(), c.compose(&inputs)?);
    }
    if kind == SystemKind::Theta {
        tables.omega = omega_tables(np, big_n, sd, &tables.u, l, j, eps)?;
    }
    Ok(tables)
}

/// `omega^j_{nu eps alpha delta}`: the coefficient of
/// `rhotilde'^H_{Z'^alpha zeta^delta}(Lambda^1_0, vbar^{j+2}(t^[j+1], xi^j))` in `Theta-tilde`.
fn omega_tables(
    np: usize,
    big_n: usize,
    sd: &SegreData,
    u: &BTreeMap<(MultiIndex, MultiIndex), Series>,
    l: u32,
    j: usize,
    eps: u32,
) -> CrResult<BTreeMap<OmegaKey, JetPolynomial>> {
    let n = sd.n;
    let nt = n * (j + 1);
    let xi_in = sd.theta_inputs(j, 0);
    let s_vars: Vec<usize> = (nt..nt + n).collect();
    // derivatives of u along t^{j+2}, restricted to t^{j+2} = xi^j
    let mut du: BTreeMap<(MultiIndex, MultiIndex, MultiIndex), Series> = BTreeMap::new();
    for e1 in MultiIndex::up_to_degree(n, eps) {
        let full = MultiIndex::zero(nt).concat(&e1);
        for ((beta, delta), s) in u {
            let d = s.derivative_multi(&full)?.compose(&xi_in)?;
            du.insert((e1.clone(), beta.clone(), delta.clone()), d);
        }
    }
    // chain rule along w(s) = vbar^{j+2}(t^[j+1], s)
    let vbar = sd.tower[j + 2].conj_coeffs();
    let jw = jet_of_map(&vbar, eps, &s_vars)?;
    let rn = universal_polynomials(n, big_n, eps);
    let mut rr: BTreeMap<(MultiIndex, MultiIndex), Series> = BTreeMap::new();
    for (e2, row) in &rn.r {
        for (dp, q) in row {
            let v = eval_lambda(q, &jw, nt + n, vbar.order())?.compose(&xi_in)?;
            rr.insert((e2.clone(), dp.clone()), v);
        }
    }
    let p_tab = universal_polynomials(big_n, np, l);
    let mut omega: BTreeMap<OmegaKey, JetPolynomial> = BTreeMap::new();
    for (nu, prow) in &p_tab.p {
        for eps_idx in MultiIndex::up_to_degree(n, eps) {
            for ((alpha, beta), pp) in prow {
                for e1 in MultiIndex::up_to_degree(n, eps_idx.degree()) {
                    let Some(e2) = eps_idx.checked_sub(&e1) else { continue };
                    let binom = Coefficient::from_int(multi_binomial(&eps_idx, &e1));
                    for ((e1k, b, delta), dus) in du.range((e1.clone(), beta.clone(), MultiIndex::zero(big_n))..) {
                        if e1k != &e1 || b != beta {
                            break;
                        }
                        for ((e2k, dp), r) in rr.range((e2.clone(), MultiIndex::zero(big_n))..) {
                            if e2k != &e2 {
                                break;
                            }
                            let coeff = dus.mul(r).scale(&binom);
                            if coeff.is_zero() {
                                continue;
                            }
                            let term = JetPolynomial::from_series(coeff).mul_lambda(pp);
                            let key = (nu.clone(), eps_idx.clone(), alpha.clone(), delta.add(dp));
                            let slot = omega.entry(key).or_insert_with(|| JetPolynomial::zero(nt, term.order()));
                            *slot = slot.add(&term);
                        }
                    }
                }
            }
        }
    }
    omega.retain(|_, p| !p.is_zero());
    Ok(omega)
}

/// Build the system of the given kind for `H`.
#[allow(clippy::too_many_arguments)]
pub fn build_system(
    m: &GenericManifold,
    mp: &GenericManifold,
    h: &SeriesMap,
    kind: SystemKind,
    tilde: bool,
    l: u32,
    j: usize,
    epsilon_bound: u32,
) -> CrResult<ConstraintSystem> {
    if h.nvars() != m.big_n() || h.len() != mp.big_n() {
        return Err(CrError::ArityMismatch { expected: mp.big_n(), found: h.len() });
    }
    let eps = if kind == SystemKind::Theta { epsilon_bound } else { 0 };
    check_budget(m, mp, l, eps)?;
    let np = mp.big_n();
    let n = m.n();
    let sd = SegreData::new(m, j)?;
    let phi = phi_entries(m, mp, h, tilde, l)?;
    let (entries, rest_vars) = match kind {
        SystemKind::Phi => (phi, m.big_n() + n),
        SystemKind::Psi | SystemKind::Theta => {
            let nv = np + n * (j + 2);
            let mut coeff_map = lambda0_vars(np, nv, sd.gamma_bar.order());
            coeff_map.extend(sd.psi_inputs(j, np));
            let psi = phi
                .into_iter()
                .map(|e| Ok(SystemEntry { poly: substitute_coeffs(&e.poly, &coeff_map, nv)?, ..e }))
                .collect::<CrResult<Vec<_>>>()?;
            if kind == SystemKind::Psi {
                (psi, n * (j + 2))
            } else {
                (theta_from_psi(&psi, &sd, np, j, eps)?, n * (j + 1))
            }
        }
    };
    let tables = build_tables(m, np, &sd, kind, l, j, eps)?;
    Ok(ConstraintSystem {
        kind,
        tilde,
        l,
        j,
        epsilon_bound: eps,
        base_dim: m.big_n(),
        target_dim: np,
        n,
        rest_vars,
        entries,
        tables,
    })
}

/// `rhotilde'(Z', Hbar(zeta))` in `(Z', zeta)`.
fn rho_tilde_h(mp: &GenericManifold, h: &SeriesMap) -> CrResult<SeriesMap> {
    let np = mp.big_n();
    let big_n = h.nvars();
    let nv = np + big_n;
    let rho = mp.rho_tilde()?;
    let mut inputs = vars(nv, 0..np, rho.order());
    inputs.extend(shifted(&h.conj_coeffs(), nv, np));
    rho.compose(&SeriesMap::new(nv, inputs)?)
}

/// `G_{alpha, delta}` evaluated at `(Lambda^1_0, point)`.
fn g_at(g: &Series, alpha: &MultiIndex, delta: &MultiIndex, np: usize, point: &SeriesMap) -> CrResult<Series> {
    let nv = np + point.nvars();
    let d = g.derivative_multi(&alpha.concat(delta))?;
    let mut inputs = lambda0_vars(np, nv, d.order());
    inputs.extend(shifted(point, nv, np));
    d.compose(&inputs)
}

/// `sum_{alpha, beta} P_{nu alpha beta} sum_delta coeff_{beta delta} G_{alpha delta}(Lambda^1_0, point)`.
fn assemble_through_coefficients(
    mp: &GenericManifold,
    h: &SeriesMap,
    coeffs: &BTreeMap<(MultiIndex, MultiIndex), Series>,
    point: &SeriesMap,
    l: u32,
) -> CrResult<Vec<SystemEntry>> {
    let np = mp.big_n();
    let big_n = h.nvars();
    let nv = np + point.nvars();
    let g = rho_tilde_h(mp, h)?;
    let p_tab = universal_polynomials(big_n, np, l);
    let mut out = Vec::new();
    for (nu, prow) in &p_tab.p {
        for (k, gk) in g.comps().iter().enumerate() {
            let mut acc = JetPolynomial::zero(nv, gk.order());
            for ((alpha, beta), pp) in prow {
                for ((b, delta), c) in coeffs.range((beta.clone(), MultiIndex::zero(big_n))..) {
                    if b != beta {
                        break;
                    }
                    let ga = g_at(gk, alpha, delta, np, point)?;
                    let term = JetPolynomial::from_series(ga.mul(&c.shift_vars(nv, np))).mul_lambda(pp);
                    acc = acc.add(&term);
                }
            }
            out.push(SystemEntry { nu: nu.clone(), epsilon: None, component: k, poly: acc });
        }
    }
    Ok(out)
}

/// Tilde entries assembled from the coefficient tables of `system`
/// instead of by substitution; `system` must be a tilde system for `H`.
pub fn assemble_from_tables(
    m: &GenericManifold,
    mp: &GenericManifold,
    h: &SeriesMap,
    system: &ConstraintSystem,
) -> CrResult<Vec<SystemEntry>> {
    if !system.tilde {
        return Err(CrError::Invalid("table assembly is defined for the tilde systems".into()));
    }
    let np = mp.big_n();
    let j = system.j;
    let sd = SegreData::new(m, j)?;
    match system.kind {
        SystemKind::Phi => assemble_through_coefficients(mp, h, &system.tables.c, &sd.gamma_bar, system.l),
        SystemKind::Psi => {
            let point = sd.tower[j + 2].conj_coeffs();
            assemble_through_coefficients(mp, h, &system.tables.u, &point, system.l)
        }
        SystemKind::Theta => {
            let g = rho_tilde_h(mp, h)?;
            let nt = sd.n * (j + 1);
            let nv = np + nt;
            let point = sd.tower[j + 2].conj_coeffs().compose(&SeriesMap::new(nt, sd.theta_inputs(j, 0))?)?;
            let mut acc: BTreeMap<(MultiIndex, MultiIndex, usize), JetPolynomial> = BTreeMap::new();
            for ((nu, eps, alpha, delta), w) in &system.tables.omega {
                for (k, gk) in g.comps().iter().enumerate() {
                    let ga = g_at(gk, alpha, delta, np, &point)?;
                    let term = w.shift_vars(nv, np).mul_series(&ga);
                    let slot = acc
                        .entry((nu.clone(), eps.clone(), k))
                        .or_insert_with(|| JetPolynomial::zero(nv, term.order()));
                    *slot = slot.add(&term);
                }
            }
            let mut out = Vec::new();
            for e in &system.entries {
                let key = (e.nu.clone(), e.epsilon.clone().expect("theta entry"), e.component);
                let poly = acc.remove(&key).unwrap_or_else(|| JetPolynomial::zero(nv, e.poly.order()));
                out.push(SystemEntry { poly, ..e.clone() });
            }
            Ok(out)
        }
    }
}

/// Outcome of substituting a candidate jet into a system.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionCheck {
    pub solves: bool,
    pub certified_order: u32,
    /// `(entry index, lowest nonvanishing degree)`.
    pub first_failure: Option<(usize, u32)>,
}

impl ConstraintSystem {
    /// Substitute `Lambda^1 = s`; the entries of `s` are series in the
    /// `rest_vars` coefficient variables of the system.
    pub fn evaluate(&self, s: &JetValue) -> CrResult<Vec<Series>> {
        if s.ncomps() != self.target_dim || s.base_dim() != self.base_dim {
            return Err(CrError::ArityMismatch { expected: self.target_dim, found: s.ncomps() });
        }
        let nv = self.rest_vars;
        let order = s.lambda0().iter().map(|x| x.order()).min().unwrap_or(0);
        let mut coeff_map = s.lambda0().to_vec();
        coeff_map.extend(vars(nv, 0..nv, order));
        self.entries
            .iter()
            .map(|e| {
                let r = e.poly.substitute(&coeff_map, nv, |c| Ok(Some(JetPolynomial::from_series(s.value(c)?.clone()))))?;
                Ok(r.as_series().expect("all coordinates substituted"))
            })
            .collect()
    }

    pub fn check(&self, s: &JetValue) -> CrResult<SolutionCheck> {
        let vals = self.evaluate(s)?;
        let certified_order = vals.iter().map(|v| v.order()).min().unwrap_or(0);
        let first_failure = vals
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.valuation().map(|d| (i, d)))
            .min_by_key(|&(_, d)| d);
        Ok(SolutionCheck { solves: first_failure.is_none(), certified_order, first_failure })
    }

    /// The jet of `h0` in this system's coefficient layout: along `Z` for
    /// phi, along `Z` and then restricted to `v^{j+1}` for psi and theta.
    pub fn jet_of(&self, m: &GenericManifold, h0: &SeriesMap) -> CrResult<JetValue> {
        let big_n = self.base_dim;
        let jz = jet_of_map(h0, self.l, &(0..big_n).collect::<Vec<_>>())?;
        match self.kind {
            SystemKind::Phi => jz.map_entries(|x| Ok(x.shift_vars(self.rest_vars, 0))),
            SystemKind::Psi | SystemKind::Theta => {
                let along = restrict_jet(&jz, m, self.j)?;
                along.map_entries(|x| Ok(x.shift_vars(self.rest_vars, 0)))
            }
        }
    }
}

/// `((d^alpha H)(v^{j+1}(t^[j+1])))_{|alpha| <= l}`, entries in `t^[j+1]`.
pub fn restrict_jet(jz: &JetValue, m: &GenericManifold, j: usize) -> CrResult<JetValue> {
    let v = SegreMapping::standard(m).iterate(j + 1)?;
    jz.map_entries(|x| x.compose(v.comps()))
}

/// `Lambda^1 = j H` (resp. its restriction to `v^{j+1}`) solves the system.
pub fn check_jet_solution(system: &ConstraintSystem, m: &GenericManifold, h: &SeriesMap) -> CrResult<SolutionCheck> {
    system.check(&system.jet_of(m, h)?)
}
