//! Map germs, the reflection ideal and the checks that only need `H`.

use crate::coeff::Coefficient;
use crate::error::{CrError, CrResult};
use crate::manifolds::{nondegeneracy_rows, GenericManifold, SegreMapping};
use crate::powerseries::{first_difference, generic_rank, series_det, standard_monomials, MultiIndex, Series, SeriesMap};

/// A formal map `H: (C^N, 0) -> (C^N', 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalMapGerm {
    h: SeriesMap,
    complexified: SeriesMap,
}

impl FormalMapGerm {
    pub fn new(h: SeriesMap) -> CrResult<FormalMapGerm> {
        if let Some(j) = h.comps().iter().position(|s| !s.constant_term().is_zero()) {
            return Err(CrError::OriginNotFixed { component: j });
        }
        let n = h.nvars();
        let mut comps: Vec<Series> = h.comps().iter().map(|s| s.shift_vars(2 * n, 0)).collect();
        comps.extend(h.conj_coeffs().comps().iter().map(|s| s.shift_vars(2 * n, n)));
        let complexified = SeriesMap::new(2 * n, comps)?;
        Ok(FormalMapGerm { h, complexified })
    }

    pub fn map(&self) -> &SeriesMap {
        &self.h
    }

    pub fn source_dim(&self) -> usize {
        self.h.nvars()
    }

    pub fn target_dim(&self) -> usize {
        self.h.len()
    }

    /// `(H(Z), Hbar(zeta))` in `(Z, zeta)`.
    pub fn complexified(&self) -> &SeriesMap {
        &self.complexified
    }
}

/// Result of substituting the parametrization of `M` into `I(M')`.
#[derive(Clone, Debug, PartialEq)]
pub enum MapCheck {
    Holds { order: u32 },
    Fails { degree: u32, generator: usize, monomial: Vec<u32>, coefficient: Coefficient },
}

impl MapCheck {
    pub fn holds(&self) -> bool {
        matches!(self, MapCheck::Holds { .. })
    }
}

fn check_dims(m: &GenericManifold, mp: &GenericManifold, h: &SeriesMap) -> CrResult<()> {
    if h.nvars() != m.big_n() {
        return Err(CrError::ArityMismatch { expected: m.big_n(), found: h.nvars() });
    }
    if h.len() != mp.big_n() {
        return Err(CrError::ArityMismatch { expected: mp.big_n(), found: h.len() });
    }
    Ok(())
}

/// `Hbar(gammabar(Z, t))` in `(Z, t)`.
pub fn conj_map_on_segre(m: &GenericManifold, h: &SeriesMap) -> CrResult<SeriesMap> {
    let gb = SegreMapping::standard(m).gamma_bar();
    h.conj_coeffs().compose(&gb)
}

/// Does `H` send `M` into `M'`? Every generator of `I(M')` (both normal
/// forms) is evaluated at `(H(Z), Hbar(gammabar(Z, t)))`.
pub fn sends_into(m: &GenericManifold, mp: &GenericManifold, h: &SeriesMap) -> CrResult<MapCheck> {
    check_dims(m, mp, h)?;
    let big_n = m.big_n();
    let nv = big_n + m.n();
    let mut inputs: Vec<Series> = h.comps().iter().map(|s| s.shift_vars(nv, 0)).collect();
    inputs.extend(conj_map_on_segre(m, h)?.into_comps());
    let mut gens = mp.rho_normal()?.into_comps();
    gens.extend(mp.rho_tilde()?.into_comps());
    let mut order = u32::MAX;
    let mut worst: Option<(u32, usize, MultiIndex, Coefficient)> = None;
    for (g, gen) in gens.iter().enumerate() {
        let v = gen.compose(&inputs)?;
        order = order.min(v.order());
        if let Some((mono, c)) = v.terms().iter().next().map(|(a, b)| (a.clone(), b.clone())) {
            let d = mono.degree();
            if worst.as_ref().map_or(true, |w| d < w.0) {
                worst = Some((d, g, mono, c));
            }
        }
    }
    Ok(match worst {
        None => MapCheck::Holds { order },
        Some((degree, generator, monomial, coefficient)) => {
            MapCheck::Fails { degree, generator, monomial: monomial.exps(), coefficient }
        }
    })
}

/// Generators `tau' - Qbar'(chi', H(Z))` of `I^H`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReflectionIdeal {
    /// Layout `(Z_1..Z_N, zeta'_1..zeta'_N')`.
    pub generators: SeriesMap,
    pub order: u32,
    pub source_dim: usize,
    pub target_dim: usize,
    /// `H` and `Qbar'` are polynomials of degree below their orders.
    pub polynomial_data: bool,
}

fn is_polynomial(s: &Series) -> bool {
    s.max_degree().map_or(true, |d| d < s.order())
}

pub fn reflection_generators(mp: &GenericManifold, h: &SeriesMap) -> CrResult<ReflectionIdeal> {
    if h.len() != mp.big_n() {
        return Err(CrError::ArityMismatch { expected: mp.big_n(), found: h.len() });
    }
    if let Some(j) = h.comps().iter().position(|s| !s.constant_term().is_zero()) {
        return Err(CrError::OriginNotFixed { component: j });
    }
    let big_n = h.nvars();
    let np = mp.big_n();
    let nv = big_n + np;
    let rho = mp.rho_normal()?;
    let mut inputs: Vec<Series> = h.comps().iter().map(|s| s.shift_vars(nv, 0)).collect();
    for k in 0..np {
        inputs.push(Series::var(nv, big_n + k, rho.order()));
    }
    let gens: Vec<Series> = rho.comps().iter().map(|g| g.compose(&inputs)).collect::<CrResult<_>>()?;
    let generators = SeriesMap::new(nv, gens)?;
    let polynomial_data =
        h.comps().iter().all(is_polynomial) && mp.qbar().comps().iter().all(is_polynomial);
    Ok(ReflectionIdeal { order: generators.order(), generators, source_dim: big_n, target_dim: np, polynomial_data })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdealComparison {
    pub equal: bool,
    pub certified_order: u32,
    /// `(generator, degree, monomial, difference coefficient)`.
    pub obstruction: Option<(usize, u32, Vec<u32>, Coefficient)>,
}

/// `I^H = I^{H0}`, decided by comparing the normal-form generators.
pub fn ideal_compare(mp: &GenericManifold, h: &SeriesMap, h0: &SeriesMap) -> CrResult<IdealComparison> {
    if h.nvars() != h0.nvars() {
        return Err(CrError::ArityMismatch { expected: h0.nvars(), found: h.nvars() });
    }
    let a = reflection_generators(mp, h)?;
    let b = reflection_generators(mp, h0)?;
    let order = a.order.min(b.order);
    let mut obstruction: Option<(usize, u32, Vec<u32>, Coefficient)> = None;
    for (g, (x, y)) in a.generators.comps().iter().zip(b.generators.comps()).enumerate() {
        if let Some((mono, c)) = first_difference(&x.truncate(order), &y.truncate(order)) {
            let d = mono.degree();
            if obstruction.as_ref().map_or(true, |o| d < o.1) {
                obstruction = Some((g, d, mono.exps(), c));
            }
        }
    }
    Ok(IdealComparison { equal: obstruction.is_none(), certified_order: order, obstruction })
}

pub fn ideal_equal(mp: &GenericManifold, h: &SeriesMap, h0: &SeriesMap) -> CrResult<bool> {
    Ok(ideal_compare(mp, h, h0)?.equal)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracyReport {
    pub certified: bool,
    pub rank: usize,
    pub target: usize,
    pub certified_order: u32,
}

/// Generic rank of `H o v^1` against `n'`.
pub fn not_totally_degenerate(m: &GenericManifold, mp: &GenericManifold, h: &SeriesMap) -> CrResult<DegeneracyReport> {
    check_dims(m, mp, h)?;
    let v1 = SegreMapping::standard(m).iterate(1)?;
    let rep = generic_rank(&h.compose(&v1)?)?;
    Ok(DegeneracyReport {
        certified: rep.rank == mp.n(),
        rank: rep.rank,
        target: mp.n(),
        certified_order: rep.certified_order,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum FiniteMapVerdict {
    /// `m^k` lies in `(H) + m^{order+1}`; `exact` when `k < order`.
    Finite { multiplicity: usize, stabilized_at: u32, exact: bool, order: u32 },
    /// Standard monomials survive in every degree up to `order`.
    NotFiniteUpToOrder { order: u32, evidence: Vec<Vec<u32>> },
}

impl FiniteMapVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, FiniteMapVerdict::Finite { .. })
    }
}

pub fn finite_map_check(h: &SeriesMap, order: u32) -> CrResult<FiniteMapVerdict> {
    if let Some(j) = h.comps().iter().position(|s| !s.constant_term().is_zero()) {
        return Err(CrError::OriginNotFixed { component: j });
    }
    if order > h.order() {
        return Err(CrError::OrderExceeded { requested: order, available: h.order() });
    }
    let gens: Vec<Series> = h.comps().iter().map(|s| s.truncate(order)).collect();
    let std = standard_monomials(&gens, h.nvars(), order);
    for k in 1..=order {
        if std.iter().all(|m| m.degree() != k) {
            let multiplicity = std.iter().filter(|m| m.degree() < k).count();
            return Ok(FiniteMapVerdict::Finite { multiplicity, stabilized_at: k, exact: k < order, order });
        }
    }
    let evidence = std.iter().filter(|m| m.degree() == order).map(|m| m.exps()).collect();
    Ok(FiniteMapVerdict::NotFiniteUpToOrder { order, evidence })
}

#[derive(Clone, Debug, PartialEq)]
pub enum PulledCertificate {
    Found {
        rows: Vec<(usize, Vec<u32>)>,
        /// `det(d q / d Z')` in `Z'`.
        determinant: Series,
        /// The same determinant composed with `H0`, in `Z`.
        pulled_back: Series,
        certified_order: u32,
    },
    NoneFound { bound: u32 },
}

/// Rows `(j_l, alpha^l)` of a nondegeneracy certificate of `M'` whose
/// determinant stays nonzero after composing with `H0`.
pub fn nondegeneracy_certificate(mp: &GenericManifold, h0: &SeriesMap, bound: u32) -> CrResult<PulledCertificate> {
    let Some(cert) = nondegeneracy_rows(mp, bound)? else {
        return Ok(PulledCertificate::NoneFound { bound });
    };
    let pulled_rows: Vec<Vec<Series>> = cert
        .gradients
        .iter()
        .map(|row| row.iter().map(|g| g.compose(h0.comps())).collect::<CrResult<Vec<_>>>())
        .collect::<CrResult<_>>()?;
    let pulled_back = series_det(&pulled_rows);
    if pulled_back.is_zero() {
        return Ok(PulledCertificate::NoneFound { bound });
    }
    Ok(PulledCertificate::Found {
        rows: cert.rows,
        certified_order: pulled_back.order(),
        determinant: cert.determinant,
        pulled_back,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDetermination {
    /// `R_l(Z, H(Z)) = 0` for all rows.
    pub reflection_agrees: bool,
    /// `j^k H = j^k H0`.
    pub jets_agree: bool,
    pub maps_agree: bool,
    pub certified_order: u32,
}

impl FiniteDetermination {
    /// Hypotheses imply the conclusion at this order.
    pub fn consistent(&self) -> bool {
        !(self.reflection_agrees && self.jets_agree) || self.maps_agree
    }
}

/// With `R_l(Z, Z') = q_l(Z') - q_l(H0(Z))`: if `R(Z, H(Z)) = 0` and the
/// `k`-jets agree then `H = H0`.
pub fn finite_determination_check(
    mp: &GenericManifold,
    h0: &SeriesMap,
    h: &SeriesMap,
    k: u32,
    bound: u32,
) -> CrResult<FiniteDetermination> {
    let Some(cert) = nondegeneracy_rows(mp, bound)? else {
        return Err(CrError::Precondition("target has no nondegeneracy certificate within the bound".into()));
    };
    let qs = crate::manifolds::q_coefficients(mp, bound);
    let mut reflection_agrees = true;
    let mut order = h.order().min(h0.order());
    for (j, alpha) in &cert.rows {
        let q = &qs.iter().find(|c| c.component == *j && c.alpha.exps() == *alpha).expect("row from the same list").q;
        let r = q.compose(h.comps())?.sub(&q.compose(h0.comps())?);
        order = order.min(r.order());
        reflection_agrees &= r.is_zero();
    }
    let diff = h.sub(h0)?;
    let jets_agree = diff.comps().iter().all(|s| s.valuation().map_or(true, |v| v > k));
    let maps_agree = diff.comps().iter().all(|s| s.truncate(order).is_zero());
    Ok(FiniteDetermination { reflection_agrees, jets_agree, maps_agree, certified_order: order })
}
