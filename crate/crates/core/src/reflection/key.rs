//! The key identity: a solution `S` of the psi system reproduces the
//! derivatives of `rho'(H(Z), zeta')` along `v^{j+1}`.

use crate::error::{CrError, CrResult};
use crate::jets::{universal_polynomials, JetValue};
use crate::manifolds::{GenericManifold, SegreMapping};
use crate::powerseries::{MultiIndex, Series, SeriesMap};

use super::germ::reflection_generators;
use super::system::{build_system, eval_lambda, SystemKind};

#[derive(Clone, Debug, PartialEq)]
pub enum KeyIdentityVerdict {
    /// `S` does not solve the psi system of `H`.
    PreconditionFailed { entry: usize, degree: u32 },
    Checked(KeyIdentityReport),
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeyIdentityReport {
    pub holds: bool,
    /// `(nu, generator, degree)` of the first mismatch.
    pub failure: Option<(MultiIndex, usize, u32)>,
    /// Agreement of `d^nu rho'(H(Z), zeta')` and `d^nu rho'(H0(Z), zeta')`
    /// along `v^{j+1}`, when `H0` was given.
    pub reformulation: Option<bool>,
    pub certified_order: u32,
}

impl KeyIdentityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, KeyIdentityVerdict::Checked(r) if r.holds && r.reformulation != Some(false))
    }
}

/// `d^nu_Z g(Z, zeta')` at `Z = v^{j+1}(t)`, layout `(t^[j+1], zeta')`.
fn along_segre(g: &Series, nu: &MultiIndex, v: &SeriesMap, np: usize) -> CrResult<Series> {
    let nt = v.nvars();
    let nv = nt + np;
    let d = g.derivative_multi(&nu.concat(&MultiIndex::zero(np)))?;
    let mut inputs: Vec<Series> = v.comps().iter().map(|s| s.shift_vars(nv, 0)).collect();
    inputs.extend((nt..nv).map(|i| Series::var(nv, i, d.order())));
    d.compose(&inputs)
}

/// Check the key identity for `S` (entries in `t^[j+1]`, base `N`,
/// `N'` components). With `h0`, `S` is taken to be its jet and the
/// reformulation is checked as well.
#[allow(clippy::too_many_arguments)]
pub fn key_identity_check(
    m: &GenericManifold,
    mp: &GenericManifold,
    h: &SeriesMap,
    s: &JetValue,
    l: u32,
    j: usize,
    h0: Option<&SeriesMap>,
) -> CrResult<KeyIdentityVerdict> {
    let big_n = m.big_n();
    let np = mp.big_n();
    let n = m.n();
    let nt = n * (j + 1);
    if s.ncomps() != np || s.base_dim() != big_n || s.l() < l {
        return Err(CrError::ArityMismatch { expected: np, found: s.ncomps() });
    }
    let psi = build_system(m, mp, h, SystemKind::Psi, false, l, j, 0)?;
    let padded = s.map_entries(|x| Ok(x.shift_vars(psi.rest_vars, 0)))?;
    let pre = psi.check(&padded)?;
    if let Some((entry, degree)) = pre.first_failure {
        return Ok(KeyIdentityVerdict::PreconditionFailed { entry, degree });
    }

    let v = SegreMapping::standard(m).iterate(j + 1)?;
    let nv = nt + np;
    let refl = reflection_generators(mp, h)?.generators;
    let refl0 = h0.map(|h0| reflection_generators(mp, h0)).transpose()?.map(|r| r.generators);
    let rho = mp.rho_normal()?;
    let r_tab = universal_polynomials(big_n, np, l);
    let s0: Vec<Series> = s.lambda0().iter().map(|x| x.shift_vars(nv, 0)).collect();

    let mut order = pre.certified_order;
    let mut failure = None;
    let mut reformulation = refl0.as_ref().map(|_| true);
    for nu in MultiIndex::up_to_degree(big_n, l) {
        for (k, g) in refl.comps().iter().enumerate() {
            let lhs = along_segre(g, &nu, &v, np)?;
            let mut rhs = Series::zero(nv, lhs.order());
            for (mu, q) in &r_tab.r[&nu] {
                let coeff = eval_lambda(q, s, nt, lhs.order())?.shift_vars(nv, 0);
                let dr = rho.comp(k).derivative_multi(&mu.concat(&MultiIndex::zero(np)))?;
                let mut inputs = s0.clone();
                inputs.extend((nt..nv).map(|i| Series::var(nv, i, dr.order())));
                rhs = rhs.add(&coeff.mul(&dr.compose(&inputs)?));
            }
            let diff = lhs.sub(&rhs);
            order = order.min(diff.order());
            if let Some(dg) = diff.valuation() {
                if failure.as_ref().map_or(true, |(_, _, d)| dg < *d) {
                    failure = Some((nu.clone(), k, dg));
                }
            }
            if let Some(r0) = &refl0 {
                let other = along_segre(r0.comp(k), &nu, &v, np)?;
                let dd = lhs.sub(&other);
                order = order.min(dd.order());
                if !dd.is_zero() {
                    reformulation = Some(false);
                }
            }
        }
    }
    Ok(KeyIdentityVerdict::Checked(KeyIdentityReport {
        holds: failure.is_none(),
        failure,
        reformulation,
        certified_order: order,
    }))
}
