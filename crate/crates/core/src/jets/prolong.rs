use std::collections::BTreeMap;

use crate::error::{CrError, CrResult};
use crate::powerseries::{MultiIndex, Series, SeriesMap};

use super::poly::{JetCoord, JetPolynomial, LambdaPoly};
use super::universal::universal_polynomials;
use super::value::JetValue;

/// A map between jet spaces `J^l(C^k, C^r) -> J^l(C^k, C^s)`, stored by
/// component: `comps[nu][j]` is `Lambda'_{nu, j}` as a polynomial in the
/// source jet coordinates with coefficients in `Lambda_0` (`r` variables).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetMap {
    pub k: usize,
    pub r: usize,
    pub l: u32,
    pub comps: BTreeMap<MultiIndex, Vec<JetPolynomial>>,
}

impl JetMap {
    pub fn component(&self, nu: &MultiIndex, j: usize) -> &JetPolynomial {
        &self.comps[nu][j]
    }

    pub fn ncomps(&self) -> usize {
        self.comps.values().next().map(|v| v.len()).unwrap_or(0)
    }

    /// Components in graded-lex order of `nu`, then by index.
    pub fn flat(&self) -> Vec<&JetPolynomial> {
        self.comps.values().flat_map(|v| v.iter()).collect()
    }

    pub fn evaluate(&self, jet: &JetValue) -> CrResult<BTreeMap<MultiIndex, Vec<Series>>> {
        self.comps
            .iter()
            .map(|(nu, v)| Ok((nu.clone(), v.iter().map(|p| jet.evaluate(p)).collect::<CrResult<Vec<_>>>()?)))
            .collect()
    }

    /// `self(other(Lambda))`, both with the same base dimension; `other`
    /// must map into the source of `self`.
    pub fn after(&self, other: &JetMap) -> CrResult<JetMap> {
        if other.ncomps() != self.r || other.k != self.k {
            return Err(CrError::ArityMismatch { expected: self.r, found: other.ncomps() });
        }
        let zero = MultiIndex::zero(self.k);
        let lambda0: Vec<Series> = other.comps[&zero]
            .iter()
            .map(|p| p.as_series().ok_or_else(|| CrError::Invalid("Lambda_0 block is not a plain series".into())))
            .collect::<CrResult<_>>()?;
        let mut comps = BTreeMap::new();
        for (nu, v) in &self.comps {
            let out = v
                .iter()
                .map(|p| p.substitute(&lambda0, other.r, |c| Ok(Some(other.comps[&c.nu][c.comp].clone()))))
                .collect::<CrResult<Vec<_>>>()?;
            comps.insert(nu.clone(), out);
        }
        Ok(JetMap { k: self.k, r: other.r, l: self.l.min(other.l), comps })
    }

    /// Does component `nu` only involve `Lambda_alpha` with `alpha <= nu`?
    pub fn is_triangular(&self) -> bool {
        self.comps.iter().all(|(nu, v)| v.iter().all(|p| p.coords().iter().all(|c| c.nu.divides(nu))))
    }
}

/// Prolongation `phi^(l)` to jets of maps from `C^k`.
pub fn prolong(phi: &SeriesMap, l: u32, k: usize) -> CrResult<JetMap> {
    if let Some(j) = phi.comps().iter().position(|s| !s.constant_term().is_zero()) {
        return Err(CrError::OriginNotFixed { component: j });
    }
    if l > phi.order() {
        return Err(CrError::OrderExceeded { requested: l, available: phi.order() });
    }
    let r = phi.nvars();
    let lambda0: Vec<usize> = (0..r).collect();
    let mut comps: BTreeMap<MultiIndex, Vec<JetPolynomial>> = BTreeMap::new();
    comps.insert(MultiIndex::zero(k), phi.comps().iter().cloned().map(JetPolynomial::from_series).collect());
    for nu in MultiIndex::up_to_degree(k, l) {
        if nu.is_zero() {
            continue;
        }
        let i = (0..k).find(|&i| nu.get(i) > 0).expect("nonzero");
        let parent = &comps[&nu.lower(i).expect("positive")];
        let v = parent.iter().map(|p| p.total_derivative(i, k, &lambda0)).collect::<CrResult<Vec<_>>>()?;
        comps.insert(nu, v);
    }
    Ok(JetMap { k, r, l, comps })
}

/// Generators of the prolonged ideal: all components of `rho_j^(l)`, for each
/// generator `j` in turn.
pub fn ideal_prolong(gens: &SeriesMap, l: u32, k: usize) -> CrResult<Vec<JetPolynomial>> {
    let rank = gens.linear_part().rank();
    if rank != gens.len() {
        return Err(CrError::NotAManifold { rank, expected: gens.len() });
    }
    let jm = prolong(gens, l, k)?;
    let mut out = Vec::new();
    for j in 0..gens.len() {
        for v in jm.comps.values() {
            out.push(v[j].clone());
        }
    }
    Ok(out)
}

/// Which block carries the `P` polynomials in the chain-rule expansion of
/// `rho'(Lambda^1, Lambda^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    /// `P(Lambda-hat^1) R(Lambda-hat^2) rho'_{Z'^alpha zeta'^mu}`
    ThroughSecond,
    /// `P(Lambda-hat^2) R(Lambda-hat^1) rho'_{Z'^mu zeta'^alpha}`
    ThroughFirst,
}

/// `rho'^(l)` assembled from the universal tables. `rho` lives in
/// `(Z', zeta')` with `N'` each; the jet base has dimension `n`.
pub fn expand_with_tables(rho: &SeriesMap, n: usize, l: u32, route: Expansion) -> CrResult<JetMap> {
    let two_np = rho.nvars();
    if two_np % 2 != 0 {
        return Err(CrError::Invalid("expected variables (Z', zeta') of equal size".into()));
    }
    let np = two_np / 2;
    let tables = universal_polynomials(n, np, l);
    let order = rho.order();
    let mut comps = BTreeMap::new();
    for nu in MultiIndex::up_to_degree(n, l) {
        let mut row = Vec::new();
        for s in rho.comps() {
            let mut acc = JetPolynomial::zero(two_np, order.saturating_sub(nu.degree()));
            for ((alpha, beta), pp) in &tables.p[&nu] {
                let (p_block, r_block) = match route {
                    Expansion::ThroughSecond => (0, np),
                    Expansion::ThroughFirst => (np, 0),
                };
                let pp = pp.shift_comps(p_block);
                for (mu, rr) in &tables.r[beta] {
                    let exps = match route {
                        Expansion::ThroughSecond => alpha.concat(mu),
                        Expansion::ThroughFirst => mu.concat(alpha),
                    };
                    let d = s.derivative_multi(&exps)?;
                    let poly: LambdaPoly = pp.mul(&rr.shift_comps(r_block));
                    acc = acc.add(&JetPolynomial::from_series(d).mul_lambda(&poly));
                }
            }
            row.push(acc);
        }
        comps.insert(nu, row);
    }
    Ok(JetMap { k: n, r: two_np, l, comps })
}

/// Every jet coordinate `Lambda_{nu, j}`, `1 <= |nu| <= l`, graded-lex.
pub fn jet_coords(k: usize, r: usize, l: u32) -> Vec<JetCoord> {
    MultiIndex::up_to_degree(k, l)
        .into_iter()
        .filter(|nu| !nu.is_zero())
        .flat_map(|nu| (0..r).map(move |j| JetCoord::new(nu.clone(), j)))
        .collect()
}

/// `dim J^l_0(C^k, C^r)`.
pub fn jet_space_dim(k: usize, r: usize, l: u32) -> usize {
    r * MultiIndex::up_to_degree(k, l).len()
}

/// The polynomial map `(A, x) -> (d_x^alpha (x_1 sum_nu A_nu x^nu))_{|alpha| <= l}`
/// used to show that jet polynomials are determined by their values on
/// jets of actual maps. Variables are `A` (graded-lex in `nu`, then
/// component) followed by `x`.
pub fn test_jet_map(k: usize, r: usize, l: u32, order: u32) -> SeriesMap {
    let nus = MultiIndex::up_to_degree(k, l);
    let m = nus.len() * r;
    let nv = m + k;
    let mut out = Vec::new();
    let polys: Vec<Series> = (0..r)
        .map(|j| {
            let mut f = Series::zero(nv, order);
            for (a, nu) in nus.iter().enumerate() {
                let mut e = vec![0u32; nv];
                e[a * r + j] = 1;
                for i in 0..k {
                    e[m + i] = nu.get(i);
                }
                e[m] += 1;
                f.add_term(MultiIndex::from_slice(&e), &crate::coeff::Coefficient::one());
            }
            f
        })
        .collect();
    for alpha in &nus {
        for f in &polys {
            let mut g = f.clone();
            for i in 0..k {
                g = g.derivative(m + i, alpha.get(i)).expect("order suffices").with_order(order);
            }
            out.push(g);
        }
    }
    SeriesMap::new(nv, out).expect("consistent arity")
}
