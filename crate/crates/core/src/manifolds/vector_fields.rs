//! Formal vector fields on the complexified space and finite type.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coeff::Coefficient;
use crate::error::CrResult;
use crate::powerseries::{generic_rank, Matrix, MultiIndex, Series};

use super::generic::GenericManifold;
use super::segre::SegreMapping;

/// `sum_i coeffs[i] d/dx_i` on `(Z, zeta)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub coeffs: Vec<Series>,
}

impl VectorField {
    pub fn apply(&self, f: &Series) -> CrResult<Series> {
        let order = self.coeffs.iter().map(|c| c.order()).min().unwrap_or(0).min(f.order().saturating_sub(1));
        let mut acc = Series::zero(f.nvars(), order);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            acc = acc.add(&a.mul(&f.derivative(i, 1)?));
        }
        Ok(acc)
    }

    pub fn bracket(&self, other: &VectorField) -> CrResult<VectorField> {
        let coeffs = (0..self.coeffs.len())
            .map(|j| Ok(self.apply(&other.coeffs[j])?.sub(&other.apply(&self.coeffs[j])?)))
            .collect::<CrResult<_>>()?;
        Ok(VectorField { coeffs })
    }

    pub fn value_at_origin(&self) -> Vec<Coefficient> {
        self.coeffs.iter().map(|c| c.constant_term()).collect()
    }

    pub fn order(&self) -> u32 {
        self.coeffs.iter().map(|c| c.order()).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn flatten(&self) -> BTreeMap<(usize, MultiIndex), Coefficient> {
        let mut v = BTreeMap::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            for (m, x) in c.terms() {
                v.insert((i, m.clone()), x.clone());
            }
        }
        v
    }
}

/// `X_k = d/dz_k + sum_l Q_l,z_k d/dw_l` and `Y_k = d/dchi_k + sum_l Qbar_l,chi_k d/dtau_l`.
pub fn cr_vector_fields(m: &GenericManifold) -> CrResult<(Vec<VectorField>, Vec<VectorField>)> {
    let big_n = m.big_n();
    let nv = 2 * big_n;
    let order = m.order();
    let q = m.q_in_z_zeta();
    let qb = m.qbar_in_z_zeta();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &zk in m.z_idx() {
        let mut cx = vec![Series::zero(nv, order - 1); nv];
        cx[zk] = Series::one(nv, order - 1);
        let mut cy = vec![Series::zero(nv, order - 1); nv];
        cy[big_n + zk] = Series::one(nv, order - 1);
        for (l, &wl) in m.w_idx().iter().enumerate() {
            cx[wl] = q.comp(l).derivative(zk, 1)?;
            cy[big_n + wl] = qb.comp(l).derivative(big_n + zk, 1)?;
        }
        xs.push(VectorField { coeffs: cx });
        ys.push(VectorField { coeffs: cy });
    }
    Ok((xs, ys))
}

#[derive(Clone, Debug, Serialize)]
pub struct LieReport {
    pub span_dim: usize,
    pub target: usize,
    /// Longest bracket length that was evaluated.
    pub depth: usize,
    pub certified_order: u32,
}

/// Dimension at 0 of the span of iterated brackets of the CR fields of
/// length `<= depth`. Each level is pruned to a linearly independent set.
pub fn lie_span(m: &GenericManifold, depth: usize) -> CrResult<LieReport> {
    let (xs, ys) = cr_vector_fields(m)?;
    let target = 2 * m.big_n() - m.codim();
    let base: Vec<VectorField> = xs.into_iter().chain(ys).collect();
    let mut values: Vec<Vec<Coefficient>> = base.iter().map(|f| f.value_at_origin()).collect();
    let mut level = independent(base.clone());
    let mut reached = 1;
    let mut order = level.iter().map(|f| f.order()).min().unwrap_or(0);
    let rank = |vals: &Vec<Vec<Coefficient>>| if vals.is_empty() { 0 } else { Matrix::from_rows(vals.clone()).rank() };
    while rank(&values) < target && reached < depth && !level.is_empty() && order >= 1 {
        let mut next = Vec::new();
        for b in &base {
            for f in &level {
                let br = b.bracket(f)?;
                if !br.is_zero() {
                    next.push(br);
                }
            }
        }
        level = independent(next);
        reached += 1;
        order = order.saturating_sub(1);
        values.extend(level.iter().map(|f| f.value_at_origin()));
    }
    Ok(LieReport { span_dim: rank(&values), target, depth: reached, certified_order: order })
}

fn independent(fields: Vec<VectorField>) -> Vec<VectorField> {
    let mut pivots: BTreeMap<(usize, MultiIndex), BTreeMap<(usize, MultiIndex), Coefficient>> = BTreeMap::new();
    let mut keep = Vec::new();
    for f in fields {
        let mut v = f.flatten();
        loop {
            let Some((k, c)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else { break };
            let Some(p) = pivots.get(&k) else { break };
            for (pk, px) in p {
                let e = v.entry(pk.clone()).or_insert_with(Coefficient::zero);
                *e -= &(&c * px);
                if e.is_zero() {
                    v.remove(pk);
                }
            }
        }
        if let Some((k, c)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) {
            let inv = c.inv().expect("nonzero");
            pivots.insert(k, v.into_iter().map(|(a, x)| (a, &x * &inv)).collect());
            keep.push(f);
        }
    }
    keep
}

#[derive(Clone, Debug, Serialize)]
pub struct SegreTypeReport {
    /// Smallest `j` with generic rank of `v^j` equal to `N`.
    pub j0: Option<usize>,
    pub ranks: Vec<usize>,
    pub certified_order: u32,
}

/// Ranks of `v^1..v^j_bound`, stopping at the first of full rank.
pub fn segre_type(m: &GenericManifold, j_bound: usize) -> CrResult<SegreTypeReport> {
    let segre = SegreMapping::standard(m);
    let tower = segre.tower(j_bound)?;
    let mut ranks = Vec::new();
    let mut order = m.order();
    for (j, v) in tower.iter().enumerate().skip(1) {
        let r = generic_rank(v)?;
        ranks.push(r.rank);
        order = order.min(r.certified_order);
        if r.rank == m.big_n() {
            return Ok(SegreTypeReport { j0: Some(j), ranks, certified_order: order });
        }
    }
    Ok(SegreTypeReport { j0: None, ranks, certified_order: order })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiniteTypeRoute {
    Lie { depth: usize },
    Segre { j_bound: usize },
    Both { depth: usize, j_bound: usize },
}

impl FiniteTypeRoute {
    /// Default bounds: bracket length `2N - d + 1` and `j <= d + 1`.
    pub fn default_for(m: &GenericManifold) -> FiniteTypeRoute {
        FiniteTypeRoute::Both { depth: 2 * m.big_n() - m.codim() + 1, j_bound: m.codim() + 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteTypeReport {
    pub finite_type: bool,
    pub lie: Option<LieReport>,
    pub segre: Option<SegreTypeReport>,
    /// Both routes ran and disagreed at this truncation.
    pub routes_disagree: bool,
}

pub fn finite_type(m: &GenericManifold, route: FiniteTypeRoute) -> CrResult<FiniteTypeReport> {
    let (lie, segre) = match route {
        FiniteTypeRoute::Lie { depth } => (Some(lie_span(m, depth)?), None),
        FiniteTypeRoute::Segre { j_bound } => (None, Some(segre_type(m, j_bound)?)),
        FiniteTypeRoute::Both { depth, j_bound } => (Some(lie_span(m, depth)?), Some(segre_type(m, j_bound)?)),
    };
    let lie_ok = lie.as_ref().map(|l| l.span_dim == l.target);
    let segre_ok = segre.as_ref().map(|s| s.j0.is_some());
    let finite_type = lie_ok.unwrap_or(false) || segre_ok.unwrap_or(false);
    let routes_disagree = matches!((lie_ok, segre_ok), (Some(a), Some(b)) if a != b);
    Ok(FiniteTypeReport { finite_type, lie, segre, routes_disagree })
}
