//! Holomorphic nondegeneracy.
//!
//! Expanding `Qbar(chi, Z) = sum_alpha q_alpha(Z) chi^alpha`, the manifold is
//! holomorphically nondegenerate iff some `N` gradients `grad q_{j,alpha}`
//! are generically independent. Otherwise a holomorphic tangent vector field
//! `a(Z) d/dZ` with `sum_m a_m d q_{j,alpha} / dZ_m = 0` witnesses degeneracy.

use serde::Serialize;

use crate::coeff::Coefficient;
use crate::error::CrResult;
use crate::powerseries::{matrix_generic_rank, series_det, Matrix, MultiIndex, Series};

use super::generic::GenericManifold;

/// One coefficient function `q_{j,alpha}(Z)` of `Qbar`.
#[derive(Clone, Debug)]
pub struct QCoefficient {
    pub component: usize,
    pub alpha: MultiIndex,
    pub q: Series,
}

#[derive(Clone, Debug)]
pub enum HoloNondegVerdict {
    Nondegenerate { rows: Vec<(usize, Vec<u32>)>, determinant: Series, certified_order: u32 },
    Degenerate { field: Vec<Series>, certified_order: u32 },
    Inconclusive { certified_order: u32, reason: String },
}

impl HoloNondegVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            HoloNondegVerdict::Nondegenerate { .. } => "nondegenerate",
            HoloNondegVerdict::Degenerate { .. } => "degenerate",
            HoloNondegVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NondegCertificate {
    pub rows: Vec<(usize, Vec<u32>)>,
    pub gradients: Vec<Vec<Series>>,
    pub determinant: Series,
}

/// Default bound on `|alpha|`.
pub fn default_alpha_bound(m: &GenericManifold) -> u32 {
    (m.order() / 2).max(1)
}

/// `q_{j,alpha}` for `|alpha| <= bound`, graded-lex in `alpha`, then `j`.
pub fn q_coefficients(m: &GenericManifold, bound: u32) -> Vec<QCoefficient> {
    let n = m.n();
    let chi: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for alpha in MultiIndex::up_to_degree(n, bound.min(m.order())) {
        for (j, qb) in m.qbar().comps().iter().enumerate() {
            let q = qb.coefficient_in(&chi, &alpha.exps());
            out.push(QCoefficient { component: j, alpha: alpha.clone(), q });
        }
    }
    out
}

fn gradient(q: &Series) -> CrResult<Vec<Series>> {
    (0..q.nvars()).map(|i| q.derivative(i, 1)).collect()
}

/// Greedy search over `q_{j,alpha}` in graded-lex order for `N` generically
/// independent gradients; the first certificate wins.
pub fn nondegeneracy_rows(m: &GenericManifold, bound: u32) -> CrResult<Option<NondegCertificate>> {
    let big_n = m.big_n();
    let mut rows: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut grads: Vec<Vec<Series>> = Vec::new();
    for qc in q_coefficients(m, bound) {
        if qc.q.order() < 1 {
            continue;
        }
        let g = gradient(&qc.q)?;
        if g.iter().all(|s| s.is_zero()) {
            continue;
        }
        let mut trial = grads.clone();
        trial.push(g.clone());
        if matrix_generic_rank(&trial, big_n).rank == trial.len() {
            grads = trial;
            rows.push((qc.component, qc.alpha.exps()));
            if grads.len() == big_n {
                break;
            }
        }
    }
    if grads.len() < big_n {
        return Ok(None);
    }
    let determinant = series_det(&grads);
    if determinant.is_zero() {
        return Ok(None);
    }
    Ok(Some(NondegCertificate { rows, gradients: grads, determinant }))
}

/// Search for a nonzero polynomial field `a(Z)` of degree `<= D` annihilating
/// every `q_{j,alpha}` whose gradient is known through degree `2D`.
pub fn degeneracy_field(m: &GenericManifold, bound: u32) -> CrResult<Option<(Vec<Series>, u32)>> {
    let big_n = m.big_n();
    let qs = q_coefficients(m, bound);
    let grads: Vec<(Vec<Series>, u32)> = qs
        .iter()
        .filter(|qc| qc.q.order() >= 1)
        .map(|qc| Ok((gradient(&qc.q)?, qc.q.order() - 1)))
        .collect::<CrResult<_>>()?;
    let max_known = grads.iter().map(|(_, e)| *e).max().unwrap_or(0);
    for dd in 0..=max_known / 2 {
        // every known gradient must constrain a field of this degree
        if grads.iter().any(|(_, k)| *k < 2 * dd) {
            break;
        }
        let unknowns: Vec<(usize, MultiIndex)> = (0..big_n)
            .flat_map(|mm| MultiIndex::up_to_degree(big_n, dd).into_iter().map(move |b| (mm, b)))
            .collect();
        let mut eq_rows: Vec<Vec<Coefficient>> = Vec::new();
        let mut used = 0;
        let mut min_known = u32::MAX;
        for (g, known) in &grads {
            used += 1;
            min_known = min_known.min(*known);
            for gamma in MultiIndex::up_to_degree(big_n, *known) {
                let row: Vec<Coefficient> = unknowns
                    .iter()
                    .map(|(mm, beta)| match gamma.checked_sub(beta) {
                        Some(rest) => g[*mm].coeff(&rest),
                        None => Coefficient::zero(),
                    })
                    .collect();
                if row.iter().any(|c| !c.is_zero()) {
                    eq_rows.push(row);
                }
            }
        }
        if used == 0 {
            break;
        }
        let ns = if eq_rows.is_empty() {
            let mut v = vec![Coefficient::zero(); unknowns.len()];
            v[0] = Coefficient::one();
            vec![v]
        } else {
            Matrix::from_rows(eq_rows).nullspace()
        };
        if let Some(v) = ns.into_iter().next() {
            let mut field = vec![Series::zero(big_n, dd); big_n];
            for ((mm, beta), c) in unknowns.iter().zip(v) {
                field[*mm].add_term(beta.clone(), &c);
            }
            return Ok(Some((field, min_known)));
        }
    }
    Ok(None)
}

pub fn holo_nondegeneracy_check(m: &GenericManifold, alpha_bound: u32) -> CrResult<HoloNondegVerdict> {
    if let Some(cert) = nondegeneracy_rows(m, alpha_bound)? {
        let certified_order = cert.determinant.order();
        return Ok(HoloNondegVerdict::Nondegenerate { rows: cert.rows, determinant: cert.determinant, certified_order });
    }
    if let Some((field, order)) = degeneracy_field(m, alpha_bound)? {
        return Ok(HoloNondegVerdict::Degenerate { field, certified_order: order });
    }
    Ok(HoloNondegVerdict::Inconclusive {
        certified_order: m.order(),
        reason: "no independent gradients and no tangent holomorphic field at this order".into(),
    })
}
