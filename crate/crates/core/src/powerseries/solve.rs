use crate::error::{CrError, CrResult};

use super::map::SeriesMap;
use super::series::Series;

/// Solve `rho(x, u(x)) = 0` for `u`, where `rho` has `m + d` variables with
/// the unknowns `y` last and `d = rho.len()` components. Needs `rho(0) = 0`
/// and an invertible `d rho / d y` at the origin. Solved degree by degree.
pub fn implicit_solve(rho: &SeriesMap, m: usize) -> CrResult<SeriesMap> {
    let d = rho.len();
    if rho.nvars() != m + d {
        return Err(CrError::ArityMismatch { expected: m + d, found: rho.nvars() });
    }
    if let Some(k) = rho.comps().iter().position(|s| !s.constant_term().is_zero()) {
        return Err(CrError::NotAtOrigin { component: k });
    }
    let ys: Vec<usize> = (m..m + d).collect();
    let a_inv = rho
        .linear_part_cols(&ys)
        .inverse()
        .map_err(|_| CrError::Singular("d rho / d y is not invertible at the origin".into()))?;
    let order = rho.order();
    let mut u: Vec<Series> = vec![Series::zero(m, order); d];
    for deg in 1..=order {
        let mut inputs: Vec<Series> = (0..m).map(|i| Series::var(m, i, order)).collect();
        inputs.extend(u.iter().cloned());
        let resid: Vec<Series> =
            rho.comps().iter().map(|s| s.compose_unchecked(&inputs, m, deg).homogeneous_part(deg)).collect();
        if resid.iter().all(|s| s.is_zero()) {
            continue;
        }
        for (i, ui) in u.iter_mut().enumerate() {
            let mut corr = Series::zero(m, order);
            for (j, rj) in resid.iter().enumerate() {
                let a = a_inv.get(i, j);
                if !a.is_zero() {
                    corr = corr.sub(&rj.with_order(order).scale(a));
                }
            }
            *ui = ui.add(&corr);
        }
    }
    SeriesMap::new(m, u)
}

/// Compositional inverse of a square map with invertible linear part.
pub fn invert_map(f: &SeriesMap) -> CrResult<SeriesMap> {
    let n = f.nvars();
    if f.len() != n {
        return Err(CrError::ArityMismatch { expected: n, found: f.len() });
    }
    if !f.fixes_origin() {
        return Err(CrError::OriginNotFixed { component: 0 });
    }
    // rho(y, x) = F(x) - y, solve for x
    let mut map: Vec<usize> = Vec::with_capacity(n);
    map.extend(n..2 * n);
    let comps: Vec<Series> = f
        .comps()
        .iter()
        .enumerate()
        .map(|(i, s)| s.remap_vars(2 * n, &map).sub(&Series::var(2 * n, i, s.order())))
        .collect();
    let rho = SeriesMap::new(2 * n, comps)?;
    implicit_solve(&rho, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Coefficient;

    fn c(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    #[test]
    fn catalan_solution() {
        // y - x - y^2 = 0
        let rho = Series::from_terms(2, 6, vec![(vec![0, 1], c(1)), (vec![1, 0], c(-1)), (vec![0, 2], c(-1))]);
        let u = implicit_solve(&SeriesMap::new(2, vec![rho]).unwrap(), 1).unwrap();
        let cat = [0, 1, 1, 2, 5, 14, 42];
        for (k, &v) in cat.iter().enumerate() {
            assert_eq!(u.comp(0).coeff_of(&[k as u32]), c(v), "degree {k}");
        }
    }

    #[test]
    fn invert_quadratic() {
        let f = SeriesMap::new(1, vec![Series::from_terms(1, 5, vec![(vec![1], c(1)), (vec![2], c(1))])]).unwrap();
        let g = invert_map(&f).unwrap();
        let expect = [0, 1, -1, 2, -5, 14];
        for (k, &v) in expect.iter().enumerate() {
            assert_eq!(g.comp(0).coeff_of(&[k as u32]), c(v));
        }
        assert_eq!(f.compose(&g).unwrap(), SeriesMap::identity(1, 5));
    }

    #[test]
    fn singular_linear_part() {
        let f = SeriesMap::new(1, vec![Series::from_terms(1, 4, vec![(vec![2], c(1))])]).unwrap();
        assert!(matches!(invert_map(&f), Err(CrError::Singular(_))));
    }
}
