//! Generic rank of a matrix of truncated series over the fraction field.
//!
//! The rank is certified by exhibiting a minor whose determinant has a
//! nonzero coefficient inside the known range. Small matrices expand minors
//! symbolically; larger ones restrict to a seeded random line `x = a s` and
//! compute univariate minor determinants by evaluation and interpolation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeff::{Coefficient, Rat};
use crate::error::CrResult;

use super::linalg::Matrix;
use super::map::SeriesMap;
use super::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RankMethod {
    SymbolicMinor,
    RandomCurve,
}

#[derive(Clone, Debug)]
pub struct RankReport {
    pub rank: usize,
    /// Degree through which the certifying minor was inspected.
    pub certified_order: u32,
    pub method: RankMethod,
    pub minor_rows: Vec<usize>,
    pub minor_cols: Vec<usize>,
    /// Certifying determinant when computed symbolically.
    pub minor: Option<Series>,
}

const SYMBOLIC_MAX_SIZE: usize = 3;
const SYMBOLIC_MAX_MINORS: usize = 400;
const CURVE_MAX_MINORS: usize = 4000;

/// Generic rank of the Jacobian of `f`.
pub fn generic_rank(f: &SeriesMap) -> CrResult<RankReport> {
    let jac = f.jacobian()?;
    Ok(matrix_generic_rank(&jac, f.nvars()))
}

/// Generic rank of an arbitrary matrix of series in `nvars` variables.
pub fn matrix_generic_rank(rows: &[Vec<Series>], nvars: usize) -> RankReport {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    let order = rows.iter().flatten().map(|s| s.order()).min().unwrap_or(0);
    let top = nr.min(nc);
    let empty = RankReport {
        rank: 0,
        certified_order: order,
        method: RankMethod::SymbolicMinor,
        minor_rows: vec![],
        minor_cols: vec![],
        minor: None,
    };
    if top == 0 {
        return empty;
    }
    let n_minors = |r: usize| binom(nr, r).saturating_mul(binom(nc, r));
    if top <= SYMBOLIC_MAX_SIZE && (1..=top).all(|r| n_minors(r) <= SYMBOLIC_MAX_MINORS) {
        for r in (1..=top).rev() {
            for rs in combinations(nr, r) {
                for cs in combinations(nc, r) {
                    let sub: Vec<Vec<Series>> =
                        rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j].clone()).collect()).collect();
                    let det = series_det(&sub);
                    if !det.is_zero() {
                        return RankReport {
                            rank: r,
                            certified_order: det.order(),
                            method: RankMethod::SymbolicMinor,
                            minor_rows: rs,
                            minor_cols: cs,
                            minor: Some(det),
                        };
                    }
                }
            }
        }
        return empty;
    }
    curve_rank(rows, nvars, order).unwrap_or(RankReport { method: RankMethod::RandomCurve, ..empty })
}

/// Determinant of a square matrix of series by Laplace expansion.
pub fn series_det(m: &[Vec<Series>]) -> Series {
    let n = m.len();
    match n {
        0 => panic!("empty determinant"),
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        _ => {
            let mut acc: Option<Series> = None;
            for j in 0..n {
                if m[0][j].is_zero() {
                    let z = Series::zero(m[0][j].nvars(), m.iter().flatten().map(|s| s.order()).min().unwrap_or(0));
                    acc = Some(acc.map_or(z.clone(), |a| a.add(&z)));
                    continue;
                }
                let minor: Vec<Vec<Series>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, s)| s.clone()).collect())
                    .collect();
                let term = m[0][j].mul(&series_det(&minor));
                let term = if j % 2 == 1 { term.neg() } else { term };
                acc = Some(match acc {
                    Some(a) => a.add(&term),
                    None => term,
                });
            }
            acc.expect("nonempty row")
        }
    }
}

type Poly = Vec<Coefficient>;

fn restrict(s: &Series, dir: &[Coefficient], order: u32) -> Poly {
    let mut p = vec![Coefficient::zero(); order as usize + 1];
    for (m, c) in s.terms() {
        let d = m.degree();
        if d > order {
            break;
        }
        let mut v = c.clone();
        for (i, a) in dir.iter().enumerate() {
            for _ in 0..m.get(i) {
                v *= a;
            }
        }
        p[d as usize] += &v;
    }
    p
}

fn eval(p: &Poly, x: &Coefficient) -> Coefficient {
    let mut acc = Coefficient::zero();
    for c in p.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

fn poly_degree(p: &Poly) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// Coefficients of degree `<= keep` of `det(P(s))` for a polynomial matrix.
fn truncated_poly_det(m: &[Vec<&Poly>], keep: u32) -> Vec<Coefficient> {
    let bound: usize = m.iter().map(|row| row.iter().map(|p| poly_degree(p)).max().unwrap_or(0)).sum();
    let pts: Vec<Coefficient> = (0..=bound as i64).map(Coefficient::from_int).collect();
    let vals: Vec<Coefficient> = pts
        .iter()
        .map(|x| {
            let num = Matrix::from_rows(m.iter().map(|row| row.iter().map(|p| eval(p, x)).collect()).collect());
            num.determinant()
        })
        .collect();
    let coeffs = interpolate(&pts, &vals);
    coeffs.into_iter().take(keep as usize + 1).collect()
}

/// Newton interpolation returning monomial coefficients.
fn interpolate(xs: &[Coefficient], ys: &[Coefficient]) -> Vec<Coefficient> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            let den = &xs[i] - &xs[i - j];
            dd[i] = &num * &den.inv().expect("distinct nodes");
        }
    }
    // expand the Newton form by Horner from the top
    let mut poly: Vec<Coefficient> = vec![dd[n - 1].clone()];
    for k in (0..n - 1).rev() {
        // poly = poly * (s - x_k) + dd[k]
        let mut next = vec![Coefficient::zero(); poly.len() + 1];
        for (e, c) in poly.iter().enumerate() {
            next[e + 1] += c;
            next[e] -= &(c * &xs[k]);
        }
        next[0] += &dd[k];
        poly = next;
    }
    poly
}

fn curve_rank(rows: &[Vec<Series>], nvars: usize, order: u32) -> Option<RankReport> {
    let nr = rows.len();
    let nc = rows[0].len();
    let mut best: Option<RankReport> = None;
    for attempt in 0..2u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + attempt);
        let dir: Vec<Coefficient> = (0..nvars)
            .map(|_| {
                let v: i64 = rng.gen_range(1..=29);
                if rng.gen_bool(0.5) {
                    Coefficient::from_int(v)
                } else {
                    Coefficient::from_int(-v)
                }
            })
            .collect();
        let polys: Vec<Vec<Poly>> = rows.iter().map(|r| r.iter().map(|s| restrict(s, &dir, order)).collect()).collect();
        // numeric rank at a random point bounds the certified rank from above
        let s0 = Coefficient::new(Rat::new(rng.gen_range(2..97), rng.gen_range(1..13)), Rat::from_int(0));
        let num = Matrix::from_rows(polys.iter().map(|r| r.iter().map(|p| eval(p, &s0)).collect()).collect());
        let upper = num.rank();
        let floor = best.as_ref().map_or(0, |b| b.rank);
        for r in (floor + 1..=upper).rev() {
            let mut tried = 0usize;
            let mut candidates: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
            if let Some(pm) = pivot_minor(&num, r) {
                candidates.push(pm);
            }
            let mut found = None;
            'outer: for (rs, cs) in candidates.into_iter().chain(
                combinations(nr, r).into_iter().flat_map(|rs| combinations(nc, r).into_iter().map(move |cs| (rs.clone(), cs))),
            ) {
                tried += 1;
                if tried > CURVE_MAX_MINORS {
                    break 'outer;
                }
                let sub: Vec<Vec<&Poly>> = rs.iter().map(|&i| cs.iter().map(|&j| &polys[i][j]).collect()).collect();
                let det = truncated_poly_det(&sub, order);
                if det.iter().any(|c| !c.is_zero()) {
                    found = Some((rs, cs));
                    break;
                }
            }
            if let Some((rs, cs)) = found {
                best = Some(RankReport {
                    rank: r,
                    certified_order: order,
                    method: RankMethod::RandomCurve,
                    minor_rows: rs,
                    minor_cols: cs,
                    minor: None,
                });
                break;
            }
        }
        if best.as_ref().is_some_and(|b| b.rank == nr.min(nc)) {
            break;
        }
    }
    best
}

fn pivot_minor(num: &Matrix, r: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let cols = num.rref().pivots;
    if cols.len() < r {
        return None;
    }
    let cols: Vec<usize> = cols[..r].to_vec();
    let t = Matrix::from_rows((0..cols.len()).map(|k| (0..num.rows()).map(|i| num.get(i, cols[k]).clone()).collect()).collect());
    let rows = t.rref().pivots;
    if rows.len() < r {
        return None;
    }
    Some((rows[..r].to_vec(), cols))
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    #[test]
    fn rank_of_square_and_product_map() {
        // (x^2, xy): det of the Jacobian is 2x^2
        let f = SeriesMap::new(
            2,
            vec![
                Series::from_terms(2, 6, vec![(vec![2, 0], c(1))]),
                Series::from_terms(2, 6, vec![(vec![1, 1], c(1))]),
            ],
        )
        .unwrap();
        let r = generic_rank(&f).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.minor.unwrap().coeff_of(&[2, 0]), c(2));
    }

    #[test]
    fn dependent_components() {
        // (x + y, (x + y)^2)
        let s = Series::from_terms(2, 6, vec![(vec![1, 0], c(1)), (vec![0, 1], c(1))]);
        let f = SeriesMap::new(2, vec![s.clone(), s.mul(&s)]).unwrap();
        assert_eq!(generic_rank(&f).unwrap().rank, 1);
    }

    #[test]
    fn curve_route_agrees() {
        // 4x4 identity-like map with a degenerate pair
        let n = 4;
        let v = |i| Series::var(n, i, 6);
        let f = SeriesMap::new(n, vec![v(0), v(1), v(0).mul(&v(1)), v(2).add(&v(3))]).unwrap();
        let r = generic_rank(&f).unwrap();
        assert_eq!(r.method, RankMethod::RandomCurve);
        assert_eq!(r.rank, 3);
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let xs: Vec<Coefficient> = (0..4).map(c).collect();
        let ys: Vec<Coefficient> = xs.iter().map(|x| &(&(x * x) * x) - &c(2)).collect();
        let p = interpolate(&xs, &ys);
        assert_eq!(p, vec![c(-2), c(0), c(0), c(1)]);
    }
}
