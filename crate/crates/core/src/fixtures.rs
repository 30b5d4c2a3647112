//! Reference manifolds and maps used by tests, the CLI self-test and the
//! benchmarks.
//!
//! All hypersurfaces here have the shape `Im Z_w = sum_k |f_k(Z)|^2` with
//! holomorphic `f_k`, complexified to
//! `(Z_w - zeta_w)/(2i) - sum_k f_k(Z) fbar_k(zeta)`.

use crate::coeff::{Coefficient, Rat};
use crate::error::CrResult;
use crate::manifolds::GenericManifold;
use crate::powerseries::{Series, SeriesMap};

/// Complexified defining function of `Im Z_w = sum |f_k(Z)|^2`.
pub fn sum_of_squares_defining(big_n: usize, w: usize, fs: &[Series], order: u32) -> SeriesMap {
    let nv = 2 * big_n;
    let minus_half_i = Coefficient::new(Rat::from_int(0), Rat::new(-1, 2));
    let mut rho = Series::var(nv, w, order)
        .sub(&Series::var(nv, big_n + w, order))
        .scale(&minus_half_i);
    for f in fs {
        let fz = f.shift_vars(nv, 0);
        let fzeta = f.conj_coeffs().shift_vars(nv, big_n);
        rho = rho.sub(&fz.mul(&fzeta));
    }
    SeriesMap::new(nv, vec![rho]).expect("consistent arity")
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn mono(big_n: usize, order: u32, exps: &[u32]) -> Series {
    Series::monomial(big_n, order, exps, Coefficient::one())
}

/// Levi-flat hyperplane `Im w = 0` in C^2, coordinates `(z, w)`.
pub fn hyperplane(order: u32) -> CrResult<GenericManifold> {
    let rho = sum_of_squares_defining(2, 1, &[], order);
    GenericManifold::from_defining_named(&rho, 2, names(&["z", "w"]))
}

/// Heisenberg quadric `Im w = |z|^2` in C^2, coordinates `(z, w)`.
pub fn quadric(order: u32) -> CrResult<GenericManifold> {
    let rho = sum_of_squares_defining(2, 1, &[mono(2, order, &[1, 0])], order);
    GenericManifold::from_defining_named(&rho, 2, names(&["z", "w"]))
}

/// `Im Z3 = |Z1 Z2|^2` in C^3.
pub fn product_hypersurface(order: u32) -> CrResult<GenericManifold> {
    let rho = sum_of_squares_defining(3, 2, &[mono(3, order, &[1, 1, 0])], order);
    GenericManifold::from_defining_named(&rho, 3, names(&["Z1", "Z2", "Z3"]))
}

/// Source of the collapsing pair: `Im Z3 = |Z1^2 Z2|^2 + |Z1|^2`.
pub fn collapsing_source(order: u32) -> CrResult<GenericManifold> {
    let rho = sum_of_squares_defining(3, 2, &[mono(3, order, &[2, 1, 0]), mono(3, order, &[1, 0, 0])], order);
    GenericManifold::from_defining_named(&rho, 3, names(&["Z1", "Z2", "Z3"]))
}

/// Target of the collapsing pair: `Im Z3 = |Z1 Z2|^2 + |Z1|^2`.
pub fn collapsing_target(order: u32) -> CrResult<GenericManifold> {
    let rho = sum_of_squares_defining(3, 2, &[mono(3, order, &[1, 1, 0]), mono(3, order, &[1, 0, 0])], order);
    GenericManifold::from_defining_named(&rho, 3, names(&["Z1", "Z2", "Z3"]))
}

/// Truncation of the divergent series `sum_{k>=1} k! x^k` in variable `var`.
pub fn factorial_series(nvars: usize, var: usize, order: u32) -> Series {
    let mut s = Series::zero(nvars, order);
    let mut f = Coefficient::one();
    for k in 1..=order {
        f = f.scale_int(k as i64);
        let mut e = vec![0u32; nvars];
        e[var] = k;
        s.add_term(crate::powerseries::MultiIndex::from_slice(&e), &f);
    }
    s
}

/// `(Z1 e^p, Z2 e^{-p}, Z3)`: preserves `Im Z3 = |Z1 Z2|^2` for any `p`.
pub fn twist_map(p: &Series) -> CrResult<SeriesMap> {
    let order = p.order();
    let e = p.exp()?;
    let em = p.neg().exp()?;
    SeriesMap::new(
        3,
        vec![
            Series::var(3, 0, order).mul(&e),
            Series::var(3, 1, order).mul(&em),
            Series::var(3, 2, order),
        ],
    )
}

/// The twist with the divergent stand-in `p = sum k! Z1^k`.
pub fn divergent_twist(order: u32) -> CrResult<SeriesMap> {
    twist_map(&factorial_series(3, 0, order))
}

/// `(Z1, Z1 Z2, Z3)`: maps the collapsing source into the target.
pub fn collapsing_map(order: u32) -> SeriesMap {
    SeriesMap::new(3, vec![mono(3, order, &[1, 0, 0]), mono(3, order, &[1, 1, 0]), mono(3, order, &[0, 0, 1])])
        .expect("consistent arity")
}

/// Isotropy automorphism of the Heisenberg quadric fixing the origin:
/// `(lambda u (z + a w), lambda^2 w) / (1 - 2i conj(a) z - (r + i|a|^2) w)`
/// with `lambda > 0` rational, `|u| = 1` and `a`, `r` exact.
pub fn quadric_automorphism(lambda: Rat, u: Coefficient, a: Coefficient, r: Rat, order: u32) -> CrResult<SeriesMap> {
    let z = Series::var(2, 0, order);
    let w = Series::var(2, 1, order);
    let lam = Coefficient::new(lambda.clone(), Rat::from_int(0));
    let lam2 = &lam * &lam;
    let two_i_abar = &Coefficient::gaussian(0, 2) * &a.conj();
    let rr = Coefficient::new(r, a.norm_sqr());
    let denom = Series::one(2, order).sub(&z.scale(&two_i_abar)).sub(&w.scale(&rr));
    let inv = denom.inverse()?;
    let f = z.add(&w.scale(&a)).scale(&(&lam * &u)).mul(&inv);
    let g = w.scale(&lam2).mul(&inv);
    SeriesMap::new(2, vec![f, g])
}
