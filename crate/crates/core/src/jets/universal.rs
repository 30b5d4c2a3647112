//! Chain-rule polynomials, generated by differentiating placeholder
//! composites.
//!
//! For `g(Z) = G(F(Z), Z)` with `F: C^N -> C^N'` we have
//! `d^nu g = sum P[nu][alpha][beta](jet F) * G_{Z'^alpha zeta^beta}(F(Z), Z)`,
//! and for `g(zeta) = G(F(zeta))`,
//! `d^beta g = sum R[beta][mu](jet F) * G_{zeta'^mu}(F(zeta))`.
//! Partials are raw (no factorials) and the jet coordinates are
//! `Lambda_{delta, j} = d^delta F_j`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::powerseries::MultiIndex;

use super::poly::{JetCoord, LambdaPoly};

#[derive(Clone, Debug)]
pub struct UniversalPolys {
    pub n: usize,
    pub n_prime: usize,
    pub l: u32,
    /// `P[nu][(alpha, beta)]`, zero entries omitted.
    pub p: BTreeMap<MultiIndex, BTreeMap<(MultiIndex, MultiIndex), LambdaPoly>>,
    /// `R[beta][mu]`, zero entries omitted.
    pub r: BTreeMap<MultiIndex, BTreeMap<MultiIndex, LambdaPoly>>,
}

impl UniversalPolys {
    pub fn p_entry(&self, nu: &MultiIndex, alpha: &MultiIndex, beta: &MultiIndex) -> LambdaPoly {
        self.p.get(nu).and_then(|t| t.get(&(alpha.clone(), beta.clone()))).cloned().unwrap_or_default()
    }

    pub fn r_entry(&self, beta: &MultiIndex, mu: &MultiIndex) -> LambdaPoly {
        self.r.get(beta).and_then(|t| t.get(mu)).cloned().unwrap_or_default()
    }
}

fn first_index(nu: &MultiIndex) -> usize {
    (0..nu.nvars()).find(|&i| nu.get(i) > 0).expect("nonzero multi-index")
}

fn add_into<K: Ord>(table: &mut BTreeMap<K, LambdaPoly>, key: K, p: LambdaPoly) {
    if p.is_zero() {
        return;
    }
    let e = table.entry(key).or_default();
    e.add_assign(&p);
}

fn generate(n: usize, n_prime: usize, l: u32) -> UniversalPolys {
    let first_partials: Vec<Vec<LambdaPoly>> = (0..n)
        .map(|i| (0..n_prime).map(|j| LambdaPoly::coord(JetCoord::new(MultiIndex::unit(n, i), j))).collect())
        .collect();

    // R: D_i G_mu = sum_j G_{mu + e_j} * Lambda_{e_i, j}
    let mut r: BTreeMap<MultiIndex, BTreeMap<MultiIndex, LambdaPoly>> = BTreeMap::new();
    let mut base = BTreeMap::new();
    base.insert(MultiIndex::zero(n_prime), LambdaPoly::one());
    r.insert(MultiIndex::zero(n), base);
    // P: D_i G_{alpha, beta} = sum_j G_{alpha + e_j, beta} Lambda_{e_i, j} + G_{alpha, beta + e_i}
    let mut p: BTreeMap<MultiIndex, BTreeMap<(MultiIndex, MultiIndex), LambdaPoly>> = BTreeMap::new();
    let mut base = BTreeMap::new();
    base.insert((MultiIndex::zero(n_prime), MultiIndex::zero(n)), LambdaPoly::one());
    p.insert(MultiIndex::zero(n), base);

    for nu in MultiIndex::up_to_degree(n, l) {
        if nu.is_zero() {
            continue;
        }
        let i = first_index(&nu);
        let parent = nu.lower(i).expect("positive");

        let mut row = BTreeMap::new();
        for (mu, poly) in &r[&parent] {
            for j in 0..n_prime {
                add_into(&mut row, mu.bump(j), poly.mul(&first_partials[i][j]));
            }
            add_into(&mut row, mu.clone(), poly.total_derivative(i));
        }
        r.insert(nu.clone(), row);

        let mut row = BTreeMap::new();
        for ((alpha, beta), poly) in &p[&parent] {
            for j in 0..n_prime {
                add_into(&mut row, (alpha.bump(j), beta.clone()), poly.mul(&first_partials[i][j]));
            }
            add_into(&mut row, (alpha.clone(), beta.bump(i)), poly.clone());
            add_into(&mut row, (alpha.clone(), beta.clone()), poly.total_derivative(i));
        }
        p.insert(nu, row);
    }
    UniversalPolys { n, n_prime, l, p, r }
}

type Cache = Mutex<HashMap<(usize, usize, u32), Arc<UniversalPolys>>>;

/// Tables for `(N, N', l)`, memoized process-wide.
pub fn universal_polynomials(n: usize, n_prime: usize, l: u32) -> Arc<UniversalPolys> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cache poisoned").get(&(n, n_prime, l)) {
        return t.clone();
    }
    // generate outside the lock; a racing duplicate is harmless
    let t = Arc::new(generate(n, n_prime, l));
    cache.lock().expect("cache poisoned").entry((n, n_prime, l)).or_insert(t).clone()
}
