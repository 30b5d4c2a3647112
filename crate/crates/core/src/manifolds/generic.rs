//! Formal generic submanifolds of C^N in normal form.
//!
//! Layouts used throughout:
//! - complexified space: `(Z_1..Z_N, zeta_1..zeta_N)`;
//! - `Q`: `(z_1..z_n, zeta_1..zeta_N)`, with `w = Q(z, zeta)` on the manifold;
//! - `Qbar`: `(chi_1..chi_n, Z_1..Z_N)`, with `tau = Qbar(chi, Z)`.
//!
//! `z` and `w` are the coordinates at `z_idx` and `w_idx` of `Z`; `chi` and
//! `tau` are the matching coordinates of `zeta`.

use crate::error::{CrError, CrResult};
use crate::powerseries::{implicit_solve, sigma_standard, MultiIndex, Series, SeriesMap};

#[derive(Clone, Debug, PartialEq)]
pub struct GenericManifold {
    big_n: usize,
    z_idx: Vec<usize>,
    w_idx: Vec<usize>,
    defining: SeriesMap,
    q: SeriesMap,
    qbar: SeriesMap,
    names: Vec<String>,
}

/// Lowest degree at which a list of series fails to vanish.
pub(crate) fn first_nonzero(series: &[Series]) -> Option<(usize, u32)> {
    series
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.valuation().map(|v| (i, v)))
        .min_by_key(|&(_, v)| v)
}

impl GenericManifold {
    /// Build from defining functions `rho(Z, zeta)` of the complexification.
    pub fn from_defining(rho: &SeriesMap, big_n: usize) -> CrResult<GenericManifold> {
        let names = (1..=big_n).map(|i| format!("Z{i}")).collect();
        GenericManifold::from_defining_named(rho, big_n, names)
    }

    pub fn from_defining_named(rho: &SeriesMap, big_n: usize, names: Vec<String>) -> CrResult<GenericManifold> {
        if rho.nvars() != 2 * big_n {
            return Err(CrError::ArityMismatch { expected: 2 * big_n, found: rho.nvars() });
        }
        let d = rho.len();
        if d == 0 || d > big_n {
            return Err(CrError::Invalid(format!("codimension {d} out of range for N = {big_n}")));
        }
        if let Some(k) = rho.comps().iter().position(|s| !s.constant_term().is_zero()) {
            return Err(CrError::NotAtOrigin { component: k });
        }
        let full = rho.linear_part().rank();
        if full != d {
            return Err(CrError::NotAManifold { rank: full, expected: d });
        }
        let zcols: Vec<usize> = (0..big_n).collect();
        let hol = rho.linear_part_cols(&zcols);
        let hr = hol.rank();
        if hr != d {
            return Err(CrError::NotGeneric { rank: hr, expected: d });
        }
        // prefer the rightmost independent columns for w
        let mut w_idx: Vec<usize> = Vec::new();
        for j in (0..big_n).rev() {
            if w_idx.len() == d {
                break;
            }
            let mut trial = w_idx.clone();
            trial.push(j);
            if rho.linear_part_cols(&trial).rank() == trial.len() {
                w_idx = trial;
            }
        }
        w_idx.sort_unstable();
        let z_idx: Vec<usize> = (0..big_n).filter(|j| !w_idx.contains(j)).collect();
        let n = z_idx.len();
        // reorder rho into (z, zeta, w) and solve for w
        let mut map = vec![0usize; 2 * big_n];
        for (i, &j) in z_idx.iter().enumerate() {
            map[j] = i;
        }
        for (k, &j) in w_idx.iter().enumerate() {
            map[j] = n + big_n + k;
        }
        for m in 0..big_n {
            map[big_n + m] = n + m;
        }
        let reordered = rho.remap_vars(2 * big_n, &map);
        let q = implicit_solve(&reordered, n + big_n)?;
        let qbar = q.conj_coeffs();
        let manifold = GenericManifold { big_n, z_idx, w_idx, defining: rho.clone(), q, qbar, names };
        // reality: sigma(rho_j) must vanish on the manifold
        for (j, r) in rho.comps().iter().enumerate() {
            let s = sigma_standard(r)?;
            let on = manifold.restrict_to_manifold(&s)?;
            if let Some(v) = on.valuation() {
                return Err(CrError::NotReal { generator: j, degree: v });
            }
        }
        Ok(manifold)
    }

    /// Build directly from `Q(z, zeta)`; checks the reality identity.
    pub fn from_normal_form(q: SeriesMap, big_n: usize, w_idx: Vec<usize>, names: Vec<String>) -> CrResult<GenericManifold> {
        let d = w_idx.len();
        let n = big_n - d;
        if q.len() != d || q.nvars() != n + big_n {
            return Err(CrError::ArityMismatch { expected: n + big_n, found: q.nvars() });
        }
        let z_idx: Vec<usize> = (0..big_n).filter(|j| !w_idx.contains(j)).collect();
        let qbar = q.conj_coeffs();
        let order = q.order();
        let mut m = GenericManifold {
            big_n,
            z_idx,
            w_idx,
            defining: SeriesMap::zero(2 * big_n, d, order),
            q,
            qbar,
            names,
        };
        m.defining = m.rho_tilde()?;
        let resid = m.reality_residual()?;
        if let Some((j, v)) = first_nonzero(resid.comps()) {
            return Err(CrError::NotReal { generator: j, degree: v });
        }
        Ok(m)
    }

    pub fn big_n(&self) -> usize {
        self.big_n
    }

    pub fn codim(&self) -> usize {
        self.w_idx.len()
    }

    pub fn n(&self) -> usize {
        self.z_idx.len()
    }

    pub fn z_idx(&self) -> &[usize] {
        &self.z_idx
    }

    pub fn w_idx(&self) -> &[usize] {
        &self.w_idx
    }

    pub fn order(&self) -> u32 {
        self.q.order()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn defining(&self) -> &SeriesMap {
        &self.defining
    }

    /// `Q(z, zeta)` in the layout `(z, zeta)`.
    pub fn q(&self) -> &SeriesMap {
        &self.q
    }

    /// `Qbar(chi, Z)` in the layout `(chi, Z)`.
    pub fn qbar(&self) -> &SeriesMap {
        &self.qbar
    }

    /// Lower the order of all data.
    pub fn truncate(&self, order: u32) -> GenericManifold {
        GenericManifold {
            big_n: self.big_n,
            z_idx: self.z_idx.clone(),
            w_idx: self.w_idx.clone(),
            defining: self.defining.truncate(order),
            q: self.q.truncate(order),
            qbar: self.qbar.truncate(order),
            names: self.names.clone(),
        }
    }

    /// `Q` with variables renamed into the `(Z, zeta)` layout.
    pub fn q_in_z_zeta(&self) -> SeriesMap {
        let n = self.n();
        let mut map = vec![0; n + self.big_n];
        for (i, &j) in self.z_idx.iter().enumerate() {
            map[i] = j;
        }
        for m in 0..self.big_n {
            map[n + m] = self.big_n + m;
        }
        self.q.remap_vars(2 * self.big_n, &map)
    }

    /// `Qbar` with variables renamed into the `(Z, zeta)` layout.
    pub fn qbar_in_z_zeta(&self) -> SeriesMap {
        let n = self.n();
        let mut map = vec![0; n + self.big_n];
        for (i, &j) in self.z_idx.iter().enumerate() {
            map[i] = self.big_n + j;
        }
        for m in 0..self.big_n {
            map[n + m] = m;
        }
        self.qbar.remap_vars(2 * self.big_n, &map)
    }

    /// Generators `w - Q(z, zeta)` in `(Z, zeta)`.
    pub fn rho_tilde(&self) -> CrResult<SeriesMap> {
        let q = self.q_in_z_zeta();
        let comps = self
            .w_idx
            .iter()
            .zip(q.comps())
            .map(|(&j, qj)| Series::var(2 * self.big_n, j, qj.order()).sub(qj))
            .collect();
        SeriesMap::new(2 * self.big_n, comps)
    }

    /// Generators `tau - Qbar(chi, Z)` in `(Z, zeta)`.
    pub fn rho_normal(&self) -> CrResult<SeriesMap> {
        let qb = self.qbar_in_z_zeta();
        let comps = self
            .w_idx
            .iter()
            .zip(qb.comps())
            .map(|(&j, qj)| Series::var(2 * self.big_n, self.big_n + j, qj.order()).sub(qj))
            .collect();
        SeriesMap::new(2 * self.big_n, comps)
    }

    /// Substitute `w = Q(z, zeta)` into `f(Z, zeta)`; the result lives in
    /// `(z, zeta)`. It vanishes exactly when `f` lies in the manifold ideal.
    pub fn restrict_to_manifold(&self, f: &Series) -> CrResult<Series> {
        let n = self.n();
        let nv = n + self.big_n;
        let order = self.q.order();
        let mut inputs = vec![Series::zero(nv, order); 2 * self.big_n];
        for (i, &j) in self.z_idx.iter().enumerate() {
            inputs[j] = Series::var(nv, i, order);
        }
        for (k, &j) in self.w_idx.iter().enumerate() {
            inputs[j] = self.q.comp(k).clone();
        }
        for m in 0..self.big_n {
            inputs[self.big_n + m] = Series::var(nv, n + m, order);
        }
        f.compose(&inputs)
    }

    /// `Q(z, chi, Qbar(chi, z, w)) - w` in the layout `(Z, chi)`.
    pub fn reality_residual(&self) -> CrResult<SeriesMap> {
        let n = self.n();
        let big_n = self.big_n;
        let nv = big_n + n;
        let order = self.order();
        // Qbar(chi, Z) re-expressed in (Z, chi)
        let mut map = vec![0; n + big_n];
        for (i, slot) in map.iter_mut().enumerate().take(n) {
            *slot = big_n + i;
        }
        for m in 0..big_n {
            map[n + m] = m;
        }
        let qb = self.qbar.remap_vars(nv, &map);
        let mut inputs = vec![Series::zero(nv, order); n + big_n];
        for (i, &j) in self.z_idx.iter().enumerate() {
            inputs[i] = Series::var(nv, j, order);
            inputs[n + j] = Series::var(nv, big_n + i, order);
        }
        for (k, &j) in self.w_idx.iter().enumerate() {
            inputs[n + j] = qb.comp(k).clone();
        }
        let lhs = self.q.compose(&SeriesMap::new(nv, inputs)?)?;
        let w = SeriesMap::projection(nv, &self.w_idx, order);
        lhs.sub(&w)
    }

    /// Holomorphic coordinate names followed by their conjugates.
    pub fn complexified_names(&self) -> Vec<String> {
        let mut v = self.names.clone();
        v.extend(self.names.iter().map(|s| format!("{s}_bar")));
        v
    }

    /// The monomial exponents `alpha` in `chi` present in `Qbar` up to
    /// `|alpha| <= bound`, graded-lex.
    pub fn chi_exponents(&self, bound: u32) -> Vec<MultiIndex> {
        MultiIndex::up_to_degree(self.n(), bound)
    }
}
