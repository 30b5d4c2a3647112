//! Segre mappings and their iterates.
//!
//! `gamma(zeta, t) = (mu(zeta, t), Q(mu(zeta, t), zeta))` in the layout
//! `(zeta_1..zeta_N, t_1..t_n)`; the default choice is `mu = t`.
//! Iterates `v^j` live in `t^[j] = (t^1, ..., t^j)`, `n*j` variables.

use crate::error::{CrError, CrResult};
use crate::powerseries::{implicit_solve, Series, SeriesMap};

use super::generic::{first_nonzero, GenericManifold};

#[derive(Clone, Debug)]
pub struct SegreMapping {
    manifold: GenericManifold,
    mu: SeriesMap,
    gamma: SeriesMap,
    standard: bool,
}

/// One failed identity check: which generator/component and the degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityFailure {
    pub component: usize,
    pub degree: u32,
}

impl SegreMapping {
    /// The default mapping with `mu(zeta, t) = t`.
    pub fn standard(m: &GenericManifold) -> SegreMapping {
        let big_n = m.big_n();
        let n = m.n();
        let mu = SeriesMap::projection(big_n + n, &(big_n..big_n + n).collect::<Vec<_>>(), m.order());
        let mut s = SegreMapping::with_mu(m, mu).expect("identity mu is admissible");
        s.standard = true;
        s
    }

    /// A mapping with custom `mu(zeta, t)`; `d mu / d t (0)` must be invertible.
    pub fn with_mu(m: &GenericManifold, mu: SeriesMap) -> CrResult<SegreMapping> {
        let big_n = m.big_n();
        let n = m.n();
        if mu.nvars() != big_n + n || mu.len() != n {
            return Err(CrError::ArityMismatch { expected: big_n + n, found: mu.nvars() });
        }
        if !mu.fixes_origin() {
            return Err(CrError::OriginNotFixed { component: 0 });
        }
        let tcols: Vec<usize> = (big_n..big_n + n).collect();
        if mu.linear_part_cols(&tcols).rank() != n {
            return Err(CrError::Singular("d mu / d t is not invertible".into()));
        }
        // Q(mu, zeta): inputs in (zeta, t)
        let mut inputs: Vec<Series> = mu.comps().to_vec();
        for k in 0..big_n {
            inputs.push(Series::var(big_n + n, k, m.order()));
        }
        let qmu = m.q().compose(&SeriesMap::new(big_n + n, inputs)?)?;
        let mut comps = vec![Series::zero(big_n + n, m.order()); big_n];
        for (i, &j) in m.z_idx().iter().enumerate() {
            comps[j] = mu.comp(i).clone();
        }
        for (k, &j) in m.w_idx().iter().enumerate() {
            comps[j] = qmu.comp(k).clone();
        }
        let gamma = SeriesMap::new(big_n + n, comps)?;
        Ok(SegreMapping { manifold: m.clone(), mu, gamma, standard: false })
    }

    pub fn manifold(&self) -> &GenericManifold {
        &self.manifold
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    pub fn mu(&self) -> &SeriesMap {
        &self.mu
    }

    /// `gamma(zeta, t)`.
    pub fn gamma(&self) -> &SeriesMap {
        &self.gamma
    }

    /// `gammabar(Z, t)`: same layout with `Z` in place of `zeta`.
    pub fn gamma_bar(&self) -> SeriesMap {
        self.gamma.conj_coeffs()
    }

    /// `gamma(zeta, t)` lies in the complexified manifold: every normal-form
    /// generator vanishes on `(gamma(zeta, t), zeta)`.
    pub fn check_parametrizes(&self) -> CrResult<Option<IdentityFailure>> {
        let big_n = self.manifold.big_n();
        let nv = big_n + self.manifold.n();
        let order = self.gamma.order();
        let mut inputs: Vec<Series> = self.gamma.comps().to_vec();
        for k in 0..big_n {
            inputs.push(Series::var(nv, k, order));
        }
        let at = SeriesMap::new(nv, inputs)?;
        let mut gens = self.manifold.rho_tilde()?.into_comps();
        gens.extend(self.manifold.rho_normal()?.into_comps());
        let vals: Vec<Series> = gens.iter().map(|g| g.compose(at.comps())).collect::<CrResult<_>>()?;
        Ok(first_nonzero(&vals).map(|(c, d)| IdentityFailure { component: c, degree: d }))
    }

    /// `v^0, v^1, ..., v^jmax`.
    pub fn tower(&self, jmax: usize) -> CrResult<Vec<SeriesMap>> {
        let big_n = self.manifold.big_n();
        let n = self.manifold.n();
        let order = self.gamma.order();
        let mut out = vec![SeriesMap::zero(0, big_n, order)];
        for j in 1..=jmax {
            let nv = n * j;
            let prev_bar = out[j - 1].conj_coeffs();
            let mut inputs: Vec<Series> = if j == 1 {
                vec![Series::zero(nv, order); big_n]
            } else {
                prev_bar.comps().iter().map(|s| s.shift_vars(nv, 0)).collect()
            };
            for i in 0..n {
                inputs.push(Series::var(nv, n * (j - 1) + i, order));
            }
            out.push(self.gamma.compose(&SeriesMap::new(nv, inputs)?)?);
        }
        Ok(out)
    }

    /// `v^j(t^[j])`.
    pub fn iterate(&self, j: usize) -> CrResult<SeriesMap> {
        Ok(self.tower(j)?.pop().expect("nonempty tower"))
    }

    /// `xi^j(t^[j+1])`, the correction with `v^{j+2}(t^[j+1], xi^j) = v^j`.
    pub fn xi(&self, j: usize) -> CrResult<SeriesMap> {
        let n = self.manifold.n();
        let nv = n * (j + 1);
        let order = self.gamma.order();
        if self.standard {
            // xi^j = t^j, with t^0 = 0
            if j == 0 {
                return Ok(SeriesMap::zero(nv, n, order));
            }
            let idx: Vec<usize> = (n * (j - 1)..n * j).collect();
            return Ok(SeriesMap::projection(nv, &idx, order));
        }
        let pi = self.pi()?;
        let big_n = self.manifold.big_n();
        let vj = self.iterate(j)?;
        let mut inputs: Vec<Series> = if j == 0 {
            vec![Series::zero(nv, order); big_n]
        } else {
            vj.comps().iter().map(|s| s.shift_vars(nv, 0)).collect()
        };
        for i in 0..n {
            inputs.push(Series::var(nv, n * j + i, order));
        }
        pi.compose(&SeriesMap::new(nv, inputs)?)
    }

    /// `pi(Z, t)` solving `mu(gammabar(Z, t), pi) = z`, layout `(Z, t)`.
    pub fn pi(&self) -> CrResult<SeriesMap> {
        let big_n = self.manifold.big_n();
        let n = self.manifold.n();
        let order = self.gamma.order();
        let nv = big_n + 2 * n;
        let gb = self.gamma_bar().shift_vars(nv, 0);
        let mut inputs: Vec<Series> = gb.comps().to_vec();
        for i in 0..n {
            inputs.push(Series::var(nv, big_n + n + i, order));
        }
        let lhs = self.mu.compose(&SeriesMap::new(nv, inputs)?)?;
        let z = SeriesMap::projection(nv, self.manifold.z_idx(), order);
        implicit_solve(&lhs.sub(&z)?, big_n + n)
    }

    /// Check `h(v^j, vbar^{j+1}) = 0` for all normal-form generators and the
    /// original defining functions.
    pub fn check_iterate_identity(&self, j: usize) -> CrResult<Option<IdentityFailure>> {
        let tower = self.tower(j + 1)?;
        let n = self.manifold.n();
        let nv = n * (j + 1);
        let order = tower[j + 1].order();
        let mut inputs: Vec<Series> = if j == 0 {
            vec![Series::zero(nv, order); self.manifold.big_n()]
        } else {
            tower[j].comps().iter().map(|s| s.shift_vars(nv, 0)).collect()
        };
        inputs.extend(tower[j + 1].conj_coeffs().into_comps());
        let mut gens = self.manifold.rho_tilde()?.into_comps();
        gens.extend(self.manifold.rho_normal()?.into_comps());
        gens.extend(self.manifold.defining().comps().iter().cloned());
        let vals: Vec<Series> = gens.iter().map(|g| g.compose(&inputs)).collect::<CrResult<_>>()?;
        Ok(first_nonzero(&vals).map(|(c, d)| IdentityFailure { component: c, degree: d }))
    }

    /// Check `v^{j+2}(t^[j+1], xi^j(t^[j+1])) = v^j(t^[j])`.
    pub fn check_xi_identity(&self, j: usize) -> CrResult<Option<IdentityFailure>> {
        let n = self.manifold.n();
        let nv = n * (j + 1);
        let order = self.gamma.order();
        let tower = self.tower(j + 2)?;
        let xi = self.xi(j)?;
        let mut inputs: Vec<Series> = (0..nv).map(|i| Series::var(nv, i, order)).collect();
        inputs.extend(xi.into_comps());
        let lhs = tower[j + 2].compose(&SeriesMap::new(nv, inputs)?)?;
        let rhs: Vec<Series> = if j == 0 {
            vec![Series::zero(nv, order); self.manifold.big_n()]
        } else {
            tower[j].comps().iter().map(|s| s.shift_vars(nv, 0)).collect()
        };
        let diff: Vec<Series> = lhs.comps().iter().zip(&rhs).map(|(a, b)| a.sub(b)).collect();
        Ok(first_nonzero(&diff).map(|(c, d)| IdentityFailure { component: c, degree: d }))
    }
}
