use std::ops::Range;

use crate::coeff::Coefficient;
use crate::error::{CrError, CrResult};

use super::linalg::Matrix;
use super::multiindex::MultiIndex;
use super::series::Series;

/// A formal map: a tuple of series in a common set of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMap {
    nvars: usize,
    comps: Vec<Series>,
}

impl SeriesMap {
    pub fn new(nvars: usize, comps: Vec<Series>) -> CrResult<SeriesMap> {
        for s in &comps {
            if s.nvars() != nvars {
                return Err(CrError::ArityMismatch { expected: nvars, found: s.nvars() });
            }
        }
        Ok(SeriesMap { nvars, comps })
    }

    pub fn identity(n: usize, order: u32) -> SeriesMap {
        SeriesMap { nvars: n, comps: (0..n).map(|i| Series::var(n, i, order)).collect() }
    }

    pub fn zero(nvars: usize, ncomps: usize, order: u32) -> SeriesMap {
        SeriesMap { nvars, comps: vec![Series::zero(nvars, order); ncomps] }
    }

    /// Selected coordinate functions `x_{idx[0]}, x_{idx[1]}, ...`.
    pub fn projection(nvars: usize, idx: &[usize], order: u32) -> SeriesMap {
        SeriesMap { nvars, comps: idx.iter().map(|&i| Series::var(nvars, i, order)).collect() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn comps(&self) -> &[Series] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Series {
        &self.comps[i]
    }

    pub fn into_comps(self) -> Vec<Series> {
        self.comps
    }

    /// Smallest component order (the order of the map as a whole).
    pub fn order(&self) -> u32 {
        self.comps.iter().map(|s| s.order()).min().unwrap_or(u32::MAX)
    }

    pub fn fixes_origin(&self) -> bool {
        self.comps.iter().all(|s| s.constant_term().is_zero())
    }

    pub fn truncate(&self, order: u32) -> SeriesMap {
        SeriesMap { nvars: self.nvars, comps: self.comps.iter().map(|s| s.truncate(order)).collect() }
    }

    pub fn conj_coeffs(&self) -> SeriesMap {
        SeriesMap { nvars: self.nvars, comps: self.comps.iter().map(|s| s.conj_coeffs()).collect() }
    }

    pub fn remap_vars(&self, new_nvars: usize, map: &[usize]) -> SeriesMap {
        SeriesMap { nvars: new_nvars, comps: self.comps.iter().map(|s| s.remap_vars(new_nvars, map)).collect() }
    }

    pub fn shift_vars(&self, new_nvars: usize, offset: usize) -> SeriesMap {
        SeriesMap { nvars: new_nvars, comps: self.comps.iter().map(|s| s.shift_vars(new_nvars, offset)).collect() }
    }

    /// Concatenate component lists (same variables).
    pub fn concat(&self, other: &SeriesMap) -> CrResult<SeriesMap> {
        let mut comps = self.comps.clone();
        comps.extend(other.comps.iter().cloned());
        SeriesMap::new(self.nvars, comps)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SeriesMap) -> CrResult<SeriesMap> {
        if inner.len() != self.nvars {
            return Err(CrError::ArityMismatch { expected: self.nvars, found: inner.len() });
        }
        let comps = self.comps.iter().map(|s| s.compose_into(&inner.comps, inner.nvars)).collect::<CrResult<_>>()?;
        Ok(SeriesMap { nvars: inner.nvars, comps })
    }

    /// Jacobian matrix of series, `rows = components`, `cols = variables`.
    pub fn jacobian(&self) -> CrResult<Vec<Vec<Series>>> {
        self.comps.iter().map(|s| (0..self.nvars).map(|j| s.derivative(j, 1)).collect()).collect()
    }

    /// Linear part at the origin.
    pub fn linear_part(&self) -> Matrix {
        let rows = self
            .comps
            .iter()
            .map(|s| (0..self.nvars).map(|j| s.coeff(&MultiIndex::unit(self.nvars, j))).collect())
            .collect();
        let mut m = Matrix::from_rows(rows);
        if self.comps.is_empty() {
            m = Matrix::zeros(0, self.nvars);
        }
        m
    }

    /// Columns `cols` of the linear part.
    pub fn linear_part_cols(&self, cols: &[usize]) -> Matrix {
        let rows: Vec<Vec<Coefficient>> = self
            .comps
            .iter()
            .map(|s| cols.iter().map(|&j| s.coeff(&MultiIndex::unit(self.nvars, j))).collect())
            .collect();
        if rows.is_empty() {
            return Matrix::zeros(0, cols.len());
        }
        Matrix::from_rows(rows)
    }

    pub fn sub(&self, other: &SeriesMap) -> CrResult<SeriesMap> {
        if self.len() != other.len() {
            return Err(CrError::ArityMismatch { expected: self.len(), found: other.len() });
        }
        Ok(SeriesMap { nvars: self.nvars, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect() })
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|s| s.is_zero())
    }
}

/// Named variable blocks, e.g. `Z = 0..N` and `zeta = N..2N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableSplit {
    pub names: Vec<String>,
    pub blocks: Vec<(String, Range<usize>)>,
}

impl VariableSplit {
    pub fn new(names: Vec<String>, blocks: Vec<(String, Range<usize>)>) -> VariableSplit {
        VariableSplit { names, blocks }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn block(&self, name: &str) -> Option<Range<usize>> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, r)| r.clone())
    }

    /// The standard complexified split `(Z_1..Z_N, zeta_1..zeta_N)`.
    pub fn complexified(z_names: &[String]) -> VariableSplit {
        let n = z_names.len();
        let mut names: Vec<String> = z_names.to_vec();
        names.extend(z_names.iter().map(|s| format!("{s}_bar")));
        VariableSplit { names, blocks: vec![("Z".into(), 0..n), ("zeta".into(), n..2 * n)] }
    }
}

/// The involution `f(Z, zeta) -> conj(f)(zeta, Z)` for matching blocks
/// `z[k] <-> zeta[k]`. Other variables are untouched.
pub fn sigma_conjugate(f: &Series, z: &[usize], zeta: &[usize]) -> CrResult<Series> {
    if z.len() != zeta.len() {
        return Err(CrError::ArityMismatch { expected: z.len(), found: zeta.len() });
    }
    let mut map: Vec<usize> = (0..f.nvars()).collect();
    for (&a, &b) in z.iter().zip(zeta) {
        map[a] = b;
        map[b] = a;
    }
    Ok(f.remap_vars(f.nvars(), &map).conj_coeffs())
}

/// `sigma_conjugate` for the standard `(Z, zeta)` layout of `2N` variables.
pub fn sigma_standard(f: &Series) -> CrResult<Series> {
    if f.nvars() % 2 != 0 {
        return Err(CrError::Invalid("standard split needs an even variable count".into()));
    }
    let n = f.nvars() / 2;
    let z: Vec<usize> = (0..n).collect();
    let zeta: Vec<usize> = (n..2 * n).collect();
    sigma_conjugate(f, &z, &zeta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_is_involution_and_swaps() {
        let f = Series::from_terms(2, 4, vec![(vec![2, 1], Coefficient::gaussian(1, 3))]);
        let g = sigma_standard(&f).unwrap();
        assert_eq!(g.coeff_of(&[1, 2]), Coefficient::gaussian(1, -3));
        assert_eq!(sigma_standard(&g).unwrap(), f);
    }

    #[test]
    fn composition_of_maps() {
        let x = SeriesMap::identity(2, 5);
        let sq = SeriesMap::new(2, vec![x.comp(0).mul(x.comp(1)), x.comp(1).clone()]).unwrap();
        let r = sq.compose(&sq).unwrap();
        assert_eq!(r.comp(0).coeff_of(&[1, 2]), Coefficient::one());
    }
}
