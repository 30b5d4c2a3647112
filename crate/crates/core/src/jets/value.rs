use std::collections::BTreeMap;

use crate::error::{CrError, CrResult};
use crate::powerseries::{MultiIndex, Series, SeriesMap};

use super::poly::{JetCoord, JetPolynomial};

/// `(d^nu F)_{|nu| <= l}` for a map with `r` components, differentiated in
/// `k` base directions. Entries are series in all variables of `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetValue {
    k: usize,
    r: usize,
    l: u32,
    entries: BTreeMap<MultiIndex, Vec<Series>>,
}

impl JetValue {
    /// Build from entries; every `|nu| <= l` must be present with `r` series.
    pub fn from_entries(k: usize, r: usize, l: u32, entries: BTreeMap<MultiIndex, Vec<Series>>) -> CrResult<JetValue> {
        for nu in MultiIndex::up_to_degree(k, l) {
            match entries.get(&nu) {
                Some(v) if v.len() == r => {}
                Some(v) => return Err(CrError::ArityMismatch { expected: r, found: v.len() }),
                None => return Err(CrError::OrderExceeded { requested: nu.degree(), available: 0 }),
            }
        }
        Ok(JetValue { k, r, l, entries })
    }

    /// Apply `f` to every entry.
    pub fn map_entries<F>(&self, mut f: F) -> CrResult<JetValue>
    where
        F: FnMut(&Series) -> CrResult<Series>,
    {
        let entries = self
            .entries
            .iter()
            .map(|(nu, v)| Ok((nu.clone(), v.iter().map(&mut f).collect::<CrResult<Vec<_>>>()?)))
            .collect::<CrResult<_>>()?;
        Ok(JetValue { k: self.k, r: self.r, l: self.l, entries })
    }

    pub fn base_dim(&self) -> usize {
        self.k
    }

    pub fn ncomps(&self) -> usize {
        self.r
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn entries(&self) -> &BTreeMap<MultiIndex, Vec<Series>> {
        &self.entries
    }

    pub fn entry(&self, nu: &MultiIndex) -> Option<&[Series]> {
        self.entries.get(nu).map(|v| v.as_slice())
    }

    /// The `Lambda_0` block.
    pub fn lambda0(&self) -> &[Series] {
        &self.entries[&MultiIndex::zero(self.k)]
    }

    pub fn value(&self, c: &JetCoord) -> CrResult<&Series> {
        self.entries
            .get(&c.nu)
            .and_then(|v| v.get(c.comp))
            .ok_or_else(|| CrError::OrderExceeded { requested: c.nu.degree(), available: self.l })
    }

    /// Concatenate the components of two jets over the same base.
    pub fn concat(&self, other: &JetValue) -> CrResult<JetValue> {
        if self.k != other.k {
            return Err(CrError::ArityMismatch { expected: self.k, found: other.k });
        }
        let l = self.l.min(other.l);
        let entries = self
            .entries
            .iter()
            .filter(|(nu, _)| nu.degree() <= l)
            .map(|(nu, v)| {
                let mut v = v.clone();
                v.extend(other.entries[nu].iter().cloned());
                (nu.clone(), v)
            })
            .collect();
        Ok(JetValue { k: self.k, r: self.r + other.r, l, entries })
    }

    /// Evaluate `p`, whose coefficient variables are `Lambda_0`.
    pub fn evaluate(&self, p: &JetPolynomial) -> CrResult<Series> {
        if p.nvars() != self.r {
            return Err(CrError::ArityMismatch { expected: self.r, found: p.nvars() });
        }
        let target = self.lambda0().first().map(|s| s.nvars()).unwrap_or(0);
        let r = p.substitute(self.lambda0(), target, |c| Ok(Some(JetPolynomial::from_series(self.value(c)?.clone()))))?;
        Ok(r.as_series().expect("all coordinates substituted"))
    }
}

/// `j^l F` with respect to the variables `base` of `F`; other variables are
/// parameters.
pub fn jet_of_map(f: &SeriesMap, l: u32, base: &[usize]) -> CrResult<JetValue> {
    if l > f.order() {
        return Err(CrError::OrderExceeded { requested: l, available: f.order() });
    }
    let k = base.len();
    let mut entries: BTreeMap<MultiIndex, Vec<Series>> = BTreeMap::new();
    entries.insert(MultiIndex::zero(k), f.comps().to_vec());
    // graded order guarantees the parent entry exists
    for nu in MultiIndex::up_to_degree(k, l) {
        if nu.is_zero() {
            continue;
        }
        let i = (0..k).find(|&i| nu.get(i) > 0).expect("nonzero");
        let parent = &entries[&nu.lower(i).expect("positive")];
        let v = parent.iter().map(|s| s.derivative(base[i], 1)).collect::<CrResult<Vec<_>>>()?;
        entries.insert(nu, v);
    }
    Ok(JetValue { k, r: f.len(), l, entries })
}
