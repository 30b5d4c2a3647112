use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::coeff::Coefficient;
use crate::error::{CrError, CrResult};

use super::multiindex::MultiIndex;

/// Truncated formal power series in `nvars` variables.
///
/// Only nonzero coefficients are stored and every stored monomial has total
/// degree at most `order`. Coefficients beyond `order` are unknown, so
/// equality and zero tests only speak about degrees `<= order`.
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    nvars: usize,
    order: u32,
    terms: BTreeMap<MultiIndex, Coefficient>,
}

impl Series {
    pub fn zero(nvars: usize, order: u32) -> Series {
        Series { nvars, order, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, order: u32, c: Coefficient) -> Series {
        let mut s = Series::zero(nvars, order);
        if !c.is_zero() {
            s.terms.insert(MultiIndex::zero(nvars), c);
        }
        s
    }

    pub fn one(nvars: usize, order: u32) -> Series {
        Series::constant(nvars, order, Coefficient::one())
    }

    pub fn var(nvars: usize, i: usize, order: u32) -> Series {
        assert!(i < nvars, "variable index out of range");
        let mut s = Series::zero(nvars, order);
        if order >= 1 {
            s.terms.insert(MultiIndex::unit(nvars, i), Coefficient::one());
        }
        s
    }

    pub fn monomial(nvars: usize, order: u32, exps: &[u32], c: Coefficient) -> Series {
        assert_eq!(exps.len(), nvars);
        let mut s = Series::zero(nvars, order);
        let m = MultiIndex::from_slice(exps);
        if m.degree() <= order && !c.is_zero() {
            s.terms.insert(m, c);
        }
        s
    }

    /// Build from `(exponents, coefficient)` pairs; terms above `order`
    /// are dropped and repeated monomials are summed.
    pub fn from_terms<I>(nvars: usize, order: u32, terms: I) -> Series
    where
        I: IntoIterator<Item = (Vec<u32>, Coefficient)>,
    {
        let mut s = Series::zero(nvars, order);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            s.add_term(MultiIndex::from_slice(&e), &c);
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Coefficient> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &MultiIndex) -> Coefficient {
        self.terms.get(m).cloned().unwrap_or_else(Coefficient::zero)
    }

    pub fn coeff_of(&self, exps: &[u32]) -> Coefficient {
        self.coeff(&MultiIndex::from_slice(exps))
    }

    /// Add `c * x^m`, dropping it when above the order.
    pub fn add_term(&mut self, m: MultiIndex, c: &Coefficient) {
        if m.degree() > self.order || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    /// Zero through the known order.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Coefficient {
        self.coeff(&MultiIndex::zero(self.nvars))
    }

    pub fn is_unit(&self) -> bool {
        !self.constant_term().is_zero()
    }

    /// Lowest degree carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree())
    }

    /// Highest degree carrying a nonzero coefficient.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    /// Does the series involve variable `i`?
    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.get(i) > 0)
    }

    pub fn truncate(&self, order: u32) -> Series {
        let order = order.min(self.order);
        let terms = self.terms.iter().filter(|(m, _)| m.degree() <= order).map(|(m, c)| (m.clone(), c.clone())).collect();
        Series { nvars: self.nvars, order, terms }
    }

    /// Reinterpret with a larger order; the caller asserts the series is exact
    /// (e.g. a polynomial elaborated from closed-form input).
    pub fn with_order(&self, order: u32) -> Series {
        let mut s = self.truncate(order);
        s.order = order;
        s
    }

    pub fn homogeneous_part(&self, d: u32) -> Series {
        let terms = self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect();
        Series { nvars: self.nvars, order: self.order, terms }
    }

    fn check_same(&self, other: &Series) {
        assert_eq!(self.nvars, other.nvars, "series in different variable counts");
    }

    pub fn add(&self, other: &Series) -> Series {
        self.check_same(other);
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.check_same(other);
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }

    pub fn neg(&self) -> Series {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Series { nvars: self.nvars, order: self.order, terms }
    }

    pub fn scale(&self, k: &Coefficient) -> Series {
        if k.is_zero() {
            return Series::zero(self.nvars, self.order);
        }
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect();
        Series { nvars: self.nvars, order: self.order, terms }
    }

    pub fn mul(&self, other: &Series) -> Series {
        self.check_same(other);
        let order = self.order.min(other.order);
        self.mul_to(other, order)
    }

    /// Product truncated at `max_deg`; the result has order `max_deg`.
    /// Callers must make sure `max_deg` does not exceed what both factors know.
    pub(crate) fn mul_to(&self, other: &Series, max_deg: u32) -> Series {
        let mut acc: HashMap<MultiIndex, Coefficient> = HashMap::new();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > max_deg {
                break;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > max_deg {
                    break;
                }
                let p = ca * cb;
                let m = ma.add(mb);
                match acc.get_mut(&m) {
                    Some(v) => *v += &p,
                    None => {
                        acc.insert(m, p);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Series { nvars: self.nvars, order: max_deg, terms }
    }

    pub fn pow(&self, e: u32) -> Series {
        let mut result = Series::one(self.nvars, self.order);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> CrResult<Series> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(CrError::NotAUnit);
        }
        let inv0 = c0.inv()?;
        // 1/(c0 (1 - u)) = inv0 * sum u^k with u = 1 - f/c0
        let u = Series::one(self.nvars, self.order).sub(&self.scale(&inv0));
        let mut acc = Series::one(self.nvars, self.order);
        let mut pw = Series::one(self.nvars, self.order);
        for _ in 0..self.order {
            pw = pw.mul(&u);
            if pw.is_zero() {
                break;
            }
            acc = acc.add(&pw);
        }
        Ok(acc.scale(&inv0))
    }

    /// `exp(f)` for `f(0) = 0`.
    pub fn exp(&self) -> CrResult<Series> {
        if !self.constant_term().is_zero() {
            return Err(CrError::Invalid("exp needs a series vanishing at the origin".into()));
        }
        let mut acc = Series::one(self.nvars, self.order);
        let mut pw = Series::one(self.nvars, self.order);
        for k in 1..=self.order as i64 {
            pw = pw.mul(self).scale(&Coefficient::from_ratio(1, k));
            if pw.is_zero() {
                break;
            }
            acc = acc.add(&pw);
        }
        Ok(acc)
    }

    pub fn conj_coeffs(&self) -> Series {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect();
        Series { nvars: self.nvars, order: self.order, terms }
    }

    /// `d^times / d x_i^times`, raw (no factorial normalization).
    pub fn derivative(&self, i: usize, times: u32) -> CrResult<Series> {
        if times > self.order {
            return Err(CrError::DerivativeTooDeep { requested: times, order: self.order });
        }
        let order = self.order - times;
        let mut out = Series::zero(self.nvars, order);
        for (m, c) in &self.terms {
            let e = m.get(i);
            if e < times {
                continue;
            }
            let mut f: i64 = 1;
            for k in 0..times {
                f *= (e - k) as i64;
            }
            let mut nm = m.clone();
            for _ in 0..times {
                nm = nm.lower(i).expect("exponent checked");
            }
            out.add_term(nm, &c.scale_int(f));
        }
        Ok(out)
    }

    /// `d^nu f` for a multi-index `nu` over all variables.
    pub fn derivative_multi(&self, nu: &MultiIndex) -> CrResult<Series> {
        if nu.degree() > self.order {
            return Err(CrError::DerivativeTooDeep { requested: nu.degree(), order: self.order });
        }
        let order = self.order - nu.degree();
        let mut out = Series::zero(self.nvars, order);
        for (m, c) in &self.terms {
            let Some(rest) = m.checked_sub(nu) else { continue };
            let mut f = Coefficient::one();
            for i in 0..self.nvars {
                let (e, k) = (m.get(i), nu.get(i));
                for j in 0..k {
                    f = f.scale_int((e - j) as i64);
                }
            }
            out.add_term(rest, &(c * &f));
        }
        Ok(out)
    }

    /// Rename variables: old variable `i` becomes new variable `map[i]`.
    pub fn remap_vars(&self, new_nvars: usize, map: &[usize]) -> Series {
        assert_eq!(map.len(), self.nvars);
        let mut out = Series::zero(new_nvars, self.order);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; new_nvars];
            for (i, &t) in map.iter().enumerate() {
                e[t] += m.get(i);
            }
            out.add_term(MultiIndex::from_slice(&e), c);
        }
        out
    }

    /// Embed into `new_nvars` variables, placing ours at `offset..`.
    pub fn shift_vars(&self, new_nvars: usize, offset: usize) -> Series {
        let map: Vec<usize> = (0..self.nvars).map(|i| i + offset).collect();
        self.remap_vars(new_nvars, &map)
    }

    /// Coefficient of `x^e` in the variables `vars`, as a series in the
    /// remaining variables (kept in their relative order).
    pub fn coefficient_in(&self, vars: &[usize], e: &[u32]) -> Series {
        assert_eq!(vars.len(), e.len());
        let rest: Vec<usize> = (0..self.nvars).filter(|i| !vars.contains(i)).collect();
        let ed: u32 = e.iter().sum();
        let order = self.order.saturating_sub(ed);
        let mut out = Series::zero(rest.len(), order);
        for (m, c) in &self.terms {
            if vars.iter().zip(e).all(|(&v, &k)| m.get(v) == k) {
                let ex: Vec<u32> = rest.iter().map(|&i| m.get(i)).collect();
                out.add_term(MultiIndex::from_slice(&ex), c);
            }
        }
        out
    }

    /// Substitute `inputs[i]` for variable `i`. All inputs share a variable
    /// count and vanish at the origin; the result order is the minimum of
    /// our order and the orders of the inputs we actually depend on.
    pub fn compose(&self, inputs: &[Series]) -> CrResult<Series> {
        if inputs.len() != self.nvars {
            return Err(CrError::ArityMismatch { expected: self.nvars, found: inputs.len() });
        }
        let target = inputs.first().map(|s| s.nvars).unwrap_or(0);
        let mut order = self.order;
        for (i, g) in inputs.iter().enumerate() {
            if g.nvars != target {
                return Err(CrError::ArityMismatch { expected: target, found: g.nvars });
            }
            if self.depends_on(i) {
                if !g.constant_term().is_zero() {
                    return Err(CrError::OriginNotFixed { component: i });
                }
                order = order.min(g.order);
            }
        }
        Ok(self.compose_unchecked(inputs, target, order))
    }

    /// Composition with an explicit target variable count, for the case of
    /// no inputs (series in zero variables).
    pub fn compose_into(&self, inputs: &[Series], target: usize) -> CrResult<Series> {
        if self.nvars == 0 {
            return Ok(Series::constant(target, self.order, self.constant_term()));
        }
        self.compose(inputs)
    }

    pub(crate) fn compose_unchecked(&self, inputs: &[Series], target: usize, order: u32) -> Series {
        // pure renaming is cheap
        if let Some(map) = as_renaming(inputs) {
            let mut s = self.remap_vars(target, &map).truncate(order);
            s.order = order;
            return s;
        }
        let mut cache: HashMap<MultiIndex, Series> = HashMap::new();
        let mut out = Series::zero(target, order);
        let one = Series::one(target, order);
        for (m, c) in &self.terms {
            if m.degree() > order {
                break;
            }
            let p = power_product(m, inputs, &mut cache, &one, order);
            for (pm, pc) in &p.terms {
                out.add_term(pm.clone(), &(pc * c));
            }
        }
        out
    }

    pub fn pretty(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return format!("O({})", self.order + 1);
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut mono = Vec::new();
            for i in 0..self.nvars {
                let e = m.get(i);
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                match e {
                    0 => {}
                    1 => mono.push(name),
                    _ => mono.push(format!("{name}^{e}")),
                }
            }
            let body = if mono.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mono.join("*")
            } else if (-c).is_one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", c, mono.join("*"))
            };
            parts.push(body);
        }
        format!("{} + O({})", parts.join(" + ").replace("+ -", "- "), self.order + 1)
    }

    /// `(exponents, "a/b+c/d*i")` pairs in graded-lex order.
    pub fn to_exact_terms(&self) -> Vec<(Vec<u32>, String)> {
        self.terms.iter().map(|(m, c)| (m.exps(), c.to_exact_string())).collect()
    }

    pub fn from_exact_terms(nvars: usize, order: u32, terms: &[(Vec<u32>, String)]) -> CrResult<Series> {
        let mut s = Series::zero(nvars, order);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(CrError::ArityMismatch { expected: nvars, found: e.len() });
            }
            s.add_term(MultiIndex::from_slice(e), &Coefficient::parse_exact(c)?);
        }
        Ok(s)
    }
}

fn as_renaming(inputs: &[Series]) -> Option<Vec<usize>> {
    let mut map = Vec::with_capacity(inputs.len());
    for g in inputs {
        if g.terms.len() != 1 {
            return None;
        }
        let (m, c) = g.terms.iter().next()?;
        if m.degree() != 1 || !c.is_one() {
            return None;
        }
        map.push((0..g.nvars).find(|&i| m.get(i) == 1)?);
    }
    Some(map)
}

fn power_product(
    m: &MultiIndex,
    inputs: &[Series],
    cache: &mut HashMap<MultiIndex, Series>,
    one: &Series,
    order: u32,
) -> Series {
    if m.is_zero() {
        return one.clone();
    }
    if let Some(s) = cache.get(m) {
        return s.clone();
    }
    let i = (0..m.nvars()).rev().find(|&i| m.get(i) > 0).expect("nonzero index");
    let prev = m.lower(i).expect("positive exponent");
    let base = power_product(&prev, inputs, cache, one, order);
    let p = if base.terms.is_empty() { Series::zero(one.nvars, order) } else { base.mul_to(&inputs[i], order) };
    cache.insert(m.clone(), p.clone());
    p
}

impl Serialize for Series {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Series", 3)?;
        st.serialize_field("nvars", &self.nvars)?;
        st.serialize_field("order", &self.order)?;
        st.serialize_field("terms", &self.to_exact_terms())?;
        st.end()
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[{}]({})", self.nvars, self.pretty(&[]))
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty(&[]))
    }
}

/// Compare two series on their common known range; returns the lowest
/// degree where they differ.
pub fn first_difference(a: &Series, b: &Series) -> Option<(MultiIndex, Coefficient)> {
    let d = a.sub(b);
    d.terms().iter().next().map(|(m, c)| (m.clone(), c.clone()))
}
