use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::coeff::Coefficient;
use crate::error::{CrError, CrResult};
use crate::powerseries::{MultiIndex, Series};

/// Jet coordinate `Lambda_{nu, comp}`: the `nu`-th partial of component `comp`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetCoord {
    pub nu: MultiIndex,
    pub comp: usize,
}

impl JetCoord {
    pub fn new(nu: MultiIndex, comp: usize) -> JetCoord {
        JetCoord { nu, comp }
    }

    pub fn order(&self) -> u32 {
        self.nu.degree()
    }

    fn bump(&self, i: usize) -> JetCoord {
        JetCoord { nu: self.nu.bump(i), comp: self.comp }
    }
}

impl fmt::Debug for JetCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{:?}.{}", self.nu.exps(), self.comp)
    }
}

/// Monomial in the coordinates `Lambda_nu`, `|nu| >= 1`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetMonomial {
    powers: BTreeMap<JetCoord, u32>,
}

impl JetMonomial {
    pub fn one() -> JetMonomial {
        JetMonomial::default()
    }

    pub fn coord(c: JetCoord) -> JetMonomial {
        let mut powers = BTreeMap::new();
        powers.insert(c, 1);
        JetMonomial { powers }
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.powers.values().sum()
    }

    pub fn powers(&self) -> &BTreeMap<JetCoord, u32> {
        &self.powers
    }

    pub fn mul(&self, other: &JetMonomial) -> JetMonomial {
        let mut powers = self.powers.clone();
        for (c, e) in &other.powers {
            *powers.entry(c.clone()).or_insert(0) += e;
        }
        JetMonomial { powers }
    }

    fn without_one(&self, c: &JetCoord) -> JetMonomial {
        let mut powers = self.powers.clone();
        let e = powers.get_mut(c).expect("coordinate present");
        *e -= 1;
        if *e == 0 {
            powers.remove(c);
        }
        JetMonomial { powers }
    }

    /// Rename components `comp -> comp + offset`.
    pub fn shift_comps(&self, offset: usize) -> JetMonomial {
        JetMonomial {
            powers: self.powers.iter().map(|(c, e)| (JetCoord::new(c.nu.clone(), c.comp + offset), *e)).collect(),
        }
    }

    /// `D_i` of the monomial: list of `(multiplicity, monomial)`.
    fn total_derivative(&self, i: usize) -> Vec<(u32, JetMonomial)> {
        self.powers
            .iter()
            .map(|(c, e)| (*e, self.without_one(c).mul(&JetMonomial::coord(c.bump(i)))))
            .collect()
    }
}

impl fmt::Debug for JetMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.powers.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .powers
            .iter()
            .map(|(c, e)| if *e == 1 { format!("{c:?}") } else { format!("{c:?}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Polynomial in jet coordinates with scalar coefficients.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct LambdaPoly {
    terms: BTreeMap<JetMonomial, Coefficient>,
}

impl LambdaPoly {
    pub fn zero() -> LambdaPoly {
        LambdaPoly::default()
    }

    pub fn one() -> LambdaPoly {
        LambdaPoly::from_monomial(JetMonomial::one(), Coefficient::one())
    }

    pub fn from_monomial(m: JetMonomial, c: Coefficient) -> LambdaPoly {
        let mut p = LambdaPoly::zero();
        p.add_term(m, &c);
        p
    }

    pub fn coord(c: JetCoord) -> LambdaPoly {
        LambdaPoly::from_monomial(JetMonomial::coord(c), Coefficient::one())
    }

    pub fn terms(&self) -> &BTreeMap<JetMonomial, Coefficient> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&JetMonomial::one()).is_some_and(|c| c.is_one())
    }

    pub fn add_term(&mut self, m: JetMonomial, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Coefficient::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add_assign(&mut self, other: &LambdaPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn mul(&self, other: &LambdaPoly) -> LambdaPoly {
        let mut out = LambdaPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.mul(b), &(x * y));
            }
        }
        out
    }

    /// `D_i` with `D_i Lambda_nu = Lambda_{nu + e_i}`.
    pub fn total_derivative(&self, i: usize) -> LambdaPoly {
        let mut out = LambdaPoly::zero();
        for (m, c) in &self.terms {
            for (e, dm) in m.total_derivative(i) {
                out.add_term(dm, &c.scale_int(e as i64));
            }
        }
        out
    }

    pub fn shift_comps(&self, offset: usize) -> LambdaPoly {
        LambdaPoly { terms: self.terms.iter().map(|(m, c)| (m.shift_comps(offset), c.clone())).collect() }
    }

    pub fn coords(&self) -> Vec<JetCoord> {
        let mut v: Vec<JetCoord> = self.terms.keys().flat_map(|m| m.powers.keys().cloned()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Lift to a [`JetPolynomial`] with constant series coefficients.
    pub fn to_jet(&self, nvars: usize, order: u32) -> JetPolynomial {
        let mut p = JetPolynomial::zero(nvars, order);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), &Series::constant(nvars, order, c.clone()));
        }
        p
    }
}

impl fmt::Debug for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c})*{m:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Element of `C[[Lambda_0, ...]][Lambda-hat]`: a polynomial in the jet
/// coordinates with truncated series coefficients.
///
/// Coefficients all have `nvars` variables and the common order `order`.
/// Which of those variables are the `Lambda_0` block is up to the caller.
#[derive(Clone, PartialEq, Eq)]
pub struct JetPolynomial {
    nvars: usize,
    order: u32,
    terms: BTreeMap<JetMonomial, Series>,
}

impl JetPolynomial {
    pub fn zero(nvars: usize, order: u32) -> JetPolynomial {
        JetPolynomial { nvars, order, terms: BTreeMap::new() }
    }

    pub fn from_series(s: Series) -> JetPolynomial {
        let mut p = JetPolynomial::zero(s.nvars(), s.order());
        p.add_term(JetMonomial::one(), &s);
        p
    }

    pub fn coord(c: JetCoord, nvars: usize, order: u32) -> JetPolynomial {
        let mut p = JetPolynomial::zero(nvars, order);
        p.add_term(JetMonomial::coord(c), &Series::one(nvars, order));
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<JetMonomial, Series> {
        &self.terms
    }

    pub fn coeff(&self, m: &JetMonomial) -> Series {
        self.terms.get(m).cloned().unwrap_or_else(|| Series::zero(self.nvars, self.order))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree in the jet coordinates.
    pub fn jet_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// The coefficient of `1` if that is the only term.
    pub fn as_series(&self) -> Option<Series> {
        match self.terms.len() {
            0 => Some(Series::zero(self.nvars, self.order)),
            1 => self.terms.get(&JetMonomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn coords(&self) -> Vec<JetCoord> {
        let mut v: Vec<JetCoord> = self.terms.keys().flat_map(|m| m.powers.keys().cloned()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Add `c * m`; a coefficient of lower order lowers the common order.
    pub fn add_term(&mut self, m: JetMonomial, c: &Series) {
        debug_assert_eq!(c.nvars(), self.nvars);
        if c.order() < self.order {
            *self = self.truncate(c.order());
        }
        let c = c.truncate(self.order);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                let s = e.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *e = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Lower the common order.
    pub fn truncate(&self, order: u32) -> JetPolynomial {
        let order = order.min(self.order);
        let mut p = JetPolynomial::zero(self.nvars, order);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), &c.truncate(order));
        }
        p
    }

    pub fn add(&self, other: &JetPolynomial) -> JetPolynomial {
        let mut p = self.truncate(other.order);
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c);
        }
        p
    }

    pub fn sub(&self, other: &JetPolynomial) -> JetPolynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> JetPolynomial {
        JetPolynomial {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &JetPolynomial) -> JetPolynomial {
        let order = self.order.min(other.order);
        let mut p = JetPolynomial::zero(self.nvars, order);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                p.add_term(a.mul(b), &x.mul(y));
            }
        }
        p
    }

    pub fn mul_series(&self, s: &Series) -> JetPolynomial {
        let order = self.order.min(s.order());
        let mut p = JetPolynomial::zero(self.nvars, order);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), &c.mul(s));
        }
        p
    }

    pub fn mul_lambda(&self, q: &LambdaPoly) -> JetPolynomial {
        let mut p = JetPolynomial::zero(self.nvars, self.order);
        for (a, x) in &self.terms {
            for (b, y) in &q.terms {
                p.add_term(a.mul(b), &x.scale(y));
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> JetPolynomial {
        let mut acc = JetPolynomial::from_series(Series::one(self.nvars, self.order));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative of every coefficient in variable `var`.
    pub fn coeff_derivative(&self, var: usize, times: u32) -> CrResult<JetPolynomial> {
        if times > self.order {
            return Err(CrError::DerivativeTooDeep { requested: times, order: self.order });
        }
        let mut p = JetPolynomial::zero(self.nvars, self.order - times);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), &c.derivative(var, times)?);
        }
        Ok(p)
    }

    /// Total derivative `D_i` along base direction `i`, where coefficient
    /// variable `lambda0[j]` stands for `Lambda_{0, j}`.
    pub fn total_derivative(&self, i: usize, base_dim: usize, lambda0: &[usize]) -> CrResult<JetPolynomial> {
        if self.order == 0 {
            return Err(CrError::DerivativeTooDeep { requested: 1, order: 0 });
        }
        let mut p = JetPolynomial::zero(self.nvars, self.order - 1);
        let ei = MultiIndex::unit(base_dim, i);
        for (m, c) in &self.terms {
            for (j, &v) in lambda0.iter().enumerate() {
                let dc = c.derivative(v, 1)?;
                if !dc.is_zero() {
                    p.add_term(m.mul(&JetMonomial::coord(JetCoord::new(ei.clone(), j))), &dc);
                }
            }
            for (e, dm) in m.total_derivative(i) {
                p.add_term(dm, &c.scale(&Coefficient::from_int(e as i64)));
            }
        }
        Ok(p)
    }

    /// Replace coefficient variables by `coeff_map` (series in `target`
    /// variables fixing the origin) and jet coordinates by `coord(c)`; a
    /// coordinate mapped to `None` is kept.
    pub fn substitute<F>(&self, coeff_map: &[Series], target: usize, mut coord: F) -> CrResult<JetPolynomial>
    where
        F: FnMut(&JetCoord) -> CrResult<Option<JetPolynomial>>,
    {
        let mut images: HashMap<JetCoord, JetPolynomial> = HashMap::new();
        let mut out: Option<JetPolynomial> = None;
        for (m, c) in &self.terms {
            let cc = c.compose_into(coeff_map, target)?;
            let mut term = JetPolynomial::from_series(cc);
            for (x, e) in &m.powers {
                if !images.contains_key(x) {
                    let img = match coord(x)? {
                        Some(p) => p,
                        None => JetPolynomial::coord(x.clone(), target, self.order),
                    };
                    images.insert(x.clone(), img);
                }
                term = term.mul(&images[x].pow(*e));
            }
            out = Some(match out {
                Some(o) => o.add(&term),
                None => term,
            });
        }
        Ok(out.unwrap_or_else(|| {
            let order = coeff_map.iter().map(|s| s.order()).min().unwrap_or(self.order).min(self.order);
            JetPolynomial::zero(target, order)
        }))
    }

    /// Flatten to a series in `(coefficient vars, coords...)`.
    pub fn to_series(&self, coords: &[JetCoord]) -> CrResult<Series> {
        let nv = self.nvars + coords.len();
        let mut s = Series::zero(nv, self.order);
        let pos: HashMap<&JetCoord, usize> = coords.iter().enumerate().map(|(i, c)| (c, i)).collect();
        for (m, c) in &self.terms {
            let mut tail = vec![0u32; coords.len()];
            for (x, e) in &m.powers {
                let i = *pos.get(x).ok_or_else(|| CrError::Invalid(format!("coordinate {x:?} not listed")))?;
                tail[i] = *e;
            }
            let tail = MultiIndex::from_slice(&tail);
            for (cm, cc) in c.terms() {
                let full = cm.concat(&tail);
                if full.degree() <= self.order {
                    s.add_term(full, cc);
                }
            }
        }
        Ok(s)
    }

    /// Embed the coefficients into `new_nvars` variables starting at `offset`.
    pub fn shift_vars(&self, new_nvars: usize, offset: usize) -> JetPolynomial {
        JetPolynomial {
            nvars: new_nvars,
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.shift_vars(new_nvars, offset))).collect(),
        }
    }

    /// Equal at the smaller of the two orders.
    pub fn agrees_with(&self, other: &JetPolynomial) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Debug for JetPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 [order {}]", self.order);
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c:?})*{m:?}")).collect();
        write!(f, "{} [order {}]", parts.join(" + "), self.order)
    }
}
