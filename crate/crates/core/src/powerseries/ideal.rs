//! Ideals of `C[[x]]` modulo `m^{k+1}` as finite-dimensional linear spans.
//!
//! The ideal `(g_1..g_s) + m^{k+1}` is spanned by the truncated products
//! `x^a g_j`. These are kept in semi-echelon form keyed by their lowest
//! graded-lex monomial, which makes the first obstruction to membership the
//! lowest surviving term after reduction.

use std::collections::BTreeMap;

use crate::coeff::Coefficient;
use crate::error::{CrError, CrResult};

use super::multiindex::MultiIndex;
use super::series::Series;

type Vector = BTreeMap<MultiIndex, Coefficient>;
type Combo = BTreeMap<(usize, MultiIndex), Coefficient>;

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// `f = sum a_j g_j` modulo `m^{order+1}`.
    Member { order: u32, witnesses: Vec<Series> },
    /// Reduction leaves a term of degree `obstruction_degree`.
    NotMember { order: u32, obstruction_degree: u32, monomial: Vec<u32>, coefficient: Coefficient },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

struct Span {
    nvars: usize,
    track: bool,
    basis: BTreeMap<MultiIndex, (Vector, Combo)>,
}

fn axpy(v: &mut Vector, c: &Coefficient, w: &Vector) {
    for (m, x) in w {
        let p = c * x;
        match v.get_mut(m) {
            Some(e) => {
                *e += &p;
                if e.is_zero() {
                    v.remove(m);
                }
            }
            None => {
                if !p.is_zero() {
                    v.insert(m.clone(), p);
                }
            }
        }
    }
}

fn axpy_combo(v: &mut Combo, c: &Coefficient, w: &Combo) {
    for (k, x) in w {
        let p = c * x;
        let e = v.entry(k.clone()).or_insert_with(Coefficient::zero);
        *e += &p;
        if e.is_zero() {
            v.remove(k);
        }
    }
}

impl Span {
    fn new(nvars: usize, track: bool) -> Span {
        Span { nvars, track, basis: BTreeMap::new() }
    }

    /// Reduce `v`; returns what is left (lowest term not a pivot).
    fn reduce(&self, mut v: Vector, mut combo: Combo) -> (Vector, Combo) {
        loop {
            let Some((m, c)) = v.iter().next().map(|(m, c)| (m.clone(), c.clone())) else {
                return (v, combo);
            };
            let Some((b, bc)) = self.basis.get(&m) else {
                // the lowest term is not a pivot; keep reducing the rest
                // only matters for insertion, where this term becomes the pivot
                return (v, combo);
            };
            let neg = -c;
            axpy(&mut v, &neg, b);
            if self.track {
                axpy_combo(&mut combo, &neg, bc);
            }
        }
    }

    fn insert(&mut self, v: Vector, combo: Combo) {
        let (v, combo) = self.reduce(v, combo);
        let Some((m, c)) = v.iter().next().map(|(m, c)| (m.clone(), c.clone())) else { return };
        let inv = c.inv().expect("nonzero lead");
        let v: Vector = v.into_iter().map(|(k, x)| (k, &x * &inv)).collect();
        let combo: Combo = combo.into_iter().map(|(k, x)| (k, &x * &inv)).collect();
        self.basis.insert(m, (v, combo));
    }

    fn build(gens: &[Series], order: u32, track: bool) -> Span {
        let nvars = gens.first().map_or(0, |g| g.nvars());
        let mut span = Span::new(nvars, track);
        for (j, g) in gens.iter().enumerate() {
            let g = g.truncate(order);
            let Some(val) = g.valuation() else { continue };
            // multiply by monomials of increasing degree
            for m in MultiIndex::up_to_degree(nvars, order - val) {
                let mut v = Vector::new();
                for (gm, gc) in g.terms() {
                    let p = gm.add(&m);
                    if p.degree() <= order {
                        v.insert(p, gc.clone());
                    }
                }
                let mut combo = Combo::new();
                if track {
                    combo.insert((j, m), Coefficient::one());
                }
                span.insert(v, combo);
            }
        }
        span
    }
}

/// Decide `f ∈ (gens) + m^{order+1}`.
pub fn ideal_membership(f: &Series, gens: &[Series], order: u32) -> CrResult<Membership> {
    let available = gens.iter().map(|g| g.order()).chain(std::iter::once(f.order())).min().unwrap_or(order);
    if order > available {
        return Err(CrError::OrderExceeded { requested: order, available });
    }
    if let Some(g) = gens.iter().find(|g| g.nvars() != f.nvars()) {
        return Err(CrError::ArityMismatch { expected: f.nvars(), found: g.nvars() });
    }
    let span = Span::build(gens, order, true);
    let v: Vector = f.truncate(order).terms().clone();
    let (rest, combo) = span.reduce(v, Combo::new());
    if let Some((m, c)) = rest.iter().next() {
        return Ok(Membership::NotMember {
            order,
            obstruction_degree: m.degree(),
            monomial: m.exps(),
            coefficient: c.clone(),
        });
    }
    // f - sum combo = 0 along the reduction, so f = sum combo
    let mut witnesses = vec![Series::zero(span.nvars, order); gens.len()];
    for ((j, m), c) in combo {
        witnesses[j].add_term(m, &-c);
    }
    Ok(Membership::Member { order, witnesses })
}

/// Monomials of degree `<= order` that are not lowest terms of elements of
/// `(gens) + m^{order+1}`; they form a basis of the truncated quotient.
pub fn standard_monomials(gens: &[Series], nvars: usize, order: u32) -> Vec<MultiIndex> {
    let span = Span::build(gens, order, false);
    MultiIndex::up_to_degree(nvars, order).into_iter().filter(|m| !span.basis.contains_key(m)).collect()
}
