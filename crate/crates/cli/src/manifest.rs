//! The manifest language.
//!
//! ```text
//! # comment
//! order 8
//! series h = factorial_series(Z1)
//! manifold M dim 3 codim 1 vars(Z1, Z2, Z3) { Im(Z3) - |Z1*Z2|^2 }
//! map H : M -> M { Z1*exp(h), Z2*exp(-h), Z3 }
//! ```
//!
//! Defining expressions may use `name_bar` or `conj(e)` for conjugates and
//! are complexified by `Zbar -> zeta`. Series are expanded where used, in
//! the variables of the enclosing declaration.

use std::fmt;

use crforge_core::manifolds::GenericManifold;
use crforge_core::powerseries::sigma_standard;
use crforge_core::{Coefficient, Rat, Series, SeriesMap};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A value with its source position; positions do not take part in equality.
#[derive(Clone, Debug)]
pub struct Located<T> {
    pub pos: Pos,
    pub value: T,
}

impl<T: PartialEq> PartialEq for Located<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(String),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    AbsSq(Box<Expr>),
    Call(String, Vec<Expr>),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn wrap(e: &Expr, parens: bool) -> String {
    if parens {
        format!("({e})")
    } else {
        e.to_string()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bin = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, p: u8| {
            write!(f, "{}{op}{}", wrap(a, a.prec() < p), wrap(b, b.prec() <= p))
        };
        match self {
            Expr::Num(s) | Expr::Var(s) => write!(f, "{s}"),
            Expr::Neg(e) => write!(f, "-{}", wrap(e, e.prec() < 3)),
            Expr::Add(a, b) => bin(f, a, " + ", b, 1),
            Expr::Sub(a, b) => bin(f, a, " - ", b, 1),
            Expr::Mul(a, b) => bin(f, a, "*", b, 2),
            Expr::Div(a, b) => bin(f, a, "/", b, 2),
            Expr::Pow(a, k) => write!(f, "{}^{k}", wrap(a, a.prec() < 5)),
            Expr::AbsSq(e) => write!(f, "|{e}|^2"),
            Expr::Call(name, args) => {
                let a: Vec<String> = args.iter().map(|x| x.to_string()).collect();
                write!(f, "{name}({})", a.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesDecl {
    pub name: Located<String>,
    pub expr: Located<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldDecl {
    pub name: Located<String>,
    pub dim: usize,
    pub codim: usize,
    pub complexified: bool,
    /// Explicit `vars(...)`; `None` means `Z1..ZN`.
    pub vars: Option<Vec<String>>,
    pub exprs: Vec<Located<Expr>>,
}

impl ManifoldDecl {
    pub fn var_names(&self) -> Vec<String> {
        self.vars.clone().unwrap_or_else(|| (1..=self.dim).map(|i| format!("Z{i}")).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapDecl {
    pub name: Located<String>,
    pub source: Located<String>,
    pub target: Located<String>,
    pub exprs: Vec<Located<Expr>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub order: u32,
    pub series: Vec<SeriesDecl>,
    pub manifolds: Vec<ManifoldDecl>,
    pub maps: Vec<MapDecl>,
    /// Elaborated at `order`, parallel to `manifolds` and `maps`.
    pub elaborated_manifolds: Vec<GenericManifold>,
    pub elaborated_maps: Vec<SeriesMap>,
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(String),
    Sym(char),
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Arrow => write!(f, "`->`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, CliError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = Pos { line: ln + 1, col: i + 1 };
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(chars[start..i].iter().collect()), pos));
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push((Tok::Arrow, pos));
                i += 2;
            } else if "+-*/^(),{}|:=".contains(c) {
                out.push((Tok::Sym(c), pos));
                i += 1;
            } else {
                return Err(CliError::Parse { line: pos.line, col: pos.col, msg: format!("unexpected character `{c}`") });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- parser

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|t| t.1).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, CliError> {
        let p = self.pos();
        Err(CliError::Parse { line: p.line, col: p.col, msg: msg.into() })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|t| t.0.clone());
        self.i += 1;
        t
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), CliError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.unexpected(&format!("`{c}`"))
        }
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, CliError> {
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {t}")),
            None => self.err(format!("expected {wanted}, found end of input")),
        }
    }

    fn ident(&mut self) -> Result<Located<String>, CliError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(Located { pos, value: s })
            }
            _ => self.unexpected("a name"),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), CliError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.i += 1;
                Ok(())
            }
            _ => self.unexpected(&format!("`{kw}`")),
        }
    }

    fn int(&mut self) -> Result<u64, CliError> {
        match self.peek() {
            Some(Tok::Int(s)) => {
                let v = s.parse().or_else(|_| self.err("integer too large"))?;
                self.i += 1;
                Ok(v)
            }
            _ => self.unexpected("an integer"),
        }
    }

    fn expr(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_sym('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_sym('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_sym('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, CliError> {
        if self.eat_sym('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat_sym('^') {
            let k = self.int()?;
            let k = u32::try_from(k).or_else(|_| self.err("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, CliError> {
        match self.peek().cloned() {
            Some(Tok::Int(s)) => {
                self.i += 1;
                Ok(Expr::Num(s))
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                if self.eat_sym('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat_sym(',') {
                        args.push(self.expr()?);
                    }
                    self.expect_sym(')')?;
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(Tok::Sym('|')) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect_sym('|')?;
                self.expect_sym('^')?;
                if self.int()? != 2 {
                    return self.err("only |e|^2 is supported");
                }
                Ok(Expr::AbsSq(Box::new(e)))
            }
            _ => self.unexpected("an expression"),
        }
    }

    fn located_expr(&mut self) -> Result<Located<Expr>, CliError> {
        let pos = self.pos();
        Ok(Located { pos, value: self.expr()? })
    }

    fn block(&mut self) -> Result<Vec<Located<Expr>>, CliError> {
        self.expect_sym('{')?;
        let mut v = vec![self.located_expr()?];
        while self.eat_sym(',') {
            v.push(self.located_expr()?);
        }
        self.expect_sym('}')?;
        Ok(v)
    }
}

struct Raw {
    order: Option<u32>,
    series: Vec<SeriesDecl>,
    manifolds: Vec<ManifoldDecl>,
    maps: Vec<MapDecl>,
}

fn parse_raw(text: &str) -> Result<Raw, CliError> {
    let toks = lex(text)?;
    let end = Pos { line: text.lines().count().max(1), col: text.lines().last().map_or(1, |l| l.chars().count() + 1) };
    let mut p = Parser { toks, i: 0, end };
    let mut raw = Raw { order: None, series: vec![], manifolds: vec![], maps: vec![] };
    while let Some(t) = p.peek().cloned() {
        let Tok::Ident(kw) = t else { return p.unexpected("a declaration") };
        match kw.as_str() {
            "order" => {
                p.i += 1;
                if raw.order.is_some() {
                    return p.err("duplicate `order`");
                }
                let k = p.int()?;
                raw.order = Some(u32::try_from(k).or_else(|_| p.err("order too large"))?);
            }
            "series" => {
                p.i += 1;
                let name = p.ident()?;
                p.expect_sym('=')?;
                let expr = p.located_expr()?;
                raw.series.push(SeriesDecl { name, expr });
            }
            "manifold" => {
                p.i += 1;
                let name = p.ident()?;
                p.keyword("dim")?;
                let dim = p.int()? as usize;
                p.keyword("codim")?;
                let codim = p.int()? as usize;
                let mut complexified = false;
                let mut vars = None;
                loop {
                    match p.peek() {
                        Some(Tok::Ident(s)) if s == "complexified" => {
                            p.i += 1;
                            complexified = true;
                        }
                        Some(Tok::Ident(s)) if s == "vars" => {
                            p.i += 1;
                            p.expect_sym('(')?;
                            let mut v = vec![p.ident()?.value];
                            while p.eat_sym(',') {
                                v.push(p.ident()?.value);
                            }
                            p.expect_sym(')')?;
                            vars = Some(v);
                        }
                        _ => break,
                    }
                }
                let exprs = p.block()?;
                raw.manifolds.push(ManifoldDecl { name, dim, codim, complexified, vars, exprs });
            }
            "map" => {
                p.i += 1;
                let name = p.ident()?;
                p.expect_sym(':')?;
                let source = p.ident()?;
                if p.next() != Some(Tok::Arrow) {
                    p.i -= 1;
                    return p.unexpected("`->`");
                }
                let target = p.ident()?;
                let exprs = p.block()?;
                raw.maps.push(MapDecl { name, source, target, exprs });
            }
            other => return p.err(format!("unknown declaration `{other}`")),
        }
    }
    Ok(raw)
}

// ---------------------------------------------------------------- elaboration

const FUNCTIONS: &[&str] = &["Im", "Re", "conj", "exp", "factorial_series"];
const RESERVED: &[&str] = &["i", "order", "series", "manifold", "map", "dim", "codim", "vars", "complexified"];

struct Env<'a> {
    names: &'a [String],
    /// Conjugate variables available (`2N` variables in total).
    bars: bool,
    order: u32,
    series: &'a [SeriesDecl],
    stack: Vec<String>,
    pos: Pos,
}

impl Env<'_> {
    fn nvars(&self) -> usize {
        if self.bars {
            2 * self.names.len()
        } else {
            self.names.len()
        }
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, CliError> {
        Err(CliError::Elaboration { line: self.pos.line, col: self.pos.col, msg: msg.into() })
    }

    fn core<T>(&self, r: crforge_core::CrResult<T>) -> Result<T, CliError> {
        r.or_else(|e| self.fail(e.to_string()))
    }

    fn constant(&self, c: Coefficient) -> Series {
        Series::constant(self.nvars(), self.order, c)
    }

    fn eval(&mut self, e: &Expr) -> Result<Series, CliError> {
        let nv = self.nvars();
        Ok(match e {
            Expr::Num(s) => {
                let r: Rat = s.parse().or_else(|_| self.fail("bad number"))?;
                self.constant(Coefficient::new(r, Rat::from_int(0)))
            }
            Expr::Var(name) => {
                if name == "i" {
                    return Ok(self.constant(Coefficient::i()));
                }
                if let Some(k) = self.names.iter().position(|n| n == name) {
                    return Ok(Series::var(nv, k, self.order));
                }
                if let Some(base) = name.strip_suffix("_bar") {
                    if let Some(k) = self.names.iter().position(|n| n == base) {
                        if !self.bars {
                            return self.fail(format!("conjugate `{name}` is not allowed here"));
                        }
                        return Ok(Series::var(nv, self.names.len() + k, self.order));
                    }
                }
                let series = self.series;
                if let Some(d) = series.iter().find(|d| &d.name.value == name) {
                    if self.stack.contains(name) {
                        return self.fail(format!("series `{name}` refers to itself"));
                    }
                    self.stack.push(name.clone());
                    let v = self.eval(&d.expr.value);
                    self.stack.pop();
                    return v;
                }
                return Err(CliError::Unresolved { line: self.pos.line, col: self.pos.col, name: name.clone() });
            }
            Expr::Neg(a) => self.eval(a)?.neg(),
            Expr::Add(a, b) => self.eval(a)?.add(&self.eval(b)?),
            Expr::Sub(a, b) => self.eval(a)?.sub(&self.eval(b)?),
            Expr::Mul(a, b) => self.eval(a)?.mul(&self.eval(b)?),
            Expr::Div(a, b) => {
                let x = self.eval(a)?;
                let y = self.eval(b)?;
                if y.max_degree().map_or(true, |d| d == 0) {
                    let c = y.constant_term();
                    let inv = c.inv().or_else(|_| self.fail("division by zero"))?;
                    x.scale(&inv)
                } else {
                    let inv = self.core(y.inverse())?;
                    x.mul(&inv)
                }
            }
            Expr::Pow(a, k) => self.eval(a)?.pow(*k),
            Expr::AbsSq(a) => {
                let x = self.eval(a)?;
                let c = self.conj(&x)?;
                x.mul(&c)
            }
            Expr::Call(f, args) => {
                if args.len() != 1 {
                    return self.fail(format!("`{f}` takes one argument"));
                }
                let x = self.eval(&args[0])?;
                match f.as_str() {
                    "conj" => self.conj(&x)?,
                    "Im" => {
                        let c = self.conj(&x)?;
                        x.sub(&c).scale(&Coefficient::new(Rat::from_int(0), Rat::new(-1, 2)))
                    }
                    "Re" => {
                        let c = self.conj(&x)?;
                        x.add(&c).scale(&Coefficient::from_ratio(1, 2))
                    }
                    "exp" => self.core(x.exp())?,
                    "factorial_series" => {
                        if !x.constant_term().is_zero() {
                            return self.fail("factorial_series needs an argument vanishing at the origin");
                        }
                        let mut acc = Series::zero(nv, self.order);
                        let mut pw = Series::one(nv, self.order);
                        let mut fact = Coefficient::one();
                        for k in 1..=self.order as i64 {
                            pw = pw.mul(&x);
                            fact = &fact * &Coefficient::from_int(k);
                            acc = acc.add(&pw.scale(&fact));
                        }
                        acc
                    }
                    other => return self.fail(format!("unknown function `{other}`")),
                }
            }
        })
    }

    fn conj(&self, x: &Series) -> Result<Series, CliError> {
        if !self.bars {
            return self.fail("conjugation is only available in defining equations");
        }
        self.core(sigma_standard(x))
    }
}

fn elaborate_manifold(d: &ManifoldDecl, series: &[SeriesDecl], order: u32) -> Result<GenericManifold, CliError> {
    let names = d.var_names();
    if names.len() != d.dim {
        return Err(CliError::Arity {
            line: d.name.pos.line,
            col: d.name.pos.col,
            msg: format!("manifold `{}` declares dim {} but {} variables", d.name.value, d.dim, names.len()),
        });
    }
    if d.exprs.len() != d.codim {
        return Err(CliError::Arity {
            line: d.name.pos.line,
            col: d.name.pos.col,
            msg: format!("manifold `{}` declares codim {} but {} equations", d.name.value, d.codim, d.exprs.len()),
        });
    }
    let mut comps = Vec::new();
    for e in &d.exprs {
        let mut env = Env { names: &names, bars: true, order, series, stack: vec![], pos: e.pos };
        comps.push(env.eval(&e.value)?);
    }
    let rho = SeriesMap::new(2 * d.dim, comps).map_err(|e| manifold_error(d, e))?;
    GenericManifold::from_defining_named(&rho, d.dim, names).map_err(|e| manifold_error(d, e))
}

fn manifold_error(d: &ManifoldDecl, e: crforge_core::CrError) -> CliError {
    CliError::Manifold { line: d.name.pos.line, col: d.name.pos.col, name: d.name.value.clone(), source: e }
}

fn elaborate_map(
    d: &MapDecl,
    source: &ManifoldDecl,
    target: &ManifoldDecl,
    series: &[SeriesDecl],
    order: u32,
) -> Result<SeriesMap, CliError> {
    if d.exprs.len() != target.dim {
        return Err(CliError::Arity {
            line: d.name.pos.line,
            col: d.name.pos.col,
            msg: format!("map `{}` has {} components, target dimension is {}", d.name.value, d.exprs.len(), target.dim),
        });
    }
    let names = source.var_names();
    let mut comps = Vec::new();
    for e in &d.exprs {
        let mut env = Env { names: &names, bars: false, order, series, stack: vec![], pos: e.pos };
        let s = env.eval(&e.value)?;
        if !s.constant_term().is_zero() {
            return env.fail("map components must vanish at the origin");
        }
        comps.push(s);
    }
    SeriesMap::new(source.dim, comps).map_err(|e| CliError::Arity {
        line: d.name.pos.line,
        col: d.name.pos.col,
        msg: e.to_string(),
    })
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest, CliError> {
        let raw = parse_raw(text)?;
        let order = raw.order.ok_or(CliError::Parse { line: 1, col: 1, msg: "missing `order` declaration".into() })?;
        // unique names
        let mut seen: Vec<&Located<String>> = Vec::new();
        let all = raw
            .series
            .iter()
            .map(|s| &s.name)
            .chain(raw.manifolds.iter().map(|m| &m.name))
            .chain(raw.maps.iter().map(|m| &m.name));
        for n in all {
            if RESERVED.contains(&n.value.as_str()) || FUNCTIONS.contains(&n.value.as_str()) {
                return Err(CliError::Parse { line: n.pos.line, col: n.pos.col, msg: format!("`{}` is reserved", n.value) });
            }
            if seen.iter().any(|s| s.value == n.value) {
                return Err(CliError::Parse { line: n.pos.line, col: n.pos.col, msg: format!("duplicate name `{}`", n.value) });
            }
            seen.push(n);
        }
        let mut m = Manifest {
            order,
            series: raw.series,
            manifolds: raw.manifolds,
            maps: raw.maps,
            elaborated_manifolds: vec![],
            elaborated_maps: vec![],
        };
        m.elaborated_manifolds = m.manifolds.iter().map(|d| elaborate_manifold(d, &m.series, order)).collect::<Result<_, _>>()?;
        m.elaborated_maps = m
            .maps
            .iter()
            .map(|d| {
                let s = m.manifold_decl_at(&d.source)?;
                let t = m.manifold_decl_at(&d.target)?;
                elaborate_map(d, s, t, &m.series, order)
            })
            .collect::<Result<_, _>>()?;
        Ok(m)
    }

    fn manifold_decl_at(&self, name: &Located<String>) -> Result<&ManifoldDecl, CliError> {
        self.manifolds
            .iter()
            .find(|d| d.name.value == name.value)
            .ok_or_else(|| CliError::Unresolved { line: name.pos.line, col: name.pos.col, name: name.value.clone() })
    }

    pub fn manifold_decl(&self, name: &str) -> Option<&ManifoldDecl> {
        self.manifolds.iter().find(|d| d.name.value == name)
    }

    pub fn map_decl(&self, name: &str) -> Option<&MapDecl> {
        self.maps.iter().find(|d| d.name.value == name)
    }

    fn check_order(&self, order: u32) -> Result<(), CliError> {
        if order > self.order {
            return Err(CliError::Usage(format!("--order {order} exceeds the manifest order {}", self.order)));
        }
        Ok(())
    }

    /// The manifold `name` at `order <= self.order`.
    pub fn manifold(&self, name: &str, order: u32) -> Result<GenericManifold, CliError> {
        self.check_order(order)?;
        let i = self
            .manifolds
            .iter()
            .position(|d| d.name.value == name)
            .ok_or_else(|| CliError::Usage(format!("no manifold named `{name}`")))?;
        if order == self.order {
            return Ok(self.elaborated_manifolds[i].clone());
        }
        elaborate_manifold(&self.manifolds[i], &self.series, order)
    }

    pub fn map(&self, name: &str, order: u32) -> Result<SeriesMap, CliError> {
        self.check_order(order)?;
        let i = self
            .maps
            .iter()
            .position(|d| d.name.value == name)
            .ok_or_else(|| CliError::Usage(format!("no map named `{name}`")))?;
        if order == self.order {
            return Ok(self.elaborated_maps[i].clone());
        }
        let d = &self.maps[i];
        elaborate_map(d, self.manifold_decl_at(&d.source)?, self.manifold_decl_at(&d.target)?, &self.series, order)
    }

    /// Canonical text; parsing it gives back an equal manifest.
    pub fn render(&self) -> String {
        let mut out = format!("order {}\n", self.order);
        for s in &self.series {
            out.push_str(&format!("series {} = {}\n", s.name.value, s.expr.value));
        }
        for m in &self.manifolds {
            out.push_str(&format!("manifold {} dim {} codim {}", m.name.value, m.dim, m.codim));
            if m.complexified {
                out.push_str(" complexified");
            }
            if let Some(v) = &m.vars {
                out.push_str(&format!(" vars({})", v.join(", ")));
            }
            let e: Vec<String> = m.exprs.iter().map(|e| e.value.to_string()).collect();
            out.push_str(&format!(" {{ {} }}\n", e.join(", ")));
        }
        for m in &self.maps {
            let e: Vec<String> = m.exprs.iter().map(|e| e.value.to_string()).collect();
            out.push_str(&format!(
                "map {} : {} -> {} {{ {} }}\n",
                m.name.value,
                m.source.value,
                m.target.value,
                e.join(", ")
            ));
        }
        out
    }
}

/// Parse a single expression.
pub fn parse_expr(text: &str) -> Result<Expr, CliError> {
    let toks = lex(text)?;
    let end = Pos { line: 1, col: text.chars().count() + 1 };
    let mut p = Parser { toks, i: 0, end };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.unexpected("end of expression");
    }
    Ok(e)
}
