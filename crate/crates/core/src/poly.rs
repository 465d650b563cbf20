//! Sparse Laurent polynomials with rational coefficients, truncated power
//! series, and univariate polynomials used for measure densities.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, int, parse_rat, Rat};

/// Sparse multivariate (Laurent) polynomial. Exponent vectors all have length
/// `nvars`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exps: Vec<i64>, c: Rat) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Poly { nvars, terms }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rat::one())
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<i64>, Rat)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<i64>, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[i64]) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn total_degree(&self) -> i64 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> i64 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::constant(self.nvars, Rat::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Largest term in lexicographic exponent order.
    fn leading(&self) -> Option<(&Vec<i64>, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / divisor` when the division leaves no remainder.
    ///
    /// Uses the multivariate division algorithm for lex order; a single
    /// divisor is a Gröbner basis of the ideal it generates, so a zero
    /// remainder is equivalent to divisibility.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lt_e, lt_c) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quo = Poly::zero(self.nvars);
        while let Some((e, c)) = rem.leading() {
            if !e.iter().zip(lt_e).all(|(a, b)| a >= b) {
                return None;
            }
            let qe: Vec<i64> = e.iter().zip(lt_e).map(|(a, b)| a - b).collect();
            let qc = c / lt_c;
            let t = Poly::monomial(qe, qc);
            rem = rem.sub(&t.mul(divisor));
            quo = quo.add(&t);
        }
        Some(quo)
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(point).fold(c.clone(), |acc, (&k, x)| {
                    if k >= 0 {
                        acc * num::pow(x.clone(), k as usize)
                    } else {
                        acc / num::pow(x.clone(), (-k) as usize)
                    }
                })
            })
            .fold(Rat::zero(), |a, b| a + b)
    }

    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * int(e[i]));
            }
        }
        out
    }

    /// Substitutes truncated power series (in one variable `t`, modulo
    /// `t^order`) for every variable.
    pub fn compose_series(&self, series: &[Series]) -> Series {
        let order = series[0].order();
        let mut acc = Series::zero(order);
        let mut powers: Vec<Vec<Series>> = series.iter().map(|s| vec![Series::one(order), s.clone()]).collect();
        for (e, c) in &self.terms {
            let mut term = Series::constant(order, c.clone());
            for (i, &k) in e.iter().enumerate() {
                assert!(k >= 0, "series substitution needs a polynomial");
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&series[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize]);
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Rebases the polynomial at `p`: returns `q(y) = self(p + y)`.
    pub fn translate(&self, p: &[Rat]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(self.nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                let lin = Poly::var(self.nvars, i).add(&Poly::constant(self.nvars, p[i].clone()));
                term = term.mul(&lin.pow(k as u32));
            }
            out = out.add(&term);
        }
        out
    }

    /// Coefficient vector in a fixed monomial basis, for linear algebra.
    pub fn coords(&self, basis: &BTreeMap<Vec<i64>, usize>) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); basis.len()];
        for (e, c) in &self.terms {
            v[basis[e]] = c.clone();
        }
        v
    }

    pub fn parse(src: &str, vars: &[&str]) -> Result<Poly> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
            vars,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse(format!("trailing input in polynomial {src:?}")));
        }
        Ok(out)
    }

    pub fn display_with(&self, vars: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(x, _), (y, _)| {
            let dx: i64 = x.iter().sum();
            let dy: i64 = y.iter().sum();
            (dy, y).cmp(&(dx, x))
        });
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            let a = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(j, &k)| if k == 1 { vars[j].to_string() } else { format!("{}^{}", vars[j], k) })
                .collect();
            if mono.is_empty() {
                s.push_str(&fmt_rat(&a));
            } else {
                if !a.is_one() {
                    s.push_str(&fmt_rat(&a));
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{}", i + 1)).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "{}", self.display_with(&refs))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {} of polynomial", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        let n = self.vars.len();
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.scale(&-Rat::one())
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        debug_assert_eq!(acc.nvars, n);
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    if d.terms.len() != 1 || d.terms.keys().next().unwrap().iter().any(|&k| k != 0) {
                        return Err(self.err("division only by constants"));
                    }
                    let c = d.terms.values().next().unwrap().clone();
                    acc = acc.scale(&(Rat::one() / c));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("expected exponent"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        let n = self.vars.len();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.power()?.scale(&-Rat::one()))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Poly::constant(n, parse_rat(s)?))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                Ok(Poly::var(n, i))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

/// Truncated power series `sum c_i t^i mod t^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series(Vec<Rat>);

impl Series {
    pub fn zero(order: usize) -> Self {
        Series(vec![Rat::zero(); order])
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, Rat::one())
    }

    pub fn constant(order: usize, c: Rat) -> Self {
        let mut s = Self::zero(order);
        if order > 0 {
            s.0[0] = c;
        }
        s
    }

    /// `c + t` (or `c` when `order == 1`).
    pub fn linear(order: usize, c: Rat) -> Self {
        let mut s = Self::constant(order, c);
        if order > 1 {
            s.0[1] = Rat::one();
        }
        s
    }

    pub fn from_coeffs(mut c: Vec<Rat>, order: usize) -> Self {
        c.resize(order, Rat::zero());
        Series(c)
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.0
    }

    pub fn add(&self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn mul(&self, o: &Series) -> Series {
        let n = self.0.len();
        let mut out = vec![Rat::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate().take(n - i) {
                out[i + j] += a * b;
            }
        }
        Series(out)
    }

    pub fn scale(&self, c: &Rat) -> Series {
        Series(self.0.iter().map(|a| a * c).collect())
    }

    /// Index and value of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<(usize, &Rat)> {
        self.0.iter().enumerate().find(|(_, c)| !c.is_zero())
    }
}

/// Dense univariate polynomial, `coeffs[i]` multiplies `x^i`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly(pub Vec<Rat>);

impl UPoly {
    pub fn new(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn constant(c: Rat) -> Self {
        UPoly::new(vec![c])
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.0
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> UPoly {
        let mut c = vec![Rat::zero()];
        c.extend(
            self.0
                .iter()
                .enumerate()
                .map(|(i, a)| a / int(i as i64 + 1)),
        );
        UPoly::new(c)
    }

    pub fn integral(&self, a: &Rat, b: &Rat) -> Rat {
        let f = self.antiderivative();
        f.eval(b) - f.eval(a)
    }

    pub fn scale(&self, c: &Rat) -> UPoly {
        UPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    /// Multiplies by `x`.
    pub fn shift(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![Rat::zero()];
        c.extend(self.0.iter().cloned());
        UPoly(c)
    }

    /// Lagrange interpolation through distinct nodes.
    pub fn interpolate(xs: &[Rat], ys: &[Rat]) -> UPoly {
        let mut acc = vec![Rat::zero(); xs.len()];
        for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
            let mut basis = vec![Rat::one()];
            let mut denom = Rat::one();
            for (j, xj) in xs.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut next = vec![Rat::zero(); basis.len() + 1];
                for (k, b) in basis.iter().enumerate() {
                    next[k + 1] += b;
                    next[k] -= b * xj;
                }
                basis = next;
                denom *= xi - xj;
            }
            let f = yi / denom;
            for (a, b) in acc.iter_mut().zip(&basis) {
                *a += b * &f;
            }
        }
        UPoly::new(acc)
    }
}
