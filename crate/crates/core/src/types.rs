//! Bookkeeping of types (depth sequences) of formal products of Speh representations.
//!
//! A formal product is a multiset of `Sp(d, delta)` and `Comp(d, delta, alpha)` factors, with
//! `delta` an opaque label of declared size `r`. The adduced product lowers every `d` by one and
//! drops factors that reach zero; the type is the sequence of size drops along that chain.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid formal product: {0}")]
    Invalid(String),
    #[error("not a partition: {0}")]
    NotPartition(String),
    #[error("derivative index {k} out of range for a type with {len} parts")]
    OutOfRange { k: usize, len: usize },
    #[error("{got} block labels for {expected} parts")]
    LabelCount { expected: usize, got: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// An opaque discrete-series label with its size.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Delta {
    pub name: String,
    pub size: u64,
}

/// The complementary-series parameter: a symbol, or a number checked to lie in `(0, 1/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alpha {
    Symbol(String),
    Value(BigRational),
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Symbol(s) => f.write_str(s),
            Alpha::Value(q) => write!(f, "{q}"),
        }
    }
}

impl Serialize for Alpha {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Factor {
    Speh { d: u64, delta: Delta },
    Comp { d: u64, delta: Delta, alpha: Alpha },
}

impl Factor {
    pub fn d(&self) -> u64 {
        match self {
            Factor::Speh { d, .. } | Factor::Comp { d, .. } => *d,
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            Factor::Speh { d, delta } => d * delta.size,
            Factor::Comp { d, delta, .. } => 2 * d * delta.size,
        }
    }

    fn lowered(&self) -> Option<Factor> {
        let mut out = self.clone();
        match &mut out {
            Factor::Speh { d, .. } | Factor::Comp { d, .. } => {
                *d -= 1;
                if *d == 0 {
                    return None;
                }
            }
        }
        Some(out)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let delta = |d: &Delta| {
            if trailing_size(&d.name) == Some(d.size) {
                d.name.clone()
            } else {
                format!("{}:{}", d.name, d.size)
            }
        };
        match self {
            Factor::Speh { d, delta: x } => write!(f, "Sp({d},{})", delta(x)),
            Factor::Comp { d, delta: x, alpha } => write!(f, "Comp({d},{},{alpha})", delta(x)),
        }
    }
}

fn trailing_size(name: &str) -> Option<u64> {
    let digits = name.len() - name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    if digits == 0 || digits == name.len() {
        return None;
    }
    name[name.len() - digits..].parse().ok()
}

/// An unordered product of factors; stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FormalGL {
    factors: Vec<Factor>,
}

impl FormalGL {
    pub fn new(mut factors: Vec<Factor>) -> Result<Self, TypeError> {
        if factors.is_empty() {
            return Err(TypeError::Invalid("empty product".into()));
        }
        for f in &factors {
            let delta = match f {
                Factor::Speh { delta, .. } | Factor::Comp { delta, .. } => delta,
            };
            if f.d() == 0 {
                return Err(TypeError::Invalid(format!("{f}: d must be at least 1")));
            }
            if delta.size == 0 {
                return Err(TypeError::Invalid(format!("{f}: label size must be at least 1")));
            }
            if let Factor::Comp {
                alpha: Alpha::Value(q), ..
            } = f
            {
                if !alpha_in_range(q) {
                    return Err(TypeError::Invalid(format!("{f}: alpha must lie in (0, 1/2)")));
                }
            }
        }
        factors.sort();
        Ok(FormalGL { factors })
    }

    /// `prod_i Sp(d, delta_i)` for a generic product of labels of the given sizes.
    pub fn speh_of_generic(d: u64, sizes: &[u64]) -> Result<Self, TypeError> {
        Self::new(
            sizes
                .iter()
                .enumerate()
                .map(|(i, &r)| Factor::Speh {
                    d,
                    delta: Delta {
                        name: format!("t{i}_{r}"),
                        size: r,
                    },
                })
                .collect(),
        )
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn size(&self) -> u64 {
        self.factors.iter().map(Factor::size).sum()
    }

    pub fn max_d(&self) -> u64 {
        self.factors.iter().map(Factor::d).max().unwrap_or(0)
    }

    /// Every factor has the same `d`.
    pub fn is_speh_power(&self) -> bool {
        self.factors.iter().all(|f| f.d() == self.factors[0].d())
    }

    /// `None` when every factor disappears.
    pub fn adduced(&self) -> Option<FormalGL> {
        let factors: Vec<Factor> = self.factors.iter().filter_map(Factor::lowered).collect();
        if factors.is_empty() {
            None
        } else {
            Some(FormalGL { factors })
        }
    }

    /// `adduced` applied `k` times.
    pub fn adduced_n(&self, k: usize) -> Option<FormalGL> {
        let mut cur = Some(self.clone());
        for _ in 0..k {
            cur = cur?.adduced();
        }
        cur
    }
}

impl fmt::Display for FormalGL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(Factor::to_string).collect();
        f.write_str(&parts.join(" * "))
    }
}

fn alpha_in_range(q: &BigRational) -> bool {
    let zero = BigRational::from_integer(BigInt::from(0));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    *q > zero && *q < half
}

/// Weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TypePartition {
    parts: Vec<u64>,
}

impl TypePartition {
    pub fn new(parts: Vec<u64>) -> Result<Self, TypeError> {
        if parts.is_empty() || parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(TypeError::NotPartition(format!("{parts:?}")));
        }
        Ok(TypePartition { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.parts.iter().sum()
    }
}

impl fmt::Display for TypePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `n_k = size(A^{k-1} x) - size(A^k x)` along the adduced chain.
pub fn type_of(x: &FormalGL) -> Result<TypePartition, TypeError> {
    let mut parts = Vec::new();
    let mut cur = Some(x.clone());
    while let Some(y) = cur {
        let next = y.adduced();
        parts.push(y.size() - next.as_ref().map_or(0, FormalGL::size));
        cur = next;
    }
    TypePartition::new(parts).map_err(|e| TypeError::Internal(format!("type of {x} is {e}")))
}

/// `(r, d)` when the type is `r^d`.
pub fn is_speh_type(t: &TypePartition) -> Option<(u64, usize)> {
    let r = t.parts[0];
    t.parts.iter().all(|&n| n == r).then_some((r, t.parts.len()))
}

/// The type `(n_{k+1}, ..., n_d)` of the `k`-th highest derivative.
pub fn derivative_type(t: &TypePartition, k: usize) -> Result<TypePartition, TypeError> {
    if k >= t.parts.len() {
        return Err(TypeError::OutOfRange { k, len: t.parts.len() });
    }
    Ok(TypePartition {
        parts: t.parts[k..].to_vec(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegenerateCharacterDescriptor {
    pub partition: TypePartition,
    pub block_characters: Vec<String>,
    /// All parts equal, so the `psi_{1,...,d}` shorthand applies.
    pub shorthand: bool,
    /// A single block: the non-degenerate character.
    pub non_degenerate: bool,
}

pub fn degenerate_descriptor(t: &TypePartition, labels: &[String]) -> Result<DegenerateCharacterDescriptor, TypeError> {
    if labels.len() != t.len() {
        return Err(TypeError::LabelCount {
            expected: t.len(),
            got: labels.len(),
        });
    }
    Ok(DegenerateCharacterDescriptor {
        partition: t.clone(),
        block_characters: labels.to_vec(),
        shorthand: is_speh_type(t).is_some(),
        non_degenerate: t.len() == 1,
    })
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, TypeError> {
        Err(TypeError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TypeError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().find(|c: char| !f(c)).unwrap_or(self.rest().len());
        self.pos += len;
        &self.src[start..start + len]
    }

    fn ident(&mut self) -> Result<&'a str, TypeError> {
        self.skip_ws();
        if !self.rest().starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
            return self.err("expected an identifier");
        }
        Ok(self.take_while(|c| c.is_ascii_alphanumeric() || c == '_'))
    }

    fn number(&mut self) -> Result<u64, TypeError> {
        self.skip_ws();
        let at = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return self.err("expected a number");
        }
        digits.parse().or_else(|_| {
            self.pos = at;
            self.err("number too large")
        })
    }

    fn delta(&mut self) -> Result<Delta, TypeError> {
        self.skip_ws();
        let at = self.pos;
        let name = self.ident()?.to_string();
        let size = if self.eat(':') {
            self.skip_ws();
            let size_at = self.pos;
            let size = self.number()?;
            if size == 0 {
                self.pos = size_at;
                return self.err("label size must be at least 1");
            }
            size
        } else {
            match trailing_size(&name) {
                Some(0) => {
                    self.pos = at;
                    return self.err("label size must be at least 1");
                }
                Some(s) => s,
                None => {
                    self.pos = at;
                    return self.err(format!("label '{name}' needs a size, as in '{name}3' or '{name}:3'"));
                }
            }
        };
        Ok(Delta { name, size })
    }

    fn alpha(&mut self) -> Result<Alpha, TypeError> {
        self.skip_ws();
        let at = self.pos;
        if self.rest().starts_with(|c: char| c.is_ascii_digit()) {
            let text = self.take_while(|c| c.is_ascii_digit() || c == '.' || c == '/');
            let q = parse_rational(text).ok_or(TypeError::Parse {
                pos: at,
                msg: format!("bad number '{text}'"),
            })?;
            if !alpha_in_range(&q) {
                self.pos = at;
                return self.err(format!("alpha {text} is not in (0, 1/2)"));
            }
            return Ok(Alpha::Value(q));
        }
        Ok(Alpha::Symbol(self.ident()?.to_string()))
    }

    fn factor(&mut self) -> Result<Factor, TypeError> {
        self.skip_ws();
        let at = self.pos;
        let head = self.ident()?;
        self.expect('(')?;
        let d_at = self.pos;
        let d = self.number()?;
        if d == 0 {
            self.pos = d_at;
            return self.err("d must be at least 1");
        }
        self.expect(',')?;
        let delta = self.delta()?;
        let factor = match head {
            "Sp" => Factor::Speh { d, delta },
            "Comp" => {
                self.expect(',')?;
                let alpha = self.alpha()?;
                Factor::Comp { d, delta, alpha }
            }
            other => {
                self.pos = at;
                return self.err(format!("unknown factor '{other}', expected Sp or Comp"));
            }
        };
        self.expect(')')?;
        Ok(factor)
    }
}

fn parse_rational(text: &str) -> Option<BigRational> {
    if let Some((a, b)) = text.split_once('/') {
        let a: BigInt = a.parse().ok()?;
        let b: BigInt = b.parse().ok()?;
        if b == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(a, b));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.contains('.') {
            return None;
        }
        let num: BigInt = format!("{int}{frac}").parse().ok()?;
        let den = BigInt::from(10).pow(frac.len() as u32);
        return Some(BigRational::new(num, den));
    }
    Some(BigRational::from_integer(text.parse().ok()?))
}

impl FromStr for FormalGL {
    type Err = TypeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        p.skip_ws();
        if p.rest().is_empty() {
            return p.err("empty expression");
        }
        let mut factors = vec![p.factor()?];
        while p.eat('*') {
            factors.push(p.factor()?);
        }
        p.skip_ws();
        if !p.rest().is_empty() {
            return p.err("expected '*' or end of input");
        }
        FormalGL::new(factors)
    }
}
