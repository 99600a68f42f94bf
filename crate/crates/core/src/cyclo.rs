//! Exact arithmetic in cyclotomic fields `Q(z)` with `z = exp(2*pi*i/N)` for odd squarefree `N`.
//!
//! Values are stored in a canonical reduced form. For `N = p_1 * ... * p_r` every exponent
//! `k` in `Z/N` has CRT coordinates `t_i(k)` in `Z/p_i` defined by `z^k = prod_i z_{p_i}^{t_i(k)}`.
//! The canonical basis consists of the powers `z^k` with every `t_i(k) <= p_i - 2`; a power with
//! `t_i(k) = p_i - 1` is rewritten with the vanishing sum `sum_{j<p_i} z^{k + j*N/p_i} = 0`.
//! Two values are equal iff their reduced coefficient maps are identical.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{factor_squarefree_odd, mod_inverse};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("modulus {0} is not an odd squarefree positive integer")]
    BadModulus(u64),
    #[error("exponent {k} out of range for modulus {n}")]
    ExponentOutOfRange { n: u64, k: u64 },
    #[error("modulus mismatch: {0} vs {1} (lift both operands to a common modulus first)")]
    ModulusMismatch(u64, u64),
    #[error("cannot lift from modulus {from} to {to}: {from} does not divide {to}")]
    BadLift { from: u64, to: u64 },
    #[error("cannot parse cyclotomic value: {0}")]
    Parse(String),
}

/// An odd squarefree modulus together with its prime factorisation.
#[derive(Clone, Debug)]
pub struct Modulus {
    n: u64,
    primes: Arc<[u64]>,
}

impl Modulus {
    pub fn new(n: u64) -> Result<Self, CycloError> {
        let primes = factor_squarefree_odd(n).ok_or(CycloError::BadModulus(n))?;
        Ok(Modulus {
            n,
            primes: primes.into(),
        })
    }

    pub fn value(&self) -> u64 {
        self.n
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// CRT coordinate of exponent `k` at prime `p`.
    fn coordinate(&self, k: u64, p: u64) -> u64 {
        let cofactor = self.n / p;
        let inv = mod_inverse(cofactor % p, p).expect("cofactor is a unit mod p");
        (k % p) * inv % p
    }
}

impl PartialEq for Modulus {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Eq for Modulus {}

impl std::hash::Hash for Modulus {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state)
    }
}

/// An element of `Q(z_N)` in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    modulus: Modulus,
    coeffs: BTreeMap<u64, BigRational>,
}

fn add_term(map: &mut BTreeMap<u64, BigRational>, k: u64, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match map.entry(k) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl Cyclotomic {
    /// Builds a value from an arbitrary (unreduced) coefficient map.
    pub fn from_terms(
        modulus: &Modulus,
        terms: impl IntoIterator<Item = (u64, BigRational)>,
    ) -> Self {
        let n = modulus.n;
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            add_term(&mut coeffs, k % n, c);
        }
        let mut out = Cyclotomic {
            modulus: modulus.clone(),
            coeffs,
        };
        out.reduce();
        out
    }

    fn reduce(&mut self) {
        let n = self.modulus.n;
        let primes = self.modulus.primes.clone();
        for &p in primes.iter() {
            let step = n / p;
            let bad: Vec<u64> = self
                .coeffs
                .keys()
                .copied()
                .filter(|&k| self.modulus.coordinate(k, p) == p - 1)
                .collect();
            for k in bad {
                let c = self.coeffs.remove(&k).expect("key present");
                for j in 1..p {
                    add_term(&mut self.coeffs, (k + j * step) % n, -c.clone());
                }
            }
        }
    }

    pub fn zero(modulus: &Modulus) -> Self {
        Cyclotomic {
            modulus: modulus.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(modulus: &Modulus) -> Self {
        Self::from_rational(modulus, BigRational::one())
    }

    pub fn from_rational(modulus: &Modulus, q: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        add_term(&mut coeffs, 0, q);
        Cyclotomic {
            modulus: modulus.clone(),
            coeffs,
        }
    }

    pub fn from_integer(modulus: &Modulus, v: i64) -> Self {
        Self::from_rational(modulus, BigRational::from_integer(BigInt::from(v)))
    }

    /// Canonical form of `z_N^k`.
    pub fn root_of_unity(n: u64, k: u64) -> Result<Self, CycloError> {
        let modulus = Modulus::new(n)?;
        if k >= n {
            return Err(CycloError::ExponentOutOfRange { n, k });
        }
        Ok(Self::root(&modulus, k))
    }

    /// `z_N^k` for any `k`, taken mod `N`.
    pub fn root(modulus: &Modulus, k: u64) -> Self {
        Self::from_terms(modulus, [(k % modulus.n, BigRational::one())])
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Reduced `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.to_rational().is_some_and(|q| q.is_one())
    }

    /// The rational value, if this element lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => self.coeffs.get(&0).cloned(),
            _ => None,
        }
    }

    /// Complex conjugation `z^k -> z^{-k}`.
    pub fn conj(&self) -> Self {
        self.galois_conjugate(self.modulus.n - 1)
    }

    /// The Galois automorphism `z -> z^a` for `a` a unit mod `N`.
    pub fn galois_conjugate(&self, a: u64) -> Self {
        let n = self.modulus.n;
        Self::from_terms(
            &self.modulus,
            self.coeffs.iter().map(|(k, c)| (k * a % n, c.clone())),
        )
    }

    /// Trace from `Q(z_N)` down to `Q`.
    pub fn trace(&self) -> BigRational {
        let n = self.modulus.n;
        let mut acc = Cyclotomic::zero(&self.modulus);
        for a in (1..=n).filter(|&a| num_integer::gcd(a, n) == 1) {
            acc += &self.galois_conjugate(a);
        }
        acc.to_rational().expect("trace of a cyclotomic number is rational")
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Cyclotomic::zero(&self.modulus);
        }
        Cyclotomic {
            modulus: self.modulus.clone(),
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c * q)).collect(),
        }
    }

    /// Embeds into `Q(z_M)` for a multiple `M` of `N`.
    pub fn lift(&self, target: &Modulus) -> Result<Self, CycloError> {
        let (from, to) = (self.modulus.n, target.n);
        if to % from != 0 {
            return Err(CycloError::BadLift { from, to });
        }
        let factor = to / from;
        Ok(Self::from_terms(
            target,
            self.coeffs.iter().map(|(k, c)| (k * factor, c.clone())),
        ))
    }

    fn check_modulus(&self, other: &Self) -> Result<(), CycloError> {
        if self.modulus != other.modulus {
            return Err(CycloError::ModulusMismatch(self.modulus.n, other.modulus.n));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CycloError> {
        self.check_modulus(other)?;
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            add_term(&mut coeffs, *k, c.clone());
        }
        Ok(Cyclotomic {
            modulus: self.modulus.clone(),
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, CycloError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, CycloError> {
        self.check_modulus(other)?;
        let n = self.modulus.n;
        let mut raw = BTreeMap::new();
        for (k1, c1) in &self.coeffs {
            for (k2, c2) in &other.coeffs {
                add_term(&mut raw, (k1 + k2) % n, c1 * c2);
            }
        }
        let mut out = Cyclotomic {
            modulus: self.modulus.clone(),
            coeffs: raw,
        };
        out.reduce();
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Cyclotomic::one(&self.modulus);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Returns `k` when `self == z_N^k`.
    pub fn as_root_of_unity(&self) -> Option<u64> {
        // A root reduces to at most prod (p_i - 1) terms, each with coefficient +-1.
        if self.coeffs.is_empty() || self.coeffs.values().any(|c| c.abs() != BigRational::one()) {
            return None;
        }
        (0..self.modulus.n).find(|&k| Self::root(&self.modulus, k) == *self)
    }

    /// Integer coefficients as machine words, when every coefficient is an integer that fits.
    pub(crate) fn small_integer_terms(&self) -> Option<Vec<(u64, i64)>> {
        self.coeffs
            .iter()
            .map(|(k, c)| {
                if c.is_integer() {
                    c.numer().to_i64().map(|v| (*k, v))
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Accumulates `sum weight * a * b` in the group ring `Z[Z/N]` with overflow-checked machine
/// integers; the canonical reduction is applied once at the end.
pub(crate) struct IntAccumulator {
    modulus: Modulus,
    acc: Vec<i128>,
}

impl IntAccumulator {
    pub(crate) fn new(modulus: &Modulus) -> Self {
        IntAccumulator {
            modulus: modulus.clone(),
            acc: vec![0; modulus.n as usize],
        }
    }

    /// Returns `None` on overflow.
    pub(crate) fn add_product(&mut self, weight: i128, a: &[(u64, i64)], b: &[(u64, i64)]) -> Option<()> {
        let n = self.modulus.n;
        for &(k1, c1) in a {
            let wc1 = weight.checked_mul(c1 as i128)?;
            for &(k2, c2) in b {
                let slot = &mut self.acc[((k1 + k2) % n) as usize];
                *slot = slot.checked_add(wc1.checked_mul(c2 as i128)?)?;
            }
        }
        Some(())
    }

    pub(crate) fn finish(self) -> Cyclotomic {
        Cyclotomic::from_terms(
            &self.modulus,
            self.acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c != 0)
                .map(|(k, c)| (k as u64, BigRational::from_integer(BigInt::from(c)))),
        )
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Cyclotomic> for &Cyclotomic {
            type Output = Cyclotomic;
            /// Panics on modulus mismatch; use the `checked_*` form to get an error instead.
            fn $method(self, rhs: &Cyclotomic) -> Cyclotomic {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: Cyclotomic) -> Cyclotomic {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: &Cyclotomic) -> Cyclotomic {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, rhs: &Cyclotomic) {
        self.check_modulus(rhs).unwrap_or_else(|e| panic!("{e}"));
        for (k, c) in &rhs.coeffs {
            add_term(&mut self.coeffs, *k, c.clone());
        }
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            modulus: self.modulus.clone(),
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

/// `(N=15) 1*z^0 + -1/2*z^3`; zero prints as `(N=15) 0`.
impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(N={}) ", self.modulus.n)?;
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*z^{k}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Cyclotomic {
    type Err = CycloError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CycloError::Parse(s.to_string());
        let rest = s.trim().strip_prefix("(N=").ok_or_else(bad)?;
        let (n, body) = rest.split_once(')').ok_or_else(bad)?;
        let modulus = Modulus::new(n.trim().parse().map_err(|_| bad())?)?;
        let body = body.trim();
        if body == "0" {
            return Ok(Cyclotomic::zero(&modulus));
        }
        let mut terms = Vec::new();
        for term in body.split(" + ") {
            let (c, k) = term.trim().split_once("*z^").ok_or_else(bad)?;
            let c: BigRational = c.parse().map_err(|_| bad())?;
            let k: u64 = k.parse().map_err(|_| bad())?;
            if k >= modulus.n {
                return Err(CycloError::ExponentOutOfRange { n: modulus.n, k });
            }
            terms.push((k, c));
        }
        Ok(Cyclotomic::from_terms(&modulus, terms))
    }
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
