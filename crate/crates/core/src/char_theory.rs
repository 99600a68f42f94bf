//! Exact character theory for Heisenberg products and their subgroups.
//!
//! The irreducibles of `H_p` are the `p^2` linear characters `(a,b,c) -> z_p^{ua+vb}` and the
//! `p - 1` characters `Ind_L^H(chi~)` induced from the Lagrangian `L = {a = 0}`, where `chi~`
//! extends a non-trivial central character `chi` by `chi~(0,b,c) = chi(c)`. Irreducibles of a
//! product are tensor products of factor irreducibles. The list is built constructively and
//! certified by `sum deg^2 = |H|`; no general character-table algorithm is involved.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cyclo::{CycloError, Cyclotomic, IntAccumulator, Modulus};
use crate::group::{
    ConjugacyClasses, FiniteGroup, GroupError, GroupInvolution, Lagrangian, Subgroup, SubgroupKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("class functions live on different groups: {0} vs {1}")]
    DomainMismatch(String, String),
    #[error("expected {expected} class values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("value modulus {got} does not match the group modulus {expected}")]
    ValueModulus { expected: u64, got: u64 },
    #[error("{0} is not a Lagrangian subgroup")]
    NotLagrangian(String),
    #[error("operation needs a class function on the full group, got one on {0}")]
    NotOnGroup(String),
    #[error("inner product is not rational: {0}")]
    NotRational(String),
    #[error("not an irreducible character: {0}")]
    NotIrreducible(String),
    #[error("irreducible list is incomplete: sum of squared degrees {degree_sum} != |G| = {order}")]
    IncompleteCertificate { degree_sum: String, order: usize },
    #[error("bad central character: {0}")]
    BadCentralCharacter(String),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Where a class function lives.
#[derive(Clone, Debug)]
pub enum Domain {
    Group(Arc<FiniteGroup>),
    Subgroup(Arc<Subgroup>),
}

impl Domain {
    pub fn classes(&self) -> &ConjugacyClasses {
        match self {
            Domain::Group(g) => g.classes(),
            Domain::Subgroup(s) => s.classes(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Domain::Group(g) => g.order(),
            Domain::Subgroup(s) => s.order(),
        }
    }

    pub fn ambient(&self) -> &Arc<FiniteGroup> {
        match self {
            Domain::Group(g) => g,
            Domain::Subgroup(s) => s.parent(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Domain::Group(g) => g.name(),
            Domain::Subgroup(s) => format!("{:?} of {}", s.kind(), s.parent().name()),
        }
    }

    fn same(&self, other: &Domain) -> bool {
        match (self, other) {
            (Domain::Group(a), Domain::Group(b)) => a == b,
            (Domain::Subgroup(a), Domain::Subgroup(b)) => a == b,
            _ => false,
        }
    }
}

fn group_modulus(g: &FiniteGroup) -> Modulus {
    Modulus::new(g.modulus()).expect("product of distinct odd primes")
}

/// `z_N^{x * N/p}`, i.e. `z_p^x` inside `Q(z_N)`.
fn prime_root_exponent(n: u64, p: u64, x: u64) -> u64 {
    (x % p) * (n / p) % n
}

/// A cyclotomic-valued function on conjugacy classes.
#[derive(Clone)]
pub struct ClassFunction {
    domain: Domain,
    modulus: Modulus,
    values: Vec<Cyclotomic>,
}

impl fmt::Debug for ClassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassFunction")
            .field("domain", &self.domain.name())
            .field("values", &self.values)
            .finish()
    }
}

impl PartialEq for ClassFunction {
    fn eq(&self, other: &Self) -> bool {
        self.domain.same(&other.domain) && self.values == other.values
    }
}

impl ClassFunction {
    pub fn new(domain: Domain, values: Vec<Cyclotomic>) -> Result<Self, CharError> {
        let expected = domain.classes().len();
        if values.len() != expected {
            return Err(CharError::WrongLength {
                expected,
                got: values.len(),
            });
        }
        let modulus = group_modulus(domain.ambient());
        if let Some(v) = values.iter().find(|v| *v.modulus() != modulus) {
            return Err(CharError::ValueModulus {
                expected: modulus.value(),
                got: v.modulus().value(),
            });
        }
        Ok(ClassFunction {
            domain,
            modulus,
            values,
        })
    }

    /// Evaluates `f` on each class representative (given as an ambient element index).
    pub fn from_fn(domain: Domain, f: impl Fn(usize) -> Cyclotomic) -> Result<Self, CharError> {
        let values = domain.classes().reps.iter().map(|&r| f(r)).collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn values(&self) -> &[Cyclotomic] {
        &self.values
    }

    /// Value at an element (ambient index) of the domain.
    pub fn value_at(&self, idx: usize) -> Option<&Cyclotomic> {
        self.domain.classes().class_of(idx).map(|c| &self.values[c])
    }

    /// Value at the identity.
    pub fn degree(&self) -> &Cyclotomic {
        let id = self.domain.ambient().identity_idx();
        self.value_at(id).expect("identity lies in every domain")
    }

    fn check_same(&self, other: &ClassFunction) -> Result<(), CharError> {
        if !self.domain.same(&other.domain) {
            return Err(CharError::DomainMismatch(self.domain.name(), other.domain.name()));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &ClassFunction,
        f: impl Fn(&Cyclotomic, &Cyclotomic) -> Cyclotomic,
    ) -> Result<ClassFunction, CharError> {
        self.check_same(other)?;
        Ok(ClassFunction {
            domain: self.domain.clone(),
            modulus: self.modulus.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Pointwise product (tensor product of characters).
    pub fn mul(&self, other: &ClassFunction) -> Result<ClassFunction, CharError> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Pointwise sum (direct sum of characters).
    pub fn add(&self, other: &ClassFunction) -> Result<ClassFunction, CharError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, q: &BigRational) -> ClassFunction {
        ClassFunction {
            domain: self.domain.clone(),
            modulus: self.modulus.clone(),
            values: self.values.iter().map(|v| v.scale(q)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Cyclotomic::is_zero)
    }
}

/// The dual (complex conjugate) class function.
pub fn dual(chi: &ClassFunction) -> ClassFunction {
    ClassFunction {
        domain: chi.domain.clone(),
        modulus: chi.modulus.clone(),
        values: chi.values.iter().map(Cyclotomic::conj).collect(),
    }
}

/// `z = ((0,0,c_i))_i -> prod_i z_{p_i}^{e_i c_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CentralCharacter {
    primes: Vec<u64>,
    exponents: Vec<u64>,
}

impl CentralCharacter {
    pub fn new(primes: &[u64], exponents: &[u64]) -> Result<Self, CharError> {
        if primes.len() != exponents.len() {
            return Err(CharError::BadCentralCharacter(format!(
                "{} exponents for {} factors",
                exponents.len(),
                primes.len()
            )));
        }
        if let Some((e, p)) = exponents.iter().zip(primes).find(|(e, p)| e >= p) {
            return Err(CharError::BadCentralCharacter(format!("exponent {e} not reduced mod {p}")));
        }
        Ok(CentralCharacter {
            primes: primes.to_vec(),
            exponents: exponents.to_vec(),
        })
    }

    pub fn trivial(primes: &[u64]) -> Self {
        CentralCharacter {
            primes: primes.to_vec(),
            exponents: vec![0; primes.len()],
        }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// All `chi_i` non-trivial.
    pub fn is_regular(&self) -> bool {
        self.exponents.iter().all(|&e| e != 0)
    }

    pub fn inverse(&self) -> Self {
        CentralCharacter {
            primes: self.primes.clone(),
            exponents: self
                .exponents
                .iter()
                .zip(&self.primes)
                .map(|(&e, &p)| (p - e) % p)
                .collect(),
        }
    }

    fn check_group(&self, group: &FiniteGroup) -> Result<(), CharError> {
        if self.primes != group.primes() {
            return Err(CharError::BadCentralCharacter(format!(
                "character for primes {:?} used on {}",
                self.primes,
                group.name()
            )));
        }
        Ok(())
    }

    /// Exponent `k` with `c(g) = z_N^k`, using only the `c` coordinates of `g`.
    pub fn exponent_at(&self, group: &FiniteGroup, idx: usize) -> u64 {
        let n = group.modulus();
        group
            .triples(idx)
            .iter()
            .zip(self.exponents.iter().zip(&self.primes))
            .map(|(&(_, _, c), (&e, &p))| prime_root_exponent(n, p, e * c))
            .sum::<u64>()
            % n
    }

    /// `c o sigma`, read off on the generators `z_j` of the center.
    pub fn compose(&self, sigma: &GroupInvolution) -> Result<CentralCharacter, CharError> {
        let g = sigma.group();
        self.check_group(g)?;
        let n = g.modulus();
        let exponents = (0..g.factor_count())
            .map(|j| {
                let p = self.primes[j];
                let image = sigma.apply_idx(g.z_gen(j));
                let k = self.exponent_at(g, image);
                debug_assert_eq!(k % (n / p), 0, "image of z_j has order p_j");
                k / (n / p) % p
            })
            .collect();
        Ok(CentralCharacter {
            primes: self.primes.clone(),
            exponents,
        })
    }
}

impl fmt::Display for CentralCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Label of a factor irreducible of `H_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FactorIrrep {
    /// `(a,b,c) -> z_p^{ua + vb}`
    Linear { u: u64, v: u64 },
    /// `Ind_L^H(chi~)` with central character `z_p^{ec}`, `e != 0`.
    Regular { e: u64 },
}

#[derive(Clone, Debug)]
pub struct Irreducible {
    pub label: Vec<FactorIrrep>,
    pub character: ClassFunction,
}

impl Irreducible {
    /// Regular in every factor.
    pub fn is_fully_regular(&self) -> bool {
        self.label.iter().all(|f| matches!(f, FactorIrrep::Regular { .. }))
    }
}

/// Exponents `(u_i, v_i)` of a linear character `prod_i z_{p_i}^{u_i a_i + v_i b_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearLabel {
    pub u: Vec<u64>,
    pub v: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct LinearCharacter {
    pub label: LinearLabel,
    pub character: ClassFunction,
}

impl LinearLabel {
    pub fn is_trivial(&self) -> bool {
        self.u.iter().chain(&self.v).all(|&x| x == 0)
    }

    /// Exponent `k` with `lambda(g) = z_N^k`.
    pub fn exponent_at(&self, group: &FiniteGroup, idx: usize) -> u64 {
        let n = group.modulus();
        group
            .triples(idx)
            .iter()
            .zip(group.primes())
            .enumerate()
            .map(|(i, (&(a, b, _), &p))| prime_root_exponent(n, p, self.u[i] * a + self.v[i] * b))
            .sum::<u64>()
            % n
    }
}

fn all_labels(primes: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &p in primes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..p).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// The `prod p_i^2` characters of `H / [H,H] = prod (Z/p_i)^2`.
pub fn linear_characters(group: &Arc<FiniteGroup>) -> Vec<LinearCharacter> {
    let modulus = group_modulus(group);
    let squares: Vec<u64> = group.primes().iter().map(|p| p * p).collect();
    all_labels(&squares)
        .into_iter()
        .map(|uv| {
            let label = LinearLabel {
                u: uv.iter().zip(group.primes()).map(|(x, p)| x / p).collect(),
                v: uv.iter().zip(group.primes()).map(|(x, p)| x % p).collect(),
            };
            let character = ClassFunction::from_fn(Domain::Group(group.clone()), |g| {
                Cyclotomic::root(&modulus, label.exponent_at(group, g))
            })
            .expect("values built with the group modulus");
            LinearCharacter { label, character }
        })
        .collect()
}

fn lagrangian_kind(sub: &Subgroup) -> Result<Lagrangian, CharError> {
    match sub.kind() {
        SubgroupKind::LagrangianA0 => Ok(Lagrangian::A0),
        SubgroupKind::LagrangianB0 => Ok(Lagrangian::B0),
        _ => Err(CharError::NotLagrangian(format!("{sub:?}"))),
    }
}

/// `chi~((0,b,c)) = chi(c)` on `L = {a=0}`, or `chi~'((a,0,c)) = chi(c)` on `L' = {b=0}`.
pub fn extend_to_lagrangian(lagrangian: &Arc<Subgroup>, chi: &CentralCharacter) -> Result<ClassFunction, CharError> {
    lagrangian_kind(lagrangian)?;
    let g = lagrangian.parent();
    chi.check_group(g)?;
    let modulus = group_modulus(g);
    ClassFunction::from_fn(Domain::Subgroup(lagrangian.clone()), |x| {
        Cyclotomic::root(&modulus, chi.exponent_at(g, x))
    })
}

/// A character of a Lagrangian: `line` exponents act on `b` (for `a=0`) or `a` (for `b=0`),
/// `central` exponents act on `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LagrangianLabel {
    pub line: Vec<u64>,
    pub central: Vec<u64>,
}

impl LagrangianLabel {
    /// Exponent `k` of the value `z_N^k` at element `idx` of the Lagrangian.
    pub fn exponent_at(&self, group: &FiniteGroup, which: Lagrangian, idx: usize) -> u64 {
        let n = group.modulus();
        group
            .triples(idx)
            .iter()
            .zip(group.primes())
            .enumerate()
            .map(|(i, (&(a, b, c), &p))| {
                let line_coord = match which {
                    Lagrangian::A0 => b,
                    Lagrangian::B0 => a,
                };
                prime_root_exponent(n, p, self.line[i] * line_coord + self.central[i] * c)
            })
            .sum::<u64>()
            % n
    }

    fn times(&self, other: &LagrangianLabel, primes: &[u64]) -> LagrangianLabel {
        let add = |x: &[u64], y: &[u64]| x.iter().zip(y).zip(primes).map(|((a, b), p)| (a + b) % p).collect();
        LagrangianLabel {
            line: add(&self.line, &other.line),
            central: add(&self.central, &other.central),
        }
    }
}

/// Every linear character of a Lagrangian subgroup.
pub fn lagrangian_characters(
    lagrangian: &Arc<Subgroup>,
) -> Result<Vec<(LagrangianLabel, ClassFunction)>, CharError> {
    let which = lagrangian_kind(lagrangian)?;
    let g = lagrangian.parent();
    let modulus = group_modulus(g);
    let primes = g.primes();
    let mut out = Vec::new();
    for line in all_labels(primes) {
        for central in all_labels(primes) {
            let label = LagrangianLabel {
                line: line.clone(),
                central,
            };
            let cf = ClassFunction::from_fn(Domain::Subgroup(lagrangian.clone()), |x| {
                Cyclotomic::root(&modulus, label.exponent_at(g, which, x))
            })?;
            out.push((label, cf));
        }
    }
    Ok(out)
}

/// Frobenius induction `Ind_K^G(chi)(g) = sum_{r in G/K} chi°(r^-1 g r)`.
pub fn induce(sub: &Arc<Subgroup>, chi: &ClassFunction) -> Result<ClassFunction, CharError> {
    let domain = Domain::Subgroup(sub.clone());
    if !chi.domain.same(&domain) {
        return Err(CharError::DomainMismatch(chi.domain.name(), domain.name()));
    }
    let g = sub.parent();
    let (reps, _) = sub.left_cosets();
    let modulus = chi.modulus.clone();
    ClassFunction::from_fn(Domain::Group(g.clone()), |x| {
        let mut acc = Cyclotomic::zero(&modulus);
        for &r in &reps {
            let conj = g.mul_idx(g.mul_idx(g.inv_idx(r), x), r);
            if let Some(v) = chi.value_at(conj) {
                acc += v;
            }
        }
        acc
    })
}

/// Restriction of a class function on `G` to a subgroup.
pub fn restrict(chi: &ClassFunction, sub: &Arc<Subgroup>) -> Result<ClassFunction, CharError> {
    match &chi.domain {
        Domain::Group(g) if **g == **sub.parent() => {}
        other => {
            return Err(CharError::DomainMismatch(
                other.name(),
                sub.parent().name(),
            ))
        }
    }
    ClassFunction::from_fn(Domain::Subgroup(sub.clone()), |x| {
        chi.value_at(x).expect("subgroup element lies in the group").clone()
    })
}

/// Per-class integer terms of a class function, for the fast inner-product path.
struct IntegerForm(Option<Vec<Vec<(u64, i64)>>>);

impl IntegerForm {
    fn of(chi: &ClassFunction) -> Self {
        IntegerForm(chi.values.iter().map(Cyclotomic::small_integer_terms).collect())
    }

    fn conjugated(chi: &ClassFunction) -> Self {
        let n = chi.modulus.value();
        let mut form = Self::of(chi);
        if let Some(classes) = form.0.as_mut() {
            for terms in classes {
                for (k, _) in terms.iter_mut() {
                    *k = (n - *k) % n;
                }
            }
        }
        form
    }
}

fn rational_result(sum: Cyclotomic, order: usize) -> Result<BigRational, CharError> {
    let q = sum
        .to_rational()
        .ok_or_else(|| CharError::NotRational(sum.to_string()))?;
    Ok(q / BigRational::from_integer(BigInt::from(order)))
}

fn inner_product_with_forms(
    a: &ClassFunction,
    b: &ClassFunction,
    fa: &IntegerForm,
    fb_conj: &IntegerForm,
) -> Result<BigRational, CharError> {
    a.check_same(b)?;
    let classes = a.domain.classes();
    if let (Some(xa), Some(xb)) = (&fa.0, &fb_conj.0) {
        let mut acc = IntAccumulator::new(&a.modulus);
        let ok = classes
            .sizes
            .iter()
            .zip(xa.iter().zip(xb))
            .all(|(&size, (ta, tb))| acc.add_product(size as i128, ta, tb).is_some());
        if ok {
            return rational_result(acc.finish(), a.domain.order());
        }
    }
    let mut sum = Cyclotomic::zero(&a.modulus);
    for (c, &size) in classes.sizes.iter().enumerate() {
        let term = &a.values[c] * &b.values[c].conj();
        sum += &term.scale(&BigRational::from_integer(BigInt::from(size)));
    }
    rational_result(sum, a.domain.order())
}

/// `<chi1, chi2> = |G|^-1 sum_g chi1(g) conj(chi2(g))`, exact.
pub fn inner_product(chi1: &ClassFunction, chi2: &ClassFunction) -> Result<BigRational, CharError> {
    inner_product_with_forms(chi1, chi2, &IntegerForm::of(chi1), &IntegerForm::conjugated(chi2))
}

/// All pairwise inner products `<chars[i], chars[j]>`.
pub fn gram_matrix(chars: &[ClassFunction]) -> Result<Vec<Vec<BigRational>>, CharError> {
    let forms: Vec<IntegerForm> = chars.iter().map(IntegerForm::of).collect();
    let conj_forms: Vec<IntegerForm> = chars.iter().map(IntegerForm::conjugated).collect();
    let mut out = vec![vec![BigRational::zero(); chars.len()]; chars.len()];
    for i in 0..chars.len() {
        for j in i..chars.len() {
            let v = inner_product_with_forms(&chars[i], &chars[j], &forms[i], &conj_forms[j])?;
            // <a,b> = conj <b,a>, and the value is rational
            out[j][i] = v.clone();
            out[i][j] = v;
        }
    }
    Ok(out)
}

/// Column orthogonality sums `sum_chi chi(g_r) conj(chi(g_s))` for every pair of classes.
pub fn column_sums(chars: &[ClassFunction]) -> Result<Vec<Vec<Cyclotomic>>, CharError> {
    let Some(first) = chars.first() else {
        return Ok(vec![]);
    };
    for c in chars {
        first.check_same(c)?;
    }
    let k = first.values.len();
    let forms: Vec<IntegerForm> = chars.iter().map(IntegerForm::of).collect();
    let fast: Option<Vec<&Vec<Vec<(u64, i64)>>>> = forms.iter().map(|f| f.0.as_ref()).collect();
    let n = first.modulus.value();
    let mut out = vec![vec![Cyclotomic::zero(&first.modulus); k]; k];
    for r in 0..k {
        for s in 0..k {
            let mut done = false;
            if let Some(fast) = &fast {
                let mut acc = IntAccumulator::new(&first.modulus);
                let ok = fast.iter().all(|f| {
                    let conj: Vec<(u64, i64)> = f[s].iter().map(|&(e, c)| ((n - e) % n, c)).collect();
                    acc.add_product(1, &f[r], &conj).is_some()
                });
                if ok {
                    out[r][s] = acc.finish();
                    done = true;
                }
            }
            if !done {
                let mut acc = Cyclotomic::zero(&first.modulus);
                for c in chars {
                    acc += &(&c.values[r] * &c.values[s].conj());
                }
                out[r][s] = acc;
            }
        }
    }
    Ok(out)
}

/// Irreducibles of a single `H_p`, in the order: linear `(u, v)` lexicographic, then regular `e`.
fn factor_irreducibles(p: u64) -> Result<(Arc<FiniteGroup>, Vec<(FactorIrrep, ClassFunction)>), CharError> {
    let h = Arc::new(FiniteGroup::heisenberg(p)?);
    let mut out: Vec<(FactorIrrep, ClassFunction)> = linear_characters(&h)
        .into_iter()
        .map(|lc| {
            (
                FactorIrrep::Linear {
                    u: lc.label.u[0],
                    v: lc.label.v[0],
                },
                lc.character,
            )
        })
        .collect();
    let lag = Arc::new(Subgroup::lagrangian(&h, Lagrangian::A0));
    for e in 1..p {
        let chi = CentralCharacter::new(&[p], &[e])?;
        let induced = induce(&lag, &extend_to_lagrangian(&lag, &chi)?)?;
        out.push((FactorIrrep::Regular { e }, induced));
    }
    Ok((h, out))
}

/// Every irreducible character of a Heisenberg product, certified complete.
pub fn irreducible_characters(group: &Arc<FiniteGroup>) -> Result<Vec<Irreducible>, CharError> {
    let modulus = group_modulus(group);
    let mut per_prime: BTreeMap<u64, (Arc<FiniteGroup>, Vec<(FactorIrrep, Vec<Cyclotomic>)>)> = BTreeMap::new();
    for &p in group.primes() {
        if per_prime.contains_key(&p) {
            continue;
        }
        let (h, irreps) = factor_irreducibles(p)?;
        let lifted = irreps
            .into_iter()
            .map(|(label, cf)| {
                let vals = cf.values.iter().map(|v| v.lift(&modulus)).collect::<Result<Vec<_>, _>>()?;
                Ok((label, vals))
            })
            .collect::<Result<Vec<_>, CharError>>()?;
        per_prime.insert(p, (h, lifted));
    }
    let classes = group.classes();
    // factor class of each component of each class representative
    let factor_classes: Vec<Vec<usize>> = classes
        .reps
        .iter()
        .map(|&r| {
            group
                .primes()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let h = &per_prime[p].0;
                    h.classes()
                        .class_of(group.component_idx(r, i))
                        .expect("component lies in the factor")
                })
                .collect()
        })
        .collect();

    let counts: Vec<u64> = group.primes().iter().map(|p| per_prime[p].1.len() as u64).collect();
    let mut out = Vec::new();
    for choice in all_labels(&counts) {
        let label: Vec<FactorIrrep> = choice
            .iter()
            .zip(group.primes())
            .map(|(&k, p)| per_prime[p].1[k as usize].0)
            .collect();
        let values = factor_classes
            .iter()
            .map(|fc| {
                let mut v = Cyclotomic::one(&modulus);
                for (i, p) in group.primes().iter().enumerate() {
                    let factor_value = &per_prime[p].1[choice[i] as usize].1[fc[i]];
                    if factor_value.is_zero() {
                        return Cyclotomic::zero(&modulus);
                    }
                    v = &v * factor_value;
                }
                v
            })
            .collect();
        out.push(Irreducible {
            label,
            character: ClassFunction::new(Domain::Group(group.clone()), values)?,
        });
    }

    let degree_sum: BigRational = out
        .iter()
        .map(|irr| {
            let d = irr.character.degree().to_rational().unwrap_or_else(BigRational::zero);
            &d * &d
        })
        .sum();
    let degrees_ok = out.iter().all(|irr| {
        irr.character
            .degree()
            .to_rational()
            .is_some_and(|d| d.is_integer() && d.is_positive())
    });
    if !degrees_ok
        || out.len() != classes.len()
        || degree_sum != BigRational::from_integer(BigInt::from(group.order()))
    {
        return Err(CharError::IncompleteCertificate {
            degree_sum: degree_sum.to_string(),
            order: group.order(),
        });
    }
    Ok(out)
}

/// The fully regular irreducible `I_chi = Ind_L^H(chi~)`, `L = {a = 0}`.
pub fn regular_irreducible(group: &Arc<FiniteGroup>, chi: &CentralCharacter) -> Result<ClassFunction, CharError> {
    let lag = Arc::new(Subgroup::lagrangian(group, Lagrangian::A0));
    induce(&lag, &extend_to_lagrangian(&lag, chi)?)
}

/// `z -> chi(z)/chi(1)` as an exponent vector.
pub fn central_character(chi: &ClassFunction) -> Result<CentralCharacter, CharError> {
    let g = match &chi.domain {
        Domain::Group(g) => g,
        Domain::Subgroup(_) => return Err(CharError::NotOnGroup(chi.domain.name())),
    };
    let degree = chi
        .degree()
        .to_rational()
        .filter(|d| d.is_positive())
        .ok_or_else(|| CharError::NotIrreducible(format!("degree {} is not a positive rational", chi.degree())))?;
    let inv_degree = degree.recip();
    let n = g.modulus();
    let exponents = g
        .primes()
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let ratio = chi.value_at(g.z_gen(j)).expect("z_j in G").scale(&inv_degree);
            (0..p)
                .find(|&e| ratio == Cyclotomic::root(&chi.modulus, prime_root_exponent(n, p, e)))
                .ok_or_else(|| {
                    CharError::NotIrreducible(format!("chi(z_{j})/chi(1) = {ratio} is not a p-th root of unity"))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    CentralCharacter::new(g.primes(), &exponents)
}

/// `chi^sigma(g) = chi(sigma(g))`.
pub fn twist_by_involution(chi: &ClassFunction, sigma: &GroupInvolution) -> Result<ClassFunction, CharError> {
    let g = match &chi.domain {
        Domain::Group(g) if **g == **sigma.group() => g,
        other => return Err(CharError::DomainMismatch(other.name(), sigma.group().name())),
    };
    ClassFunction::from_fn(Domain::Group(g.clone()), |x| {
        chi.value_at(sigma.apply_idx(x)).expect("automorphism preserves G").clone()
    })
}

/// Constituents of a restriction to a Lagrangian, with the shape check
/// `Res_L(rho) = chi~ . (sum_k mu~^k)` for a single non-trivial `mu~` trivial on the center.
#[derive(Clone, Debug)]
pub struct LagrangianDecomposition {
    /// Constituents with positive multiplicity.
    pub constituents: Vec<(LagrangianLabel, BigRational)>,
    /// The constituent with trivial line part, when present.
    pub base: Option<LagrangianLabel>,
    /// A non-trivial `mu~` whose powers times `base` give every constituent exactly once.
    pub mu: Option<LagrangianLabel>,
}

impl LagrangianDecomposition {
    pub fn has_mackey_shape(&self) -> bool {
        self.mu.is_some()
    }
}

/// Decomposes `Res_L(rho)` by exact inner products against every character of `L`.
pub fn decompose_on_lagrangian(
    rho: &ClassFunction,
    lagrangian: &Arc<Subgroup>,
) -> Result<LagrangianDecomposition, CharError> {
    let restricted = restrict(rho, lagrangian)?;
    let primes = lagrangian.parent().primes().to_vec();
    let mut constituents = Vec::new();
    for (label, cf) in lagrangian_characters(lagrangian)? {
        let m = inner_product(&restricted, &cf)?;
        if !m.is_zero() {
            constituents.push((label, m));
        }
    }
    let base = constituents
        .iter()
        .find(|(l, _)| l.line.iter().all(|&x| x == 0))
        .map(|(l, _)| l.clone());
    let dim: u64 = primes.iter().product();
    let mu = base.as_ref().and_then(|base| {
        let all_once = constituents.iter().all(|(_, m)| m.is_one()) && constituents.len() as u64 == dim;
        if !all_once {
            return None;
        }
        let targets: Vec<&LagrangianLabel> = constituents.iter().map(|(l, _)| l).collect();
        all_labels(&primes)
            .into_iter()
            .filter(|line| line.iter().any(|&x| x != 0))
            .map(|line| LagrangianLabel {
                line,
                central: vec![0; primes.len()],
            })
            .find(|mu| {
                let mut cur = base.clone();
                let mut orbit = Vec::new();
                for _ in 0..dim {
                    orbit.push(cur.clone());
                    cur = cur.times(mu, &primes);
                }
                orbit.sort();
                orbit.dedup();
                orbit.len() as u64 == dim && orbit.iter().all(|o| targets.contains(&o))
            })
    });
    Ok(LagrangianDecomposition {
        constituents,
        base,
        mu,
    })
}
