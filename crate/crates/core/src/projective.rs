//! Monomial models of representations and the strong/weak projective equivalences.
//!
//! Strong equivalence of irreducibles `rho, rho'` means `x^-1 rho(g) x = lambda(g) rho'(g)` for a
//! single `x`; comparing `x^-1 rho(gh) x` with the product shows `lambda` is multiplicative, so
//! for irreducibles this is the same as `chi' = lambda . chi` for a linear character `lambda`.
//! Weak equivalence asks this elementwise only, which for finite-order matrices is equality of
//! eigenvalue multisets up to a root of unity of the ambient modulus.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::char_theory::{
    extend_to_lagrangian, inner_product, linear_characters, CentralCharacter, CharError, ClassFunction, Domain,
    LinearCharacter, LinearLabel,
};
use crate::cyclo::{Cyclotomic, Modulus};
use crate::group::{FiniteGroup, GroupInvolution, Lagrangian, Subgroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjError {
    #[error("representations live on different groups: {0} vs {1}")]
    GroupMismatch(String, String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("expected {expected} generator images, got {got}")]
    GeneratorCount { expected: usize, got: usize },
    #[error("generator image {0} is not a {1}x{1} monomial matrix")]
    BadMatrix(usize, usize),
    #[error("generator images violate the relation {0}")]
    Relation(String),
    #[error("character value {0} is not a root of unity")]
    NotLinear(String),
    #[error("representation {0} is not irreducible (<chi,chi> = {1})")]
    NotIrreducible(usize, String),
    #[error("eigenvalues of the image of {0} are not {1}-th roots of unity")]
    EigenOutsideModulus(String, u64),
    #[error("representations {0} and {1} are not weakly equivalent")]
    NotWeaklyEquivalent(usize, usize),
    #[error(transparent)]
    Char(#[from] CharError),
}

/// `M e_j = z_N^{phase[j]} e_{perm[j]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialMatrix {
    perm: Vec<usize>,
    phase: Vec<u64>,
}

impl MonomialMatrix {
    pub fn new(perm: Vec<usize>, phase: Vec<u64>, n: u64) -> Option<Self> {
        let dim = perm.len();
        if phase.len() != dim {
            return None;
        }
        let mut seen = vec![false; dim];
        for &i in &perm {
            if i >= dim || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(MonomialMatrix {
            perm,
            phase: phase.into_iter().map(|k| k % n).collect(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        MonomialMatrix {
            perm: (0..dim).collect(),
            phase: vec![0; dim],
        }
    }

    /// `z_N^k . I`.
    pub fn scalar(dim: usize, k: u64) -> Self {
        MonomialMatrix {
            perm: (0..dim).collect(),
            phase: vec![k; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phases(&self) -> &[u64] {
        &self.phase
    }

    /// `self * other`.
    pub fn mul(&self, other: &MonomialMatrix, n: u64) -> MonomialMatrix {
        let dim = self.dim();
        let mut perm = vec![0; dim];
        let mut phase = vec![0; dim];
        for j in 0..dim {
            let mid = other.perm[j];
            perm[j] = self.perm[mid];
            phase[j] = (other.phase[j] + self.phase[mid]) % n;
        }
        MonomialMatrix { perm, phase }
    }

    pub fn inverse(&self, n: u64) -> MonomialMatrix {
        let dim = self.dim();
        let mut perm = vec![0; dim];
        let mut phase = vec![0; dim];
        for j in 0..dim {
            perm[self.perm[j]] = j;
            phase[self.perm[j]] = (n - self.phase[j]) % n;
        }
        MonomialMatrix { perm, phase }
    }

    pub fn pow(&self, e: u64, n: u64) -> MonomialMatrix {
        let mut acc = MonomialMatrix::identity(self.dim());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, n);
            }
            base = base.mul(&base, n);
            e >>= 1;
        }
        acc
    }

    pub fn trace(&self, modulus: &Modulus) -> Cyclotomic {
        let terms = (0..self.dim())
            .filter(|&j| self.perm[j] == j)
            .map(|j| (self.phase[j], BigRational::one()));
        Cyclotomic::from_terms(modulus, terms)
    }

    /// Entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize, modulus: &Modulus) -> Cyclotomic {
        if self.perm[j] == i {
            Cyclotomic::root(modulus, self.phase[j])
        } else {
            Cyclotomic::zero(modulus)
        }
    }

    /// Permutation cycles as `(length, phase sum mod N)`.
    pub fn cycles(&self, n: u64) -> Vec<(u64, u64)> {
        let dim = self.dim();
        let mut seen = vec![false; dim];
        let mut out = Vec::new();
        for start in 0..dim {
            if seen[start] {
                continue;
            }
            let (mut len, mut sum, mut j) = (0u64, 0u64, start);
            while !seen[j] {
                seen[j] = true;
                len += 1;
                sum = (sum + self.phase[j]) % n;
                j = self.perm[j];
            }
            out.push((len, sum));
        }
        out
    }

    /// Sorted exponents `k` of the eigenvalues `z_N^k`: a `len`-cycle with phase sum `w`
    /// contributes the solutions of `len . k = w (mod N)`. `None` if some eigenvalue is not an
    /// `N`-th root of unity.
    pub fn eigen_exponents(&self, n: u64) -> Option<Vec<u64>> {
        let mut out = Vec::with_capacity(self.dim());
        for (len, w) in self.cycles(n) {
            if !n.is_multiple_of(len) || w % len != 0 {
                return None;
            }
            let step = n / len;
            out.extend((0..len).map(|t| (w / len + t * step) % n));
        }
        out.sort_unstable();
        Some(out)
    }
}

impl fmt::Display for MonomialMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self
            .perm
            .iter()
            .zip(&self.phase)
            .enumerate()
            .map(|(j, (i, k))| format!("{j}->{i}:z^{k}"))
            .collect();
        write!(f, "[{}]", cols.join(" "))
    }
}

/// A representation of a Heisenberg product by monomial matrices, stored by its images of the
/// generators `x_0, y_0, x_1, y_1, ...`; other images come from `(a,b,c) = x^a y^b z^{c-ab}`.
#[derive(Clone, Debug)]
pub struct MonomialRep {
    group: Arc<FiniteGroup>,
    modulus: Modulus,
    dim: usize,
    gens: Vec<MonomialMatrix>,
    /// `z_i = x_i y_i x_i^-1 y_i^-1`
    centers: Vec<MonomialMatrix>,
}

impl MonomialRep {
    /// Validates the defining relations of `prod H_{p_i}` on the generator images.
    pub fn from_generators(group: &Arc<FiniteGroup>, gens: Vec<MonomialMatrix>) -> Result<Self, ProjError> {
        let r = group.factor_count();
        if gens.len() != 2 * r {
            return Err(ProjError::GeneratorCount {
                expected: 2 * r,
                got: gens.len(),
            });
        }
        let dim = gens[0].dim();
        if let Some(k) = gens.iter().position(|m| m.dim() != dim || dim == 0) {
            return Err(ProjError::BadMatrix(k, dim));
        }
        let modulus = Modulus::new(group.modulus()).expect("group modulus is valid");
        let n = modulus.value();
        let centers: Vec<MonomialMatrix> = (0..r)
            .map(|i| {
                let (x, y) = (&gens[2 * i], &gens[2 * i + 1]);
                x.mul(y, n).mul(&x.inverse(n), n).mul(&y.inverse(n), n)
            })
            .collect();
        let id = MonomialMatrix::identity(dim);
        let commute = |a: &MonomialMatrix, b: &MonomialMatrix| a.mul(b, n) == b.mul(a, n);
        for (i, &p) in group.primes().iter().enumerate() {
            let (x, y, z) = (&gens[2 * i], &gens[2 * i + 1], &centers[i]);
            if x.pow(p, n) != id || y.pow(p, n) != id {
                return Err(ProjError::Relation(format!("x_{i}^{p} = y_{i}^{p} = 1")));
            }
            if !commute(z, x) || !commute(z, y) {
                return Err(ProjError::Relation(format!("z_{i} central")));
            }
            for j in 0..i {
                for a in [&gens[2 * i], &gens[2 * i + 1]] {
                    for b in [&gens[2 * j], &gens[2 * j + 1]] {
                        if !commute(a, b) {
                            return Err(ProjError::Relation(format!("factors {j} and {i} commute")));
                        }
                    }
                }
            }
        }
        Ok(MonomialRep {
            group: group.clone(),
            modulus,
            dim,
            gens,
            centers,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator_images(&self) -> &[MonomialMatrix] {
        &self.gens
    }

    /// The image of an element.
    pub fn image(&self, idx: usize) -> MonomialMatrix {
        let n = self.modulus.value();
        let mut acc = MonomialMatrix::identity(self.dim);
        for (i, ((a, b, c), &p)) in self.group.triples(idx).into_iter().zip(self.group.primes()).enumerate() {
            let zc = (c + p * p - (a * b) % p) % p;
            let part = self.gens[2 * i]
                .pow(a, n)
                .mul(&self.gens[2 * i + 1].pow(b, n), n)
                .mul(&self.centers[i].pow(zc, n), n);
            acc = acc.mul(&part, n);
        }
        acc
    }

    /// Trace of the image on every conjugacy class.
    pub fn character(&self) -> ClassFunction {
        ClassFunction::from_fn(Domain::Group(self.group.clone()), |g| self.image(g).trace(&self.modulus))
            .expect("traces lie in the group modulus")
    }

    /// `g -> rho(sigma(g))`.
    pub fn twist(&self, sigma: &GroupInvolution) -> Result<MonomialRep, ProjError> {
        self.check_group(sigma.group())?;
        let gens = self.group.generators().iter().map(|&s| self.image(sigma.apply_idx(s))).collect();
        MonomialRep::from_generators(&self.group, gens)
    }

    /// `rho (x) lambda` for a linear character.
    pub fn tensor_linear(&self, lambda: &LinearLabel) -> MonomialRep {
        let n = self.modulus.value();
        let gens = self
            .group
            .generators()
            .iter()
            .zip(&self.gens)
            .map(|(&s, m)| m.mul(&MonomialMatrix::scalar(self.dim, lambda.exponent_at(&self.group, s)), n))
            .collect();
        MonomialRep::from_generators(&self.group, gens).expect("twisting by a character keeps the relations")
    }

    pub fn direct_sum(&self, other: &MonomialRep) -> Result<MonomialRep, ProjError> {
        self.check_group(&other.group)?;
        let gens = self
            .gens
            .iter()
            .zip(&other.gens)
            .map(|(a, b)| {
                let mut perm = a.perm.clone();
                perm.extend(b.perm.iter().map(|&i| i + self.dim));
                let mut phase = a.phase.clone();
                phase.extend(&b.phase);
                MonomialMatrix { perm, phase }
            })
            .collect();
        MonomialRep::from_generators(&self.group, gens)
    }

    fn check_group(&self, other: &FiniteGroup) -> Result<(), ProjError> {
        if *self.group != *other {
            return Err(ProjError::GroupMismatch(self.group.name(), other.name()));
        }
        Ok(())
    }

    /// Sorted eigen-exponents of the image of `idx`.
    pub fn eigen_exponents(&self, idx: usize) -> Result<Vec<u64>, ProjError> {
        self.image(idx)
            .eigen_exponents(self.modulus.value())
            .ok_or_else(|| ProjError::EigenOutsideModulus(self.group.element(idx).to_string(), self.modulus.value()))
    }
}

/// Monomial model of `Ind_K^G(chi)` on the left cosets of `K`, for a linear character `chi` of `K`.
pub fn realize_induced(sub: &Arc<Subgroup>, chi: &ClassFunction) -> Result<MonomialRep, ProjError> {
    let g = sub.parent();
    match chi.domain() {
        Domain::Subgroup(s) if **s == **sub => {}
        other => return Err(CharError::DomainMismatch(other.name(), format!("{:?}", sub.kind())).into()),
    }
    let mut exponent = vec![0u64; g.order()];
    for &m in sub.members() {
        let v = chi.value_at(m).expect("member of the subgroup");
        exponent[m] = v.as_root_of_unity().ok_or_else(|| ProjError::NotLinear(v.to_string()))?;
    }
    let (reps, coset_of) = sub.left_cosets();
    let gens = g
        .generators()
        .into_iter()
        .map(|s| {
            let mut perm = vec![0; reps.len()];
            let mut phase = vec![0; reps.len()];
            for (j, &r) in reps.iter().enumerate() {
                let moved = g.mul_idx(s, r);
                let i = coset_of[moved] as usize;
                let h = g.mul_idx(g.inv_idx(reps[i]), moved);
                perm[j] = i;
                phase[j] = exponent[h];
            }
            MonomialMatrix { perm, phase }
        })
        .collect();
    // a non-multiplicative chi shows up as a violated relation here
    MonomialRep::from_generators(g, gens)
}

/// `I_chi = Ind_L(chi~)` on a chosen Lagrangian.
pub fn realize_regular(
    group: &Arc<FiniteGroup>,
    which: Lagrangian,
    chi: &CentralCharacter,
) -> Result<MonomialRep, ProjError> {
    let lag = Arc::new(Subgroup::lagrangian(group, which));
    realize_induced(&lag, &extend_to_lagrangian(&lag, chi)?)
}

/// Every regular central character of the group, in lexicographic order of exponents.
pub fn regular_central_characters(group: &FiniteGroup) -> Vec<CentralCharacter> {
    let mut out = vec![vec![]];
    for &p in group.primes() {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u64>| {
                (1..p).map(move |e| {
                    let mut v = prefix.clone();
                    v.push(e);
                    v
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|e| CentralCharacter::new(group.primes(), &e).expect("exponents in range"))
        .collect()
}

/// Monomial models of all fully regular irreducibles, induced from `L = {a = 0}`.
pub fn regular_representations(group: &Arc<FiniteGroup>) -> Result<Vec<(CentralCharacter, MonomialRep)>, ProjError> {
    let lag = Arc::new(Subgroup::lagrangian(group, Lagrangian::A0));
    regular_central_characters(group)
        .into_iter()
        .map(|chi| {
            let rep = realize_induced(&lag, &extend_to_lagrangian(&lag, &chi)?)?;
            Ok((chi, rep))
        })
        .collect()
}

/// Direct sum of linear characters as a diagonal representation.
pub fn diagonal(group: &Arc<FiniteGroup>, labels: &[LinearLabel]) -> Result<MonomialRep, ProjError> {
    let gens = group
        .generators()
        .into_iter()
        .map(|s| MonomialMatrix {
            perm: (0..labels.len()).collect(),
            phase: labels.iter().map(|l| l.exponent_at(group, s)).collect(),
        })
        .collect();
    MonomialRep::from_generators(group, gens)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceVerdict {
    pub strong: bool,
    pub weak: bool,
    /// `lambda` with `chi' = lambda . chi`, when strongly equivalent.
    pub witness: Option<LinearLabel>,
}

/// Shared data for repeated comparisons on one group.
pub struct EquivalenceContext {
    group: Arc<FiniteGroup>,
    linear: Vec<LinearCharacter>,
}

impl EquivalenceContext {
    pub fn new(group: &Arc<FiniteGroup>) -> Self {
        EquivalenceContext {
            group: group.clone(),
            linear: linear_characters(group),
        }
    }

    fn check_pair(&self, a: &MonomialRep, b: &MonomialRep) -> Result<(), ProjError> {
        a.check_group(&self.group)?;
        b.check_group(&self.group)?;
        if a.dim != b.dim {
            return Err(ProjError::DimensionMismatch(a.dim, b.dim));
        }
        Ok(())
    }

    fn require_irreducible(chi: &ClassFunction, which: usize) -> Result<(), ProjError> {
        let norm = inner_product(chi, chi)?;
        if !norm.is_one() {
            return Err(ProjError::NotIrreducible(which, norm.to_string()));
        }
        Ok(())
    }

    /// The linear `lambda` with `chi_b = lambda . chi_a`, if any. Both must be irreducible.
    pub fn strong_witness_chars(&self, a: &ClassFunction, b: &ClassFunction) -> Result<Option<LinearLabel>, ProjError> {
        Self::require_irreducible(a, 0)?;
        Self::require_irreducible(b, 1)?;
        Ok(self.twist_witness(a, b))
    }

    fn twist_witness(&self, a: &ClassFunction, b: &ClassFunction) -> Option<LinearLabel> {
        self.linear
            .iter()
            .find(|lc| {
                a.values()
                    .iter()
                    .zip(b.values())
                    .zip(lc.character.values())
                    .all(|((x, y), l)| (x.is_zero() && y.is_zero()) || &(x * l) == y)
            })
            .map(|lc| lc.label.clone())
    }

    pub fn strongly_equivalent(&self, a: &MonomialRep, b: &MonomialRep) -> Result<Option<LinearLabel>, ProjError> {
        self.check_pair(a, b)?;
        self.strong_witness_chars(&a.character(), &b.character())
    }

    /// Eigenvalue multisets agree up to a common root of unity at every class representative.
    pub fn weakly_equivalent(&self, a: &MonomialRep, b: &MonomialRep) -> Result<bool, ProjError> {
        self.check_pair(a, b)?;
        let n = a.modulus.value();
        for &g in &self.group.classes().reps {
            let ea = a.eigen_exponents(g)?;
            let eb = b.eigen_exponents(g)?;
            if !shift_equal(&ea, &eb, n) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn compare(&self, a: &MonomialRep, b: &MonomialRep) -> Result<EquivalenceVerdict, ProjError> {
        let witness = self.strongly_equivalent(a, b)?;
        let weak = self.weakly_equivalent(a, b)?;
        debug_assert!(witness.is_none() || weak, "strong implies weak");
        Ok(EquivalenceVerdict {
            strong: witness.is_some(),
            weak,
            witness,
        })
    }

    /// Number of strong classes among pairwise weakly equivalent irreducibles.
    pub fn count_strong_classes_in_weak_class(&self, reps: &[MonomialRep]) -> Result<usize, ProjError> {
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                if !self.weakly_equivalent(&reps[i], &reps[j])? {
                    return Err(ProjError::NotWeaklyEquivalent(i, j));
                }
            }
        }
        let chars: Vec<ClassFunction> = reps.iter().map(MonomialRep::character).collect();
        for (i, c) in chars.iter().enumerate() {
            Self::require_irreducible(c, i)?;
        }
        // class representatives found so far; strong equivalence is an equivalence relation
        let mut class_reps: Vec<usize> = Vec::new();
        for i in 0..chars.len() {
            if !class_reps.iter().any(|&r| self.twist_witness(&chars[r], &chars[i]).is_some()) {
                class_reps.push(i);
            }
        }
        Ok(class_reps.len())
    }
}

/// `b = a + s (mod n)` as multisets for some `s`.
fn shift_equal(a: &[u64], b: &[u64], n: u64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(&b0) = b.first() else {
        return true;
    };
    let mut candidates: Vec<u64> = a.iter().map(|&x| (b0 + n - x) % n).collect();
    candidates.dedup();
    candidates.into_iter().any(|s| {
        let mut shifted: Vec<u64> = a.iter().map(|&x| (x + s) % n).collect();
        shifted.sort_unstable();
        shifted == b
    })
}

pub fn strongly_equivalent(a: &MonomialRep, b: &MonomialRep) -> Result<Option<LinearLabel>, ProjError> {
    EquivalenceContext::new(&a.group).strongly_equivalent(a, b)
}

pub fn weakly_equivalent(a: &MonomialRep, b: &MonomialRep) -> Result<bool, ProjError> {
    EquivalenceContext::new(&a.group).weakly_equivalent(a, b)
}

pub fn compare(a: &MonomialRep, b: &MonomialRep) -> Result<EquivalenceVerdict, ProjError> {
    EquivalenceContext::new(&a.group).compare(a, b)
}

pub fn count_strong_classes_in_weak_class(reps: &[MonomialRep]) -> Result<usize, ProjError> {
    let Some(first) = reps.first() else {
        return Ok(0);
    };
    EquivalenceContext::new(&first.group).count_strong_classes_in_weak_class(reps)
}

/// Exact characteristic polynomial `det(t I - M)` from the cycle structure: a `k`-cycle with
/// entry product `w` contributes `t^k - w`. Coefficients are listed from `t^0` upward.
pub fn characteristic_polynomial(m: &MonomialMatrix, modulus: &Modulus) -> Vec<Cyclotomic> {
    let n = modulus.value();
    let mut poly = vec![Cyclotomic::one(modulus)];
    for (len, w) in m.cycles(n) {
        let len = len as usize;
        let mut next = vec![Cyclotomic::zero(modulus); poly.len() + len];
        let minus_w = -Cyclotomic::root(modulus, w);
        for (i, c) in poly.iter().enumerate() {
            next[i + len] += c;
            next[i] += &(c * &minus_w);
        }
        poly = next;
    }
    poly
}

/// `p(t) -> p(lambda t)` for `lambda = z_N^s`.
pub fn rescale_polynomial(poly: &[Cyclotomic], s: u64, modulus: &Modulus) -> Vec<Cyclotomic> {
    let n = modulus.value();
    poly.iter()
        .enumerate()
        .map(|(i, c)| c * &Cyclotomic::root(modulus, (s * i as u64) % n))
        .collect()
}

/// Weak equivalence decided on characteristic polynomials: at every class there is `s` with
/// `det(t - rho'(g)) = z^{-s d} det(z^s t - rho(g))`.
pub fn weakly_equivalent_by_polynomials(a: &MonomialRep, b: &MonomialRep) -> Result<bool, ProjError> {
    a.check_group(&b.group)?;
    if a.dim != b.dim {
        return Err(ProjError::DimensionMismatch(a.dim, b.dim));
    }
    let modulus = &a.modulus;
    let n = modulus.value();
    let d = a.dim as u64;
    for &g in &a.group.classes().reps {
        let pa = characteristic_polynomial(&a.image(g), modulus);
        let pb = characteristic_polynomial(&b.image(g), modulus);
        // eigenvalues of b are z^s times those of a  <=>  pb(t) = z^{sd} pa(z^-s t)
        let found = (0..n).any(|s| {
            let inv = (n - s) % n;
            let scaled: Vec<Cyclotomic> = rescale_polynomial(&pa, inv, modulus)
                .iter()
                .map(|c| c * &Cyclotomic::root(modulus, (s * d) % n))
                .collect();
            scaled == pb
        });
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::char_theory::{induce, irreducible_characters, lagrangian_characters};
    use crate::group::InvolutionKind;

    fn h(primes: &[u64]) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::from_primes(primes).unwrap())
    }

    fn reg(g: &Arc<FiniteGroup>, e: &[u64]) -> MonomialRep {
        realize_regular(g, Lagrangian::A0, &CentralCharacter::new(g.primes(), e).unwrap()).unwrap()
    }

    #[test]
    fn monomial_matrix_algebra() {
        let n = 3;
        let a = MonomialMatrix::new(vec![1, 2, 0], vec![0, 1, 2], n).unwrap();
        assert_eq!(a.mul(&a.inverse(n), n), MonomialMatrix::identity(3));
        assert_eq!(a.pow(3, n), MonomialMatrix::scalar(3, 0));
        assert!(MonomialMatrix::new(vec![0, 0], vec![0, 0], n).is_none());
        assert_eq!(a.eigen_exponents(n), Some(vec![0, 1, 2]));
        let d = MonomialMatrix::new(vec![0, 1], vec![1, 1], 15).unwrap();
        assert_eq!(d.eigen_exponents(15), Some(vec![1, 1]));
        // a 2-cycle has square roots that are not 15th roots of unity
        let s = MonomialMatrix::new(vec![1, 0], vec![0, 0], 15).unwrap();
        assert_eq!(s.eigen_exponents(15), None);
    }

    #[test]
    fn traces_match_induced_characters() {
        for p in [3u64, 5] {
            let g = h(&[p]);
            for which in [Lagrangian::A0, Lagrangian::B0] {
                let lag = Arc::new(Subgroup::lagrangian(&g, which));
                for (_, chi) in lagrangian_characters(&lag).unwrap() {
                    let rep = realize_induced(&lag, &chi).unwrap();
                    assert_eq!(rep.dim(), p as usize);
                    assert_eq!(rep.character(), induce(&lag, &chi).unwrap());
                }
            }
        }
    }

    #[test]
    fn images_are_a_homomorphism() {
        for primes in [&[3u64][..], &[3, 3]] {
            let g = h(primes);
            let e: Vec<u64> = primes.iter().map(|_| 1).collect();
            let rep = reg(&g, &e);
            let n = rep.modulus().value();
            let images: Vec<MonomialMatrix> = (0..g.order()).map(|x| rep.image(x)).collect();
            for x in 0..g.order() {
                for y in 0..g.order() {
                    assert_eq!(images[g.mul_idx(x, y)], images[x].mul(&images[y], n));
                }
            }
        }
    }

    #[test]
    fn central_and_generator_images() {
        let g = h(&[3]);
        let rep = reg(&g, &[1]);
        assert_eq!(rep.image(g.z_gen(0)), MonomialMatrix::scalar(3, 1));
        let lag = Arc::new(Subgroup::lagrangian(&g, Lagrangian::A0));
        let triv = extend_to_lagrangian(&lag, &CentralCharacter::trivial(&[3])).unwrap();
        let x = realize_induced(&lag, &triv).unwrap().image(g.x_gen(0));
        assert!(x.phases().iter().all(|&k| k == 0));
        assert_eq!(x.cycles(3), vec![(3, 0)]);
    }

    #[test]
    fn bad_generators_rejected() {
        let g = h(&[3]);
        let swap = MonomialMatrix::new(vec![1, 0], vec![0, 0], 3).unwrap();
        let id = MonomialMatrix::identity(2);
        assert!(matches!(
            MonomialRep::from_generators(&g, vec![swap, id.clone()]),
            Err(ProjError::Relation(_))
        ));
        assert!(matches!(
            MonomialRep::from_generators(&g, vec![id]),
            Err(ProjError::GeneratorCount { .. })
        ));
    }

    #[test]
    fn the_two_regular_irreducibles_of_h3() {
        let g = h(&[3]);
        let (a, b) = (reg(&g, &[1]), reg(&g, &[2]));
        let v = compare(&a, &b).unwrap();
        assert!(!v.strong && v.weak);
        let v = compare(&a, &a).unwrap();
        assert!(v.strong && v.weak);
        assert!(v.witness.unwrap().is_trivial());
        for lc in linear_characters(&g) {
            let twisted = a.tensor_linear(&lc.label);
            let v = compare(&a, &twisted).unwrap();
            assert!(v.strong);
            let w = v.witness.unwrap();
            assert_eq!(twisted.character(), a.character().mul(&linear_characters(&g).into_iter().find(|l| l.label == w).unwrap().character).unwrap());
        }
    }

    #[test]
    fn irreducible_against_sum_of_linears() {
        let g = h(&[3]);
        let a = reg(&g, &[1]);
        let lin: Vec<LinearLabel> = linear_characters(&g).into_iter().take(3).map(|l| l.label).collect();
        let d = diagonal(&g, &lin).unwrap();
        let ctx = EquivalenceContext::new(&g);
        assert!(!ctx.weakly_equivalent(&a, &d).unwrap());
        assert!(!weakly_equivalent_by_polynomials(&a, &d).unwrap());
        assert!(matches!(ctx.strongly_equivalent(&a, &d), Err(ProjError::NotIrreducible(1, _))));
    }

    #[test]
    fn polynomial_and_multiset_routes_agree() {
        for primes in [&[3u64][..], &[5]] {
            let g = h(primes);
            let ctx = EquivalenceContext::new(&g);
            let reps: Vec<MonomialRep> = regular_representations(&g).unwrap().into_iter().map(|(_, r)| r).collect();
            let lin = linear_characters(&g);
            let mut others = reps.clone();
            others.push(reps[0].direct_sum(&reg(&g, &[primes[0] - 1])).unwrap());
            others.push(diagonal(&g, &lin.iter().take(primes[0] as usize).map(|l| l.label.clone()).collect::<Vec<_>>()).unwrap());
            for a in &reps {
                for b in &others {
                    if a.dim() != b.dim() {
                        continue;
                    }
                    assert_eq!(ctx.weakly_equivalent(a, b).unwrap(), weakly_equivalent_by_polynomials(a, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn weak_equivalence_ignores_linear_twists() {
        let g = h(&[3]);
        let ctx = EquivalenceContext::new(&g);
        let (a, b) = (reg(&g, &[1]), reg(&g, &[2]));
        for lc in linear_characters(&g) {
            assert!(ctx.weakly_equivalent(&a, &b.tensor_linear(&lc.label)).unwrap());
        }
    }

    #[test]
    fn strong_classes_in_the_regular_weak_class() {
        for (primes, expected) in [(&[3u64][..], 2), (&[5], 4), (&[3, 3], 4)] {
            let g = h(primes);
            let reps: Vec<MonomialRep> = regular_representations(&g).unwrap().into_iter().map(|(_, r)| r).collect();
            assert_eq!(count_strong_classes_in_weak_class(&reps).unwrap(), expected);
        }
        let g = h(&[3]);
        let a = reg(&g, &[1]);
        let lin: Vec<LinearLabel> = linear_characters(&g).into_iter().take(3).map(|l| l.label).collect();
        let d = diagonal(&g, &lin).unwrap();
        assert_eq!(
            count_strong_classes_in_weak_class(&[a, d]),
            Err(ProjError::NotWeaklyEquivalent(0, 1))
        );
    }

    #[test]
    fn two_lagrangian_models_are_strongly_equivalent() {
        let g = h(&[5]);
        for e in 1..5 {
            let chi = CentralCharacter::new(&[5], &[e]).unwrap();
            let a = realize_regular(&g, Lagrangian::A0, &chi).unwrap();
            let b = realize_regular(&g, Lagrangian::B0, &chi).unwrap();
            assert_eq!(a.character(), b.character());
            assert!(compare(&a, &b).unwrap().strong);
        }
    }

    #[test]
    fn twisting_by_involutions() {
        let g = h(&[3]);
        let a = reg(&g, &[1]);
        let inv = GroupInvolution::new(&g, InvolutionKind::InversionType).unwrap();
        let t = a.twist(&inv).unwrap();
        assert_eq!(t.character(), reg(&g, &[2]).character());
        let irr = irreducible_characters(&g).unwrap();
        assert!(irr.iter().any(|i| i.character == t.character()));
    }

    fn dense(m: &MonomialMatrix, n: u64) -> nalgebra::DMatrix<nalgebra::Complex<f64>> {
        let d = m.dim();
        let mut out = nalgebra::DMatrix::zeros(d, d);
        for j in 0..d {
            let angle = 2.0 * std::f64::consts::PI * m.phases()[j] as f64 / n as f64;
            out[(m.perm()[j], j)] = nalgebra::Complex::from_polar(1.0, angle);
        }
        out
    }

    /// Some scalars `c_s` on the generators admit a non-zero `X` with `a(s) X = c_s X b(s)`.
    /// Non-zero intertwiners between irreducibles are invertible, so this is projective
    /// conjugacy. Decided by the rank of the stacked linear system.
    fn projective_conjugacy_search(a: &MonomialRep, b: &MonomialRep) -> bool {
        use nalgebra::{Complex, DMatrix};
        let n = a.modulus().value();
        let d = a.dim();
        let gens: Vec<(DMatrix<Complex<f64>>, DMatrix<Complex<f64>>)> = a
            .generator_images()
            .iter()
            .zip(b.generator_images())
            .map(|(ma, mb)| (dense(ma, n), dense(mb, n)))
            .collect();
        let choices = (n as usize).pow(gens.len() as u32);
        (0..choices).any(|code| {
            let mut system = DMatrix::<Complex<f64>>::zeros(gens.len() * d * d, d * d);
            let mut c = code;
            for (k, (ma, mb)) in gens.iter().enumerate() {
                let angle = 2.0 * std::f64::consts::PI * (c % n as usize) as f64 / n as f64;
                c /= n as usize;
                let scalar = Complex::from_polar(1.0, angle);
                // row (i, j) of a X - c X b, unknown X[(r, t)] at column r * d + t
                for i in 0..d {
                    for j in 0..d {
                        let row = k * d * d + i * d + j;
                        for r in 0..d {
                            system[(row, r * d + j)] += ma[(i, r)];
                            system[(row, i * d + r)] -= scalar * mb[(r, j)];
                        }
                    }
                }
            }
            let sv = system.singular_values();
            sv.iter().filter(|s| **s > 1e-8).count() < d * d
        })
    }

    #[test]
    fn twist_test_agrees_with_projective_conjugacy_search() {
        let g = h(&[3]);
        let ctx = EquivalenceContext::new(&g);
        let mut reps = Vec::new();
        for e in 1..3 {
            let base = reg(&g, &[e]);
            for lc in linear_characters(&g).iter().step_by(4) {
                reps.push(base.tensor_linear(&lc.label));
            }
            let chi = CentralCharacter::new(&[3], &[e]).unwrap();
            reps.push(realize_regular(&g, Lagrangian::B0, &chi).unwrap());
        }
        for a in &reps {
            for b in &reps {
                let strong = ctx.strongly_equivalent(a, b).unwrap().is_some();
                assert_eq!(strong, projective_conjugacy_search(a, b));
            }
        }
    }
}
