//! Finite products of Heisenberg groups `H_p` of upper unitriangular 3x3 matrices over `F_p`,
//! together with their centers, Lagrangian subgroups and involutive automorphisms.
//!
//! An element of `H = prod_i H_{p_i}` is a flat vector `(a_1, b_1, c_1, a_2, b_2, c_2, ...)`;
//! the triple `(a, b, c)` stands for the matrix `[[1, a, c], [0, 1, b], [0, 0, 1]]`, so the
//! product rule is `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`. Elements are also addressed by
//! a dense index in `0..|H|`, which is what the enumeration code works with.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{is_prime, neg_mod};

/// Refuse to enumerate anything larger than this.
pub const MAX_ORDER: usize = 4_000_000;

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("a product of groups needs at least one factor")]
    EmptyProduct,
    #[error("group order {0} exceeds the enumeration limit")]
    TooLarge(u128),
    #[error("element does not belong to the group: {0}")]
    BadElement(String),
    #[error("subgroup element list is not closed under multiplication or misses the identity")]
    NotASubgroup,
    #[error("switching involution needs a group of the form H x H with matching prime lists")]
    SwitchingShape,
    #[error("map is not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("map is not an involution: sigma(sigma(x)) != x for x = {0}")]
    NotInvolution(String),
}

/// An element as per-factor residue triples.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn new(coords: Vec<u64>) -> Self {
        GroupElement { coords }
    }

    /// Flat `(a_1, b_1, c_1, ...)` coordinates.
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn triple(&self, factor: usize) -> (u64, u64, u64) {
        let t = &self.coords[3 * factor..3 * factor + 3];
        (t[0], t[1], t[2])
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .chunks(3)
            .map(|t| format!("({},{},{})", t[0], t[1], t[2]))
            .collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Conjugacy classes of a group or subgroup, addressed by ambient element index.
#[derive(Clone, Debug)]
pub struct ConjugacyClasses {
    /// Smallest element index in each class; classes are sorted by it.
    pub reps: Vec<usize>,
    pub sizes: Vec<usize>,
    /// Class number of each ambient element, `u32::MAX` outside the domain.
    class_of: Vec<u32>,
}

impl ConjugacyClasses {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn class_of(&self, idx: usize) -> Option<usize> {
        match self.class_of.get(idx) {
            Some(&c) if c != NONE => Some(c as usize),
            _ => None,
        }
    }

    /// Orbit closure of `members` under conjugation by `conjugators`.
    fn by_orbit_closure(group: &FiniteGroup, members: &[usize], conjugators: &[usize]) -> Self {
        let mut class_of = vec![NONE; group.order()];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        let inverses: Vec<usize> = conjugators.iter().map(|&g| group.inv_idx(g)).collect();
        for &start in members {
            if class_of[start] != NONE {
                continue;
            }
            let id = reps.len() as u32;
            class_of[start] = id;
            let mut queue = VecDeque::from([start]);
            let mut size = 0;
            let mut min = start;
            while let Some(x) = queue.pop_front() {
                size += 1;
                min = min.min(x);
                for (&g, &gi) in conjugators.iter().zip(&inverses) {
                    let y = group.mul_idx(group.mul_idx(g, x), gi);
                    if class_of[y] == NONE {
                        class_of[y] = id;
                        queue.push_back(y);
                    }
                }
            }
            reps.push(min);
            sizes.push(size);
        }
        // sort classes by representative
        let mut order: Vec<usize> = (0..reps.len()).collect();
        order.sort_by_key(|&i| reps[i]);
        let mut renumber = vec![0u32; reps.len()];
        for (new, &old) in order.iter().enumerate() {
            renumber[old] = new as u32;
        }
        for c in class_of.iter_mut().filter(|c| **c != NONE) {
            *c = renumber[*c as usize];
        }
        ConjugacyClasses {
            reps: order.iter().map(|&i| reps[i]).collect(),
            sizes: order.iter().map(|&i| sizes[i]).collect(),
            class_of,
        }
    }
}

/// `prod_i H_{p_i}` for a list of odd primes (repeats allowed).
pub struct FiniteGroup {
    primes: Vec<u64>,
    /// Mixed-radix stride of each factor's digit `a*p^2 + b*p + c`.
    strides: Vec<usize>,
    order: usize,
    modulus: u64,
    classes: ConjugacyClasses,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({})", self.name())
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.primes == other.primes
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    pub fn heisenberg(p: u64) -> Result<Self, GroupError> {
        Self::from_primes(&[p])
    }

    pub fn product(factors: &[FiniteGroup]) -> Result<Self, GroupError> {
        if factors.is_empty() {
            return Err(GroupError::EmptyProduct);
        }
        let primes: Vec<u64> = factors.iter().flat_map(|g| g.primes.iter().copied()).collect();
        Self::from_primes(&primes)
    }

    pub fn from_primes(primes: &[u64]) -> Result<Self, GroupError> {
        if primes.is_empty() {
            return Err(GroupError::EmptyProduct);
        }
        if let Some(&p) = primes.iter().find(|&&p| p == 2 || !is_prime(p)) {
            return Err(GroupError::NotOddPrime(p));
        }
        let order: u128 = primes.iter().map(|&p| (p as u128).pow(3)).product();
        if order > MAX_ORDER as u128 {
            return Err(GroupError::TooLarge(order));
        }
        let mut strides = vec![0usize; primes.len()];
        let mut s = 1usize;
        for i in (0..primes.len()).rev() {
            strides[i] = s;
            s *= (primes[i] as usize).pow(3);
        }
        let mut distinct = primes.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let mut group = FiniteGroup {
            primes: primes.to_vec(),
            strides,
            order: order as usize,
            modulus: distinct.iter().product(),
            classes: ConjugacyClasses {
                reps: vec![],
                sizes: vec![],
                class_of: vec![],
            },
        };
        let all: Vec<usize> = (0..group.order).collect();
        group.classes = ConjugacyClasses::by_orbit_closure(&group, &all, &group.generators());
        Ok(group)
    }

    pub fn name(&self) -> String {
        self.primes
            .iter()
            .map(|p| format!("H_{p}"))
            .collect::<Vec<_>>()
            .join("xH")
            .replace("xHH_", "xH_")
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn factor_count(&self) -> usize {
        self.primes.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Product of the distinct primes; all character values live in `Q(z_N)` for this `N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Dimension `prod p_i` of the fully regular irreducibles.
    pub fn regular_degree(&self) -> u64 {
        self.primes.iter().product()
    }

    pub fn classes(&self) -> &ConjugacyClasses {
        &self.classes
    }

    /// `(representative, class size)` for every conjugacy class.
    pub fn conjugacy_classes(&self) -> Vec<(GroupElement, usize)> {
        self.classes
            .reps
            .iter()
            .zip(&self.classes.sizes)
            .map(|(&r, &s)| (self.element(r), s))
            .collect()
    }

    fn digit(&self, idx: usize, i: usize) -> (u64, u64, u64) {
        let p = self.primes[i];
        let d = (idx / self.strides[i]) as u64 % (p * p * p);
        (d / (p * p), (d / p) % p, d % p)
    }

    pub fn element(&self, idx: usize) -> GroupElement {
        assert!(idx < self.order, "element index out of range");
        let mut coords = Vec::with_capacity(3 * self.primes.len());
        for i in 0..self.primes.len() {
            let (a, b, c) = self.digit(idx, i);
            coords.extend([a, b, c]);
        }
        GroupElement { coords }
    }

    pub fn index_of(&self, g: &GroupElement) -> Result<usize, GroupError> {
        if g.coords.len() != 3 * self.primes.len() {
            return Err(GroupError::BadElement(g.to_string()));
        }
        let mut idx = 0;
        for (i, &p) in self.primes.iter().enumerate() {
            let (a, b, c) = g.triple(i);
            if a >= p || b >= p || c >= p {
                return Err(GroupError::BadElement(g.to_string()));
            }
            idx += ((a * p + b) * p + c) as usize * self.strides[i];
        }
        Ok(idx)
    }

    fn encode(&self, triples: impl Iterator<Item = (u64, u64, u64)>) -> usize {
        let mut idx = 0;
        for (i, (a, b, c)) in triples.enumerate() {
            let p = self.primes[i];
            idx += ((a * p + b) * p + c) as usize * self.strides[i];
        }
        idx
    }

    /// Builds the element index from per-factor triples (reduced mod `p_i`).
    pub fn index_from_triples(&self, triples: &[(u64, u64, u64)]) -> usize {
        assert_eq!(triples.len(), self.primes.len());
        self.encode(
            triples
                .iter()
                .zip(&self.primes)
                .map(|(&(a, b, c), &p)| (a % p, b % p, c % p)),
        )
    }

    pub fn identity_idx(&self) -> usize {
        0
    }

    pub fn mul_idx(&self, x: usize, y: usize) -> usize {
        self.encode((0..self.primes.len()).map(|i| {
            let p = self.primes[i];
            let (a, b, c) = self.digit(x, i);
            let (a2, b2, c2) = self.digit(y, i);
            ((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p)
        }))
    }

    pub fn inv_idx(&self, x: usize) -> usize {
        self.encode((0..self.primes.len()).map(|i| {
            let p = self.primes[i];
            let (a, b, c) = self.digit(x, i);
            // (a,b,c)^-1 = (-a, -b, -c + ab)
            (neg_mod(a, p), neg_mod(b, p), (neg_mod(c, p) + a * b) % p)
        }))
    }

    pub fn mul(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement, GroupError> {
        Ok(self.element(self.mul_idx(self.index_of(x)?, self.index_of(y)?)))
    }

    pub fn inverse(&self, x: &GroupElement) -> Result<GroupElement, GroupError> {
        Ok(self.element(self.inv_idx(self.index_of(x)?)))
    }

    /// `x y x^-1 y^-1`
    pub fn commutator_idx(&self, x: usize, y: usize) -> usize {
        let xy = self.mul_idx(x, y);
        self.mul_idx(self.mul_idx(xy, self.inv_idx(x)), self.inv_idx(y))
    }

    fn unit(&self, factor: usize, t: (u64, u64, u64)) -> usize {
        let triples = (0..self.primes.len()).map(|i| if i == factor { t } else { (0, 0, 0) });
        self.encode(triples)
    }

    /// `x_i = (1,0,0)` in factor `i`.
    pub fn x_gen(&self, factor: usize) -> usize {
        self.unit(factor, (1, 0, 0))
    }

    /// `y_i = (0,1,0)` in factor `i`.
    pub fn y_gen(&self, factor: usize) -> usize {
        self.unit(factor, (0, 1, 0))
    }

    /// `z_i = (0,0,1)` in factor `i`, a generator of the center of that factor.
    pub fn z_gen(&self, factor: usize) -> usize {
        self.unit(factor, (0, 0, 1))
    }

    /// `x_i, y_i` for every factor.
    pub fn generators(&self) -> Vec<usize> {
        (0..self.primes.len())
            .flat_map(|i| [self.x_gen(i), self.y_gen(i)])
            .collect()
    }

    pub fn center_generators(&self) -> Vec<usize> {
        (0..self.primes.len()).map(|i| self.z_gen(i)).collect()
    }

    /// Per-factor triples of an element index.
    pub fn triples(&self, idx: usize) -> Vec<(u64, u64, u64)> {
        (0..self.primes.len()).map(|i| self.digit(idx, i)).collect()
    }

    /// The `i`-th component of `idx`, as an index in `H_{p_i}`.
    pub fn component_idx(&self, idx: usize, factor: usize) -> usize {
        let p = self.primes[factor];
        let (a, b, c) = self.digit(idx, factor);
        ((a * p + b) * p + c) as usize
    }

    /// Embeds an element of `H_{p_i}` (by its index there) as factor `i`.
    pub fn embed_component(&self, component: usize, factor: usize) -> usize {
        component * self.strides[factor]
    }
}

/// Which subgroup of a Heisenberg product this is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SubgroupKind {
    /// All `((0,0,c_i))_i`.
    Center,
    /// `a = 0` in every factor.
    LagrangianA0,
    /// `b = 0` in every factor.
    LagrangianB0,
    Trivial,
    Custom,
}

/// Which Lagrangian subgroup to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Lagrangian {
    A0,
    B0,
}

pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    kind: SubgroupKind,
    members: Vec<usize>,
    position: Vec<u32>,
    classes: ConjugacyClasses,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup({:?} of {})", self.kind, self.parent.name())
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        *self.parent == *other.parent && self.members == other.members
    }
}

impl Subgroup {
    fn build(parent: &Arc<FiniteGroup>, kind: SubgroupKind, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        let mut position = vec![NONE; parent.order()];
        for (i, &m) in members.iter().enumerate() {
            position[m] = i as u32;
        }
        let classes = ConjugacyClasses::by_orbit_closure(parent, &members, &members);
        Subgroup {
            parent: parent.clone(),
            kind,
            members,
            position,
            classes,
        }
    }

    fn filtered(parent: &Arc<FiniteGroup>, kind: SubgroupKind, keep: impl Fn(&[(u64, u64, u64)]) -> bool) -> Self {
        let members = (0..parent.order())
            .filter(|&i| keep(&parent.triples(i)))
            .collect();
        Self::build(parent, kind, members)
    }

    pub fn center(parent: &Arc<FiniteGroup>) -> Self {
        Self::filtered(parent, SubgroupKind::Center, |t| t.iter().all(|&(a, b, _)| a == 0 && b == 0))
    }

    pub fn lagrangian(parent: &Arc<FiniteGroup>, which: Lagrangian) -> Self {
        match which {
            Lagrangian::A0 => Self::filtered(parent, SubgroupKind::LagrangianA0, |t| t.iter().all(|&(a, _, _)| a == 0)),
            Lagrangian::B0 => Self::filtered(parent, SubgroupKind::LagrangianB0, |t| t.iter().all(|&(_, b, _)| b == 0)),
        }
    }

    pub fn trivial(parent: &Arc<FiniteGroup>) -> Self {
        Self::build(parent, SubgroupKind::Trivial, vec![parent.identity_idx()])
    }

    /// A subgroup given by an explicit element list; closure is checked.
    pub fn custom(parent: &Arc<FiniteGroup>, elements: &[GroupElement]) -> Result<Self, GroupError> {
        let members: Vec<usize> = elements
            .iter()
            .map(|g| parent.index_of(g))
            .collect::<Result<_, _>>()?;
        let sub = Self::build(parent, SubgroupKind::Custom, members);
        let closed = sub.contains(parent.identity_idx())
            && sub
                .members
                .iter()
                .all(|&x| sub.members.iter().all(|&y| sub.contains(parent.mul_idx(x, y))));
        if !closed {
            return Err(GroupError::NotASubgroup);
        }
        Ok(sub)
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn kind(&self) -> SubgroupKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index(&self) -> usize {
        self.parent.order() / self.members.len()
    }

    /// Member element indices (in the parent), sorted.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.position.get(idx).is_some_and(|&p| p != NONE)
    }

    pub fn classes(&self) -> &ConjugacyClasses {
        &self.classes
    }

    pub fn is_normal(&self) -> bool {
        let g = &self.parent;
        g.generators().iter().all(|&s| {
            let si = g.inv_idx(s);
            self.members
                .iter()
                .all(|&k| self.contains(g.mul_idx(g.mul_idx(s, k), si)))
        })
    }

    pub fn contains_subgroup(&self, other: &Subgroup) -> bool {
        other.members.iter().all(|&m| self.contains(m))
    }

    /// Representatives of the left cosets `r K`, each the smallest index in its coset, plus
    /// the coset number of every parent element.
    pub fn left_cosets(&self) -> (Vec<usize>, Vec<u32>) {
        let g = &self.parent;
        let mut coset_of = vec![NONE; g.order()];
        let mut reps = Vec::with_capacity(self.index());
        for x in 0..g.order() {
            if coset_of[x] != NONE {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(x);
            for &k in &self.members {
                coset_of[g.mul_idx(x, k)] = id;
            }
        }
        (reps, coset_of)
    }
}

/// The built-in involution families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum InvolutionKind {
    Trivial,
    /// `(a,b,c) -> (a,-b,-c)` in each factor; inverts the center.
    InversionType,
    /// `(a,b,c) -> (-a,-b,c)` in each factor; fixes the center.
    CentralFixing,
    /// `(x, y) -> (y, x)` on `H' x H'`.
    Switching,
    Custom,
}

/// A validated automorphism of order dividing 2.
#[derive(Clone)]
pub struct GroupInvolution {
    group: Arc<FiniteGroup>,
    kind: InvolutionKind,
    map: Vec<u32>,
}

impl fmt::Debug for GroupInvolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupInvolution({:?} on {})", self.kind, self.group.name())
    }
}

impl GroupInvolution {
    pub fn new(group: &Arc<FiniteGroup>, kind: InvolutionKind) -> Result<Self, GroupError> {
        let g = group.as_ref();
        let primes = g.primes();
        let r = primes.len();
        let map: Vec<usize> = match kind {
            InvolutionKind::Trivial => (0..g.order()).collect(),
            InvolutionKind::InversionType | InvolutionKind::CentralFixing => (0..g.order())
                .map(|x| {
                    let t: Vec<(u64, u64, u64)> = g
                        .triples(x)
                        .into_iter()
                        .zip(primes)
                        .map(|((a, b, c), &p)| match kind {
                            InvolutionKind::InversionType => (a, neg_mod(b, p), neg_mod(c, p)),
                            _ => (neg_mod(a, p), neg_mod(b, p), c),
                        })
                        .collect();
                    g.index_from_triples(&t)
                })
                .collect(),
            InvolutionKind::Switching => {
                if r % 2 != 0 || primes[..r / 2] != primes[r / 2..] {
                    return Err(GroupError::SwitchingShape);
                }
                (0..g.order())
                    .map(|x| {
                        let mut t = g.triples(x);
                        t.rotate_left(r / 2);
                        g.index_from_triples(&t)
                    })
                    .collect()
            }
            InvolutionKind::Custom => {
                return Err(GroupError::NotAutomorphism(
                    "custom involutions are built with GroupInvolution::custom".into(),
                ))
            }
        };
        Self::validated(group, kind, map)
    }

    /// An arbitrary map given as the image of every element index.
    pub fn custom(group: &Arc<FiniteGroup>, map: Vec<usize>) -> Result<Self, GroupError> {
        if map.len() != group.order() || map.iter().any(|&y| y >= group.order()) {
            return Err(GroupError::NotAutomorphism("map is not defined on the whole group".into()));
        }
        Self::validated(group, InvolutionKind::Custom, map)
    }

    fn validated(group: &Arc<FiniteGroup>, kind: InvolutionKind, map: Vec<usize>) -> Result<Self, GroupError> {
        let g = group.as_ref();
        for x in 0..g.order() {
            if map[map[x]] != x {
                return Err(GroupError::NotInvolution(g.element(x).to_string()));
            }
        }
        // sigma(s x) = sigma(s) sigma(x) for generators s and all x forces sigma(y x) =
        // sigma(y) sigma(x) for every y, since every y is a positive word in the generators.
        for s in g.generators() {
            for x in 0..g.order() {
                if map[g.mul_idx(s, x)] != g.mul_idx(map[s], map[x]) {
                    return Err(GroupError::NotAutomorphism(format!(
                        "sigma({} * {}) differs from the product of images",
                        g.element(s),
                        g.element(x)
                    )));
                }
            }
        }
        Ok(GroupInvolution {
            group: group.clone(),
            kind,
            map: map.into_iter().map(|y| y as u32).collect(),
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn kind(&self) -> InvolutionKind {
        self.kind
    }

    pub fn apply_idx(&self, x: usize) -> usize {
        self.map[x] as usize
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement, GroupError> {
        Ok(self.group.element(self.apply_idx(self.group.index_of(x)?)))
    }
}
