//! Local distinction of the principal series attached to a packet at one place.
//!
//! At a non-split place the decomposition group `K` is trivial, `Z`, `L` or `L'`. Restricting the
//! regular irreducible to `K` gives characters `alpha . beta^k`; only the offsets `k` in `Z/p`, the
//! action of `chi -> chi^{-sigma}` on them, and which of them restrict trivially are modelled.
//! A principal series is distinguished iff an involution `eps` of the index set matches each
//! character with its `-sigma` twist, with restriction-trivial characters at fixed points.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::char_theory::{
    decompose_on_lagrangian, inner_product, regular_irreducible, restrict, CentralCharacter,
    CharError, ClassFunction, Domain,
};
use crate::cyclo::{Cyclotomic, Modulus};
use crate::group::{FiniteGroup, GroupError, GroupInvolution, InvolutionKind, Lagrangian, Subgroup};
use crate::packets::{is_distinguished_packet, PacketError, PacketLabel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalError {
    #[error("split places are handled by the split branch")]
    SplitPlace,
    #[error("principal series data is computed per factor; got a label on {0} factors")]
    NotSingleFactor(usize),
    #[error("unsupported involution: {0}")]
    Unsupported(String),
    #[error("no places given")]
    NoPlaces,
    #[error("malformed principal series data: {0}")]
    BadData(String),
    #[error("label on {0} used with an involution of {1}")]
    GroupMismatch(String, String),
    #[error("restriction does not have the expected shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Packet(#[from] PacketError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Decomposition {
    Trivial,
    Center,
    LagrangianA0,
    LagrangianB0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LocalPlace {
    pub split: bool,
    /// Ignored when `split`.
    pub decomposition: Decomposition,
}

impl LocalPlace {
    pub fn split() -> Self {
        LocalPlace {
            split: true,
            decomposition: Decomposition::Trivial,
        }
    }

    pub fn non_split(decomposition: Decomposition) -> Self {
        LocalPlace {
            split: false,
            decomposition,
        }
    }

    /// Split, then the four decomposition types.
    pub fn all() -> Vec<LocalPlace> {
        let mut out = vec![LocalPlace::split()];
        out.extend(
            [
                Decomposition::Trivial,
                Decomposition::Center,
                Decomposition::LagrangianA0,
                Decomposition::LagrangianB0,
            ]
            .map(LocalPlace::non_split),
        );
        out
    }
}

impl fmt::Display for LocalPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.split {
            return f.write_str("split");
        }
        f.write_str(match self.decomposition {
            Decomposition::Trivial => "trivial",
            Decomposition::Center => "Z",
            Decomposition::LagrangianA0 => "L",
            Decomposition::LagrangianB0 => "Lp",
        })
    }
}

/// `k -> scale * k + shift` on `Z/p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaAction {
    pub scale: u64,
    pub shift: u64,
}

impl SigmaAction {
    pub fn apply(&self, k: u64, p: u64) -> u64 {
        (self.scale * k + self.shift) % p
    }

    pub fn describe(&self, p: u64) -> String {
        let scale = signed(self.scale, p);
        let lin = match scale {
            1 => "k".to_string(),
            -1 => "-k".to_string(),
            s => format!("{s}k"),
        };
        match signed(self.shift, p) {
            0 => format!("k -> {lin}"),
            s if s > 0 => format!("k -> {lin} + {s}"),
            s => format!("k -> {lin} - {}", -s),
        }
    }
}

/// Representative of `x mod p` in `(-p/2, p/2)`.
pub fn signed(x: u64, p: u64) -> i64 {
    let x = (x % p) as i64;
    let p = p as i64;
    if x > p / 2 {
        x - p
    } else {
        x
    }
}

/// The characters `alpha . beta^k` of a principal series, by their offsets `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsData {
    pub base: String,
    pub p: u64,
    pub offsets: Vec<u64>,
    pub sigma_action: SigmaAction,
    /// Indexed by residue `k`.
    pub restriction_trivial: Vec<bool>,
}

impl PsData {
    pub fn new(
        p: u64,
        offsets: Vec<u64>,
        sigma_action: SigmaAction,
        restriction_trivial: Vec<bool>,
    ) -> Result<Self, LocalError> {
        if p == 0 {
            return Err(LocalError::BadData("modulus 0".into()));
        }
        if restriction_trivial.len() as u64 != p {
            return Err(LocalError::BadData(format!(
                "{} restriction flags for modulus {p}",
                restriction_trivial.len()
            )));
        }
        if let Some(k) = offsets.iter().find(|&&k| k >= p) {
            return Err(LocalError::BadData(format!("offset {k} not reduced mod {p}")));
        }
        if sigma_action.scale >= p || sigma_action.shift >= p {
            return Err(LocalError::BadData("sigma action not reduced".into()));
        }
        Ok(PsData {
            base: "alpha".into(),
            p,
            offsets,
            sigma_action,
            restriction_trivial,
        })
    }

    /// Offsets as signed representatives, sorted.
    pub fn normalized_offsets(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.offsets.iter().map(|&k| signed(k, self.p)).collect();
        v.sort_unstable();
        v
    }

    fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.p as usize];
        for &k in &self.offsets {
            m[k as usize] += 1;
        }
        m
    }
}

/// Whether some involution `eps` of the indices has `k_{eps(i)} = f(k_i)` and restriction-trivial
/// `k_i` at fixed points, decided on multiplicities.
pub fn ps_distinction_check(data: &PsData) -> bool {
    let p = data.p;
    let mult = data.multiplicities();
    (0..p).all(|k| {
        let m = mult[k as usize];
        if m == 0 {
            return true;
        }
        let fk = data.sigma_action.apply(k, p);
        if fk != k {
            // indices with value k pair off with indices of value f(k), and back again
            data.sigma_action.apply(fk, p) == k && mult[fk as usize] == m
        } else {
            m.is_multiple_of(2) || data.restriction_trivial[k as usize]
        }
    })
}

/// The restriction of `sigma` to factor `i`, when it preserves that factor.
pub fn factor_involution(sigma: &GroupInvolution, factor: usize) -> Result<GroupInvolution, LocalError> {
    let g = sigma.group();
    let p = g.primes()[factor];
    let h = Arc::new(FiniteGroup::heisenberg(p)?);
    let mut map = Vec::with_capacity(h.order());
    for x in 0..h.order() {
        let image = sigma.apply_idx(g.embed_component(x, factor));
        if g.embed_component(g.component_idx(image, factor), factor) != image {
            return Err(LocalError::Unsupported(format!(
                "{:?} does not preserve factor {factor}",
                sigma.kind()
            )));
        }
        map.push(g.component_idx(image, factor));
    }
    Ok(GroupInvolution::custom(&h, map)?)
}

fn subgroup_for(group: &Arc<FiniteGroup>, d: Decomposition) -> Subgroup {
    match d {
        Decomposition::Trivial => Subgroup::trivial(group),
        Decomposition::Center => Subgroup::center(group),
        Decomposition::LagrangianA0 => Subgroup::lagrangian(group, Lagrangian::A0),
        Decomposition::LagrangianB0 => Subgroup::lagrangian(group, Lagrangian::B0),
    }
}

/// Principal series data of the packet `label` on `H_p` at a non-split place.
pub fn principal_series_data(
    label: &PacketLabel,
    place: LocalPlace,
    sigma: &GroupInvolution,
) -> Result<PsData, LocalError> {
    if place.split {
        return Err(LocalError::SplitPlace);
    }
    let g = sigma.group();
    if label.central().primes().len() != 1 {
        return Err(LocalError::NotSingleFactor(label.central().primes().len()));
    }
    if label.central().primes() != g.primes() {
        return Err(LocalError::GroupMismatch(format!("{:?}", label.central().primes()), g.name()));
    }
    let p = g.primes()[0];
    if g.center_generators().iter().any(|&z| sigma.apply_idx(z) != z) {
        return Err(LocalError::Unsupported(format!("{:?} does not fix the center pointwise", sigma.kind())));
    }
    let k = Arc::new(subgroup_for(g, place.decomposition));
    if k.members().iter().any(|&x| !k.contains(sigma.apply_idx(x))) {
        return Err(LocalError::Unsupported(format!(
            "{:?} does not preserve the decomposition group",
            sigma.kind()
        )));
    }
    let rho = regular_irreducible(g, label.central())?;
    let all_fixed = |scale: u64| {
        let action = SigmaAction { scale, shift: 0 };
        (0..p).map(|k| action.apply(k, p) == k).collect::<Vec<bool>>()
    };
    match place.decomposition {
        Decomposition::Trivial | Decomposition::Center => {
            // rho restricted to K is p copies of one character
            let chi = restricted_central(g, &k, label.central())?;
            let m = inner_product(&restrict(&rho, &k)?, &chi)?;
            if m != num_rational::BigRational::from_integer(p.into()) {
                return Err(LocalError::Shape(format!("multiplicity {m} of the central character")));
            }
            PsData::new(p, vec![0; p as usize], SigmaAction { scale: 1, shift: 0 }, all_fixed(1))
        }
        Decomposition::LagrangianA0 | Decomposition::LagrangianB0 => {
            let dec = decompose_on_lagrangian(&rho, &k)?;
            let (Some(base), Some(mu)) = (dec.base.clone(), dec.mu.clone()) else {
                return Err(LocalError::Shape("restriction is not chi~ times the powers of one mu~".into()));
            };
            let which = if place.decomposition == Decomposition::LagrangianA0 {
                Lagrangian::A0
            } else {
                Lagrangian::B0
            };
            // offsets: constituent = base . mu^k
            let l = mu.line[0];
            let inv_l = crate::arith::mod_inverse(l, p).expect("mu~ is non-trivial");
            let mut offsets: Vec<u64> = dec
                .constituents
                .iter()
                .map(|(c, _)| (c.line[0] + p - base.line[0]) % p * inv_l % p)
                .collect();
            offsets.sort_unstable();
            // sigma must fix chi~, and mu~ o sigma = mu~^s
            let n = g.modulus();
            let moved_base = k
                .members()
                .iter()
                .any(|&x| base.exponent_at(g, which, sigma.apply_idx(x)) != base.exponent_at(g, which, x));
            if moved_base {
                return Err(LocalError::Unsupported(format!("{:?} does not fix chi~", sigma.kind())));
            }
            let line_gen = match which {
                Lagrangian::A0 => g.y_gen(0),
                Lagrangian::B0 => g.x_gen(0),
            };
            let at = |x: usize| mu.exponent_at(g, which, x) / (n / p);
            let s = at(sigma.apply_idx(line_gen)) * crate::arith::mod_inverse(at(line_gen), p).expect("non-trivial") % p;
            let scale = (p - s) % p;
            PsData::new(p, offsets, SigmaAction { scale, shift: 0 }, all_fixed(scale))
        }
    }
}

/// The character `chi` of `Z` pulled back to `K` (K = 1 or Z) as a class function on `K`.
fn restricted_central(g: &Arc<FiniteGroup>, k: &Arc<Subgroup>, chi: &CentralCharacter) -> Result<ClassFunction, LocalError> {
    let modulus = Modulus::new(g.modulus()).expect("valid modulus");
    Ok(ClassFunction::from_fn(Domain::Subgroup(k.clone()), |x| {
        Cyclotomic::root(&modulus, chi.exponent_at(g, x))
    })?)
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorVerdict {
    pub prime: u64,
    pub offsets: Vec<i64>,
    pub sigma_action: String,
    pub verdict: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaceReport {
    pub place: String,
    pub decomposition: Option<Decomposition>,
    /// Offsets per factor.
    pub offsets: Vec<Vec<i64>>,
    pub sigma_action: Vec<String>,
    pub verdict: bool,
    pub note: Option<String>,
}

/// Verdict at one place, as the conjunction over factors.
pub fn place_report(label: &PacketLabel, place: LocalPlace, sigma: &GroupInvolution) -> Result<PlaceReport, LocalError> {
    let g = sigma.group();
    if label.central().primes() != g.primes() {
        return Err(LocalError::GroupMismatch(format!("{:?}", label.central().primes()), g.name()));
    }
    if place.split {
        return Ok(PlaceReport {
            place: place.to_string(),
            decomposition: None,
            offsets: vec![],
            sigma_action: vec![],
            verdict: true,
            note: Some("split place: the local component has the form (tau, tau^vee (x) nu)".into()),
        });
    }
    let mut factors = Vec::new();
    for (i, &p) in g.primes().iter().enumerate() {
        let sigma_i = if g.factor_count() == 1 {
            sigma.clone()
        } else {
            factor_involution(sigma, i)?
        };
        let label_i = PacketLabel::new(CentralCharacter::new(&[p], &[label.exponents()[i]])?)?;
        let data = principal_series_data(&label_i, place, &sigma_i)?;
        factors.push(FactorVerdict {
            prime: p,
            offsets: data.normalized_offsets(),
            sigma_action: data.sigma_action.describe(p),
            verdict: ps_distinction_check(&data),
        });
    }
    Ok(PlaceReport {
        place: place.to_string(),
        decomposition: Some(place.decomposition),
        verdict: factors.iter().all(|f| f.verdict),
        offsets: factors.iter().map(|f| f.offsets.clone()).collect(),
        sigma_action: factors.into_iter().map(|f| f.sigma_action).collect(),
        note: None,
    })
}

pub fn everywhere_locally_distinguished(
    label: &PacketLabel,
    sigma: &GroupInvolution,
    places: &[LocalPlace],
) -> Result<bool, LocalError> {
    if places.is_empty() {
        return Err(LocalError::NoPlaces);
    }
    for &place in places {
        if !place_report(label, place, sigma)?.verdict {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalLabelReport {
    pub label: PacketLabel,
    pub places: Vec<PlaceReport>,
    pub everywhere_locally_distinguished: bool,
    pub packet_distinguished: bool,
    /// Locally distinguished everywhere, yet the packet is not distinguished.
    pub contrast: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalReport {
    pub group: String,
    pub involution: InvolutionKind,
    pub labels: Vec<LocalLabelReport>,
}

pub fn local_report(
    group: &Arc<FiniteGroup>,
    sigma: &GroupInvolution,
    places: &[LocalPlace],
) -> Result<LocalReport, LocalError> {
    if places.is_empty() {
        return Err(LocalError::NoPlaces);
    }
    let mut labels = Vec::new();
    for label in crate::packets::enumerate_packets(group) {
        let reports = places
            .iter()
            .map(|&pl| place_report(&label, pl, sigma))
            .collect::<Result<Vec<_>, _>>()?;
        let everywhere = reports.iter().all(|r| r.verdict);
        let packet = is_distinguished_packet(&label, sigma)?;
        labels.push(LocalLabelReport {
            label,
            places: reports,
            everywhere_locally_distinguished: everywhere,
            packet_distinguished: packet,
            contrast: everywhere && !packet,
        });
    }
    Ok(LocalReport {
        group: group.name(),
        involution: sigma.kind(),
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(p: u64) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::heisenberg(p).unwrap())
    }

    fn label(p: u64, e: u64) -> PacketLabel {
        PacketLabel::new(CentralCharacter::new(&[p], &[e]).unwrap()).unwrap()
    }

    fn sigma(g: &Arc<FiniteGroup>, kind: InvolutionKind) -> GroupInvolution {
        GroupInvolution::new(g, kind).unwrap()
    }

    #[test]
    fn lagrangian_offsets_and_actions() {
        let g = h(3);
        let cf = sigma(&g, InvolutionKind::CentralFixing);
        let d = principal_series_data(&label(3, 1), LocalPlace::non_split(Decomposition::LagrangianA0), &cf).unwrap();
        assert_eq!(d.normalized_offsets(), vec![-1, 0, 1]);
        assert_eq!(d.sigma_action.describe(3), "k -> k");
        assert!(ps_distinction_check(&d));
        let tr = sigma(&g, InvolutionKind::Trivial);
        let d = principal_series_data(&label(3, 2), LocalPlace::non_split(Decomposition::LagrangianA0), &tr).unwrap();
        assert_eq!(d.sigma_action.describe(3), "k -> -k");
        assert_eq!(d.restriction_trivial, vec![true, false, false]);
        assert!(ps_distinction_check(&d));
        let g5 = h(5);
        let d = principal_series_data(
            &label(5, 3),
            LocalPlace::non_split(Decomposition::LagrangianB0),
            &sigma(&g5, InvolutionKind::CentralFixing),
        )
        .unwrap();
        assert_eq!(d.normalized_offsets(), vec![-2, -1, 0, 1, 2]);
    }

    #[test]
    fn center_and_trivial_cases() {
        for p in [3u64, 5] {
            let g = h(p);
            for kind in [InvolutionKind::Trivial, InvolutionKind::CentralFixing] {
                for d in [Decomposition::Trivial, Decomposition::Center] {
                    let data = principal_series_data(&label(p, 1), LocalPlace::non_split(d), &sigma(&g, kind)).unwrap();
                    assert_eq!(data.offsets, vec![0; p as usize]);
                    assert!(ps_distinction_check(&data));
                }
            }
        }
    }

    #[test]
    fn unsupported_and_bad_inputs() {
        let g = h(3);
        let inv = sigma(&g, InvolutionKind::InversionType);
        assert!(matches!(
            principal_series_data(&label(3, 1), LocalPlace::non_split(Decomposition::Center), &inv),
            Err(LocalError::Unsupported(_))
        ));
        let cf = sigma(&g, InvolutionKind::CentralFixing);
        assert_eq!(
            principal_series_data(&label(3, 1), LocalPlace::split(), &cf),
            Err(LocalError::SplitPlace)
        );
        assert_eq!(everywhere_locally_distinguished(&label(3, 1), &cf, &[]), Err(LocalError::NoPlaces));
        let g2 = Arc::new(FiniteGroup::from_primes(&[3, 3]).unwrap());
        let sw = sigma(&g2, InvolutionKind::Switching);
        let l = PacketLabel::new(CentralCharacter::new(&[3, 3], &[1, 2]).unwrap()).unwrap();
        assert!(matches!(
            place_report(&l, LocalPlace::non_split(Decomposition::Center), &sw),
            Err(LocalError::Unsupported(_))
        ));
        assert!(PsData::new(3, vec![3], SigmaAction { scale: 1, shift: 0 }, vec![true; 3]).is_err());
        assert!(PsData::new(3, vec![0], SigmaAction { scale: 1, shift: 0 }, vec![true; 2]).is_err());
    }

    #[test]
    fn synthetic_single_offset() {
        let d = PsData::new(3, vec![1], SigmaAction { scale: 1, shift: 0 }, vec![true, false, false]).unwrap();
        assert!(!ps_distinction_check(&d));
        let d = PsData::new(3, vec![1, 1], SigmaAction { scale: 1, shift: 0 }, vec![true, false, false]).unwrap();
        assert!(ps_distinction_check(&d));
        let d = PsData::new(3, vec![1, 2], SigmaAction { scale: 2, shift: 0 }, vec![false; 3]).unwrap();
        assert!(ps_distinction_check(&d));
        let d = PsData::new(3, vec![1, 1, 2], SigmaAction { scale: 2, shift: 0 }, vec![true; 3]).unwrap();
        assert!(!ps_distinction_check(&d));
    }

    #[test]
    fn global_contrast_for_central_fixing() {
        for p in [3u64, 5] {
            let g = h(p);
            let cf = sigma(&g, InvolutionKind::CentralFixing);
            let report = local_report(&g, &cf, &LocalPlace::all()).unwrap();
            assert_eq!(report.labels.len() as u64, p - 1);
            for l in &report.labels {
                assert!(l.everywhere_locally_distinguished);
                assert!(!l.packet_distinguished);
                assert!(l.contrast);
                assert_eq!(l.places.len(), 5);
            }
        }
    }

    #[test]
    fn products_use_factor_restrictions() {
        let g = Arc::new(FiniteGroup::from_primes(&[3, 5]).unwrap());
        let cf = sigma(&g, InvolutionKind::CentralFixing);
        let l = PacketLabel::new(CentralCharacter::new(&[3, 5], &[2, 4]).unwrap()).unwrap();
        let r = place_report(&l, LocalPlace::non_split(Decomposition::LagrangianA0), &cf).unwrap();
        assert_eq!(r.offsets, vec![vec![-1, 0, 1], vec![-2, -1, 0, 1, 2]]);
        assert!(r.verdict);
        assert!(everywhere_locally_distinguished(&l, &cf, &LocalPlace::all()).unwrap());
        let f = factor_involution(&cf, 1).unwrap();
        assert_eq!(f.group().primes(), &[5]);
    }
}
