//! Packets of fully regular irreducibles and their distinction under an involution.
//!
//! A packet is labelled by a regular central character `c` of `Z`. It is distinguished by `sigma`
//! iff `c(sigma(z)) = c(z^-1)` on `Z`; both sides are characters, so the generators `z_i` suffice.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::char_theory::{CentralCharacter, CharError};
use crate::group::{FiniteGroup, GroupInvolution, InvolutionKind, Subgroup};
use crate::projective::{regular_central_characters, regular_representations, EquivalenceContext, MonomialRep, ProjError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PacketError {
    #[error("label for {0} used with an involution of {1}")]
    GroupMismatch(String, String),
    #[error("central character {0} is not regular")]
    NotRegular(String),
    #[error("source packet {0} is not distinguished, so the period table does not apply")]
    SourceNotDistinguished(String),
    #[error("multiplicity {formula} from the formula disagrees with {counted} strong classes")]
    MultiplicityMismatch { formula: u64, counted: usize },
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Proj(#[from] ProjError),
}

/// A packet, labelled by the regular central character of its irreducible of dimension `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PacketLabel {
    central: CentralCharacter,
    n: u64,
}

impl PacketLabel {
    pub fn new(central: CentralCharacter) -> Result<Self, PacketError> {
        if !central.is_regular() {
            return Err(PacketError::NotRegular(central.to_string()));
        }
        let n = central.primes().iter().product();
        Ok(PacketLabel { central, n })
    }

    pub fn central(&self) -> &CentralCharacter {
        &self.central
    }

    pub fn exponents(&self) -> &[u64] {
        self.central.exponents()
    }

    /// Dimension of the underlying irreducible.
    pub fn n(&self) -> u64 {
        self.n
    }
}

impl fmt::Display for PacketLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.central.fmt(f)
    }
}

impl Serialize for PacketLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.central.exponents().serialize(serializer)
    }
}

/// One label per regular central character, lexicographic in the exponents.
pub fn enumerate_packets(group: &FiniteGroup) -> Vec<PacketLabel> {
    regular_central_characters(group)
        .into_iter()
        .map(|c| PacketLabel::new(c).expect("regular by construction"))
        .collect()
}

/// `m(n) = prod (p_i - 1)`.
pub fn multiplicity(group: &FiniteGroup) -> u64 {
    group.primes().iter().map(|p| p - 1).product()
}

/// `m(n)`, checked against the number of strong classes among the regular irreducibles.
pub fn multiplicity_checked(group: &Arc<FiniteGroup>) -> Result<u64, PacketError> {
    let formula = multiplicity(group);
    let reps: Vec<MonomialRep> = regular_representations(group)?.into_iter().map(|(_, r)| r).collect();
    let counted = EquivalenceContext::new(group).count_strong_classes_in_weak_class(&reps)?;
    if counted as u64 != formula {
        return Err(PacketError::MultiplicityMismatch { formula, counted });
    }
    Ok(formula)
}

fn check_group(label: &PacketLabel, sigma: &GroupInvolution) -> Result<(), PacketError> {
    if label.central.primes() != sigma.group().primes() {
        return Err(PacketError::GroupMismatch(
            format!("{:?}", label.central.primes()),
            sigma.group().name(),
        ));
    }
    Ok(())
}

/// `c(sigma(z_i)) = c(z_i^-1)` on the generators of the center.
pub fn is_distinguished_packet(label: &PacketLabel, sigma: &GroupInvolution) -> Result<bool, PacketError> {
    check_group(label, sigma)?;
    let g = sigma.group();
    Ok(g.center_generators().into_iter().all(|z| {
        label.central.exponent_at(g, sigma.apply_idx(z)) == label.central.exponent_at(g, g.inv_idx(z))
    }))
}

/// The same criterion checked on every element of the center.
pub fn is_distinguished_packet_full(label: &PacketLabel, sigma: &GroupInvolution) -> Result<bool, PacketError> {
    check_group(label, sigma)?;
    let g = sigma.group();
    let z = Subgroup::center(g);
    Ok(z.members().iter().all(|&x| {
        label.central.exponent_at(g, sigma.apply_idx(x)) == label.central.exponent_at(g, g.inv_idx(x))
    }))
}

pub fn distinguished_packets(group: &Arc<FiniteGroup>, sigma: &GroupInvolution) -> Result<Vec<PacketLabel>, PacketError> {
    let mut out = Vec::new();
    for label in enumerate_packets(group) {
        if is_distinguished_packet(&label, sigma)? {
            out.push(label);
        }
    }
    Ok(out)
}

/// `c -> (c o sigma)^-1`; it maps the distinguished labels to themselves.
pub fn sigma_dual(label: &PacketLabel, sigma: &GroupInvolution) -> Result<PacketLabel, PacketError> {
    check_group(label, sigma)?;
    PacketLabel::new(label.central.compose(sigma)?.inverse())
}

/// Canonical copies on which the period does or does not vanish, for a distinguished source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistinctionReport {
    pub label: PacketLabel,
    pub distinguished: bool,
    pub period_nonvanishing_copies: Vec<PacketLabel>,
    pub period_vanishing_copies: Vec<PacketLabel>,
    pub multiplicity: u64,
}

pub fn period_vanishing_table(source: &PacketLabel, sigma: &GroupInvolution) -> Result<DistinctionReport, PacketError> {
    if !is_distinguished_packet(source, sigma)? {
        return Err(PacketError::SourceNotDistinguished(source.to_string()));
    }
    let mut nonvanishing = Vec::new();
    let mut vanishing = Vec::new();
    for label in enumerate_packets(sigma.group()) {
        if is_distinguished_packet(&label, sigma)? {
            nonvanishing.push(label);
        } else {
            vanishing.push(label);
        }
    }
    Ok(DistinctionReport {
        label: source.clone(),
        distinguished: true,
        period_nonvanishing_copies: nonvanishing,
        period_vanishing_copies: vanishing,
        multiplicity: multiplicity(sigma.group()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PacketRow {
    pub label: PacketLabel,
    pub distinguished: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodTable {
    pub source: PacketLabel,
    pub nonvanishing: Vec<PacketLabel>,
    pub vanishing: Vec<PacketLabel>,
}

/// The classification of every packet under one involution.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub group: String,
    pub involution: InvolutionKind,
    pub multiplicity: u64,
    pub multiplicity_provenance: String,
    pub packets: Vec<PacketRow>,
    /// Period table for the first distinguished packet, if any.
    pub table: Option<PeriodTable>,
    /// Period tables for every distinguished source.
    pub tables: Vec<PeriodTable>,
}

pub fn classify(group: &Arc<FiniteGroup>, sigma: &GroupInvolution) -> Result<ClassificationReport, PacketError> {
    let m = multiplicity_checked(group)?;
    let mut packets = Vec::new();
    let mut tables = Vec::new();
    for label in enumerate_packets(group) {
        let distinguished = is_distinguished_packet(&label, sigma)?;
        if distinguished {
            let report = period_vanishing_table(&label, sigma)?;
            tables.push(PeriodTable {
                source: label.clone(),
                nonvanishing: report.period_nonvanishing_copies,
                vanishing: report.period_vanishing_copies,
            });
        }
        packets.push(PacketRow { label, distinguished });
    }
    Ok(ClassificationReport {
        group: group.name(),
        involution: sigma.kind(),
        multiplicity: m,
        multiplicity_provenance: "m(n)=∏(p_i−1)".into(),
        packets,
        table: tables.first().cloned(),
        tables,
    })
}
