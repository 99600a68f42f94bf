//! Exact computations for distinction problems on products of Heisenberg groups.
//!
//! Everything is exact: character values live in cyclotomic fields with rational coefficients,
//! and representations are given by monomial matrices whose entries are roots of unity.

pub mod arith;
pub mod char_theory;
pub mod cyclo;
pub mod group;
pub mod local;
pub mod packets;
pub mod projective;
pub mod types;

pub use char_theory::{CentralCharacter, CharError, ClassFunction, Domain, FactorIrrep, Irreducible, LinearLabel};
pub use cyclo::{CycloError, Cyclotomic, Modulus};
pub use group::{
    ConjugacyClasses, FiniteGroup, GroupElement, GroupError, GroupInvolution, InvolutionKind, Lagrangian, Subgroup,
    SubgroupKind,
};
pub use local::{Decomposition, LocalError, LocalPlace, PsData, SigmaAction};
pub use packets::{DistinctionReport, PacketError, PacketLabel};
pub use projective::{EquivalenceVerdict, MonomialMatrix, MonomialRep, ProjError};
pub use types::{FormalGL, TypeError, TypePartition};
