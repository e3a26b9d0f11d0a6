//! Finite p-group arithmetic over power-commutator presentations.

pub mod cli;
pub mod collector;
pub mod identities;
pub mod presentation;
pub mod series;
pub mod subgroups;
pub mod verifier;

pub use collector::{CollectError, ExponentVector, GroupError, PcGroup};
pub use presentation::{Family, PcPresentation};
