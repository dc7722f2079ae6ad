//! Finite-group laboratory for sections of group extensions and their
//! local-global interpolation.
//!
//! The crate models an extension `1 -> A -> E -> Γ -> 1` of finite groups,
//! computes nonabelian first cohomology with coefficients in finite Γ-groups,
//! enumerates sections up to conjugacy, and decides by exhaustive search
//! whether a family of local sections comes from a global homomorphism or
//! section and whether it survives finite descent obstructions.

pub mod cohomology;
pub mod extension;
pub mod group;
pub mod instances;
pub mod localglobal;
pub mod presets;

pub use cohomology::{Cocycle, CoeffRef, CohomologyError, GammaGroup, H1Classes};
pub use extension::{Extension, ExtensionError, SectionReport, SplitExtension};
pub use group::{
    enumerate_homs, FiniteGroup, GroupError, GroupHom, GroupRef, JordanReport, Subgroup,
};
pub use localglobal::{
    CoefficientCorpus, EquivalenceReport, Interpolation, LocalFamily, LocalSections,
};
