//! Finite upper half plane graphs over `F_q`: the Hecke algebra of the pair
//! `(GL₂(F_q), K)`, its idempotents, the two orthogonal eigenfunction bases,
//! and closed-form adjacency spectra with Ramanujan and moment checks.

pub mod eigen;
pub mod error;
pub mod field;
pub mod gl2;
pub mod hecke;
pub mod plane;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use field::{DeltaChoice, FieldCtx, Fq2Elem};
pub use gl2::{ClassDescriptor, RepKind, SphericalRep};
pub use plane::{Gl2Elem, PlaneCtx, PlanePoint};
