//! Finite structures, Fraïssé classes, structural Ramsey checks and finite
//! models of topological dynamics for their automorphism groups.

pub mod amenability;
pub mod canon;
pub mod catalog;
pub mod class;
pub mod dynamics;
pub mod embed;
pub mod error;
pub mod fraisse;
pub mod order;
pub mod perm;
pub mod ramsey;
pub mod samuel;
pub mod structure;
pub mod substructure;

pub use error::{Error, Result};
pub use perm::{Perm, PermGroup};
pub use structure::{FinStructure, StructKind};
