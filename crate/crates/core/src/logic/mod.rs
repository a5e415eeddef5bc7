//! Symbolic spatial relations and their consistency.

pub mod consistency;
pub mod relation;

pub use consistency::{check_consistency, relation_satisfied, ConsistencyReport, Witness, LAYERS};
pub use relation::{LogicError, Reference, RelationAtom, RelationKind, RelationSet, Sign};
