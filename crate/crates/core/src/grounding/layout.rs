use super::GroundingError;
use crate::geometry::Point2;
use crate::llm::{DistanceSuggestion, SymbolicGoal};
use crate::logic::{RelationAtom, RelationKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Table-frame target positions built from relations and distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NominalLayout {
    pub anchor: String,
    pub positions: BTreeMap<String, Point2>,
    pub layers: BTreeMap<String, u8>,
    /// Placement order: each object after the one it was derived from.
    pub order: Vec<String>,
}

impl NominalLayout {
    /// Object that `id` is stacked on, if any.
    pub fn support_of<'a>(&self, id: &str, atoms: impl IntoIterator<Item = &'a RelationAtom>) -> Option<String> {
        atoms
            .into_iter()
            .find(|a| a.kind == RelationKind::OnTopOf && a.subject == id)
            .and_then(|a| a.reference_id().map(str::to_string))
    }
}

fn distance_for(atom: &RelationAtom, distances: &[DistanceSuggestion]) -> Result<f64, GroundingError> {
    if atom.kind == RelationKind::OnTopOf {
        return Ok(0.0);
    }
    distances
        .iter()
        .find(|d| d.atom == *atom)
        .map(|d| d.distance_cm / 100.0)
        .ok_or_else(|| GroundingError::MissingDistance(atom.to_string()))
}

/// Anchor at the table center (the centered object, else the first
/// instruction's subject), then offset each object from an already placed
/// partner along the relation's axes. Diagonals split the distance by
/// `1/sqrt(2)` per axis. Stacked objects copy their support's position one
/// layer up.
pub fn build_nominal_layout(goal: &SymbolicGoal, distances: &[DistanceSuggestion]) -> Result<NominalLayout, GroundingError> {
    let atoms = goal.relations.atoms();
    let anchor = atoms
        .iter()
        .find(|a| a.kind == RelationKind::CenteredOnTable)
        .or_else(|| atoms.first())
        .map(|a| a.subject.clone())
        .or_else(|| goal.objects.first().cloned())
        .ok_or(GroundingError::Empty)?;
    let mut positions = BTreeMap::new();
    let mut layers = BTreeMap::new();
    let mut order = vec![anchor.clone()];
    positions.insert(anchor.clone(), Point2::new(0.0, 0.0));
    layers.insert(anchor.clone(), 0u8);
    loop {
        let mut progress = false;
        for atom in atoms {
            let Some(r) = atom.reference_id() else { continue };
            let (placed, new, sign) = match (positions.contains_key(&atom.subject), positions.contains_key(r)) {
                (false, true) => (r.to_string(), atom.subject.clone(), 1.0),
                (true, false) if atom.kind != RelationKind::OnTopOf => (atom.subject.clone(), r.to_string(), -1.0),
                _ => continue,
            };
            let d = distance_for(atom, distances)?;
            let (ux, uy) = atom.kind.direction();
            let base = positions[&placed];
            positions.insert(new.clone(), base.add(sign * ux * d, sign * uy * d));
            let layer = if atom.kind == RelationKind::OnTopOf { layers[&placed] + 1 } else { 0 };
            layers.insert(new.clone(), layer);
            order.push(new);
            progress = true;
        }
        if !progress {
            break;
        }
    }
    if let Some(missing) = goal.objects.iter().find(|o| !positions.contains_key(*o)) {
        return Err(GroundingError::Unreachable(missing.clone()));
    }
    Ok(NominalLayout { anchor, positions, layers, order })
}
