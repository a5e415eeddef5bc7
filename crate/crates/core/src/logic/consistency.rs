//! Consistency of relation sets on a qualitative grid.
//!
//! Each atom becomes a sign constraint on x, on y and, for stacking, on the
//! layer index. The axes are independent, so each is solved on its own: equal
//! entities are merged with union-find, strict orderings form a graph over the
//! merged classes, and the set is satisfiable iff that graph is acyclic. The
//! longest-path rank of each class is the witness coordinate. Stacking uses
//! two layers: a supporter sits on layer 0 and the object on top on layer 1.

use super::relation::{LogicError, Reference, RelationAtom, RelationSet, Sign};
use crate::geometry::Point2;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

/// Number of stacking layers.
pub const LAYERS: u8 = 2;

/// Qualitative coordinates for a consistent set. The virtual table-center
/// entity has its own coordinates so metric scaling can recenter on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub coords: BTreeMap<String, (i64, i64)>,
    pub layers: BTreeMap<String, u8>,
    pub table: (i64, i64),
}

impl Witness {
    /// Table-frame positions with one grid step equal to `scale` meters.
    pub fn to_metric(&self, scale: f64) -> BTreeMap<String, Point2> {
        self.coords
            .iter()
            .map(|(id, (x, y))| {
                let p = Point2::new((x - self.table.0) as f64 * scale, (y - self.table.1) as f64 * scale);
                (id.clone(), p)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConsistencyReport {
    Consistent { witness: Witness },
    Inconsistent { conflict: Vec<usize>, atoms: Vec<RelationAtom> },
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ConsistencyReport::Consistent { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            ConsistencyReport::Consistent { witness } => Some(witness),
            _ => None,
        }
    }

    /// Indices into the checked set of a minimal conflicting subset.
    pub fn conflict(&self) -> Option<&[usize]> {
        match self {
            ConsistencyReport::Inconsistent { conflict, .. } => Some(conflict),
            _ => None,
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }
    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Solve `x[a] - x[b]` sign constraints over `n` entities. Returns the
/// longest-path rank per entity, or `None` when unsatisfiable.
fn solve_axis(n: usize, cons: &[(usize, usize, Sign)]) -> Option<Vec<i64>> {
    let mut uf = UnionFind::new(n);
    for &(a, b, s) in cons {
        if s == Sign::Zero {
            uf.union(a, b);
        }
    }
    // Edge lo -> hi means class lo is strictly smaller.
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(a, b, s) in cons {
        let (lo, hi) = match s {
            Sign::Zero => continue,
            Sign::Neg => (uf.find(a), uf.find(b)),
            Sign::Pos => (uf.find(b), uf.find(a)),
        };
        if lo == hi {
            return None;
        }
        succ[lo].push(hi);
        indeg[hi] += 1;
    }
    let roots: Vec<usize> = (0..n).filter(|&i| uf.find(i) == i).collect();
    let mut rank = vec![0i64; n];
    let mut stack: Vec<usize> = roots.iter().copied().filter(|&r| indeg[r] == 0).collect();
    let mut done = 0;
    while let Some(c) = stack.pop() {
        done += 1;
        for &h in &succ[c] {
            rank[h] = rank[h].max(rank[c] + 1);
            indeg[h] -= 1;
            if indeg[h] == 0 {
                stack.push(h);
            }
        }
    }
    if done != roots.len() {
        return None;
    }
    Some((0..n).map(|i| rank[uf.find(i)]).collect())
}

/// Layer constraints: every `on_top_of` puts its subject on layer 1 and its
/// reference on layer 0.
fn solve_layers(n: usize, pairs: &[(usize, usize)]) -> Option<Vec<u8>> {
    let mut layer: Vec<Option<u8>> = vec![None; n];
    let assign = |i: usize, v: u8, layer: &mut Vec<Option<u8>>| match layer[i] {
        Some(w) if w != v => false,
        _ => {
            layer[i] = Some(v);
            true
        }
    };
    for &(top, below) in pairs {
        if !assign(top, LAYERS - 1, &mut layer) || !assign(below, 0, &mut layer) {
            return None;
        }
    }
    Some(layer.into_iter().map(|l| l.unwrap_or(0)).collect())
}

fn solve(atoms: &[&RelationAtom], objects: &[String]) -> Option<Witness> {
    let n = objects.len();
    let table = n;
    let index = |id: &str| objects.iter().position(|o| o == id).expect("declared");
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut stacks = Vec::new();
    for a in atoms {
        let s = index(&a.subject);
        let r = match &a.reference {
            Reference::Object(id) => index(id),
            Reference::Table => table,
        };
        let (sx, sy) = a.kind.signs();
        xs.push((s, r, sx));
        ys.push((s, r, sy));
        if a.kind == super::RelationKind::OnTopOf {
            stacks.push((s, r));
        }
    }
    let x = solve_axis(n + 1, &xs)?;
    let y = solve_axis(n + 1, &ys)?;
    let l = solve_layers(n, &stacks)?;
    Some(Witness {
        coords: objects.iter().enumerate().map(|(i, o)| (o.clone(), (x[i], y[i]))).collect(),
        layers: objects.iter().enumerate().map(|(i, o)| (o.clone(), l[i])).collect(),
        table: (x[table], y[table]),
    })
}

/// Decide whether some placement satisfies every atom. On failure, returns a
/// minimal conflicting subset found by deleting atoms one at a time.
pub fn check_consistency(rels: &RelationSet, objects: &[String]) -> Result<ConsistencyReport, LogicError> {
    let declared: HashSet<&str> = objects.iter().map(String::as_str).collect();
    for a in rels {
        a.validate()?;
        for id in std::iter::once(a.subject.as_str()).chain(a.reference_id()) {
            if !declared.contains(id) {
                return Err(LogicError::Undeclared(id.to_string()));
            }
        }
    }
    let all: Vec<&RelationAtom> = rels.iter().collect();
    if let Some(witness) = solve(&all, objects) {
        return Ok(ConsistencyReport::Consistent { witness });
    }
    let mut keep: Vec<usize> = (0..all.len()).collect();
    let mut i = 0;
    while i < keep.len() {
        let trial: Vec<&RelationAtom> = keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &k)| all[k]).collect();
        if solve(&trial, objects).is_none() {
            keep.remove(i);
        } else {
            i += 1;
        }
    }
    let atoms = keep.iter().map(|&k| all[k].clone()).collect();
    Ok(ConsistencyReport::Inconsistent { conflict: keep, atoms })
}

/// Metric check of one atom over table-frame positions. The zero-constrained
/// axis allows `tol`; strict axes need the right sign.
pub fn relation_satisfied(
    atom: &RelationAtom,
    positions: &BTreeMap<String, Point2>,
    stacking: &BTreeMap<String, u8>,
    tol: f64,
) -> Result<bool, LogicError> {
    let get = |id: &str| positions.get(id).copied().ok_or_else(|| LogicError::MissingPosition(id.to_string()));
    let s = get(&atom.subject)?;
    let r = match &atom.reference {
        Reference::Object(id) => get(id)?,
        Reference::Table => Point2::new(0.0, 0.0),
    };
    let (sx, sy) = atom.kind.signs();
    let mut ok = sx.holds(s.x - r.x, tol) && sy.holds(s.y - r.y, tol);
    if atom.kind == super::RelationKind::OnTopOf {
        let layer = |id: &str| stacking.get(id).copied().unwrap_or(0);
        ok &= layer(&atom.subject) > layer(atom.reference_id().unwrap());
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::super::RelationKind::*;
    use super::*;

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn empty_set_is_consistent() {
        let r = check_consistency(&RelationSet::new(), &ids(&["a"])).unwrap();
        assert!(r.is_consistent());
    }

    #[test]
    fn direct_contradiction() {
        let set = RelationSet::from_atoms([RelationAtom::new("a", LeftOf, "b"), RelationAtom::new("a", RightOf, "b")]).unwrap();
        let r = check_consistency(&set, &ids(&["a", "b"])).unwrap();
        assert_eq!(r.conflict(), Some(&[0, 1][..]));
    }

    #[test]
    fn below_and_right_of_exclusive() {
        let set = RelationSet::from_atoms([RelationAtom::new("x", Below, "y"), RelationAtom::new("x", RightOf, "y")]).unwrap();
        assert!(!check_consistency(&set, &ids(&["x", "y"])).unwrap().is_consistent());
    }

    #[test]
    fn undeclared_object_errors() {
        let set = RelationSet::from_atoms([RelationAtom::new("a", LeftOf, "ghost")]).unwrap();
        assert_eq!(check_consistency(&set, &ids(&["a"])), Err(LogicError::Undeclared("ghost".into())));
    }

    #[test]
    fn stacking_limited_to_two_layers() {
        let set = RelationSet::from_atoms([RelationAtom::new("lid", OnTopOf, "mug"), RelationAtom::new("mug", OnTopOf, "mat")]).unwrap();
        assert!(!check_consistency(&set, &ids(&["lid", "mug", "mat"])).unwrap().is_consistent());
    }

    #[test]
    fn witness_satisfies_atoms() {
        let set: RelationSet = "plate centered_on_table table\nfork left_of plate\nknife right_of plate\nbread on_top_of plate\ncup above_right knife\n"
            .parse()
            .unwrap();
        let objs = ids(&["plate", "fork", "knife", "bread", "cup"]);
        let r = check_consistency(&set, &objs).unwrap();
        let w = r.witness().unwrap();
        let pos = w.to_metric(0.1);
        for a in &set {
            assert!(relation_satisfied(a, &pos, &w.layers, 1e-9).unwrap(), "{a}");
        }
        assert!(w.coords.values().all(|&(x, y)| (0..=objs.len() as i64).contains(&x) && (0..=objs.len() as i64).contains(&y)));
    }

    #[test]
    fn metric_examples() {
        let mut pos = BTreeMap::new();
        pos.insert("fork".to_string(), Point2::new(-0.15, 0.0));
        pos.insert("plate".to_string(), Point2::new(0.0, 0.0));
        pos.insert("bread".to_string(), Point2::new(0.0, 0.0));
        let mut layers = BTreeMap::new();
        layers.insert("bread".to_string(), 1);
        layers.insert("plate".to_string(), 0);
        assert!(relation_satisfied(&RelationAtom::new("fork", LeftOf, "plate"), &pos, &layers, 0.03).unwrap());
        assert!(relation_satisfied(&RelationAtom::new("bread", OnTopOf, "plate"), &pos, &layers, 0.03).unwrap());
        assert!(!relation_satisfied(&RelationAtom::new("plate", OnTopOf, "bread"), &pos, &layers, 0.03).unwrap());
        assert_eq!(
            relation_satisfied(&RelationAtom::new("fork", LeftOf, "cup"), &pos, &layers, 0.03),
            Err(LogicError::MissingPosition("cup".into()))
        );
    }
}
