use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LogicError {
    #[error("undeclared object '{0}'")]
    Undeclared(String),
    #[error("atom relates '{0}' to itself")]
    SelfReference(String),
    #[error("duplicate atom '{0}'")]
    Duplicate(String),
    #[error("cannot parse relation line '{0}'")]
    Syntax(String),
    #[error("unknown relation kind '{0}'")]
    UnknownKind(String),
    #[error("'{0}' needs {1} reference")]
    ReferenceArity(String, &'static str),
    #[error("no position for '{0}'")]
    MissingPosition(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    LeftOf,
    RightOf,
    Above,
    Below,
    AboveLeft,
    AboveRight,
    BelowLeft,
    BelowRight,
    OnTopOf,
    CenteredOnTable,
}

/// Required sign of a coordinate difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn holds(&self, d: f64, tol: f64) -> bool {
        match self {
            Sign::Neg => d < 0.0,
            Sign::Zero => d.abs() <= tol,
            Sign::Pos => d > 0.0,
        }
    }

    pub fn holds_int(&self, d: i64) -> bool {
        match self {
            Sign::Neg => d < 0,
            Sign::Zero => d == 0,
            Sign::Pos => d > 0,
        }
    }
}

impl RelationKind {
    pub const ALL: [RelationKind; 10] = [
        RelationKind::LeftOf,
        RelationKind::RightOf,
        RelationKind::Above,
        RelationKind::Below,
        RelationKind::AboveLeft,
        RelationKind::AboveRight,
        RelationKind::BelowLeft,
        RelationKind::BelowRight,
        RelationKind::OnTopOf,
        RelationKind::CenteredOnTable,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RelationKind::LeftOf => "left_of",
            RelationKind::RightOf => "right_of",
            RelationKind::Above => "above",
            RelationKind::Below => "below",
            RelationKind::AboveLeft => "above_left",
            RelationKind::AboveRight => "above_right",
            RelationKind::BelowLeft => "below_left",
            RelationKind::BelowRight => "below_right",
            RelationKind::OnTopOf => "on_top_of",
            RelationKind::CenteredOnTable => "centered_on_table",
        }
    }

    pub fn inverse(&self) -> Option<RelationKind> {
        use RelationKind::*;
        match self {
            LeftOf => Some(RightOf),
            RightOf => Some(LeftOf),
            Above => Some(Below),
            Below => Some(Above),
            AboveLeft => Some(BelowRight),
            BelowRight => Some(AboveLeft),
            AboveRight => Some(BelowLeft),
            BelowLeft => Some(AboveRight),
            OnTopOf | CenteredOnTable => None,
        }
    }

    pub fn is_unary(&self) -> bool {
        matches!(self, RelationKind::CenteredOnTable)
    }

    /// Signs of `(subject - reference)` on x and y.
    pub fn signs(&self) -> (Sign, Sign) {
        use RelationKind::*;
        use Sign::*;
        match self {
            LeftOf => (Neg, Zero),
            RightOf => (Pos, Zero),
            Above => (Zero, Pos),
            Below => (Zero, Neg),
            AboveLeft => (Neg, Pos),
            AboveRight => (Pos, Pos),
            BelowLeft => (Neg, Neg),
            BelowRight => (Pos, Neg),
            OnTopOf | CenteredOnTable => (Zero, Zero),
        }
    }

    /// Unit offset direction; diagonals are normalized.
    pub fn direction(&self) -> (f64, f64) {
        let s = |s: Sign| match s {
            Sign::Neg => -1.0_f64,
            Sign::Zero => 0.0,
            Sign::Pos => 1.0,
        };
        let (sx, sy) = self.signs();
        let (dx, dy) = (s(sx), s(sy));
        let n = dx.hypot(dy);
        if n == 0.0 {
            (0.0, 0.0)
        } else {
            (dx / n, dy / n)
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationKind {
    type Err = LogicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| LogicError::UnknownKind(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    Object(String),
    Table,
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::Object(id) => f.write_str(id),
            Reference::Table => f.write_str("table"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationAtom {
    pub subject: String,
    pub kind: RelationKind,
    pub reference: Reference,
}

impl RelationAtom {
    pub fn new(subject: &str, kind: RelationKind, reference: &str) -> Self {
        Self { subject: subject.to_string(), kind, reference: Reference::Object(reference.to_string()) }
    }

    pub fn centered(subject: &str) -> Self {
        Self { subject: subject.to_string(), kind: RelationKind::CenteredOnTable, reference: Reference::Table }
    }

    pub fn reference_id(&self) -> Option<&str> {
        match &self.reference {
            Reference::Object(id) => Some(id),
            Reference::Table => None,
        }
    }

    /// The same fact stated from the reference's point of view.
    pub fn inverse(&self) -> Option<RelationAtom> {
        let inv = self.kind.inverse()?;
        let r = self.reference_id()?;
        Some(RelationAtom::new(r, inv, &self.subject))
    }

    pub fn validate(&self) -> Result<(), LogicError> {
        match (&self.reference, self.kind.is_unary()) {
            (Reference::Table, false) => Err(LogicError::ReferenceArity(self.kind.to_string(), "an object")),
            (Reference::Object(_), true) => Err(LogicError::ReferenceArity(self.kind.to_string(), "the table")),
            (Reference::Object(r), false) if *r == self.subject => Err(LogicError::SelfReference(r.clone())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for RelationAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.kind, self.reference)
    }
}

impl FromStr for RelationAtom {
    type Err = LogicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let [subject, kind, reference] = parts[..] else {
            return Err(LogicError::Syntax(s.to_string()));
        };
        let kind: RelationKind = kind.parse()?;
        let reference = if reference == "table" {
            Reference::Table
        } else {
            Reference::Object(reference.to_string())
        };
        let atom = RelationAtom { subject: subject.to_string(), kind, reference };
        atom.validate()?;
        Ok(atom)
    }
}

/// Ordered, duplicate-free list of atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RelationSet {
    atoms: Vec<RelationAtom>,
}

impl RelationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = RelationAtom>) -> Result<Self, LogicError> {
        let mut s = Self::new();
        for a in atoms {
            s.push(a)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, atom: RelationAtom) -> Result<(), LogicError> {
        atom.validate()?;
        if self.atoms.contains(&atom) {
            return Err(LogicError::Duplicate(atom.to_string()));
        }
        self.atoms.push(atom);
        Ok(())
    }

    pub fn atoms(&self) -> &[RelationAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RelationAtom> {
        self.atoms.iter()
    }

    /// Subset by index, preserving order.
    pub fn select(&self, keep: &[usize]) -> RelationSet {
        RelationSet { atoms: keep.iter().map(|&i| self.atoms[i].clone()).collect() }
    }
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.atoms {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for RelationSet {
    type Err = LogicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = RelationSet::new();
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            set.push(line.parse()?)?;
        }
        Ok(set)
    }
}

impl<'a> IntoIterator for &'a RelationSet {
    type Item = &'a RelationAtom;
    type IntoIter = std::slice::Iter<'a, RelationAtom>;
    fn into_iter(self) -> Self::IntoIter {
        self.atoms.iter()
    }
}
