use std::fmt;

use crate::model::AtomicValue;

/// Literal values in statements are exactly the atomic values.
pub type Literal = AtomicValue;

/// `kind.name`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PropertyRef {
    pub kind: String,
    pub name: String,
}

impl PropertyRef {
    pub fn new(kind: impl Into<String>, name: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            name: name.into(),
        }
    }
}

impl fmt::Display for PropertyRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.kind, self.name)
    }
}

/// `kind.name = literal`
#[derive(Debug, Clone, PartialEq)]
pub struct EqCond {
    pub prop: PropertyRef,
    pub value: Literal,
}

impl EqCond {
    pub fn new(prop: PropertyRef, value: impl Into<Literal>) -> Self {
        Self {
            prop,
            value: value.into(),
        }
    }
}

/// `kind1.a = kind2.b`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinCond {
    pub left: PropertyRef,
    pub right: PropertyRef,
}

impl JoinCond {
    /// Splits the join into its `(source side, target side)` properties.
    /// `None` unless exactly one side names each kind.
    pub fn orient(&self, source_kind: &str, target_kind: &str) -> Option<(&PropertyRef, &PropertyRef)> {
        if self.left.kind == source_kind && self.right.kind == target_kind {
            Some((&self.left, &self.right))
        } else if self.right.kind == source_kind && self.left.kind == target_kind {
            Some((&self.right, &self.left))
        } else {
            None
        }
    }
}

/// Payload shared by `move` and `copy`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    pub source: PropertyRef,
    pub target_kind: String,
    pub join: Option<JoinCond>,
    pub conds: Vec<EqCond>,
}

impl Transfer {
    pub fn source_kind(&self) -> &str {
        &self.source.kind
    }

    /// Conditions naming the source kind.
    pub fn source_conds(&self) -> impl Iterator<Item = &EqCond> {
        self.conds.iter().filter(|c| c.prop.kind == self.source.kind)
    }

    /// Conditions naming the target kind.
    pub fn target_conds(&self) -> impl Iterator<Item = &EqCond> {
        self.conds.iter().filter(|c| c.prop.kind == self.target_kind)
    }
}

/// One parsed evolution operation.
#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Add {
        target: PropertyRef,
        value: Literal,
        selection: Vec<EqCond>,
    },
    Delete {
        target: PropertyRef,
        selection: Vec<EqCond>,
    },
    Rename {
        target: PropertyRef,
        new_name: String,
        selection: Vec<EqCond>,
    },
    Move(Transfer),
    Copy(Transfer),
}

impl Statement {
    pub fn op_name(&self) -> &'static str {
        match self {
            Statement::Add { .. } => "add",
            Statement::Delete { .. } => "delete",
            Statement::Rename { .. } => "rename",
            Statement::Move(_) => "move",
            Statement::Copy(_) => "copy",
        }
    }

    pub fn transfer(&self) -> Option<&Transfer> {
        match self {
            Statement::Move(t) | Statement::Copy(t) => Some(t),
            _ => None,
        }
    }

    /// Add, delete and rename touch a single kind.
    pub fn is_single_kind(&self) -> bool {
        self.transfer().is_none()
    }

    /// Kinds whose entities the statement writes.
    pub fn written_kinds(&self) -> Vec<&str> {
        match self {
            Statement::Add { target, .. } | Statement::Delete { target, .. } | Statement::Rename { target, .. } => {
                vec![target.kind.as_str()]
            }
            Statement::Copy(t) => vec![t.target_kind.as_str()],
            Statement::Move(t) => vec![t.source.kind.as_str(), t.target_kind.as_str()],
        }
    }

    /// Every condition of the statement, in source order.
    pub fn conds(&self) -> &[EqCond] {
        match self {
            Statement::Add { selection, .. }
            | Statement::Delete { selection, .. }
            | Statement::Rename { selection, .. } => selection,
            Statement::Move(t) | Statement::Copy(t) => &t.conds,
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::format_statement(self))
    }
}
