//! Conjunctive equality queries over a single kind.

use std::fmt;

use crate::model::{AtomicValue, EntityKey, PropertyMap, PropertyValue};

/// `kind = c AND n1 = v1 AND ...`
#[derive(Debug, Clone, PartialEq)]
pub struct QueryPredicate {
    pub kind: String,
    pub atoms: Vec<(String, AtomicValue)>,
}

impl QueryPredicate {
    pub fn kind(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            atoms: Vec::new(),
        }
    }

    pub fn and(mut self, name: impl Into<String>, value: impl Into<AtomicValue>) -> Self {
        self.atoms.push((name.into(), value.into()));
        self
    }

    /// Evaluates the predicate on one entity.
    pub fn matches(&self, key: &EntityKey, props: &PropertyMap) -> bool {
        key.kind() == self.kind && eval_conjunction(props, &self.atoms)
    }
}

impl fmt::Display for QueryPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kind = {}", self.kind)?;
        for (name, value) in &self.atoms {
            write!(f, " and {name} = {value}")?;
        }
        Ok(())
    }
}

/// Truth value of the atom `name = value` on one entity.
///
/// True when `name` is bound to an equal atomic, or to a multi-valued
/// property containing `value`. Anything else is false, including nested
/// entities and values of another type.
pub fn eval_atom(props: &PropertyMap, name: &str, value: &AtomicValue) -> bool {
    match props.get(name) {
        Some(PropertyValue::Atomic(v)) => v == value,
        Some(PropertyValue::MultiValued(list)) => list.contains(value),
        Some(PropertyValue::Nested(_)) | None => false,
    }
}

pub fn eval_conjunction(props: &PropertyMap, atoms: &[(String, AtomicValue)]) -> bool {
    atoms.iter().all(|(n, v)| eval_atom(props, n, v))
}
