//! Entity keys, property values and memory states.
//!
//! A memory state maps entity keys to property maps. Updates follow a
//! create-or-replace discipline: binding a key (or a property name) to a value
//! replaces whatever was there, and binding it to "undefined" removes it.
//! Undefined is written `None` throughout; it never appears inside a stored
//! map.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Name of the reserved per-entity schema version property.
pub const VERSION_PROPERTY: &str = "version";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("`version` must be an integer >= 0")]
pub struct InvalidVersion;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("substitution binds {0} more than once")]
    DuplicateBinding(EntityKey),
}

/// A scalar from the atomic domain.
///
/// Equality is exact and never coerces across variants. Floats compare
/// bitwise, so `0.0 != -0.0` and NaN is unequal to everything.
#[derive(Debug, Clone)]
pub enum AtomicValue {
    Text(String),
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl PartialEq for AtomicValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Text(a), Self::Text(b)) => a == b,
            (Self::Int(a), Self::Int(b)) => a == b,
            (Self::Float(a), Self::Float(b)) => !a.is_nan() && a.to_bits() == b.to_bits(),
            (Self::Bool(a), Self::Bool(b)) => a == b,
            _ => false,
        }
    }
}

impl AtomicValue {
    pub fn type_name(&self) -> &'static str {
        match self {
            Self::Text(_) => "string",
            Self::Int(_) => "integer",
            Self::Float(_) => "float",
            Self::Bool(_) => "boolean",
        }
    }
}

impl From<&str> for AtomicValue {
    fn from(s: &str) -> Self {
        Self::Text(s.to_owned())
    }
}

impl From<String> for AtomicValue {
    fn from(s: String) -> Self {
        Self::Text(s)
    }
}

impl From<i64> for AtomicValue {
    fn from(v: i64) -> Self {
        Self::Int(v)
    }
}

impl From<f64> for AtomicValue {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<bool> for AtomicValue {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl fmt::Display for AtomicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Text(s) => write!(f, "{s:?}"),
            Self::Int(v) => write!(f, "{v}"),
            Self::Float(v) => write!(f, "{v:?}"),
            Self::Bool(v) => write!(f, "{v}"),
        }
    }
}

/// Non-empty ordered list of atomics. Duplicates are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueList(Vec<AtomicValue>);

impl ValueList {
    /// Returns `None` for an empty list.
    pub fn new(values: Vec<AtomicValue>) -> Option<Self> {
        if values.is_empty() {
            None
        } else {
            Some(Self(values))
        }
    }

    pub fn as_slice(&self) -> &[AtomicValue] {
        &self.0
    }

    pub fn contains(&self, value: &AtomicValue) -> bool {
        self.0.iter().any(|v| v == value)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Value of a single property.
#[derive(Debug, Clone, PartialEq)]
pub enum PropertyValue {
    Atomic(AtomicValue),
    MultiValued(ValueList),
    Nested(PropertyMap),
}

impl PropertyValue {
    pub fn as_atomic(&self) -> Option<&AtomicValue> {
        match self {
            Self::Atomic(v) => Some(v),
            _ => None,
        }
    }

    /// Builds a multi-valued property; `None` when `values` is empty.
    pub fn list<I, V>(values: I) -> Option<Self>
    where
        I: IntoIterator<Item = V>,
        V: Into<AtomicValue>,
    {
        ValueList::new(values.into_iter().map(Into::into).collect()).map(Self::MultiValued)
    }
}

impl<T: Into<AtomicValue>> From<T> for PropertyValue {
    fn from(v: T) -> Self {
        Self::Atomic(v.into())
    }
}

impl From<PropertyMap> for PropertyValue {
    fn from(map: PropertyMap) -> Self {
        Self::Nested(map)
    }
}

/// Structural equality of two property values.
///
/// Lists compare element-wise in order; nested maps compare by name set.
pub fn value_equals(a: &PropertyValue, b: &PropertyValue) -> bool {
    a == b
}

/// Equality of possibly-undefined values. Two undefined values are equal.
pub fn slot_equals(a: Option<&PropertyValue>, b: Option<&PropertyValue>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => value_equals(a, b),
        _ => false,
    }
}

/// Mapping from property names to values, ordered by name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PropertyMap(BTreeMap<String, PropertyValue>);

impl PropertyMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder form of [`PropertyMap::set`].
    pub fn with(mut self, name: impl Into<String>, value: impl Into<PropertyValue>) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&PropertyValue> {
        self.0.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn set(&mut self, name: impl Into<String>, value: impl Into<PropertyValue>) {
        let name = name.into();
        debug_assert!(!name.is_empty(), "property names are non-empty");
        self.0.insert(name, value.into());
    }

    pub fn remove(&mut self, name: &str) -> Option<PropertyValue> {
        self.0.remove(name)
    }

    /// `pi[name -> value]`: binds `name`, or unbinds it when `value` is `None`.
    pub fn update(&mut self, name: &str, value: Option<PropertyValue>) {
        match value {
            Some(v) => self.set(name, v),
            None => {
                self.0.remove(name);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PropertyValue)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Reads the reserved version property; `Ok(None)` when absent.
    pub fn version(&self) -> Result<Option<i64>, InvalidVersion> {
        match self.get(VERSION_PROPERTY) {
            None => Ok(None),
            Some(PropertyValue::Atomic(AtomicValue::Int(v))) if *v >= 0 => Ok(Some(*v)),
            Some(_) => Err(InvalidVersion),
        }
    }
}

impl<N: Into<String>, V: Into<PropertyValue>> FromIterator<(N, V)> for PropertyMap {
    fn from_iter<T: IntoIterator<Item = (N, V)>>(iter: T) -> Self {
        let mut map = Self::new();
        for (n, v) in iter {
            map.set(n, v);
        }
        map
    }
}

/// `pi[name -> value]` as a pure function.
pub fn map_update(pi: &PropertyMap, name: &str, value: Option<PropertyValue>) -> PropertyMap {
    let mut out = pi.clone();
    out.update(name, value);
    out
}

/// Entity identifier. Integers order before strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityId {
    Int(i64),
    Str(String),
}

impl EntityId {
    pub fn to_atomic(&self) -> AtomicValue {
        match self {
            Self::Int(v) => AtomicValue::Int(*v),
            Self::Str(s) => AtomicValue::Text(s.clone()),
        }
    }
}

impl From<i64> for EntityId {
    fn from(v: i64) -> Self {
        Self::Int(v)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        Self::Str(s.to_owned())
    }
}

impl From<String> for EntityId {
    fn from(s: String) -> Self {
        Self::Str(s)
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Int(v) => write!(f, "{v}"),
            Self::Str(s) => write!(f, "{s:?}"),
        }
    }
}

/// `(kind, id)`. Keys order by kind, then id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityKey {
    kind: String,
    id: EntityId,
}

impl EntityKey {
    pub fn new(kind: impl Into<String>, id: impl Into<EntityId>) -> Self {
        let kind = kind.into();
        debug_assert!(!kind.is_empty(), "entity kinds are non-empty");
        Self { kind, id: id.into() }
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn id(&self) -> &EntityId {
        &self.id
    }
}

impl fmt::Display for EntityKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.kind, self.id)
    }
}

/// A batch of create-or-replace bindings; `None` removes the key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Substitution(Vec<(EntityKey, Option<PropertyMap>)>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, key: EntityKey, value: Option<PropertyMap>) -> Self {
        self.0.push((key, value));
        self
    }

    pub fn push(&mut self, key: EntityKey, value: Option<PropertyMap>) {
        self.0.push((key, value));
    }

    pub fn iter(&self) -> impl Iterator<Item = &(EntityKey, Option<PropertyMap>)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(EntityKey, Option<PropertyMap>)> for Substitution {
    fn from_iter<T: IntoIterator<Item = (EntityKey, Option<PropertyMap>)>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Finite mapping from entity keys to property maps, ordered by key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MemoryState(BTreeMap<EntityKey, PropertyMap>);

impl MemoryState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &EntityKey) -> Option<&PropertyMap> {
        self.0.get(key)
    }

    pub fn get_mut(&mut self, key: &EntityKey) -> Option<&mut PropertyMap> {
        self.0.get_mut(key)
    }

    pub fn contains(&self, key: &EntityKey) -> bool {
        self.0.contains_key(key)
    }

    pub fn insert(&mut self, key: EntityKey, props: PropertyMap) -> Option<PropertyMap> {
        self.0.insert(key, props)
    }

    pub fn remove(&mut self, key: &EntityKey) -> Option<PropertyMap> {
        self.0.remove(key)
    }

    /// Binds or removes a single key.
    pub fn update(&mut self, key: EntityKey, value: Option<PropertyMap>) {
        match value {
            Some(props) => {
                self.0.insert(key, props);
            }
            None => {
                self.0.remove(&key);
            }
        }
    }

    /// `ms[sigma]`. Fails without modifying `self` if a key is bound twice.
    pub fn apply(&mut self, subst: &Substitution) -> Result<(), ModelError> {
        let mut seen = std::collections::BTreeSet::new();
        for (key, _) in subst.iter() {
            if !seen.insert(key) {
                return Err(ModelError::DuplicateBinding(key.clone()));
            }
        }
        for (key, value) in subst.iter() {
            self.update(key.clone(), value.clone());
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EntityKey, &PropertyMap)> {
        self.0.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &EntityKey> {
        self.0.keys()
    }

    /// Entities of one kind, in key order.
    pub fn of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = (&'a EntityKey, &'a PropertyMap)> + 'a {
        self.0.iter().filter(move |(k, _)| k.kind() == kind)
    }
}

impl FromIterator<(EntityKey, PropertyMap)> for MemoryState {
    fn from_iter<T: IntoIterator<Item = (EntityKey, PropertyMap)>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Pure form of [`MemoryState::apply`].
pub fn apply_substitution(ms: &MemoryState, subst: &Substitution) -> Result<MemoryState, ModelError> {
    let mut out = ms.clone();
    out.apply(subst)?;
    Ok(out)
}
