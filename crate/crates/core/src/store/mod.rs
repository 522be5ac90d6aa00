//! Executable semantics of the entity-store programming language.
//!
//! A [`MachineState`] pairs the persisted *data store state* with the
//! *application state* holding working copies. Operations touch exactly one
//! of them, except `put` and `get`, which copy an entity from one to the
//! other:
//!
//! | operation                              | changes |
//! |----------------------------------------|---------|
//! | `new`, `setProperty`, `removeProperty` | app     |
//! | `put`, `delete`                        | store   |
//! | `get`, queries                         | app     |
//!
//! Both halves are plain values; nothing is shared between them.

mod persist;
mod query;

pub use persist::{
    dump_store, entity_from_json, entity_to_json, key_to_json, load_store, read_store, value_from_json, value_to_json,
    write_store, PersistError,
};
pub use query::{eval_atom, eval_conjunction, QueryPredicate};

use thiserror::Error;

use crate::model::{EntityKey, MemoryState, PropertyMap, PropertyValue};

/// Which half of the machine state an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Store,
    App,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Store => "data store",
            Side::App => "application state",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("no entity {key} in {side}")]
    NoSuchEntity { key: EntityKey, side: Side },
}

/// `(ds, as)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MachineState {
    store: MemoryState,
    app: MemoryState,
}

impl MachineState {
    pub fn new() -> Self {
        Self::default()
    }

    /// A machine over `store` with an empty application state.
    pub fn with_store(store: MemoryState) -> Self {
        Self {
            store,
            app: MemoryState::new(),
        }
    }

    pub fn from_parts(store: MemoryState, app: MemoryState) -> Self {
        Self { store, app }
    }

    pub fn store(&self) -> &MemoryState {
        &self.store
    }

    pub fn app(&self) -> &MemoryState {
        &self.app
    }

    pub fn into_store(self) -> MemoryState {
        self.store
    }

    pub fn into_parts(self) -> (MemoryState, MemoryState) {
        (self.store, self.app)
    }

    fn app_entity(&self, key: &EntityKey) -> Result<&PropertyMap, StoreError> {
        self.app.get(key).ok_or_else(|| StoreError::NoSuchEntity {
            key: key.clone(),
            side: Side::App,
        })
    }

    fn app_entity_mut(&mut self, key: &EntityKey) -> Result<&mut PropertyMap, StoreError> {
        self.app.get_mut(key).ok_or_else(|| StoreError::NoSuchEntity {
            key: key.clone(),
            side: Side::App,
        })
    }

    /// `new(k)`: binds `key` to an empty entity in the application state.
    pub fn new_entity(&mut self, key: EntityKey) {
        self.app.insert(key, PropertyMap::new());
    }

    /// `new(k, pi)`.
    pub fn new_entity_with(&mut self, key: EntityKey, props: PropertyMap) {
        self.app.insert(key, props);
    }

    /// `setProperty(k, n, v)`.
    pub fn set_property(
        &mut self,
        key: &EntityKey,
        name: &str,
        value: impl Into<PropertyValue>,
    ) -> Result<(), StoreError> {
        self.app_entity_mut(key)?.set(name, value);
        Ok(())
    }

    /// `setProperty(k, n, k')`: nests a snapshot of the application-state
    /// entity `source`. Later changes to `source` do not propagate.
    pub fn set_nested(&mut self, key: &EntityKey, name: &str, source: &EntityKey) -> Result<(), StoreError> {
        let snapshot = self.app_entity(source)?.clone();
        self.app_entity_mut(key)?.set(name, PropertyValue::Nested(snapshot));
        Ok(())
    }

    /// `setProperty(k, n, v)` where `v` may be undefined, in which case the
    /// property is removed.
    pub fn assign(&mut self, key: &EntityKey, name: &str, value: Option<PropertyValue>) -> Result<(), StoreError> {
        self.app_entity_mut(key)?.update(name, value);
        Ok(())
    }

    /// `removeProperty(k, n)`. Removing an unbound name is a no-op.
    pub fn remove_property(&mut self, key: &EntityKey, name: &str) -> Result<(), StoreError> {
        self.app_entity_mut(key)?.remove(name);
        Ok(())
    }

    /// `getProperty(k, n)`; `None` when the property is undefined.
    pub fn get_property(&self, key: &EntityKey, name: &str) -> Result<Option<&PropertyValue>, StoreError> {
        Ok(self.app_entity(key)?.get(name))
    }

    /// `hasProperty(k, n)`.
    pub fn has_property(&self, key: &EntityKey, name: &str) -> Result<bool, StoreError> {
        Ok(self.app_entity(key)?.contains(name))
    }

    /// `put(k)`: copies the application-state entity into the store,
    /// replacing any entity under the same key.
    pub fn put(&mut self, key: &EntityKey) -> Result<(), StoreError> {
        let props = self.app_entity(key)?.clone();
        self.store.insert(key.clone(), props);
        Ok(())
    }

    /// `delete(k)`: removes `key` from the store only.
    pub fn delete(&mut self, key: &EntityKey) {
        self.store.remove(key);
    }

    /// `get(k)`: loads a copy of the stored entity into the application
    /// state. Fails when the store has no such key.
    pub fn get(&mut self, key: &EntityKey) -> Result<(), StoreError> {
        let props = self
            .store
            .get(key)
            .ok_or_else(|| StoreError::NoSuchEntity {
                key: key.clone(),
                side: Side::Store,
            })?
            .clone();
        self.app.insert(key.clone(), props);
        Ok(())
    }

    /// `get(kind = c AND theta)`: loads every matching stored entity into the
    /// application state and returns the matched keys in key order.
    pub fn query(&mut self, pred: &QueryPredicate) -> Vec<EntityKey> {
        let matched: Vec<(EntityKey, PropertyMap)> = self
            .store
            .of_kind(&pred.kind)
            .filter(|(k, p)| pred.matches(k, p))
            .map(|(k, p)| (k.clone(), p.clone()))
            .collect();
        let keys = matched.iter().map(|(k, _)| k.clone()).collect();
        for (k, p) in matched {
            self.app.insert(k, p);
        }
        keys
    }

    /// Key set of a query evaluated against the store, without touching
    /// the application state. The list is a snapshot: later writes do not
    /// alter it. Ordered by kind, then id (integers before strings).
    pub fn foreach_keys(&self, pred: &QueryPredicate) -> Vec<EntityKey> {
        self.store
            .of_kind(&pred.kind)
            .filter(|(k, p)| pred.matches(k, p))
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// Evaluates one operation.
    pub fn eval(&mut self, op: &Op) -> Result<(), StoreError> {
        match op {
            Op::New(key) => self.new_entity(key.clone()),
            Op::NewWith(key, props) => self.new_entity_with(key.clone(), props.clone()),
            Op::SetProperty(key, name, value) => self.set_property(key, name, value.clone())?,
            Op::SetNested(key, name, source) => self.set_nested(key, name, source)?,
            Op::RemoveProperty(key, name) => self.remove_property(key, name)?,
            Op::Put(key) => self.put(key)?,
            Op::Delete(key) => self.delete(key),
            Op::Get(key) => self.get(key)?,
            Op::Query(pred) => {
                self.query(pred);
            }
        }
        Ok(())
    }

    /// `op1; op2; ...`. Stops at the first failing operation.
    pub fn eval_all<'a>(&mut self, ops: impl IntoIterator<Item = &'a Op>) -> Result<(), StoreError> {
        ops.into_iter().try_for_each(|op| self.eval(op))
    }
}

/// One statement of the store programming language, with constant operands.
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    New(EntityKey),
    NewWith(EntityKey, PropertyMap),
    SetProperty(EntityKey, String, PropertyValue),
    SetNested(EntityKey, String, EntityKey),
    RemoveProperty(EntityKey, String),
    Put(EntityKey),
    Delete(EntityKey),
    Get(EntityKey),
    Query(QueryPredicate),
}

impl Op {
    /// Whether the operation may change the data store state.
    pub fn writes_store(&self) -> bool {
        matches!(self, Op::Put(_) | Op::Delete(_))
    }

    /// Whether the operation may change the application state.
    pub fn writes_app(&self) -> bool {
        !self.writes_store()
    }
}
