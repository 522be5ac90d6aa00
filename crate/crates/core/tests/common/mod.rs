#![allow(dead_code)]

pub mod gen;
pub mod oracle;

use evolve_core::{EntityKey, MemoryState, PropertyMap};

pub fn entity(
    kind: &str,
    id: impl Into<evolve_core::EntityId>,
    props: &[(&str, evolve_core::PropertyValue)],
) -> (EntityKey, PropertyMap) {
    (
        EntityKey::new(kind, id),
        props.iter().map(|(n, v)| (*n, v.clone())).collect(),
    )
}

pub fn store<const N: usize>(entities: [(EntityKey, PropertyMap); N]) -> MemoryState {
    entities.into_iter().collect()
}
