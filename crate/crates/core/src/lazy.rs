//! Lazy migration: rules applied to an entity when it is loaded, in the
//! style of object-mapper annotations.
//!
//! Loading runs every `alsoLoad` rename, then each guarded `onLoad` block in
//! order. The loaded entity is not written back; `save_with_rules` stores it
//! later without its `ignoreSave` properties. Spawned entities take the
//! loaded entity's id and may be persisted immediately.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::model::{AtomicValue, EntityKey, MemoryState, PropertyMap, PropertyValue, VERSION_PROPERTY};
use crate::store::{value_from_json, value_to_json, MachineState, StoreError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlsoLoad {
    pub target: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Guard {
    Has(String),
    Lacks(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    SetFromProperty { target: String, source: String },
    SetConstant { target: String, value: AtomicValue },
    SetFromId { target: String },
    Remove(String),
    Spawn(Spawn),
}

/// Creates `(kind, id)` where `id` is the loaded entity's id. Assignments
/// read from the loaded entity and write to the new one.
#[derive(Debug, Clone, PartialEq)]
pub struct Spawn {
    pub kind: String,
    pub assign: Vec<Action>,
    pub persist: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GuardedAction {
    pub guard: Vec<Guard>,
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LazyRuleSet {
    pub kind: String,
    pub also_load: Vec<AlsoLoad>,
    pub ignore_save: Vec<String>,
    pub on_load: Vec<GuardedAction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("malformed rules: {0}")]
    Malformed(String),
    #[error("invalid rules: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LazyError {
    #[error("rules for kind `{rules}` cannot apply to {key}")]
    KindMismatch { rules: String, key: EntityKey },
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl LazyRuleSet {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            ..Self::default()
        }
    }

    /// Checks the structural invariants of a rule set.
    pub fn validate(&self) -> Result<(), RuleError> {
        let bad = |m: String| Err(RuleError::Invalid(m));
        if self.kind.is_empty() {
            return bad("empty kind".into());
        }
        let mut targets = BTreeSet::new();
        for a in &self.also_load {
            check_name(&a.target)?;
            check_name(&a.source)?;
            if !targets.insert(a.target.as_str()) {
                return bad(format!("duplicate alsoLoad target `{}`", a.target));
            }
        }
        let mut ignored = BTreeSet::new();
        for n in &self.ignore_save {
            check_name(n)?;
            if !ignored.insert(n.as_str()) {
                return bad(format!("duplicate ignoreSave name `{n}`"));
            }
        }
        for block in &self.on_load {
            if block.actions.is_empty() {
                return bad("onLoad block without actions".into());
            }
            for g in &block.guard {
                let (Guard::Has(n) | Guard::Lacks(n)) = g;
                check_name(n)?;
            }
            for a in &block.actions {
                check_action(a, false)?;
            }
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self, RuleError> {
        let v: Value = serde_json::from_str(text).map_err(|e| RuleError::Malformed(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self, RuleError> {
        let obj = object(v, "rule set", &["kind", "alsoLoad", "ignoreSave", "onLoad"])?;
        let kind = string(obj.get("kind"), "kind")?;
        let also_load = array(obj.get("alsoLoad"), "alsoLoad")?
            .iter()
            .map(|a| {
                let o = object(a, "alsoLoad entry", &["target", "source"])?;
                Ok(AlsoLoad {
                    target: string(o.get("target"), "alsoLoad.target")?,
                    source: string(o.get("source"), "alsoLoad.source")?,
                })
            })
            .collect::<Result<_, RuleError>>()?;
        let ignore_save = array(obj.get("ignoreSave"), "ignoreSave")?
            .iter()
            .map(|n| string(Some(n), "ignoreSave entry"))
            .collect::<Result<_, _>>()?;
        let on_load = array(obj.get("onLoad"), "onLoad")?
            .iter()
            .map(|b| {
                let o = object(b, "onLoad block", &["if", "do"])?;
                let guard = array(o.get("if"), "if")?
                    .iter()
                    .map(parse_guard)
                    .collect::<Result<_, _>>()?;
                let actions = array(o.get("do"), "do")?
                    .iter()
                    .map(parse_action)
                    .collect::<Result<_, _>>()?;
                Ok(GuardedAction { guard, actions })
            })
            .collect::<Result<_, RuleError>>()?;
        let rules = Self {
            kind,
            also_load,
            ignore_save,
            on_load,
        };
        rules.validate()?;
        Ok(rules)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "alsoLoad": self.also_load.iter().map(|a| json!({"target": a.target, "source": a.source})).collect::<Vec<_>>(),
            "ignoreSave": self.ignore_save,
            "onLoad": self.on_load.iter().map(|b| json!({
                "if": b.guard.iter().map(|g| match g {
                    Guard::Has(n) => json!({"has": n}),
                    Guard::Lacks(n) => json!({"lacks": n}),
                }).collect::<Vec<_>>(),
                "do": b.actions.iter().map(action_to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn check_name(n: &str) -> Result<(), RuleError> {
    if n.is_empty() {
        Err(RuleError::Invalid("empty property name".into()))
    } else if n == VERSION_PROPERTY {
        Err(RuleError::Invalid(format!("rules may not name `{VERSION_PROPERTY}`")))
    } else {
        Ok(())
    }
}

fn check_action(a: &Action, in_spawn: bool) -> Result<(), RuleError> {
    match a {
        Action::SetFromProperty { target, source } => {
            check_name(target)?;
            check_name(source)
        }
        Action::SetConstant { target, value } => {
            check_name(target)?;
            match value {
                AtomicValue::Float(f) if !f.is_finite() => {
                    Err(RuleError::Invalid(format!("non-finite constant for `{target}`")))
                }
                _ => Ok(()),
            }
        }
        Action::SetFromId { target } => check_name(target),
        Action::Remove(n) if in_spawn => Err(RuleError::Invalid(format!("`remove {n}` is not allowed inside spawn"))),
        Action::Remove(n) => check_name(n),
        Action::Spawn(_) if in_spawn => Err(RuleError::Invalid("nested spawn".into())),
        Action::Spawn(s) => {
            if s.kind.is_empty() {
                return Err(RuleError::Invalid("spawn without kind".into()));
            }
            s.assign.iter().try_for_each(|a| check_action(a, true))
        }
    }
}

fn malformed<T>(m: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError::Malformed(m.into()))
}

fn object<'v>(v: &'v Value, what: &str, allowed: &[&str]) -> Result<&'v Map<String, Value>, RuleError> {
    let Some(o) = v.as_object() else {
        return malformed(format!("{what} must be an object"));
    };
    if let Some(k) = o.keys().find(|k| !allowed.contains(&k.as_str())) {
        return malformed(format!("unknown field `{k}` in {what}"));
    }
    Ok(o)
}

fn string(v: Option<&Value>, what: &str) -> Result<String, RuleError> {
    match v {
        Some(Value::String(s)) => Ok(s.clone()),
        _ => malformed(format!("`{what}` must be a string")),
    }
}

/// Optional arrays default to empty.
fn array<'v>(v: Option<&'v Value>, what: &str) -> Result<&'v [Value], RuleError> {
    match v {
        None => Ok(&[]),
        Some(Value::Array(a)) => Ok(a),
        Some(_) => malformed(format!("`{what}` must be an array")),
    }
}

fn parse_guard(v: &Value) -> Result<Guard, RuleError> {
    let o = object(v, "guard", &["has", "lacks"])?;
    match (o.get("has"), o.get("lacks")) {
        (Some(n), None) => Ok(Guard::Has(string(Some(n), "has")?)),
        (None, Some(n)) => Ok(Guard::Lacks(string(Some(n), "lacks")?)),
        _ => malformed("guard needs exactly one of `has` or `lacks`"),
    }
}

fn parse_action(v: &Value) -> Result<Action, RuleError> {
    let o = object(
        v,
        "action",
        &["set", "fromProperty", "const", "fromId", "remove", "spawn"],
    )?;
    if let Some(s) = o.get("spawn") {
        if o.len() != 1 {
            return malformed("`spawn` takes no sibling fields");
        }
        let so = object(s, "spawn", &["kind", "assign", "persist"])?;
        let persist = match so.get("persist") {
            None => false,
            Some(Value::Bool(b)) => *b,
            Some(_) => return malformed("`persist` must be a boolean"),
        };
        return Ok(Action::Spawn(Spawn {
            kind: string(so.get("kind"), "spawn.kind")?,
            assign: array(so.get("assign"), "spawn.assign")?
                .iter()
                .map(parse_action)
                .collect::<Result<_, _>>()?,
            persist,
        }));
    }
    if let Some(r) = o.get("remove") {
        if o.len() != 1 {
            return malformed("`remove` takes no sibling fields");
        }
        return Ok(Action::Remove(string(Some(r), "remove")?));
    }
    let target = string(o.get("set"), "set")?;
    let sources = ["fromProperty", "const", "fromId"]
        .iter()
        .filter(|k| o.contains_key(**k))
        .count();
    if sources != 1 || o.len() != 2 {
        return malformed(format!(
            "`set {target}` needs exactly one of fromProperty, const or fromId"
        ));
    }
    if let Some(src) = o.get("fromProperty") {
        return Ok(Action::SetFromProperty {
            target,
            source: string(Some(src), "fromProperty")?,
        });
    }
    if let Some(c) = o.get("const") {
        return match value_from_json(c) {
            Ok(PropertyValue::Atomic(value)) => Ok(Action::SetConstant { target, value }),
            _ => malformed(format!("`const` for `{target}` must be a scalar")),
        };
    }
    match o.get("fromId") {
        Some(Value::Bool(true)) => Ok(Action::SetFromId { target }),
        _ => malformed("`fromId` must be true"),
    }
}

fn action_to_json(a: &Action) -> Value {
    match a {
        Action::SetFromProperty { target, source } => json!({"set": target, "fromProperty": source}),
        Action::SetConstant { target, value } => {
            json!({"set": target, "const": value_to_json(&PropertyValue::Atomic(value.clone()))})
        }
        Action::SetFromId { target } => json!({"set": target, "fromId": true}),
        Action::Remove(n) => json!({"remove": n}),
        Action::Spawn(s) => json!({"spawn": {
            "kind": s.kind,
            "assign": s.assign.iter().map(action_to_json).collect::<Vec<_>>(),
            "persist": s.persist,
        }}),
    }
}

fn check_kind(rules: &LazyRuleSet, key: &EntityKey) -> Result<(), LazyError> {
    if key.kind() == rules.kind {
        Ok(())
    } else {
        Err(LazyError::KindMismatch {
            rules: rules.kind.clone(),
            key: key.clone(),
        })
    }
}

/// Runs the load-time rules on the application-state copy of `key`,
/// without fetching it first.
pub fn apply_load_rules(st: &mut MachineState, key: &EntityKey, rules: &LazyRuleSet) -> Result<(), LazyError> {
    check_kind(rules, key)?;
    for a in &rules.also_load {
        if st.has_property(key, &a.source)? {
            let v = st.get_property(key, &a.source)?.cloned();
            st.assign(key, &a.target, v)?;
            st.remove_property(key, &a.source)?;
        }
    }
    for block in &rules.on_load {
        let mut pass = true;
        for g in &block.guard {
            pass &= match g {
                Guard::Has(n) => st.has_property(key, n)?,
                Guard::Lacks(n) => !st.has_property(key, n)?,
            };
        }
        if pass {
            for a in &block.actions {
                run_action(st, key, key, a)?;
            }
        }
    }
    Ok(())
}

/// Executes `action`, reading from `from` and writing to `to`.
fn run_action(st: &mut MachineState, from: &EntityKey, to: &EntityKey, action: &Action) -> Result<(), LazyError> {
    match action {
        Action::SetFromProperty { target, source } => {
            let v = st.get_property(from, source)?.cloned();
            st.assign(to, target, v)?;
        }
        Action::SetConstant { target, value } => st.set_property(to, target, value.clone())?,
        Action::SetFromId { target } => st.set_property(to, target, from.id().to_atomic())?,
        Action::Remove(n) => st.remove_property(to, n)?,
        Action::Spawn(s) => {
            let spawned = EntityKey::new(s.kind.clone(), from.id().clone());
            st.new_entity(spawned.clone());
            for a in &s.assign {
                run_action(st, from, &spawned, a)?;
            }
            if s.persist {
                st.put(&spawned)?;
            }
        }
    }
    Ok(())
}

/// `get(key)` followed by the load-time rules. The store is only written
/// by persisted spawns.
pub fn load_with_rules(st: &mut MachineState, key: &EntityKey, rules: &LazyRuleSet) -> Result<(), LazyError> {
    check_kind(rules, key)?;
    st.get(key)?;
    apply_load_rules(st, key, rules)
}

/// Puts a copy of the application-state entity without its `ignoreSave`
/// properties. The application state keeps the full copy.
pub fn save_with_rules(st: &mut MachineState, key: &EntityKey, rules: &LazyRuleSet) -> Result<(), LazyError> {
    check_kind(rules, key)?;
    let full = st
        .app()
        .get(key)
        .ok_or_else(|| StoreError::NoSuchEntity {
            key: key.clone(),
            side: crate::store::Side::App,
        })?
        .clone();
    let mut stripped = full.clone();
    for n in &rules.ignore_save {
        stripped.remove(n);
    }
    st.new_entity_with(key.clone(), stripped);
    st.put(key)?;
    st.new_entity_with(key.clone(), full);
    Ok(())
}

/// An entity whose second rule application still changed something.
#[derive(Debug, Clone, PartialEq)]
pub struct IdempotenceWitness {
    pub key: EntityKey,
    pub first: PropertyMap,
    pub second: PropertyMap,
    /// Store keys the second application wrote differently.
    pub changed_store_keys: Vec<EntityKey>,
}

/// Applies the load rules twice to every entity of the rule set's kind,
/// on a scratch copy of `ds`, and reports entities the second pass changed.
pub fn check_idempotent(rules: &LazyRuleSet, ds: &MemoryState) -> Result<Vec<IdempotenceWitness>, LazyError> {
    let mut out = Vec::new();
    let keys: Vec<EntityKey> = ds.of_kind(&rules.kind).map(|(k, _)| k.clone()).collect();
    for key in keys {
        let mut st = MachineState::with_store(ds.clone());
        load_with_rules(&mut st, &key, rules)?;
        let first = st.app().get(&key).cloned().unwrap_or_default();
        let store_after_first = st.store().clone();
        apply_load_rules(&mut st, &key, rules)?;
        let second = st.app().get(&key).cloned().unwrap_or_default();
        let changed_store_keys = diff_keys(&store_after_first, st.store());
        if first != second || !changed_store_keys.is_empty() {
            out.push(IdempotenceWitness {
                key,
                first,
                second,
                changed_store_keys,
            });
        }
    }
    Ok(out)
}

fn diff_keys(a: &MemoryState, b: &MemoryState) -> Vec<EntityKey> {
    let all: BTreeSet<&EntityKey> = a.keys().chain(b.keys()).collect();
    all.into_iter().filter(|k| a.get(k) != b.get(k)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALSO_LOAD: &str = r#"{"kind": "Person", "alsoLoad": [{"target": "fullName", "source": "name"}]}"#;
    const ADDRESS: &str = r#"{
        "kind": "Person",
        "ignoreSave": ["street", "city"],
        "onLoad": [{
            "if": [{"has": "street"}, {"has": "city"}],
            "do": [
                {"spawn": {"kind": "Address", "persist": true, "assign": [
                    {"set": "person", "fromId": true},
                    {"set": "street", "fromProperty": "street"},
                    {"set": "city", "fromProperty": "city"}
                ]}},
                {"remove": "street"},
                {"remove": "city"}
            ]
        }]
    }"#;

    fn person(props: PropertyMap) -> (EntityKey, MachineState) {
        let key = EntityKey::new("Person", 7);
        let ds: MemoryState = [(key.clone(), props)].into_iter().collect();
        (key, MachineState::with_store(ds))
    }

    #[test]
    fn also_load_renames_in_app_state_only() {
        let rules = LazyRuleSet::from_json_str(ALSO_LOAD).unwrap();
        let (key, mut st) = person(PropertyMap::new().with("name", "X"));
        load_with_rules(&mut st, &key, &rules).unwrap();
        assert_eq!(st.app().get(&key), Some(&PropertyMap::new().with("fullName", "X")));
        assert_eq!(st.store().get(&key), Some(&PropertyMap::new().with("name", "X")));
        save_with_rules(&mut st, &key, &rules).unwrap();
        assert_eq!(st.store().get(&key), Some(&PropertyMap::new().with("fullName", "X")));
    }

    #[test]
    fn also_load_on_new_shape_is_identity() {
        let rules = LazyRuleSet::from_json_str(ALSO_LOAD).unwrap();
        let props = PropertyMap::new().with("fullName", "Y");
        let (key, mut st) = person(props.clone());
        load_with_rules(&mut st, &key, &rules).unwrap();
        assert_eq!(st.app().get(&key), Some(&props));
    }

    #[test]
    fn on_load_spawns_address() {
        let rules = LazyRuleSet::from_json_str(ADDRESS).unwrap();
        let (key, mut st) = person(PropertyMap::new().with("street", "Main").with("city", "Passau"));
        load_with_rules(&mut st, &key, &rules).unwrap();
        let addr = EntityKey::new("Address", 7);
        assert_eq!(
            st.store().get(&addr),
            Some(
                &PropertyMap::new()
                    .with("person", 7)
                    .with("street", "Main")
                    .with("city", "Passau")
            )
        );
        assert_eq!(st.app().get(&key), Some(&PropertyMap::new()));
        save_with_rules(&mut st, &key, &rules).unwrap();
        assert_eq!(st.store().get(&key), Some(&PropertyMap::new()));
    }

    #[test]
    fn guard_miss_changes_nothing() {
        let rules = LazyRuleSet::from_json_str(ADDRESS).unwrap();
        let props = PropertyMap::new().with("city", "Passau");
        let (key, mut st) = person(props.clone());
        let before = st.store().clone();
        load_with_rules(&mut st, &key, &rules).unwrap();
        assert_eq!(st.app().get(&key), Some(&props));
        assert_eq!(st.store(), &before);
    }

    #[test]
    fn ignore_save_keeps_app_copy() {
        let rules = LazyRuleSet::from_json_str(r#"{"kind": "Person", "ignoreSave": ["street", "zip"]}"#).unwrap();
        let (key, mut st) = person(PropertyMap::new());
        st.new_entity_with(key.clone(), PropertyMap::new().with("street", "Main").with("a", 1));
        save_with_rules(&mut st, &key, &rules).unwrap();
        assert_eq!(st.store().get(&key), Some(&PropertyMap::new().with("a", 1)));
        assert!(st.app().get(&key).unwrap().contains("street"));
    }

    #[test]
    fn person_rule_sets_are_idempotent() {
        let ds: MemoryState = [
            (EntityKey::new("Person", 1), PropertyMap::new().with("name", "A")),
            (
                EntityKey::new("Person", 2),
                PropertyMap::new().with("street", "S").with("city", "C"),
            ),
            (EntityKey::new("Person", 3), PropertyMap::new()),
        ]
        .into_iter()
        .collect();
        let before = ds.clone();
        for text in [ALSO_LOAD, ADDRESS] {
            let rules = LazyRuleSet::from_json_str(text).unwrap();
            assert!(check_idempotent(&rules, &ds).unwrap().is_empty());
        }
        assert_eq!(ds, before);
    }

    #[test]
    fn constant_and_self_disabling_rules_are_idempotent() {
        let ds: MemoryState = [(EntityKey::new("P", 1), PropertyMap::new().with("flag", true))]
            .into_iter()
            .collect();
        let constant = LazyRuleSet::from_json_str(
            r#"{"kind": "P", "onLoad": [
                {"if": [], "do": [{"set": "counter", "const": 0}]},
                {"if": [], "do": [{"set": "counter2", "fromProperty": "counter"}]}]}"#,
        )
        .unwrap();
        assert!(check_idempotent(&constant, &ds).unwrap().is_empty());
        let disabling = LazyRuleSet::from_json_str(
            r#"{"kind": "P", "onLoad": [{"if": [{"has": "flag"}], "do": [{"remove": "flag"}, {"set": "n", "const": 1}]}]}"#,
        )
        .unwrap();
        assert!(check_idempotent(&disabling, &ds).unwrap().is_empty());
    }

    #[test]
    fn chained_rules_are_not_idempotent() {
        let rules = LazyRuleSet::from_json_str(
            r#"{"kind": "P", "onLoad": [
                {"if": [{"has": "b"}], "do": [{"set": "c", "fromProperty": "b"}]},
                {"if": [{"has": "a"}], "do": [{"set": "b", "fromProperty": "a"}, {"remove": "a"}]}]}"#,
        )
        .unwrap();
        let key = EntityKey::new("P", 1);
        let ds: MemoryState = [(key.clone(), PropertyMap::new().with("a", 1))].into_iter().collect();
        let w = check_idempotent(&rules, &ds).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].key, key);
        assert_eq!(w[0].first, PropertyMap::new().with("b", 1));
        assert_eq!(w[0].second, PropertyMap::new().with("b", 1).with("c", 1));
        assert!(w[0].changed_store_keys.is_empty());
    }

    #[test]
    fn wrong_kind_is_rejected_before_any_change() {
        let rules = LazyRuleSet::from_json_str(ALSO_LOAD).unwrap();
        let key = EntityKey::new("Robot", 1);
        let mut st = MachineState::with_store([(key.clone(), PropertyMap::new())].into_iter().collect());
        let before = st.clone();
        assert!(matches!(
            load_with_rules(&mut st, &key, &rules),
            Err(LazyError::KindMismatch { .. })
        ));
        assert_eq!(st, before);
    }

    #[test]
    fn missing_entity_is_an_error() {
        let rules = LazyRuleSet::from_json_str(ALSO_LOAD).unwrap();
        let mut st = MachineState::new();
        assert!(matches!(
            load_with_rules(&mut st, &EntityKey::new("Person", 1), &rules),
            Err(LazyError::Store(_))
        ));
    }

    #[test]
    fn json_round_trip_and_errors() {
        let rules = LazyRuleSet::from_json_str(ADDRESS).unwrap();
        assert_eq!(LazyRuleSet::from_json(&rules.to_json()).unwrap(), rules);
        for bad in [
            "[]",
            r#"{"kind": "P", "extra": 1}"#,
            r#"{"kind": "P", "onLoad": [{"if": [], "do": [{"set": "x"}]}]}"#,
            r#"{"kind": "P", "onLoad": [{"if": [], "do": [{"set": "x", "const": [1]}]}]}"#,
            r#"{"kind": "P", "onLoad": [{"if": [{"has": "a", "lacks": "b"}], "do": [{"remove": "a"}]}]}"#,
        ] {
            assert!(
                matches!(LazyRuleSet::from_json_str(bad), Err(RuleError::Malformed(_))),
                "{bad}"
            );
        }
        for bad in [
            r#"{"kind": "P", "ignoreSave": ["a", "a"]}"#,
            r#"{"kind": "P", "alsoLoad": [{"target": "version", "source": "v"}]}"#,
            r#"{"kind": "P", "onLoad": [{"if": [], "do": []}]}"#,
            r#"{"kind": "P", "onLoad": [{"if": [], "do": [{"spawn": {"kind": "A", "assign": [{"spawn": {"kind": "B"}}]}}]}]}"#,
        ] {
            assert!(
                matches!(LazyRuleSet::from_json_str(bad), Err(RuleError::Invalid(_))),
                "{bad}"
            );
        }
    }
}
