//! Order-independence check for move and copy.
//!
//! Add, delete and rename touch each entity of one kind once, so they are
//! safe on every store. For move and copy the checker replays both loops
//! over the initial store without writing anything and records, per target
//! entity, the first value written. A later write of a different value to
//! the same target is a conflict.
//!
//! For statements that pass validation the verdict is exact: the
//! statement is safe on `ds` iff every processing order of the loops yields
//! the same final store.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::lang::{Statement, Transfer};
use crate::model::{slot_equals, EntityKey, MemoryState, PropertyValue};
use crate::store::{key_to_json as key, value_to_json, QueryPredicate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    TriviallySafe,
    Safe,
    Unsafe,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::TriviallySafe => "trivially-safe",
            Verdict::Safe => "safe",
            Verdict::Unsafe => "unsafe",
        }
    }

    pub fn is_safe(self) -> bool {
        self != Verdict::Unsafe
    }
}

/// Two sources that would write different values to one target.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictWitness {
    pub target_key: EntityKey,
    pub property: String,
    pub first_value: Option<PropertyValue>,
    pub second_value: Option<PropertyValue>,
    pub first_source: EntityKey,
    pub second_source: EntityKey,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SafetyReport {
    pub verdict: Verdict,
    pub conflicts: Vec<ConflictWitness>,
    pub simulated_writes: usize,
    /// Sources selected by the outer loop.
    pub outer_matches: usize,
    /// Entities of the target kind satisfying the target-side conditions,
    /// before the join narrows them per source.
    pub inner_matches: usize,
}

impl SafetyReport {
    fn trivial() -> Self {
        Self {
            verdict: Verdict::TriviallySafe,
            conflicts: Vec::new(),
            simulated_writes: 0,
            outer_matches: 0,
            inner_matches: 0,
        }
    }

    pub fn is_safe(&self) -> bool {
        self.verdict.is_safe()
    }

    pub fn to_json(&self) -> Value {
        let slot = |v: &Option<PropertyValue>| v.as_ref().and_then(value_to_json).unwrap_or(Value::Null);
        json!({
            "verdict": self.verdict.as_str(),
            "simulatedWrites": self.simulated_writes,
            "outerMatches": self.outer_matches,
            "innerMatches": self.inner_matches,
            "conflicts": self.conflicts.iter().map(|c| json!({
                "targetKey": key(&c.target_key),
                "property": c.property,
                "firstSource": key(&c.first_source),
                "firstValue": slot(&c.first_value),
                "secondSource": key(&c.second_source),
                "secondValue": slot(&c.second_value),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Decides whether `stmt` is safe on `ds`. Never modifies `ds`.
pub fn check_safety(stmt: &Statement, ds: &MemoryState) -> SafetyReport {
    match stmt {
        Statement::Move(t) | Statement::Copy(t) => dry_run(t, ds),
        _ => SafetyReport::trivial(),
    }
}

/// Predicate of the outer loop: source kind plus the conditions naming it.
pub fn source_predicate(t: &Transfer) -> QueryPredicate {
    let mut pred = QueryPredicate::kind(t.source_kind());
    for c in t.source_conds() {
        pred = pred.and(c.prop.name.clone(), c.value.clone());
    }
    pred
}

/// Predicate of the inner loop before the join atom is added.
pub fn target_predicate(t: &Transfer) -> QueryPredicate {
    let mut pred = QueryPredicate::kind(t.target_kind.clone());
    for c in t.target_conds() {
        pred = pred.and(c.prop.name.clone(), c.value.clone());
    }
    pred
}

/// Inner predicate for one source, or `None` when the source's join value
/// is absent or not atomic, in which case no target matches.
pub fn join_predicate(t: &Transfer, source: &crate::model::PropertyMap) -> Option<QueryPredicate> {
    let base = target_predicate(t);
    let Some(join) = &t.join else {
        return Some(base);
    };
    let (src, tgt) = join.orient(t.source_kind(), &t.target_kind)?;
    let value = source.get(&src.name)?.as_atomic()?.clone();
    Some(base.and(tgt.name.clone(), value))
}

fn dry_run(t: &Transfer, ds: &MemoryState) -> SafetyReport {
    let outer = source_predicate(t);
    let inner = target_predicate(t);
    let targets: Vec<(&EntityKey, &crate::model::PropertyMap)> = ds
        .of_kind(&t.target_kind)
        .filter(|(k, p)| inner.matches(k, p))
        .collect();

    let mut report = SafetyReport {
        verdict: Verdict::Safe,
        conflicts: Vec::new(),
        simulated_writes: 0,
        outer_matches: 0,
        inner_matches: targets.len(),
    };
    let mut first_write: BTreeMap<&EntityKey, (&EntityKey, Option<&PropertyValue>)> = BTreeMap::new();

    for (src_key, src) in ds.of_kind(t.source_kind()).filter(|(k, p)| outer.matches(k, p)) {
        report.outer_matches += 1;
        let Some(pred) = join_predicate(t, src) else {
            continue;
        };
        let value = src.get(&t.source.name);
        for (tgt_key, tgt) in &targets {
            if !pred.matches(tgt_key, tgt) {
                continue;
            }
            report.simulated_writes += 1;
            match first_write.get(tgt_key) {
                None => {
                    first_write.insert(tgt_key, (src_key, value));
                }
                Some((first_src, first_val)) if !slot_equals(*first_val, value) => {
                    report.conflicts.push(ConflictWitness {
                        target_key: (*tgt_key).clone(),
                        property: t.source.name.clone(),
                        first_value: first_val.cloned(),
                        second_value: value.cloned(),
                        first_source: (*first_src).clone(),
                        second_source: src_key.clone(),
                    });
                }
                Some(_) => {}
            }
        }
    }
    if !report.conflicts.is_empty() {
        report.verdict = Verdict::Unsafe;
    }
    report
}

fn show_slot(v: &Option<PropertyValue>) -> String {
    match v.as_ref().and_then(value_to_json) {
        Some(j) => j.to_string(),
        None => "(undefined)".to_owned(),
    }
}

/// Human-readable summary of a report.
pub fn explain_report(report: &SafetyReport) -> String {
    match report.verdict {
        Verdict::TriviallySafe => "safe: single-kind operation".to_owned(),
        Verdict::Safe => format!("safe; {} simulated writes, no conflicts", report.simulated_writes),
        Verdict::Unsafe => {
            let mut out = format!(
                "unsafe; {} simulated writes, {} conflict(s): the processing order changes the result",
                report.simulated_writes,
                report.conflicts.len()
            );
            for c in &report.conflicts {
                let _ = write!(
                    out,
                    "\n  {}.{}: {} writes {}, {} writes {}",
                    c.target_key,
                    c.property,
                    c.first_source,
                    show_slot(&c.first_value),
                    c.second_source,
                    show_slot(&c.second_value),
                );
            }
            out
        }
    }
}
