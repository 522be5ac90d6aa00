//! Eager migration: runs a statement over every qualifying entity, going
//! through the application state and writing back with `put`, one entity at
//! a time. Every write bumps the entity's `version` (missing counts as 0).

use std::fmt;

use thiserror::Error;

use crate::lang::{has_errors, validate_statement, Diagnostic, Statement, Transfer};
use crate::model::{EntityKey, PropertyValue, VERSION_PROPERTY};
use crate::safety::{check_safety, join_predicate, source_predicate, SafetyReport};
use crate::store::{MachineState, QueryPredicate, StoreError};

/// Chooses the processing order of a `foreach` loop. `depth` is 0 for the
/// outer loop and 1 for the inner loop of move/copy. Keys arrive sorted.
pub trait ForeachOrder {
    fn arrange(&mut self, depth: usize, keys: &mut [EntityKey]);
}

/// Key order, unchanged.
#[derive(Debug, Default, Clone, Copy)]
pub struct KeyOrder;

impl ForeachOrder for KeyOrder {
    fn arrange(&mut self, _: usize, _: &mut [EntityKey]) {}
}

impl<F: FnMut(usize, &mut [EntityKey])> ForeachOrder for F {
    fn arrange(&mut self, depth: usize, keys: &mut [EntityKey]) {
        self(depth, keys)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub key: EntityKey,
    pub op: &'static str,
    pub old_version: Option<i64>,
    pub new_version: i64,
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let old = self.old_version.map_or("-".to_owned(), |v| v.to_string());
        write!(
            f,
            "put {} {} version {} -> {}",
            self.key, self.op, old, self.new_version
        )
    }
}

/// Degenerate cases that execute literally but deserve the operator's
/// attention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MigrationWarning {
    /// A matched entity lacks the property being renamed, moved or
    /// copied, so its undefined value is written.
    MissingProperty { key: EntityKey, property: String },
    /// A move source matched no target but still loses its property.
    NoTargets { source: EntityKey },
    /// The source's join value is absent or not atomic, so it selects no
    /// target.
    UnusableJoinValue { source: EntityKey, property: String },
}

impl fmt::Display for MigrationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MigrationWarning::MissingProperty { key, property } => {
                write!(f, "{key} has no property `{property}`; writing undefined")
            }
            MigrationWarning::NoTargets { source } => {
                write!(f, "{source} matched no target entity")
            }
            MigrationWarning::UnusableJoinValue { source, property } => {
                write!(
                    f,
                    "{source}.{property} is absent or not atomic; no join partner possible"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MigrationResult {
    /// Entities selected: all matches for add/delete/rename, sources for
    /// move/copy.
    pub entities_matched: usize,
    /// Puts of migrated entities (targets for move/copy).
    pub entities_written: usize,
    /// Puts of move sources.
    pub source_entities_modified: usize,
    pub final_state: MachineState,
    pub log: Vec<LogEntry>,
    pub warnings: Vec<MigrationWarning>,
    /// False when a put limit stopped the run early.
    pub completed: bool,
    pub safety_waived: bool,
}

#[derive(Debug, Error)]
pub enum MigrationError {
    #[error("invalid statement: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("unsafe statement: {} conflict(s)", .0.conflicts.len())]
    Unsafe(Box<SafetyReport>),
    #[error("entity {0} has a non-integer version")]
    InvalidVersion(EntityKey),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Configurable executor. The defaults check safety first, process
/// entities in key order and never stop early.
pub struct Executor<'a> {
    order: Box<dyn ForeachOrder + 'a>,
    put_limit: Option<usize>,
    waive_safety: bool,
}

impl Default for Executor<'_> {
    fn default() -> Self {
        Self::new()
    }
}

impl<'a> Executor<'a> {
    pub fn new() -> Self {
        Self {
            order: Box::new(KeyOrder),
            put_limit: None,
            waive_safety: false,
        }
    }

    pub fn order(mut self, order: impl ForeachOrder + 'a) -> Self {
        self.order = Box::new(order);
        self
    }

    /// Stops before the `(limit + 1)`-th put, simulating an interruption.
    pub fn put_limit(mut self, limit: usize) -> Self {
        self.put_limit = Some(limit);
        self
    }

    /// Skips the safety check; the result is marked accordingly.
    pub fn waive_safety(mut self, waive: bool) -> Self {
        self.waive_safety = waive;
        self
    }

    pub fn run(mut self, stmt: &Statement, st: MachineState) -> Result<MigrationResult, MigrationError> {
        let diags = validate_statement(stmt);
        if has_errors(&diags) {
            return Err(MigrationError::Invalid(
                diags.into_iter().filter(Diagnostic::is_error).collect(),
            ));
        }
        if !self.waive_safety {
            let report = check_safety(stmt, st.store());
            if !report.is_safe() {
                return Err(MigrationError::Unsafe(Box::new(report)));
            }
        }
        let mut run = Run {
            st,
            order: &mut *self.order,
            put_limit: self.put_limit,
            log: Vec::new(),
            warnings: Vec::new(),
            matched: 0,
            written: 0,
            source_written: 0,
        };
        let completed = match run.statement(stmt) {
            Ok(()) => true,
            Err(Stop::Interrupted) => false,
            Err(Stop::Failed(e)) => return Err(e),
        };
        Ok(MigrationResult {
            entities_matched: run.matched,
            entities_written: run.written,
            source_entities_modified: run.source_written,
            final_state: run.st,
            log: run.log,
            warnings: run.warnings,
            completed,
            safety_waived: self.waive_safety,
        })
    }
}

/// Runs `stmt` with the default executor: safety-checked, key order.
pub fn execute(stmt: &Statement, st: MachineState) -> Result<MigrationResult, MigrationError> {
    Executor::new().run(stmt, st)
}

enum Stop {
    Interrupted,
    Failed(MigrationError),
}

impl From<StoreError> for Stop {
    fn from(e: StoreError) -> Self {
        Stop::Failed(e.into())
    }
}

struct Run<'o> {
    st: MachineState,
    order: &'o mut dyn ForeachOrder,
    put_limit: Option<usize>,
    log: Vec<LogEntry>,
    warnings: Vec<MigrationWarning>,
    matched: usize,
    written: usize,
    source_written: usize,
}

fn selection(kind: &str, conds: &[crate::lang::EqCond]) -> QueryPredicate {
    conds.iter().fold(QueryPredicate::kind(kind), |p, c| {
        p.and(c.prop.name.clone(), c.value.clone())
    })
}

impl Run<'_> {
    fn foreach(&mut self, depth: usize, pred: &QueryPredicate) -> Vec<EntityKey> {
        let mut keys = self.st.query(pred);
        self.order.arrange(depth, &mut keys);
        keys
    }

    /// `setProperty(e, version, getProperty(e, version) + 1); put(e)`
    fn bump_and_put(&mut self, key: &EntityKey, op: &'static str) -> Result<(), Stop> {
        if self.put_limit.is_some_and(|limit| self.log.len() >= limit) {
            return Err(Stop::Interrupted);
        }
        let old = match self.st.app().get(key).map(|p| p.version()) {
            Some(Ok(v)) => v,
            Some(Err(_)) => return Err(Stop::Failed(MigrationError::InvalidVersion(key.clone()))),
            None => {
                return Err(StoreError::NoSuchEntity {
                    key: key.clone(),
                    side: crate::store::Side::App,
                }
                .into())
            }
        };
        let new = old.unwrap_or(0) + 1;
        self.st.set_property(key, VERSION_PROPERTY, new)?;
        self.st.put(key)?;
        self.log.push(LogEntry {
            key: key.clone(),
            op,
            old_version: old,
            new_version: new,
        });
        Ok(())
    }

    fn statement(&mut self, stmt: &Statement) -> Result<(), Stop> {
        let op = stmt.op_name();
        match stmt {
            Statement::Add {
                target,
                value,
                selection: conds,
            } => {
                for e in self.foreach(0, &selection(&target.kind, conds)) {
                    self.matched += 1;
                    self.st.set_property(&e, &target.name, value.clone())?;
                    self.bump_and_put(&e, op)?;
                    self.written += 1;
                }
            }
            Statement::Delete {
                target,
                selection: conds,
            } => {
                for e in self.foreach(0, &selection(&target.kind, conds)) {
                    self.matched += 1;
                    self.st.remove_property(&e, &target.name)?;
                    self.bump_and_put(&e, op)?;
                    self.written += 1;
                }
            }
            Statement::Rename {
                target,
                new_name,
                selection: conds,
            } => {
                for e in self.foreach(0, &selection(&target.kind, conds)) {
                    self.matched += 1;
                    let value = self.read(&e, &target.name)?;
                    self.st.assign(&e, new_name, value)?;
                    self.st.remove_property(&e, &target.name)?;
                    self.bump_and_put(&e, op)?;
                    self.written += 1;
                }
            }
            Statement::Move(t) => self.transfer(t, op, true)?,
            Statement::Copy(t) => self.transfer(t, op, false)?,
        }
        Ok(())
    }

    /// `getProperty(e, n)`, warning when undefined.
    fn read(&mut self, key: &EntityKey, name: &str) -> Result<Option<PropertyValue>, Stop> {
        let value = self.st.get_property(key, name)?.cloned();
        if value.is_none() {
            self.warnings.push(MigrationWarning::MissingProperty {
                key: key.clone(),
                property: name.to_owned(),
            });
        }
        Ok(value)
    }

    fn transfer(&mut self, t: &Transfer, op: &'static str, remove_source: bool) -> Result<(), Stop> {
        let name = t.source.name.as_str();
        for e in self.foreach(0, &source_predicate(t)) {
            self.matched += 1;
            let src = self.st.app().get(&e).cloned().ok_or_else(|| StoreError::NoSuchEntity {
                key: e.clone(),
                side: crate::store::Side::App,
            })?;
            let value = self.read(&e, name)?;
            let targets = match join_predicate(t, &src) {
                Some(pred) => self.foreach(1, &pred),
                None => {
                    let property = t.join.as_ref().and_then(|j| j.orient(t.source_kind(), &t.target_kind));
                    self.warnings.push(MigrationWarning::UnusableJoinValue {
                        source: e.clone(),
                        property: property.map_or_else(String::new, |(s, _)| s.name.clone()),
                    });
                    Vec::new()
                }
            };
            if targets.is_empty() && remove_source {
                self.warnings.push(MigrationWarning::NoTargets { source: e.clone() });
            }
            for f in targets {
                self.st.assign(&f, name, value.clone())?;
                self.bump_and_put(&f, op)?;
                self.written += 1;
            }
            if remove_source {
                self.st.remove_property(&e, name)?;
                self.bump_and_put(&e, op)?;
                self.source_written += 1;
            }
        }
        Ok(())
    }
}
