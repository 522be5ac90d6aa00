//! Schema evolution for schemaless entity stores.
//!
//! [`model`] holds entities and memory states, [`store`] the machine state
//! with its `put`/`get`/query operations and the on-disk format. Statements
//! of the evolution language live in [`lang`]; [`migrate`] executes them
//! eagerly after [`safety`] has checked that the processing order cannot
//! matter. [`lazy`] applies migration rules at load time instead.

pub mod lang;
pub mod lazy;
pub mod migrate;
pub mod model;
pub mod safety;
pub mod store;

pub use lang::{format_statement, parse_statement, validate_statement, Statement};
pub use lazy::{check_idempotent, load_with_rules, save_with_rules, LazyRuleSet};
pub use migrate::{execute, Executor, ForeachOrder, MigrationError, MigrationResult};
pub use model::{AtomicValue, EntityId, EntityKey, MemoryState, PropertyMap, PropertyValue, Substitution};
pub use safety::{check_safety, explain_report, SafetyReport, Verdict};
pub use store::{MachineState, QueryPredicate};
