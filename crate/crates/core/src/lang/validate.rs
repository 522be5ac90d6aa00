//! Static checks on statements beyond what the grammar enforces.

use std::fmt;

use serde::Serialize;

use super::ast::{EqCond, PropertyRef, Statement, Transfer};
use super::lexer::is_identifier;
use crate::model::{AtomicValue, VERSION_PROPERTY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// The rule a diagnostic reports on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// A kind or property name is not a valid identifier.
    InvalidIdentifier,
    /// The statement would write `version` directly.
    ReservedProperty,
    /// An add/delete/rename condition names another kind.
    SelectionKindMismatch,
    /// A move/copy condition names neither the source nor the target kind.
    ConditionKindMismatch,
    /// Move/copy from a kind onto itself.
    TransferWithinKind,
    /// Both sides of a join name the same kind.
    JoinSameKind,
    /// A join does not relate the source kind to the target kind.
    JoinKindMismatch,
    /// The target side of a join is the transferred property or `version`,
    /// both of which the migration itself rewrites.
    JoinOnRewrittenProperty,
    /// A float literal is NaN or infinite.
    NonFiniteLiteral,
    /// Move/copy without a join pairs every source with every target.
    CrossProduct,
}

impl Rule {
    pub fn code(self) -> &'static str {
        match self {
            Rule::InvalidIdentifier => "invalid-identifier",
            Rule::ReservedProperty => "reserved-property",
            Rule::SelectionKindMismatch => "selection-kind-mismatch",
            Rule::ConditionKindMismatch => "condition-kind-mismatch",
            Rule::TransferWithinKind => "transfer-within-kind",
            Rule::JoinSameKind => "join-same-kind",
            Rule::JoinKindMismatch => "join-kind-mismatch",
            Rule::JoinOnRewrittenProperty => "join-on-rewritten-property",
            Rule::NonFiniteLiteral => "non-finite-literal",
            Rule::CrossProduct => "cross-product",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Rule::CrossProduct => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

/// Part of a statement a diagnostic points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "at", content = "index")]
pub enum Location {
    Statement,
    /// The target (add/delete/rename) or source (move/copy) property.
    Subject,
    /// The new name of a rename, or the target kind of a move/copy.
    Destination,
    Value,
    Join,
    Condition(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub rule: Rule,
    pub location: Location,
    pub message: String,
}

impl Diagnostic {
    fn new(rule: Rule, location: Location, message: String) -> Self {
        Self {
            severity: rule.severity(),
            rule,
            location,
            message,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level}[{}]: {}", self.rule.code(), self.message)
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

/// Checks a statement. An empty list means every invariant holds; warnings
/// flag statements that are well formed but need a safety check.
pub fn validate_statement(stmt: &Statement) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    match stmt {
        Statement::Add {
            target,
            value,
            selection,
        } => {
            check_subject(&mut out, target);
            check_literal(&mut out, value, Location::Value);
            check_selection(&mut out, &target.kind, selection);
        }
        Statement::Delete { target, selection } => {
            check_subject(&mut out, target);
            check_selection(&mut out, &target.kind, selection);
        }
        Statement::Rename {
            target,
            new_name,
            selection,
        } => {
            check_subject(&mut out, target);
            if !is_identifier(new_name) {
                out.push(Diagnostic::new(
                    Rule::InvalidIdentifier,
                    Location::Destination,
                    format!("`{new_name}` is not a valid property name"),
                ));
            } else if new_name == VERSION_PROPERTY {
                out.push(Diagnostic::new(
                    Rule::ReservedProperty,
                    Location::Destination,
                    format!("cannot rename to the reserved property `{VERSION_PROPERTY}`"),
                ));
            }
            check_selection(&mut out, &target.kind, selection);
        }
        Statement::Move(t) | Statement::Copy(t) => check_transfer(&mut out, t),
    }
    out
}

fn check_ref(out: &mut Vec<Diagnostic>, prop: &PropertyRef, location: Location) -> bool {
    let mut ok = true;
    for part in [&prop.kind, &prop.name] {
        if !is_identifier(part) {
            out.push(Diagnostic::new(
                Rule::InvalidIdentifier,
                location,
                format!("`{part}` in `{prop}` is not a valid identifier"),
            ));
            ok = false;
        }
    }
    ok
}

fn check_subject(out: &mut Vec<Diagnostic>, prop: &PropertyRef) {
    if check_ref(out, prop, Location::Subject) && prop.name == VERSION_PROPERTY {
        out.push(Diagnostic::new(
            Rule::ReservedProperty,
            Location::Subject,
            format!("`{prop}` is the reserved version property"),
        ));
    }
}

fn check_literal(out: &mut Vec<Diagnostic>, value: &AtomicValue, location: Location) {
    if let AtomicValue::Float(v) = value {
        if !v.is_finite() {
            out.push(Diagnostic::new(
                Rule::NonFiniteLiteral,
                location,
                format!("float literal {v} is not finite"),
            ));
        }
    }
}

fn check_selection(out: &mut Vec<Diagnostic>, kind: &str, selection: &[EqCond]) {
    for (i, cond) in selection.iter().enumerate() {
        let loc = Location::Condition(i);
        if check_ref(out, &cond.prop, loc) && cond.prop.kind != kind {
            out.push(Diagnostic::new(
                Rule::SelectionKindMismatch,
                loc,
                format!("selection kind mismatch: `{}` does not belong to `{kind}`", cond.prop),
            ));
        }
        check_literal(out, &cond.value, loc);
    }
}

fn check_transfer(out: &mut Vec<Diagnostic>, t: &Transfer) {
    check_subject(out, &t.source);
    let source_kind = t.source.kind.as_str();
    let target_kind = t.target_kind.as_str();
    if !is_identifier(target_kind) {
        out.push(Diagnostic::new(
            Rule::InvalidIdentifier,
            Location::Destination,
            format!("`{target_kind}` is not a valid kind"),
        ));
    } else if source_kind == target_kind {
        out.push(Diagnostic::new(
            Rule::TransferWithinKind,
            Location::Destination,
            format!("source and target kind are both `{target_kind}`"),
        ));
    }

    match &t.join {
        None => out.push(Diagnostic::new(
            Rule::CrossProduct,
            Location::Statement,
            "cross-product migration: safety check required".into(),
        )),
        Some(join) => {
            let ok = check_ref(out, &join.left, Location::Join) & check_ref(out, &join.right, Location::Join);
            if ok && join.left.kind == join.right.kind {
                out.push(Diagnostic::new(
                    Rule::JoinSameKind,
                    Location::Join,
                    format!("join must span two kinds, both sides name `{}`", join.left.kind),
                ));
            } else if ok {
                match join.orient(source_kind, target_kind) {
                    None => out.push(Diagnostic::new(
                        Rule::JoinKindMismatch,
                        Location::Join,
                        format!(
                            "join `{} = {}` must relate `{source_kind}` and `{target_kind}`",
                            join.left, join.right
                        ),
                    )),
                    Some((_, target_side)) => {
                        if target_side.name == t.source.name || target_side.name == VERSION_PROPERTY {
                            out.push(Diagnostic::new(
                                Rule::JoinOnRewrittenProperty,
                                Location::Join,
                                format!("join on `{target_side}`, which the migration itself rewrites"),
                            ));
                        }
                    }
                }
            }
        }
    }

    for (i, cond) in t.conds.iter().enumerate() {
        let loc = Location::Condition(i);
        if check_ref(out, &cond.prop, loc) && cond.prop.kind != source_kind && cond.prop.kind != target_kind {
            out.push(Diagnostic::new(
                Rule::ConditionKindMismatch,
                loc,
                format!(
                    "condition `{}` names neither `{source_kind}` nor `{target_kind}`",
                    cond.prop
                ),
            ));
        }
        check_literal(out, &cond.value, loc);
    }
}
