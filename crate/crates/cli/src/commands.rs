use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use evolve_core::lang::{is_identifier, parse, tokenize, Located, Parsed, Statement, TokenKind};
use evolve_core::lazy::{check_idempotent, load_with_rules, LazyRuleSet};
use evolve_core::store::{dump_store, entity_to_json, key_to_json, load_store, value_to_json, write_store};
use evolve_core::{
    check_safety, explain_report, format_statement, AtomicValue, EntityKey, Executor, MachineState, MemoryState,
    PropertyMap, QueryPredicate,
};
use serde_json::{json, Value};

use crate::lock::StoreLock;
use crate::{Config, Output};

const VERDICT_FAILED: u8 = 3;

/// Errors that end a command early. Verdicts (unsafe, not idempotent) are
/// not failures; they come back as exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad statement, filter, rules file or arguments: exit 2.
    Input(String),
    /// Store or rules file unreadable or unwritable, or store locked: exit 4.
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Io(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn io_failure(context: impl fmt::Display) -> impl FnOnce(io::Error) -> Failure {
    move |e| Failure::Io(format!("{context}: {e}"))
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::Io(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn emit_json(doc: &Value) -> Result<(), Failure> {
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(doc).expect("json values serialize")
    ))
}

fn statement_text(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).map_err(io_failure("stdin"))?;
        Ok(text)
    } else {
        Ok(arg.to_owned())
    }
}

fn parse_arg(arg: &str) -> Result<Parsed, Failure> {
    let text = statement_text(arg)?;
    parse(&text).map_err(|e| Failure::Input(e.to_string()))
}

fn report_warnings(config: &Config, warnings: &[Located]) {
    if config.output == Output::Text {
        for w in warnings {
            eprintln!("{w}");
        }
    }
}

/// An open store: the lock is held until this is dropped.
struct OpenStore<'a> {
    path: &'a Path,
    data: MemoryState,
    _lock: StoreLock,
}

fn open_store(config: &Config) -> Result<OpenStore<'_>, Failure> {
    let path = config
        .store
        .as_deref()
        .ok_or_else(|| Failure::Input("this command needs --store PATH".into()))?;
    let lock = StoreLock::acquire(path).map_err(io_failure(path.display()))?;
    let data = load_store(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(OpenStore {
        path,
        data,
        _lock: lock,
    })
}

impl OpenStore<'_> {
    fn save(&self, ds: &MemoryState) -> Result<(), Failure> {
        dump_store(ds, self.path).map_err(|e| Failure::Io(format!("{}: {e}", self.path.display())))
    }
}

fn entity_json(key: &EntityKey, props: &PropertyMap) -> Result<Value, Failure> {
    entity_to_json(key, props).map_err(|e| Failure::Io(e.to_string()))
}

fn warning_strings(warnings: &[Located]) -> Vec<String> {
    warnings.iter().map(ToString::to_string).collect()
}

pub fn exec(config: &Config, arg: &str) -> CmdResult {
    let parsed = parse_arg(arg)?;
    let stmt = &parsed.statement;
    report_warnings(config, &parsed.warnings);
    let store = open_store(config)?;
    let report = check_safety(stmt, &store.data);

    if !report.is_safe() && !config.force {
        match config.output {
            Output::Text => {
                eprintln!("{}", explain_report(&report));
                eprintln!("refusing to execute an unsafe statement; rerun with --force to override");
            }
            Output::Json => emit_json(&json!({
                "statement": format_statement(stmt),
                "refused": true,
                "warnings": warning_strings(&parsed.warnings),
                "safety": report.to_json(),
            }))?,
        }
        return Ok(ExitCode::from(VERDICT_FAILED));
    }
    if !report.is_safe() && config.output == Output::Text {
        eprintln!(
            "warning: executing despite {} conflict(s) because of --force",
            report.conflicts.len()
        );
    }

    let result = Executor::new()
        .waive_safety(true)
        .run(stmt, MachineState::with_store(store.data.clone()))
        .map_err(|e| Failure::Io(format!("{}: {e}", store.path.display())))?;
    if !config.dry_run {
        store.save(result.final_state.store())?;
    }

    match config.output {
        Output::Text => {
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            let mut line = format!(
                "matched {}, written {}",
                result.entities_matched, result.entities_written
            );
            if matches!(stmt, Statement::Move(_)) {
                line += &format!(", sources modified {}", result.source_entities_modified);
            }
            if config.dry_run {
                line += "\ndry run: store not modified";
            }
            emit(&format!("{line}\n"))
        }
        Output::Json => emit_json(&json!({
            "statement": format_statement(stmt),
            "refused": false,
            "forced": config.force,
            "dryRun": config.dry_run,
            "matched": result.entities_matched,
            "written": result.entities_written,
            "sourcesModified": result.source_entities_modified,
            "log": result.log.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "warnings": warning_strings(&parsed.warnings)
                .into_iter()
                .chain(result.warnings.iter().map(ToString::to_string))
                .collect::<Vec<_>>(),
            "safety": report.to_json(),
        })),
    }?;
    Ok(ExitCode::SUCCESS)
}

pub fn check(config: &Config, arg: &str) -> CmdResult {
    let parsed = parse_arg(arg)?;
    report_warnings(config, &parsed.warnings);
    let store = open_store(config)?;
    let report = check_safety(&parsed.statement, &store.data);
    match config.output {
        Output::Text => emit(&format!("{}\n", explain_report(&report)))?,
        Output::Json => emit_json(&json!({
            "statement": format_statement(&parsed.statement),
            "warnings": warning_strings(&parsed.warnings),
            "safety": report.to_json(),
        }))?,
    }
    Ok(if report.is_safe() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(VERDICT_FAILED)
    })
}

/// `name=value`, where the value is read as a statement literal if it is
/// one and as plain text otherwise.
pub fn parse_filter(filter: &str) -> Result<(String, AtomicValue), Failure> {
    let bad = |why: &str| Failure::Input(format!("bad filter `{filter}`: {why}"));
    let (name, raw) = filter.split_once('=').ok_or_else(|| bad("expected name=value"))?;
    let name = name.trim();
    if !is_identifier(name) {
        return Err(bad("property name is not an identifier"));
    }
    let value = match tokenize(raw).as_deref() {
        Ok([tok]) => match &tok.kind {
            TokenKind::Literal(v) => v.clone(),
            _ => AtomicValue::Text(raw.to_owned()),
        },
        Err(e) if raw.trim_start().starts_with('"') => return Err(bad(&e.message)),
        _ => AtomicValue::Text(raw.to_owned()),
    };
    Ok((name.to_owned(), value))
}

fn load_rules(path: &Path) -> Result<LazyRuleSet, Failure> {
    let text = fs::read_to_string(path).map_err(io_failure(path.display()))?;
    LazyRuleSet::from_json_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn get(config: &Config, kind: &str, filters: &[String]) -> CmdResult {
    if !is_identifier(kind) {
        return Err(Failure::Input(format!("`{kind}` is not a kind name")));
    }
    let pred = filters.iter().try_fold(QueryPredicate::kind(kind), |p, f| {
        parse_filter(f).map(|(n, v)| p.and(n, v))
    })?;
    let rules = config.rules.as_deref().map(load_rules).transpose()?;
    if let Some(r) = &rules {
        if r.kind != kind {
            return Err(Failure::Input(format!("rules are for kind `{}`, not `{kind}`", r.kind)));
        }
    }
    let store = open_store(config)?;
    let keys: Vec<EntityKey> = store
        .data
        .iter()
        .filter(|(k, p)| pred.matches(k, p))
        .map(|(k, _)| k.clone())
        .collect();

    let mut entities = Vec::new();
    let mut store_writes = Vec::new();
    match &rules {
        None => {
            for key in &keys {
                entities.push(entity_json(key, store.data.get(key).expect("matched key"))?);
            }
        }
        Some(rules) => {
            let mut st = MachineState::with_store(store.data.clone());
            for key in &keys {
                load_with_rules(&mut st, key, rules).map_err(|e| Failure::Input(e.to_string()))?;
                entities.push(entity_json(key, st.app().get(key).expect("loaded key"))?);
            }
            store_writes = st
                .store()
                .iter()
                .filter(|(k, p)| store.data.get(k) != Some(*p))
                .map(|(k, _)| k.clone())
                .collect();
            if !store_writes.is_empty() && !config.dry_run {
                store.save(st.store())?;
            }
        }
    }

    match config.output {
        Output::Text => {
            let mut out = String::new();
            for e in &entities {
                out += &format!("{e}\n");
            }
            emit(&out)?;
            if !store_writes.is_empty() {
                let verb = if config.dry_run { "would store" } else { "stored" };
                let n = store_writes.len();
                eprintln!(
                    "{verb} {n} {} written by load rules",
                    if n == 1 { "entity" } else { "entities" }
                );
            }
        }
        Output::Json => emit_json(&json!({
            "entities": entities,
            "storeWrites": store_writes.iter().map(key_to_json).collect::<Vec<_>>(),
            "dryRun": config.dry_run,
        }))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn diff(first: &PropertyMap, second: &PropertyMap) -> Vec<(String, Value, Value)> {
    let mut names: Vec<&str> = first.names().chain(second.names()).collect();
    names.sort_unstable();
    names.dedup();
    let slot = |p: &PropertyMap, n: &str| p.get(n).and_then(value_to_json).unwrap_or(Value::Null);
    names
        .into_iter()
        .filter(|n| first.get(n) != second.get(n))
        .map(|n| (n.to_owned(), slot(first, n), slot(second, n)))
        .collect()
}

fn shown(v: &Value) -> String {
    if v.is_null() {
        "absent".into()
    } else {
        v.to_string()
    }
}

pub fn check_lazy(config: &Config) -> CmdResult {
    let path = config
        .rules
        .as_deref()
        .ok_or_else(|| Failure::Input("check-lazy needs --rules PATH".into()))?;
    let rules = load_rules(path)?;
    let store = open_store(config)?;
    let witnesses = check_idempotent(&rules, &store.data).map_err(|e| Failure::Input(e.to_string()))?;
    let checked = store.data.of_kind(&rules.kind).count();

    match config.output {
        Output::Text => {
            let mut out = String::new();
            for w in &witnesses {
                out += &format!("not idempotent: {}\n", w.key);
                for (n, a, b) in diff(&w.first, &w.second) {
                    out += &format!("  {n}: {} -> {}\n", shown(&a), shown(&b));
                }
                if !w.changed_store_keys.is_empty() {
                    let keys: Vec<String> = w.changed_store_keys.iter().map(ToString::to_string).collect();
                    out += &format!("  store rewritten: {}\n", keys.join(", "));
                }
            }
            if witnesses.is_empty() {
                out += &format!("idempotent: {checked} {} entities checked\n", rules.kind);
            } else {
                out += &format!(
                    "{} of {checked} {} entities not idempotent\n",
                    witnesses.len(),
                    rules.kind
                );
            }
            emit(&out)?;
        }
        Output::Json => {
            let ws: Vec<Value> = witnesses
                .iter()
                .map(|w| {
                    json!({
                        "key": key_to_json(&w.key),
                        "diff": diff(&w.first, &w.second)
                            .into_iter()
                            .map(|(n, a, b)| json!({"property": n, "first": a, "second": b}))
                            .collect::<Vec<_>>(),
                        "changedStoreKeys": w.changed_store_keys.iter().map(key_to_json).collect::<Vec<_>>(),
                    })
                })
                .collect();
            emit_json(&json!({
                "kind": rules.kind,
                "checked": checked,
                "idempotent": witnesses.is_empty(),
                "witnesses": ws,
            }))?;
        }
    }
    Ok(if witnesses.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(VERDICT_FAILED)
    })
}

pub fn fmt(config: &Config, arg: &str) -> CmdResult {
    let parsed = parse_arg(arg)?;
    report_warnings(config, &parsed.warnings);
    let text = format_statement(&parsed.statement);
    match config.output {
        Output::Text => emit(&format!("{text}\n"))?,
        Output::Json => emit_json(&json!({
            "statement": text,
            "warnings": warning_strings(&parsed.warnings),
        }))?,
    }
    Ok(ExitCode::SUCCESS)
}

pub fn dump(config: &Config) -> CmdResult {
    let store = open_store(config)?;
    match config.output {
        Output::Text => {
            let mut buf = Vec::new();
            write_store(&store.data, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            emit(&String::from_utf8(buf).expect("store lines are utf-8"))?;
        }
        Output::Json => {
            let entities = store
                .data
                .iter()
                .map(|(k, p)| entity_json(k, p))
                .collect::<Result<Vec<_>, _>>()?;
            emit_json(&json!({ "entities": entities }))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
