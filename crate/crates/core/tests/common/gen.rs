//! Seeded random stores and statements. Value pools are tiny on purpose so
//! that joins, selections and conflicting writes actually happen.

use evolve_core::lang::{has_errors, validate_statement, EqCond, JoinCond, PropertyRef, Statement, Transfer};
use evolve_core::{AtomicValue, EntityId, EntityKey, MemoryState, PropertyMap, PropertyValue};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const KINDS: [&str; 2] = ["user", "blogpost"];
pub const NAMES: [&str; 6] = ["name", "author", "url", "likes", "tags", "meta"];
const TEXTS: [&str; 4] = ["Ann", "Bob", "u1", "u2"];

pub fn atomic(r: &mut Rng8) -> AtomicValue {
    match r.gen_range(0..10) {
        0..=4 => AtomicValue::Text(TEXTS.choose(r).unwrap().to_string()),
        5..=7 => AtomicValue::Int(r.gen_range(0..3)),
        8 => AtomicValue::Float([1.5, -2.0].choose(r).copied().unwrap()),
        _ => AtomicValue::Bool(r.gen()),
    }
}

pub fn value(r: &mut Rng8) -> PropertyValue {
    match r.gen_range(0..10) {
        0..=6 => PropertyValue::Atomic(atomic(r)),
        7 | 8 => PropertyValue::list((0..r.gen_range(1..=3)).map(|_| atomic(r))).unwrap(),
        _ => PropertyValue::Nested(PropertyMap::new().with("x", atomic(r))),
    }
}

fn entity_id(r: &mut Rng8) -> EntityId {
    if r.gen_bool(0.8) {
        EntityId::Int(r.gen_range(-5..40))
    } else {
        EntityId::Str(["a", "b", "x7", "007"].choose(r).unwrap().to_string())
    }
}

pub fn props(r: &mut Rng8) -> PropertyMap {
    let mut p = PropertyMap::new();
    for n in NAMES {
        if r.gen_bool(0.5) {
            p.set(n, value(r));
        }
    }
    if r.gen_bool(0.9) {
        p.set("version", r.gen_range(0..3i64));
    }
    p
}

/// Up to `max` entities per kind.
pub fn store(r: &mut Rng8, max_per_kind: usize) -> MemoryState {
    let mut ms = MemoryState::new();
    for kind in KINDS {
        let n = r.gen_range(0..=max_per_kind);
        while ms.of_kind(kind).count() < n {
            let key = EntityKey::new(kind, entity_id(r));
            ms.insert(key, props(r));
        }
    }
    ms
}

fn name(r: &mut Rng8) -> String {
    NAMES.choose(r).unwrap().to_string()
}

fn cond(r: &mut Rng8, kind: &str) -> EqCond {
    if r.gen_bool(0.35) {
        version_cond(r, kind)
    } else {
        EqCond::new(PropertyRef::new(kind, name(r)), atomic(r))
    }
}

fn version_cond(r: &mut Rng8, kind: &str) -> EqCond {
    EqCond::new(PropertyRef::new(kind, "version"), r.gen_range(0..3i64))
}

fn selection(r: &mut Rng8, kind: &str, guarded: bool) -> Vec<EqCond> {
    let mut conds: Vec<EqCond> = (0..r.gen_range(0..=2)).map(|_| cond(r, kind)).collect();
    if guarded {
        conds.push(version_cond(r, kind));
        conds.shuffle(r);
    }
    conds
}

pub fn single_kind_statement(r: &mut Rng8) -> Statement {
    loop {
        let kind = *KINDS.choose(r).unwrap();
        let target = PropertyRef::new(kind, name(r));
        let guarded = r.gen_bool(0.4);
        let stmt = match r.gen_range(0..3) {
            0 => Statement::Add {
                target,
                value: atomic(r),
                selection: selection(r, kind, guarded),
            },
            1 => Statement::Delete {
                target,
                selection: selection(r, kind, guarded),
            },
            _ => Statement::Rename {
                target,
                new_name: name(r),
                selection: selection(r, kind, guarded),
            },
        };
        if !has_errors(&validate_statement(&stmt)) {
            return stmt;
        }
    }
}

pub fn transfer_statement(r: &mut Rng8) -> Statement {
    loop {
        let (c1, c2) = if r.gen_bool(0.5) {
            ("user", "blogpost")
        } else {
            ("blogpost", "user")
        };
        let source = PropertyRef::new(c1, name(r));
        let join = r.gen_bool(0.7).then(|| {
            let src_side = if r.gen_bool(0.15) {
                "version".to_owned()
            } else {
                name(r)
            };
            let a = PropertyRef::new(c1, src_side);
            let b = PropertyRef::new(c2, name(r));
            if r.gen_bool(0.5) {
                JoinCond { left: a, right: b }
            } else {
                JoinCond { left: b, right: a }
            }
        });
        let mut conds = Vec::new();
        for _ in 0..r.gen_range(0..=2) {
            let kind = if r.gen_bool(0.5) { c1 } else { c2 };
            conds.push(cond(r, kind));
        }
        let is_move = r.gen_bool(0.5);
        if r.gen_bool(0.4) {
            conds.push(version_cond(r, c2));
            if is_move {
                conds.push(version_cond(r, c1));
            }
            conds.shuffle(r);
        }
        let t = Transfer {
            source,
            target_kind: c2.to_owned(),
            join,
            conds,
        };
        let stmt = if is_move {
            Statement::Move(t)
        } else {
            Statement::Copy(t)
        };
        if !has_errors(&validate_statement(&stmt)) {
            return stmt;
        }
    }
}

pub fn statement(r: &mut Rng8) -> Statement {
    if r.gen_bool(0.5) {
        single_kind_statement(r)
    } else {
        transfer_statement(r)
    }
}

/// True when every kind the statement writes is selected by a
/// `kind.version = k` condition.
pub fn is_version_guarded(stmt: &Statement) -> bool {
    stmt.written_kinds().iter().all(|k| {
        stmt.conds()
            .iter()
            .any(|c| c.prop.kind == *k && c.prop.name == "version")
    })
}

/// Shuffles each loop's keys with `r`.
pub fn shuffled_order(r: &mut Rng8) -> impl FnMut(usize, &mut [EntityKey]) + '_ {
    move |_, keys: &mut [EntityKey]| keys.shuffle(r)
}

// Grammar-directed text generation.

const IDENTS: [&str; 8] = ["user", "blogpost", "Person", "_x", "a1", "and_", "Version", "toast"];

fn ws(r: &mut Rng8) -> &'static str {
    [" ", " ", " ", "  ", "\n", "\t ", " \r\n "].choose(r).unwrap()
}

fn ident(r: &mut Rng8) -> String {
    IDENTS.choose(r).unwrap().to_string()
}

fn prop_text(r: &mut Rng8) -> String {
    let sep = if r.gen_bool(0.8) { "." } else { " . " };
    format!("{}{sep}{}", ident(r), ident(r))
}

pub fn literal_text(r: &mut Rng8) -> String {
    match r.gen_range(0..9) {
        0 => "true".into(),
        1 => "false".into(),
        2 => r.gen_range(-1000i64..1000).to_string(),
        3 => i64::MIN.to_string(),
        4 => format!("{}.{}", r.gen_range(-50..50), r.gen_range(0..1000)),
        5 => format!("{}.{}e{}", r.gen_range(0..9), r.gen_range(0..99), r.gen_range(-20..20)),
        6 => r#""say \"hi\"\n\\""#.into(),
        7 => r#""café 😀 tab\t""#.into(),
        _ => format!(
            "\"{}\"",
            ["", "x y", "Gerhard", "www.mypage.com", "ü"].choose(r).unwrap()
        ),
    }
}

fn conds_text(r: &mut Rng8, n: usize) -> String {
    (0..n)
        .map(|_| format!("{}{}={}{}", prop_text(r), ws(r), ws(r), literal_text(r)))
        .collect::<Vec<_>>()
        .join(&format!("{}and{}", ws(r), ws(r)))
}

fn selection_text(r: &mut Rng8) -> String {
    let n = r.gen_range(0..=3);
    if n == 0 {
        String::new()
    } else {
        format!("{}where{}{}", ws(r), ws(r), conds_text(r, n))
    }
}

/// A random sentence of the grammar. It parses, but need not validate.
pub fn statement_text(r: &mut Rng8) -> String {
    let lead = if r.gen_bool(0.2) { ws(r) } else { "" };
    let body = match r.gen_range(0..5) {
        0 => format!(
            "add{}{}{}={}{}{}",
            ws(r),
            prop_text(r),
            ws(r),
            ws(r),
            literal_text(r),
            selection_text(r)
        ),
        1 => format!("delete{}{}{}", ws(r), prop_text(r), selection_text(r)),
        2 => format!(
            "rename{}{}{}to{}{}{}",
            ws(r),
            prop_text(r),
            ws(r),
            ws(r),
            ident(r),
            selection_text(r)
        ),
        op => {
            let kw = if op == 3 { "move" } else { "copy" };
            let head = format!("{kw}{}{}{}to{}{}", ws(r), prop_text(r), ws(r), ws(r), ident(r));
            let tail = match r.gen_range(0..4) {
                0 => String::new(),
                1 => format!(
                    "{}where{}{}{}={}{}",
                    ws(r),
                    ws(r),
                    prop_text(r),
                    ws(r),
                    ws(r),
                    prop_text(r)
                ),
                2 => {
                    let n = r.gen_range(1..=3);
                    format!("{}where{}{}", ws(r), ws(r), conds_text(r, n))
                }
                _ => {
                    let n = r.gen_range(1..=3);
                    format!(
                        "{}where{}{}{}={}{}{}and{}{}",
                        ws(r),
                        ws(r),
                        prop_text(r),
                        ws(r),
                        ws(r),
                        prop_text(r),
                        ws(r),
                        ws(r),
                        conds_text(r, n)
                    )
                }
            };
            head + &tail
        }
    };
    let trail = if r.gen_bool(0.2) { ws(r) } else { "" };
    format!("{lead}{body}{trail}")
}
