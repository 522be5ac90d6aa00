//! A deliberately naive interpreter of the store operations and the
//! migration loops, written against raw JSON values and sharing no code
//! with the library except the statement AST and the store file format.
//!
//! Memory states are plain vectors of `(key, props)` pairs scanned
//! linearly. Every loop asks `order` to arrange its key list, so callers
//! can drive arbitrary processing orders.

use std::cmp::Ordering;

use evolve_core::lang::Statement;
use evolve_core::store::{read_store, write_store};
use evolve_core::MemoryState;
use serde_json::{Map, Value};

pub type Props = Map<String, Value>;

#[derive(Debug, Clone, PartialEq)]
pub struct Key {
    pub kind: String,
    pub id: Value,
}

/// Kind first; integer ids before string ids.
pub fn key_cmp(a: &Key, b: &Key) -> Ordering {
    a.kind.cmp(&b.kind).then_with(|| match (&a.id, &b.id) {
        (Value::Number(x), Value::Number(y)) => x.as_i64().unwrap().cmp(&y.as_i64().unwrap()),
        (Value::Number(_), _) => Ordering::Less,
        (_, Value::Number(_)) => Ordering::Greater,
        (Value::String(x), Value::String(y)) => x.cmp(y),
        _ => unreachable!("ids are numbers or strings"),
    })
}

#[derive(Debug, Clone, Default)]
pub struct State {
    pub ds: Vec<(Key, Props)>,
    pub app: Vec<(Key, Props)>,
}

/// Counters the safety checker is compared against.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    pub outer: usize,
    pub puts: usize,
}

fn lookup<'a>(m: &'a [(Key, Props)], k: &Key) -> Option<&'a Props> {
    m.iter().find(|(x, _)| x == k).map(|(_, p)| p)
}

fn lookup_mut<'a>(m: &'a mut [(Key, Props)], k: &Key) -> Option<&'a mut Props> {
    m.iter_mut().find(|(x, _)| x == k).map(|(_, p)| p)
}

fn bind(m: &mut Vec<(Key, Props)>, k: &Key, p: Props) {
    match lookup_mut(m, k) {
        Some(slot) => *slot = p,
        None => m.push((k.clone(), p)),
    }
}

/// The atom `name = value`: equal scalar, or a list containing it.
pub fn atom(props: &Props, name: &str, value: &Value) -> bool {
    match props.get(name) {
        None | Some(Value::Object(_)) => false,
        Some(Value::Array(items)) => items.iter().any(|i| same(i, value)),
        Some(v) => same(v, value),
    }
}

// Distinguishes 1 from 1.0 even where serde_json might not.
fn same(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            x.is_i64() == y.is_i64()
                && x.is_f64() == y.is_f64()
                && if x.is_i64() {
                    x.as_i64() == y.as_i64()
                } else {
                    x.as_f64().map(f64::to_bits) == y.as_f64().map(f64::to_bits)
                }
        }
        _ => a == b,
    }
}

impl State {
    pub fn from_memory(ms: &MemoryState) -> Self {
        let mut buf = Vec::new();
        write_store(ms, &mut buf).unwrap();
        let mut ds = Vec::new();
        for line in String::from_utf8(buf).unwrap().lines() {
            let v: Value = serde_json::from_str(line).unwrap();
            let key = Key {
                kind: v["kind"].as_str().unwrap().to_owned(),
                id: v["id"].clone(),
            };
            ds.push((key, v["props"].as_object().unwrap().clone()));
        }
        State { ds, app: Vec::new() }
    }

    pub fn store_as_memory(&self) -> MemoryState {
        let mut text = String::new();
        for (k, p) in &self.ds {
            let line = serde_json::json!({"kind": k.kind, "id": k.id, "props": p});
            text.push_str(&line.to_string());
            text.push('\n');
        }
        read_store(text.as_bytes()).unwrap()
    }

    /// `get(kind = c AND atoms)`: loads matches into the app state.
    fn query(&mut self, kind: &str, atoms: &[(String, Value)]) -> Vec<Key> {
        let mut hits: Vec<(Key, Props)> = Vec::new();
        for (k, p) in &self.ds {
            if k.kind == kind && atoms.iter().all(|(n, v)| atom(p, n, v)) {
                hits.push((k.clone(), p.clone()));
            }
        }
        hits.sort_by(|a, b| key_cmp(&a.0, &b.0));
        let keys = hits.iter().map(|(k, _)| k.clone()).collect();
        for (k, p) in hits {
            bind(&mut self.app, &k, p);
        }
        keys
    }

    fn get_prop(&self, k: &Key, n: &str) -> Option<Value> {
        lookup(&self.app, k).unwrap().get(n).cloned()
    }

    fn set_prop(&mut self, k: &Key, n: &str, v: Option<Value>) {
        let p = lookup_mut(&mut self.app, k).unwrap();
        match v {
            Some(v) => {
                p.insert(n.to_owned(), v);
            }
            None => {
                p.remove(n);
            }
        }
    }

    fn bump(&mut self, k: &Key) {
        let old = self.get_prop(k, "version").map_or(0, |v| v.as_i64().unwrap());
        self.set_prop(k, "version", Some(Value::from(old + 1)));
    }

    fn put(&mut self, k: &Key) {
        let p = lookup(&self.app, k).unwrap().clone();
        bind(&mut self.ds, k, p);
    }
}

fn literal(v: &evolve_core::AtomicValue) -> Value {
    use evolve_core::AtomicValue as A;
    match v {
        A::Text(s) => Value::from(s.as_str()),
        A::Int(i) => Value::from(*i),
        A::Float(f) => Value::from(*f),
        A::Bool(b) => Value::from(*b),
    }
}

/// Runs `stmt` over `ds` and returns the final store.
pub fn run(stmt: &Statement, ds: &MemoryState, order: &mut dyn FnMut(usize, &mut Vec<Key>)) -> (MemoryState, Stats) {
    let mut st = State::from_memory(ds);
    let mut stats = Stats::default();
    let conds_of = |kind: &str, conds: &[evolve_core::lang::EqCond]| -> Vec<(String, Value)> {
        conds
            .iter()
            .filter(|c| c.prop.kind == kind)
            .map(|c| (c.prop.name.clone(), literal(&c.value)))
            .collect()
    };
    match stmt {
        Statement::Add {
            target,
            value,
            selection,
        } => {
            let mut es = st.query(&target.kind, &conds_of(&target.kind, selection));
            order(0, &mut es);
            for e in es {
                st.set_prop(&e, &target.name, Some(literal(value)));
                st.bump(&e);
                st.put(&e);
                stats.puts += 1;
            }
        }
        Statement::Delete { target, selection } => {
            let mut es = st.query(&target.kind, &conds_of(&target.kind, selection));
            order(0, &mut es);
            for e in es {
                st.set_prop(&e, &target.name, None);
                st.bump(&e);
                st.put(&e);
                stats.puts += 1;
            }
        }
        Statement::Rename {
            target,
            new_name,
            selection,
        } => {
            let mut es = st.query(&target.kind, &conds_of(&target.kind, selection));
            order(0, &mut es);
            for e in es {
                let v = st.get_prop(&e, &target.name);
                st.set_prop(&e, new_name, v);
                st.set_prop(&e, &target.name, None);
                st.bump(&e);
                st.put(&e);
                stats.puts += 1;
            }
        }
        Statement::Move(t) | Statement::Copy(t) => {
            let is_move = matches!(stmt, Statement::Move(_));
            let c1 = t.source.kind.as_str();
            let c2 = t.target_kind.as_str();
            let n = t.source.name.as_str();
            let theta1 = conds_of(c1, &t.conds);
            let theta2 = conds_of(c2, &t.conds);
            let mut es = st.query(c1, &theta1);
            order(0, &mut es);
            stats.outer = es.len();
            for e in es {
                let x = st.get_prop(&e, n);
                let mut atoms = theta2.clone();
                let mut joinable = true;
                if let Some(j) = &t.join {
                    let (a, b) = if j.left.kind == c1 {
                        (&j.left, &j.right)
                    } else {
                        (&j.right, &j.left)
                    };
                    match st.get_prop(&e, &a.name) {
                        Some(v) if !v.is_array() && !v.is_object() => atoms.push((b.name.clone(), v)),
                        _ => joinable = false,
                    }
                }
                if joinable {
                    let mut fs = st.query(c2, &atoms);
                    order(1, &mut fs);
                    for f in fs {
                        st.set_prop(&f, n, x.clone());
                        st.bump(&f);
                        st.put(&f);
                        stats.puts += 1;
                    }
                }
                if is_move {
                    st.set_prop(&e, n, None);
                    st.bump(&e);
                    st.put(&e);
                    stats.puts += 1;
                }
            }
        }
    }
    (st.store_as_memory(), stats)
}

pub fn run_in_key_order(stmt: &Statement, ds: &MemoryState) -> MemoryState {
    run(stmt, ds, &mut |_, _| {}).0
}

/// All permutations of `0..n`, lexicographic.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

/// Final stores under every outer permutation, with the inner loop run
/// both forwards and backwards.
pub fn all_order_outcomes(stmt: &Statement, ds: &MemoryState, outer: usize) -> Vec<MemoryState> {
    let mut outcomes = Vec::new();
    for perm in permutations(outer) {
        for reverse_inner in [false, true] {
            let (ms, _) = run(stmt, ds, &mut |depth, keys: &mut Vec<Key>| {
                if depth == 0 {
                    assert_eq!(keys.len(), perm.len());
                    *keys = perm.iter().map(|&i| keys[i].clone()).collect();
                } else if reverse_inner {
                    keys.reverse();
                }
            });
            outcomes.push(ms);
        }
    }
    outcomes
}
