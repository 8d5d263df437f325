//! Reference interpreters for the three target semantics, used to test that
//! each encoding is trace equivalent to the reachability graph. They exist
//! to validate encodings at desk scale, not to solve large instances.

pub mod stable;

use std::collections::{BTreeMap, BTreeSet};

use crate::dawnet::{DawNet, ReachGraph, State};
use crate::encode::bc::{translate_asp, BcProgram, TRUE_TOKEN};
use crate::encode::pddl::{apply_eff, eval_pre, psi, SvDomain, SvState};
use crate::encode::smv::{RgTilde, SmvExpr, SmvModule, TildeLabel, ENDED, LAST, UNDEF};
use crate::encode::value_token;

/// A paradigm-side transition system: states are total assignments of
/// token strings to state variables; edges carry the action set (empty for
/// unlabeled systems).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ts {
    pub states: Vec<BTreeMap<String, String>>,
    pub initials: Vec<usize>,
    pub edges: Vec<(usize, Vec<String>, usize)>,
    pub truncated: bool,
}

impl Ts {
    pub fn state_index(&self, s: &BTreeMap<String, String>) -> Option<usize> {
        self.states.iter().position(|x| x == s)
    }

    pub fn successors_of(&self, i: usize) -> impl Iterator<Item = (&[String], usize)> {
        self.edges
            .iter()
            .filter(move |(s, _, _)| *s == i)
            .map(|(_, l, d)| (l.as_slice(), *d))
    }
}

/// The net-side system with its states already mapped through the encoding
/// function, ready for path comparison.
#[derive(Debug, Clone)]
pub struct AbstractTs {
    pub enc_states: Vec<BTreeMap<String, String>>,
    pub initials: Vec<usize>,
    pub edges: Vec<(usize, Vec<String>, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivFailure {
    /// Two net-side states share an encoding.
    EncodingNotInjective(usize, usize),
    /// A net-side initial state has no counterpart.
    MissingInitial(usize),
    /// A paradigm-side initial state is not the image of any net initial.
    ExtraInitial(usize),
    /// A net-side path cannot be mimicked: (state, label, successor).
    MissingEdge(usize, Vec<String>, usize),
    /// A paradigm-side edge leaves the image of the net system.
    ExtraEdge(usize, Vec<String>, usize),
}

/// Outcome of the synchronized path comparison; `failure` carries the first
/// counterexample found together with a path of labels leading to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivReport {
    pub equivalent: bool,
    pub failure: Option<EquivFailure>,
    pub witness_path: Vec<String>,
}

/// Checks both directions of trace equivalence between a net-side system
/// (already mapped through an injective encoding) and a paradigm-side
/// system, by synchronized breadth-first path enumeration up to `max_len`.
pub fn trace_equiv(a: &AbstractTs, b: &Ts, max_len: usize) -> EquivReport {
    let fail = |failure: EquivFailure, path: Vec<String>| EquivReport {
        equivalent: false,
        failure: Some(failure),
        witness_path: path,
    };
    // Injectivity of the encoding on net states.
    let mut seen: BTreeMap<&BTreeMap<String, String>, usize> = BTreeMap::new();
    for (i, s) in a.enc_states.iter().enumerate() {
        if let Some(&j) = seen.get(s) {
            return fail(EquivFailure::EncodingNotInjective(j, i), vec![]);
        }
        seen.insert(s, i);
    }
    // Image of each net state inside the paradigm system, when present.
    let b_index: BTreeMap<&BTreeMap<String, String>, usize> = b
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let image: Vec<Option<usize>> = a
        .enc_states
        .iter()
        .map(|s| b_index.get(s).copied())
        .collect();

    // Direction one: every net path is a paradigm path.
    for &i in &a.initials {
        match image[i] {
            Some(bi) if b.initials.contains(&bi) => {}
            _ => return fail(EquivFailure::MissingInitial(i), vec![]),
        }
    }
    let mut frontier: Vec<(usize, Vec<String>)> =
        a.initials.iter().map(|&i| (i, Vec::new())).collect();
    let mut visited: BTreeSet<usize> = a.initials.iter().copied().collect();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (s, path) in &frontier {
            for (src, label, dst) in a.edges.iter().filter(|(src, _, _)| src == s) {
                let matched = match (image[*src], image[*dst]) {
                    (Some(bs), Some(bd)) => b
                        .successors_of(bs)
                        .any(|(l, d)| l == label.as_slice() && d == bd),
                    _ => false,
                };
                if !matched {
                    let mut p = path.clone();
                    p.push(label.join("+"));
                    return fail(EquivFailure::MissingEdge(*src, label.clone(), *dst), p);
                }
                if visited.insert(*dst) {
                    let mut p = path.clone();
                    p.push(label.join("+"));
                    next.push((*dst, p));
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    // Direction two: every paradigm path comes from a net path.
    let preimage: BTreeMap<usize, usize> = image
        .iter()
        .enumerate()
        .filter_map(|(ai, bi)| bi.map(|bi| (bi, ai)))
        .collect();
    for &bi in &b.initials {
        if !preimage.get(&bi).is_some_and(|ai| a.initials.contains(ai)) {
            return fail(EquivFailure::ExtraInitial(bi), vec![]);
        }
    }
    let mut frontier: Vec<(usize, Vec<String>)> =
        b.initials.iter().map(|&i| (i, Vec::new())).collect();
    let mut visited: BTreeSet<usize> = b.initials.iter().copied().collect();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (s, path) in &frontier {
            for (label, dst) in b.successors_of(*s) {
                let ok = preimage.get(s).is_some_and(|ai| {
                    preimage.get(&dst).is_some_and(|ad| {
                        a.edges
                            .iter()
                            .any(|(x, l, y)| x == ai && l == label && y == ad)
                    })
                });
                if !ok {
                    let mut p = path.clone();
                    p.push(label.join("+"));
                    return fail(EquivFailure::ExtraEdge(*s, label.to_vec(), dst), p);
                }
                if visited.insert(dst) {
                    let mut p = path.clone();
                    p.push(label.join("+"));
                    next.push((dst, p));
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    EquivReport {
        equivalent: true,
        failure: None,
        witness_path: vec![],
    }
}

/// The state encoding for the BC paradigm: places and the bookkeeping
/// fluent to booleans, variables to their token or null.
pub fn enc_bc_state(w: &DawNet, b: &BcProgram, s: &State) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for (p, &c) in w.net().places().iter().zip(s.marking.counts()) {
        out.insert(p.clone(), if c > 0 { "true" } else { "false" }.to_string());
    }
    for (f, _) in &b.fluents {
        if w.net().place_index(f).is_some() || f == &b.trans_fluent {
            continue;
        }
        let token = match s.eta.get(f) {
            Some(v) => value_token(v),
            None => b.null_name.clone(),
        };
        out.insert(f.clone(), token);
    }
    out.insert(b.trans_fluent.clone(), TRUE_TOKEN.to_string());
    out
}

/// The reachability graph mapped through the BC encoding: singleton action
/// labels.
pub fn abstract_rg_bc(w: &DawNet, b: &BcProgram, rg: &ReachGraph) -> AbstractTs {
    AbstractTs {
        enc_states: rg.states.iter().map(|s| enc_bc_state(w, b, s)).collect(),
        initials: vec![rg.initial],
        edges: rg
            .edges
            .iter()
            .map(|(s, t, d)| (*s, vec![t.clone()], *d))
            .collect(),
    }
}

/// Builds the BC transition system by computing stable models of the timed
/// program incrementally: the initial states from the horizon-0 program,
/// then one-step programs pinned to each reached state. `finally` atoms are
/// goal syntax, not part of the dynamics, and are cleared first.
pub fn ts_bc(b: &BcProgram, max_states: usize) -> Ts {
    let mut dynamics = b.clone();
    dynamics.finally.clear();
    let p0 = translate_asp(&dynamics, 0);
    let initial_models = stable::stable_models(&p0, max_states);
    let mut states: Vec<BTreeMap<String, String>> = Vec::new();
    let mut index: BTreeMap<BTreeMap<String, String>, usize> = BTreeMap::new();
    let mut initials: Vec<usize> = Vec::new();
    for m in &initial_models {
        let s: BTreeMap<String, String> = m
            .cells
            .iter()
            .map(|((f, _), v)| (f.clone(), v.clone()))
            .collect();
        let i = *index.entry(s.clone()).or_insert_with(|| {
            states.push(s.clone());
            states.len() - 1
        });
        if !initials.contains(&i) {
            initials.push(i);
        }
    }
    let mut edges = Vec::new();
    let mut frontier: Vec<usize> = initials.clone();
    let mut truncated = false;
    while let Some(si) = frontier.pop() {
        let state = states[si].clone();
        // Pin the current state as the initial condition of a one-step
        // program.
        let mut step = dynamics.clone();
        step.initially = state
            .iter()
            .map(|(f, v)| crate::encode::bc::BcAtom {
                fluent: f.clone(),
                value: v.clone(),
            })
            .collect();
        let p1 = translate_asp(&step, 1);
        for m in stable::stable_models(&p1, max_states) {
            let next: BTreeMap<String, String> = m
                .cells
                .iter()
                .filter(|((_, t), _)| *t == 1)
                .map(|((f, _), v)| (f.clone(), v.clone()))
                .collect();
            let actions: Vec<String> = m.actions.iter().map(|(a, _)| a.clone()).collect();
            let fresh = !index.contains_key(&next);
            if fresh && states.len() >= max_states {
                truncated = true;
                continue;
            }
            let di = *index.entry(next.clone()).or_insert_with(|| {
                states.push(next.clone());
                states.len() - 1
            });
            if fresh {
                frontier.push(di);
            }
            let edge = (si, actions, di);
            if !edges.contains(&edge) {
                edges.push(edge);
            }
        }
    }
    Ts {
        states,
        initials,
        edges,
        truncated,
    }
}

/// The reachability graph mapped through the planning encoding.
pub fn abstract_rg_pddl(w: &DawNet, rg: &ReachGraph) -> AbstractTs {
    AbstractTs {
        enc_states: rg.states.iter().map(|s| psi(w, s)).collect(),
        initials: vec![rg.initial],
        edges: rg
            .edges
            .iter()
            .map(|(s, t, d)| (*s, vec![t.clone()], *d))
            .collect(),
    }
}

/// Builds the planning transition system: grounds every lowered template
/// over its parameter ranges, applies the state-transition function, and
/// labels edges with the originating transition (collapsing DNF-split
/// templates through the recorded surjection).
pub fn ts_pddl(d: &SvDomain, s0: &SvState, max_states: usize) -> Ts {
    let mut states = vec![s0.clone()];
    let mut index: BTreeMap<SvState, usize> = [(s0.clone(), 0)].into();
    let mut edges: Vec<(usize, Vec<String>, usize)> = Vec::new();
    let mut frontier = vec![0usize];
    let mut truncated = false;
    while let Some(si) = frontier.pop() {
        let state = states[si].clone();
        for t in &d.templates {
            let mut groundings: Vec<BTreeMap<String, String>> = vec![BTreeMap::new()];
            for (p, range) in &t.params {
                let mut next = Vec::with_capacity(groundings.len() * range.len());
                for g in &groundings {
                    for obj in range {
                        let mut g2 = g.clone();
                        g2.insert(p.clone(), obj.clone());
                        next.push(g2);
                    }
                }
                groundings = next;
            }
            for g in groundings {
                if !eval_pre(d, &t.pre, &state, &g) {
                    continue;
                }
                let next = apply_eff(t, &state, &g);
                let fresh = !index.contains_key(&next);
                if fresh && states.len() >= max_states {
                    truncated = true;
                    continue;
                }
                let di = *index.entry(next.clone()).or_insert_with(|| {
                    states.push(next.clone());
                    states.len() - 1
                });
                if fresh {
                    frontier.push(di);
                }
                let edge = (si, vec![t.transition.clone()], di);
                if !edges.contains(&edge) {
                    edges.push(edge);
                }
            }
        }
    }
    Ts {
        states,
        initials: vec![0],
        edges,
        truncated,
    }
}

/// The encoding of an adapted reachability-graph state into a module state.
pub fn enc_smv_state(
    m: &SmvModule,
    rg: &ReachGraph,
    node: &(Option<usize>, TildeLabel),
) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    match node {
        (None, _) => {
            for (_, var) in &m.place_vars {
                out.insert(var.clone(), "false".to_string());
            }
            for (_, var, _) in &m.data_vars {
                out.insert(var.clone(), UNDEF.to_string());
            }
        }
        (Some(si), _) => {
            let s = &rg.states[*si];
            for ((_, var), &c) in m.place_vars.iter().zip(s.marking.counts()) {
                out.insert(var.clone(), if c > 0 { "true" } else { "false" }.to_string());
            }
            for (orig, var, _) in &m.data_vars {
                let token = match s.eta.get(orig) {
                    Some(v) => m
                        .value_symbol
                        .get(&value_token(v))
                        .cloned()
                        .unwrap_or_else(|| value_token(v)),
                    None => UNDEF.to_string(),
                };
                out.insert(var.clone(), token);
            }
        }
    }
    let tr = match &node.1 {
        TildeLabel::Trans(t) => m.tr_symbol[t].clone(),
        TildeLabel::Last => LAST.to_string(),
        TildeLabel::Ended => ENDED.to_string(),
    };
    out.insert(m.tr_var.clone(), tr);
    out
}

/// The adapted reachability graph mapped through the SMV encoding; edges
/// are unlabeled.
pub fn abstract_rg_tilde(m: &SmvModule, rg: &ReachGraph, tilde: &RgTilde) -> AbstractTs {
    AbstractTs {
        enc_states: tilde
            .states
            .iter()
            .map(|n| enc_smv_state(m, rg, n))
            .collect(),
        initials: tilde.initials.clone(),
        edges: tilde
            .edges
            .iter()
            .map(|(s, d)| (*s, Vec::new(), *d))
            .collect(),
    }
}

/// Evaluates an SMV formula on a (current, next) pair of partial states;
/// None when the partial assignment does not determine the value yet.
fn smv_eval(
    e: &SmvExpr,
    cur: &BTreeMap<String, String>,
    next: &BTreeMap<String, String>,
) -> Option<bool> {
    let get = |primed: bool, var: &str| -> Option<&String> {
        if primed {
            next.get(var)
        } else {
            cur.get(var)
        }
    };
    match e {
        SmvExpr::Bool(b) => Some(*b),
        SmvExpr::Var(v) => get(false, v).map(|x| x == "true"),
        SmvExpr::Next(v) => get(true, v).map(|x| x == "true"),
        SmvExpr::EqSym { var, primed, symbol } => get(*primed, var).map(|x| x == symbol),
        SmvExpr::NeSym { var, primed, symbol } => get(*primed, var).map(|x| x != symbol),
        SmvExpr::EqVarNext(v) => Some(get(true, v)? == get(false, v)?),
        SmvExpr::InSet { var, symbols } => get(true, var).map(|x| symbols.contains(x)),
        SmvExpr::Not(inner) => smv_eval(inner, cur, next).map(|b| !b),
        SmvExpr::And(es) => {
            let mut unknown = false;
            for sub in es {
                match smv_eval(sub, cur, next) {
                    Some(false) => return Some(false),
                    Some(true) => {}
                    None => unknown = true,
                }
            }
            if unknown {
                None
            } else {
                Some(true)
            }
        }
        SmvExpr::Or(es) => {
            let mut unknown = false;
            for sub in es {
                match smv_eval(sub, cur, next) {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => unknown = true,
                }
            }
            if unknown {
                None
            } else {
                Some(false)
            }
        }
        SmvExpr::Implies(a, b) => match (smv_eval(a, cur, next), smv_eval(b, cur, next)) {
            (Some(false), _) | (_, Some(true)) => Some(true),
            (Some(true), Some(false)) => Some(false),
            _ => None,
        },
    }
}

fn module_vars(m: &SmvModule) -> Vec<(String, Vec<String>)> {
    let mut vars: Vec<(String, Vec<String>)> = Vec::new();
    for (_, var) in &m.place_vars {
        vars.push((var.clone(), vec!["false".into(), "true".into()]));
    }
    vars.push((m.tr_var.clone(), m.tr_domain.clone()));
    for (_, var, symbols) in &m.data_vars {
        vars.push((var.clone(), symbols.clone()));
    }
    vars
}

/// Enumerates assignments to `vars` that satisfy `formula`, with tri-state
/// pruning. When `cur` is given, assignments fill the primed side of the
/// pair; otherwise they fill the current side.
fn enumerate_assignments(
    vars: &[(String, Vec<String>)],
    formula: &SmvExpr,
    cur: Option<&BTreeMap<String, String>>,
    out: &mut Vec<BTreeMap<String, String>>,
    cap: usize,
) {
    fn rec(
        vars: &[(String, Vec<String>)],
        depth: usize,
        formula: &SmvExpr,
        cur: Option<&BTreeMap<String, String>>,
        partial: &mut BTreeMap<String, String>,
        out: &mut Vec<BTreeMap<String, String>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        let empty = BTreeMap::new();
        let verdict = match cur {
            Some(c) => smv_eval(formula, c, partial),
            None => smv_eval(formula, partial, &empty),
        };
        if verdict == Some(false) {
            return;
        }
        if depth == vars.len() {
            if verdict == Some(true) {
                out.push(partial.clone());
            }
            return;
        }
        let (name, domain) = &vars[depth];
        for value in domain {
            partial.insert(name.clone(), value.clone());
            rec(vars, depth + 1, formula, cur, partial, out, cap);
        }
        partial.remove(name);
    }
    let mut partial = BTreeMap::new();
    rec(vars, 0, formula, cur, &mut partial, out, cap);
}

/// Builds the module's transition system: states are total assignments
/// reachable from the INIT-satisfying ones; successors come from the unique
/// rule whose precondition holds (the rules partition on the transition
/// variable). Edges are unlabeled.
pub fn ts_smv(m: &SmvModule, max_states: usize) -> Ts {
    let vars = module_vars(m);
    let mut initial_states = Vec::new();
    enumerate_assignments(&vars, &m.init, None, &mut initial_states, max_states);
    let mut states: Vec<BTreeMap<String, String>> = Vec::new();
    let mut index: BTreeMap<BTreeMap<String, String>, usize> = BTreeMap::new();
    let mut initials: Vec<usize> = Vec::new();
    for s in initial_states {
        let i = *index.entry(s.clone()).or_insert_with(|| {
            states.push(s.clone());
            states.len() - 1
        });
        if !initials.contains(&i) {
            initials.push(i);
        }
    }
    let mut edges = Vec::new();
    let mut frontier: Vec<usize> = initials.clone();
    let mut truncated = false;
    while let Some(si) = frontier.pop() {
        let state = states[si].clone();
        let tr_value = &state[&m.tr_var];
        let Some((_, post)) = m.trans_rules.iter().find(|(sym, _)| sym == tr_value) else {
            continue;
        };
        let mut succs = Vec::new();
        enumerate_assignments(&vars, post, Some(&state), &mut succs, max_states);
        for next in succs {
            let fresh = !index.contains_key(&next);
            if fresh && states.len() >= max_states {
                truncated = true;
                continue;
            }
            let di = *index.entry(next.clone()).or_insert_with(|| {
                states.push(next.clone());
                states.len() - 1
            });
            if fresh {
                frontier.push(di);
            }
            let edge = (si, Vec::new(), di);
            if !edges.contains(&edge) {
                edges.push(edge);
            }
        }
    }
    Ts {
        states,
        initials,
        edges,
        truncated,
    }
}
