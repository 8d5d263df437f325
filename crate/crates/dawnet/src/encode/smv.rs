//! The SMV encoding: the infinite-path adaptation of the reachability graph
//! at the syntax level, with VAR/INIT/TRANS sections and the reachability
//! property as an LTL formula whose counterexample is a terminating case.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::data_model::Value;
use crate::dawnet::{DawNet, ReachGraph};
use crate::encode::{sanitize, value_token};
use crate::guard::{GuardExpr, Term};

pub const LAST: &str = "last";
pub const ENDED: &str = "ended";
pub const UNDEF: &str = "undef";

/// SMV formulas over current and primed (next-state) variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmvExpr {
    /// Boolean constant.
    Bool(bool),
    /// Current-state variable.
    Var(String),
    /// `next(var)`.
    Next(String),
    /// `var = symbol` / `next(var) = symbol`.
    EqSym { var: String, primed: bool, symbol: String },
    /// `var != symbol`.
    NeSym { var: String, primed: bool, symbol: String },
    /// `next(var) = var`, the inertia constraint.
    EqVarNext(String),
    /// `next(var) in {symbols}`.
    InSet { var: String, symbols: Vec<String> },
    Not(Box<SmvExpr>),
    And(Vec<SmvExpr>),
    Or(Vec<SmvExpr>),
    Implies(Box<SmvExpr>, Box<SmvExpr>),
}

impl SmvExpr {
    fn and_all(mut conjuncts: Vec<SmvExpr>) -> SmvExpr {
        conjuncts.retain(|c| *c != SmvExpr::Bool(true));
        match conjuncts.len() {
            0 => SmvExpr::Bool(true),
            1 => conjuncts.pop().unwrap(),
            _ => SmvExpr::And(conjuncts),
        }
    }

    fn or_all(conjuncts: Vec<SmvExpr>) -> SmvExpr {
        match conjuncts.len() {
            0 => SmvExpr::Bool(false),
            1 => {
                let mut c = conjuncts;
                c.pop().unwrap()
            }
            _ => SmvExpr::Or(conjuncts),
        }
    }

    /// Replaces every current-state variable reference by its primed form.
    pub fn primed(&self) -> SmvExpr {
        match self {
            SmvExpr::Bool(b) => SmvExpr::Bool(*b),
            SmvExpr::Var(v) => SmvExpr::Next(v.clone()),
            SmvExpr::Next(v) => SmvExpr::Next(v.clone()),
            SmvExpr::EqSym { var, symbol, .. } => SmvExpr::EqSym {
                var: var.clone(),
                primed: true,
                symbol: symbol.clone(),
            },
            SmvExpr::NeSym { var, symbol, .. } => SmvExpr::NeSym {
                var: var.clone(),
                primed: true,
                symbol: symbol.clone(),
            },
            SmvExpr::EqVarNext(_) | SmvExpr::InSet { .. } => self.clone(),
            SmvExpr::Not(e) => SmvExpr::Not(Box::new(e.primed())),
            SmvExpr::And(es) => SmvExpr::And(es.iter().map(SmvExpr::primed).collect()),
            SmvExpr::Or(es) => SmvExpr::Or(es.iter().map(SmvExpr::primed).collect()),
            SmvExpr::Implies(a, b) => {
                SmvExpr::Implies(Box::new(a.primed()), Box::new(b.primed()))
            }
        }
    }
}

/// The emitted module: variables, the initial-state formula, one transition
/// rule per `tr` value (the preconditions partition on it, so rule order is
/// irrelevant), and the LTL reachability property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmvModule {
    /// Original place id and its SMV boolean variable.
    pub place_vars: Vec<(String, String)>,
    pub tr_var: String,
    /// Transition symbols in order, then `last`, then `ended`.
    pub tr_domain: Vec<String>,
    /// Original transition id to its `tr` symbol.
    pub tr_symbol: BTreeMap<String, String>,
    /// Original variable, SMV variable, domain symbols (undef last).
    pub data_vars: Vec<(String, String, Vec<String>)>,
    /// Value token to enum symbol.
    pub value_symbol: BTreeMap<String, String>,
    pub init: SmvExpr,
    /// `(tr symbol, post)` per `tr` domain value.
    pub trans_rules: Vec<(String, SmvExpr)>,
    pub ltl: String,
    /// Mangling table emitted as comments.
    pub mangle_comments: Vec<String>,
}

struct Names {
    used: BTreeSet<String>,
    comments: Vec<String>,
}

impl Names {
    fn new() -> Self {
        Names {
            used: ["TRUE", "FALSE", "case", "esac", "next", "init"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            comments: Vec::new(),
        }
    }

    fn claim(&mut self, original: &str, candidate: String) -> String {
        let mut name = sanitize(&candidate);
        while self.used.contains(&name) {
            name.push('_');
        }
        self.used.insert(name.clone());
        if name != original {
            self.comments.push(format!("{original} -> {name}"));
        }
        name
    }
}

/// Encodes a (finite-restricted) DAW-net as an SMV module.
pub fn encode_smv(w: &DawNet) -> SmvModule {
    let mut names = Names::new();
    let tr_var = names.claim("tr", "tr".into());
    let place_vars: Vec<(String, String)> = w
        .net()
        .places()
        .iter()
        .map(|p| (p.clone(), names.claim(p, format!("p_{p}"))))
        .collect();
    let ranges = w.write_domains();
    let mut value_symbol: BTreeMap<String, String> = BTreeMap::new();
    let mut data_vars = Vec::new();
    for (v, range) in &ranges {
        if range.is_empty() {
            continue;
        }
        let var = names.claim(v, format!("v_{v}"));
        let mut symbols = Vec::new();
        for val in range {
            let token = value_token(val);
            let symbol = match value_symbol.get(&token) {
                Some(s) => s.clone(),
                None => {
                    let s = match val {
                        Value::Int(i) => i.to_string(),
                        Value::Bool(b) => names.claim(&token, format!("b{b}")),
                        Value::Str(_) => names.claim(&token, token.clone()),
                    };
                    value_symbol.insert(token.clone(), s.clone());
                    s
                }
            };
            symbols.push(symbol);
        }
        symbols.push(UNDEF.to_string());
        data_vars.push((v.clone(), var, symbols));
    }
    let mut tr_symbol = BTreeMap::new();
    let mut tr_domain = Vec::new();
    for t in w.net().transitions() {
        let s = names.claim(t, t.clone());
        tr_symbol.insert(t.clone(), s.clone());
        tr_domain.push(s);
    }
    tr_domain.push(LAST.to_string());
    tr_domain.push(ENDED.to_string());

    let place_var = |p: &str| -> String {
        place_vars
            .iter()
            .find(|(orig, _)| orig == p)
            .expect("known place")
            .1
            .clone()
    };
    let data_var = |v: &str| -> Option<&(String, String, Vec<String>)> {
        data_vars.iter().find(|(orig, _, _)| orig == v)
    };
    let sym_of = |value: &Value| -> Option<String> {
        value_symbol.get(&value_token(value)).cloned()
    };

    // Guard formulas over the module variables; comparisons ground to
    // explicit disjunctions so undefined variables fall out as false.
    fn guard_expr(
        w: &DawNet,
        g: &GuardExpr,
        data_var: &dyn Fn(&str) -> Option<(String, Vec<Value>)>,
        sym_of: &dyn Fn(&Value) -> Option<String>,
    ) -> SmvExpr {
        let eq = |v: &str, value: &Value| -> SmvExpr {
            match (data_var(v), sym_of(value)) {
                (Some((var, _)), Some(symbol)) => SmvExpr::EqSym {
                    var,
                    primed: false,
                    symbol,
                },
                _ => SmvExpr::Bool(false),
            }
        };
        match g {
            GuardExpr::True => SmvExpr::Bool(true),
            GuardExpr::Def(v) => match data_var(v) {
                Some((var, _)) => SmvExpr::NeSym {
                    var,
                    primed: false,
                    symbol: UNDEF.to_string(),
                },
                None => SmvExpr::Bool(false),
            },
            GuardExpr::Eq(v, Term::Const(c)) => {
                if data_var(v).is_some_and(|(_, range)| range.contains(c)) {
                    eq(v, c)
                } else {
                    SmvExpr::Bool(false)
                }
            }
            GuardExpr::Eq(v, Term::Var(u)) => {
                let (Some((_, rv)), Some((_, ru))) = (data_var(v), data_var(u)) else {
                    return SmvExpr::Bool(false);
                };
                let mut disjuncts = Vec::new();
                for d in rv.iter().filter(|d| ru.contains(d)) {
                    disjuncts.push(SmvExpr::and_all(vec![eq(v, d), eq(u, d)]));
                }
                SmvExpr::or_all(disjuncts)
            }
            GuardExpr::Leq(t1, t2) => {
                let range = |t: &Term| -> Vec<Value> {
                    match t {
                        Term::Var(v) => data_var(v).map(|(_, r)| r).unwrap_or_default(),
                        Term::Const(c) => vec![c.clone()],
                    }
                };
                let mut disjuncts = Vec::new();
                for d1 in range(t1) {
                    for d2 in range(t2) {
                        if !w.data().leq_values(&d1, &d2) {
                            continue;
                        }
                        let mut conj = Vec::new();
                        if let Term::Var(v) = t1 {
                            conj.push(eq(v, &d1));
                        }
                        if let Term::Var(v) = t2 {
                            conj.push(eq(v, &d2));
                        }
                        disjuncts.push(SmvExpr::and_all(conj));
                    }
                }
                SmvExpr::or_all(disjuncts)
            }
            GuardExpr::Not(e) => {
                SmvExpr::Not(Box::new(guard_expr(w, e, data_var, sym_of)))
            }
            GuardExpr::And(a, b) => SmvExpr::and_all(vec![
                guard_expr(w, a, data_var, sym_of),
                guard_expr(w, b, data_var, sym_of),
            ]),
        }
    }
    let dv = |v: &str| -> Option<(String, Vec<Value>)> {
        data_var(v).map(|(orig, var, _)| (var.clone(), ranges[orig].iter().cloned().collect()))
    };
    let so = |value: &Value| sym_of(value);

    // Pre_t: the guard plus tokens on the input places.
    let pre_of = |t: &str| -> SmvExpr {
        let ti = w.net().transition_index(t).expect("known transition");
        let mut conj = vec![guard_expr(
            w,
            w.guard(t).expect("guards are total"),
            &dv,
            &so,
        )];
        for &p in w.net().preset_of_transition(ti) {
            conj.push(SmvExpr::Var(place_var(&w.net().places()[p])));
        }
        SmvExpr::and_all(conj)
    };

    let transitions: Vec<String> = w.net().transitions().to_vec();
    let tr_constraints = |primed: bool| -> Vec<SmvExpr> {
        let mut out = Vec::new();
        for t in &transitions {
            let pre = pre_of(t);
            out.push(SmvExpr::Implies(
                Box::new(SmvExpr::EqSym {
                    var: tr_var.clone(),
                    primed,
                    symbol: tr_symbol[t].clone(),
                }),
                Box::new(if primed { pre.primed() } else { pre }),
            ));
        }
        let none: Vec<SmvExpr> = transitions
            .iter()
            .map(|t| {
                let pre = pre_of(t);
                SmvExpr::Not(Box::new(if primed { pre.primed() } else { pre }))
            })
            .collect();
        out.push(SmvExpr::Implies(
            Box::new(SmvExpr::EqSym {
                var: tr_var.clone(),
                primed,
                symbol: LAST.to_string(),
            }),
            Box::new(SmvExpr::and_all(none)),
        ));
        out
    };

    // INIT: the initial state, tr is not ended, and tr names an enabled
    // transition or last when none is.
    let mut init = Vec::new();
    for (orig, var) in &place_vars {
        let lit = SmvExpr::Var(var.clone());
        init.push(if orig == w.source() {
            lit
        } else {
            SmvExpr::Not(Box::new(lit))
        });
    }
    for (_, var, _) in &data_vars {
        init.push(SmvExpr::EqSym {
            var: var.clone(),
            primed: false,
            symbol: UNDEF.to_string(),
        });
    }
    init.push(SmvExpr::NeSym {
        var: tr_var.clone(),
        primed: false,
        symbol: ENDED.to_string(),
    });
    init.extend(tr_constraints(false));
    let init = SmvExpr::and_all(init);

    // One TRANS rule per transition, plus the last and ended rules.
    let mut trans_rules = Vec::new();
    for t in &transitions {
        let ti = w.net().transition_index(t).expect("known transition");
        let pre = w.net().preset_of_transition(ti);
        let post = w.net().postset_of_transition(ti);
        let mut conj = Vec::new();
        for (pi, (orig, var)) in place_vars.iter().enumerate() {
            let idx = w.net().place_index(orig).expect("known place");
            let _ = pi;
            if pre.contains(&idx) && !post.contains(&idx) {
                conj.push(SmvExpr::Not(Box::new(SmvExpr::Next(var.clone()))));
            } else if post.contains(&idx) && !pre.contains(&idx) {
                conj.push(SmvExpr::Next(var.clone()));
            } else {
                conj.push(SmvExpr::EqVarNext(var.clone()));
            }
        }
        for (orig, var, symbols) in &data_vars {
            match w.write_spec(t).and_then(|s| s.get(orig)) {
                Some(set) if set.is_empty() => conj.push(SmvExpr::EqSym {
                    var: var.clone(),
                    primed: true,
                    symbol: UNDEF.to_string(),
                }),
                Some(set) => {
                    let mut allowed: Vec<String> = Vec::new();
                    for val in set {
                        let token = value_token(val);
                        allowed.push(
                            value_symbol
                                .get(&token)
                                .cloned()
                                .unwrap_or_else(|| token.clone()),
                        );
                    }
                    let _ = symbols;
                    conj.push(SmvExpr::InSet {
                        var: var.clone(),
                        symbols: allowed,
                    });
                }
                None => conj.push(SmvExpr::EqVarNext(var.clone())),
            }
        }
        conj.extend(tr_constraints(true));
        conj.push(SmvExpr::Implies(
            Box::new(SmvExpr::EqSym {
                var: tr_var.clone(),
                primed: true,
                symbol: ENDED.to_string(),
            }),
            Box::new(SmvExpr::EqSym {
                var: tr_var.clone(),
                primed: false,
                symbol: LAST.to_string(),
            }),
        ));
        trans_rules.push((tr_symbol[t].clone(), SmvExpr::and_all(conj)));
    }
    // last and ended both move to the sink state.
    let sink_post = {
        let mut conj = vec![SmvExpr::EqSym {
            var: tr_var.clone(),
            primed: true,
            symbol: ENDED.to_string(),
        }];
        for (_, var) in &place_vars {
            conj.push(SmvExpr::Not(Box::new(SmvExpr::Next(var.clone()))));
        }
        for (_, var, _) in &data_vars {
            conj.push(SmvExpr::EqSym {
                var: var.clone(),
                primed: true,
                symbol: UNDEF.to_string(),
            });
        }
        SmvExpr::and_all(conj)
    };
    trans_rules.push((LAST.to_string(), sink_post.clone()));
    trans_rules.push((ENDED.to_string(), sink_post));

    let ltl = {
        let mut conj = vec![place_var(w.sink())];
        for p in w.net().places() {
            if p != w.sink() {
                conj.push(format!("!{}", place_var(p)));
            }
        }
        format!("G !({})", conj.join(" & "))
    };

    SmvModule {
        place_vars,
        tr_var,
        tr_domain,
        tr_symbol,
        data_vars,
        value_symbol,
        init,
        trans_rules,
        ltl,
        mangle_comments: names.comments,
    }
}

/// A terminating-case LTL property: a counterexample to "a final state is
/// never visited" is a case.
pub fn ltl_goal(w: &DawNet) -> String {
    encode_smv(w).ltl
}

fn fmt_expr(e: &SmvExpr, out: &mut String) {
    match e {
        SmvExpr::Bool(b) => out.push_str(if *b { "TRUE" } else { "FALSE" }),
        SmvExpr::Var(v) => out.push_str(v),
        SmvExpr::Next(v) => {
            out.push_str("next(");
            out.push_str(v);
            out.push(')');
        }
        SmvExpr::EqSym { var, primed, symbol } => {
            if *primed {
                out.push_str("next(");
                out.push_str(var);
                out.push(')');
            } else {
                out.push_str(var);
            }
            out.push_str(" = ");
            out.push_str(symbol);
        }
        SmvExpr::NeSym { var, primed, symbol } => {
            if *primed {
                out.push_str("next(");
                out.push_str(var);
                out.push(')');
            } else {
                out.push_str(var);
            }
            out.push_str(" != ");
            out.push_str(symbol);
        }
        SmvExpr::EqVarNext(v) => {
            out.push_str("next(");
            out.push_str(v);
            out.push_str(") = ");
            out.push_str(v);
        }
        SmvExpr::InSet { var, symbols } => {
            out.push_str("next(");
            out.push_str(var);
            out.push_str(") in {");
            out.push_str(&symbols.join(", "));
            out.push('}');
        }
        SmvExpr::Not(inner) => {
            out.push_str("!(");
            fmt_expr(inner, out);
            out.push(')');
        }
        SmvExpr::And(es) => {
            for (i, sub) in es.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                let needs = matches!(sub, SmvExpr::Or(_) | SmvExpr::Implies(_, _));
                if needs {
                    out.push('(');
                }
                fmt_expr(sub, out);
                if needs {
                    out.push(')');
                }
            }
        }
        SmvExpr::Or(es) => {
            for (i, sub) in es.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                let needs = matches!(sub, SmvExpr::And(_) | SmvExpr::Implies(_, _));
                if needs {
                    out.push('(');
                }
                fmt_expr(sub, out);
                if needs {
                    out.push(')');
                }
            }
        }
        SmvExpr::Implies(a, b) => {
            let needs_a = matches!(**a, SmvExpr::And(_) | SmvExpr::Or(_) | SmvExpr::Implies(_, _));
            if needs_a {
                out.push('(');
            }
            fmt_expr(a, out);
            if needs_a {
                out.push(')');
            }
            out.push_str(" -> ");
            let needs_b = matches!(**b, SmvExpr::And(_) | SmvExpr::Or(_) | SmvExpr::Implies(_, _));
            if needs_b {
                out.push('(');
            }
            fmt_expr(b, out);
            if needs_b {
                out.push(')');
            }
        }
    }
}

/// Prints the module with the LTL property embedded.
pub fn print_smv(m: &SmvModule) -> String {
    let mut out = String::new();
    out.push_str("MODULE main\n");
    if !m.mangle_comments.is_empty() {
        out.push_str("-- name mangling:\n");
        for c in &m.mangle_comments {
            let _ = writeln!(out, "--   {c}");
        }
    }
    out.push_str("VAR\n");
    for (_, var) in &m.place_vars {
        let _ = writeln!(out, "  {var} : boolean;");
    }
    let _ = writeln!(out, "  {} : {{{}}};", m.tr_var, m.tr_domain.join(", "));
    for (_, var, symbols) in &m.data_vars {
        let _ = writeln!(out, "  {var} : {{{}}};", symbols.join(", "));
    }
    out.push_str("INIT\n  ");
    fmt_expr(&m.init, &mut out);
    out.push('\n');
    out.push_str("TRANS\n  case\n");
    for (symbol, post) in &m.trans_rules {
        let mut post_text = String::new();
        fmt_expr(post, &mut post_text);
        let _ = writeln!(out, "    {} = {} : {};", m.tr_var, symbol, post_text);
    }
    out.push_str("  esac\n");
    let _ = writeln!(out, "LTLSPEC {}", m.ltl);
    out
}

/// Labels of the infinite-path adaptation of a reachability graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TildeLabel {
    Trans(String),
    Last,
    Ended,
}

/// The infinite-path adaptation: transition labels move into the source
/// states, a self-looping sink absorbs terminated runs, and `last` states
/// bridge dead ends to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgTilde {
    /// Reachability-graph state (None for the sink) and label.
    pub states: Vec<(Option<usize>, TildeLabel)>,
    pub initials: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

pub fn build_rg_tilde(rg: &ReachGraph) -> RgTilde {
    let mut states: Vec<(Option<usize>, TildeLabel)> = vec![(None, TildeLabel::Ended)];
    let mut index: BTreeMap<(Option<usize>, TildeLabel), usize> =
        [((None, TildeLabel::Ended), 0)].into();
    let mut edges: BTreeSet<(usize, usize)> = [(0, 0)].into();
    let mut intern = |states: &mut Vec<(Option<usize>, TildeLabel)>,
                      key: (Option<usize>, TildeLabel)|
     -> usize {
        if let Some(&i) = index.get(&key) {
            return i;
        }
        let i = states.len();
        states.push(key.clone());
        index.insert(key, i);
        i
    };
    let has_out = |s: usize| rg.edges.iter().any(|(src, _, _)| *src == s);
    for (src, t, dst) in &rg.edges {
        let s_node = intern(&mut states, (Some(*src), TildeLabel::Trans(t.clone())));
        if has_out(*dst) {
            for (t2, _) in rg.successors_of(*dst) {
                let d_node = intern(
                    &mut states,
                    (Some(*dst), TildeLabel::Trans(t2.to_string())),
                );
                edges.insert((s_node, d_node));
            }
        } else {
            let d_node = intern(&mut states, (Some(*dst), TildeLabel::Last));
            edges.insert((s_node, d_node));
            edges.insert((d_node, 0));
        }
    }
    let initials: Vec<usize> = if has_out(rg.initial) {
        rg.successors_of(rg.initial)
            .map(|(t, _)| intern(&mut states, (Some(rg.initial), TildeLabel::Trans(t.to_string()))))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    } else {
        let n = intern(&mut states, (Some(rg.initial), TildeLabel::Last));
        edges.insert((n, 0));
        vec![n]
    };
    RgTilde {
        states,
        initials,
        edges: edges.into_iter().collect(),
    }
}
