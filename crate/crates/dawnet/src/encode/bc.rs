//! The BC action-language encoding and its translation into a sequence of
//! timed ASP programs.
//!
//! Places and the bookkeeping fluent are boolean, every variable becomes a
//! fluent over its write domain plus a null constant, and transitions become
//! action constants. Effects, inertia, mutual exclusion, input-place
//! executability and guard-violation constraints follow the law families of
//! the source encoding; guards enter negated, in ground disjunctive normal
//! form, as dynamic constraints.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::dawnet::DawNet;
use crate::encode::value_token;
use crate::guard::{to_ground_dnf, DnfLit, GuardError, DEFAULT_DNF_CAP};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BcError {
    #[error("null constant '{0}' collides with a domain value")]
    NullCollision(String),
    #[error("value tokens collide in the domain of '{0}'")]
    TokenCollision(String),
    #[error(transparent)]
    Guard(#[from] GuardError),
}

pub const TRUE_TOKEN: &str = "true";
pub const FALSE_TOKEN: &str = "false";

/// An atom `fluent = value`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BcAtom {
    pub fluent: String,
    pub value: String,
}

impl BcAtom {
    fn new(fluent: impl Into<String>, value: impl Into<String>) -> Self {
        BcAtom {
            fluent: fluent.into(),
            value: value.into(),
        }
    }
}

/// Head of a law: an atom, or `false` for constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BcHead {
    False,
    Atom(BcAtom),
}

/// Element of a dynamic law's `after` part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BcAfter {
    Atom(BcAtom),
    Action(String),
}

/// `A0 if A1,...,An ifcons A_{n+1},...,A_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticLaw {
    pub head: BcHead,
    pub if_atoms: Vec<BcAtom>,
    pub ifcons: Vec<BcAtom>,
}

/// `A0 after A'_1,...,A'_n ifcons A_{n+1},...,A_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicLaw {
    pub head: BcHead,
    pub after: Vec<BcAfter>,
    pub ifcons: Vec<BcAtom>,
}

/// A BC action description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcProgram {
    /// Fluent name and domain; every domain has at least two elements.
    pub fluents: Vec<(String, Vec<String>)>,
    pub actions: Vec<String>,
    pub static_laws: Vec<StaticLaw>,
    pub dynamic_laws: Vec<DynamicLaw>,
    pub initially: Vec<BcAtom>,
    pub finally: Vec<BcAtom>,
    pub null_name: String,
    pub trans_fluent: String,
}

impl BcProgram {
    pub fn fluent_domain(&self, name: &str) -> Option<&[String]> {
        self.fluents
            .iter()
            .find(|(f, _)| f == name)
            .map(|(_, d)| d.as_slice())
    }
}

/// Options for the encoding; the null constant is configurable.
#[derive(Debug, Clone)]
pub struct BcOptions {
    pub null_name: String,
    pub horizon_hint: Option<usize>,
    pub dnf_cap: usize,
}

impl Default for BcOptions {
    fn default() -> Self {
        BcOptions {
            null_name: "null".into(),
            horizon_hint: None,
            dnf_cap: DEFAULT_DNF_CAP,
        }
    }
}

/// Encodes a (finite-restricted) DAW-net as a BC action description.
pub fn encode_bc(w: &DawNet) -> Result<BcProgram, BcError> {
    encode_bc_with(w, &BcOptions::default())
}

pub fn encode_bc_with(w: &DawNet, opts: &BcOptions) -> Result<BcProgram, BcError> {
    let null = opts.null_name.clone();
    let places: Vec<String> = w.net().places().to_vec();
    let transitions: Vec<String> = w.net().transitions().to_vec();
    // Only variables that can ever hold a value become fluents; the others
    // are constantly undefined and fold away inside guard constraints.
    let ranges = w.write_domains();
    let mut var_fluents: Vec<(String, Vec<String>)> = Vec::new();
    for (v, range) in &ranges {
        if range.is_empty() {
            continue;
        }
        let mut domain: Vec<String> = range.iter().map(value_token).collect();
        if domain.iter().any(|d| *d == null) {
            return Err(BcError::NullCollision(null));
        }
        domain.push(null.clone());
        let mut dedup = domain.clone();
        dedup.sort();
        dedup.dedup();
        if dedup.len() != domain.len() {
            return Err(BcError::TokenCollision(v.clone()));
        }
        var_fluents.push((v.clone(), domain));
    }
    let taken: Vec<&String> = places.iter().chain(ranges.keys()).collect();
    let mut trans_fluent = "trans".to_string();
    while taken.iter().any(|n| **n == trans_fluent) {
        trans_fluent.push('_');
    }

    let bool_domain = vec![FALSE_TOKEN.to_string(), TRUE_TOKEN.to_string()];
    let mut fluents: Vec<(String, Vec<String>)> = Vec::new();
    for p in &places {
        fluents.push((p.clone(), bool_domain.clone()));
    }
    fluents.extend(var_fluents.iter().cloned());
    fluents.push((trans_fluent.clone(), bool_domain.clone()));

    let mut dynamic_laws = Vec::new();
    // Inertia for variable and place fluents; the bookkeeping fluent has
    // none, so a step without an action cannot justify any value for it.
    for (v, domain) in &var_fluents {
        for o in domain {
            dynamic_laws.push(DynamicLaw {
                head: BcHead::Atom(BcAtom::new(v, o)),
                after: vec![BcAfter::Atom(BcAtom::new(v, o))],
                ifcons: vec![BcAtom::new(v, o)],
            });
        }
    }
    for p in &places {
        for o in [FALSE_TOKEN, TRUE_TOKEN] {
            dynamic_laws.push(DynamicLaw {
                head: BcHead::Atom(BcAtom::new(p, o)),
                after: vec![BcAfter::Atom(BcAtom::new(p, o))],
                ifcons: vec![BcAtom::new(p, o)],
            });
        }
    }
    // Transition effects.
    for t in &transitions {
        let ti = w.net().transition_index(t).expect("known transition");
        let pre = w.net().preset_of_transition(ti);
        let post = w.net().postset_of_transition(ti);
        for &p in pre.iter().filter(|p| !post.contains(p)) {
            dynamic_laws.push(DynamicLaw {
                head: BcHead::Atom(BcAtom::new(&places[p], FALSE_TOKEN)),
                after: vec![BcAfter::Action(t.clone())],
                ifcons: vec![],
            });
        }
        for &p in post.iter().filter(|p| !pre.contains(p)) {
            dynamic_laws.push(DynamicLaw {
                head: BcHead::Atom(BcAtom::new(&places[p], TRUE_TOKEN)),
                after: vec![BcAfter::Action(t.clone())],
                ifcons: vec![],
            });
        }
        if let Some(spec) = w.write_spec(t) {
            for (v, set) in spec {
                if set.is_empty() {
                    dynamic_laws.push(DynamicLaw {
                        head: BcHead::Atom(BcAtom::new(v, &null)),
                        after: vec![BcAfter::Action(t.clone())],
                        ifcons: vec![],
                    });
                    continue;
                }
                for d in set {
                    dynamic_laws.push(DynamicLaw {
                        head: BcHead::Atom(BcAtom::new(v, value_token(d))),
                        after: vec![BcAfter::Action(t.clone())],
                        ifcons: vec![BcAtom::new(v, value_token(d))],
                    });
                }
                // Values outside the write set, and null, are forbidden.
                let allowed: Vec<String> = set.iter().map(value_token).collect();
                let domain = ranges[v].iter().map(value_token);
                for d in std::iter::once(null.clone()).chain(domain) {
                    if allowed.contains(&d) {
                        continue;
                    }
                    dynamic_laws.push(DynamicLaw {
                        head: BcHead::False,
                        after: vec![BcAfter::Action(t.clone())],
                        ifcons: vec![BcAtom::new(v, d)],
                    });
                }
            }
        }
    }
    // Transitions cannot run in parallel.
    for t in &transitions {
        for s in &transitions {
            if t != s {
                dynamic_laws.push(DynamicLaw {
                    head: BcHead::False,
                    after: vec![BcAfter::Action(t.clone()), BcAfter::Action(s.clone())],
                    ifcons: vec![],
                });
            }
        }
    }
    // Input places must be marked.
    for t in &transitions {
        let ti = w.net().transition_index(t).expect("known transition");
        for &p in w.net().preset_of_transition(ti) {
            dynamic_laws.push(DynamicLaw {
                head: BcHead::False,
                after: vec![
                    BcAfter::Action(t.clone()),
                    BcAfter::Atom(BcAtom::new(&places[p], FALSE_TOKEN)),
                ],
                ifcons: vec![],
            });
        }
    }
    // The bookkeeping fluent records that an action happened.
    for t in &transitions {
        dynamic_laws.push(DynamicLaw {
            head: BcHead::Atom(BcAtom::new(&trans_fluent, TRUE_TOKEN)),
            after: vec![BcAfter::Action(t.clone())],
            ifcons: vec![],
        });
    }
    // Guard violations: one dynamic constraint per clause of the negated
    // guard in ground DNF.
    for t in &transitions {
        let guard = w.guard(t).expect("guards are total");
        if guard.is_true() {
            continue;
        }
        let dnf = to_ground_dnf(&guard.clone().negate(), w.data(), &ranges, opts.dnf_cap)?;
        'clause: for clause in &dnf.clauses {
            let mut after = vec![BcAfter::Action(t.clone())];
            for lit in clause {
                match lit {
                    DnfLit::Eq(v, o) => {
                        // Variables without fluents can never equal anything.
                        if !ranges.get(v).is_some_and(|r| !r.is_empty()) {
                            continue 'clause;
                        }
                        after.push(BcAfter::Atom(BcAtom::new(v, value_token(o))));
                    }
                    DnfLit::NotDef(v) => {
                        if ranges.get(v).is_some_and(|r| !r.is_empty()) {
                            after.push(BcAfter::Atom(BcAtom::new(v, &null)));
                        }
                        // Otherwise the variable is always undefined and the
                        // literal is constantly true.
                    }
                }
            }
            dynamic_laws.push(DynamicLaw {
                head: BcHead::False,
                after,
                ifcons: vec![],
            });
        }
    }

    let mut initially = vec![BcAtom::new(w.source(), TRUE_TOKEN)];
    for p in &places {
        if p != w.source() {
            initially.push(BcAtom::new(p, FALSE_TOKEN));
        }
    }
    for (v, _) in &var_fluents {
        initially.push(BcAtom::new(v, &null));
    }
    initially.push(BcAtom::new(&trans_fluent, TRUE_TOKEN));

    let mut finally = vec![BcAtom::new(w.sink(), TRUE_TOKEN)];
    for p in &places {
        if p != w.sink() {
            finally.push(BcAtom::new(p, FALSE_TOKEN));
        }
    }

    Ok(BcProgram {
        fluents,
        actions: transitions,
        static_laws: Vec::new(),
        dynamic_laws,
        initially,
        finally,
        null_name: null,
        trans_fluent,
    })
}

/// A possibly strong-negated timed atom `i : A`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TimedLiteral {
    pub strong_neg: bool,
    pub time: usize,
    pub atom: AspAtom,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum AspAtom {
    Fluent { fluent: String, value: String },
    Action(String),
}

impl TimedLiteral {
    pub fn fluent(time: usize, fluent: &str, value: &str) -> Self {
        TimedLiteral {
            strong_neg: false,
            time,
            atom: AspAtom::Fluent {
                fluent: fluent.to_string(),
                value: value.to_string(),
            },
        }
    }

    pub fn action(time: usize, action: &str) -> Self {
        TimedLiteral {
            strong_neg: false,
            time,
            atom: AspAtom::Action(action.to_string()),
        }
    }

    pub fn negated(mut self) -> Self {
        self.strong_neg = !self.strong_neg;
        self
    }
}

/// `head_1 | ... | head_k :- body_pos, not body_naf.`; an empty head is a
/// constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspRule {
    pub head: Vec<TimedLiteral>,
    pub body_pos: Vec<TimedLiteral>,
    pub body_naf: Vec<TimedLiteral>,
}

/// The timed program `P_l` of a BC description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspProgram {
    pub horizon: usize,
    pub fluents: Vec<(String, Vec<String>)>,
    pub actions: Vec<String>,
    pub rules: Vec<AspRule>,
}

fn head_lit(head: &BcHead, time: usize) -> Vec<TimedLiteral> {
    match head {
        BcHead::False => vec![],
        BcHead::Atom(a) => vec![TimedLiteral::fluent(time, &a.fluent, &a.value)],
    }
}

/// Translates a BC description into the timed ASP program with horizon `l`:
/// law rules per step, initial facts, initial-state guessing, action
/// totality, existence and uniqueness of fluent values, and the goal atoms
/// as constraints at the final step.
pub fn translate_asp(b: &BcProgram, horizon: usize) -> AspProgram {
    let mut rules = Vec::new();
    // Static laws hold at every step.
    for law in &b.static_laws {
        for i in 0..=horizon {
            rules.push(AspRule {
                head: head_lit(&law.head, i),
                body_pos: law
                    .if_atoms
                    .iter()
                    .map(|a| TimedLiteral::fluent(i, &a.fluent, &a.value))
                    .collect(),
                body_naf: law
                    .ifcons
                    .iter()
                    .map(|a| TimedLiteral::fluent(i, &a.fluent, &a.value).negated())
                    .collect(),
            });
        }
    }
    // Dynamic laws connect step i to step i+1.
    for law in &b.dynamic_laws {
        for i in 0..horizon {
            rules.push(AspRule {
                head: head_lit(&law.head, i + 1),
                body_pos: law
                    .after
                    .iter()
                    .map(|el| match el {
                        BcAfter::Atom(a) => TimedLiteral::fluent(i, &a.fluent, &a.value),
                        BcAfter::Action(t) => TimedLiteral::action(i, t),
                    })
                    .collect(),
                body_naf: law
                    .ifcons
                    .iter()
                    .map(|a| TimedLiteral::fluent(i + 1, &a.fluent, &a.value).negated())
                    .collect(),
            });
        }
    }
    // Initial facts.
    for a in &b.initially {
        rules.push(AspRule {
            head: vec![TimedLiteral::fluent(0, &a.fluent, &a.value)],
            body_pos: vec![],
            body_naf: vec![],
        });
    }
    // Guess the initial state.
    for (f, domain) in &b.fluents {
        for v in domain {
            let lit = TimedLiteral::fluent(0, f, v);
            rules.push(AspRule {
                head: vec![lit.clone(), lit.negated()],
                body_pos: vec![],
                body_naf: vec![],
            });
        }
    }
    // Total knowledge on action execution.
    for a in &b.actions {
        for i in 0..horizon {
            let lit = TimedLiteral::action(i, a);
            rules.push(AspRule {
                head: vec![lit.clone(), lit.negated()],
                body_pos: vec![],
                body_naf: vec![],
            });
        }
    }
    // Existence and uniqueness of fluent values.
    for (f, domain) in &b.fluents {
        for i in 0..=horizon {
            rules.push(AspRule {
                head: vec![],
                body_pos: vec![],
                body_naf: domain
                    .iter()
                    .map(|v| TimedLiteral::fluent(i, f, v))
                    .collect(),
            });
            for v in domain {
                for w in domain {
                    if v != w {
                        rules.push(AspRule {
                            head: vec![TimedLiteral::fluent(i, f, v).negated()],
                            body_pos: vec![TimedLiteral::fluent(i, f, w)],
                            body_naf: vec![],
                        });
                    }
                }
            }
        }
    }
    // Goal atoms constrain the final step.
    for a in &b.finally {
        rules.push(AspRule {
            head: vec![],
            body_pos: vec![],
            body_naf: vec![TimedLiteral::fluent(horizon, &a.fluent, &a.value)],
        });
    }
    AspProgram {
        horizon,
        fluents: b.fluents.clone(),
        actions: b.actions.clone(),
        rules,
    }
}

fn fmt_atom(a: &BcAtom) -> String {
    format!("{}={}", a.fluent, a.value)
}

/// Prints the BC description in surface syntax, one law per line.
pub fn print_bc(b: &BcProgram) -> String {
    let mut out = String::new();
    out.push_str("% BC action description\n");
    out.push_str("% fluents\n");
    for (f, domain) in &b.fluents {
        let _ = writeln!(out, "fluent {} {{{}}}.", f, domain.join(", "));
    }
    out.push_str("% actions\n");
    for a in &b.actions {
        let _ = writeln!(out, "action {a}.");
    }
    out.push_str("% laws\n");
    let head_str = |h: &BcHead| match h {
        BcHead::False => "false".to_string(),
        BcHead::Atom(a) => fmt_atom(a),
    };
    for law in &b.static_laws {
        let mut line = format!("caused {}", head_str(&law.head));
        let mut ifs: Vec<String> = law.if_atoms.iter().map(fmt_atom).collect();
        ifs.extend(law.ifcons.iter().map(|a| format!("not -{}", fmt_atom(a))));
        if !ifs.is_empty() {
            let _ = write!(line, " if {}", ifs.join(", "));
        }
        let _ = writeln!(out, "{line}.");
    }
    for law in &b.dynamic_laws {
        let mut line = format!("caused {}", head_str(&law.head));
        let ifs: Vec<String> = law
            .ifcons
            .iter()
            .map(|a| format!("not -{}", fmt_atom(a)))
            .collect();
        if !ifs.is_empty() {
            let _ = write!(line, " if {}", ifs.join(", "));
        }
        let afters: Vec<String> = law
            .after
            .iter()
            .map(|el| match el {
                BcAfter::Atom(a) => fmt_atom(a),
                BcAfter::Action(t) => t.clone(),
            })
            .collect();
        let _ = write!(line, " after {}", afters.join(", "));
        let _ = writeln!(out, "{line}.");
    }
    for a in &b.initially {
        let _ = writeln!(out, "initially {}.", fmt_atom(a));
    }
    for a in &b.finally {
        let _ = writeln!(out, "finally {}.", fmt_atom(a));
    }
    out
}

fn asp_const(s: &str) -> String {
    let plain = s
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_');
    let starts_lower = s.chars().next().is_some_and(|c| c.is_ascii_lowercase() || c.is_ascii_digit());
    let int_like = s.parse::<i64>().is_ok();
    if int_like || (plain && starts_lower) {
        s.to_string()
    } else {
        format!("\"{s}\"")
    }
}

fn fmt_timed(l: &TimedLiteral) -> String {
    let body = match &l.atom {
        AspAtom::Fluent { fluent, value } => {
            format!("val({}, {}, {})", asp_const(fluent), asp_const(value), l.time)
        }
        AspAtom::Action(a) => format!("occ({}, {})", asp_const(a), l.time),
    };
    if l.strong_neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Prints the timed program in grounder syntax: `-` for strong negation,
/// `not` for negation as failure, `;` for disjunctive heads.
pub fn print_asp(p: &AspProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "% timed ASP program, horizon {}", p.horizon);
    for rule in &p.rules {
        let head = rule
            .head
            .iter()
            .map(fmt_timed)
            .collect::<Vec<_>>()
            .join(" ; ");
        let mut body: Vec<String> = rule.body_pos.iter().map(fmt_timed).collect();
        body.extend(rule.body_naf.iter().map(|l| format!("not {}", fmt_timed(l))));
        let line = match (head.is_empty(), body.is_empty()) {
            (true, _) => format!(":- {}.", body.join(", ")),
            (false, true) => format!("{head}."),
            (false, false) => format!("{head} :- {}.", body.join(", ")),
        };
        let _ = writeln!(out, "{line}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::loan_model;
    use crate::core_net::PetriNet;
    use crate::data_model::{int_set, DataModel, Domain};
    use crate::dawnet::WriteSpec;

    fn tiny() -> DawNet {
        let net = PetriNet::new(vec!["s", "e"], vec!["t"], vec![("s", "t"), ("t", "e")]).unwrap();
        DawNet::new(net, DataModel::default(), BTreeMap::new(), BTreeMap::new()).unwrap()
    }

    #[test]
    fn place_only_net_has_no_variable_laws() {
        let b = encode_bc(&tiny()).unwrap();
        // Fluents: both places plus the bookkeeping one.
        assert_eq!(b.fluents.len(), 3);
        assert!(b.fluents.iter().all(|(_, d)| d.len() >= 2));
        // Laws: 2 places x 2 inertia + 2 effects + 1 input-place + 1 trans.
        assert_eq!(b.dynamic_laws.len(), 8);
        assert!(b
            .dynamic_laws
            .iter()
            .all(|l| !matches!(&l.head, BcHead::Atom(a) if a.fluent != "s" && a.fluent != "e" && a.fluent != b.trans_fluent)));
    }

    #[test]
    fn deletion_writes_null() {
        let net = PetriNet::new(vec!["s", "e"], vec!["t"], vec![("s", "t"), ("t", "e")]).unwrap();
        let data = DataModel::new(vec![
            ("x".into(), Domain::int_ordered(int_set([1]))),
            ("y".into(), Domain::int_ordered(int_set([1]))),
        ]);
        let writes: BTreeMap<String, WriteSpec> = [(
            "t".to_string(),
            WriteSpec::from([
                ("x".to_string(), std::collections::BTreeSet::new()),
                ("y".to_string(), int_set([1])),
            ]),
        )]
        .into();
        let w = DawNet::new(net, data, writes, BTreeMap::new()).unwrap();
        let b = encode_bc(&w).unwrap();
        // x has an empty write domain, so it is not a fluent and its
        // deletion law is dropped with it; y gets the effect law.
        assert!(b.fluent_domain("x").is_none());
        assert!(b.fluent_domain("y").is_some());
        let y_effect = b.dynamic_laws.iter().any(|l| {
            matches!(&l.head, BcHead::Atom(a) if a.fluent == "y" && a.value == "1")
                && l.after.iter().any(|e| matches!(e, BcAfter::Action(t) if t == "t"))
        });
        assert!(y_effect);
    }

    #[test]
    fn deletion_law_emitted_for_writable_variable() {
        let net = PetriNet::new(
            vec!["s", "m", "e"],
            vec!["t1", "t2"],
            vec![("s", "t1"), ("t1", "m"), ("m", "t2"), ("t2", "e")],
        )
        .unwrap();
        let data = DataModel::new(vec![("x".into(), Domain::int_ordered(int_set([1])))]);
        let writes: BTreeMap<String, WriteSpec> = [
            (
                "t1".to_string(),
                WriteSpec::from([("x".to_string(), int_set([1]))]),
            ),
            (
                "t2".to_string(),
                WriteSpec::from([("x".to_string(), std::collections::BTreeSet::new())]),
            ),
        ]
        .into();
        let w = DawNet::new(net, data, writes, BTreeMap::new()).unwrap();
        let b = encode_bc(&w).unwrap();
        let null_law = b.dynamic_laws.iter().any(|l| {
            matches!(&l.head, BcHead::Atom(a) if a.fluent == "x" && a.value == "null")
                && l.after.iter().any(|e| matches!(e, BcAfter::Action(t) if t == "t2"))
                && l.ifcons.is_empty()
        });
        assert!(null_law, "deletion must compile to an unconditional null law");
    }

    #[test]
    fn loan_t6_guard_yields_violation_constraints() {
        let w = loan_model().restrict_finite();
        let b = encode_bc(&w).unwrap();
        // not (request <= 5000) lists each violating value as a constraint.
        let violating: Vec<&DynamicLaw> = b
            .dynamic_laws
            .iter()
            .filter(|l| {
                matches!(l.head, BcHead::False)
                    && l.after
                        .iter()
                        .any(|e| matches!(e, BcAfter::Action(t) if t == "T6"))
                    && l.after
                        .iter()
                        .any(|e| matches!(e, BcAfter::Atom(a) if a.fluent == "request"))
            })
            .collect();
        let values: Vec<&str> = violating
            .iter()
            .flat_map(|l| {
                l.after.iter().filter_map(|e| match e {
                    BcAfter::Atom(a) if a.fluent == "request" => Some(a.value.as_str()),
                    _ => None,
                })
            })
            .collect();
        for v in ["30000", "50000", "60000", "99999", "100000", "500000"] {
            assert!(values.contains(&v), "missing violation for {v}");
        }
        assert!(!values.contains(&"5000"));
        // The rewrite of a negated comparison is as printed: the undefined
        // case is not enumerated.
        assert!(!values.contains(&"null"));
    }

    #[test]
    fn mutual_exclusion_quadratic() {
        let w = loan_model().restrict_finite();
        let b = encode_bc(&w).unwrap();
        let n = w.net().transitions().len();
        let pairs = b
            .dynamic_laws
            .iter()
            .filter(|l| {
                matches!(l.head, BcHead::False)
                    && l.after.len() == 2
                    && l.after.iter().all(|e| matches!(e, BcAfter::Action(_)))
            })
            .count();
        assert_eq!(pairs, n * (n - 1));
    }

    #[test]
    fn translation_time_stamps_rules() {
        let b = encode_bc(&tiny()).unwrap();
        let p = translate_asp(&b, 1);
        // The effect law e=true after t becomes 1:e=true <- 0:t.
        let found = p.rules.iter().any(|r| {
            r.head
                == vec![TimedLiteral::fluent(1, "e", TRUE_TOKEN)]
                && r.body_pos == vec![TimedLiteral::action(0, "t")]
                && r.body_naf.is_empty()
        });
        assert!(found);
        // Finally atoms become constraints at the horizon only.
        let finals: Vec<&AspRule> = p
            .rules
            .iter()
            .filter(|r| r.head.is_empty() && r.body_pos.is_empty() && r.body_naf.len() == 1)
            .collect();
        assert!(finals
            .iter()
            .all(|r| r.body_naf[0].time == 1 && !r.body_naf[0].strong_neg));
    }

    #[test]
    fn static_law_with_empty_body_holds_at_every_step() {
        let mut b = encode_bc(&tiny()).unwrap();
        b.static_laws.push(StaticLaw {
            head: BcHead::Atom(BcAtom::new("s", TRUE_TOKEN)),
            if_atoms: vec![],
            ifcons: vec![],
        });
        let p = translate_asp(&b, 2);
        let unconditional = p
            .rules
            .iter()
            .filter(|r| {
                r.head == vec![TimedLiteral::fluent(r.head.first().map_or(0, |h| h.time), "s", TRUE_TOKEN)]
                    && r.body_pos.is_empty()
                    && r.body_naf.is_empty()
                    && r.head.len() == 1
            })
            .count();
        // One per step 0..=2, plus the initially fact at 0.
        assert_eq!(unconditional, 4);
    }

    #[test]
    fn printing_is_stable() {
        let w = loan_model().restrict_finite();
        let b = encode_bc(&w).unwrap();
        assert_eq!(print_bc(&b), print_bc(&encode_bc(&w).unwrap()));
        let text = print_bc(&b);
        assert!(text.contains("caused request=0 if not -request=0 after request=0."));
        assert!(text.contains("initially start=true."));
        assert!(text.contains("finally end=true."));
        let p = translate_asp(&b, 3);
        let asp = print_asp(&p);
        assert!(asp.contains("val(start, true, 0)."));
        assert!(asp.contains(" ; -"));
    }

    #[test]
    fn empty_program_prints_headers_only() {
        let b = BcProgram {
            fluents: vec![],
            actions: vec![],
            static_laws: vec![],
            dynamic_laws: vec![],
            initially: vec![],
            finally: vec![],
            null_name: "null".into(),
            trans_fluent: "trans".into(),
        };
        let text = print_bc(&b);
        assert!(text.lines().all(|l| l.starts_with('%')));
    }

    #[test]
    fn quoting_of_awkward_identifiers() {
        assert_eq!(asp_const("T1"), "\"T1\"");
        assert_eq!(asp_const("t1"), "t1");
        assert_eq!(asp_const("60000"), "60000");
        assert_eq!(asp_const("weird id"), "\"weird id\"");
    }

    #[test]
    fn null_collision_rejected() {
        let net = PetriNet::new(vec!["s", "e"], vec!["t"], vec![("s", "t"), ("t", "e")]).unwrap();
        let data = DataModel::new(vec![(
            "x".into(),
            Domain::unordered(crate::data_model::str_set(["null"])),
        )]);
        let writes: BTreeMap<String, WriteSpec> = [(
            "t".to_string(),
            WriteSpec::from([("x".to_string(), crate::data_model::str_set(["null"]))]),
        )]
        .into();
        let w = DawNet::new(net, data, writes, BTreeMap::new()).unwrap();
        assert_eq!(
            encode_bc(&w).unwrap_err(),
            BcError::NullCollision("null".into())
        );
    }
}
