//! The state-variable planning encoding, lowered to classical PDDL.
//!
//! Places and variables become state variables (variables range over their
//! write domain plus null), the data-model order and per-transition write
//! sets become rigid relations, and each transition becomes an action
//! template whose parameters select the written values. Lowering eliminates
//! disjunction by splitting templates along the DNF of their preconditions
//! and replaces state variables inside atoms by linked parameters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::dawnet::{DawNet, State};
use crate::encode::{sanitize, value_token};
use crate::guard::{GuardError, GuardExpr, Term};

pub const NULL_OBJ: &str = "null";
pub const TRUE_OBJ: &str = "true";
pub const FALSE_OBJ: &str = "false";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PddlError {
    #[error("DNF lowering exceeded the clause cap ({cap})")]
    DnfBlowup { cap: usize },
    #[error(transparent)]
    Guard(#[from] GuardError),
}

/// A term of the precondition language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PTerm {
    StateVar(String),
    Param(String),
    Obj(String),
}

/// An atom of the precondition language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PreAtom {
    /// `v = t` with a state variable on the left.
    VarEq(String, PTerm),
    /// The rigid order relation.
    Ord(PTerm, PTerm),
    /// The rigid write-range relation `wr_{t,v}(z)`.
    WrRange {
        transition: String,
        variable: String,
        term: PTerm,
    },
}

/// Preconditions in the extended language: boolean combinations of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreExpr {
    True,
    Atom(PreAtom),
    Not(Box<PreExpr>),
    And(Box<PreExpr>, Box<PreExpr>),
}

impl PreExpr {
    pub fn and(self, other: PreExpr) -> PreExpr {
        match (self, other) {
            (PreExpr::True, x) | (x, PreExpr::True) => x,
            (a, b) => PreExpr::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn negate(self) -> PreExpr {
        PreExpr::Not(Box::new(self))
    }

    /// Some(literals) when the expression is a conjunction of (possibly
    /// negated) atoms.
    pub fn as_literal_conjunction(&self) -> Option<Vec<(bool, PreAtom)>> {
        let mut out = Vec::new();
        fn walk(e: &PreExpr, out: &mut Vec<(bool, PreAtom)>) -> bool {
            match e {
                PreExpr::True => true,
                PreExpr::Atom(a) => {
                    out.push((true, a.clone()));
                    true
                }
                PreExpr::Not(inner) => match inner.as_ref() {
                    PreExpr::Atom(a) => {
                        out.push((false, a.clone()));
                        true
                    }
                    _ => false,
                },
                PreExpr::And(a, b) => walk(a, out) && walk(b, out),
            }
        }
        walk(self, &mut out).then_some(out)
    }
}

/// An action template; parameters all appear in the head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTemplate {
    pub name: String,
    /// The transition this template stands for (the lowering surjection).
    pub transition: String,
    /// Parameter name and its finite range of objects.
    pub params: Vec<(String, Vec<String>)>,
    pub pre: PreExpr,
    /// Assignments `v <- term` applied simultaneously.
    pub eff: Vec<(String, PTerm)>,
}

/// A state-variable planning domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvDomain {
    pub objects: Vec<String>,
    /// State variable name and range.
    pub state_vars: Vec<(String, Vec<String>)>,
    pub ord_pairs: BTreeSet<(String, String)>,
    /// `(transition, variable) -> allowed objects`; `[null]` for deletions.
    pub wr_ranges: BTreeMap<(String, String), Vec<String>>,
    pub templates: Vec<ActionTemplate>,
}

/// A total assignment of objects to state variables.
pub type SvState = BTreeMap<String, String>;

/// The mapping from DAW-net states to planning states: places become
/// booleans, bound variables their value, unbound ones null.
pub fn psi(w: &DawNet, s: &State) -> SvState {
    let mut out = SvState::new();
    for (p, &c) in w.net().places().iter().zip(s.marking.counts()) {
        out.insert(p.clone(), if c > 0 { TRUE_OBJ } else { FALSE_OBJ }.to_string());
    }
    for v in w.data().variables() {
        let token = match s.eta.get(v) {
            Some(value) => value_token(value),
            None => NULL_OBJ.to_string(),
        };
        out.insert(v.to_string(), token);
    }
    out
}

/// Inverse of [`psi`] for safe nets.
pub fn psi_inverse(w: &DawNet, s: &SvState) -> State {
    let counts = w
        .net()
        .places()
        .iter()
        .map(|p| u32::from(s[p] == TRUE_OBJ))
        .collect();
    let mut eta = crate::data_model::Assignment::empty();
    for v in w.data().variables() {
        let token = &s[v];
        if token != NULL_OBJ {
            let value = w
                .write_domain(v)
                .into_iter()
                .find(|val| value_token(val) == *token)
                .expect("token names a write-domain value");
            eta = eta.bind(w.data(), v, value).expect("value is in the domain");
        }
    }
    State {
        marking: crate::core_net::Marking::from_counts(counts),
        eta,
    }
}

fn term_of(t: &Term) -> PTerm {
    match t {
        Term::Var(v) => PTerm::StateVar(v.clone()),
        Term::Const(c) => PTerm::Obj(value_token(c)),
    }
}

/// The guard translation into the extended precondition language.
pub fn translate_guard(g: &GuardExpr) -> PreExpr {
    match g {
        GuardExpr::True => PreExpr::True,
        GuardExpr::Def(v) => PreExpr::Atom(PreAtom::VarEq(
            v.clone(),
            PTerm::Obj(NULL_OBJ.to_string()),
        ))
        .negate(),
        GuardExpr::Eq(v, t) => {
            let not_null = PreExpr::Atom(PreAtom::VarEq(
                v.clone(),
                PTerm::Obj(NULL_OBJ.to_string()),
            ))
            .negate();
            not_null.and(PreExpr::Atom(PreAtom::VarEq(v.clone(), term_of(t))))
        }
        GuardExpr::Leq(t1, t2) => PreExpr::Atom(PreAtom::Ord(term_of(t1), term_of(t2))),
        GuardExpr::Not(e) => translate_guard(e).negate(),
        GuardExpr::And(a, b) => translate_guard(a).and(translate_guard(b)),
    }
}

/// Encodes a (finite-restricted) DAW-net as a state-variable planning domain
/// with its initial state and goal literals.
pub fn encode_sv(w: &DawNet) -> (SvDomain, SvState, Vec<(String, String)>) {
    let ranges = w.write_domains();
    let mut state_vars: Vec<(String, Vec<String>)> = Vec::new();
    for p in w.net().places() {
        state_vars.push((p.clone(), vec![FALSE_OBJ.to_string(), TRUE_OBJ.to_string()]));
    }
    for (v, range) in &ranges {
        let mut objs: Vec<String> = range.iter().map(value_token).collect();
        objs.push(NULL_OBJ.to_string());
        state_vars.push((v.clone(), objs));
    }
    state_vars.sort();
    let mut objects: BTreeSet<String> = state_vars
        .iter()
        .flat_map(|(_, r)| r.iter().cloned())
        .collect();
    let ord_pairs: BTreeSet<(String, String)> = w
        .data()
        .all_order_pairs()
        .into_iter()
        .map(|(a, b)| (value_token(&a), value_token(&b)))
        .collect();
    objects.extend(ord_pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]));

    let mut wr_ranges = BTreeMap::new();
    let mut templates = Vec::new();
    for t in w.net().transitions() {
        let ti = w.net().transition_index(t).expect("known transition");
        let mut params = Vec::new();
        let mut pre = translate_guard(w.guard(t).expect("guards are total"));
        let mut eff: Vec<(String, PTerm)> = Vec::new();
        if let Some(spec) = w.write_spec(t) {
            for (v, set) in spec {
                let range = if set.is_empty() {
                    vec![NULL_OBJ.to_string()]
                } else {
                    set.iter().map(value_token).collect()
                };
                wr_ranges.insert((t.clone(), v.clone()), range);
                let z = format!("z_{v}");
                // Parameters range over the variable's whole domain; the
                // rigid wr relation restricts them to the write set.
                let mut full: Vec<String> = ranges[v].iter().map(value_token).collect();
                full.push(NULL_OBJ.to_string());
                params.push((z.clone(), full));
                pre = pre.and(PreExpr::Atom(PreAtom::WrRange {
                    transition: t.clone(),
                    variable: v.clone(),
                    term: PTerm::Param(z.clone()),
                }));
                eff.push((v.clone(), PTerm::Param(z)));
            }
        }
        for &p in w.net().preset_of_transition(ti) {
            pre = pre.and(PreExpr::Atom(PreAtom::VarEq(
                w.net().places()[p].clone(),
                PTerm::Obj(TRUE_OBJ.to_string()),
            )));
        }
        let post = w.net().postset_of_transition(ti);
        for &p in w.net().preset_of_transition(ti) {
            if !post.contains(&p) {
                eff.push((
                    w.net().places()[p].clone(),
                    PTerm::Obj(FALSE_OBJ.to_string()),
                ));
            }
        }
        for &p in post {
            eff.push((
                w.net().places()[p].clone(),
                PTerm::Obj(TRUE_OBJ.to_string()),
            ));
        }
        templates.push(ActionTemplate {
            name: t.clone(),
            transition: t.clone(),
            params,
            pre,
            eff,
        });
    }

    let initial = w.initial_state();
    let s0 = psi(w, &initial);
    let mut goal = vec![(w.sink().to_string(), TRUE_OBJ.to_string())];
    for p in w.net().places() {
        if p != w.sink() {
            goal.push((p.clone(), FALSE_OBJ.to_string()));
        }
    }
    (
        SvDomain {
            objects: objects.into_iter().collect(),
            state_vars,
            ord_pairs,
            wr_ranges,
            templates,
        },
        s0,
        goal,
    )
}

/// Lowers every template to the classical fragment: state variables inside
/// rigid atoms or on the right of an equality become fresh linked
/// parameters, and preconditions split into one template per DNF clause,
/// suffixed `_k`. Records the surjection back onto transitions in
/// [`ActionTemplate::transition`].
pub fn lower_classical(d: &SvDomain, cap: usize) -> Result<SvDomain, PddlError> {
    let var_range = |v: &str| -> Vec<String> {
        d.state_vars
            .iter()
            .find(|(n, _)| n == v)
            .map(|(_, r)| r.clone())
            .unwrap_or_default()
    };
    let mut templates = Vec::new();
    for t in &d.templates {
        let mut params = t.params.clone();
        let mut linked: BTreeMap<String, String> = BTreeMap::new();
        let link = |v: &String,
                        params: &mut Vec<(String, Vec<String>)>,
                        linked: &mut BTreeMap<String, String>| {
            linked
                .entry(v.clone())
                .or_insert_with(|| {
                    let q = format!("q_{v}");
                    params.push((q.clone(), var_range(v)));
                    q
                })
                .clone()
        };
        // Replace state variables in atom positions that classical PDDL
        // cannot express directly.
        let mut rewrite = |atom: &PreAtom| -> PreAtom {
            let fix = |term: &PTerm,
                       params: &mut Vec<(String, Vec<String>)>,
                       linked: &mut BTreeMap<String, String>| {
                match term {
                    PTerm::StateVar(v) => PTerm::Param(link(v, params, linked)),
                    other => other.clone(),
                }
            };
            match atom {
                PreAtom::VarEq(v, term) => {
                    PreAtom::VarEq(v.clone(), fix(term, &mut params, &mut linked))
                }
                PreAtom::Ord(a, b) => PreAtom::Ord(
                    fix(a, &mut params, &mut linked),
                    fix(b, &mut params, &mut linked),
                ),
                PreAtom::WrRange {
                    transition,
                    variable,
                    term,
                } => PreAtom::WrRange {
                    transition: transition.clone(),
                    variable: variable.clone(),
                    term: fix(term, &mut params, &mut linked),
                },
            }
        };
        let rewritten = map_atoms(&t.pre, &mut rewrite);
        let mut clauses = dnf(&rewritten, true, cap)?;
        // Linking conjuncts v = q_v apply to every clause.
        let links: Vec<(bool, PreAtom)> = linked
            .iter()
            .map(|(v, q)| (true, PreAtom::VarEq(v.clone(), PTerm::Param(q.clone()))))
            .collect();
        for clause in &mut clauses {
            clause.splice(0..0, links.iter().cloned());
        }
        let many = clauses.len() > 1;
        for (k, clause) in clauses.into_iter().enumerate() {
            let pre = clause.into_iter().fold(PreExpr::True, |acc, (pos, atom)| {
                let a = PreExpr::Atom(atom);
                acc.and(if pos { a } else { a.negate() })
            });
            templates.push(ActionTemplate {
                name: if many {
                    format!("{}_{}", t.name, k + 1)
                } else {
                    t.name.clone()
                },
                transition: t.transition.clone(),
                params: params.clone(),
                pre,
                eff: t.eff.clone(),
            });
        }
    }
    Ok(SvDomain {
        objects: d.objects.clone(),
        state_vars: d.state_vars.clone(),
        ord_pairs: d.ord_pairs.clone(),
        wr_ranges: d.wr_ranges.clone(),
        templates,
    })
}

fn map_atoms(e: &PreExpr, f: &mut impl FnMut(&PreAtom) -> PreAtom) -> PreExpr {
    match e {
        PreExpr::True => PreExpr::True,
        PreExpr::Atom(a) => PreExpr::Atom(f(a)),
        PreExpr::Not(inner) => PreExpr::Not(Box::new(map_atoms(inner, f))),
        PreExpr::And(a, b) => {
            PreExpr::And(Box::new(map_atoms(a, f)), Box::new(map_atoms(b, f)))
        }
    }
}

type Clause = Vec<(bool, PreAtom)>;

fn dnf(e: &PreExpr, positive: bool, cap: usize) -> Result<Vec<Clause>, PddlError> {
    let out = match (e, positive) {
        (PreExpr::True, true) => vec![vec![]],
        (PreExpr::True, false) => vec![],
        (PreExpr::Atom(a), pos) => vec![vec![(pos, a.clone())]],
        (PreExpr::Not(inner), pos) => dnf(inner, !pos, cap)?,
        (PreExpr::And(a, b), true) => {
            let ca = dnf(a, true, cap)?;
            let cb = dnf(b, true, cap)?;
            if ca.len().saturating_mul(cb.len()) > cap {
                return Err(PddlError::DnfBlowup { cap });
            }
            let mut out = Vec::new();
            for x in &ca {
                for y in &cb {
                    let mut clause = x.clone();
                    clause.extend(y.iter().cloned());
                    out.push(clause);
                }
            }
            out
        }
        (PreExpr::And(a, b), false) => {
            let mut out = dnf(a, false, cap)?;
            out.extend(dnf(b, false, cap)?);
            out
        }
    };
    if out.len() > cap {
        return Err(PddlError::DnfBlowup { cap });
    }
    Ok(out)
}

/// Evaluates a (classical or extended) precondition on a total state with a
/// parameter grounding.
pub fn eval_pre(
    d: &SvDomain,
    e: &PreExpr,
    s: &SvState,
    grounding: &BTreeMap<String, String>,
) -> bool {
    let resolve = |t: &PTerm| -> String {
        match t {
            PTerm::StateVar(v) => s[v].clone(),
            PTerm::Param(p) => grounding[p].clone(),
            PTerm::Obj(o) => o.clone(),
        }
    };
    match e {
        PreExpr::True => true,
        PreExpr::Atom(PreAtom::VarEq(v, t)) => s[v] == resolve(t),
        PreExpr::Atom(PreAtom::Ord(a, b)) => {
            d.ord_pairs.contains(&(resolve(a), resolve(b)))
        }
        PreExpr::Atom(PreAtom::WrRange {
            transition,
            variable,
            term,
        }) => d.wr_ranges[&(transition.clone(), variable.clone())].contains(&resolve(term)),
        PreExpr::Not(inner) => !eval_pre(d, inner, s, grounding),
        PreExpr::And(a, b) => eval_pre(d, a, s, grounding) && eval_pre(d, b, s, grounding),
    }
}

/// Applies a ground action's effects.
pub fn apply_eff(
    t: &ActionTemplate,
    s: &SvState,
    grounding: &BTreeMap<String, String>,
) -> SvState {
    let mut out = s.clone();
    for (v, term) in &t.eff {
        let val = match term {
            PTerm::StateVar(u) => s[u].clone(),
            PTerm::Param(p) => grounding[p].clone(),
            PTerm::Obj(o) => o.clone(),
        };
        out.insert(v.clone(), val);
    }
    out
}

fn obj_table(d: &SvDomain) -> BTreeMap<String, String> {
    // Collision-free mangling: sanitize, then suffix duplicates.
    let mut table = BTreeMap::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    for o in &d.objects {
        let mut name = format!("o_{}", sanitize(o));
        while used.contains(&name) {
            name.push('_');
        }
        used.insert(name.clone());
        table.insert(o.clone(), name);
    }
    table
}

fn is_place_var(range: &[String]) -> bool {
    range == [FALSE_OBJ, TRUE_OBJ]
}

/// Prints a lowered domain and its problem as classical typed-STRIPS text.
/// Boolean place variables become propositions; multi-valued variables
/// become a value-holding predicate whose previous value is cleared through
/// an extra parameter.
pub fn print_pddl(
    d: &SvDomain,
    s0: &SvState,
    goal: &[(String, String)],
    name: &str,
) -> (String, String) {
    let objs = obj_table(d);
    let pred_marked = |p: &str| format!("marked_{}", sanitize(p));
    let pred_val = |v: &str| format!("val_{}", sanitize(v));
    let pred_wr = |t: &str, v: &str| format!("wr_{}_{}", sanitize(t), sanitize(v));
    let place = |v: &String| {
        d.state_vars
            .iter()
            .find(|(n, _)| n == v)
            .is_some_and(|(_, r)| is_place_var(r))
    };

    let mut dom = String::new();
    let _ = writeln!(dom, "(define (domain {})", sanitize(name));
    let _ = writeln!(
        dom,
        "  (:requirements :strips :typing :negative-preconditions :equality)"
    );
    let _ = writeln!(dom, "  (:types value)");
    let _ = writeln!(dom, "  (:predicates");
    for (v, range) in &d.state_vars {
        if is_place_var(range) {
            let _ = writeln!(dom, "    ({})", pred_marked(v));
        } else {
            let _ = writeln!(dom, "    ({} ?o - value)", pred_val(v));
        }
    }
    let _ = writeln!(dom, "    (ord ?a - value ?b - value)");
    for (t, v) in d.wr_ranges.keys() {
        let _ = writeln!(dom, "    ({} ?o - value)", pred_wr(t, v));
    }
    let _ = writeln!(dom, "  )");

    for t in &d.templates {
        let literals = t
            .pre
            .as_literal_conjunction()
            .expect("printing requires lowered preconditions");
        let _ = writeln!(dom, "  (:action {}", sanitize(&t.name));
        // Written variables need their previous value cleared; one extra
        // parameter per assigned multi-valued variable.
        let assigned_vars: Vec<&String> = t
            .eff
            .iter()
            .filter(|(v, _)| !place(v))
            .map(|(v, _)| v)
            .collect();
        let mut param_line = String::new();
        for (p, _) in &t.params {
            let _ = write!(param_line, "?{} - value ", sanitize(p));
        }
        for v in &assigned_vars {
            let _ = write!(param_line, "?old_{} - value ", sanitize(v));
        }
        let _ = writeln!(dom, "    :parameters ({})", param_line.trim_end());
        let term_str = |t: &PTerm| -> String {
            match t {
                PTerm::Param(p) => format!("?{}", sanitize(p)),
                PTerm::Obj(o) => objs[o].clone(),
                PTerm::StateVar(v) => panic!("state variable '{v}' in lowered atom"),
            }
        };
        let mut pres: Vec<String> = Vec::new();
        for (pos, atom) in &literals {
            let body = match atom {
                PreAtom::VarEq(v, term) => {
                    if place(v) {
                        let token = term_str(term);
                        if token == objs[TRUE_OBJ] {
                            format!("({})", pred_marked(v))
                        } else if token == objs[FALSE_OBJ] {
                            // p = false is the negated proposition.
                            pres.push(if *pos {
                                format!("(not ({}))", pred_marked(v))
                            } else {
                                format!("({})", pred_marked(v))
                            });
                            continue;
                        } else {
                            format!("(= {} {})", pred_marked(v), token)
                        }
                    } else {
                        format!("({} {})", pred_val(v), term_str(term))
                    }
                }
                PreAtom::Ord(a, b) => format!("(ord {} {})", term_str(a), term_str(b)),
                PreAtom::WrRange {
                    transition,
                    variable,
                    term,
                } => format!("({} {})", pred_wr(transition, variable), term_str(term)),
            };
            pres.push(if *pos { body } else { format!("(not {body})") });
        }
        for v in &assigned_vars {
            pres.push(format!("({} ?old_{})", pred_val(v), sanitize(v)));
        }
        let _ = writeln!(dom, "    :precondition (and {})", pres.join(" "));
        let mut effs: Vec<String> = Vec::new();
        for (v, term) in &t.eff {
            if place(v) {
                let token = term_str(term);
                if token == objs[TRUE_OBJ] {
                    effs.push(format!("({})", pred_marked(v)));
                } else {
                    effs.push(format!("(not ({}))", pred_marked(v)));
                }
            } else {
                effs.push(format!("(not ({} ?old_{}))", pred_val(v), sanitize(v)));
                effs.push(format!("({} {})", pred_val(v), term_str(term)));
            }
        }
        let _ = writeln!(dom, "    :effect (and {})", effs.join(" "));
        let _ = writeln!(dom, "  )");
    }
    let _ = writeln!(dom, ")");

    let mut prob = String::new();
    let _ = writeln!(prob, "(define (problem {}_reach)", sanitize(name));
    let _ = writeln!(prob, "  (:domain {})", sanitize(name));
    let objects = d
        .objects
        .iter()
        .map(|o| objs[o].clone())
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(prob, "  (:objects {objects} - value)");
    let _ = writeln!(prob, "  (:init");
    for (v, val) in s0 {
        if place(v) {
            if val == TRUE_OBJ {
                let _ = writeln!(prob, "    ({})", pred_marked(v));
            }
        } else {
            let _ = writeln!(prob, "    ({} {})", pred_val(v), objs[val]);
        }
    }
    for (a, b) in &d.ord_pairs {
        let _ = writeln!(prob, "    (ord {} {})", objs[a], objs[b]);
    }
    for ((t, v), range) in &d.wr_ranges {
        for o in range {
            let _ = writeln!(prob, "    ({} {})", pred_wr(t, v), objs[o]);
        }
    }
    let _ = writeln!(prob, "  )");
    let goal_strs: Vec<String> = goal
        .iter()
        .map(|(v, val)| {
            if place(v) {
                if val == TRUE_OBJ {
                    format!("({})", pred_marked(v))
                } else {
                    format!("(not ({}))", pred_marked(v))
                }
            } else {
                format!("({} {})", pred_val(v), objs[val])
            }
        })
        .collect();
    let _ = writeln!(prob, "  (:goal (and {}))", goal_strs.join(" "));
    let _ = writeln!(prob, ")");
    (dom, prob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::loan_model;
    use crate::guard::DEFAULT_DNF_CAP;

    #[test]
    fn loan_t4_template_has_write_parameters() {
        let w = loan_model().restrict_finite();
        let (d, _, _) = encode_sv(&w);
        let t4 = d.templates.iter().find(|t| t.name == "T4").unwrap();
        assert_eq!(t4.params.len(), 2);
        assert!(t4.params.iter().any(|(p, _)| p == "z_request"));
        assert!(d
            .wr_ranges
            .get(&("T4".to_string(), "request".to_string()))
            .is_some_and(|r| r.contains(&"30000".to_string()) && !r.contains(&"60000".to_string())));
        // The rigid wr atom guards the parameter.
        let lits = lower_classical(&d, DEFAULT_DNF_CAP)
            .unwrap()
            .templates
            .iter()
            .find(|t| t.name == "T4")
            .unwrap()
            .pre
            .as_literal_conjunction()
            .unwrap();
        assert!(lits.iter().any(|(pos, a)| *pos
            && matches!(a, PreAtom::WrRange { transition, variable, .. }
                if transition == "T4" && variable == "request")));
    }

    #[test]
    fn transition_without_writes_has_no_parameters() {
        let w = loan_model();
        let (d, _, _) = encode_sv(&w);
        let t9 = d.templates.iter().find(|t| t.name == "T9").unwrap();
        assert!(t9.params.is_empty());
    }

    #[test]
    fn leq_guard_compiles_to_ord_atom() {
        let w = loan_model();
        let (d, _, _) = encode_sv(&w);
        let t6 = d.templates.iter().find(|t| t.name == "T6").unwrap();
        fn has_ord(e: &PreExpr) -> bool {
            match e {
                PreExpr::Atom(PreAtom::Ord(_, _)) => true,
                PreExpr::Not(i) => has_ord(i),
                PreExpr::And(a, b) => has_ord(a) || has_ord(b),
                _ => false,
            }
        }
        assert!(has_ord(&t6.pre));
    }

    #[test]
    fn goal_lists_sink_true_and_rest_false() {
        let w = loan_model();
        let (_, _, goal) = encode_sv(&w);
        assert!(goal.contains(&("end".to_string(), TRUE_OBJ.to_string())));
        assert_eq!(
            goal.iter().filter(|(_, v)| v == FALSE_OBJ).count(),
            w.net().places().len() - 1
        );
    }

    #[test]
    fn conjunctive_pre_lowers_to_single_template() {
        let w = loan_model().restrict_finite();
        let (d, _, _) = encode_sv(&w);
        let lowered = lower_classical(&d, DEFAULT_DNF_CAP).unwrap();
        // T6's guard request <= 5000 is one Ord atom: no splitting, but the
        // state variable inside it becomes a linked parameter.
        let t6: Vec<&ActionTemplate> = lowered
            .templates
            .iter()
            .filter(|t| t.transition == "T6")
            .collect();
        assert_eq!(t6.len(), 1);
        assert_eq!(t6[0].name, "T6");
        let lits = t6[0].pre.as_literal_conjunction().unwrap();
        assert!(lits.iter().any(|(pos, a)| *pos
            && matches!(a, PreAtom::VarEq(v, PTerm::Param(q)) if v == "request" && q == "q_request")));
        assert!(t6[0].params.iter().any(|(p, _)| p == "q_request"));
    }

    #[test]
    fn negated_conjunction_splits_templates() {
        let w = loan_model().restrict_finite();
        let (d, _, _) = encode_sv(&w);
        let lowered = lower_classical(&d, DEFAULT_DNF_CAP).unwrap();
        // T7's guard !(r <= 5000) && !(100000 <= r) stays one clause, but
        // T2's equality guard expands: loanType = s is not_null && eq.
        let t7: Vec<_> = lowered
            .templates
            .iter()
            .filter(|t| t.transition == "T7")
            .collect();
        assert_eq!(t7.len(), 1);
        // A manufactured disjunction: not (a && b) splits in two.
        let mut d2 = d.clone();
        d2.templates = vec![ActionTemplate {
            name: "x".into(),
            transition: "x".into(),
            params: vec![],
            pre: PreExpr::Atom(PreAtom::VarEq("p1".into(), PTerm::Obj(TRUE_OBJ.into())))
                .and(PreExpr::Atom(PreAtom::VarEq(
                    "p2".into(),
                    PTerm::Obj(TRUE_OBJ.into()),
                )))
                .negate(),
            eff: vec![],
        }];
        let split = lower_classical(&d2, DEFAULT_DNF_CAP).unwrap();
        assert_eq!(split.templates.len(), 2);
        assert_eq!(split.templates[0].name, "x_1");
        assert_eq!(split.templates[1].name, "x_2");
        assert!(split.templates.iter().all(|t| t.transition == "x"));
    }

    #[test]
    fn psi_roundtrips_on_rg_states() {
        let w = loan_model().restrict_finite();
        let rg = w.build_rg(&crate::dawnet::ExploreCaps::default()).unwrap();
        for s in &rg.states {
            let mapped = psi(&w, s);
            let back = psi_inverse(&w, &mapped);
            assert_eq!(&back, s);
        }
    }

    #[test]
    fn printed_pddl_is_stable_and_shaped() {
        let w = loan_model().restrict_finite();
        let (d, s0, goal) = encode_sv(&w);
        let lowered = lower_classical(&d, DEFAULT_DNF_CAP).unwrap();
        let (dom1, prob1) = print_pddl(&lowered, &s0, &goal, "loan");
        let (dom2, prob2) = print_pddl(&lowered, &s0, &goal, "loan");
        assert_eq!(dom1, dom2);
        assert_eq!(prob1, prob2);
        assert!(dom1.contains("(marked_p1)"));
        assert!(dom1.contains("(:action T1"));
        assert!(prob1.contains("(marked_start)"));
        assert!(prob1.contains("(:goal (and (marked_end)"));
    }

    #[test]
    fn net_without_variables_has_no_value_predicate() {
        let net = crate::core_net::PetriNet::new(
            vec!["s", "e"],
            vec!["t"],
            vec![("s", "t"), ("t", "e")],
        )
        .unwrap();
        let w = DawNet::new(
            net,
            crate::data_model::DataModel::default(),
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        let (d, s0, goal) = encode_sv(&w);
        let lowered = lower_classical(&d, DEFAULT_DNF_CAP).unwrap();
        let (dom, _) = print_pddl(&lowered, &s0, &goal, "tiny");
        assert!(!dom.contains("val_"));
    }
}
