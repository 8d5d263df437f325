//! Traces, events, compliance, and trace completion by injecting the
//! observed events into the net as a chain of duplicated, data-pinned
//! transitions.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::core_net::{Marking, PetriNet};
use crate::data_model::{Assignment, Value};
use crate::dawnet::{DawNet, DawNetError, ExploreCaps, State, WriteSpec};
use crate::guard::{GuardExpr, Term};
use crate::solver::{solve_clean_termination, ReachResult, WitnessStep};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("event {index}: {detail}")]
    EventSanityViolation { index: usize, detail: String },
    #[error("net is not in start_t/end_t normal form; call normalize_endpoints first")]
    NotNormalized,
    #[error("identifier '{0}' is reserved for endpoint normalization")]
    ReservedName(String),
    #[error(transparent)]
    Model(#[from] DawNetError),
}

/// An observed event: the transition it refers to, the variables written or
/// observed by its execution, and the variables deleted or observed to be
/// undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub transition: String,
    pub writes: BTreeMap<String, Value>,
    pub deletes: BTreeSet<String>,
}

impl Event {
    pub fn new(transition: impl Into<String>) -> Self {
        Event {
            transition: transition.into(),
            writes: BTreeMap::new(),
            deletes: BTreeSet::new(),
        }
    }

    pub fn with_write(mut self, variable: impl Into<String>, value: Value) -> Self {
        self.writes.insert(variable.into(), value);
        self
    }

    pub fn with_delete(mut self, variable: impl Into<String>) -> Self {
        self.deletes.insert(variable.into());
        self
    }

    /// Compliance with a single firing of `t` reaching assignment `eta_after`:
    /// the transitions match, observed variables are defined afterwards with
    /// the observed values, and deleted variables are undefined afterwards.
    pub fn compliant_with(&self, t: &str, eta_after: &Assignment) -> bool {
        self.transition == t
            && self
                .writes
                .iter()
                .all(|(v, val)| eta_after.get(v) == Some(val))
            && self.deletes.iter().all(|v| !eta_after.is_bound(v))
    }
}

/// A finite sequence of events.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub events: Vec<Event>,
}

impl Trace {
    pub fn new(events: Vec<Event>) -> Self {
        Trace { events }
    }

    pub fn empty() -> Self {
        Trace::default()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The sanity conditions assumed of events: transitions exist, observed
    /// values lie in the declared domains, written-and-observed values lie in
    /// the transition's write set, and deleted variables are not written.
    pub fn check_sanity(&self, w: &DawNet) -> Result<(), TraceError> {
        for (i, e) in self.events.iter().enumerate() {
            let fail = |detail: String| TraceError::EventSanityViolation {
                index: i + 1,
                detail,
            };
            if w.net().transition_index(&e.transition).is_none() {
                return Err(fail(format!("unknown transition '{}'", e.transition)));
            }
            if let Some(v) = e.writes.keys().find(|v| e.deletes.contains(*v)) {
                return Err(fail(format!("variable '{v}' both written and deleted")));
            }
            let spec = w.write_spec(&e.transition);
            for (v, val) in &e.writes {
                let dom = w
                    .data()
                    .domain(v)
                    .ok_or_else(|| fail(format!("unknown variable '{v}'")))?;
                if !dom.values().contains(val) {
                    return Err(fail(format!("value {val} outside the domain of '{v}'")));
                }
                if let Some(set) = spec.and_then(|s| s.get(v)) {
                    if !set.contains(val) {
                        return Err(fail(format!(
                            "'{}' writes '{v}' but {val} is not in its write set",
                            e.transition
                        )));
                    }
                }
            }
            for v in &e.deletes {
                if !w.data().contains_variable(v) {
                    return Err(fail(format!("unknown variable '{v}'")));
                }
                if let Some(set) = spec.and_then(|s| s.get(v)) {
                    if !set.is_empty() {
                        return Err(fail(format!(
                            "'{}' is observed to delete '{v}' but writes it",
                            e.transition
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

pub const START_T: &str = "start_t";
pub const END_T: &str = "end_t";

fn fresh_id(base: &str, taken: &dyn Fn(&str) -> bool) -> String {
    let mut id = base.to_string();
    while taken(&id) {
        id.push('_');
    }
    id
}

/// True when the net already starts with `start_t` and terminates with
/// `end_t` in the required shape: single input/output places, true guards,
/// no writes.
pub fn is_normalized(w: &DawNet) -> bool {
    let shape = |name: &str, io_place: &str, input: bool| -> bool {
        let Ok(pre) = w.net().preset(name) else {
            return false;
        };
        let Ok(post) = w.net().postset(name) else {
            return false;
        };
        let side_ok = if input {
            pre.len() == 1 && pre.contains(io_place) && post.len() == 1
        } else {
            post.len() == 1 && post.contains(io_place) && pre.len() == 1
        };
        side_ok
            && w.guard(name).is_some_and(GuardExpr::is_true)
            && w.write_spec(name).map_or(true, WriteSpec::is_empty)
    };
    shape(START_T, w.source(), true) && shape(END_T, w.sink(), false)
}

/// Wraps the net so every case starts with the special transition `start_t`
/// and terminates with `end_t`: a fresh source place feeds `start_t`, which
/// feeds the old source, and symmetrically for the sink. Idempotent.
pub fn normalize_endpoints(w: &DawNet) -> Result<DawNet, TraceError> {
    if is_normalized(w) {
        return Ok(w.clone());
    }
    let net = w.net();
    let taken = |id: &str| net.place_index(id).is_some() || net.transition_index(id).is_some();
    for reserved in [START_T, END_T] {
        if taken(reserved) {
            return Err(TraceError::ReservedName(reserved.to_string()));
        }
    }
    let start_t = START_T.to_string();
    let end_t = END_T.to_string();
    let start_p = fresh_id("start_p", &taken);
    let end_p = fresh_id("end_p", &taken);

    let mut places: Vec<String> = net.places().to_vec();
    places.push(start_p.clone());
    places.push(end_p.clone());
    let mut transitions: Vec<String> = net.transitions().to_vec();
    transitions.push(start_t.clone());
    transitions.push(end_t.clone());
    let mut arcs = net.arcs();
    arcs.push((start_p, start_t.clone()));
    arcs.push((start_t, w.source().to_string()));
    arcs.push((w.sink().to_string(), end_t.clone()));
    arcs.push((end_t, end_p));

    let new_net = PetriNet::new(places, transitions, arcs).map_err(DawNetError::from)?;
    Ok(DawNet::new(
        new_net,
        w.data().clone(),
        w.writes().clone(),
        w.guards().clone(),
    )?)
}

/// The trace workflow `W^tau` together with the bookkeeping needed to map
/// its cases back onto the original net.
#[derive(Debug, Clone)]
pub struct TraceWorkflow {
    pub net: DawNet,
    /// Event index (1-based) to the duplicated transition standing for it.
    pub event_transition_of: BTreeMap<usize, String>,
    /// Chain place per index 0..=n.
    pub event_place_of: BTreeMap<usize, String>,
    /// Transition projection back onto the original net.
    pub projection: BTreeMap<String, String>,
}

/// Injects `tau` into the normalized net `w`: each event becomes a duplicate
/// of its transition, placed in exclusive or with the original, threaded on a
/// fresh chain of places from `start_t` to `end_t`. The duplicate's guard
/// pins observed-but-unwritten variables to the observed values and its write
/// spec pins observed writes to singletons.
pub fn inject(w: &DawNet, tau: &Trace) -> Result<TraceWorkflow, TraceError> {
    if !is_normalized(w) {
        return Err(TraceError::NotNormalized);
    }
    tau.check_sanity(w)?;
    let net = w.net();
    let n = tau.len();
    let taken = |id: &str| net.place_index(id).is_some() || net.transition_index(id).is_some();

    let mut event_place_of = BTreeMap::new();
    for i in 0..=n {
        event_place_of.insert(i, fresh_id(&format!("p_e{i}"), &taken));
    }
    let mut event_transition_of = BTreeMap::new();
    for i in 1..=n {
        event_transition_of.insert(i, fresh_id(&format!("t_e{i}"), &taken));
    }

    let mut places = net.places().to_vec();
    places.extend(event_place_of.values().cloned());
    let mut transitions = net.transitions().to_vec();
    transitions.extend(event_transition_of.values().cloned());

    let mut arcs = net.arcs();
    let mut writes = w.writes().clone();
    let mut guards = w.guards().clone();
    let mut projection: BTreeMap<String, String> = net
        .transitions()
        .iter()
        .map(|t| (t.clone(), t.clone()))
        .collect();

    for (i, event) in tau.events.iter().enumerate() {
        let i1 = i + 1;
        let te = event_transition_of[&i1].clone();
        let orig = &event.transition;
        projection.insert(te.clone(), orig.clone());
        // Duplicate the original transition's arcs.
        for p in net.preset(orig).map_err(DawNetError::from)? {
            arcs.push((p, te.clone()));
        }
        for p in net.postset(orig).map_err(DawNetError::from)? {
            arcs.push((te.clone(), p));
        }
        // Chain arcs.
        arcs.push((event_place_of[&i].clone(), te.clone()));
        arcs.push((te.clone(), event_place_of[&i1].clone()));

        let empty = WriteSpec::new();
        let orig_spec = w.write_spec(orig).unwrap_or(&empty);
        let mut spec = WriteSpec::new();
        for (v, set) in orig_spec {
            if let Some(observed) = event.writes.get(v) {
                spec.insert(v.clone(), [observed.clone()].into());
            } else {
                spec.insert(v.clone(), set.clone());
            }
        }
        if !spec.is_empty() {
            writes.insert(te.clone(), spec);
        }

        let mut guard = w.guard(orig).cloned().unwrap_or(GuardExpr::True);
        let conjoin = |g: &mut GuardExpr, c: GuardExpr| {
            if g.is_true() {
                *g = c;
            } else {
                *g = std::mem::replace(g, GuardExpr::True).and(c);
            }
        };
        for (v, val) in &event.writes {
            if orig_spec.contains_key(v) {
                continue;
            }
            conjoin(
                &mut guard,
                GuardExpr::Eq(v.clone(), Term::Const(val.clone())),
            );
        }
        for v in &event.deletes {
            if orig_spec.contains_key(v) {
                continue;
            }
            conjoin(&mut guard, GuardExpr::Def(v.clone()).negate());
        }
        guards.insert(te, guard);
    }

    // start_t feeds the head of the chain, the tail feeds end_t.
    arcs.push((START_T.to_string(), event_place_of[&0].clone()));
    arcs.push((event_place_of[&n].clone(), END_T.to_string()));

    let new_net = PetriNet::new(places, transitions, arcs).map_err(DawNetError::from)?;
    let net = DawNet::new(new_net, w.data().clone(), writes, guards)?;
    Ok(TraceWorkflow {
        net,
        event_transition_of,
        event_place_of,
        projection,
    })
}

impl TraceWorkflow {
    /// Maps a sequence of valid firings of `W^tau` onto the original net:
    /// duplicated transitions map back, chain places are dropped from
    /// markings, and assignments are kept.
    pub fn project(&self, original: &DawNet, case: &[WitnessStep]) -> Vec<WitnessStep> {
        case.iter()
            .map(|step| WitnessStep {
                transition: self.projection[&step.transition].clone(),
                choice: step.choice.clone(),
                state: State {
                    marking: project_marking(self.net.net(), original.net(), &step.state.marking),
                    eta: step.state.eta.clone(),
                },
            })
            .collect()
    }
}

fn project_marking(from: &PetriNet, onto: &PetriNet, m: &Marking) -> Marking {
    let counts = onto
        .places()
        .iter()
        .map(|p| m.get(from, p).unwrap_or(0))
        .collect();
    Marking::from_counts(counts)
}

/// Searches for an order-preserving injective mapping from the events of
/// `tau` to the firings of `case` such that each event is compliant with its
/// firing. Greedy left-to-right with backtracking; returns 0-based firing
/// indices.
pub fn check_compliance(_w: &DawNet, case: &[WitnessStep], tau: &Trace) -> Option<Vec<usize>> {
    fn bt(events: &[Event], case: &[WitnessStep], from: usize) -> Option<Vec<usize>> {
        let Some((event, rest)) = events.split_first() else {
            return Some(Vec::new());
        };
        for k in from..case.len() {
            let step = &case[k];
            if event.compliant_with(&step.transition, &step.state.eta) {
                if let Some(mut tail) = bt(rest, case, k + 1) {
                    tail.insert(0, k);
                    return Some(tail);
                }
            }
        }
        None
    }
    bt(&tau.events, case, 0)
}

/// Outcome of trace completion.
#[derive(Debug, Clone)]
pub struct Completion {
    /// The normalized original net the completion is a case of.
    pub normalized: DawNet,
    pub workflow: TraceWorkflow,
    pub result: ReachResult,
    /// The projected completion, present when the trace is completable.
    pub completion: Option<Vec<WitnessStep>>,
}

/// Decides whether `tau` can be completed to a case of `w` and returns one
/// such case if so: reachability of clean termination on the injected net.
pub fn complete(w: &DawNet, tau: &Trace, caps: &ExploreCaps) -> Result<Completion, TraceError> {
    let normalized = normalize_endpoints(w)?;
    let workflow = inject(&normalized, tau)?;
    let finite = workflow.net.restrict_finite();
    let result = solve_clean_termination(&finite, caps);
    let completion = result
        .witness
        .as_ref()
        .map(|case| workflow.project(&normalized, case));
    Ok(Completion {
        normalized,
        workflow,
        result,
        completion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::loan_model;
    use crate::data_model::DataModel;
    use crate::solver::{replay, Reachability};

    fn small_xor_net() -> DawNet {
        // A then B or C then D, as in the injection sample figure.
        let net = PetriNet::new(
            vec!["s", "q1", "q2", "e"],
            vec!["A", "B", "C", "D"],
            vec![
                ("s", "A"),
                ("A", "q1"),
                ("q1", "B"),
                ("q1", "C"),
                ("B", "q2"),
                ("C", "q2"),
                ("q2", "D"),
                ("D", "e"),
            ],
        )
        .unwrap();
        DawNet::new(net, DataModel::default(), BTreeMap::new(), BTreeMap::new()).unwrap()
    }

    #[test]
    fn normalization_adds_wrappers_once() {
        let w = loan_model();
        let n1 = normalize_endpoints(&w).unwrap();
        assert!(is_normalized(&n1));
        assert_eq!(n1.net().places().len(), w.net().places().len() + 2);
        assert_eq!(n1.net().transitions().len(), w.net().transitions().len() + 2);
        let n2 = normalize_endpoints(&n1).unwrap();
        assert_eq!(n1, n2);
    }

    #[test]
    fn normalization_preserves_case_set() {
        let w = small_xor_net();
        let n = normalize_endpoints(&w).unwrap();
        let res = solve_clean_termination(&n, &ExploreCaps::default());
        let case = res.witness.unwrap();
        assert_eq!(case.first().unwrap().transition, START_T);
        assert_eq!(case.last().unwrap().transition, END_T);
        // Stripping the wrappers yields a case of the original net.
        let inner: Vec<WitnessStep> = case[1..case.len() - 1]
            .iter()
            .map(|s| WitnessStep {
                transition: s.transition.clone(),
                choice: s.choice.clone(),
                state: State {
                    marking: project_marking(n.net(), w.net(), &s.state.marking),
                    eta: s.state.eta.clone(),
                },
            })
            .collect();
        let end = replay(&w, &inner).unwrap();
        assert!(w.is_final(&end));
    }

    #[test]
    fn inject_builds_chain() {
        let w = normalize_endpoints(&small_xor_net()).unwrap();
        let tau = Trace::new(vec![Event::new("B"), Event::new("D")]);
        let tw = inject(&w, &tau).unwrap();
        assert_eq!(tw.event_transition_of.len(), 2);
        assert_eq!(tw.event_place_of.len(), 3);
        let net = tw.net.net();
        // Chain: start_t -> p_e0 -> t_e1 -> p_e1 -> t_e2 -> p_e2 -> end_t.
        assert!(net.postset(START_T).unwrap().contains("p_e0"));
        assert!(net.preset("t_e1").unwrap().contains("p_e0"));
        assert!(net.postset("t_e1").unwrap().contains("p_e1"));
        assert!(net.preset("t_e2").unwrap().contains("p_e1"));
        assert!(net.postset("t_e2").unwrap().contains("p_e2"));
        assert!(net.preset(END_T).unwrap().contains("p_e2"));
        // t_e1 duplicates B's arcs.
        assert!(net.preset("t_e1").unwrap().contains("q1"));
        assert!(net.postset("t_e1").unwrap().contains("q2"));
        assert!(tw.net.net().check_wf().is_wf);
    }

    #[test]
    fn inject_empty_trace_bridges_start_to_end() {
        let w = normalize_endpoints(&small_xor_net()).unwrap();
        let tw = inject(&w, &Trace::empty()).unwrap();
        assert_eq!(tw.event_transition_of.len(), 0);
        assert_eq!(tw.event_place_of.len(), 1);
        let net = tw.net.net();
        assert!(net.postset(START_T).unwrap().contains("p_e0"));
        assert!(net.preset(END_T).unwrap().contains("p_e0"));
    }

    #[test]
    fn inject_pins_observed_unwritten_variables() {
        let w = normalize_endpoints(&loan_model()).unwrap();
        let tau = Trace::new(vec![Event::new("T7")
            .with_write("request", Value::Int(60000))
            .with_write("loan", Value::Int(50000))]);
        let tw = inject(&w, &tau).unwrap();
        let g = tw.net.guard("t_e1").unwrap().to_string();
        assert!(g.contains("request = 60000"), "guard was {g}");
        assert!(g.contains("loan = 50000"), "guard was {g}");
        // T7 writes neither variable, so the write spec is untouched.
        assert!(tw.net.write_spec("t_e1").is_none());
    }

    #[test]
    fn inject_rejects_value_outside_write_set() {
        let w = normalize_endpoints(&loan_model()).unwrap();
        // T1 writes loanType, so an observed write must lie in its write set.
        let tau = Trace::new(vec![
            Event::new("T1").with_write("loanType", Value::Str("nope".into()))
        ]);
        let err = inject(&w, &tau).unwrap_err();
        assert!(matches!(err, TraceError::EventSanityViolation { index: 1, .. }));
    }

    #[test]
    fn projection_of_witness_replays_on_original() {
        let w = small_xor_net();
        let tau = Trace::new(vec![Event::new("B"), Event::new("D")]);
        let out = complete(&w, &tau, &ExploreCaps::default()).unwrap();
        assert_eq!(out.result.reachable, Reachability::Yes);
        let completion = out.completion.unwrap();
        let end = replay(&out.normalized, &completion).unwrap();
        assert!(out.normalized.is_final(&end));
        // The completion contains B and D in order and preserves length.
        let names: Vec<&str> = completion.iter().map(|s| s.transition.as_str()).collect();
        let bi = names.iter().position(|t| *t == "B").unwrap();
        let di = names.iter().position(|t| *t == "D").unwrap();
        assert!(bi < di);
        assert_eq!(
            completion.len(),
            out.result.witness.as_ref().unwrap().len()
        );
        // And the original trace is compliant with it.
        assert!(check_compliance(&out.normalized, &completion, &tau).is_some());
    }

    #[test]
    fn compliance_on_happy_path() {
        let w = loan_model().restrict_finite();
        let res = solve_clean_termination(&w, &ExploreCaps::default());
        let case = res.witness.unwrap();
        let tau = Trace::new(vec![Event::new("T1"), Event::new("T9")]);
        let gamma = check_compliance(&w, &case, &tau).unwrap();
        assert_eq!(gamma.len(), 2);
        assert!(gamma[0] < gamma[1]);
        // Out-of-order events are rejected.
        let bad = Trace::new(vec![Event::new("T9"), Event::new("T1")]);
        assert!(check_compliance(&w, &case, &bad).is_none());
        // The empty trace is compliant with every case.
        assert_eq!(check_compliance(&w, &case, &Trace::empty()), Some(vec![]));
    }

    #[test]
    fn completion_of_valid_trace_is_conformance() {
        let w = small_xor_net();
        let tau = Trace::new(vec![
            Event::new("A"),
            Event::new("C"),
            Event::new("D"),
        ]);
        let out = complete(&w, &tau, &ExploreCaps::default()).unwrap();
        assert_eq!(out.result.reachable, Reachability::Yes);
        let completion = out.completion.unwrap();
        let names: Vec<&str> = completion.iter().map(|s| s.transition.as_str()).collect();
        assert_eq!(names, vec![START_T, "A", "C", "D", END_T]);
    }

    #[test]
    fn non_compliant_order_unreachable() {
        let w = small_xor_net();
        // D before A cannot be embedded into any case.
        let tau = Trace::new(vec![Event::new("D"), Event::new("A")]);
        let out = complete(&w, &tau, &ExploreCaps::default()).unwrap();
        assert_eq!(out.result.reachable, Reachability::No);
        assert!(out.completion.is_none());
    }

    #[test]
    fn exclusive_branches_unreachable() {
        let w = small_xor_net();
        let tau = Trace::new(vec![Event::new("B"), Event::new("C")]);
        let out = complete(&w, &tau, &ExploreCaps::default()).unwrap();
        assert_eq!(out.result.reachable, Reachability::No);
    }
}
