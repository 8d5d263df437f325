//! The DAW-net model: a WF-net over a finite data model with per-transition
//! write specifications and guards, its states, valid firing, the finite
//! restriction, and the reachability graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::core_net::{CoreNetError, Marking, PetriNet};
use crate::data_model::{Assignment, DataModel, Value};
use crate::guard::{GuardError, GuardExpr};

#[derive(Debug, Error)]
pub enum DawNetError {
    #[error("underlying net is not a WF-net")]
    NotWorkflow,
    #[error("identifier '{0}' is used by more than one of places/transitions/variables")]
    NameClash(String),
    #[error("unknown transition '{0}'")]
    UnknownTransition(String),
    #[error("write specification of '{transition}' mentions unknown variable '{variable}'")]
    UnknownWriteVariable { transition: String, variable: String },
    #[error("write set of '{transition}' for '{variable}' contains {value} outside its domain")]
    WriteOutsideDomain {
        transition: String,
        variable: String,
        value: Value,
    },
    #[error("guard of '{transition}' is ill-formed: {source}")]
    BadGuard {
        transition: String,
        source: GuardError,
    },
    #[error(transparent)]
    Net(#[from] CoreNetError),
    #[error("guard of '{0}' is not satisfied")]
    GuardFailed(String),
    #[error("bad write choice for '{transition}': {detail}")]
    BadChoice { transition: String, detail: String },
    #[error("exploration cap exceeded ({0})")]
    CapExceeded(String),
}

/// Write specification of one transition: variable to allowed value set.
/// An empty set means the transition deletes the variable.
pub type WriteSpec = BTreeMap<String, BTreeSet<Value>>;

/// A data-aware workflow net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DawNet {
    net: PetriNet,
    data: DataModel,
    writes: BTreeMap<String, WriteSpec>,
    guards: BTreeMap<String, GuardExpr>,
    source: String,
    sink: String,
}

impl DawNet {
    /// Builds and validates a DAW-net. `guards` may omit transitions, which
    /// then default to `true`; `writes` may omit transitions that write
    /// nothing.
    pub fn new(
        net: PetriNet,
        data: DataModel,
        writes: BTreeMap<String, WriteSpec>,
        guards: BTreeMap<String, GuardExpr>,
    ) -> Result<Self, DawNetError> {
        let check = net.check_wf();
        if !check.is_wf {
            return Err(DawNetError::NotWorkflow);
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for id in net
            .places()
            .iter()
            .chain(net.transitions().iter())
            .map(String::as_str)
            .chain(data.variables())
        {
            if !seen.insert(id) {
                return Err(DawNetError::NameClash(id.to_string()));
            }
        }
        for (t, spec) in &writes {
            if net.transition_index(t).is_none() {
                return Err(DawNetError::UnknownTransition(t.clone()));
            }
            for (v, set) in spec {
                let dom = data
                    .domain(v)
                    .ok_or_else(|| DawNetError::UnknownWriteVariable {
                        transition: t.clone(),
                        variable: v.clone(),
                    })?;
                for value in set {
                    if !dom.values().contains(value) {
                        return Err(DawNetError::WriteOutsideDomain {
                            transition: t.clone(),
                            variable: v.clone(),
                            value: value.clone(),
                        });
                    }
                }
            }
        }
        let mut total_guards = BTreeMap::new();
        for t in net.transitions() {
            let g = guards.get(t).cloned().unwrap_or(GuardExpr::True);
            g.validate(&data).map_err(|source| DawNetError::BadGuard {
                transition: t.clone(),
                source,
            })?;
            total_guards.insert(t.clone(), g);
        }
        for t in guards.keys() {
            if net.transition_index(t).is_none() {
                return Err(DawNetError::UnknownTransition(t.clone()));
            }
        }
        Ok(DawNet {
            source: check.source.expect("wf net has a source"),
            sink: check.sink.expect("wf net has a sink"),
            net,
            data,
            writes,
            guards: total_guards,
        })
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn data(&self) -> &DataModel {
        &self.data
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn sink(&self) -> &str {
        &self.sink
    }

    pub fn guard(&self, t: &str) -> Option<&GuardExpr> {
        self.guards.get(t)
    }

    pub fn guards(&self) -> &BTreeMap<String, GuardExpr> {
        &self.guards
    }

    pub fn write_spec(&self, t: &str) -> Option<&WriteSpec> {
        self.writes.get(t)
    }

    pub fn writes(&self) -> &BTreeMap<String, WriteSpec> {
        &self.writes
    }

    /// Union of the write sets of `v` across all transitions: the only values
    /// the variable can ever hold.
    pub fn write_domain(&self, v: &str) -> BTreeSet<Value> {
        let mut out = BTreeSet::new();
        for spec in self.writes.values() {
            if let Some(set) = spec.get(v) {
                out.extend(set.iter().cloned());
            }
        }
        out
    }

    /// Per-variable write domains for all declared variables.
    pub fn write_domains(&self) -> BTreeMap<String, BTreeSet<Value>> {
        self.data
            .variables()
            .map(|v| (v.to_string(), self.write_domain(v)))
            .collect()
    }

    /// All constants appearing in any write set or guard.
    pub fn active_domain(&self) -> BTreeSet<Value> {
        let mut out = BTreeSet::new();
        for spec in self.writes.values() {
            for set in spec.values() {
                out.extend(set.iter().cloned());
            }
        }
        for g in self.guards.values() {
            out.extend(g.active_domain());
        }
        out
    }

    /// The finite version: every variable's domain cut to the active domain
    /// of the model, orders restricted accordingly.
    pub fn restrict_finite(&self) -> DawNet {
        let keep = self.active_domain();
        DawNet {
            net: self.net.clone(),
            data: self.data.restrict(&keep),
            writes: self.writes.clone(),
            guards: self.guards.clone(),
            source: self.source.clone(),
            sink: self.sink.clone(),
        }
    }

    pub fn initial_state(&self) -> State {
        State {
            marking: self.net.initial_marking().expect("validated wf net"),
            eta: Assignment::empty(),
        }
    }

    /// Final states carry the final marking and any assignment.
    pub fn is_final(&self, s: &State) -> bool {
        let sink = self.net.place_index(&self.sink).expect("sink exists");
        s.marking
            .counts()
            .iter()
            .enumerate()
            .all(|(p, &c)| if p == sink { c == 1 } else { c == 0 })
    }

    /// Transitions with control-flow enabledness and a satisfied guard, in
    /// identifier order.
    pub fn enabled(&self, s: &State) -> Vec<String> {
        self.enabled_indices(s)
            .into_iter()
            .map(|t| self.net.transitions()[t].clone())
            .collect()
    }

    fn enabled_indices(&self, s: &State) -> Vec<usize> {
        self.net
            .enabled_transitions(&s.marking)
            .into_iter()
            .filter(|&t| {
                self.guards[&self.net.transitions()[t]].eval(&self.data, &s.eta)
            })
            .collect()
    }

    /// Fires `t` with the given write choice. The choice must assign exactly
    /// the non-deleted written variables, each to a value of its write set.
    pub fn fire_data(
        &self,
        s: &State,
        t: &str,
        choice: &BTreeMap<String, Value>,
    ) -> Result<State, DawNetError> {
        if self.net.transition_index(t).is_none() {
            return Err(DawNetError::UnknownTransition(t.to_string()));
        }
        let marking = self.net.fire(&s.marking, t)?;
        if !self.guards[t].eval(&self.data, &s.eta) {
            return Err(DawNetError::GuardFailed(t.to_string()));
        }
        let empty = WriteSpec::new();
        let spec = self.writes.get(t).unwrap_or(&empty);
        let written: BTreeSet<&String> =
            spec.iter().filter(|(_, set)| !set.is_empty()).map(|(v, _)| v).collect();
        for v in choice.keys() {
            if !written.contains(v) {
                return Err(DawNetError::BadChoice {
                    transition: t.to_string(),
                    detail: format!("'{v}' is not written by the transition"),
                });
            }
        }
        for v in &written {
            match choice.get(*v) {
                None => {
                    return Err(DawNetError::BadChoice {
                        transition: t.to_string(),
                        detail: format!("missing a value for '{v}'"),
                    })
                }
                Some(value) if !spec[*v].contains(value) => {
                    return Err(DawNetError::BadChoice {
                        transition: t.to_string(),
                        detail: format!("{value} is not in the write set of '{v}'"),
                    })
                }
                Some(_) => {}
            }
        }
        let mut eta = s.eta.clone();
        for (v, set) in spec {
            if set.is_empty() {
                eta = eta.unbind(v);
            }
        }
        for (v, value) in choice {
            eta = eta
                .bind(&self.data, v, value.clone())
                .expect("write sets are validated subsets of the domains");
        }
        Ok(State { marking, eta })
    }

    /// All valid firings from `s`: for each enabled transition, the cartesian
    /// product of its write-set choices, in transition then value order.
    pub fn successors(&self, s: &State) -> Vec<(String, BTreeMap<String, Value>, State)> {
        let mut out = Vec::new();
        for ti in self.enabled_indices(s) {
            let t = &self.net.transitions()[ti];
            for choice in self.choices(t) {
                let next = self
                    .fire_data(s, t, &choice)
                    .expect("enumerated choices are valid");
                out.push((t.clone(), choice, next));
            }
        }
        out
    }

    /// Write choices of `t` in deterministic (variable, then value) order.
    pub fn choices(&self, t: &str) -> Vec<BTreeMap<String, Value>> {
        let empty = WriteSpec::new();
        let spec = self.writes.get(t).unwrap_or(&empty);
        let vars: Vec<(&String, Vec<&Value>)> = spec
            .iter()
            .filter(|(_, set)| !set.is_empty())
            .map(|(v, set)| (v, set.iter().collect()))
            .collect();
        let mut out = vec![BTreeMap::new()];
        for (v, values) in vars {
            let mut next = Vec::with_capacity(out.len() * values.len());
            for partial in &out {
                for value in &values {
                    let mut c = partial.clone();
                    c.insert(v.clone(), (*value).clone());
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }

    /// Packs states compactly for deduplication during search.
    pub fn codec(&self) -> StateCodec {
        StateCodec::new(self)
    }

    /// Breadth-first closure of the state space from the initial state.
    pub fn build_rg(&self, caps: &ExploreCaps) -> Result<ReachGraph, Box<ReachGraph>> {
        let codec = self.codec();
        let initial = self.initial_state();
        let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
        let mut states = vec![initial.clone()];
        index.insert(codec.pack(&initial), 0);
        let mut edges = Vec::new();
        let mut frontier = vec![0usize];
        let mut depth = 0usize;
        let mut truncated = false;
        'outer: while !frontier.is_empty() && depth < caps.max_depth {
            let mut next_frontier = Vec::new();
            for &si in &frontier {
                let state = states[si].clone();
                for (t, _choice, succ) in self.successors(&state) {
                    let key = codec.pack(&succ);
                    let di = match index.get(&key) {
                        Some(&d) => d,
                        None => {
                            if states.len() >= caps.max_states {
                                truncated = true;
                                break 'outer;
                            }
                            let d = states.len();
                            index.insert(key, d);
                            states.push(succ);
                            next_frontier.push(d);
                            d
                        }
                    };
                    edges.push((si, t, di));
                }
            }
            frontier = next_frontier;
            depth += 1;
        }
        if !frontier.is_empty() && depth >= caps.max_depth {
            truncated = true;
        }
        let rg = ReachGraph {
            states,
            initial: 0,
            edges,
            truncated,
        };
        if truncated {
            Err(Box::new(rg))
        } else {
            Ok(rg)
        }
    }
}

/// A DAW-net state: the marking plus the data assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub marking: Marking,
    pub eta: Assignment,
}

impl State {
    pub fn display(&self, net: &PetriNet) -> String {
        format!("{} {}", self.marking.display(net), self.eta.display())
    }
}

/// Exploration caps for reachability-graph construction and search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreCaps {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for ExploreCaps {
    fn default() -> Self {
        ExploreCaps {
            max_states: 1_000_000,
            max_depth: usize::MAX,
        }
    }
}

/// The reachability graph: indexed states with transition-labeled edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachGraph {
    pub states: Vec<State>,
    pub initial: usize,
    pub edges: Vec<(usize, String, usize)>,
    pub truncated: bool,
}

impl ReachGraph {
    pub fn successors_of(&self, s: usize) -> impl Iterator<Item = (&str, usize)> {
        self.edges
            .iter()
            .filter(move |(src, _, _)| *src == s)
            .map(|(_, t, dst)| (t.as_str(), *dst))
    }

    pub fn has_outgoing(&self, s: usize) -> bool {
        self.edges.iter().any(|(src, _, _)| *src == s)
    }
}

/// Packs a state into marking bits followed by one byte per variable
/// (0 = unbound, otherwise 1 + index into the variable's write domain).
/// Safe nets only; counts above 1 fall back to saturation and the packed
/// form is then only used for hashing, never unpacked.
#[derive(Debug, Clone)]
pub struct StateCodec {
    n_places: usize,
    var_names: Vec<String>,
    var_values: Vec<Vec<Value>>,
}

impl StateCodec {
    fn new(w: &DawNet) -> Self {
        let var_names: Vec<String> = w.data().variables().map(str::to_string).collect();
        let var_values = var_names
            .iter()
            .map(|v| w.write_domain(v).into_iter().collect())
            .collect();
        StateCodec {
            n_places: w.net().places().len(),
            var_names,
            var_values,
        }
    }

    pub fn pack(&self, s: &State) -> Vec<u8> {
        let mut out = vec![0u8; self.n_places.div_ceil(8) + self.var_names.len()];
        let mut safe = true;
        for (p, &c) in s.marking.counts().iter().enumerate() {
            if c > 0 {
                out[p / 8] |= 1 << (p % 8);
            }
            if c > 1 {
                safe = false;
            }
        }
        if !safe {
            // Rare: disambiguate unsafe markings by appending raw counts.
            out.extend(s.marking.counts().iter().flat_map(|c| c.to_le_bytes()));
        }
        let base = self.n_places.div_ceil(8);
        for (i, v) in self.var_names.iter().enumerate() {
            let byte = match s.eta.get(v) {
                None => 0u8,
                Some(value) => {
                    let idx = self.var_values[i]
                        .iter()
                        .position(|x| x == value)
                        .expect("assignment values come from write domains");
                    (idx + 1) as u8
                }
            };
            let pos = if safe { base + i } else { out.len() - self.var_names.len() + i };
            if safe {
                out[pos] = byte;
            } else {
                out.push(byte);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::loan_model;
    use crate::data_model::int_set;

    fn loan() -> DawNet {
        loan_model()
    }

    #[test]
    fn loan_model_validates() {
        let w = loan();
        assert_eq!(w.source(), "start");
        assert_eq!(w.sink(), "end");
        assert!(w.guard("T9").unwrap().is_true());
    }

    #[test]
    fn restrict_finite_cuts_request_domain() {
        let w = loan();
        let fin = w.restrict_finite();
        let dom = fin.data().domain("request").unwrap();
        assert_eq!(dom.values(), &w.active_domain().iter().filter(|v| matches!(v, Value::Int(_))).cloned().collect());
        // Every write constant survives the cut.
        assert!(dom.values().is_superset(&w.write_domain("request")));
    }

    #[test]
    fn no_writes_no_guards_restricts_to_empty() {
        let net = PetriNet::new(
            vec!["s", "e"],
            vec!["t"],
            vec![("s", "t"), ("t", "e")],
        )
        .unwrap();
        let data = DataModel::new(vec![(
            "x".into(),
            crate::data_model::Domain::int_ordered(int_set([1, 2, 3])),
        )]);
        let w = DawNet::new(net, data, BTreeMap::new(), BTreeMap::new()).unwrap();
        let fin = w.restrict_finite();
        assert!(fin.data().domain("x").unwrap().values().is_empty());
    }

    #[test]
    fn initial_state_enables_only_t1() {
        let w = loan();
        assert_eq!(w.enabled(&w.initial_state()), vec!["T1".to_string()]);
    }

    #[test]
    fn approval_guards_split_on_request() {
        let w = loan();
        // Reach p4 with request = 3000 via T1(w), T3, T5.
        let s = w.initial_state();
        let s = w
            .fire_data(&s, "T1", &[("loanType".to_string(), Value::Str("w".into()))].into())
            .unwrap();
        let s = w.fire_data(&s, "T3", &BTreeMap::new()).unwrap();
        let choice: BTreeMap<String, Value> = [
            ("request".to_string(), Value::Int(3000)),
            ("loan".to_string(), Value::Int(3000)),
        ]
        .into();
        let s = w.fire_data(&s, "T5", &choice).unwrap();
        assert_eq!(w.enabled(&s), vec!["T6".to_string()]);
    }

    #[test]
    fn unsatisfiable_guard_never_enabled() {
        let net = PetriNet::new(
            vec!["s", "e"],
            vec!["t"],
            vec![("s", "t"), ("t", "e")],
        )
        .unwrap();
        let w = DawNet::new(
            net,
            DataModel::default(),
            BTreeMap::new(),
            [("t".to_string(), GuardExpr::True.negate())].into(),
        )
        .unwrap();
        assert!(w.enabled(&w.initial_state()).is_empty());
    }

    #[test]
    fn fire_with_write_choice() {
        let w = loan();
        let s = w.initial_state();
        let s2 = w
            .fire_data(&s, "T1", &[("loanType".to_string(), Value::Str("s".into()))].into())
            .unwrap();
        assert_eq!(s2.marking.get(w.net(), "p1"), Some(1));
        assert_eq!(s2.eta.get("loanType"), Some(&Value::Str("s".into())));
    }

    #[test]
    fn deletion_write_unbinds() {
        let net = PetriNet::new(
            vec!["s", "m", "e"],
            vec!["t1", "t2"],
            vec![("s", "t1"), ("t1", "m"), ("m", "t2"), ("t2", "e")],
        )
        .unwrap();
        let data = DataModel::new(vec![(
            "x".into(),
            crate::data_model::Domain::int_ordered(int_set([1])),
        )]);
        let writes: BTreeMap<String, WriteSpec> = [
            ("t1".to_string(), [("x".to_string(), int_set([1]))].into()),
            ("t2".to_string(), [("x".to_string(), BTreeSet::new())].into()),
        ]
        .into();
        let w = DawNet::new(net, data, writes, BTreeMap::new()).unwrap();
        let s = w.initial_state();
        let s = w
            .fire_data(&s, "t1", &[("x".to_string(), Value::Int(1))].into())
            .unwrap();
        assert!(s.eta.is_bound("x"));
        let s = w.fire_data(&s, "t2", &BTreeMap::new()).unwrap();
        assert!(!s.eta.is_bound("x"));
    }

    #[test]
    fn bad_choice_rejected() {
        let w = loan();
        let s = w.initial_state();
        // Value outside the write set.
        let err = w
            .fire_data(&s, "T1", &[("loanType".to_string(), Value::Str("x".into()))].into())
            .unwrap_err();
        assert!(matches!(err, DawNetError::BadChoice { .. }));
        // Missing variable.
        let err = w.fire_data(&s, "T1", &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, DawNetError::BadChoice { .. }));
        // Extra variable.
        let err = w
            .fire_data(
                &s,
                "T9",
                &[("loanType".to_string(), Value::Str("w".into()))].into(),
            )
            .unwrap_err();
        assert!(matches!(err, DawNetError::Net(_)));
    }

    #[test]
    fn t1_has_two_successors() {
        let w = loan();
        let succ = w.successors(&w.initial_state());
        assert_eq!(succ.len(), 2);
        assert!(succ.iter().all(|(t, _, _)| t == "T1"));
    }

    #[test]
    fn product_choice_enumeration() {
        let net = PetriNet::new(vec!["s", "e"], vec!["t"], vec![("s", "t"), ("t", "e")]).unwrap();
        let data = DataModel::new(vec![
            ("u".into(), crate::data_model::Domain::unordered(crate::data_model::str_set(["a"]))),
            ("v".into(), crate::data_model::Domain::int_ordered(int_set([1, 2]))),
        ]);
        let writes: BTreeMap<String, WriteSpec> = [(
            "t".to_string(),
            [
                ("v".to_string(), int_set([1, 2])),
                ("u".to_string(), crate::data_model::str_set(["a"])),
            ]
            .into(),
        )]
        .into();
        let w = DawNet::new(net, data, writes, BTreeMap::new()).unwrap();
        let succ = w.successors(&w.initial_state());
        assert_eq!(succ.len(), 2);
        // No enabled transitions once the token is in the sink.
        let end = &succ[0].2;
        assert!(w.successors(end).is_empty());
    }

    #[test]
    fn rg_of_loan_partitions_on_approval() {
        let w = loan().restrict_finite();
        let rg = w.build_rg(&ExploreCaps::default()).unwrap();
        assert!(!rg.truncated);
        // Every case passes through exactly one of T6/T7/T8: every path from
        // initial to a final state has exactly one approval edge.
        let finals: Vec<usize> = (0..rg.states.len())
            .filter(|&i| w.is_final(&rg.states[i]))
            .collect();
        assert!(!finals.is_empty());
        // Count approval edges along each path via DFS with counts.
        fn dfs(
            rg: &ReachGraph,
            node: usize,
            approvals: usize,
            finals: &[usize],
            seen: &mut Vec<(usize, usize)>,
        ) {
            if finals.contains(&node) {
                assert_eq!(approvals, 1, "final reached with {approvals} approvals");
            }
            for (t, dst) in rg.successors_of(node) {
                let a = approvals + usize::from(matches!(t, "T6" | "T7" | "T8"));
                assert!(a <= 1);
                if !seen.contains(&(dst, a)) {
                    seen.push((dst, a));
                    dfs(rg, dst, a, finals, seen);
                }
            }
        }
        dfs(&rg, rg.initial, 0, &finals, &mut Vec::new());
    }

    #[test]
    fn two_state_rg_for_single_transition_net() {
        let net = PetriNet::new(vec!["s", "e"], vec!["t"], vec![("s", "t"), ("t", "e")]).unwrap();
        let w = DawNet::new(net, DataModel::default(), BTreeMap::new(), BTreeMap::new()).unwrap();
        let rg = w.build_rg(&ExploreCaps::default()).unwrap();
        assert_eq!(rg.states.len(), 2);
        assert_eq!(rg.edges.len(), 1);
    }

    #[test]
    fn rg_identical_after_finite_restriction() {
        let w = loan();
        let rg1 = w.build_rg(&ExploreCaps::default()).unwrap();
        let rg2 = w.restrict_finite().build_rg(&ExploreCaps::default()).unwrap();
        assert_eq!(rg1.states, rg2.states);
        assert_eq!(rg1.edges, rg2.edges);
    }

    #[test]
    fn rg_construction_is_deterministic() {
        let w = loan().restrict_finite();
        let rg1 = w.build_rg(&ExploreCaps::default()).unwrap();
        let rg2 = w.build_rg(&ExploreCaps::default()).unwrap();
        assert_eq!(rg1, rg2);
    }

    #[test]
    fn safeness_propagates_to_all_rg_states() {
        let w = loan().restrict_finite();
        let rg = w.build_rg(&ExploreCaps::default()).unwrap();
        assert!(rg.states.iter().all(|s| s.marking.is_safe()));
    }

    #[test]
    fn enabled_depends_only_on_state() {
        let w = loan().restrict_finite();
        let rg = w.build_rg(&ExploreCaps::default()).unwrap();
        for s in &rg.states {
            assert_eq!(w.enabled(s), w.enabled(&s.clone()));
        }
    }

    #[test]
    fn cap_exceeded_returns_partial_graph() {
        let w = loan();
        let caps = ExploreCaps {
            max_states: 5,
            max_depth: usize::MAX,
        };
        let partial = w.build_rg(&caps).unwrap_err();
        assert!(partial.truncated);
        assert!(partial.states.len() <= 5);
    }
}
