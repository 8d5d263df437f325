//! Petri-net and WF-net structure: places, transitions, flow relation,
//! markings, control-flow firing, and structural checks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

/// Default cap on the number of markings explored by [`PetriNet::check_bounded`].
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoreNetError {
    #[error("unknown node id '{0}'")]
    UnknownNode(String),
    #[error("identifier '{0}' is used for both a place and a transition")]
    DuplicateId(String),
    #[error("arc ({0}, {1}) connects two nodes of the same kind")]
    ArcSameKind(String, String),
    #[error("transition '{transition}' is not enabled: empty input places {missing:?}")]
    NotEnabled {
        transition: String,
        missing: Vec<String>,
    },
    #[error("net is not a workflow net (source: {src:?}, sink: {sink:?})")]
    NotWorkflow {
        src: Option<String>,
        sink: Option<String>,
    },
    #[error("exploration budget exceeded after {explored} markings")]
    ExplorationBudgetExceeded { explored: usize },
}

/// A Petri net: places, transitions and the flow relation.
///
/// Identifiers are opaque strings ordered lexicographically; all iteration
/// follows that order so exploration and printing are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<String>,
    transitions: Vec<String>,
    /// Input places of each transition, as indices into `places`.
    pre_t: Vec<Vec<usize>>,
    /// Output places of each transition.
    post_t: Vec<Vec<usize>>,
    /// Transitions consuming from each place.
    post_p: Vec<Vec<usize>>,
    /// Transitions producing into each place.
    pre_p: Vec<Vec<usize>>,
}

impl PetriNet {
    /// Builds a net from identifier lists and arcs given as `(from, to)` pairs.
    /// Arc multiplicity is 1; duplicate arcs collapse.
    pub fn new<S: Into<String>>(
        places: Vec<S>,
        transitions: Vec<S>,
        arcs: Vec<(S, S)>,
    ) -> Result<Self, CoreNetError> {
        let mut places: Vec<String> = places.into_iter().map(Into::into).collect();
        let mut transitions: Vec<String> = transitions.into_iter().map(Into::into).collect();
        places.sort();
        places.dedup();
        transitions.sort();
        transitions.dedup();
        for p in &places {
            if transitions.binary_search(p).is_ok() {
                return Err(CoreNetError::DuplicateId(p.clone()));
            }
        }
        let mut net = PetriNet {
            pre_t: vec![Vec::new(); transitions.len()],
            post_t: vec![Vec::new(); transitions.len()],
            post_p: vec![Vec::new(); places.len()],
            pre_p: vec![Vec::new(); places.len()],
            places,
            transitions,
        };
        for (from, to) in arcs {
            let (from, to) = (from.into(), to.into());
            match (net.place_index(&from), net.transition_index(&to)) {
                (Some(p), Some(t)) => {
                    push_sorted(&mut net.pre_t[t], p);
                    push_sorted(&mut net.post_p[p], t);
                }
                (None, None) => match (net.transition_index(&from), net.place_index(&to)) {
                    (Some(t), Some(p)) => {
                        push_sorted(&mut net.post_t[t], p);
                        push_sorted(&mut net.pre_p[p], t);
                    }
                    (None, _) => return Err(CoreNetError::UnknownNode(from)),
                    (_, None) => return Err(CoreNetError::UnknownNode(to)),
                },
                (Some(_), None) => {
                    if net.place_index(&to).is_some() {
                        return Err(CoreNetError::ArcSameKind(from, to));
                    }
                    return Err(CoreNetError::UnknownNode(to));
                }
                (None, Some(_)) => {
                    if net.transition_index(&from).is_some() {
                        return Err(CoreNetError::ArcSameKind(from, to));
                    }
                    return Err(CoreNetError::UnknownNode(from));
                }
            }
        }
        Ok(net)
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[String] {
        &self.transitions
    }

    pub fn place_index(&self, id: &str) -> Option<usize> {
        self.places.binary_search_by(|p| p.as_str().cmp(id)).ok()
    }

    pub fn transition_index(&self, id: &str) -> Option<usize> {
        self.transitions
            .binary_search_by(|t| t.as_str().cmp(id))
            .ok()
    }

    pub fn preset_of_transition(&self, t: usize) -> &[usize] {
        &self.pre_t[t]
    }

    pub fn postset_of_transition(&self, t: usize) -> &[usize] {
        &self.post_t[t]
    }

    /// Input nodes of `node`: places for a transition, transitions for a place.
    pub fn preset(&self, node: &str) -> Result<BTreeSet<String>, CoreNetError> {
        if let Some(t) = self.transition_index(node) {
            Ok(self.pre_t[t].iter().map(|&p| self.places[p].clone()).collect())
        } else if let Some(p) = self.place_index(node) {
            Ok(self.pre_p[p]
                .iter()
                .map(|&t| self.transitions[t].clone())
                .collect())
        } else {
            Err(CoreNetError::UnknownNode(node.to_string()))
        }
    }

    /// Output nodes of `node`.
    pub fn postset(&self, node: &str) -> Result<BTreeSet<String>, CoreNetError> {
        if let Some(t) = self.transition_index(node) {
            Ok(self.post_t[t]
                .iter()
                .map(|&p| self.places[p].clone())
                .collect())
        } else if let Some(p) = self.place_index(node) {
            Ok(self.post_p[p]
                .iter()
                .map(|&t| self.transitions[t].clone())
                .collect())
        } else {
            Err(CoreNetError::UnknownNode(node.to_string()))
        }
    }

    /// All arcs as `(from, to)` identifier pairs, in deterministic order.
    pub fn arcs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (p, outs) in self.post_p.iter().enumerate() {
            for &t in outs {
                out.push((self.places[p].clone(), self.transitions[t].clone()));
            }
        }
        for (t, outs) in self.post_t.iter().enumerate() {
            for &p in outs {
                out.push((self.transitions[t].clone(), self.places[p].clone()));
            }
        }
        out.sort();
        out
    }

    /// Diagnoses the WF-net conditions: unique source, unique sink, and every
    /// node on a path from source to sink. Never fails; the result carries the
    /// findings.
    pub fn check_wf(&self) -> WfNetCheck {
        let sources: Vec<usize> = (0..self.places.len())
            .filter(|&p| self.pre_p[p].is_empty())
            .collect();
        let sinks: Vec<usize> = (0..self.places.len())
            .filter(|&p| self.post_p[p].is_empty())
            .collect();
        let source = (sources.len() == 1).then(|| self.places[sources[0]].clone());
        let sink = (sinks.len() == 1).then(|| self.places[sinks[0]].clone());
        let mut unreachable_nodes = Vec::new();
        if let (Some(src), Some(snk)) = (&source, &sink) {
            let fwd = self.reach_from(sources[0], false);
            let bwd = self.reach_from(sinks[0], true);
            for node in self.node_ids() {
                if !(fwd.contains(&node) && bwd.contains(&node)) {
                    unreachable_nodes.push(node);
                }
            }
            let _ = (src, snk);
        }
        let is_wf = source.is_some() && sink.is_some() && unreachable_nodes.is_empty();
        WfNetCheck {
            is_wf,
            source,
            sink,
            unreachable_nodes,
        }
    }

    fn node_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.places.clone();
        ids.extend(self.transitions.iter().cloned());
        ids.sort();
        ids
    }

    /// Nodes reachable from place `start` following arcs (reversed when `backward`).
    fn reach_from(&self, start: usize, backward: bool) -> BTreeSet<String> {
        // Node encoding for the worklist: places are (0, p), transitions (1, t).
        let mut seen = BTreeSet::new();
        let mut work = vec![(0u8, start)];
        while let Some((kind, idx)) = work.pop() {
            let id = if kind == 0 {
                self.places[idx].clone()
            } else {
                self.transitions[idx].clone()
            };
            if !seen.insert(id) {
                continue;
            }
            let nexts: &[usize] = match (kind, backward) {
                (0, false) => &self.post_p[idx],
                (0, true) => &self.pre_p[idx],
                (1, false) => &self.post_t[idx],
                (1, true) => &self.pre_t[idx],
                _ => unreachable!(),
            };
            for &n in nexts {
                work.push((1 - kind, n));
            }
        }
        seen
    }

    /// The marking with a single token in the source place.
    pub fn initial_marking(&self) -> Result<Marking, CoreNetError> {
        let check = self.check_wf();
        let source = check.source.clone().ok_or(CoreNetError::NotWorkflow {
            src: check.source,
            sink: check.sink,
        })?;
        let mut counts = vec![0; self.places.len()];
        counts[self.place_index(&source).unwrap()] = 1;
        Ok(Marking { counts })
    }

    /// The marking with a single token in the sink place.
    pub fn final_marking(&self) -> Result<Marking, CoreNetError> {
        let check = self.check_wf();
        let sink = check.sink.clone().ok_or(CoreNetError::NotWorkflow {
            src: check.source,
            sink: check.sink,
        })?;
        let mut counts = vec![0; self.places.len()];
        counts[self.place_index(&sink).unwrap()] = 1;
        Ok(Marking { counts })
    }

    /// Transitions enabled in `m` (all input places hold a token), in id order.
    pub fn enabled_transitions(&self, m: &Marking) -> Vec<usize> {
        (0..self.transitions.len())
            .filter(|&t| self.pre_t[t].iter().all(|&p| m.counts[p] > 0))
            .collect()
    }

    /// Fires `t`, consuming one token from each input place and producing one
    /// in each output place; self-loop places keep their count.
    pub fn fire(&self, m: &Marking, t: &str) -> Result<Marking, CoreNetError> {
        let ti = self
            .transition_index(t)
            .ok_or_else(|| CoreNetError::UnknownNode(t.to_string()))?;
        self.fire_index(m, ti)
    }

    pub fn fire_index(&self, m: &Marking, ti: usize) -> Result<Marking, CoreNetError> {
        let missing: Vec<String> = self.pre_t[ti]
            .iter()
            .filter(|&&p| m.counts[p] == 0)
            .map(|&p| self.places[p].clone())
            .collect();
        if !missing.is_empty() {
            return Err(CoreNetError::NotEnabled {
                transition: self.transitions[ti].clone(),
                missing,
            });
        }
        let mut counts = m.counts.clone();
        for &p in &self.pre_t[ti] {
            if !self.post_t[ti].contains(&p) {
                counts[p] -= 1;
            }
        }
        for &p in &self.post_t[ti] {
            if !self.pre_t[ti].contains(&p) {
                counts[p] += 1;
            }
        }
        Ok(Marking { counts })
    }

    /// Explores markings reachable from the initial one, up to `depth` firings
    /// and `state_cap` distinct markings, reporting the first place whose
    /// token count exceeds `k` together with the firing sequence reaching it.
    pub fn check_bounded(
        &self,
        k: u32,
        depth: usize,
        state_cap: usize,
    ) -> Result<BoundedCheck, CoreNetError> {
        let initial = self.initial_marking()?;
        let mut seen: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        // Parent pointers to rebuild a witness path.
        let mut parents: Vec<Option<(usize, usize)>> = vec![None];
        let mut states: Vec<Marking> = vec![initial.clone()];
        seen.insert(initial.counts.clone(), 0);
        let mut frontier: VecDeque<(usize, usize)> = VecDeque::new();
        frontier.push_back((0, 0));
        while let Some((si, d)) = frontier.pop_front() {
            if d >= depth {
                continue;
            }
            let m = states[si].clone();
            for t in self.enabled_transitions(&m) {
                let m2 = self.fire_index(&m, t).expect("enabled transition fires");
                if let Some(&bad) = m2.counts.iter().find(|&&c| c > k) {
                    let _ = bad;
                    let mut path = vec![self.transitions[t].clone()];
                    let mut cur = si;
                    while let Some((prev, via)) = parents[cur] {
                        path.push(self.transitions[via].clone());
                        cur = prev;
                    }
                    path.reverse();
                    return Ok(BoundedCheck {
                        bounded: false,
                        witness: Some(path),
                        explored: states.len(),
                    });
                }
                if !seen.contains_key(&m2.counts) {
                    if states.len() >= state_cap {
                        return Err(CoreNetError::ExplorationBudgetExceeded {
                            explored: states.len(),
                        });
                    }
                    let idx = states.len();
                    seen.insert(m2.counts.clone(), idx);
                    states.push(m2);
                    parents.push(Some((si, t)));
                    frontier.push_back((idx, d + 1));
                }
            }
        }
        Ok(BoundedCheck {
            bounded: true,
            witness: None,
            explored: states.len(),
        })
    }
}

fn push_sorted(v: &mut Vec<usize>, x: usize) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

/// A total token-count map over the net's places, in place order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking {
    counts: Vec<u32>,
}

impl Marking {
    pub fn from_counts(counts: Vec<u32>) -> Self {
        Marking { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn get(&self, net: &PetriNet, place: &str) -> Option<u32> {
        net.place_index(place).map(|p| self.counts[p])
    }

    pub fn total_tokens(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn is_safe(&self) -> bool {
        self.counts.iter().all(|&c| c <= 1)
    }

    /// Renders as `{p1: 1, p2: 2}` listing only marked places.
    pub fn display(&self, net: &PetriNet) -> String {
        let parts: Vec<String> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(p, &c)| {
                if c == 1 {
                    net.places()[p].clone()
                } else {
                    format!("{}:{}", net.places()[p], c)
                }
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Outcome of the WF-net structural diagnosis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WfNetCheck {
    pub is_wf: bool,
    pub source: Option<String>,
    pub sink: Option<String>,
    pub unreachable_nodes: Vec<String>,
}

/// Outcome of the bounded exploration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedCheck {
    pub bounded: bool,
    /// Firing sequence reaching a marking that violates the bound.
    pub witness: Option<Vec<String>>,
    pub explored: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_net() -> PetriNet {
        PetriNet::new(
            vec!["p0", "p1", "p2"],
            vec!["t"],
            vec![("p0", "t"), ("p1", "t"), ("t", "p2")],
        )
        .unwrap()
    }

    /// The LoanRequest net: T1..T12 with the xor/parallel topology.
    pub(crate) fn loan_net() -> PetriNet {
        PetriNet::new(
            vec![
                "start", "p1", "p2", "p3", "p4", "p5", "p6", "p7", "p8", "p9", "end",
            ],
            vec![
                "T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8", "T9", "T10", "T11", "T12",
            ],
            vec![
                ("start", "T1"),
                ("T1", "p1"),
                ("p1", "T2"),
                ("p1", "T3"),
                ("T2", "p2"),
                ("T3", "p3"),
                ("p2", "T4"),
                ("p3", "T5"),
                ("T4", "p4"),
                ("T5", "p4"),
                ("p4", "T6"),
                ("p4", "T7"),
                ("p4", "T8"),
                ("T6", "p5"),
                ("T7", "p5"),
                ("T8", "p5"),
                ("p5", "T9"),
                ("T9", "p6"),
                ("T9", "p7"),
                ("p6", "T10"),
                ("p7", "T11"),
                ("T10", "p8"),
                ("T11", "p9"),
                ("p8", "T12"),
                ("p9", "T12"),
                ("T12", "end"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn preset_of_fig1_transition() {
        let net = fig1_net();
        let pre = net.preset("t").unwrap();
        assert_eq!(
            pre,
            ["p0", "p1"].iter().map(|s| s.to_string()).collect()
        );
        assert_eq!(
            net.postset("t").unwrap(),
            ["p2"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn preset_of_isolated_transition_is_empty() {
        let net = PetriNet::new(vec!["p"], vec!["t"], vec![("t", "p")]).unwrap();
        assert!(net.preset("t").unwrap().is_empty());
    }

    #[test]
    fn preset_of_loan_t9() {
        let net = loan_net();
        assert_eq!(
            net.preset("T9").unwrap(),
            ["p5"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn unknown_node_rejected() {
        let net = fig1_net();
        assert_eq!(
            net.preset("nope"),
            Err(CoreNetError::UnknownNode("nope".into()))
        );
    }

    #[test]
    fn arc_between_places_rejected() {
        let err = PetriNet::new(vec!["a", "b"], vec!["t"], vec![("a", "b")]).unwrap_err();
        assert_eq!(err, CoreNetError::ArcSameKind("a".into(), "b".into()));
    }

    #[test]
    fn shared_identifier_rejected() {
        let err = PetriNet::new(vec!["x"], vec!["x"], vec![]).unwrap_err();
        assert_eq!(err, CoreNetError::DuplicateId("x".into()));
    }

    #[test]
    fn loan_net_is_wf() {
        let check = loan_net().check_wf();
        assert!(check.is_wf);
        assert_eq!(check.source.as_deref(), Some("start"));
        assert_eq!(check.sink.as_deref(), Some("end"));
        assert!(check.unreachable_nodes.is_empty());
    }

    #[test]
    fn two_sourceless_places_not_wf() {
        let net = PetriNet::new(
            vec!["a", "b", "z"],
            vec!["t", "u"],
            vec![("a", "t"), ("b", "u"), ("t", "z"), ("u", "z")],
        )
        .unwrap();
        let check = net.check_wf();
        assert!(!check.is_wf);
        assert_eq!(check.source, None);
    }

    #[test]
    fn off_path_transition_reported_unreachable() {
        // u consumes from the sink side but feeds nothing that reaches end.
        let net = PetriNet::new(
            vec!["s", "m", "e", "dead"],
            vec!["t1", "t2", "u"],
            vec![
                ("s", "t1"),
                ("t1", "m"),
                ("m", "t2"),
                ("t2", "e"),
                ("m", "u"),
                ("u", "dead"),
                ("dead", "u"),
            ],
        )
        .unwrap();
        let check = net.check_wf();
        assert!(!check.is_wf);
        assert!(check.unreachable_nodes.contains(&"u".to_string()));
        assert!(check.unreachable_nodes.contains(&"dead".to_string()));
    }

    #[test]
    fn fire_requires_all_input_tokens() {
        let net = fig1_net();
        // M(p0)=2, M(p1)=0, M(p2)=1 as in the running figure.
        let m = Marking::from_counts(vec![2, 0, 1]);
        let err = net.fire(&m, "t").unwrap_err();
        assert_eq!(
            err,
            CoreNetError::NotEnabled {
                transition: "t".into(),
                missing: vec!["p1".into()],
            }
        );
    }

    #[test]
    fn fire_moves_tokens() {
        let net = fig1_net();
        let m = Marking::from_counts(vec![1, 1, 0]);
        let m2 = net.fire(&m, "t").unwrap();
        assert_eq!(m2.counts(), &[0, 0, 1]);
    }

    #[test]
    fn self_loop_place_keeps_count() {
        let net = PetriNet::new(
            vec!["p", "q"],
            vec!["t"],
            vec![("p", "t"), ("t", "p"), ("t", "q")],
        )
        .unwrap();
        let m = Marking::from_counts(vec![1, 0]);
        let m2 = net.fire(&m, "t").unwrap();
        assert_eq!(m2.get(&net, "p"), Some(1));
        assert_eq!(m2.get(&net, "q"), Some(1));
    }

    #[test]
    fn fire_is_deterministic() {
        let net = loan_net();
        let m = net.initial_marking().unwrap();
        assert_eq!(net.fire(&m, "T1").unwrap(), net.fire(&m, "T1").unwrap());
    }

    #[test]
    fn token_conservation() {
        let net = loan_net();
        let mut m = net.initial_marking().unwrap();
        loop {
            let enabled = net.enabled_transitions(&m);
            let Some(&t) = enabled.first() else { break };
            let m2 = net.fire_index(&m, t).unwrap();
            let pre: Vec<usize> = net.preset_of_transition(t).to_vec();
            let post: Vec<usize> = net.postset_of_transition(t).to_vec();
            let only_post = post.iter().filter(|p| !pre.contains(p)).count() as i64;
            let only_pre = pre.iter().filter(|p| !post.contains(p)).count() as i64;
            assert_eq!(
                m2.total_tokens() as i64 - m.total_tokens() as i64,
                only_post - only_pre
            );
            m = m2;
        }
    }

    #[test]
    fn loan_net_is_safe() {
        let res = loan_net().check_bounded(1, 64, DEFAULT_STATE_CAP).unwrap();
        assert!(res.bounded);
    }

    #[test]
    fn merge_into_one_place_unsafe_with_witness() {
        // Two parallel branches both feed place q: after t0, ta and tb each
        // deposit a token into q.
        let net = PetriNet::new(
            vec!["s", "a", "b", "q"],
            vec!["t0", "ta", "tb"],
            vec![
                ("s", "t0"),
                ("t0", "a"),
                ("t0", "b"),
                ("a", "ta"),
                ("b", "tb"),
                ("ta", "q"),
                ("tb", "q"),
            ],
        )
        .unwrap();
        let res = net.check_bounded(1, 16, DEFAULT_STATE_CAP).unwrap();
        assert!(!res.bounded);
        let witness = res.witness.unwrap();
        assert_eq!(witness.first().map(String::as_str), Some("t0"));
        assert_eq!(witness.len(), 3);
    }

    #[test]
    fn single_transition_net_trivially_bounded() {
        let net = PetriNet::new(vec!["s", "e"], vec!["t"], vec![("s", "t"), ("t", "e")]).unwrap();
        let res = net.check_bounded(1, 8, DEFAULT_STATE_CAP).unwrap();
        assert!(res.bounded);
        assert_eq!(res.explored, 2);
    }

    #[test]
    fn exploration_cap_reported() {
        let net = loan_net();
        let err = net.check_bounded(1, 64, 3).unwrap_err();
        assert!(matches!(
            err,
            CoreNetError::ExplorationBudgetExceeded { explored: 3 }
        ));
    }

    /// check_wf agrees with a Floyd–Warshall closure oracle on random digraphs.
    #[test]
    fn wf_check_matches_floyd_warshall_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(9183);
        for _ in 0..1000 {
            let n_places = rng.gen_range(1..=6);
            let n_trans = rng.gen_range(1..=6);
            let places: Vec<String> = (0..n_places).map(|i| format!("p{i}")).collect();
            let transitions: Vec<String> = (0..n_trans).map(|i| format!("t{i}")).collect();
            let mut arcs = Vec::new();
            for p in 0..n_places {
                for t in 0..n_trans {
                    if rng.gen_bool(0.25) {
                        arcs.push((places[p].clone(), transitions[t].clone()));
                    }
                    if rng.gen_bool(0.25) {
                        arcs.push((transitions[t].clone(), places[p].clone()));
                    }
                }
            }
            let net = PetriNet::new(places.clone(), transitions.clone(), arcs.clone()).unwrap();
            let check = net.check_wf();

            // Oracle: Floyd–Warshall reflexive-transitive closure on node ids.
            let mut nodes: Vec<String> = places.iter().chain(transitions.iter()).cloned().collect();
            nodes.sort();
            let idx = |s: &str| nodes.iter().position(|n| n == s).unwrap();
            let n = nodes.len();
            let mut reach = vec![vec![false; n]; n];
            for (i, row) in reach.iter_mut().enumerate() {
                row[i] = true;
            }
            for (a, b) in &arcs {
                reach[idx(a)][idx(b)] = true;
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if reach[i][k] && reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
            let sources: Vec<&String> = places
                .iter()
                .filter(|p| !arcs.iter().any(|(_, b)| &b == p))
                .collect();
            let sinks: Vec<&String> = places
                .iter()
                .filter(|p| !arcs.iter().any(|(a, _)| &a == p))
                .collect();
            let expect_wf = sources.len() == 1
                && sinks.len() == 1
                && nodes.iter().all(|nd| {
                    reach[idx(sources[0])][idx(nd)] && reach[idx(nd)][idx(sinks[0])]
                });
            assert_eq!(check.is_wf, expect_wf, "net arcs: {arcs:?}");
        }
    }
}
