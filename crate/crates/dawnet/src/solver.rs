//! Native reachability decision with witness extraction.
//!
//! The solver runs a level-synchronous breadth-first search over the DAW-net
//! state space, so the first goal state found yields a shortest witness and
//! ties break by deterministic expansion order. A naive depth-first
//! enumeration without state deduplication serves as an independent oracle
//! for the test suites.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::dawnet::{DawNet, ExploreCaps, State};
use crate::data_model::Value;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("oracle budget of {0} path prefixes exceeded")]
    OracleBudgetExceeded(usize),
}

/// Tri-state reachability answer; `Unknown` means the search was truncated
/// by a cap before finding a goal state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reachability {
    Yes,
    No,
    Unknown,
}

/// One step of a witness case: the fired transition, its write choice, and
/// the state reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStep {
    pub transition: String,
    pub choice: BTreeMap<String, Value>,
    pub state: State,
}

/// Result of a reachability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachResult {
    pub reachable: Reachability,
    pub witness: Option<Vec<WitnessStep>>,
    pub explored: usize,
    pub truncated: bool,
}

/// Breadth-first reachability from the initial state to any state satisfying
/// `goal`. Returns a shortest witness when one exists.
pub fn solve<G>(w: &DawNet, goal: G, caps: &ExploreCaps) -> ReachResult
where
    G: Fn(&DawNet, &State) -> bool,
{
    let codec = w.codec();
    let initial = w.initial_state();
    if goal(w, &initial) {
        return ReachResult {
            reachable: Reachability::Yes,
            witness: Some(Vec::new()),
            explored: 1,
            truncated: false,
        };
    }
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut states: Vec<State> = vec![initial.clone()];
    let mut parents: Vec<Option<(usize, String, BTreeMap<String, Value>)>> = vec![None];
    index.insert(codec.pack(&initial), 0);
    let mut frontier = vec![0usize];
    let mut depth = 0usize;
    let mut truncated = false;
    'outer: while !frontier.is_empty() && depth < caps.max_depth {
        let mut next_frontier = Vec::new();
        for &si in &frontier {
            let state = states[si].clone();
            for (t, choice, succ) in w.successors(&state) {
                let key = codec.pack(&succ);
                if index.contains_key(&key) {
                    continue;
                }
                if states.len() >= caps.max_states {
                    truncated = true;
                    break 'outer;
                }
                let di = states.len();
                index.insert(key, di);
                states.push(succ.clone());
                parents.push(Some((si, t.clone(), choice)));
                if goal(w, &succ) {
                    let mut steps = Vec::new();
                    let mut cur = di;
                    while let Some((prev, trans, ch)) = parents[cur].clone() {
                        steps.push(WitnessStep {
                            transition: trans,
                            choice: ch,
                            state: states[cur].clone(),
                        });
                        cur = prev;
                    }
                    steps.reverse();
                    return ReachResult {
                        reachable: Reachability::Yes,
                        witness: Some(steps),
                        explored: states.len(),
                        truncated: false,
                    };
                }
                next_frontier.push(di);
            }
        }
        frontier = next_frontier;
        depth += 1;
    }
    if !truncated && !frontier.is_empty() && depth >= caps.max_depth {
        truncated = true;
    }
    ReachResult {
        reachable: if truncated {
            Reachability::Unknown
        } else {
            Reachability::No
        },
        witness: None,
        explored: states.len(),
        truncated,
    }
}

/// Clean termination: any final state (single token in the sink).
pub fn solve_clean_termination(w: &DawNet, caps: &ExploreCaps) -> ReachResult {
    solve(w, |w, s| w.is_final(s), caps)
}

/// Naive depth-first enumeration of every firing sequence up to `max_len`,
/// with no state deduplication. Exists to validate [`solve`] and is only
/// feasible on small instances; `budget` caps the number of visited path
/// prefixes.
pub fn brute_force_oracle<G>(
    w: &DawNet,
    goal: G,
    max_len: usize,
    budget: usize,
) -> Result<bool, SolverError>
where
    G: Fn(&DawNet, &State) -> bool,
{
    fn rec<G: Fn(&DawNet, &State) -> bool>(
        w: &DawNet,
        s: &State,
        goal: &G,
        remaining: usize,
        visited: &mut usize,
        budget: usize,
    ) -> Result<bool, SolverError> {
        *visited += 1;
        if *visited > budget {
            return Err(SolverError::OracleBudgetExceeded(budget));
        }
        if goal(w, s) {
            return Ok(true);
        }
        if remaining == 0 {
            return Ok(false);
        }
        for (_, _, succ) in w.successors(s) {
            if rec(w, &succ, goal, remaining - 1, visited, budget)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    let mut visited = 0usize;
    rec(w, &w.initial_state(), &goal, max_len, &mut visited, budget)
}

/// Shortest goal depth found by the naive enumeration, for minimality checks.
pub fn oracle_shortest_len<G>(
    w: &DawNet,
    goal: G,
    max_len: usize,
    budget: usize,
) -> Result<Option<usize>, SolverError>
where
    G: Fn(&DawNet, &State) -> bool,
{
    for len in 0..=max_len {
        if brute_force_oracle(w, &goal, len, budget)? {
            return Ok(Some(len));
        }
    }
    Ok(None)
}

/// Replays a witness from the initial state, checking every intermediate
/// state matches; returns the final state.
pub fn replay(w: &DawNet, witness: &[WitnessStep]) -> Result<State, crate::dawnet::DawNetError> {
    let mut s = w.initial_state();
    for step in witness {
        s = w.fire_data(&s, &step.transition, &step.choice)?;
        debug_assert_eq!(s, step.state, "witness states must replay exactly");
    }
    Ok(s)
}
