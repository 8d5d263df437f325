//! A small stable-model finder for the timed programs the BC translation
//! produces: generate candidate interpretations by backtracking over fluent
//! cells and action atoms, then keep those that are stable under the
//! Gelfond-Lifschitz reduct.
//!
//! Candidates assign exactly one value per (fluent, time) cell and a boolean
//! per (action, time) atom; the existence/uniqueness scaffolding of the
//! translation makes every stable model take this shape, with the strong
//! negations of all sibling atoms present. Disjunctive heads only occur in
//! the head-cycle-free guessing pairs, so shifting them into normal rules
//! preserves the stable models.

use std::collections::BTreeMap;

use crate::encode::bc::{AspAtom, AspProgram, TimedLiteral};

/// A found stable model, reduced to its defining choices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StableModel {
    /// Value of each (fluent, time) cell.
    pub cells: BTreeMap<(String, usize), String>,
    /// Action atoms that are true, as (action, time).
    pub actions: Vec<(String, usize)>,
}

/// Positive or strong-negated ground literal, encoded for set arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Lit {
    neg: bool,
    atom: GroundAtom,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum GroundAtom {
    Cell { fluent: usize, time: usize, value: usize },
    Act { action: usize, time: usize },
}

struct Universe {
    fluents: Vec<(String, Vec<String>)>,
    actions: Vec<String>,
    horizon: usize,
}

impl Universe {
    fn fluent_index(&self, name: &str) -> Option<usize> {
        self.fluents.iter().position(|(f, _)| f == name)
    }

    fn value_index(&self, fluent: usize, value: &str) -> Option<usize> {
        self.fluents[fluent].1.iter().position(|v| v == value)
    }

    fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    fn ground(&self, l: &TimedLiteral) -> Option<Lit> {
        let atom = match &l.atom {
            AspAtom::Fluent { fluent, value } => {
                let f = self.fluent_index(fluent)?;
                let v = self.value_index(f, value)?;
                GroundAtom::Cell {
                    fluent: f,
                    time: l.time,
                    value: v,
                }
            }
            AspAtom::Action(a) => GroundAtom::Act {
                action: self.action_index(a)?,
                time: l.time,
            },
        };
        Some(Lit {
            neg: l.strong_neg,
            atom,
        })
    }
}

#[derive(Debug, Clone)]
struct Rule {
    head: Vec<Lit>,
    body_pos: Vec<Lit>,
    body_naf: Vec<Lit>,
}

/// The candidate under construction: one value choice per cell, one boolean
/// per action atom.
struct Candidate<'a> {
    u: &'a Universe,
    /// cells[f][i] = Some(value index).
    cells: Vec<Vec<Option<usize>>>,
    /// acts[a][i] = Some(true/false).
    acts: Vec<Vec<Option<bool>>>,
}

impl Candidate<'_> {
    /// Truth of a literal under the candidate: None when undetermined.
    fn eval(&self, l: &Lit) -> Option<bool> {
        let pos = match l.atom {
            GroundAtom::Cell { fluent, time, value } => {
                self.cells[fluent][time].map(|v| v == value)
            }
            GroundAtom::Act { action, time } => self.acts[action][time],
        }?;
        // The strong negation of an atom holds exactly when the atom does
        // not: sibling values carry the negation, chosen values reject it.
        Some(if l.neg { !pos } else { pos })
    }
}

fn rule_violated(c: &Candidate, r: &Rule) -> Option<bool> {
    // violated iff body all true, NAF all false (their literals true is
    // failure), and head all false. Undetermined parts make it unknown.
    let mut unknown = false;
    for l in &r.body_pos {
        match c.eval(l) {
            Some(false) => return Some(false),
            Some(true) => {}
            None => unknown = true,
        }
    }
    for l in &r.body_naf {
        match c.eval(l) {
            Some(true) => return Some(false),
            Some(false) => {}
            None => unknown = true,
        }
    }
    for l in &r.head {
        match c.eval(l) {
            Some(true) => return Some(false),
            Some(false) => {}
            None => unknown = true,
        }
    }
    if unknown {
        None
    } else {
        Some(true)
    }
}

/// Enumerates all stable models of `p`. Suitable only for the small timed
/// programs of the test suites; `max_models` caps the enumeration.
pub fn stable_models(p: &AspProgram, max_models: usize) -> Vec<StableModel> {
    let u = Universe {
        fluents: p.fluents.clone(),
        actions: p.actions.clone(),
        horizon: p.horizon,
    };
    let mut rules = Vec::new();
    for r in &p.rules {
        let head: Option<Vec<Lit>> = r.head.iter().map(|l| u.ground(l)).collect();
        let body_pos: Option<Vec<Lit>> = r.body_pos.iter().map(|l| u.ground(l)).collect();
        let body_naf: Option<Vec<Lit>> = r.body_naf.iter().map(|l| u.ground(l)).collect();
        let (Some(head), Some(body_pos), Some(body_naf)) = (head, body_pos, body_naf) else {
            // Atoms outside the universe cannot be derived: a rule with such
            // a body never fires; such a head slot is unsatisfiable.
            continue;
        };
        rules.push(Rule {
            head,
            body_pos,
            body_naf,
        });
    }

    // Decision slots: all (fluent, time) cells, then all (action, time).
    let mut slots: Vec<GroundAtom> = Vec::new();
    for time in 0..=u.horizon {
        for (a, _) in u.actions.iter().enumerate() {
            if time < u.horizon {
                slots.push(GroundAtom::Act { action: a, time });
            }
        }
        for (f, _) in u.fluents.iter().enumerate() {
            slots.push(GroundAtom::Cell {
                fluent: f,
                time,
                value: 0,
            });
        }
    }
    // Rules become checkable once their latest slot is assigned.
    let slot_rank = |atom: &GroundAtom| -> usize {
        slots
            .iter()
            .position(|s| match (s, atom) {
                (
                    GroundAtom::Cell { fluent: f1, time: t1, .. },
                    GroundAtom::Cell { fluent: f2, time: t2, .. },
                ) => f1 == f2 && t1 == t2,
                (a, b) => a == b,
            })
            .expect("atom maps to a slot")
    };
    // A rule is fully determined once the slot holding its latest atom is
    // assigned; check it right there.
    let mut by_rank: Vec<Vec<usize>> = vec![Vec::new(); slots.len()];
    for (ri, r) in rules.iter().enumerate() {
        let rank = r
            .head
            .iter()
            .chain(&r.body_pos)
            .chain(&r.body_naf)
            .map(|l| slot_rank(&l.atom))
            .max()
            .unwrap_or(0);
        by_rank[rank].push(ri);
    }

    let mut c = Candidate {
        u: &u,
        cells: u
            .fluents
            .iter()
            .map(|_| vec![None; u.horizon + 1])
            .collect(),
        acts: u.actions.iter().map(|_| vec![None; u.horizon]).collect(),
    };
    let mut out = Vec::new();
    search(&mut c, &rules, &by_rank, &slots, 0, &mut out, max_models);
    out.sort();
    out
}

#[allow(clippy::too_many_arguments)]
fn search(
    c: &mut Candidate,
    rules: &[Rule],
    by_rank: &[Vec<usize>],
    slots: &[GroundAtom],
    depth: usize,
    out: &mut Vec<StableModel>,
    max_models: usize,
) {
    if out.len() >= max_models {
        return;
    }
    if depth == slots.len() {
        if is_stable(c, rules) {
            out.push(extract(c));
        }
        return;
    }
    let choices: Vec<ChoiceSlot> = match slots[depth] {
        GroundAtom::Cell { fluent, time, .. } => (0..c.u.fluents[fluent].1.len())
            .map(|v| ChoiceSlot::Cell(fluent, time, v))
            .collect(),
        GroundAtom::Act { action, time } => vec![
            ChoiceSlot::Act(action, time, false),
            ChoiceSlot::Act(action, time, true),
        ],
    };
    for choice in choices {
        match choice {
            ChoiceSlot::Cell(f, t, v) => c.cells[f][t] = Some(v),
            ChoiceSlot::Act(a, t, b) => c.acts[a][t] = Some(b),
        }
        let ok = by_rank[depth]
            .iter()
            .all(|&ri| rule_violated(c, &rules[ri]) != Some(true));
        if ok {
            search(c, rules, by_rank, slots, depth + 1, out, max_models);
        }
    }
    match slots[depth] {
        GroundAtom::Cell { fluent, time, .. } => c.cells[fluent][time] = None,
        GroundAtom::Act { action, time } => c.acts[action][time] = None,
    }
}

enum ChoiceSlot {
    Cell(usize, usize, usize),
    Act(usize, usize, bool),
}

/// The literal closure of a total candidate: chosen atoms positively, all
/// sibling cell values strong-negated, actions or their negations.
fn closure(c: &Candidate) -> std::collections::HashSet<Lit> {
    let mut m = std::collections::HashSet::new();
    for (f, times) in c.cells.iter().enumerate() {
        for (t, v) in times.iter().enumerate() {
            let chosen = v.expect("total candidate");
            for value in 0..c.u.fluents[f].1.len() {
                m.insert(Lit {
                    neg: value != chosen,
                    atom: GroundAtom::Cell {
                        fluent: f,
                        time: t,
                        value,
                    },
                });
            }
        }
    }
    for (a, times) in c.acts.iter().enumerate() {
        for (t, b) in times.iter().enumerate() {
            m.insert(Lit {
                neg: !b.expect("total candidate"),
                atom: GroundAtom::Act { action: a, time: t },
            });
        }
    }
    m
}

/// Gelfond-Lifschitz check: the candidate's literal closure must be the
/// least model of the reduct of the shifted program.
fn is_stable(c: &Candidate, rules: &[Rule]) -> bool {
    let m = closure(c);
    let truth = |l: &Lit| m.contains(l);
    // Shift + reduct: disjunctive heads move all but one literal into NAF;
    // NAF literals true in M kill the rule, the rest vanish.
    let mut definite: Vec<(Lit, Vec<Lit>)> = Vec::new();
    for r in rules {
        if r.body_naf.iter().any(&truth) {
            continue;
        }
        match r.head.len() {
            0 => {
                // Constraint: classical satisfaction was already enforced
                // during search (body must not be all-true).
                if r.body_pos.iter().all(&truth) {
                    return false;
                }
            }
            _ => {
                for (i, h) in r.head.iter().enumerate() {
                    // Shifted rule for h: other head literals become NAF.
                    if r.head
                        .iter()
                        .enumerate()
                        .any(|(j, h2)| j != i && truth(h2))
                    {
                        continue;
                    }
                    definite.push((h.clone(), r.body_pos.clone()));
                }
            }
        }
    }
    // Least model by forward chaining.
    let mut derived: std::collections::HashSet<Lit> = std::collections::HashSet::new();
    let mut changed = true;
    while changed {
        changed = false;
        for (head, body) in &definite {
            if !derived.contains(head) && body.iter().all(|l| derived.contains(l)) {
                derived.insert(head.clone());
                changed = true;
            }
        }
    }
    derived == m
}

fn extract(c: &Candidate) -> StableModel {
    let mut cells = BTreeMap::new();
    for (f, times) in c.cells.iter().enumerate() {
        for (t, v) in times.iter().enumerate() {
            cells.insert(
                (c.u.fluents[f].0.clone(), t),
                c.u.fluents[f].1[v.expect("total")].clone(),
            );
        }
    }
    let mut actions = Vec::new();
    for (a, times) in c.acts.iter().enumerate() {
        for (t, b) in times.iter().enumerate() {
            if b.expect("total") {
                actions.push((c.u.actions[a].clone(), t));
            }
        }
    }
    StableModel { cells, actions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::bc::{encode_bc, translate_asp};

    #[test]
    fn single_transition_program_has_one_step_model() {
        let net = crate::core_net::PetriNet::new(
            vec!["s", "e"],
            vec!["t"],
            vec![("s", "t"), ("t", "e")],
        )
        .unwrap();
        let w = crate::dawnet::DawNet::new(
            net,
            crate::data_model::DataModel::default(),
            Default::default(),
            Default::default(),
        )
        .unwrap();
        let mut b = encode_bc(&w).unwrap();
        b.finally.clear();
        let p0 = translate_asp(&b, 0);
        let init_models = stable_models(&p0, 64);
        assert_eq!(init_models.len(), 1);
        assert_eq!(
            init_models[0].cells[&("s".to_string(), 0)],
            "true".to_string()
        );
        let p1 = translate_asp(&b, 1);
        let models = stable_models(&p1, 64);
        // One step: t fires (no empty steps thanks to the bookkeeping
        // fluent's missing inertia).
        assert_eq!(models.len(), 1);
        assert_eq!(models[0].actions, vec![("t".to_string(), 0)]);
        assert_eq!(models[0].cells[&("e".to_string(), 1)], "true".to_string());
        assert_eq!(models[0].cells[&("s".to_string(), 1)], "false".to_string());
    }

    #[test]
    fn finally_filters_models() {
        let net = crate::core_net::PetriNet::new(
            vec!["s", "m", "e"],
            vec!["t1", "t2"],
            vec![("s", "t1"), ("t1", "m"), ("m", "t2"), ("t2", "e")],
        )
        .unwrap();
        let w = crate::dawnet::DawNet::new(
            net,
            crate::data_model::DataModel::default(),
            Default::default(),
            Default::default(),
        )
        .unwrap();
        let b = encode_bc(&w).unwrap();
        // Horizon 1 cannot reach the sink.
        assert!(stable_models(&translate_asp(&b, 1), 64).is_empty());
        // Horizon 2 can.
        let models = stable_models(&translate_asp(&b, 2), 64);
        assert_eq!(models.len(), 1);
        assert_eq!(
            models[0].actions,
            vec![("t1".to_string(), 0), ("t2".to_string(), 1)]
        );
    }

    #[test]
    fn mutual_exclusion_blocks_parallel_actions() {
        // Two tokens would allow t1 and t2 together without the pairwise
        // constraints; the encoding forbids it.
        let net = crate::core_net::PetriNet::new(
            vec!["s", "a", "b", "e"],
            vec!["t0", "t1", "t2", "t3"],
            vec![
                ("s", "t0"),
                ("t0", "a"),
                ("t0", "b"),
                ("a", "t1"),
                ("b", "t2"),
                ("t1", "e"),
                ("t2", "e"),
                ("a", "t3"),
                ("b", "t3"),
                ("t3", "e"),
            ],
        )
        .unwrap();
        let w = crate::dawnet::DawNet::new(
            net,
            crate::data_model::DataModel::default(),
            Default::default(),
            Default::default(),
        )
        .unwrap();
        let mut b = encode_bc(&w).unwrap();
        b.finally.clear();
        let models = stable_models(&translate_asp(&b, 2), 256);
        for m in &models {
            let step0: Vec<_> = m.actions.iter().filter(|(_, t)| *t == 0).collect();
            let step1: Vec<_> = m.actions.iter().filter(|(_, t)| *t == 1).collect();
            assert_eq!(step0.len(), 1);
            assert_eq!(step1.len(), 1);
        }
    }
}
