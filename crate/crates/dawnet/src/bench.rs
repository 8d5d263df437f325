//! Bundled models and the synthetic benchmark generator: the LoanRequest
//! net, the core model K and its replica compositions M1-M5, and the eight
//! trace archetypes at five completeness levels.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::data_model::{int_set, str_set, DataModel, Domain, Value};
use crate::dawnet::{DawNet, WriteSpec};
use crate::guard::{GuardExpr, Term};
use crate::trace::{Event, Trace};

/// The LoanRequest model, bundled at a scaled-down active domain so the
/// reachability graph stays at desk scale. The full 0..500k ranges remain
/// loadable from a model file.
pub fn loan_model() -> DawNet {
    let money: Vec<i64> = vec![
        0, 1000, 3000, 5000, 30000, 50000, 60000, 99999, 100000, 500000,
    ];
    let student_money: Vec<i64> = money.iter().copied().filter(|&v| v <= 30000).collect();
    let net = crate::core_net::PetriNet::new(
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
    .expect("loan net is well-formed");
    let data = DataModel::new(vec![
        ("loanType".into(), Domain::unordered(str_set(["w", "s"]))),
        (
            "request".into(),
            Domain::int_ordered(int_set(money.iter().copied())),
        ),
        (
            "loan".into(),
            Domain::int_ordered(int_set(money.iter().copied())),
        ),
    ]);
    let writes: BTreeMap<String, WriteSpec> = [
        (
            "T1".to_string(),
            WriteSpec::from([("loanType".to_string(), str_set(["s", "w"]))]),
        ),
        (
            "T4".to_string(),
            WriteSpec::from([
                ("request".to_string(), int_set(student_money.iter().copied())),
                ("loan".to_string(), int_set(student_money.iter().copied())),
            ]),
        ),
        (
            "T5".to_string(),
            WriteSpec::from([
                ("request".to_string(), int_set(money.iter().copied())),
                ("loan".to_string(), int_set(money.iter().copied())),
            ]),
        ),
    ]
    .into();
    let eq = |v: &str, c: &str| GuardExpr::Eq(v.into(), Term::Const(Value::Str(c.into())));
    let leq = |v: &str, c: i64| GuardExpr::Leq(Term::Var(v.into()), Term::Const(Value::Int(c)));
    let geq = |c: i64, v: &str| GuardExpr::Leq(Term::Const(Value::Int(c)), Term::Var(v.into()));
    let guards: BTreeMap<String, GuardExpr> = [
        ("T2".to_string(), eq("loanType", "s")),
        ("T3".to_string(), eq("loanType", "w")),
        ("T6".to_string(), leq("request", 5000)),
        // The figure's informal "else" branch written out explicitly.
        (
            "T7".to_string(),
            leq("request", 5000).negate().and(geq(100000, "request").negate()),
        ),
        ("T8".to_string(), leq("request", 99999).negate()),
    ]
    .into();
    DawNet::new(net, data, writes, guards).expect("loan model is valid")
}

/// Composition operator for replicas of the core model K.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composition {
    Sequence,
    Parallel,
    Xor,
}

impl std::fmt::Display for Composition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Composition::Sequence => "sequence",
            Composition::Parallel => "parallel",
            Composition::Xor => "xor",
        })
    }
}

/// The eight synthetic trace archetypes: four compliant, four not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TraceType {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
}

impl TraceType {
    pub const ALL: [TraceType; 8] = [
        TraceType::T1,
        TraceType::T2,
        TraceType::T3,
        TraceType::T4,
        TraceType::T5,
        TraceType::T6,
        TraceType::T7,
        TraceType::T8,
    ];

    pub fn compliant(self) -> bool {
        matches!(self, TraceType::T1 | TraceType::T2 | TraceType::T3 | TraceType::T4)
    }

    /// Number of times the I/L loop body repeats beyond the mandatory pass.
    pub fn loop_iterations(self) -> usize {
        match self {
            TraceType::T1 | TraceType::T2 | TraceType::T5 | TraceType::T7 => 0,
            _ => 2,
        }
    }

    /// Whether the branch after M is forced by the values written at A.
    pub fn deterministic(self) -> bool {
        !matches!(self, TraceType::T2 | TraceType::T4)
    }

    /// Injects a control-flow violation (both exclusive branches observed).
    fn control_flow_violation(self) -> bool {
        matches!(self, TraceType::T5 | TraceType::T6)
    }

    /// Injects a data violation (a branch whose guard the written data
    /// disables).
    fn data_violation(self) -> bool {
        matches!(self, TraceType::T7 | TraceType::T8)
    }
}

impl std::fmt::Display for TraceType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "T{}", *self as usize + 1)
    }
}

impl std::str::FromStr for TraceType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TraceType::ALL
            .iter()
            .copied()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| format!("unknown trace type '{s}' (expected T1..T8)"))
    }
}

/// A benchmark instance description: how many replicas of K, how they are
/// composed, which trace archetype, and the completeness percentage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchSpec {
    pub replicas: usize,
    pub composition: Composition,
    pub trace_type: TraceType,
    /// One of 0, 25, 50, 75, 100.
    pub completeness: u8,
}

/// The five preset models of the synthetic evaluation.
pub fn model_preset(name: &str) -> Option<(usize, Composition)> {
    match name {
        "M1" => Some((1, Composition::Sequence)),
        "M2" => Some((2, Composition::Sequence)),
        "M3" => Some((2, Composition::Parallel)),
        "M4" => Some((3, Composition::Sequence)),
        "M5" => Some((3, Composition::Xor)),
        _ => None,
    }
}

fn suffix(replica: usize, total: usize) -> String {
    if total == 1 {
        String::new()
    } else {
        format!("_k{replica}")
    }
}

struct KFragment {
    places: Vec<String>,
    transitions: Vec<String>,
    arcs: Vec<(String, String)>,
    variables: Vec<(String, Domain)>,
    writes: BTreeMap<String, WriteSpec>,
    guards: BTreeMap<String, GuardExpr>,
}

/// One replica of the core model K between `entry` and `exit` places: an
/// exclusive choice B/C-D/E, a three-way parallel split at F with the I/L
/// loop guarded on `number`, and a guarded three-way branch N/O/P after M.
fn k_fragment(s: &str, entry: &str, exit: &str) -> KFragment {
    let p = |name: &str| format!("{name}{s}");
    let places: Vec<String> = (1..=15).map(|i| p(&format!("p{i}"))).collect();
    let names = [
        "A", "B", "C", "D", "E", "F", "G", "H", "I", "L", "M", "N", "O", "P", "R", "S", "T", "U",
    ];
    let transitions: Vec<String> = names.iter().map(|n| p(n)).collect();
    let arcs: Vec<(String, String)> = vec![
        (entry.to_string(), p("A")),
        (p("A"), p("p1")),
        (p("p1"), p("B")),
        (p("p1"), p("C")),
        (p("B"), p("p2")),
        (p("C"), p("p3")),
        (p("p2"), p("D")),
        (p("p3"), p("E")),
        (p("D"), p("p4")),
        (p("E"), p("p4")),
        (p("p4"), p("F")),
        (p("F"), p("p5")),
        (p("F"), p("p6")),
        (p("F"), p("p7")),
        (p("p5"), p("G")),
        (p("p6"), p("H")),
        (p("p7"), p("I")),
        (p("G"), p("p8")),
        (p("H"), p("p9")),
        (p("I"), p("p10")),
        (p("p10"), p("L")),
        (p("L"), p("p7")),
        (p("p8"), p("M")),
        (p("p9"), p("M")),
        (p("p10"), p("M")),
        (p("M"), p("p11")),
        (p("p11"), p("N")),
        (p("p11"), p("O")),
        (p("p11"), p("P")),
        (p("N"), p("p12")),
        (p("O"), p("p13")),
        (p("P"), p("p14")),
        (p("p12"), p("R")),
        (p("p13"), p("S")),
        (p("p14"), p("T")),
        (p("R"), p("p15")),
        (p("S"), p("p15")),
        (p("T"), p("p15")),
        (p("p15"), p("U")),
        (p("U"), exit.to_string()),
    ];
    let variables = vec![
        (p("number"), Domain::int_ordered(int_set([4, 5]))),
        (p("first"), Domain::int_ordered(int_set([1, 2]))),
        (p("second"), Domain::int_ordered(int_set([2, 3]))),
        (p("third"), Domain::int_ordered(int_set([3, 4]))),
        (p("fourth"), Domain::int_ordered(int_set([0]))),
        (p("fifth"), Domain::int_ordered(int_set([0]))),
    ];
    let writes: BTreeMap<String, WriteSpec> = [
        (
            p("A"),
            WriteSpec::from([
                (p("first"), int_set([1, 2])),
                (p("second"), int_set([2, 3])),
                (p("third"), int_set([3, 4])),
                (p("fourth"), int_set([0])),
            ]),
        ),
        (p("I"), WriteSpec::from([(p("number"), int_set([4, 5]))])),
        (p("G"), WriteSpec::from([(p("fifth"), int_set([0]))])),
    ]
    .into();
    let eq = |v: String, c: i64| GuardExpr::Eq(v, Term::Const(Value::Int(c)));
    let guards: BTreeMap<String, GuardExpr> = [
        (p("L"), eq(p("number"), 5).negate()),
        (p("M"), eq(p("number"), 5)),
        (p("N"), eq(p("first"), 1)),
        (p("O"), eq(p("second"), 2)),
        (p("P"), eq(p("third"), 3)),
    ]
    .into();
    KFragment {
        places,
        transitions,
        arcs,
        variables,
        writes,
        guards,
    }
}

/// Builds the benchmark model with `n` replicas of K under `composition`.
/// Replicas never share variables. For `Xor` with `n` replicas, one branch
/// concatenates the first `n - 1` replicas and the other holds the last.
pub fn bench_model(n: usize, composition: Composition) -> DawNet {
    assert!(n >= 1, "at least one replica");
    let mut places = vec!["start".to_string(), "end".to_string()];
    let mut transitions = Vec::new();
    let mut arcs = Vec::new();
    let mut variables = Vec::new();
    let mut writes = BTreeMap::new();
    let mut guards = BTreeMap::new();
    let add = |frag: KFragment,
                   places: &mut Vec<String>,
                   transitions: &mut Vec<String>,
                   arcs: &mut Vec<(String, String)>,
                   variables: &mut Vec<(String, Domain)>,
                   writes: &mut BTreeMap<String, WriteSpec>,
                   guards: &mut BTreeMap<String, GuardExpr>| {
        places.extend(frag.places);
        transitions.extend(frag.transitions);
        arcs.extend(frag.arcs);
        variables.extend(frag.variables);
        writes.extend(frag.writes);
        guards.extend(frag.guards);
    };
    match composition {
        Composition::Sequence => {
            for i in 0..n {
                let entry = if i == 0 {
                    "start".to_string()
                } else {
                    format!("link{i}")
                };
                let exit = if i == n - 1 {
                    "end".to_string()
                } else {
                    let link = format!("link{}", i + 1);
                    places.push(link.clone());
                    link
                };
                let frag = k_fragment(&suffix(i, n), &entry, &exit);
                add(
                    frag,
                    &mut places,
                    &mut transitions,
                    &mut arcs,
                    &mut variables,
                    &mut writes,
                    &mut guards,
                );
            }
        }
        Composition::Parallel => {
            transitions.push("t_split".to_string());
            transitions.push("t_join".to_string());
            arcs.push(("start".to_string(), "t_split".to_string()));
            arcs.push(("t_join".to_string(), "end".to_string()));
            for i in 0..n {
                let entry = format!("in{i}");
                let exit = format!("out{i}");
                places.push(entry.clone());
                places.push(exit.clone());
                arcs.push(("t_split".to_string(), entry.clone()));
                arcs.push((exit.clone(), "t_join".to_string()));
                let frag = k_fragment(&suffix(i, n), &entry, &exit);
                add(
                    frag,
                    &mut places,
                    &mut transitions,
                    &mut arcs,
                    &mut variables,
                    &mut writes,
                    &mut guards,
                );
            }
        }
        Composition::Xor => {
            // Branch one: replicas 0..n-1 in sequence; branch two: the last.
            let first_branch = n.max(2) - 1;
            for i in 0..first_branch {
                let entry = if i == 0 {
                    "start".to_string()
                } else {
                    format!("link{i}")
                };
                let exit = if i == first_branch - 1 {
                    "end".to_string()
                } else {
                    let link = format!("link{}", i + 1);
                    places.push(link.clone());
                    link
                };
                let frag = k_fragment(&suffix(i, n), &entry, &exit);
                add(
                    frag,
                    &mut places,
                    &mut transitions,
                    &mut arcs,
                    &mut variables,
                    &mut writes,
                    &mut guards,
                );
            }
            if n >= 2 {
                let frag = k_fragment(&suffix(n - 1, n), "start", "end");
                add(
                    frag,
                    &mut places,
                    &mut transitions,
                    &mut arcs,
                    &mut variables,
                    &mut writes,
                    &mut guards,
                );
            }
        }
    }
    let net = crate::core_net::PetriNet::new(places, transitions, arcs)
        .expect("bench net is well-formed");
    DawNet::new(net, DataModel::new(variables), writes, guards).expect("bench model is valid")
}

/// Replica indices the generated traces walk through.
fn trace_replicas(n: usize, composition: Composition) -> Vec<usize> {
    match composition {
        Composition::Sequence | Composition::Parallel => (0..n).collect(),
        Composition::Xor => (0..n.max(2) - 1).collect(),
    }
}

/// The full (100%) event list for one replica, plus the indices of the
/// violation core that event dropping must retain.
fn replica_events(s: &str, ty: TraceType) -> (Vec<Event>, Vec<usize>) {
    let p = |name: &str| format!("{name}{s}");
    let int = Value::Int;
    let mut events = Vec::new();
    let mut core = Vec::new();
    // A writes the branch selectors; T7/T8 pin values that disable every
    // branch the trace later claims to take.
    let (first, second) = if ty.data_violation() {
        (2, 3)
    } else if ty.deterministic() {
        (1, 3)
    } else {
        (1, 2)
    };
    if ty.data_violation() {
        core.push(events.len());
    }
    events.push(
        Event::new(p("A"))
            .with_write(p("first"), int(first))
            .with_write(p("second"), int(second))
            .with_write(p("third"), int(4))
            .with_write(p("fourth"), int(0)),
    );
    events.push(Event::new(p("B")));
    if ty.control_flow_violation() {
        core.push(events.len() - 1);
        core.push(events.len());
        events.push(Event::new(p("C")));
    }
    events.push(Event::new(p("D")));
    if ty.control_flow_violation() {
        events.push(Event::new(p("E")));
    }
    events.push(Event::new(p("F")));
    events.push(Event::new(p("G")).with_write(p("fifth"), int(0)));
    events.push(Event::new(p("H")));
    for _ in 0..ty.loop_iterations() {
        events.push(Event::new(p("I")).with_write(p("number"), int(4)));
        events.push(Event::new(p("L")));
    }
    events.push(Event::new(p("I")).with_write(p("number"), int(5)));
    events.push(Event::new(p("M")));
    // Branch: deterministic traces take N, nondeterministic ones take O
    // (both enabled); data-violating traces take N against first = 2.
    let (branch, after) = if ty.deterministic() {
        ("N", "R")
    } else {
        ("O", "S")
    };
    if ty.data_violation() {
        core.push(events.len());
    }
    events.push(Event::new(p(branch)));
    events.push(Event::new(p(after)));
    events.push(Event::new(p("U")));
    (events, core)
}

/// Deterministically generates the benchmark model and trace for `spec`.
/// Event dropping is seed-driven and, for non-compliant archetypes, always
/// retains the violating core so non-compliance is preserved at every
/// completeness level.
pub fn gen_bench(spec: &BenchSpec, seed: u64) -> (DawNet, Trace) {
    let model = bench_model(spec.replicas, spec.composition);
    let mut events = Vec::new();
    let mut core: BTreeSet<usize> = BTreeSet::new();
    for i in trace_replicas(spec.replicas, spec.composition) {
        let (mut evs, cor) = replica_events(&suffix(i, spec.replicas), spec.trace_type);
        for c in cor {
            core.insert(events.len() + c);
        }
        events.append(&mut evs);
    }
    let keep_count = (events.len() * usize::from(spec.completeness) + 50) / 100;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut droppable: Vec<usize> = (0..events.len()).filter(|i| !core.contains(i)).collect();
    droppable.shuffle(&mut rng);
    let keep_extra = keep_count.saturating_sub(core.len());
    let mut kept: BTreeSet<usize> = core;
    kept.extend(droppable.into_iter().take(keep_extra));
    let events = events
        .into_iter()
        .enumerate()
        .filter(|(i, _)| kept.contains(i))
        .map(|(_, e)| e)
        .collect();
    (model, Trace::new(events))
}
