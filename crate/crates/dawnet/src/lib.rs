//! Verification toolkit for data-aware workflow nets (DAW-nets).
//!
//! A DAW-net couples a workflow net with a finite data model: transitions
//! carry guards over process variables and write specifications that update
//! them. This crate decides reachability (clean termination), completes
//! partial execution traces by injecting them into the net, and compiles
//! reachability problems into three external-solver formats: a BC action
//! description with its ASP program translation, classical PDDL, and SMV.
//! Reference interpreters for the three target semantics back the test
//! suites that keep the encodings honest.

pub mod bench;
pub mod core_net;
pub mod data_model;
pub mod dawnet;
pub mod encode;
pub mod format;
pub mod guard;
pub mod ref_sem;
pub mod solver;
pub mod trace;

pub use crate::core_net::{Marking, PetriNet, WfNetCheck};
pub use crate::data_model::{Assignment, DataModel, Domain, Value};
pub use crate::dawnet::{DawNet, ReachGraph, State};
pub use crate::guard::GuardExpr;
pub use crate::solver::{ReachResult, Reachability};
pub use crate::trace::{Event, Trace, TraceWorkflow};
