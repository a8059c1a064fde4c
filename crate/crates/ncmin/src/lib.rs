//! Minimizing the number of coding links needed to sustain a multicast
//! rate on a directed acyclic network.
//!
//! Interior nodes that merge two or more incoming links may transmit
//! combinations of their inputs; every outgoing link whose symbol depends
//! on several inputs is a coding link, and the goal is to keep the target
//! rate deliverable to every sink with as few of them as possible. The
//! search runs over link-state genotypes grouped into per-output blocks,
//! evaluated by per-sink max-flow on a decomposed graph, with a
//! generational GA, a post-run greedy sweep, two baseline reductions, and
//! an exhaustive oracle for small networks.

pub mod baselines;
pub mod engine;
pub mod error;
pub mod feasibility;
pub mod genotype;
pub mod harness;
pub mod layout;
pub mod netgraph;

pub use baselines::{exhaustive_min, minimal_linkstate, minimal_subgraph, BaselineResult};
pub use engine::{greedy_sweep, run_ga, tournament_select, GaConfig, GaVariant, RunResult};
pub use error::{Error, Result};
pub use feasibility::{evaluate, max_flow, EvalCounter, Evaluator, Fitness};
pub use genotype::{
    bts_states, crossover, format_genotype, init_population, is_bts_valid, mutate, parse_genotype,
    Encoding, Genotype, OperatorConfig, OperatorMode,
};
pub use harness::{
    paired_t_test, run_experiment, summarize, Algorithm, ExperimentSpec, RunRecord, SummaryRow,
};
pub use layout::{build_layout, decompose, search_space_log10, BlockLayout, FlowGraph};
pub use netgraph::{
    make_canonical, make_cascade, make_random_acyclic, parse_network, serialize_network,
    Canonical, GeneratorParams, Network,
};
