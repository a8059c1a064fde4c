//! Unit-capacity max-flow and the fitness function with evaluation
//! accounting.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::genotype::Genotype;
use crate::layout::{decompose, BlockLayout, FlowGraph};
use crate::netgraph::Network;

/// Fitness of a genotype. `Feasible(c)` counts the blocks with two or more
/// active links; any feasible value compares below `Infeasible`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fitness {
    Feasible(u32),
    Infeasible,
}

impl Fitness {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Fitness::Feasible(_))
    }

    pub fn coding_blocks(&self) -> Option<u32> {
        match self {
            Fitness::Feasible(c) => Some(*c),
            Fitness::Infeasible => None,
        }
    }
}

impl std::fmt::Display for Fitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Fitness::Feasible(c) => write!(f, "{c}"),
            Fitness::Infeasible => write!(f, "inf"),
        }
    }
}

/// Budgeted evaluation counter. Increments are atomic so evaluations of
/// distinct genotypes may proceed concurrently.
#[derive(Debug)]
pub struct EvalCounter {
    used: AtomicU64,
    budget: u64,
}

impl EvalCounter {
    pub fn new(budget: u64) -> Self {
        EvalCounter {
            used: AtomicU64::new(0),
            budget,
        }
    }

    /// A counter that never exhausts, for uncounted bookkeeping such as the
    /// greedy sweep.
    pub fn unbounded() -> Self {
        EvalCounter::new(u64::MAX)
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn remaining(&self) -> u64 {
        self.budget.saturating_sub(self.used())
    }

    /// Claims one evaluation, failing when the budget is spent.
    pub fn try_consume(&self) -> Result<()> {
        let mut current = self.used.load(Ordering::Relaxed);
        loop {
            if current >= self.budget {
                return Err(Error::BudgetExhausted(self.budget));
            }
            match self.used.compare_exchange_weak(
                current,
                current + 1,
                Ordering::Relaxed,
                Ordering::Relaxed,
            ) {
                Ok(_) => return Ok(()),
                Err(seen) => current = seen,
            }
        }
    }
}

/// Dinic's algorithm over paired forward/reverse arc slots. `limit` stops
/// augmenting early once that much flow is proven, which is all a
/// feasibility check needs.
#[derive(Debug, Clone)]
struct Dinic {
    to: Vec<u32>,
    cap: Vec<u32>,
    adj: Vec<Vec<u32>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(node_count: usize) -> Self {
        Dinic {
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); node_count],
            level: vec![-1; node_count],
            iter: vec![0; node_count],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize) -> usize {
        let idx = self.to.len();
        self.adj[from].push(idx as u32);
        self.to.push(to as u32);
        self.cap.push(1);
        self.adj[to].push(idx as u32 + 1);
        self.to.push(from as u32);
        self.cap.push(0);
        idx
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let a = a as usize;
                let v = self.to[a] as usize;
                if self.cap[a] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: u32) -> u32 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.adj[u].len() {
            let a = self.adj[u][self.iter[u]] as usize;
            let v = self.to[a] as usize;
            if self.cap[a] > 0 && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, t, pushed.min(self.cap[a]));
                if got > 0 {
                    self.cap[a] -= got;
                    self.cap[a ^ 1] += got;
                    return got;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize, limit: u32) -> u32 {
        if s == t {
            return 0;
        }
        let mut flow = 0;
        while flow < limit && self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let pushed = self.dfs(s, t, limit - flow);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
                if flow == limit {
                    break;
                }
            }
        }
        flow
    }
}

/// Exact max-flow between two nodes of a flow graph under unit capacities.
/// `from == to` is defined as 0.
pub fn max_flow(flowgraph: &FlowGraph, from: usize, to: usize) -> Result<u32> {
    let n = flowgraph.nodes.len();
    if from >= n {
        return Err(Error::UnknownFlowNode(from));
    }
    if to >= n {
        return Err(Error::UnknownFlowNode(to));
    }
    let mut dinic = Dinic::new(n);
    for &(a, b) in &flowgraph.arcs {
        dinic.add_arc(a, b);
    }
    Ok(dinic.max_flow(from, to, u32::MAX))
}

/// Min over sinks of the source-to-sink max-flow on the raw, undecomposed
/// network. This is the achievable multicast rate with coding everywhere.
pub fn network_min_maxflow(network: &Network) -> u32 {
    min_maxflow_with_edges(network, None)
}

/// Same as [`network_min_maxflow`] restricted to the edges marked `true`.
pub(crate) fn min_maxflow_with_edges(network: &Network, keep: Option<&[bool]>) -> u32 {
    let mut template = Dinic::new(network.node_count());
    for (e, &(a, b)) in network.edges().iter().enumerate() {
        if keep.map_or(true, |k| k[e]) {
            template.add_arc(a, b);
        }
    }
    let mut best = u32::MAX;
    for &t in network.sinks() {
        let mut dinic = template.clone();
        best = best.min(dinic.max_flow(network.source(), t, u32::MAX));
        if best == 0 {
            break;
        }
    }
    best
}

/// Number of blocks with two or more active links.
pub fn coding_block_count(layout: &BlockLayout, genotype: &Genotype) -> u32 {
    (0..layout.block_count())
        .filter(|&b| {
            layout
                .block_range(b)
                .filter(|&i| genotype.bit(i))
                .count()
                >= 2
        })
        .count() as u32
}

/// Evaluates one genotype: decomposes, then checks that every sink's
/// max-flow reaches the rate, stopping at the first failing sink. Consumes
/// exactly one unit of the evaluation budget.
pub fn evaluate(
    network: &Network,
    layout: &BlockLayout,
    genotype: &Genotype,
    counter: &EvalCounter,
) -> Result<Fitness> {
    counter.try_consume()?;
    let flowgraph = decompose(network, layout, genotype)?;
    let rate = network.rate();
    for &(_, terminal) in &flowgraph.terminals {
        let mut dinic = Dinic::new(flowgraph.nodes.len());
        for &(a, b) in &flowgraph.arcs {
            dinic.add_arc(a, b);
        }
        if dinic.max_flow(flowgraph.source, terminal, rate) < rate {
            return Ok(Fitness::Infeasible);
        }
    }
    Ok(Fitness::Feasible(coding_block_count(layout, genotype)))
}

/// Reusable evaluator over one immutable network and layout. Semantically
/// identical to [`evaluate`] but keeps the decomposed graph's structure and
/// buffers across calls, which matters inside the GA loop. Clone it to
/// evaluate concurrently from several threads.
#[derive(Debug, Clone)]
pub struct Evaluator {
    rate: u32,
    source: usize,
    terminals: Vec<usize>,
    dinic: Dinic,
    /// Capacities with all genotype-driven arcs closed.
    base_cap: Vec<u32>,
    /// Forward arc slot for each genotype bit.
    bit_arcs: Vec<usize>,
    /// Per-evaluation capacities after applying the genotype bits.
    geno_cap: Vec<u32>,
    block_ranges: Vec<std::ops::Range<usize>>,
}

impl Evaluator {
    pub fn new(network: &Network, layout: &BlockLayout) -> Result<Self> {
        // All-zero keeps every genotype-driven arc out of the static set.
        let zero = Genotype::all_zero(layout.genotype_length());
        let flowgraph = decompose(network, layout, &zero)?;
        let mut dinic = Dinic::new(flowgraph.nodes.len());
        for &(a, b) in &flowgraph.arcs {
            dinic.add_arc(a, b);
        }
        // Genotype arcs occupy fixed slots after the static ones; closed by
        // default (capacity 0) and opened per evaluation. In the all-one
        // decomposition they sit between the edge arcs and the terminal
        // arcs, in bit-index order.
        let one = Genotype::all_one(layout.genotype_length());
        let full = decompose(network, layout, &one)?;
        let edge_arcs = network.edge_count();
        let bit_count = layout.genotype_length();
        let mut bit_arcs = Vec::with_capacity(bit_count);
        for i in 0..bit_count {
            let (a, b) = full.arcs[edge_arcs + i];
            let slot = dinic.add_arc(a, b);
            dinic.cap[slot] = 0;
            bit_arcs.push(slot);
        }
        let base_cap = dinic.cap.clone();
        let block_ranges = (0..layout.block_count())
            .map(|b| layout.block_range(b))
            .collect();
        Ok(Evaluator {
            rate: network.rate(),
            source: flowgraph.source,
            terminals: flowgraph.terminals.iter().map(|&(_, t)| t).collect(),
            geno_cap: base_cap.clone(),
            base_cap,
            dinic,
            bit_arcs,
            block_ranges,
        })
    }

    pub fn genotype_length(&self) -> usize {
        self.bit_arcs.len()
    }

    /// Checks feasibility without touching any counter.
    pub fn is_feasible(&mut self, genotype: &Genotype) -> Result<bool> {
        if genotype.len() != self.bit_arcs.len() {
            return Err(Error::LengthMismatch {
                got: genotype.len(),
                expected: self.bit_arcs.len(),
            });
        }
        self.geno_cap.copy_from_slice(&self.base_cap);
        for (bit, &slot) in self.bit_arcs.iter().enumerate() {
            if genotype.bit(bit) {
                self.geno_cap[slot] = 1;
            }
        }
        for i in 0..self.terminals.len() {
            let terminal = self.terminals[i];
            self.dinic.cap.copy_from_slice(&self.geno_cap);
            if self.dinic.max_flow(self.source, terminal, self.rate) < self.rate {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same contract as the free [`evaluate`] function.
    pub fn evaluate(&mut self, genotype: &Genotype, counter: &EvalCounter) -> Result<Fitness> {
        counter.try_consume()?;
        if !self.is_feasible(genotype)? {
            return Ok(Fitness::Infeasible);
        }
        let mut coding = 0;
        for range in &self.block_ranges {
            if range.clone().filter(|&i| genotype.bit(i)).count() >= 2 {
                coding += 1;
            }
        }
        Ok(Fitness::Feasible(coding))
    }
}
