//! Directed acyclic unit-capacity multigraphs with a multicast demand, plus
//! the canonical, cascade, and random generators and the text file format.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A directed acyclic multigraph with unit-capacity links, a single source,
/// a nonempty sink set, and a target multicast rate. Edge identity is the
/// position in the edge list; parallel edges are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    source: usize,
    sinks: Vec<usize>,
    rate: u32,
}

impl Network {
    /// Validates the invariants: endpoints in range, acyclic edge relation,
    /// nonempty sink set not containing the source, rate at least 1.
    pub fn new(
        node_count: usize,
        edges: Vec<(usize, usize)>,
        source: usize,
        mut sinks: Vec<usize>,
        rate: u32,
    ) -> Result<Self> {
        if source >= node_count {
            return Err(Error::InvalidNetwork(format!(
                "source {source} out of range for {node_count} nodes"
            )));
        }
        sinks.sort_unstable();
        sinks.dedup();
        if sinks.is_empty() {
            return Err(Error::InvalidNetwork("empty sink set".into()));
        }
        if let Some(&bad) = sinks.iter().find(|&&t| t >= node_count) {
            return Err(Error::InvalidNetwork(format!(
                "sink {bad} out of range for {node_count} nodes"
            )));
        }
        if sinks.contains(&source) {
            return Err(Error::InvalidNetwork(format!(
                "source {source} is also a sink"
            )));
        }
        if rate == 0 {
            return Err(Error::InvalidNetwork("rate must be at least 1".into()));
        }
        for &(a, b) in &edges {
            if a >= node_count || b >= node_count {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({a}, {b}) out of range for {node_count} nodes"
                )));
            }
        }
        let net = Network {
            node_count,
            edges,
            source,
            sinks,
            rate,
        };
        if net.topological_order().is_none() {
            return Err(Error::InvalidNetwork("edge relation is cyclic".into()));
        }
        Ok(net)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    /// Sink node ids, sorted ascending.
    pub fn sinks(&self) -> &[usize] {
        &self.sinks
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.sinks.binary_search(&v).is_ok()
    }

    pub fn rate(&self) -> u32 {
        self.rate
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(_, b)| b == v).count()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, _)| a == v).count()
    }

    /// Ids of edges entering `v`, ascending.
    pub fn incoming_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].1 == v)
            .collect()
    }

    /// Ids of edges leaving `v`, ascending.
    pub fn outgoing_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].0 == v)
            .collect()
    }

    /// A node is merging when it has two or more incoming links.
    pub fn is_merging(&self, v: usize) -> bool {
        self.in_degree(v) >= 2
    }

    /// Kahn's algorithm; `None` when the edge relation has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.node_count];
        for &(_, b) in &self.edges {
            indeg[b] += 1;
        }
        let mut queue: Vec<usize> = (0..self.node_count).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.node_count);
        while let Some(v) = queue.pop() {
            order.push(v);
            for &(a, b) in &self.edges {
                if a == v {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        queue.push(b);
                    }
                }
            }
        }
        (order.len() == self.node_count).then_some(order)
    }
}

/// Parameters for [`make_random_acyclic`]. Output is deterministic in `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GeneratorParams {
    pub node_count: usize,
    pub edge_count: usize,
    pub layer_count: usize,
    pub sink_count: usize,
    pub rate: u32,
    pub seed: u64,
}

impl GeneratorParams {
    fn validate(&self) -> Result<()> {
        if self.node_count < 2 {
            return Err(Error::InvalidParams("need at least 2 nodes".into()));
        }
        if self.layer_count < 2 {
            return Err(Error::InvalidParams("need at least 2 layers".into()));
        }
        if self.edge_count + 1 < self.node_count {
            return Err(Error::InvalidParams(format!(
                "edge_count {} < node_count - 1 = {}",
                self.edge_count,
                self.node_count - 1
            )));
        }
        if self.sink_count == 0 {
            return Err(Error::InvalidParams("need at least one sink".into()));
        }
        if self.rate == 0 {
            return Err(Error::InvalidParams("rate must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parses the line-oriented network file format.
///
/// Directives: `nodes <n>`, `source <id>`, `sinks <id> [<id> ...]`,
/// `rate <R>`, and one `edge <tail> <head>` line per edge. Edge id is the
/// 0-based order of the `edge` lines. `#` starts a comment.
pub fn parse_network(text: &str) -> Result<Network> {
    let mut node_count: Option<usize> = None;
    let mut source: Option<usize> = None;
    let mut sinks: Option<Vec<usize>> = None;
    let mut rate: Option<u32> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut edge_lines: Vec<usize> = Vec::new();
    let mut last_line = 0;

    let err = |line: usize, message: String| Error::Parse { line, message };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let directive = parts.next().unwrap();
        let args: Vec<&str> = parts.collect();
        let parse_usize = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(line_no, format!("malformed integer `{s}`")))
        };
        match directive {
            "nodes" => {
                if node_count.is_some() {
                    return Err(err(line_no, "duplicate `nodes` declaration".into()));
                }
                if args.len() != 1 {
                    return Err(err(line_no, "expected `nodes <n>`".into()));
                }
                node_count = Some(parse_usize(args[0])?);
            }
            "source" => {
                if source.is_some() {
                    return Err(err(line_no, "duplicate `source` declaration".into()));
                }
                if args.len() != 1 {
                    return Err(err(line_no, "expected `source <id>`".into()));
                }
                source = Some(parse_usize(args[0])?);
            }
            "sinks" => {
                if sinks.is_some() {
                    return Err(err(line_no, "duplicate `sinks` declaration".into()));
                }
                if args.is_empty() {
                    return Err(err(line_no, "expected `sinks <id> [<id> ...]`".into()));
                }
                let ids = args
                    .iter()
                    .map(|s| parse_usize(s))
                    .collect::<Result<Vec<_>>>()?;
                sinks = Some(ids);
            }
            "rate" => {
                if rate.is_some() {
                    return Err(err(line_no, "duplicate `rate` declaration".into()));
                }
                if args.len() != 1 {
                    return Err(err(line_no, "expected `rate <R>`".into()));
                }
                rate = Some(
                    args[0]
                        .parse::<u32>()
                        .map_err(|_| err(line_no, format!("malformed integer `{}`", args[0])))?,
                );
            }
            "edge" => {
                if args.len() != 2 {
                    return Err(err(line_no, "expected `edge <tail> <head>`".into()));
                }
                let a = parse_usize(args[0])?;
                let b = parse_usize(args[1])?;
                if let Some(n) = node_count {
                    if a >= n || b >= n {
                        return Err(err(line_no, format!("dangling node id in edge ({a}, {b})")));
                    }
                }
                edges.push((a, b));
                edge_lines.push(line_no);
            }
            other => {
                return Err(err(line_no, format!("unknown directive `{other}`")));
            }
        }
    }

    let node_count =
        node_count.ok_or_else(|| err(last_line, "missing `nodes` declaration".into()))?;
    let source = source.ok_or_else(|| err(last_line, "missing `source` declaration".into()))?;
    let sinks = sinks.ok_or_else(|| err(last_line, "missing `sinks` declaration".into()))?;
    let rate = rate.ok_or_else(|| err(last_line, "missing `rate` declaration".into()))?;

    // The `nodes` line may come after some edges; re-check every endpoint.
    for (e, &(a, b)) in edges.iter().enumerate() {
        if a >= node_count || b >= node_count {
            return Err(err(
                edge_lines[e],
                format!("dangling node id in edge ({a}, {b})"),
            ));
        }
    }
    if source >= node_count {
        return Err(err(last_line, format!("dangling node id {source} (source)")));
    }
    if let Some(&bad) = sinks.iter().find(|&&t| t >= node_count) {
        return Err(err(last_line, format!("dangling node id {bad} (sink)")));
    }

    // Attribute a cycle to the first edge line whose endpoints both sit in
    // the cyclic residue left by Kahn peeling.
    let mut indeg = vec![0usize; node_count];
    for &(_, b) in &edges {
        indeg[b] += 1;
    }
    let mut queue: Vec<usize> = (0..node_count).filter(|&v| indeg[v] == 0).collect();
    let mut peeled = vec![false; node_count];
    while let Some(v) = queue.pop() {
        peeled[v] = true;
        for &(a, b) in &edges {
            if a == v {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    queue.push(b);
                }
            }
        }
    }
    if peeled.iter().any(|&p| !p) {
        let culprit = edges
            .iter()
            .position(|&(a, b)| !peeled[a] && !peeled[b])
            .expect("a cycle contains an edge between unpeeled nodes");
        return Err(err(edge_lines[culprit], "cyclic graph".into()));
    }

    Network::new(node_count, edges, source, sinks, rate)
}

/// Canonical text form; `parse_network(serialize_network(n)) == n`.
pub fn serialize_network(network: &Network) -> String {
    let mut out = String::new();
    out.push_str(&format!("nodes {}\n", network.node_count));
    out.push_str(&format!("source {}\n", network.source));
    let sink_list: Vec<String> = network.sinks.iter().map(|t| t.to_string()).collect();
    out.push_str(&format!("sinks {}\n", sink_list.join(" ")));
    out.push_str(&format!("rate {}\n", network.rate));
    for &(a, b) in &network.edges {
        out.push_str(&format!("edge {a} {b}\n"));
    }
    out
}

/// The two canonical butterfly networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Canonical {
    /// The classic butterfly: rate 2 needs coding at the single bottleneck.
    B,
    /// The butterfly with a doubled bottleneck link: rate 2 needs no coding.
    BPrime,
}

/// Nodes are s=0, u=1, v=2, z=3, w=4, t1=5, t2=6. `BPrime` carries two
/// parallel z->w links where `B` has one.
pub fn make_canonical(which: Canonical) -> Network {
    let (s, u, v, z, w, t1, t2) = (0, 1, 2, 3, 4, 5, 6);
    let mut edges = vec![(s, u), (s, v), (u, t1), (v, t2), (u, z), (v, z), (z, w)];
    if which == Canonical::BPrime {
        edges.push((z, w));
    }
    edges.extend([(w, t1), (w, t2)]);
    Network::new(7, edges, s, vec![t1, t2], 2).expect("canonical network is valid")
}

/// Splices `copies` copies of the doubled butterfly into a full binary tree:
/// each non-leaf copy's sinks become the source nodes of its two children,
/// keeping the absorbed sink as one node that carries the parent's two
/// incoming links and the child's two source-out links.
///
/// `copies` must be `2^d - 1` for some `d >= 1`. The result has rate 2 and
/// one sink per leaf-copy sink node.
pub fn make_cascade(copies: usize) -> Result<Network> {
    if copies == 0 || (copies + 1) & copies != 0 {
        return Err(Error::InvalidParams(format!(
            "cascade size must be 2^d - 1, got {copies}"
        )));
    }
    // Copy 0 is the root; copy c has children 2c+1 and 2c+2.
    let mut source_of = vec![0usize; copies];
    let mut edges = Vec::with_capacity(10 * copies);
    let mut sinks = Vec::new();
    let mut next_node = 1; // node 0 is the root copy's source
    for c in 0..copies {
        let s = source_of[c];
        let (u, v, z, w, t1, t2) = (
            next_node,
            next_node + 1,
            next_node + 2,
            next_node + 3,
            next_node + 4,
            next_node + 5,
        );
        next_node += 6;
        edges.extend([
            (s, u),
            (s, v),
            (u, t1),
            (v, t2),
            (u, z),
            (v, z),
            (z, w),
            (z, w),
            (w, t1),
            (w, t2),
        ]);
        let (left, right) = (2 * c + 1, 2 * c + 2);
        if left < copies {
            source_of[left] = t1;
            source_of[right] = t2;
        } else {
            sinks.push(t1);
            sinks.push(t2);
        }
    }
    Network::new(next_node, edges, 0, sinks, 2)
}

const GENERATOR_ATTEMPTS: usize = 100;

/// Layered random acyclic multigraph: the source alone in layer 0, sinks in
/// the last layer, every edge from a lower to a strictly higher layer, every
/// node reachable from the source. Regenerates until the min-over-sinks
/// max-flow reaches `rate`, then fails after a bounded number of attempts.
pub fn make_random_acyclic(params: &GeneratorParams) -> Result<Network> {
    params.validate()?;
    let n = params.node_count;
    let n_layers = params.layer_count;

    // Layer 0 holds only the source; the rest are split as evenly as possible.
    let others = n - 1;
    let spread = n_layers - 1;
    if others < spread {
        return Err(Error::InvalidParams(format!(
            "{n} nodes cannot fill {n_layers} layers"
        )));
    }
    let base = others / spread;
    let extra = others % spread;
    let mut layer_of = vec![0usize; n];
    let mut next = 1;
    let mut last_layer_nodes = Vec::new();
    for l in 1..n_layers {
        let size = base + usize::from(l <= extra);
        for _ in 0..size {
            layer_of[next] = l;
            if l == n_layers - 1 {
                last_layer_nodes.push(next);
            }
            next += 1;
        }
    }
    if last_layer_nodes.len() < params.sink_count {
        return Err(Error::InvalidParams(format!(
            "sink_count {} exceeds last-layer capacity {}",
            params.sink_count,
            last_layer_nodes.len()
        )));
    }
    let sinks: Vec<usize> = last_layer_nodes
        .iter()
        .rev()
        .take(params.sink_count)
        .copied()
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..GENERATOR_ATTEMPTS {
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(params.edge_count);
        let lower_of = |v: usize| -> Vec<usize> {
            (0..n).filter(|&u| layer_of[u] < layer_of[v]).collect()
        };
        // One incoming edge per non-source node guarantees reachability.
        for v in 1..n {
            let lower = lower_of(v);
            edges.push((lower[rng.random_range(0..lower.len())], v));
        }
        // The source needs out-degree >= rate and each sink in-degree
        // >= rate before the min max-flow can reach the rate.
        let rate = params.rate as usize;
        let deg = |edges: &[(usize, usize)], v: usize, outgoing: bool| {
            edges
                .iter()
                .filter(|&&(a, b)| if outgoing { a == v } else { b == v })
                .count()
        };
        while deg(&edges, 0, true) < rate && edges.len() < params.edge_count {
            edges.push((0, 1 + rng.random_range(0..n - 1)));
        }
        for &t in &sinks {
            let lower = lower_of(t);
            while deg(&edges, t, false) < rate && edges.len() < params.edge_count {
                edges.push((lower[rng.random_range(0..lower.len())], t));
            }
        }
        while edges.len() < params.edge_count {
            let head = 1 + rng.random_range(0..n - 1);
            let lower = lower_of(head);
            edges.push((lower[rng.random_range(0..lower.len())], head));
        }
        let net = Network::new(n, edges, 0, sinks.clone(), params.rate)?;
        if crate::feasibility::network_min_maxflow(&net) >= params.rate {
            return Ok(net);
        }
    }
    Err(Error::GeneratorFailed {
        attempts: GENERATOR_ATTEMPTS,
        reason: format!(
            "could not reach min max-flow {} with {} edges",
            params.rate, params.edge_count
        ),
    })
}

/// Uniformly random edge order, used by the baseline algorithms.
pub(crate) fn shuffled_indices(count: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(rng);
    order
}
