//! Block structure over merging nodes, genotype-driven decomposition of the
//! network into a flow graph, and search-space sizes for both encodings.

use crate::error::{Error, Result};
use crate::genotype::Genotype;
use crate::netgraph::Network;

/// One block: the link-state variables of a single (merging node, outgoing
/// edge) pair. The i-th variable controls the i-th incoming edge (ascending
/// edge id) feeding that outgoing edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub node: usize,
    pub out_edge: usize,
    pub in_edges: Vec<usize>,
}

/// The mapping from (incoming edge, outgoing edge) pairs of merging nodes to
/// genotype bit positions. Blocks are ordered by (node id, outgoing edge id);
/// a block's length equals its owner's in-degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    blocks: Vec<Block>,
    block_offsets: Vec<usize>,
    genotype_length: usize,
}

impl BlockLayout {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn genotype_length(&self) -> usize {
        self.genotype_length
    }

    /// Start bit index of each block.
    pub fn block_offsets(&self) -> &[usize] {
        &self.block_offsets
    }

    pub fn block_len(&self, block: usize) -> usize {
        self.blocks[block].in_edges.len()
    }

    /// Bit index of variable `in_pos` within `block`.
    pub fn bit_index(&self, block: usize, in_pos: usize) -> usize {
        self.block_offsets[block] + in_pos
    }

    /// The bits of `block` within a genotype, as a range.
    pub fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        let start = self.block_offsets[block];
        start..start + self.block_len(block)
    }

    pub fn average_block_len(&self) -> f64 {
        if self.blocks.is_empty() {
            return 0.0;
        }
        self.genotype_length as f64 / self.blocks.len() as f64
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// One block per (merging node, outgoing edge) pair, nodes ascending, out
/// edges ascending, block variables by ascending incoming edge id. A network
/// without merging nodes yields an empty layout.
pub fn build_layout(network: &Network) -> BlockLayout {
    let mut blocks = Vec::new();
    let mut block_offsets = Vec::new();
    let mut offset = 0;
    for v in 0..network.node_count() {
        let in_edges = network.incoming_edges(v);
        if in_edges.len() < 2 {
            continue;
        }
        for out_edge in network.outgoing_edges(v) {
            block_offsets.push(offset);
            offset += in_edges.len();
            blocks.push(Block {
                node: v,
                out_edge,
                in_edges: in_edges.clone(),
            });
        }
    }
    BlockLayout {
        blocks,
        block_offsets,
        genotype_length: offset,
    }
}

/// Base-10 logs of the two search-space sizes: `2^m` for the binary link
/// state encoding and `prod(k_i + 2)` for the block transmission states.
pub fn search_space_log10(layout: &BlockLayout) -> (f64, f64) {
    let bls = layout.genotype_length() as f64 * 2f64.log10();
    let bts = layout
        .blocks()
        .iter()
        .map(|b| ((b.in_edges.len() + 2) as f64).log10())
        .sum();
    (bls, bts)
}

/// A node of the decomposed graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowNode {
    /// A non-merging node of the original network, passed through unchanged.
    Original(usize),
    /// The receiving end of one incoming edge of a merging node.
    InPort { node: usize, edge: usize },
    /// The sending end of one outgoing edge of a merging node.
    OutPort { node: usize, edge: usize },
    /// The virtual terminal collecting a sink's received units.
    Terminal(usize),
}

/// The decomposed graph: unit-capacity arcs, one virtual terminal per sink.
/// An in-port connects to an out-port exactly where the genotype bit for
/// that (incoming edge, outgoing edge) pair is 1.
#[derive(Debug, Clone)]
pub struct FlowGraph {
    pub nodes: Vec<FlowNode>,
    pub arcs: Vec<(usize, usize)>,
    pub source: usize,
    /// `(sink node id, terminal flow-node index)` per sink, ascending.
    pub terminals: Vec<(usize, usize)>,
}

impl FlowGraph {
    pub fn terminal_of(&self, sink: usize) -> Option<usize> {
        self.terminals
            .iter()
            .find(|&&(t, _)| t == sink)
            .map(|&(_, idx)| idx)
    }

    /// The original network viewed as a flow graph: no decomposition, each
    /// sink doubling as its own terminal.
    pub fn from_network(network: &Network) -> FlowGraph {
        let nodes = (0..network.node_count()).map(FlowNode::Original).collect();
        FlowGraph {
            nodes,
            arcs: network.edges().to_vec(),
            source: network.source(),
            terminals: network.sinks().iter().map(|&t| (t, t)).collect(),
        }
    }
}

/// Replaces every merging node by per-edge in-ports and out-ports, wiring
/// in-port to out-port where the genotype activates the pair. Sinks receive
/// through a virtual terminal fed by all of their in-ports (or by the sink
/// itself when it is not merging), so a sink's own decoding is never
/// constrained by its blocks.
pub fn decompose(network: &Network, layout: &BlockLayout, genotype: &Genotype) -> Result<FlowGraph> {
    if genotype.len() != layout.genotype_length() {
        return Err(Error::LengthMismatch {
            got: genotype.len(),
            expected: layout.genotype_length(),
        });
    }

    let n = network.node_count();
    let e = network.edge_count();
    let mut nodes = Vec::new();
    // Representative flow nodes for each original node / edge endpoint.
    let mut pass_node = vec![usize::MAX; n];
    let mut in_port = vec![usize::MAX; e]; // index by incoming edge id
    let mut out_port = vec![usize::MAX; e]; // index by outgoing edge id
    let mut merging = vec![false; n];

    for v in 0..n {
        let in_edges = network.incoming_edges(v);
        if in_edges.len() >= 2 {
            merging[v] = true;
            for edge in in_edges {
                in_port[edge] = nodes.len();
                nodes.push(FlowNode::InPort { node: v, edge });
            }
            for edge in network.outgoing_edges(v) {
                out_port[edge] = nodes.len();
                nodes.push(FlowNode::OutPort { node: v, edge });
            }
        } else {
            pass_node[v] = nodes.len();
            nodes.push(FlowNode::Original(v));
        }
    }

    let mut arcs = Vec::with_capacity(e + genotype.len() + network.sinks().len() * 2);
    // Original edges, redirected to ports where the endpoint is merging.
    for (edge, &(a, b)) in network.edges().iter().enumerate() {
        let from = if merging[a] { out_port[edge] } else { pass_node[a] };
        let to = if merging[b] { in_port[edge] } else { pass_node[b] };
        arcs.push((from, to));
    }
    // Active link states connect in-ports to out-ports.
    for (b, block) in layout.blocks().iter().enumerate() {
        for (i, &in_edge) in block.in_edges.iter().enumerate() {
            if genotype.bit(layout.bit_index(b, i)) {
                arcs.push((in_port[in_edge], out_port[block.out_edge]));
            }
        }
    }
    // Virtual terminals.
    let mut terminals = Vec::with_capacity(network.sinks().len());
    for &t in network.sinks() {
        let terminal = nodes.len();
        nodes.push(FlowNode::Terminal(t));
        if merging[t] {
            for edge in network.incoming_edges(t) {
                arcs.push((in_port[edge], terminal));
            }
        } else {
            arcs.push((pass_node[t], terminal));
        }
        terminals.push((t, terminal));
    }

    let source = network.source();
    let source_idx = if merging[source] {
        // A merging source receives no flow; route from its first in-port
        // would be wrong, so refuse the degenerate case explicitly.
        return Err(Error::InvalidNetwork(
            "source with in-degree >= 2 is not supported".into(),
        ));
    } else {
        pass_node[source]
    };

    Ok(FlowGraph {
        nodes,
        arcs,
        source: source_idx,
        terminals,
    })
}
