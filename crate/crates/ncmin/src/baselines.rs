//! The two existing minimal approaches and an exhaustive brute-force
//! oracle over the block transmission state space.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::sweep_with;
use crate::error::{Error, Result};
use crate::feasibility::{
    coding_block_count, min_maxflow_with_edges, network_min_maxflow, EvalCounter, Evaluator,
};
use crate::genotype::Genotype;
use crate::layout::build_layout;
use crate::netgraph::{shuffled_indices, Network};

/// What a baseline run produced besides the count.
#[derive(Debug, Clone)]
pub enum BaselineArtifact {
    /// Edge ids retained by the minimal-subgraph reduction.
    Subgraph(Vec<usize>),
    /// The swept genotype of the link-state reduction.
    Genotype(Genotype),
}

#[derive(Debug, Clone)]
pub struct BaselineResult {
    pub coding_link_count: u32,
    pub seed: u64,
    pub artifact: BaselineArtifact,
}

/// Minimal 1: removes links in a uniformly random order whenever the
/// remaining graph still achieves the rate with coding allowed everywhere,
/// repeating passes until nothing is removable. The coding links of the
/// reduced subgraph are then counted by greedy-sweeping the all-one
/// genotype on that subgraph: only links that genuinely must combine
/// several inputs stay coded, so a merging node whose outputs can each
/// forward a distinct input counts for nothing.
pub fn minimal_subgraph(network: &Network, seed: u64) -> Result<BaselineResult> {
    let rate = network.rate();
    let full = network_min_maxflow(network);
    if full < rate {
        return Err(Error::RateUnachievable {
            rate,
            max_flow: full,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = vec![true; network.edge_count()];
    let order = shuffled_indices(network.edge_count(), &mut rng);
    loop {
        let mut changed = false;
        for &e in &order {
            if !keep[e] {
                continue;
            }
            keep[e] = false;
            if min_maxflow_with_edges(network, Some(&keep)) >= rate {
                changed = true;
            } else {
                keep[e] = true;
            }
        }
        if !changed {
            break;
        }
    }

    let kept: Vec<usize> = (0..network.edge_count()).filter(|&e| keep[e]).collect();
    let sub_edges: Vec<(usize, usize)> = kept.iter().map(|&e| network.edges()[e]).collect();
    let subgraph = Network::new(
        network.node_count(),
        sub_edges,
        network.source(),
        network.sinks().to_vec(),
        rate,
    )?;
    let layout = build_layout(&subgraph);
    let mut evaluator = Evaluator::new(&subgraph, &layout)?;
    let bit_order = shuffled_indices(layout.genotype_length(), &mut rng);
    let swept = sweep_with(
        &mut evaluator,
        &Genotype::all_one(layout.genotype_length()),
        &bit_order,
        &EvalCounter::unbounded(),
    )?;

    Ok(BaselineResult {
        coding_link_count: coding_block_count(&layout, &swept),
        seed,
        artifact: BaselineArtifact::Subgraph(kept),
    })
}

/// Minimal 2: greedy sweep of the all-one genotype in a uniformly random
/// bit order; the count is the fitness of the swept genotype.
pub fn minimal_linkstate(network: &Network, seed: u64) -> Result<BaselineResult> {
    let rate = network.rate();
    let full = network_min_maxflow(network);
    if full < rate {
        return Err(Error::RateUnachievable {
            rate,
            max_flow: full,
        });
    }
    let layout = build_layout(network);
    let mut evaluator = Evaluator::new(network, &layout)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = shuffled_indices(layout.genotype_length(), &mut rng);
    let swept = sweep_with(
        &mut evaluator,
        &Genotype::all_one(layout.genotype_length()),
        &order,
        &EvalCounter::unbounded(),
    )?;
    Ok(BaselineResult {
        coding_link_count: coding_block_count(&layout, &swept),
        seed,
        artifact: BaselineArtifact::Genotype(swept),
    })
}

pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 10_000_000;

/// Exact minimum number of coding links, by enumerating the block
/// transmission state space. Any block with two or more active links
/// behaves like the all-one block, so this minimum equals the minimum over
/// all binary link states at a fraction of the cost.
pub fn exhaustive_min(network: &Network) -> Result<u32> {
    exhaustive_min_capped(network, DEFAULT_EXHAUSTIVE_CAP)
}

pub fn exhaustive_min_capped(network: &Network, cap: u64) -> Result<u32> {
    let layout = build_layout(network);
    let log10_space: f64 = layout
        .blocks()
        .iter()
        .map(|b| ((b.in_edges.len() + 2) as f64).log10())
        .sum();
    if log10_space > (cap as f64).log10() {
        return Err(Error::SearchSpaceTooLarge {
            log10: log10_space,
            cap,
        });
    }

    let mut evaluator = Evaluator::new(network, &layout)?;
    let radices: Vec<usize> = (0..layout.block_count())
        .map(|b| layout.block_len(b) + 2)
        .collect();
    let mut state = vec![0usize; radices.len()];
    let mut genotype = Genotype::all_one(layout.genotype_length());
    let mut best: Option<u32> = None;

    // Mixed-radix odometer over block states; state index 0 is all-one.
    loop {
        if evaluator.is_feasible(&genotype)? {
            let fitness = coding_block_count(&layout, &genotype);
            if best.map_or(true, |b| fitness < b) {
                best = Some(fitness);
                if fitness == 0 {
                    break;
                }
            }
        }
        let mut pos = 0;
        loop {
            if pos == state.len() {
                return best.ok_or(Error::NoFeasibleGenotype);
            }
            state[pos] += 1;
            if state[pos] < radices[pos] {
                write_block_state(&mut genotype, &layout, pos, state[pos]);
                break;
            }
            state[pos] = 0;
            write_block_state(&mut genotype, &layout, pos, 0);
            pos += 1;
        }
    }
    best.ok_or(Error::NoFeasibleGenotype)
}

fn write_block_state(
    genotype: &mut Genotype,
    layout: &crate::layout::BlockLayout,
    block: usize,
    state: usize,
) {
    let range = layout.block_range(block);
    let k = range.len();
    for (pos, i) in range.enumerate() {
        let bit = if state == 0 {
            true
        } else if state <= k {
            pos == state - 1
        } else {
            false
        };
        genotype.set_bit(i, bit);
    }
}
