//! Genotype representation, population initialization, and the bit-wise,
//! block-wise, and matched-Hamming-distance operator families.

use rand::Rng;

use crate::error::{Error, Result};
use crate::layout::BlockLayout;

/// A fixed-length bit string interpreted through a [`BlockLayout`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Genotype {
    bits: Vec<bool>,
}

impl Genotype {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Genotype { bits }
    }

    pub fn all_one(len: usize) -> Self {
        Genotype {
            bits: vec![true; len],
        }
    }

    pub fn all_zero(len: usize) -> Self {
        Genotype {
            bits: vec![false; len],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn flip_bit(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Indices of the 1 bits, ascending.
    pub fn one_positions(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&i| self.bits[i]).collect()
    }
}

/// Blocks as 0/1 runs joined by '|', e.g. `11|10|00|01`.
pub fn format_genotype(genotype: &Genotype, layout: &BlockLayout) -> String {
    let mut parts = Vec::with_capacity(layout.block_count());
    for b in 0..layout.block_count() {
        parts.push(
            layout
                .block_range(b)
                .map(|i| if genotype.bit(i) { '1' } else { '0' })
                .collect::<String>(),
        );
    }
    parts.join("|")
}

/// Inverse of [`format_genotype`]; block lengths must match the layout.
pub fn parse_genotype(text: &str, layout: &BlockLayout) -> Result<Genotype> {
    let mut bits = Vec::with_capacity(layout.genotype_length());
    let parts: Vec<&str> = if text.is_empty() {
        Vec::new()
    } else {
        text.split('|').collect()
    };
    if parts.len() != layout.block_count() {
        return Err(Error::LengthMismatch {
            got: parts.len(),
            expected: layout.block_count(),
        });
    }
    for (b, part) in parts.iter().enumerate() {
        if part.len() != layout.block_len(b) {
            return Err(Error::LengthMismatch {
                got: part.len(),
                expected: layout.block_len(b),
            });
        }
        for c in part.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(Error::InvalidNetwork(format!(
                        "invalid genotype character `{other}`"
                    )))
                }
            }
        }
    }
    Ok(Genotype::from_bits(bits))
}

/// Genotype encodings: every bit free, or blocks restricted to transmission
/// states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Encoding {
    /// Binary link state: a length-k block ranges over all 2^k strings.
    Bls,
    /// Block transmission state: a length-k block ranges over k+2 strings.
    Bts,
}

/// Operator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum OperatorMode {
    /// Uniform crossover and independent bit-flip mutation.
    BitWise,
    /// Whole-block uniform crossover and block-state resampling mutation.
    BlockWise,
    /// Bit-wise crossover plus a mutation whose per-block Hamming distance
    /// matches block-wise mutation without positional structure.
    Mhd,
}

/// Operator parameters. `mixing_ratio` selects pairs for crossover,
/// `swap_prob` exchanges individual loci within a selected pair, and
/// `mutation_rate` is the per-bit (bit-wise) or per-block (block-wise, MHD)
/// mutation probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorConfig {
    pub mode: OperatorMode,
    pub mixing_ratio: f64,
    pub swap_prob: f64,
    pub mutation_rate: f64,
}

/// The k+2 valid transmission states of a length-k block, in order: coded
/// (all ones), the k uncoded single-link forwards, then no transmission.
pub fn bts_states(k: usize) -> Result<Vec<Vec<bool>>> {
    if k < 2 {
        return Err(Error::BlockTooShort(k));
    }
    let mut states = Vec::with_capacity(k + 2);
    states.push(vec![true; k]);
    for i in 0..k {
        let mut s = vec![false; k];
        s[i] = true;
        states.push(s);
    }
    states.push(vec![false; k]);
    Ok(states)
}

/// Index of a block's state in the [`bts_states`] order, or `None` when the
/// block is not a valid transmission state.
fn bts_state_index(bits: &[bool]) -> Option<usize> {
    let k = bits.len();
    let ones = bits.iter().filter(|&&b| b).count();
    match ones {
        o if o == k => Some(0),
        1 => bits.iter().position(|&b| b).map(|p| p + 1),
        0 => Some(k + 1),
        _ => None,
    }
}

/// True iff every block is one of its k+2 transmission states.
pub fn is_bts_valid(genotype: &Genotype, layout: &BlockLayout) -> bool {
    (0..layout.block_count()).all(|b| {
        let bits: Vec<bool> = layout.block_range(b).map(|i| genotype.bit(i)).collect();
        bts_state_index(&bits).is_some()
    })
}

/// `size - 1` uniform genotypes plus one all-one genotype (feasible whenever
/// the rate is achievable, which seeds the search). BLS draws each bit
/// uniformly; BTS draws each block uniformly over its k+2 states.
pub fn init_population(
    layout: &BlockLayout,
    encoding: Encoding,
    size: usize,
    rng: &mut impl Rng,
) -> Vec<Genotype> {
    let m = layout.genotype_length();
    let mut population = Vec::with_capacity(size);
    for _ in 0..size.saturating_sub(1) {
        let g = match encoding {
            Encoding::Bls => Genotype::from_bits((0..m).map(|_| rng.random_bool(0.5)).collect()),
            Encoding::Bts => {
                let mut bits = Vec::with_capacity(m);
                for b in 0..layout.block_count() {
                    let k = layout.block_len(b);
                    let state = rng.random_range(0..k + 2);
                    bits.extend(state_bits(k, state));
                }
                Genotype::from_bits(bits)
            }
        };
        population.push(g);
    }
    population.push(Genotype::all_one(m));
    population
}

/// Bits of the state at `index` in the [`bts_states`] order, materialized
/// without allocating the whole list.
fn state_bits(k: usize, index: usize) -> Vec<bool> {
    if index == 0 {
        vec![true; k]
    } else if index <= k {
        let mut s = vec![false; k];
        s[index - 1] = true;
        s
    } else {
        vec![false; k]
    }
}

/// With probability `mixing_ratio` the pair exchanges loci (bits for
/// bit-wise and MHD, whole blocks for block-wise), each independently with
/// probability `swap_prob`; otherwise the parents return unchanged.
pub fn crossover(
    a: &Genotype,
    b: &Genotype,
    layout: &BlockLayout,
    config: &OperatorConfig,
    rng: &mut impl Rng,
) -> Result<(Genotype, Genotype)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            got: b.len(),
            expected: a.len(),
        });
    }
    let mut left = a.clone();
    let mut right = b.clone();
    if !rng.random_bool(config.mixing_ratio) {
        return Ok((left, right));
    }
    match config.mode {
        OperatorMode::BitWise | OperatorMode::Mhd => {
            for i in 0..left.len() {
                if rng.random_bool(config.swap_prob) {
                    let tmp = left.bit(i);
                    left.set_bit(i, right.bit(i));
                    right.set_bit(i, tmp);
                }
            }
        }
        OperatorMode::BlockWise => {
            for block in 0..layout.block_count() {
                if rng.random_bool(config.swap_prob) {
                    for i in layout.block_range(block) {
                        let tmp = left.bit(i);
                        left.set_bit(i, right.bit(i));
                        right.set_bit(i, tmp);
                    }
                }
            }
        }
    }
    Ok((left, right))
}

/// Hamming-distance distribution of one block-wise mutation event on a
/// length-k block, assuming the current state is uniform over the k+2
/// transmission states: weight 2k on distance 1 (one-hot vs all-zero),
/// k(k-1) on distance 2 (one-hot pairs), 2k on distance k-1 (all-one vs
/// one-hot), and 2 on distance k (all-one vs all-zero). The mean is
/// 4k^2 / ((k+1)(k+2)).
pub(crate) fn mhd_distance_weights(k: usize) -> Vec<(usize, u64)> {
    let k64 = k as u64;
    let raw = [
        (1, 2 * k64),
        (2, k64 * (k64 - 1)),
        (k - 1, 2 * k64),
        (k, 2),
    ];
    let mut merged: Vec<(usize, u64)> = Vec::with_capacity(4);
    for (d, w) in raw {
        match merged.iter_mut().find(|(md, _)| *md == d) {
            Some((_, mw)) => *mw += w,
            None => merged.push((d, w)),
        }
    }
    merged.sort_unstable_by_key(|&(d, _)| d);
    merged
}

fn sample_mhd_distance(k: usize, rng: &mut impl Rng) -> usize {
    let weights = mhd_distance_weights(k);
    let total: u64 = weights.iter().map(|&(_, w)| w).sum();
    let mut pick = rng.random_range(0..total);
    for (d, w) in weights {
        if pick < w {
            return d;
        }
        pick -= w;
    }
    unreachable!("weights sum to total");
}

/// Bit-wise mode flips each bit independently with probability
/// `mutation_rate`. Block-wise mode replaces each block, independently with
/// that probability, by one of its other k+1 transmission states chosen
/// uniformly; the input must be a valid transmission state. MHD mode mirrors
/// the block-wise event statistics without the positional structure: each
/// block triggers an event with the same probability and each event flips d
/// distinct bits, d drawn from the block-wise Hamming-distance distribution
/// for that block's length, but the flipped positions are chosen uniformly
/// over the whole genotype rather than inside the triggering block.
pub fn mutate(
    genotype: &Genotype,
    layout: &BlockLayout,
    config: &OperatorConfig,
    rng: &mut impl Rng,
) -> Result<Genotype> {
    let mut out = genotype.clone();
    let alpha = config.mutation_rate;
    match config.mode {
        OperatorMode::BitWise => {
            for i in 0..out.len() {
                if rng.random_bool(alpha) {
                    out.flip_bit(i);
                }
            }
        }
        OperatorMode::BlockWise => {
            for block in 0..layout.block_count() {
                let range = layout.block_range(block);
                let bits: Vec<bool> = range.clone().map(|i| out.bit(i)).collect();
                let current = bts_state_index(&bits).ok_or(Error::InvalidBtsGenotype)?;
                if !rng.random_bool(alpha) {
                    continue;
                }
                let k = bits.len();
                // Uniform over the other k+1 states.
                let mut pick = rng.random_range(0..k + 1);
                if pick >= current {
                    pick += 1;
                }
                for (i, bit) in range.zip(state_bits(k, pick)) {
                    out.set_bit(i, bit);
                }
            }
        }
        OperatorMode::Mhd => {
            let m = out.len();
            for block in 0..layout.block_count() {
                if !rng.random_bool(alpha) {
                    continue;
                }
                let k = layout.block_len(block);
                let d = sample_mhd_distance(k, rng);
                for pos in rand::seq::index::sample(rng, m, d) {
                    out.flip_bit(pos);
                }
            }
        }
    }
    Ok(out)
}
