//! Property tests over randomly generated networks and genotypes.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ncmin::engine::greedy_sweep;
use ncmin::feasibility::{coding_block_count, Evaluator};
use ncmin::genotype::{
    crossover, is_bts_valid, mutate, Genotype, OperatorConfig, OperatorMode,
};
use ncmin::layout::build_layout;
use ncmin::netgraph::{
    make_random_acyclic, parse_network, serialize_network, GeneratorParams, Network,
};

fn generated_network() -> impl Strategy<Value = Network> {
    (
        8usize..16,
        0usize..18,
        3usize..5,
        1usize..3,
        1u32..3,
        0u64..10_000,
    )
        .prop_filter_map(
            "generator must satisfy the rate",
            |(nodes, extra, layers, sinks, rate, seed)| {
                let params = GeneratorParams {
                    node_count: nodes,
                    edge_count: nodes - 1 + extra + rate as usize * (sinks + 1),
                    layer_count: layers,
                    sink_count: sinks,
                    rate,
                    seed,
                };
                make_random_acyclic(&params).ok()
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parse_inverts_serialize(net in generated_network()) {
        let text = serialize_network(&net);
        prop_assert_eq!(parse_network(&text).unwrap(), net);
    }

    #[test]
    fn generated_networks_are_acyclic_and_feasible(net in generated_network()) {
        prop_assert!(net.topological_order().is_some());
        prop_assert!(ncmin::feasibility::network_min_maxflow(&net) >= net.rate());
    }

    #[test]
    fn crossover_conserves_loci_everywhere(
        net in generated_network(),
        seed in 0u64..1_000_000,
        mode_pick in 0u8..3,
    ) {
        let layout = build_layout(&net);
        let m = layout.genotype_length();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mode = match mode_pick {
            0 => OperatorMode::BitWise,
            1 => OperatorMode::BlockWise,
            _ => OperatorMode::Mhd,
        };
        let cfg = OperatorConfig { mode, mixing_ratio: 0.8, swap_prob: 0.8, mutation_rate: 0.0 };
        let a = Genotype::from_bits((0..m).map(|_| rng.random_bool(0.5)).collect());
        let b = Genotype::from_bits((0..m).map(|_| rng.random_bool(0.5)).collect());
        let (x, y) = crossover(&a, &b, &layout, &cfg, &mut rng).unwrap();
        for i in 0..m {
            let parents = (a.bit(i), b.bit(i));
            let children = (x.bit(i), y.bit(i));
            prop_assert!(children == parents || children == (parents.1, parents.0));
        }
    }

    #[test]
    fn block_operators_preserve_transmission_states(
        net in generated_network(),
        seed in 0u64..1_000_000,
    ) {
        let layout = build_layout(&net);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = OperatorConfig {
            mode: OperatorMode::BlockWise,
            mixing_ratio: 0.8,
            swap_prob: 0.8,
            mutation_rate: 0.25,
        };
        let pop = ncmin::genotype::init_population(&layout, ncmin::genotype::Encoding::Bts, 4, &mut rng);
        let (x, y) = crossover(&pop[0], &pop[1], &layout, &cfg, &mut rng).unwrap();
        let x = mutate(&x, &layout, &cfg, &mut rng).unwrap();
        let y = mutate(&y, &layout, &cfg, &mut rng).unwrap();
        prop_assert!(is_bts_valid(&x, &layout));
        prop_assert!(is_bts_valid(&y, &layout));
    }

    #[test]
    fn sweep_only_improves_and_stays_feasible(net in generated_network()) {
        let layout = build_layout(&net);
        let m = layout.genotype_length();
        let all_one = Genotype::all_one(m);
        let order: Vec<usize> = (0..m).collect();
        let swept = greedy_sweep(&net, &layout, &all_one, &order).unwrap();
        let mut evaluator = Evaluator::new(&net, &layout).unwrap();
        prop_assert!(evaluator.is_feasible(&swept).unwrap());
        prop_assert!(coding_block_count(&layout, &swept) <= coding_block_count(&layout, &all_one));
        // Bitwise dominated by the input.
        for i in 0..m {
            prop_assert!(!swept.bit(i) || all_one.bit(i));
        }
    }

    #[test]
    fn promoting_zero_bits_keeps_feasibility(
        net in generated_network(),
        seed in 0u64..1_000_000,
    ) {
        let layout = build_layout(&net);
        let m = layout.genotype_length();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut evaluator = Evaluator::new(&net, &layout).unwrap();
        let g = Genotype::from_bits((0..m).map(|_| rng.random_bool(0.7)).collect());
        if evaluator.is_feasible(&g).unwrap() {
            let mut promoted = g.clone();
            for i in 0..m {
                if !g.bit(i) && rng.random_bool(0.5) {
                    promoted.set_bit(i, true);
                }
            }
            prop_assert!(evaluator.is_feasible(&promoted).unwrap());
        }
    }
}
