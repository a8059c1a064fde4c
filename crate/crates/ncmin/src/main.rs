//! Command-line interface: generate networks, inspect their block
//! structure, run a single algorithm, drive experiments, and compare
//! record files with a paired t-test.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use ncmin::harness::{
    paired_t_test, records_to_csv_string, run_experiment, run_one, Algorithm, ExperimentSpec,
    GaOverrides, NetworkSource,
};
use ncmin::layout::{build_layout, search_space_log10};
use ncmin::netgraph::{
    make_canonical, make_cascade, make_random_acyclic, serialize_network, Canonical,
    GeneratorParams, Network,
};

#[derive(Parser)]
#[command(name = "ncmin", version, about = "Minimize coding links for a multicast rate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a network in the text file format.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Print block count, genotype length, and search-space sizes.
    Inspect {
        /// Network file, or a built-in name (B, B_prime, II-<copies>).
        net: String,
    },
    /// Run one algorithm once and print its CSV record.
    Run(RunArgs),
    /// Run a TOML experiment spec: records CSV, summary CSV, plot data.
    Experiment {
        spec: PathBuf,
    },
    /// Paired two-sided t-test between a column of two record files.
    Ttest {
        csv_a: PathBuf,
        csv_b: PathBuf,
        #[arg(long, default_value = "best_after_sweep")]
        column: String,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    /// One of the two canonical butterfly networks.
    Canonical {
        /// B or B_prime
        which: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A binary tree of doubled butterflies (copies = 2^d - 1).
    Cascade {
        copies: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A layered random acyclic multigraph, deterministic in the seed.
    Random {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long)]
        layers: usize,
        #[arg(long)]
        sinks: usize,
        #[arg(long)]
        rate: u32,
        #[arg(long, default_value_t = 0)]
        gen_seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Network file, or a built-in name (B, B_prime, II-<copies>).
    net: String,
    /// ncga, ncga_bls, ncga_bts, ncga_mhd, minimal1, minimal2, exhaustive
    #[arg(long)]
    algo: String,
    /// bls, bts, or mhd; picks the variant when --algo is plain `ncga`.
    #[arg(long)]
    encoding: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    gens: Option<usize>,
    #[arg(long)]
    tourn: Option<usize>,
    #[arg(long)]
    mix: Option<f64>,
    #[arg(long)]
    swap: Option<f64>,
    #[arg(long = "mut")]
    mutation: Option<f64>,
    #[arg(long)]
    budget: Option<u64>,
    /// Also print the best genotype as a trailing comment line.
    #[arg(long)]
    genotype: bool,
}

fn load_network(spec: &str) -> ncmin::Result<(String, Network)> {
    if Path::new(spec).exists() {
        return NetworkSource::file(spec).resolve();
    }
    match spec {
        "B" => Ok(("B".into(), make_canonical(Canonical::B))),
        "B_prime" | "Bprime" | "B'" => {
            Ok(("B_prime".into(), make_canonical(Canonical::BPrime)))
        }
        other => {
            if let Some(copies) = other.strip_prefix("II-") {
                let copies: usize = copies.parse().map_err(|_| {
                    ncmin::Error::InvalidSpec(format!("bad cascade size in `{other}`"))
                })?;
                return Ok((format!("II-{copies}"), make_cascade(copies)?));
            }
            Err(ncmin::Error::InvalidSpec(format!(
                "`{other}` is neither a file nor a built-in network name"
            )))
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> ncmin::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_algorithm(algo: &str, encoding: Option<&str>) -> ncmin::Result<Algorithm> {
    if algo == "ncga" {
        return match encoding {
            Some("bls") => Ok(Algorithm::NcgaBls),
            Some("bts") => Ok(Algorithm::NcgaBts),
            Some("mhd") => Ok(Algorithm::NcgaMhd),
            Some(other) => Err(ncmin::Error::InvalidSpec(format!(
                "unknown encoding `{other}`"
            ))),
            None => Err(ncmin::Error::InvalidSpec(
                "--algo ncga needs --encoding bls|bts|mhd".into(),
            )),
        };
    }
    let parsed: Algorithm = algo.parse()?;
    if let (Some(enc), Some(variant)) = (encoding, Some(parsed)) {
        // A mismatched pair like --algo ncga_bls --encoding bts is a typo.
        let expected = match variant {
            Algorithm::NcgaBls => Some("bls"),
            Algorithm::NcgaBts => Some("bts"),
            Algorithm::NcgaMhd => Some("mhd"),
            _ => None,
        };
        if let Some(expected) = expected {
            if enc != expected {
                return Err(ncmin::Error::InvalidSpec(format!(
                    "--encoding {enc} conflicts with --algo {algo}"
                )));
            }
        }
    }
    Ok(parsed)
}

fn main() {
    if let Err(err) = real_main() {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}

fn real_main() -> ncmin::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate { kind } => match kind {
            GenerateKind::Canonical { which, out } => {
                let which = match which.as_str() {
                    "B" => Canonical::B,
                    "B_prime" | "Bprime" | "B'" => Canonical::BPrime,
                    other => {
                        return Err(ncmin::Error::InvalidSpec(format!(
                            "unknown canonical network `{other}`"
                        )))
                    }
                };
                emit(&serialize_network(&make_canonical(which)), out.as_ref())
            }
            GenerateKind::Cascade { copies, out } => {
                emit(&serialize_network(&make_cascade(copies)?), out.as_ref())
            }
            GenerateKind::Random {
                nodes,
                edges,
                layers,
                sinks,
                rate,
                gen_seed,
                out,
            } => {
                let net = make_random_acyclic(&GeneratorParams {
                    node_count: nodes,
                    edge_count: edges,
                    layer_count: layers,
                    sink_count: sinks,
                    rate,
                    seed: gen_seed,
                })?;
                emit(&serialize_network(&net), out.as_ref())
            }
        },
        Command::Inspect { net } => {
            let (name, network) = load_network(&net)?;
            let layout = build_layout(&network);
            let (bls, bts) = search_space_log10(&layout);
            println!(
                "network {name}: nodes={} edges={} sinks={} rate={}",
                network.node_count(),
                network.edge_count(),
                network.sinks().len(),
                network.rate()
            );
            println!(
                "genotype_length={} blocks={} avg_block_len={:.2} log10_space_bls={bls:.2} log10_space_bts={bts:.2}",
                layout.genotype_length(),
                layout.block_count(),
                layout.average_block_len(),
            );
            Ok(())
        }
        Command::Run(args) => {
            let (name, network) = load_network(&args.net)?;
            let algorithm = parse_algorithm(&args.algo, args.encoding.as_deref())?;
            let overrides = GaOverrides {
                population: args.pop,
                generations: args.gens,
                tournament: args.tourn,
                mixing: args.mix,
                swap: args.swap,
                mutation: args.mutation,
                budget: args.budget,
            };
            let record = run_one(&network, &name, algorithm, 0, args.seed, &overrides)?;
            print!("{}", records_to_csv_string(std::slice::from_ref(&record))?);
            if args.genotype {
                if let Some(variant) = algorithm.ga_variant() {
                    let config =
                        overrides.apply(ncmin::GaConfig::paper_defaults(variant, args.seed));
                    let result = ncmin::run_ga(&network, &config)?;
                    let layout = build_layout(&network);
                    println!(
                        "# genotype {}",
                        ncmin::format_genotype(&result.best_genotype, &layout)
                    );
                }
            }
            Ok(())
        }
        Command::Experiment { spec } => {
            let spec = ExperimentSpec::from_path(&spec)?;
            let outcome = run_experiment(&spec)?;
            for row in &outcome.summaries {
                println!(
                    "{} {} mean={:.2} std={:.2} n={}",
                    row.network, row.algorithm, row.mean, row.std, row.n
                );
            }
            if spec.output.records.is_none() {
                print!("{}", records_to_csv_string(&outcome.records)?);
            }
            Ok(())
        }
        Command::Ttest {
            csv_a,
            csv_b,
            column,
        } => {
            let a = read_column(&csv_a, &column)?;
            let b = read_column(&csv_b, &column)?;
            let result = paired_t_test(&a, &b)?;
            println!("t={:.6} df={} p={:.6e}", result.t, result.df, result.p);
            Ok(())
        }
    }
}

fn read_column(path: &Path, column: &str) -> ncmin::Result<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let idx = headers.iter().position(|h| h == column).ok_or_else(|| {
        ncmin::Error::InvalidSpec(format!("column `{column}` not found in {}", path.display()))
    })?;
    let mut values = Vec::new();
    for row in reader.records() {
        let row = row?;
        let raw = row.get(idx).unwrap_or("");
        let value: f64 = raw.parse().map_err(|_| {
            ncmin::Error::InvalidSpec(format!("non-numeric value `{raw}` in column `{column}`"))
        })?;
        values.push(value);
    }
    Ok(values)
}
