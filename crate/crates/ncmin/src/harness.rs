//! Experiment orchestration over seeds, algorithms, and networks, with CSV
//! records, summary statistics, paired t-tests, and plot data.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::baselines::{exhaustive_min, minimal_linkstate, minimal_subgraph};
use crate::engine::{run_ga, GaConfig, GaVariant};
use crate::error::{Error, Result};
use crate::layout::{build_layout, search_space_log10};
use crate::netgraph::{
    make_canonical, make_cascade, make_random_acyclic, parse_network, Canonical, GeneratorParams,
    Network,
};

/// The algorithms an experiment can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    NcgaBls,
    NcgaBts,
    NcgaMhd,
    Minimal1,
    Minimal2,
    Exhaustive,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::NcgaBls => "ncga_bls",
            Algorithm::NcgaBts => "ncga_bts",
            Algorithm::NcgaMhd => "ncga_mhd",
            Algorithm::Minimal1 => "minimal1",
            Algorithm::Minimal2 => "minimal2",
            Algorithm::Exhaustive => "exhaustive",
        }
    }

    pub fn ga_variant(&self) -> Option<GaVariant> {
        match self {
            Algorithm::NcgaBls => Some(GaVariant::Bls),
            Algorithm::NcgaBts => Some(GaVariant::Bts),
            Algorithm::NcgaMhd => Some(GaVariant::Mhd),
            _ => None,
        }
    }

    fn encoding_label(&self) -> &'static str {
        match self {
            Algorithm::NcgaBls => "bls",
            Algorithm::NcgaBts => "bts",
            Algorithm::NcgaMhd => "mhd",
            _ => "-",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ncga_bls" => Ok(Algorithm::NcgaBls),
            "ncga_bts" => Ok(Algorithm::NcgaBts),
            "ncga_mhd" => Ok(Algorithm::NcgaMhd),
            "minimal1" => Ok(Algorithm::Minimal1),
            "minimal2" => Ok(Algorithm::Minimal2),
            "exhaustive" => Ok(Algorithm::Exhaustive),
            other => Err(Error::InvalidSpec(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Where an experiment's network comes from. Exactly one of the source
/// fields must be set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSource {
    pub name: Option<String>,
    pub file: Option<PathBuf>,
    pub canonical: Option<String>,
    pub cascade: Option<usize>,
    pub random: Option<GeneratorParams>,
}

impl NetworkSource {
    pub fn file(path: impl Into<PathBuf>) -> Self {
        NetworkSource {
            name: None,
            file: Some(path.into()),
            canonical: None,
            cascade: None,
            random: None,
        }
    }

    pub fn cascade(copies: usize) -> Self {
        NetworkSource {
            name: None,
            file: None,
            canonical: None,
            cascade: Some(copies),
            random: None,
        }
    }

    pub fn canonical(which: &str) -> Self {
        NetworkSource {
            name: None,
            file: None,
            canonical: Some(which.to_string()),
            cascade: None,
            random: None,
        }
    }

    pub fn random(params: GeneratorParams) -> Self {
        NetworkSource {
            name: None,
            file: None,
            canonical: None,
            cascade: None,
            random: Some(params),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Loads or generates the network and derives a display name.
    pub fn resolve(&self) -> Result<(String, Network)> {
        let sources = usize::from(self.file.is_some())
            + usize::from(self.canonical.is_some())
            + usize::from(self.cascade.is_some())
            + usize::from(self.random.is_some());
        if sources != 1 {
            return Err(Error::InvalidSpec(
                "network needs exactly one of: file, canonical, cascade, random".into(),
            ));
        }
        let (default_name, network) = if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "network".into());
            (name, parse_network(&text)?)
        } else if let Some(which) = &self.canonical {
            let which = match which.as_str() {
                "B" => Canonical::B,
                "B_prime" | "Bprime" | "B'" => Canonical::BPrime,
                other => {
                    return Err(Error::InvalidSpec(format!(
                        "unknown canonical network `{other}`"
                    )))
                }
            };
            let name = match which {
                Canonical::B => "B".to_string(),
                Canonical::BPrime => "B_prime".to_string(),
            };
            (name, make_canonical(which))
        } else if let Some(copies) = self.cascade {
            (format!("II-{copies}"), make_cascade(copies)?)
        } else {
            let params = self.random.as_ref().unwrap();
            (
                format!("R{}-{}", params.node_count, params.seed),
                make_random_acyclic(params)?,
            )
        };
        Ok((self.name.clone().unwrap_or(default_name), network))
    }
}

/// Optional overrides applied on top of the per-variant GA defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GaOverrides {
    pub population: Option<usize>,
    pub generations: Option<usize>,
    pub tournament: Option<usize>,
    pub mixing: Option<f64>,
    pub swap: Option<f64>,
    pub mutation: Option<f64>,
    pub budget: Option<u64>,
}

impl GaOverrides {
    pub fn apply(&self, mut config: GaConfig) -> GaConfig {
        if let Some(v) = self.population {
            config.population_size = v;
        }
        if let Some(v) = self.generations {
            config.max_generations = v;
        }
        if let Some(v) = self.tournament {
            config.tournament_size = v;
        }
        if let Some(v) = self.mixing {
            config.operators.mixing_ratio = v;
        }
        if let Some(v) = self.swap {
            config.operators.swap_prob = v;
        }
        if let Some(v) = self.mutation {
            config.operators.mutation_rate = v;
        }
        if let Some(v) = self.budget {
            config.budget = v;
        }
        config
    }
}

fn default_runs() -> usize {
    30
}

/// Output file paths; any of them may be omitted.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OutputPaths {
    pub records: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

/// A full experiment: every algorithm runs `runs` times on every network,
/// run index i using seed `base_seed + i` so paired tests compare
/// same-seed runs across algorithms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub networks: Vec<NetworkSource>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub ga: GaOverrides,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        if self.networks.is_empty() {
            return Err(Error::InvalidSpec("no networks listed".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidSpec("no algorithms listed".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidSpec("runs must be >= 1".into()));
        }
        Ok(())
    }
}

/// One CSV record per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub network: String,
    pub algorithm: String,
    pub encoding: String,
    pub run: usize,
    pub seed: u64,
    pub best_fitness: u32,
    pub best_after_sweep: u32,
    pub evaluations: u64,
    pub generations: usize,
    pub wallclock_ms: u64,
}

/// Per-(network, algorithm) aggregate of the run records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub network: String,
    pub algorithm: String,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
    pub mean_before_sweep: f64,
    pub std_before_sweep: f64,
}

/// Records, summaries, and gnuplot-style plot data for one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    pub summaries: Vec<SummaryRow>,
    pub plot: String,
}

/// Runs one (algorithm, seed) cell on an already-resolved network.
pub fn run_one(
    network: &Network,
    network_name: &str,
    algorithm: Algorithm,
    run: usize,
    seed: u64,
    overrides: &GaOverrides,
) -> Result<RunRecord> {
    let start = std::time::Instant::now();
    let record = |best: u32, after: u32, evals: u64, gens: usize, ms: u64| RunRecord {
        network: network_name.to_string(),
        algorithm: algorithm.name().to_string(),
        encoding: algorithm.encoding_label().to_string(),
        run,
        seed,
        best_fitness: best,
        best_after_sweep: after,
        evaluations: evals,
        generations: gens,
        wallclock_ms: ms,
    };
    match algorithm {
        Algorithm::NcgaBls | Algorithm::NcgaBts | Algorithm::NcgaMhd => {
            let variant = algorithm.ga_variant().unwrap();
            let config = overrides.apply(GaConfig::paper_defaults(variant, seed));
            let result = run_ga(network, &config)?;
            let best = result
                .best_fitness
                .coding_blocks()
                .expect("GA best is feasible");
            let after = result
                .best_fitness_after_sweep
                .coding_blocks()
                .expect("sweep output is feasible");
            Ok(record(
                best,
                after,
                result.evaluations_used,
                result.generations_completed,
                result.wallclock.as_millis() as u64,
            ))
        }
        Algorithm::Minimal1 => {
            let result = minimal_subgraph(network, seed)?;
            let ms = start.elapsed().as_millis() as u64;
            Ok(record(
                result.coding_link_count,
                result.coding_link_count,
                0,
                0,
                ms,
            ))
        }
        Algorithm::Minimal2 => {
            let result = minimal_linkstate(network, seed)?;
            let ms = start.elapsed().as_millis() as u64;
            Ok(record(
                result.coding_link_count,
                result.coding_link_count,
                0,
                0,
                ms,
            ))
        }
        Algorithm::Exhaustive => {
            let minimum = exhaustive_min(network)?;
            let ms = start.elapsed().as_millis() as u64;
            Ok(record(minimum, minimum, 0, 0, ms))
        }
    }
}

/// Executes the experiment. Runs are independent and execute in parallel;
/// records come back in (network, algorithm, run) order, so output is
/// deterministic in the base seed apart from the wallclock column.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let mut resolved = Vec::with_capacity(spec.networks.len());
    for source in &spec.networks {
        resolved.push(source.resolve()?);
    }

    let mut tasks = Vec::new();
    for (name, network) in &resolved {
        for &algorithm in &spec.algorithms {
            for run in 0..spec.runs {
                tasks.push((name.as_str(), network, algorithm, run));
            }
        }
    }
    let records: Vec<RunRecord> = tasks
        .par_iter()
        .map(|&(name, network, algorithm, run)| {
            run_one(
                network,
                name,
                algorithm,
                run,
                spec.base_seed + run as u64,
                &spec.ga,
            )
        })
        .collect::<Result<_>>()?;

    let summaries = summarize(&records);
    let spaces: Vec<(String, f64)> = resolved
        .iter()
        .map(|(name, network)| {
            let (_, bts) = search_space_log10(&build_layout(network));
            (name.clone(), bts)
        })
        .collect();
    let plot = plot_data(&records, &spaces);

    if let Some(path) = &spec.output.records {
        write_records_csv(path, &records)?;
    }
    if let Some(path) = &spec.output.summary {
        write_summary_csv(path, &summaries)?;
    }
    if let Some(path) = &spec.output.plot {
        std::fs::write(path, &plot)?;
    }

    Ok(ExperimentOutcome {
        records,
        summaries,
        plot,
    })
}

pub fn write_records_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for record in records {
        writer.serialize(record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn records_to_csv_string(records: &[RunRecord]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for record in records {
        writer.serialize(record)?;
    }
    let bytes = writer.into_inner().map_err(|e| {
        Error::InvalidSpec(format!("csv buffer error: {e}"))
    })?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, var.sqrt())
}

/// Per-(network, algorithm) mean and sample standard deviation, both after
/// and before the sweep, in first-appearance order.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let key = (r.network.clone(), r.algorithm.clone());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        let entry = groups.entry(key).or_default();
        entry.0.push(r.best_after_sweep as f64);
        entry.1.push(r.best_fitness as f64);
    }
    order
        .into_iter()
        .map(|key| {
            let (after, before) = &groups[&key];
            let (mean, std) = mean_and_std(after);
            let (mean_before_sweep, std_before_sweep) = mean_and_std(before);
            SummaryRow {
                network: key.0,
                algorithm: key.1,
                mean,
                std,
                n: after.len(),
                mean_before_sweep,
                std_before_sweep,
            }
        })
        .collect()
}

/// Two-column plot data: log10 of the block-transmission-state search space
/// against the mean fitness after sweep, one series per algorithm, series
/// separated by blank lines and labeled with a `#` comment.
pub fn plot_data(records: &[RunRecord], spaces: &[(String, f64)]) -> String {
    let summaries = summarize(records);
    let mut algorithms: Vec<String> = Vec::new();
    for s in &summaries {
        if !algorithms.contains(&s.algorithm) {
            algorithms.push(s.algorithm.clone());
        }
    }
    let space_of: BTreeMap<&str, f64> = spaces
        .iter()
        .map(|(name, x)| (name.as_str(), *x))
        .collect();
    let mut out = String::new();
    for algorithm in &algorithms {
        let mut points: Vec<(f64, f64)> = summaries
            .iter()
            .filter(|s| &s.algorithm == algorithm)
            .filter_map(|s| space_of.get(s.network.as_str()).map(|&x| (x, s.mean)))
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.push_str(&format!("# {algorithm}\n"));
        for (x, y) in points {
            out.push_str(&format!("{x:.2} {y:.4}\n"));
        }
        out.push('\n');
    }
    out
}

/// Result of a two-sided paired Student t-test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    pub df: usize,
    pub p: f64,
}

/// Classical paired two-sided Student t-test on same-index pairs. All-zero
/// differences give t = 0, p = 1 by convention; zero variance around a
/// nonzero mean gives an infinite t and p = 0.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(Error::SampleLengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let (mean, std) = mean_and_std(&diffs);
    let df = n - 1;
    if std == 0.0 {
        return Ok(if mean == 0.0 {
            TTestResult { t: 0.0, df, p: 1.0 }
        } else {
            TTestResult {
                t: if mean > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
                df,
                p: 0.0,
            }
        });
    }
    let t = mean * (n as f64).sqrt() / std;
    let dist = StudentsT::new(0.0, 1.0, df as f64)
        .expect("df >= 1 is a valid Student t parameter");
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok(TTestResult {
        t,
        df,
        p: p.clamp(0.0, 1.0),
    })
}
