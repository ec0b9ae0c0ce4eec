//! Command-line harness: instance generation, reconstruction and bit
//! requirement sweeps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::graph::io::{format_configuration, format_graph, format_integers, parse_graph, parse_integers};
use crate::graph::{generate_graph, Family, Graph};
use crate::pipeline::{
    reconstruct_kbasis, reconstruct_labeled, reconstruct_labeled_percycle, reconstruct_unlabeled, recovers_cycle_space,
    sample_instance, NoiseModel, PipelineOptions, ReconstructionResult,
};
use crate::relations::{default_delta, Selection};
use crate::{derive_seed, Int};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_DETECTED_FAILURE: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 3;

pub const CSV_HEADER: &str = "family,n,m,b_required,trials,successes,wall_ms";
/// Written in the `b_required` column when even `b = 2m^2` misses the
/// target rate.
pub const EXHAUSTED_WINDOW: &str = "ExhaustedWindow";

#[derive(Parser, Debug)]
#[command(
    name = "linerecon",
    version,
    about = "Reconstruct graphs and line configurations from unlabeled edge lengths"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a graph and configuration; write graph, configuration and lengths files.
    Generate(GenerateArgs),
    /// Reconstruct from a lengths file (labeled with --graph).
    Reconstruct(ReconstructArgs),
    /// Search the bits needed for the lattice step to recover the cycle space.
    Sweep(SweepArgs),
    /// Reconstruct using short relations found by exhaustive search.
    Kbasis(KbasisArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    None,
    Random,
}

impl NoiseArg {
    pub fn model(self) -> NoiseModel {
        match self {
            NoiseArg::None => NoiseModel::None,
            NoiseArg::Random => NoiseModel::Random,
        }
    }
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub bits: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = NoiseArg::None)]
    pub noise: NoiseArg,
    /// Directory for the output files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// File name stem; defaults to `<family>-n<n>-b<bits>-s<seed>`.
    #[arg(long)]
    pub prefix: Option<String>,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    /// Lengths file, one integer per line.
    pub lengths: PathBuf,
    /// Graph file; switches to labeled reconstruction.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Labeled mode: reduce each fundamental cycle separately.
    #[arg(long, requires = "graph")]
    pub percycle: bool,
    /// Keep the c shortest reduced vectors instead of thresholding
    /// (needs the vertex count: from --graph or --n).
    #[arg(long)]
    pub optimistic: bool,
    #[arg(long)]
    pub n: Option<usize>,
    /// Allowed per-edge deviation for a combinatorial success.
    #[arg(long, default_value_t = 1)]
    pub noise_bound: u32,
    /// Write the recovered graph here.
    #[arg(long)]
    pub output_graph: Option<PathBuf>,
    /// Write the recovered configuration here.
    #[arg(long)]
    pub output_config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct KbasisArgs {
    pub lengths: PathBuf,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub noise_bound: u32,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub family: Family,
    /// Vertex counts: `4..10` (inclusive), `4-10` or `4,6,8`.
    #[arg(long, value_parser = parse_n_range)]
    pub n: NRange,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.9)]
    pub target_rate: f64,
    #[arg(long, value_enum, default_value_t = NoiseArg::Random)]
    pub noise: NoiseArg,
    #[arg(long)]
    pub optimistic: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random graphs per n for the near3regular family.
    #[arg(long, default_value_t = 5)]
    pub ensembles: usize,
    /// CSV destination (stdout if omitted).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write a gnuplot script plotting the CSV.
    #[arg(long)]
    pub plot_script: Option<PathBuf>,
    /// Report wall_ms as 0 so the CSV is byte-for-byte reproducible.
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long)]
    pub no_spot_check: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NRange(pub Vec<usize>);

pub fn parse_n_range(s: &str) -> Result<NRange, String> {
    let bad = || format!("invalid vertex range `{s}`");
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let values: Vec<usize> = if let Some((a, b)) = s.split_once("..").or_else(|| s.split_once('-')) {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(NRange(values))
}

/// Sweep parameters.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub family: Family,
    pub n_range: Vec<usize>,
    pub target_rate: f64,
    pub trials: usize,
    pub optimistic: bool,
    pub noise: NoiseModel,
    pub seed: u64,
    pub ensembles: usize,
    pub deterministic: bool,
    pub spot_check: bool,
}

impl SweepConfig {
    pub fn new(family: Family, n_range: Vec<usize>) -> Self {
        SweepConfig {
            family,
            n_range,
            target_rate: 0.9,
            trials: 50,
            optimistic: false,
            noise: NoiseModel::Random,
            seed: 0,
            ensembles: 5,
            deterministic: false,
            spot_check: true,
        }
    }

    fn validate(&self) -> anyhow::Result<()> {
        if !(self.target_rate > 0.0 && self.target_rate < 1.0) {
            bail!("target rate must lie strictly between 0 and 1");
        }
        if self.trials == 0 {
            bail!("at least one trial is required");
        }
        if self.ensembles == 0 {
            bail!("at least one ensemble is required");
        }
        Ok(())
    }

    fn required_successes(&self) -> usize {
        (self.target_rate * self.trials as f64 - 1e-9).ceil() as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    /// `None` when the window was exhausted.
    pub b_required: Option<u32>,
    pub trials: usize,
    pub successes: usize,
    pub wall_ms: u128,
}

/// Successes among the trials of one `(graph, b)` cell. With `abort_below`
/// set, stops early once that many successes can no longer be reached.
fn run_cell(cfg: &SweepConfig, graph: &Graph, ensemble: usize, bits: u32, abort_below: Option<usize>) -> Option<usize> {
    let c = graph.cycle_rank();
    let selection = if cfg.optimistic { Selection::Shortest(c) } else { Selection::Threshold };
    let delta = default_delta();
    let failures = AtomicUsize::new(0);
    let allowed = abort_below.map(|need| cfg.trials - need);
    let successes = (0..cfg.trials)
        .into_par_iter()
        .filter(|&t| {
            if allowed.is_some_and(|a| failures.load(Ordering::Relaxed) > a) {
                return false;
            }
            let seed = derive_seed(cfg.seed, &[graph.n() as u64, ensemble as u64, bits as u64, t as u64]);
            let inst = sample_instance(graph, bits, &cfg.noise, seed);
            let ok = recovers_cycle_space(&inst, &delta, selection);
            if !ok {
                failures.fetch_add(1, Ordering::Relaxed);
            }
            ok
        })
        .count();
    match allowed {
        Some(a) if failures.load(Ordering::Relaxed) > a => None,
        _ => Some(successes),
    }
}

/// Smallest `b` in `[4, 2m^2]` meeting the target, by doubling then
/// bisection (success is assumed monotone in `b`). Returns `(b, successes)`
/// or the window cap with its success count.
fn search_bits(cfg: &SweepConfig, graph: &Graph, ensemble: usize) -> (Option<u32>, usize) {
    let need = cfg.required_successes();
    let cap = (2 * graph.m() * graph.m()).max(4) as u32;
    let passes = |b: u32| run_cell(cfg, graph, ensemble, b, Some(need)).filter(|&s| s >= need);
    let mut lo = 3; // largest known failure
    let mut b = 4;
    let (mut hi, mut hi_successes) = loop {
        if let Some(s) = passes(b) {
            break (b, s);
        }
        lo = b;
        if b == cap {
            let s = run_cell(cfg, graph, ensemble, cap, None).unwrap_or(0);
            return (None, s);
        }
        b = (2 * b).min(cap);
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match passes(mid) {
            Some(s) => {
                hi = mid;
                hi_successes = s;
            }
            None => lo = mid,
        }
    }
    (Some(hi), hi_successes)
}

fn sweep_graphs(cfg: &SweepConfig, n: usize) -> anyhow::Result<Vec<Graph>> {
    let count = if cfg.family == Family::NearThreeRegular { cfg.ensembles } else { 1 };
    (0..count)
        .map(|e| {
            generate_graph(cfg.family, n, derive_seed(cfg.seed, &[0x67_7261_7068, n as u64, e as u64]))
                .map_err(Into::into)
        })
        .collect()
}

/// Runs the sweep; one row per vertex count.
pub fn run_sweep(cfg: &SweepConfig) -> anyhow::Result<Vec<SweepRow>> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.n_range.len());
    for &n in &cfg.n_range {
        let start = Instant::now();
        let graphs = sweep_graphs(cfg, n)?;
        let mut worst: Option<(Option<u32>, usize)> = None;
        for (e, g) in graphs.iter().enumerate() {
            let (b, s) = search_bits(cfg, g, e);
            log::info!("{} n={} ensemble={} b_required={:?} successes={}", cfg.family, n, e, b, s);
            let worse = match (&worst, b) {
                (None, _) => true,
                (Some((None, _)), _) => false,
                (Some(_), None) => true,
                (Some((Some(wb), _)), Some(b)) => b > *wb,
            };
            if worse {
                worst = Some((b, s));
            }
        }
        let (b_required, successes) = worst.expect("at least one graph");
        let wall_ms = if cfg.deterministic { 0 } else { start.elapsed().as_millis() };
        rows.push(SweepRow {
            family: cfg.family,
            n,
            m: graphs[0].m(),
            b_required,
            trials: cfg.trials,
            successes,
            wall_ms,
        });
    }
    if cfg.spot_check {
        spot_check(cfg, &rows)?;
    }
    Ok(rows)
}

/// Checks monotonicity around one measured point: `b - 4` should miss the
/// target and `b + 4` should meet it. Violations are logged.
fn spot_check(cfg: &SweepConfig, rows: &[SweepRow]) -> anyhow::Result<()> {
    let Some(row) = rows.iter().filter(|r| r.b_required.is_some()).nth(rows.len() / 2).or_else(|| rows.first()) else {
        return Ok(());
    };
    let Some(b) = row.b_required else { return Ok(()) };
    let graphs = sweep_graphs(cfg, row.n)?;
    let need = cfg.required_successes();
    for (e, g) in graphs.iter().enumerate() {
        let above = run_cell(cfg, g, e, b + 4, None).unwrap_or(0);
        if above < need {
            log::warn!(
                "monotonicity violation: {} n={} ensemble={}: b={} has {}/{} successes, below target",
                cfg.family,
                row.n,
                e,
                b + 4,
                above,
                cfg.trials
            );
        }
    }
    if b >= 8 {
        // only the graph that set the maximum is known to fail below b
        let results: Vec<usize> =
            graphs.iter().enumerate().map(|(e, g)| run_cell(cfg, g, e, b - 4, None).unwrap_or(0)).collect();
        if results.iter().all(|&s| s >= need) {
            log::warn!(
                "monotonicity violation: {} n={}: b={} meets the target for every graph although b={} was required",
                cfg.family,
                row.n,
                b - 4,
                b
            );
        }
    }
    Ok(())
}

pub fn format_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let b = r.b_required.map_or_else(|| EXHAUSTED_WINDOW.to_string(), |b| b.to_string());
        writeln!(out, "{},{},{},{},{},{},{}", r.family, r.n, r.m, b, r.trials, r.successes, r.wall_ms).unwrap();
    }
    out
}

/// A gnuplot script drawing `b_required` against `n` on linear and
/// log-log axes, one curve per family present in the CSV.
pub fn gnuplot_script(csv: &Path) -> String {
    let path = csv.display();
    format!(
        r#"set datafile separator ","
set key left top
set xlabel "vertices n"
set ylabel "bits required"
families = "cycle near3regular complete"
set terminal pngcairo size 1200,500
set output "{path}.png"
set multiplot layout 1,2
plot for [f in families] "{path}" every ::1 using 2:(strcol(1) eq f ? $4 : 1/0) with linespoints title f
set logscale xy
plot for [f in families] "{path}" every ::1 using 2:(strcol(1) eq f ? $4 : 1/0) with linespoints title f, \
     x**1.5 with lines dashtype 2 title "n^1.5"
unset multiplot
"#
    )
}

fn read_file(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn max_bits(l: &[Int]) -> u64 {
    l.iter().map(|x| x.bits()).max().unwrap_or(0)
}

fn print_report(result: &ReconstructionResult, m: usize, out: &mut String) {
    writeln!(out, "status: {}", result.status).unwrap();
    if let Some(g) = &result.graph {
        writeln!(out, "n: {}", g.n()).unwrap();
    }
    writeln!(out, "m: {m}").unwrap();
    if let Some(c) = result.cycle_rank {
        writeln!(out, "c: {c}").unwrap();
    }
    if let Some(k) = result.medium_count {
        writeln!(out, "medium_vectors: {k}").unwrap();
    }
    if let Some(t) = result.three_connected {
        writeln!(out, "three_connected: {t}").unwrap();
    }
    if let Some(r) = result.residual {
        writeln!(out, "residual: {r}").unwrap();
    }
    writeln!(out, "undetected_risk: {}", result.undetected_risk).unwrap();
    let t = &result.timings;
    for (stage, d) in [("relations", t.relations), ("realize", t.realize), ("orient", t.orient), ("layout", t.layout)] {
        writeln!(out, "time_{stage}_ms: {:.3}", d.as_secs_f64() * 1e3).unwrap();
    }
}

fn write_outputs(
    result: &ReconstructionResult,
    graph: Option<&PathBuf>,
    config: Option<&PathBuf>,
) -> anyhow::Result<()> {
    if let (Some(path), Some(g)) = (graph, &result.graph) {
        fs::write(path, format_graph(g)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let (Some(path), Some(q)) = (config, &result.configuration) {
        fs::write(path, format_configuration(q)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn exit_for(result: &ReconstructionResult) -> i32 {
    if result.status.is_success() {
        EXIT_SUCCESS
    } else {
        EXIT_DETECTED_FAILURE
    }
}

fn cmd_generate(args: &GenerateArgs) -> anyhow::Result<i32> {
    let g = generate_graph(args.family, args.n, derive_seed(args.seed, &[0]))?;
    let inst = sample_instance(&g, args.bits, &args.noise.model(), derive_seed(args.seed, &[1]));
    let stem =
        args.prefix.clone().unwrap_or_else(|| format!("{}-n{}-b{}-s{}", args.family, args.n, args.bits, args.seed));
    fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    for (ext, text) in [
        ("graph", format_graph(&g)),
        ("config", format_configuration(&inst.configuration)),
        ("lengths", format_integers(&inst.lengths)),
    ] {
        let path = args.out_dir.join(format!("{stem}.{ext}"));
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(EXIT_SUCCESS)
}

fn cmd_reconstruct(args: &ReconstructArgs) -> anyhow::Result<i32> {
    let l = parse_integers(&read_file(&args.lengths)?).context("lengths file")?;
    let graph =
        args.graph.as_ref().map(|p| read_file(p).and_then(|t| parse_graph(&t).context("graph file"))).transpose()?;
    let mut opts = PipelineOptions { noise_bound: args.noise_bound, ..Default::default() };
    if args.optimistic {
        let n = graph.as_ref().map(Graph::n).or(args.n).context("--optimistic needs --graph or --n")?;
        if n > l.len() + 1 {
            bail!("{n} vertices cannot span a connected graph with {} edges", l.len());
        }
        opts.selection = Selection::Shortest(l.len() + 1 - n);
    }
    let result = match &graph {
        Some(g) if args.percycle => reconstruct_labeled_percycle(g, &l, &opts)?,
        Some(g) => reconstruct_labeled(g, &l, &opts)?,
        None => reconstruct_unlabeled(&l, &opts)?,
    };
    let mut out = String::new();
    print_report(&result, l.len(), &mut out);
    print!("{out}");
    write_outputs(&result, args.output_graph.as_ref(), args.output_config.as_ref())?;
    Ok(exit_for(&result))
}

fn cmd_kbasis(args: &KbasisArgs) -> anyhow::Result<i32> {
    if args.k < 3 {
        bail!("k must be at least 3");
    }
    let l = parse_integers(&read_file(&args.lengths)?).context("lengths file")?;
    let graph =
        args.graph.as_ref().map(|p| read_file(p).and_then(|t| parse_graph(&t).context("graph file"))).transpose()?;
    let opts = PipelineOptions { noise_bound: args.noise_bound, ..Default::default() };
    let result = reconstruct_kbasis(&l, args.k, graph.as_ref(), &opts)?;
    let mut out = String::new();
    print_report(&result, l.len(), &mut out);
    writeln!(out, "k: {}", args.k).unwrap();
    writeln!(out, "bits: {}", max_bits(&l)).unwrap();
    print!("{out}");
    Ok(exit_for(&result))
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<i32> {
    let cfg = SweepConfig {
        family: args.family,
        n_range: args.n.0.clone(),
        target_rate: args.target_rate,
        trials: args.trials,
        optimistic: args.optimistic,
        noise: args.noise.model(),
        seed: args.seed,
        ensembles: args.ensembles,
        deterministic: args.deterministic,
        spot_check: !args.no_spot_check,
    };
    let rows = run_sweep(&cfg)?;
    let csv = format_csv(&rows);
    match &args.output {
        Some(path) => fs::write(path, &csv).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{csv}"),
    }
    if let Some(script) = &args.plot_script {
        let csv_path = args.output.clone().unwrap_or_else(|| PathBuf::from("sweep.csv"));
        fs::write(script, gnuplot_script(&csv_path)).with_context(|| format!("cannot write {}", script.display()))?;
    }
    Ok(EXIT_SUCCESS)
}

/// Runs a parsed command, returning the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Kbasis(a) => cmd_kbasis(a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        EXIT_INPUT_ERROR
    })
}

/// Entry point used by the binary: argument errors exit with
/// [`EXIT_INPUT_ERROR`].
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_SUCCESS };
            let _ = e.print();
            code
        }
    }
}
