// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Command-line workbench around the `qldpc` library.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, missing
//! arguments), 2 on runtime errors (invalid configs, I/O failures,
//! non-converging fits).

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qldpc::circuits::Circuit;
use qldpc::harness::{
    axis_orderings, build_circuit, csv_string, failure_rate_vs_rounds, fit_threshold,
    generate_code, materialize_code, overhead_table, prepare, render_overhead_markdown,
    CircuitKind, CodeSource, ExperimentConfig, FitPoint, FitResult, OverheadConfig,
    PreparedExperiment, run_point, CSV_COLUMNS,
};
use qldpc::layout::{layered_layout, Strategy};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "qldpc-cli",
    version,
    about = "Hypergraph-product code workbench: generate codes, build constant-depth \
             measurement circuits, lay them out in planar layers, simulate circuit \
             noise, fit the failure scaling law, and compare qubit overheads"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a (3,4) hypergraph-product code and write it as JSON.
    GenerateCode(GenerateArgs),
    /// Build a stabilizer-measurement circuit for a code file.
    BuildCircuit(BuildArgs),
    /// Compute a layered planar layout for a code file.
    Layout(LayoutArgs),
    /// Monte Carlo logical-failure estimation under circuit noise.
    Simulate(SimulateArgs),
    /// Failure rate versus number of measurement rounds, with a tail fit.
    RoundsSweep(SweepArgs),
    /// Fit the scaling law P_L = c1 (p/p_t)^(c2 k^c3) to results CSVs.
    Fit(FitArgs),
    /// Qubit-overhead comparison against a surface-code baseline.
    Table(TableArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Seed-graph scale: 4s bits, 3s checks, n = 25s^2 qubits.
    #[arg(long)]
    s: usize,
    /// Base RNG seed; candidate c draws graphs from seed+c and seed+1000+c.
    #[arg(long)]
    seed: u64,
    /// Minimum girth of each seed graph (4 always succeeds; 6 needs s >= 3).
    #[arg(long, default_value_t = 4)]
    girth: usize,
    /// Candidates to rank; the fewest-decoding-failures one wins.
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// Output JSON file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KindArg {
    Cardinal,
    Coloration,
}

impl From<KindArg> for CircuitKind {
    fn from(k: KindArg) -> CircuitKind {
        match k {
            KindArg::Cardinal => CircuitKind::Cardinal,
            KindArg::Coloration => CircuitKind::Coloration,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    /// Code JSON file.
    #[arg(long)]
    code: PathBuf,
    /// Which schedule to build.
    #[arg(long, value_enum, default_value_t = KindArg::Cardinal)]
    kind: KindArg,
    /// Write the circuit as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StrategyArg {
    #[value(name = "two_factor")]
    TwoFactor,
    Directional,
    Greedy,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::TwoFactor => Strategy::TwoFactor,
            StrategyArg::Directional => Strategy::Directional,
            StrategyArg::Greedy => Strategy::Greedy,
        }
    }
}

#[derive(Args)]
struct LayoutArgs {
    /// Code JSON file (needs product structure).
    #[arg(long)]
    code: PathBuf,
    /// Edge-partition strategy.
    #[arg(long, value_enum, default_value_t = StrategyArg::TwoFactor)]
    strategy: StrategyArg,
    /// Write the layout (positions + certified layers) as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Flags shared by `simulate` and `rounds-sweep`: an optional JSON config
/// plus per-field overrides.
#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Code JSON file (sets the code source).
    #[arg(long)]
    code: Option<PathBuf>,
    /// Physical error rate(s); repeat or comma-separate.
    #[arg(long = "p", value_delimiter = ',', num_args = 1..)]
    p: Option<Vec<f64>>,
    /// Monte Carlo trials per point.
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed for all trial streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Which schedule to measure with.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Output CSV file (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn resolve(&self, rounds: Option<usize>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => ExperimentConfig {
                code: CodeSource::File {
                    path: self
                        .code
                        .clone()
                        .context("either --config or --code is required")?,
                },
                p_list: vec![1e-3],
                trials: 1000,
                rounds: 10,
                circuit: CircuitKind::default(),
                decoder: None,
                master_seed: 0,
                out: None,
            },
        };
        if let Some(path) = &self.code {
            cfg.code = CodeSource::File { path: path.clone() };
        }
        if let Some(ps) = &self.p {
            cfg.p_list = ps.clone();
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(r) = rounds {
            cfg.rounds = r;
        }
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if let Some(kind) = self.kind {
            cfg.circuit = kind.into();
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        Ok(cfg)
    }

    /// Writes `text` to `--out` or stdout.
    fn emit(&self, text: &str, what: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
                println!("wrote {what} to {}", path.display());
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Noisy measurement rounds per trial.
    #[arg(long)]
    rounds: Option<usize>,
    /// Use this circuit JSON instead of building one from the code.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Emit one CSV row per trial (trial, seed, p, rounds, failed,
    /// failure_round_bucket) instead of aggregated rates; needs exactly
    /// one rate.
    #[arg(long)]
    per_trial: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Round counts to sweep, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    rounds_list: Vec<usize>,
}

#[derive(Args)]
struct FitArgs {
    /// Results CSV file(s) as written by `simulate`; repeatable so sizes
    /// can come from separate runs.
    #[arg(long, num_args = 1..)]
    rows: Vec<PathBuf>,
    /// Write the fit report JSON here (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// Take the scaling law from a fit report JSON instead of defaults.
    #[arg(long)]
    fit: Option<PathBuf>,
    /// Scaling-law constants (override defaults or the fit file).
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    c3: Option<f64>,
    /// Product-family threshold rate.
    #[arg(long)]
    pt: Option<f64>,
    /// Surface-model prefactor.
    #[arg(long)]
    surface_a: Option<f64>,
    /// Surface-model threshold rate.
    #[arg(long)]
    surface_pt: Option<f64>,
    /// Physical error rate.
    #[arg(long)]
    p: Option<f64>,
    /// Target logical failure rates, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    targets: Option<Vec<f64>>,
    /// Physical qubits per logical qubit of the product family.
    #[arg(long)]
    qubits_per_logical: Option<u64>,
    /// Offset o in the surface suppression exponent (d + o)/2.
    #[arg(long)]
    surface_exponent_offset: Option<f64>,
    /// Emit rows as JSON instead of a Markdown table.
    #[arg(long)]
    json: bool,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(2);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::GenerateCode(args) => run_generate(args),
        Cmd::BuildCircuit(args) => run_build(args),
        Cmd::Layout(args) => run_layout(args),
        Cmd::Simulate(args) => run_simulate(args),
        Cmd::RoundsSweep(args) => run_sweep(args),
        Cmd::Fit(args) => run_fit(args),
        Cmd::Table(args) => run_table(args),
    }
}

fn run_generate(args: GenerateArgs) -> Result<()> {
    let generated = generate_code(args.s, args.seed, args.samples, args.girth)?;
    let code = &generated.code;
    let mut file = code.to_file();
    file.meta = Some(serde_json::json!({
        "s": args.s,
        "seed": args.seed,
        "girth": args.girth,
        "samples": args.samples,
        "chosen": generated.chosen,
        "ranking_failures": generated.scores,
    }));
    fs::write(&args.out, serde_json::to_string(&file)?)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {}: n={}, k={}, stabilizers {}+{}",
        args.out.display(),
        code.n(),
        code.k(),
        code.num_x_stabs(),
        code.num_z_stabs()
    );
    if code.k() != args.s * args.s {
        println!(
            "note: k = {} differs from s^2 = {} (a seed graph is rank-deficient); \
             try another --seed",
            code.k(),
            args.s * args.s
        );
    }
    Ok(())
}

fn load_code(path: &PathBuf) -> Result<qldpc::codes::CssCode> {
    let (code, _) = materialize_code(&CodeSource::File { path: path.clone() })
        .with_context(|| format!("loading code {}", path.display()))?;
    Ok(code)
}

fn run_build(args: BuildArgs) -> Result<()> {
    let code = load_code(&args.code)?;
    let circuit = build_circuit(&code, args.kind.into())?;
    circuit.validate().context("built circuit fails validation")?;
    println!(
        "{:?} circuit: depth {}, {} cnots, {} qubits ({} data + {} ancillas)",
        args.kind,
        circuit.depth(),
        circuit.cnot_count(),
        circuit.roster.total(),
        circuit.roster.data,
        circuit.roster.x_ancillas + circuit.roster.z_ancillas,
    );
    if let Some(out) = &args.out {
        fs::write(out, serde_json::to_string(&circuit)?)
            .with_context(|| format!("writing {}", out.display()))?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn run_layout(args: LayoutArgs) -> Result<()> {
    let code = load_code(&args.code)?;
    let (ord1, ord2) = axis_orderings(&code)?;
    let layers = layered_layout(&code, &ord1, &ord2, args.strategy.into())?;
    println!(
        "{} layers (bound {}), all planar: {}, strategy used: {:?}, \
         single-layer crossings: {}",
        layers.layer_count(),
        layers.layer_bound,
        layers.layer_planar.iter().all(|&p| p),
        layers.strategy_used,
        layers.single_layer_crossings,
    );
    if let Some(out) = &args.out {
        fs::write(out, serde_json::to_string(&layers)?)
            .with_context(|| format!("writing {}", out.display()))?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

/// Prepares an experiment, honoring an explicit circuit file when given.
fn prepare_with_override(
    cfg: &ExperimentConfig,
    circuit_file: Option<&PathBuf>,
) -> Result<PreparedExperiment> {
    match circuit_file {
        None => Ok(prepare(cfg)?),
        Some(path) => {
            cfg.validate()?;
            let (code, s) = materialize_code(&cfg.code)?;
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading circuit {}", path.display()))?;
            let circuit: Circuit = serde_json::from_str(&text)
                .with_context(|| format!("parsing circuit {}", path.display()))?;
            circuit.validate().context("circuit file fails validation")?;
            let decoder = cfg
                .decoder
                .unwrap_or_else(|| qldpc::decoder::DecoderConfig::for_circuit(&circuit));
            Ok(PreparedExperiment {
                code,
                circuit,
                decoder,
                s,
            })
        }
    }
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let cfg = args.experiment.resolve(args.rounds)?;
    let prep = prepare_with_override(&cfg, args.circuit.as_ref())?;
    if args.per_trial {
        if cfg.p_list.len() != 1 {
            bail!(
                "--per-trial takes exactly one rate, got {:?}",
                cfg.p_list
            );
        }
        let p = cfg.p_list[0];
        let mut text = String::new();
        writeln!(text, "# config: {}", serde_json::to_string(&cfg)?)?;
        writeln!(text, "trial,seed,p,rounds,failed,failure_round_bucket")?;
        for trial in 0..cfg.trials {
            let bucket = prep.failure_round_bucket(p, cfg.rounds, cfg.master_seed, trial);
            writeln!(
                text,
                "{},{},{},{},{},{}",
                trial,
                cfg.master_seed,
                p,
                cfg.rounds,
                bucket.is_some(),
                bucket.map_or(String::new(), |t| t.to_string()),
            )?;
        }
        args.experiment.emit(&text, "per-trial results")?;
    } else {
        let rows: Vec<_> = cfg
            .p_list
            .iter()
            .map(|&p| run_point(&prep, p, cfg.trials, cfg.rounds, cfg.master_seed))
            .collect();
        let text = csv_string(&cfg, &rows)?;
        args.experiment.emit(&text, "results")?;
        if args.experiment.out.is_some() {
            for r in &rows {
                println!(
                    "p={}: {}/{} failures, P_L(T)={:.3e}, per round {:.3e}, CI [{:.3e}, {:.3e}]",
                    r.p, r.failures, r.trials, r.pl_t, r.pl_round, r.ci_lo, r.ci_hi
                );
            }
        }
    }
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<()> {
    let cfg = args.experiment.resolve(None)?;
    let sweep = failure_rate_vs_rounds(&cfg, &args.rounds_list)?;
    let mut text = String::new();
    writeln!(text, "# config: {}", serde_json::to_string(&cfg)?)?;
    writeln!(text, "p,rounds,trials,failures,pl_T")?;
    for r in &sweep.rows {
        writeln!(
            text,
            "{},{},{},{},{}",
            r.p, r.rounds, r.trials, r.failures, r.pl_t
        )?;
    }
    for tail in &sweep.tails {
        writeln!(
            text,
            "# tail p={}: slope={:e} stderr={:e} intercept={:e} points={}",
            tail.p, tail.slope, tail.slope_stderr, tail.intercept, tail.points
        )?;
    }
    args.experiment.emit(&text, "rounds sweep")?;
    for tail in &sweep.tails {
        println!(
            "p={}: failure added per round in the tail = {:.3e} (stderr {:.3e})",
            tail.p, tail.slope, tail.slope_stderr
        );
    }
    Ok(())
}

/// Reads FitPoints back out of a results CSV (k, p, pl_T columns).
fn parse_result_rows(text: &str, name: &str) -> Result<Vec<FitPoint>> {
    let mut points = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == CSV_COLUMNS {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 7 {
            bail!("{name}:{}: expected {CSV_COLUMNS}, got '{line}'", idx + 1);
        }
        let parse = |what: &str, s: &str| -> Result<f64> {
            s.parse::<f64>()
                .with_context(|| format!("{name}:{}: bad {what} '{s}'", idx + 1))
        };
        points.push(FitPoint {
            k: parse("k", cols[2])?,
            p: parse("p", cols[3])?,
            pl: parse("pl_T", cols[6])?,
        });
    }
    Ok(points)
}

fn run_fit(args: FitArgs) -> Result<()> {
    if args.rows.is_empty() {
        bail!("--rows needs at least one results CSV");
    }
    let mut points = Vec::new();
    for path in &args.rows {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        points.extend(parse_result_rows(&text, &path.display().to_string())?);
    }
    let fit = fit_threshold(&points)?;
    let report = serde_json::to_string_pretty(&fit)?;
    match &args.out {
        Some(path) => {
            fs::write(path, &report).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote fit report to {}", path.display());
        }
        None => println!("{report}"),
    }
    println!(
        "p_t = {:.4e}, c1 = {:.3}, c2 = {:.3}, c3 = {:.3} over {} points (rss {:.3e})",
        fit.p_t, fit.c1, fit.c2, fit.c3, fit.points, fit.rss
    );
    Ok(())
}

fn run_table(args: TableArgs) -> Result<()> {
    let mut oc = OverheadConfig::default();
    if let Some(path) = &args.fit {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading fit report {}", path.display()))?;
        let fit: FitResult = serde_json::from_str(&text)
            .with_context(|| format!("parsing fit report {}", path.display()))?;
        oc.law = fit.law();
    }
    if let Some(c1) = args.c1 {
        oc.law.c1 = c1;
    }
    if let Some(c2) = args.c2 {
        oc.law.c2 = c2;
    }
    if let Some(c3) = args.c3 {
        oc.law.c3 = c3;
    }
    if let Some(pt) = args.pt {
        oc.law.p_t = pt;
    }
    if let Some(a) = args.surface_a {
        oc.surface_a = a;
    }
    if let Some(pt) = args.surface_pt {
        oc.surface_p_t = pt;
    }
    if let Some(p) = args.p {
        oc.p = p;
    }
    if let Some(targets) = &args.targets {
        oc.targets = targets.clone();
    }
    if let Some(q) = args.qubits_per_logical {
        oc.qubits_per_logical = q;
    }
    if let Some(offset) = args.surface_exponent_offset {
        oc.surface_exponent_offset = offset;
    }
    let rows = overhead_table(&oc)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        print!("{}", render_overhead_markdown(&rows));
    }
    Ok(())
}
