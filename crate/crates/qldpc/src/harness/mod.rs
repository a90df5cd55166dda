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

//! Monte Carlo experiment orchestration and analysis.
//!
//! An [`ExperimentConfig`] names a code (generated from seed graphs or
//! loaded from disk), a measurement schedule, a decoder, a grid of physical
//! error rates, and a trial budget. [`run_experiment`] materializes the
//! code, builds the schedule, fans trials out across threads (under the
//! `parallel` feature; a sequential path otherwise — both produce identical
//! counts because a trial depends only on its index), and aggregates each
//! rate into a [`ResultRow`] with a Wilson 95% confidence interval. Results
//! serialize to CSV with the generating config embedded in a comment
//! header, so any results file can be reproduced from its own first line
//! ([`parse_csv_config`]).
//!
//! [`failure_rate_vs_rounds`] sweeps the round count at each rate and fits
//! the tail slope. [`fit_threshold`] fits the empirical scaling law
//! `P_L(p, k) = c1 * (p / p_t)^(c2 * k^c3)` to aggregated rows, and
//! [`overhead_table`] turns such a law into qubit-overhead comparisons
//! against a surface-code baseline.

mod fit;
mod table;

pub use fit::{fit_threshold, FitError, FitPoint, FitResult, ScalingLaw};
pub use table::{overhead_table, render_overhead_markdown, OverheadConfig, OverheadRow};

use crate::circuits::{cardinal_circuit, coloration_circuit, Basis, Circuit};
use crate::codes::{
    classify, hgp, random_biregular, syndrome, BipartiteGraph, CodeError, CodeFile, CssCode,
    ErrorClass, GenerateError, PauliOperator,
};
use crate::decoder::{decode_history, ssf_pass, Classification, DecoderConfig, DecoderSide};
use crate::gf2::Gf2Matrix;
use crate::layout::{
    assign_directions, cycle_walk_ordering, find_balanced_ordering, LayoutError, SearchConfig,
    VertexOrdering,
};
use crate::noise::{simulate, NoiseModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("code generation failed")]
    Generate(#[from] GenerateError),
    #[error("code rejected")]
    Code(#[from] CodeError),
    #[error("layout failed")]
    Layout(#[from] LayoutError),
    #[error("fit failed")]
    Fit(#[from] FitError),
    #[error("i/o error")]
    Io(#[from] std::io::Error),
    #[error("JSON round-trip failed")]
    Json(#[from] serde_json::Error),
    #[error("not a results file produced by this tool: {0}")]
    CsvHeader(String),
}

/// Attempts given to the bi-regular graph sampler per seed graph.
const GENERATE_BUDGET: usize = 200;
/// The second seed graph of a pair uses `seed + GRAPH_SEED_GAP`.
const GRAPH_SEED_GAP: u64 = 1000;
/// I.i.d. bit-flip rate used to score candidate codes in the ranking pass.
const RANK_ERROR_RATE: f64 = 0.05;
/// Trials per candidate in the ranking pass.
const RANK_TRIALS: u64 = 200;
/// Ranking draws from its own seed space so it never collides with
/// simulation streams.
const RANK_SEED_SALT: u64 = 0x52414e4b;
/// Annealing seeds for the two axis orderings of the cardinal schedule.
const ORDERING_SEEDS: (u64, u64) = (132, 159);
/// Rounds-sweep tail: the slope is fitted over round counts >= this.
pub const TAIL_START: usize = 6;

/// Where the code under test comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CodeSource {
    /// Hypergraph product of two random (3,4)-biregular seed graphs with
    /// `4s` bits and `3s` checks each, drawn from `seed` and
    /// `seed + 1000`. With `samples > 1`, candidate `c` draws from
    /// `seed + c` / `seed + 1000 + c` and the candidate with the fewest
    /// ranking failures (i.i.d. bit-flips decoded by small-set flip alone)
    /// wins, ties to the lowest index.
    Generate {
        s: usize,
        seed: u64,
        #[serde(default = "default_samples")]
        samples: usize,
        /// Minimum girth demanded of each seed graph. 4 (no repeated
        /// edges) is always attainable for the (3,4) family; 6 (no
        /// four-cycles) needs s >= 3 by counting.
        #[serde(default = "default_girth")]
        girth: usize,
    },
    /// JSON code file as written by [`crate::codes::CodeFile`]. A numeric
    /// `s` in its `meta` object becomes the size label in result rows.
    File { path: PathBuf },
}

fn default_samples() -> usize {
    1
}

fn default_girth() -> usize {
    4
}

/// Which measurement schedule the experiment runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitKind {
    /// Compass-direction schedule; needs product structure.
    #[default]
    Cardinal,
    /// Edge-coloration schedule measuring both bases.
    Coloration,
}

/// A full experiment: one code, a rate grid, and a trial budget per rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub code: CodeSource,
    /// Physical error rates to sweep. Zero is allowed for noiseless smoke
    /// runs; 1 is not.
    pub p_list: Vec<f64>,
    /// Monte Carlo trials per rate.
    pub trials: u64,
    /// Noisy measurement rounds per trial.
    pub rounds: usize,
    #[serde(default)]
    pub circuit: CircuitKind,
    /// Decoder knobs; when absent, defaults with the prior depth taken
    /// from the built circuit.
    #[serde(default)]
    pub decoder: Option<DecoderConfig>,
    /// Seeds every trial stream; same seed, same results, byte for byte.
    pub master_seed: u64,
    /// When set, [`run_experiment`] also writes the CSV here.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::InvalidConfig(
                "trials must be at least 1".into(),
            ));
        }
        if self.rounds == 0 {
            return Err(HarnessError::InvalidConfig(
                "rounds must be at least 1".into(),
            ));
        }
        if self.p_list.is_empty() {
            return Err(HarnessError::InvalidConfig(
                "p_list must name at least one rate".into(),
            ));
        }
        for &p in &self.p_list {
            if !p.is_finite() || !(0.0..1.0).contains(&p) {
                return Err(HarnessError::InvalidConfig(format!(
                    "physical error rate {p} outside [0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// A generated code together with how the ranking pass chose it.
#[derive(Clone, Debug)]
pub struct GeneratedCode {
    pub code: CssCode,
    /// Scale factor of the seed graphs (the size label of result rows).
    pub s: usize,
    /// Index of the winning candidate.
    pub chosen: usize,
    /// Ranking failure counts per candidate; empty when only one candidate
    /// was drawn.
    pub scores: Vec<u64>,
}

/// Builds a product code from random (3,4)-biregular seed graphs, keeping
/// the best of `samples` candidates under the ranking pass.
pub fn generate_code(
    s: usize,
    seed: u64,
    samples: usize,
    girth: usize,
) -> Result<GeneratedCode, HarnessError> {
    let samples = samples.max(1);
    let mut scores = Vec::new();
    let mut best: Option<(u64, usize, CssCode)> = None;
    for c in 0..samples as u64 {
        let g1 = full_rank_biregular(s, girth, seed + c)?;
        let g2 = full_rank_biregular(s, girth, seed + GRAPH_SEED_GAP + c)?;
        let code = hgp(&g1, &g2);
        if samples == 1 {
            return Ok(GeneratedCode {
                code,
                s,
                chosen: 0,
                scores,
            });
        }
        let score = ranking_failures(&code, seed ^ RANK_SEED_SALT, c);
        scores.push(score);
        if best.as_ref().map_or(true, |(b, _, _)| score < *b) {
            best = Some((score, c as usize, code));
        }
    }
    let (_, chosen, code) = best.expect("at least one candidate");
    Ok(GeneratedCode {
        code,
        s,
        chosen,
        scores,
    })
}

/// Failure count of small-set flip alone against i.i.d. bit-flip noise:
/// the score used to compare candidate codes.
fn ranking_failures(code: &CssCode, rank_seed: u64, candidate: u64) -> u64 {
    let side = DecoderSide::for_x_errors(code);
    let mut rng = ChaCha8Rng::seed_from_u64(rank_seed);
    rng.set_stream(candidate);
    let mut failures = 0u64;
    for _ in 0..RANK_TRIALS {
        let mut e = PauliOperator::identity(code.n());
        for q in 0..code.n() {
            if rng.gen_bool(RANK_ERROR_RATE) {
                e.x.set(q, true);
            }
        }
        let s = syndrome(code, &e).1;
        let ssf = ssf_pass(&side, &s);
        if !ssf.converged {
            failures += 1;
            continue;
        }
        e.x.xor_assign(&ssf.flips);
        if classify(code, &e) == ErrorClass::Logical {
            failures += 1;
        }
    }
    failures
}

/// Loads or generates the code named by `source`; returns it with its size
/// label (0 when a file carries no `s` in `meta`).
pub fn materialize_code(source: &CodeSource) -> Result<(CssCode, usize), HarnessError> {
    match source {
        CodeSource::Generate {
            s,
            seed,
            samples,
            girth,
        } => {
            let generated = generate_code(*s, *seed, *samples, *girth)?;
            Ok((generated.code, generated.s))
        }
        CodeSource::File { path } => {
            let text = std::fs::read_to_string(path)?;
            let file: CodeFile = serde_json::from_str(&text)?;
            let s = file
                .meta
                .as_ref()
                .and_then(|m| m.get("s"))
                .and_then(|v| v.as_u64())
                .unwrap_or(0) as usize;
            Ok((CssCode::from_file(&file)?, s))
        }
    }
}

/// Recognizes the canonical cycle Tanner graph (check `j` touching bits
/// `j` and `j+1 mod d`), whose optimal walk ordering is known in closed
/// form.
fn canonical_cycle(g: &BipartiteGraph) -> Option<usize> {
    let d = g.bits();
    if d < 2 || g.checks() != d {
        return None;
    }
    for c in 0..d as u32 {
        let mut have = g.check_neighbors(c).to_vec();
        have.sort_unstable();
        let mut want = vec![c, (c + 1) % d as u32];
        want.sort_unstable();
        if have != want {
            return None;
        }
    }
    Some(d)
}

fn ordering_search_config() -> SearchConfig {
    SearchConfig {
        swaps: 20_000,
        restarts: 2,
        ..SearchConfig::default()
    }
}

fn axis_ordering(g: &BipartiteGraph, seed: u64) -> VertexOrdering {
    match canonical_cycle(g) {
        Some(d) => cycle_walk_ordering(d),
        None => find_balanced_ordering(g, seed, &ordering_search_config()).ordering,
    }
}

/// Balanced axis orderings for a product code: the closed-form walk for
/// cycle seed graphs, an annealed search otherwise. Deterministic in the
/// code alone.
pub fn axis_orderings(code: &CssCode) -> Result<(VertexOrdering, VertexOrdering), HarnessError> {
    let hgp = code.hgp().ok_or_else(|| {
        HarnessError::InvalidConfig(
            "the cardinal schedule and the layered layout need a product code with seed graphs"
                .into(),
        )
    })?;
    Ok((
        axis_ordering(&hgp.g1, ORDERING_SEEDS.0),
        axis_ordering(&hgp.g2, ORDERING_SEEDS.1),
    ))
}

/// Builds the measurement schedule of the requested kind for `code`.
pub fn build_circuit(code: &CssCode, kind: CircuitKind) -> Result<Circuit, HarnessError> {
    match kind {
        CircuitKind::Coloration => Ok(coloration_circuit(code, Basis::Both)),
        CircuitKind::Cardinal => {
            let (ord1, ord2) = axis_orderings(code)?;
            let dt = assign_directions(code, &ord1, &ord2)?;
            Ok(cardinal_circuit(code, &dt))
        }
    }
}

/// A config resolved into concrete objects, ready to run trials.
#[derive(Clone, Debug)]
pub struct PreparedExperiment {
    pub code: CssCode,
    pub circuit: Circuit,
    pub decoder: DecoderConfig,
    /// Size label for result rows; 0 when unknown.
    pub s: usize,
}

impl PreparedExperiment {
    /// Runs one trial at rate `p` and reports whether it fails (a logical
    /// error slips through, or the decoder gives up).
    pub fn trial_fails(&self, p: f64, rounds: usize, master_seed: u64, trial: u64) -> bool {
        let noise = NoiseModel::new(p);
        let record = simulate(&self.circuit, &self.code, &noise, rounds, master_seed, trial);
        let outcome = decode_history(&self.code, &record, p, &self.decoder);
        matches!(
            outcome.classification,
            Classification::LogicalFailure | Classification::NoConvergence
        )
    }

    /// Earliest round count `t <= rounds` at which this trial already
    /// fails, or `None` when it succeeds at the full count. Well defined
    /// because a trial's fault stream depends only on (master_seed, trial):
    /// shortening the run replays a prefix of the same faults.
    pub fn failure_round_bucket(
        &self,
        p: f64,
        rounds: usize,
        master_seed: u64,
        trial: u64,
    ) -> Option<usize> {
        if !self.trial_fails(p, rounds, master_seed, trial) {
            return None;
        }
        for t in 1..rounds {
            if self.trial_fails(p, t, master_seed, trial) {
                return Some(t);
            }
        }
        Some(rounds)
    }
}

/// Resolves a config: materializes the code, builds the schedule, and
/// fixes the decoder (defaulting its prior depth to the circuit depth).
pub fn prepare(cfg: &ExperimentConfig) -> Result<PreparedExperiment, HarnessError> {
    cfg.validate()?;
    let (code, s) = materialize_code(&cfg.code)?;
    let circuit = build_circuit(&code, cfg.circuit)?;
    let decoder = cfg
        .decoder
        .unwrap_or_else(|| DecoderConfig::for_circuit(&circuit));
    Ok(PreparedExperiment {
        code,
        circuit,
        decoder,
        s,
    })
}

#[cfg(feature = "parallel")]
fn count_failures(trials: u64, fails: impl Fn(u64) -> bool + Sync) -> u64 {
    use rayon::prelude::*;
    (0..trials).into_par_iter().filter(|&t| fails(t)).count() as u64
}

/// Sequential stand-in with the same contract: the count is a sum of
/// independent per-trial outcomes, so both paths agree exactly.
#[cfg(not(feature = "parallel"))]
fn count_failures(trials: u64, fails: impl Fn(u64) -> bool) -> u64 {
    (0..trials).filter(|&t| fails(t)).count() as u64
}

/// One aggregated experiment point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// Size label of the code (0 when unknown).
    pub s: usize,
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    /// Failure probability by the full round count T.
    pub pl_t: f64,
    /// Per-round estimate P_L(T)/T.
    pub pl_round: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Wilson 95% score interval for `failures` out of `trials`.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0, "interval needs at least one trial");
    assert!(failures <= trials, "more failures than trials");
    // Two-sided 95%: the 0.975 quantile of the standard normal.
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p_hat = failures as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = (Z / denom) * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Per-round failure estimate P_L(T)/T. For any failure curve of the form
/// c + q*T with c, q >= 0 this is >= q, so it never understates the true
/// per-round rate.
pub fn per_round_rate(pl_t: f64, rounds: usize) -> f64 {
    assert!(rounds > 0, "per-round rate needs at least one round");
    pl_t / rounds as f64
}

/// Runs `trials` trials at rate `p` and aggregates them into a row.
pub fn run_point(
    prep: &PreparedExperiment,
    p: f64,
    trials: u64,
    rounds: usize,
    master_seed: u64,
) -> ResultRow {
    let failures = count_failures(trials, |trial| prep.trial_fails(p, rounds, master_seed, trial));
    let pl_t = failures as f64 / trials as f64;
    let (ci_lo, ci_hi) = wilson_interval(failures, trials);
    ResultRow {
        s: prep.s,
        n: prep.code.n(),
        k: prep.code.k(),
        p,
        trials,
        failures,
        pl_t,
        pl_round: per_round_rate(pl_t, rounds),
        ci_lo,
        ci_hi,
    }
}

/// Runs the full rate grid of `cfg`; also writes the CSV when `cfg.out`
/// is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    let prep = prepare(cfg)?;
    let rows: Vec<ResultRow> = cfg
        .p_list
        .iter()
        .map(|&p| run_point(&prep, p, cfg.trials, cfg.rounds, cfg.master_seed))
        .collect();
    if let Some(path) = &cfg.out {
        let mut file = std::fs::File::create(path)?;
        write_csv(cfg, &rows, &mut file)?;
    }
    Ok(rows)
}

/// Column header of every results CSV.
pub const CSV_COLUMNS: &str = "s,n,k,p,trials,failures,pl_T,pl_round,ci_lo,ci_hi";

/// Writes rows as CSV, prefixed by a comment line carrying the generating
/// config as JSON.
pub fn write_csv(
    cfg: &ExperimentConfig,
    rows: &[ResultRow],
    w: &mut impl Write,
) -> Result<(), HarnessError> {
    writeln!(w, "# config: {}", serde_json::to_string(cfg)?)?;
    writeln!(w, "{CSV_COLUMNS}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.s, r.n, r.k, r.p, r.trials, r.failures, r.pl_t, r.pl_round, r.ci_lo, r.ci_hi
        )?;
    }
    Ok(())
}

/// [`write_csv`] into a string.
pub fn csv_string(cfg: &ExperimentConfig, rows: &[ResultRow]) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    write_csv(cfg, rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

/// Recovers the generating config from a results CSV, so the file can be
/// re-run from its own header.
pub fn parse_csv_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let first = text
        .lines()
        .next()
        .ok_or_else(|| HarnessError::CsvHeader("empty file".into()))?;
    let json = first
        .strip_prefix("# config: ")
        .ok_or_else(|| HarnessError::CsvHeader("first line is not a '# config: ' comment".into()))?;
    Ok(serde_json::from_str(json)?)
}

/// One point of a rounds sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundsRow {
    pub p: f64,
    pub rounds: usize,
    pub trials: u64,
    pub failures: u64,
    pub pl_t: f64,
}

/// Straight-line fit of the sweep tail (rounds >= [`TAIL_START`]) at one
/// rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub p: f64,
    /// Failure probability added per round in the tail.
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; infinite with fewer than three points.
    pub slope_stderr: f64,
    pub points: usize,
}

/// Result of [`failure_rate_vs_rounds`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundsSweep {
    pub rows: Vec<RoundsRow>,
    /// One tail fit per rate that has at least two tail points.
    pub tails: Vec<TailFit>,
}

/// Ordinary least squares for y = intercept + slope * x.
fn least_squares_line(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let r = y - (intercept + slope * x);
                r * r
            })
            .sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    Some((slope, intercept, stderr))
}

/// Repeats the experiment at every round count in `t_list` and fits the
/// failure-probability slope over the tail (rounds >= [`TAIL_START`]) per
/// rate. Trials share noise-stream prefixes across round counts, so at a
/// fixed seed the sweep tracks one population of fault histories.
pub fn failure_rate_vs_rounds(
    cfg: &ExperimentConfig,
    t_list: &[usize],
) -> Result<RoundsSweep, HarnessError> {
    if t_list.is_empty() {
        return Err(HarnessError::InvalidConfig(
            "round sweep needs at least one round count".into(),
        ));
    }
    if t_list.iter().any(|&t| t == 0) {
        return Err(HarnessError::InvalidConfig(
            "round counts must be at least 1".into(),
        ));
    }
    let prep = prepare(cfg)?;
    let mut rows = Vec::with_capacity(cfg.p_list.len() * t_list.len());
    let mut tails = Vec::new();
    for &p in &cfg.p_list {
        for &t in t_list {
            let failures =
                count_failures(cfg.trials, |trial| prep.trial_fails(p, t, cfg.master_seed, trial));
            rows.push(RoundsRow {
                p,
                rounds: t,
                trials: cfg.trials,
                failures,
                pl_t: failures as f64 / cfg.trials as f64,
            });
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| r.p == p && r.rounds >= TAIL_START)
            .map(|r| (r.rounds as f64, r.pl_t))
            .unzip();
        if let Some((slope, intercept, slope_stderr)) = least_squares_line(&xs, &ys) {
            tails.push(TailFit {
                p,
                slope,
                intercept,
                slope_stderr,
                points: xs.len(),
            });
        }
    }
    Ok(RoundsSweep { rows, tails })
}

impl From<&ResultRow> for FitPoint {
    fn from(r: &ResultRow) -> FitPoint {
        FitPoint {
            k: r.k as f64,
            p: r.p,
            pl: r.pl_t,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::toric;
    use proptest::prelude::*;

    fn write_code_file(code: &CssCode, meta: Option<serde_json::Value>) -> tempfile::NamedTempFile {
        let mut file = code.to_file();
        file.meta = meta;
        let mut tmp = tempfile::NamedTempFile::new().expect("temp file");
        tmp.write_all(serde_json::to_string(&file).unwrap().as_bytes())
            .expect("write code file");
        tmp
    }

    fn small_generated_config() -> ExperimentConfig {
        ExperimentConfig {
            code: CodeSource::Generate {
                s: 2,
                seed: 11,
                samples: 1,
                girth: 4,
            },
            p_list: vec![0.004],
            trials: 60,
            rounds: 2,
            circuit: CircuitKind::Cardinal,
            decoder: None,
            master_seed: 9,
            out: None,
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let base = small_generated_config();
        let cases: Vec<(&str, ExperimentConfig)> = vec![
            ("no trials", {
                let mut c = base.clone();
                c.trials = 0;
                c
            }),
            ("no rounds", {
                let mut c = base.clone();
                c.rounds = 0;
                c
            }),
            ("empty rate grid", {
                let mut c = base.clone();
                c.p_list.clear();
                c
            }),
            ("rate of one", {
                let mut c = base.clone();
                c.p_list = vec![1.0];
                c
            }),
            ("negative rate", {
                let mut c = base.clone();
                c.p_list = vec![-0.5];
                c
            }),
        ];
        for (what, cfg) in cases {
            assert!(
                matches!(cfg.validate(), Err(HarnessError::InvalidConfig(_))),
                "{what} should be rejected"
            );
        }
        assert!(base.validate().is_ok());
    }

    #[test]
    fn zero_noise_never_fails() {
        let mut cfg = small_generated_config();
        cfg.p_list = vec![0.0];
        let rows = run_experiment(&cfg).expect("experiment runs");
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.failures, 0);
        assert_eq!(row.pl_t, 0.0);
        assert_eq!(row.pl_round, 0.0);
        assert_eq!(row.ci_lo, 0.0);
        assert_eq!((row.n, row.k, row.s), (100, 4, 2));
    }

    #[test]
    fn a_noisy_toric_stand_in_fails_sometimes_but_not_always() {
        let tmp = write_code_file(&toric(3), None);
        let cfg = ExperimentConfig {
            code: CodeSource::File {
                path: tmp.path().to_path_buf(),
            },
            p_list: vec![0.01],
            trials: 600,
            rounds: 3,
            circuit: CircuitKind::Cardinal,
            decoder: None,
            master_seed: 7,
            out: None,
        };
        let rows = run_experiment(&cfg).expect("experiment runs");
        let row = &rows[0];
        assert_eq!((row.n, row.k, row.s), (18, 2, 0));
        assert!(row.failures > 0, "p=1% on distance 3 must fail sometimes");
        assert!(row.failures < row.trials, "and also succeed sometimes");
        assert!(row.ci_lo > 0.0 && row.ci_hi < 1.0);
        assert!(
            row.ci_hi - row.ci_lo < row.pl_t,
            "600 trials should pin the rate tighter than its own size: ({}, {}) vs {}",
            row.ci_lo,
            row.ci_hi,
            row.pl_t
        );
        assert_eq!(row.pl_round, row.pl_t / 3.0);
        assert!(row.ci_lo <= row.pl_t && row.pl_t <= row.ci_hi);
    }

    #[test]
    fn same_config_reproduces_the_csv_byte_for_byte() {
        let cfg = small_generated_config();
        let a = csv_string(&cfg, &run_experiment(&cfg).unwrap()).unwrap();
        let b = csv_string(&cfg, &run_experiment(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);

        // The header alone is enough to reproduce the body.
        let recovered = parse_csv_config(&a).expect("header parses");
        assert_eq!(recovered, cfg);
        let c = csv_string(&recovered, &run_experiment(&recovered).unwrap()).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn csv_shape_is_stable() {
        let cfg = small_generated_config();
        let rows = vec![ResultRow {
            s: 2,
            n: 100,
            k: 4,
            p: 0.004,
            trials: 60,
            failures: 3,
            pl_t: 0.05,
            pl_round: 0.025,
            ci_lo: 0.017,
            ci_hi: 0.137,
        }];
        let text = csv_string(&cfg, &rows).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# config: {"));
        assert_eq!(
            lines.next().unwrap(),
            "s,n,k,p,trials,failures,pl_T,pl_round,ci_lo,ci_hi"
        );
        assert_eq!(lines.next().unwrap(), "2,100,4,0.004,60,3,0.05,0.025,0.017,0.137");
        assert!(lines.next().is_none());
    }

    #[test]
    fn foreign_files_are_rejected() {
        assert!(matches!(
            parse_csv_config(""),
            Err(HarnessError::CsvHeader(_))
        ));
        assert!(matches!(
            parse_csv_config("s,n,k\n1,2,3\n"),
            Err(HarnessError::CsvHeader(_))
        ));
        assert!(matches!(
            parse_csv_config("# config: not json"),
            Err(HarnessError::Json(_))
        ));
    }

    #[test]
    fn ranking_is_deterministic_and_picks_the_best_scorer() {
        let a = generate_code(2, 11, 3, 4).expect("generation succeeds");
        let b = generate_code(2, 11, 3, 4).expect("generation succeeds");
        assert_eq!(a.scores, b.scores);
        assert_eq!(a.chosen, b.chosen);
        assert_eq!(a.scores.len(), 3);
        let best = *a.scores.iter().min().unwrap();
        assert_eq!(a.scores[a.chosen], best);
        assert_eq!(
            a.scores.iter().position(|&v| v == best).unwrap(),
            a.chosen,
            "ties must go to the lowest candidate index"
        );

        // The winner is exactly the code regeneration of that candidate
        // produces on its own.
        let replay = generate_code(2, 11 + a.chosen as u64, 1, 4).unwrap();
        assert_eq!(
            serde_json::to_string(&replay.code.to_file()).unwrap(),
            serde_json::to_string(&a.code.to_file()).unwrap()
        );
    }

    #[test]
    fn file_codes_keep_their_size_label() {
        let labeled = write_code_file(&toric(3), Some(serde_json::json!({ "s": 7 })));
        let (_, s) = materialize_code(&CodeSource::File {
            path: labeled.path().to_path_buf(),
        })
        .unwrap();
        assert_eq!(s, 7);

        let unlabeled = write_code_file(&toric(3), None);
        let (_, s) = materialize_code(&CodeSource::File {
            path: unlabeled.path().to_path_buf(),
        })
        .unwrap();
        assert_eq!(s, 0);
    }

    #[test]
    fn zero_noise_rounds_sweep_is_flat_zero() {
        let mut cfg = small_generated_config();
        cfg.p_list = vec![0.0];
        cfg.trials = 20;
        let sweep = failure_rate_vs_rounds(&cfg, &[1, 2, 3]).expect("sweep runs");
        assert_eq!(sweep.rows.len(), 3);
        assert!(sweep.rows.iter().all(|r| r.failures == 0 && r.pl_t == 0.0));
        assert!(
            sweep.tails.is_empty(),
            "no tail fit below {TAIL_START} rounds"
        );
    }

    #[test]
    fn rounds_sweeps_reject_empty_or_zero_round_lists() {
        let cfg = small_generated_config();
        assert!(matches!(
            failure_rate_vs_rounds(&cfg, &[]),
            Err(HarnessError::InvalidConfig(_))
        ));
        assert!(matches!(
            failure_rate_vs_rounds(&cfg, &[2, 0]),
            Err(HarnessError::InvalidConfig(_))
        ));
    }

    #[test]
    fn failure_rate_grows_with_rounds() {
        let tmp = write_code_file(&toric(3), None);
        let cfg = ExperimentConfig {
            code: CodeSource::File {
                path: tmp.path().to_path_buf(),
            },
            p_list: vec![0.004],
            trials: 2000,
            rounds: 1,
            circuit: CircuitKind::Cardinal,
            decoder: None,
            master_seed: 21,
            out: None,
        };
        let sweep = failure_rate_vs_rounds(&cfg, &[1, 4, 8]).expect("sweep runs");
        let pl: Vec<f64> = sweep.rows.iter().map(|r| r.pl_t).collect();
        for w in pl.windows(2) {
            // Statistical claim, so allow three binomial sigmas of slack.
            let sigma = (w[1].max(w[0]) * 1.0 / 2000.0_f64).sqrt().max(1.0 / 2000.0);
            assert!(
                w[1] >= w[0] - 3.0 * sigma,
                "failure rate should not drop with more rounds: {pl:?}"
            );
        }
        assert!(pl[2] > pl[0], "eight rounds must fail more than one");
    }

    #[test]
    fn tail_slope_is_reported_for_long_sweeps() {
        let tmp = write_code_file(&toric(3), None);
        let cfg = ExperimentConfig {
            code: CodeSource::File {
                path: tmp.path().to_path_buf(),
            },
            p_list: vec![0.004],
            trials: 400,
            rounds: 1,
            circuit: CircuitKind::Cardinal,
            decoder: None,
            master_seed: 22,
            out: None,
        };
        let sweep = failure_rate_vs_rounds(&cfg, &[6, 8, 10]).expect("sweep runs");
        assert_eq!(sweep.tails.len(), 1);
        let tail = &sweep.tails[0];
        assert_eq!(tail.points, 3);
        assert!(tail.slope.is_finite() && tail.slope_stderr.is_finite());
        assert!(
            tail.slope > -0.01,
            "failure probability per round should not shrink: slope {}",
            tail.slope
        );
    }

    #[test]
    #[ignore = "statistical tier: ~1e4 trials x 13 rounds"]
    fn failure_rate_is_monotone_in_rounds_at_scale() {
        let tmp = write_code_file(&toric(3), None);
        let cfg = ExperimentConfig {
            code: CodeSource::File {
                path: tmp.path().to_path_buf(),
            },
            p_list: vec![0.003],
            trials: 10_000,
            rounds: 1,
            circuit: CircuitKind::Cardinal,
            decoder: None,
            master_seed: 23,
            out: None,
        };
        let sweep = failure_rate_vs_rounds(&cfg, &[1, 3, 9]).expect("sweep runs");
        let pl: Vec<f64> = sweep.rows.iter().map(|r| r.pl_t).collect();
        assert!(
            pl[0] <= pl[1] && pl[1] <= pl[2],
            "monotone failure rates expected at 1e4 trials: {pl:?}"
        );
    }

    #[test]
    fn wilson_interval_matches_hand_checked_values() {
        let (lo, hi) = wilson_interval(5, 100);
        assert!((lo - 0.02154).abs() < 5e-4, "lo = {lo}");
        assert!((hi - 0.11175).abs() < 5e-4, "hi = {hi}");

        let (lo, hi) = wilson_interval(0, 50);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.10);

        let (lo, hi) = wilson_interval(50, 50);
        assert!(lo > 0.90 && lo < 1.0);
        assert_eq!(hi, 1.0);
    }

    proptest! {
        #[test]
        fn wilson_interval_brackets_the_point_estimate(
            failures in 0u64..=400,
            extra in 0u64..=4000,
        ) {
            let trials = failures + extra.max(1);
            let (lo, hi) = wilson_interval(failures, trials);
            let p_hat = failures as f64 / trials as f64;
            prop_assert!((0.0..=1.0).contains(&lo));
            prop_assert!((0.0..=1.0).contains(&hi));
            prop_assert!(lo <= p_hat + 1e-12);
            prop_assert!(p_hat <= hi + 1e-12);
        }

        #[test]
        fn per_round_estimate_never_understates_a_linear_growth_rate(
            c in 0.0f64..0.05,
            q in 0.0f64..0.05,
        ) {
            // A failure curve c + q*T evaluated at T = 10, then divided by
            // the round count, must bound the true per-round increment q.
            let pl_10 = c + q * 10.0;
            prop_assert!(per_round_rate(pl_10, 10) >= q - 1e-12);
        }
    }
}
