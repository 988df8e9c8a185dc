//! Experiment orchestration: instance generation, the plurality success
//! metric with its error bars, sweep execution, and result persistence.
//!
//! Determinism contract: the master seed fully determines every result
//! through the derivation tree (seed -> instance set, seed -> point ->
//! instance -> shot). Workers only change scheduling, never output.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{expected_outputs, ArithOp, DepthSpec, QInteger};
use crate::circuit::Circuit;
use crate::engine::{run_shots_split, CompiledCircuit, SplitState};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::seeding::{mix, rng_from, TAG_INSTANCE, TAG_INSTANCES, TAG_POINT};
use crate::sim::CountsMap;

/// Operand superposition orders, written `x:y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern {
    #[serde(rename = "1:1")]
    OneOne,
    #[serde(rename = "1:2")]
    OneTwo,
    #[serde(rename = "2:2")]
    TwoTwo,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::OneOne, Pattern::OneTwo, Pattern::TwoTwo];

    /// (x order, y order). For addition the order-2 operand of `1:2` is the
    /// register being updated, y.
    pub fn orders(&self) -> (usize, usize) {
        match self {
            Pattern::OneOne => (1, 1),
            Pattern::OneTwo => (1, 2),
            Pattern::TwoTwo => (2, 2),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Pattern::OneOne => "1:1",
            Pattern::OneTwo => "1:2",
            Pattern::TwoTwo => "2:2",
        }
    }

    fn seed_word(&self) -> u64 {
        match self {
            Pattern::OneOne => 11,
            Pattern::OneTwo => 12,
            Pattern::TwoTwo => 22,
        }
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1:1" => Ok(Pattern::OneOne),
            "1:2" => Ok(Pattern::OneTwo),
            "2:2" => Ok(Pattern::TwoTwo),
            _ => Err(Error::Parse(format!("bad pattern `{s}` (expected 1:1, 1:2 or 2:2)"))),
        }
    }
}

/// Which gate-error rate the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorAxis {
    #[serde(rename = "1q")]
    OneQ,
    #[serde(rename = "2q")]
    TwoQ,
}

impl ErrorAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorAxis::OneQ => "1q",
            ErrorAxis::TwoQ => "2q",
        }
    }

    pub fn model(&self, rate: f64, rz_noisy: bool) -> NoiseModel {
        let mut m = match self {
            ErrorAxis::OneQ => NoiseModel::depolarizing(rate, 0.0),
            ErrorAxis::TwoQ => NoiseModel::depolarizing(0.0, rate),
        };
        m.rz_noisy = rz_noisy;
        m
    }

    /// Default sweep grid (zero-noise column included).
    pub fn default_rates(&self) -> Vec<f64> {
        match self {
            ErrorAxis::OneQ => vec![0.0, 0.002, 0.003, 0.004, 0.005, 0.006, 0.007, 0.008, 0.009, 0.010],
            ErrorAxis::TwoQ => vec![0.0, 0.005, 0.007, 0.010, 0.015, 0.020],
        }
    }

    fn seed_word(&self) -> u64 {
        match self {
            ErrorAxis::OneQ => 1,
            ErrorAxis::TwoQ => 2,
        }
    }
}

impl std::str::FromStr for ErrorAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1q" => Ok(ErrorAxis::OneQ),
            "2q" => Ok(ErrorAxis::TwoQ),
            _ => Err(Error::Parse(format!("bad error axis `{s}` (expected 1q or 2q)"))),
        }
    }
}

impl std::fmt::Display for ErrorAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Add,
    Multiply,
}

fn default_true() -> bool {
    true
}

fn default_depths() -> Vec<DepthSpec> {
    vec![
        DepthSpec::Fixed(1),
        DepthSpec::Fixed(2),
        DepthSpec::Fixed(3),
        DepthSpec::Fixed(4),
        DepthSpec::Full,
    ]
}

fn default_instances() -> usize {
    200
}

fn default_shots() -> u64 {
    2048
}

/// One sweep definition. The JSON config file mirrors these field names in
/// snake_case; omitted fields take the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub op: OpKind,
    pub n: usize,
    /// Second multiplicand width (multiply only, defaults to n).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Modular (wraparound) addition; ignored for multiply.
    #[serde(default = "default_true")]
    pub modular: bool,
    pub pattern: Pattern,
    #[serde(default = "default_depths")]
    pub depths: Vec<DepthSpec>,
    pub error_axis: ErrorAxis,
    /// Sweep grid; defaults to the axis grid including the zero-noise column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_rates: Option<Vec<f64>>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    /// Whether RZ incurs 1q noise (false models virtual-Z hardware).
    #[serde(default = "default_true")]
    pub rz_noisy: bool,
}

impl ExperimentConfig {
    pub fn arith_op(&self) -> ArithOp {
        match self.op {
            OpKind::Add => ArithOp::Add { n: self.n, modular: self.modular },
            OpKind::Multiply => ArithOp::Multiply { n: self.n, m: self.m.unwrap_or(self.n) },
        }
    }

    pub fn rates(&self) -> Vec<f64> {
        self.error_rates.clone().unwrap_or_else(|| self.error_axis.default_rates())
    }

    /// Field-by-field validation; every violation is reported with its path.
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        if self.n == 0 {
            issues.push("n: must be at least 1".to_string());
        }
        if self.op == OpKind::Add && self.m.is_some() {
            issues.push("m: only meaningful for op = \"multiply\"".to_string());
        }
        if let Some(m) = self.m {
            if m == 0 {
                issues.push("m: must be at least 1".to_string());
            }
        }
        if self.n > 0 {
            if let Err(e) = self.arith_op().validate() {
                issues.push(format!("op: {e}"));
            }
        }
        if self.depths.is_empty() {
            issues.push("depths: must not be empty".to_string());
        }
        for (i, d) in self.depths.iter().enumerate() {
            if matches!(d, DepthSpec::Fixed(0)) {
                issues.push(format!("depths[{i}]: depth must be at least 1"));
            }
        }
        for (i, r) in self.rates().iter().enumerate() {
            if !(0.0..=1.0).contains(r) {
                issues.push(format!("error_rates[{i}]: rate {r} outside [0, 1]"));
            }
        }
        if self.instances == 0 {
            issues.push("instances: must be at least 1".to_string());
        }
        if self.shots == 0 {
            issues.push("shots: must be at least 1".to_string());
        }
        let (ox, oy) = self.pattern.orders();
        if self.n > 0 && self.n <= 63 {
            let op = self.arith_op();
            if (ox as u128) > 1u128 << op.x_width() || (oy as u128) > 1u128 << op.y_operand_width() {
                issues.push(format!("pattern: order {} exceeds the operand space", ox.max(oy)));
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues.join("\n")))
        }
    }
}

/// Draws the instance set for (op, pattern). Operand values are uniform
/// without replacement, instances are pairwise distinct, and amplitudes are
/// equal within each operand. The derivation depends only on (master seed,
/// op, pattern), so the same instances are reused across depths and both
/// error axes.
pub fn generate_instances<R: Rng>(config: &ExperimentConfig, rng: &mut R) -> Result<Vec<(QInteger, QInteger)>> {
    let op = config.arith_op();
    let (ox, oy) = config.pattern.orders();
    let x_bits = op.x_width();
    let y_bits = op.y_operand_width();
    let y_reg = op.y_register_width();

    let combos = choose_pow2(x_bits, ox).saturating_mul(choose_pow2(y_bits, oy));
    if (config.instances as u128) > combos {
        return Err(Error::InfeasiblePattern {
            reason: format!(
                "{} instances requested but only {combos} distinct ({ox}:{oy})-order operand pairs exist",
                config.instances
            ),
        });
    }

    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(config.instances);
    let mut attempts = 0u64;
    let cap = 1000 * config.instances as u64 + 1000;
    while out.len() < config.instances {
        attempts += 1;
        if attempts > cap {
            return Err(Error::InfeasiblePattern { reason: "could not draw enough distinct instances".into() });
        }
        let xs = draw_distinct(rng, x_bits, ox);
        let ys = draw_distinct(rng, y_bits, oy);
        if seen.insert((xs.clone(), ys.clone())) {
            let x = QInteger::uniform(x_bits, &xs)?;
            let y = QInteger::uniform(y_bits, &ys)?.widen(y_reg)?;
            out.push((x, y));
        }
    }
    Ok(out)
}

fn choose_pow2(bits: usize, k: usize) -> u128 {
    let n = 1u128 << bits.min(64);
    match k {
        1 => n,
        2 => n * (n - 1) / 2,
        _ => {
            let mut c = 1u128;
            for i in 0..k as u128 {
                c = c.saturating_mul(n - i) / (i + 1);
            }
            c
        }
    }
}

fn draw_distinct<R: Rng>(rng: &mut R, bits: usize, k: usize) -> Vec<u64> {
    let limit = 1u64 << bits;
    let mut vals: Vec<u64> = Vec::with_capacity(k);
    while vals.len() < k {
        let v = rng.gen_range(0..limit);
        if !vals.contains(&v) {
            vals.push(v);
        }
    }
    vals.sort_unstable();
    vals
}

/// Plurality-metric outcome of one instance.
///
/// `min_diff` is the minimum over (correct, incorrect) pairs of
/// count(correct) - count(incorrect); with no incorrect output observed it is
/// the minimum correct count (distance from a zero-count phantom) and the
/// result is flagged `saturated`. A tie is a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub success: bool,
    pub min_diff: i64,
    pub saturated: bool,
}

/// Applies the success metric: every expected bitstring must strictly exceed
/// every observed non-expected bitstring in counts.
pub fn evaluate_instance(counts: &CountsMap, expected: &BTreeSet<String>) -> Result<Evaluation> {
    if expected.is_empty() {
        return Err(Error::EmptyExpected);
    }
    if counts.is_empty() {
        return Err(Error::EmptyCounts);
    }
    let min_expected = expected.iter().map(|e| counts.get(e).copied().unwrap_or(0)).min().unwrap_or(0);
    let max_incorrect = counts.iter().filter(|(k, _)| !expected.contains(*k)).map(|(_, &c)| c).max();
    let saturated = max_incorrect.is_none();
    let min_diff = min_expected as i64 - max_incorrect.unwrap_or(0) as i64;
    Ok(Evaluation { success: min_diff > 0, min_diff, saturated })
}

/// Aggregated success statistics for one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointResult {
    /// Percentage of successful instances.
    pub success_rate: f64,
    /// Population standard deviation of min_diff over all instances.
    pub sigma: f64,
    /// Successful instances with min_diff < sigma (nearly incorrect).
    pub lower_bar: usize,
    /// Failed instances with min_diff > -sigma (nearly correct).
    pub upper_bar: usize,
    pub instances: usize,
}

pub fn aggregate_point(evals: &[Evaluation]) -> Result<PointResult> {
    let n = evals.len();
    if n < 2 {
        return Err(Error::TooFewInstances { got: n });
    }
    let successes = evals.iter().filter(|e| e.success).count();
    let mean = evals.iter().map(|e| e.min_diff as f64).sum::<f64>() / n as f64;
    let var = evals.iter().map(|e| (e.min_diff as f64 - mean).powi(2)).sum::<f64>() / n as f64;
    let sigma = var.sqrt();
    let lower_bar = evals.iter().filter(|e| e.success && (e.min_diff as f64) < sigma).count();
    let upper_bar = evals.iter().filter(|e| !e.success && (e.min_diff as f64) > -sigma).count();
    Ok(PointResult {
        success_rate: 100.0 * successes as f64 / n as f64,
        sigma,
        lower_bar,
        upper_bar,
        instances: n,
    })
}

/// One (error rate, depth) grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSpec {
    pub axis: ErrorAxis,
    pub rate: f64,
    pub depth: DepthSpec,
}

impl PointSpec {
    pub fn id(&self) -> String {
        format!("{}_p{:.6}_d{}", self.axis.as_str(), self.rate, self.depth)
    }
}

/// One line of the per-instance JSONL stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub point_id: String,
    pub depth: DepthSpec,
    pub error_axis: ErrorAxis,
    pub error_rate: f64,
    pub x: Vec<u64>,
    pub y: Vec<u64>,
    #[serde(flatten)]
    pub eval: Evaluation,
}

/// One line of the summary CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub error_axis: ErrorAxis,
    pub error_rate: f64,
    pub depth: DepthSpec,
    pub pattern: Pattern,
    pub point: PointResult,
    pub shots: u64,
}

impl SummaryRow {
    pub const CSV_HEADER: &'static str =
        "error_axis,error_rate,depth,pattern,success_rate,sigma,lower_bar,upper_bar,instances,shots";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.error_axis,
            self.error_rate,
            self.depth,
            self.pattern,
            self.point.success_rate,
            self.point.sigma,
            self.point.lower_bar,
            self.point.upper_bar,
            self.point.instances,
            self.shots
        )
    }

    pub fn from_csv(line: &str) -> Result<SummaryRow> {
        let bad = |why: &str| Error::Parse(format!("{why} in summary row `{line}`"));
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 10 {
            return Err(bad("expected 10 fields"));
        }
        Ok(SummaryRow {
            error_axis: fields[0].parse()?,
            error_rate: fields[1].parse().map_err(|_| bad("bad error_rate"))?,
            depth: fields[2].parse()?,
            pattern: fields[3].parse()?,
            point: PointResult {
                success_rate: fields[4].parse().map_err(|_| bad("bad success_rate"))?,
                sigma: fields[5].parse().map_err(|_| bad("bad sigma"))?,
                lower_bar: fields[6].parse().map_err(|_| bad("bad lower_bar"))?,
                upper_bar: fields[7].parse().map_err(|_| bad("bad upper_bar"))?,
                instances: fields[8].parse().map_err(|_| bad("bad instances"))?,
            },
            shots: fields[9].parse().map_err(|_| bad("bad shots"))?,
        })
    }
}

/// Reads a summary CSV written by [`run_sweep`].
pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line.trim() != SummaryRow::CSV_HEADER {
                return Err(Error::Parse(format!("unexpected summary header in {}", path.display())));
            }
            continue;
        }
        if !line.trim().is_empty() {
            rows.push(SummaryRow::from_csv(line)?);
        }
    }
    Ok(rows)
}

pub fn read_point_records(path: &Path) -> Result<Vec<InstanceRecord>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

/// Single-instance execution used by the CLI `run` subcommand; same engine
/// and seed layout as the sweep.
pub struct InstanceOutcome {
    pub counts: CountsMap,
    pub expected: BTreeSet<String>,
    pub eval: Evaluation,
}

pub fn simulate_instance(
    op: &ArithOp,
    x: &QInteger,
    y: &QInteger,
    depth: DepthSpec,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<InstanceOutcome> {
    op.validate()?;
    model.validate()?;
    if shots == 0 {
        return Err(Error::EmptyCounts);
    }
    let y = if y.width() == op.y_operand_width() { y.widen(op.y_register_width())? } else { y.clone() };
    let circuit = op.build_circuit(depth)?.decompose_to_basis();
    let xr = 0..op.x_width();
    let yr = op.x_width()..op.x_width() + op.y_register_width();
    let cc = CompiledCircuit::compile(&circuit, &[xr.clone(), yr.clone()])?;
    let init = SplitState::prepare(&cc, &[(xr, x), (yr, &y)])?;
    let outcomes = run_shots_split(&cc, &init, model, shots, seed);
    let mut counts = CountsMap::new();
    for idx in outcomes {
        *counts.entry(circuit.format_outcome(idx)).or_insert(0) += 1;
    }
    let expected = expected_outputs(op, x, &y)?;
    let eval = evaluate_instance(&counts, &expected)?;
    Ok(InstanceOutcome { counts, expected, eval })
}

/// Executes every (error rate x depth) point of a sweep, streaming one JSONL
/// file per point into `out_dir/points/` and a summary CSV at the end.
/// Completed point files are skipped on `resume`. Returns the summary rows in
/// point order.
pub fn run_sweep(
    config: &ExperimentConfig,
    out_dir: &Path,
    workers: Option<usize>,
    resume: bool,
    mut progress: impl FnMut(&str),
) -> Result<Vec<SummaryRow>> {
    config.validate()?;
    if config.instances < 2 {
        return Err(Error::TooFewInstances { got: config.instances });
    }
    let op = config.arith_op();
    let points_dir = out_dir.join("points");
    fs::create_dir_all(&points_dir)?;

    // A results directory is bound to its resolved config.
    let config_path = out_dir.join("config.json");
    let resolved = serde_json::to_string_pretty(config)?;
    if config_path.exists() {
        let existing: ExperimentConfig = serde_json::from_str(&fs::read_to_string(&config_path)?)?;
        if &existing != config {
            return Err(Error::Config(format!(
                "{} holds results for a different config; use a fresh output directory",
                out_dir.display()
            )));
        }
    } else {
        fs::write(&config_path, resolved.as_bytes())?;
    }

    let mut inst_words = vec![config.seed, TAG_INSTANCES];
    inst_words.extend_from_slice(&op.seed_words());
    inst_words.push(config.pattern.seed_word());
    let instances = generate_instances(config, &mut rng_from(&inst_words))?;
    let expected: Vec<BTreeSet<String>> =
        instances.iter().map(|(x, y)| expected_outputs(&op, x, y)).collect::<Result<_>>()?;

    let xr = 0..op.x_width();
    let yr = op.x_width()..op.x_width() + op.y_register_width();
    let compiled: Vec<(DepthSpec, Circuit, CompiledCircuit)> = config
        .depths
        .iter()
        .map(|&depth| {
            let circ = op.build_circuit(depth)?.decompose_to_basis();
            let cc = CompiledCircuit::compile(&circ, &[xr.clone(), yr.clone()])?;
            Ok((depth, circ, cc))
        })
        .collect::<Result<_>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let mut rows = Vec::new();
    let mut timing: Vec<(String, f64, u64)> = Vec::new();
    for &rate in &config.rates() {
        for (depth, circuit, cc) in &compiled {
            let spec = PointSpec { axis: config.error_axis, rate, depth: *depth };
            let id = spec.id();
            let path = points_dir.join(format!("{id}.jsonl"));
            let model = config.error_axis.model(rate, config.rz_noisy);

            let records: Vec<InstanceRecord>;
            let mut elapsed_ms = 0.0;
            if resume && path.exists() {
                records = read_point_records(&path)?;
                if records.len() != config.instances {
                    return Err(Error::Config(format!(
                        "{}: expected {} records, found {} (delete the file to recompute)",
                        path.display(),
                        config.instances,
                        records.len()
                    )));
                }
                progress(&format!("point {id}: resumed from disk"));
            } else {
                let started = Instant::now();
                let point_word = mix(&[config.seed, TAG_POINT, config.error_axis.seed_word(), rate.to_bits(), depth.seed_word()]);
                records = pool.install(|| {
                    instances
                        .par_iter()
                        .enumerate()
                        .map(|(i, (x, y))| -> Result<InstanceRecord> {
                            let init = SplitState::prepare(cc, &[(xr.clone(), x), (yr.clone(), y)])?;
                            let shot_seed = mix(&[point_word, TAG_INSTANCE, i as u64]);
                            let outcomes = run_shots_split(cc, &init, &model, config.shots, shot_seed);
                            let mut counts = CountsMap::new();
                            for idx in outcomes {
                                *counts.entry(circuit.format_outcome(idx)).or_insert(0) += 1;
                            }
                            let eval = evaluate_instance(&counts, &expected[i])?;
                            Ok(InstanceRecord {
                                point_id: id.clone(),
                                depth: *depth,
                                error_axis: config.error_axis,
                                error_rate: rate,
                                x: x.values(),
                                y: y.values(),
                                eval,
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })?;
                elapsed_ms = started.elapsed().as_secs_f64() * 1e3;

                let tmp = points_dir.join(format!("{id}.jsonl.tmp"));
                {
                    let mut f = fs::File::create(&tmp)?;
                    for r in &records {
                        serde_json::to_writer(&mut f, r)?;
                        f.write_all(b"\n")?;
                    }
                    f.flush()?;
                }
                fs::rename(&tmp, &path)?;
            }

            let evals: Vec<Evaluation> = records.iter().map(|r| r.eval).collect();
            let point = aggregate_point(&evals)?;
            progress(&format!(
                "point {id}: success {:.1}% sigma {:.1} ({:.0} ms)",
                point.success_rate, point.sigma, elapsed_ms
            ));
            let trajectories = cc_trajectories(cc, &model, config);
            timing.push((id, elapsed_ms, trajectories));
            rows.push(SummaryRow {
                error_axis: config.error_axis,
                error_rate: rate,
                depth: *depth,
                pattern: config.pattern,
                point,
                shots: config.shots,
            });
        }
    }

    let mut summary = String::from(SummaryRow::CSV_HEADER);
    summary.push('\n');
    for r in &rows {
        summary.push_str(&r.to_csv());
        summary.push('\n');
    }
    fs::write(out_dir.join("summary.csv"), summary.as_bytes())?;

    let mut tcsv = String::from("point_id,elapsed_ms,trajectories\n");
    for (id, ms, traj) in &timing {
        tcsv.push_str(&format!("{id},{ms:.3},{traj}\n"));
    }
    fs::write(out_dir.join("timing.csv"), tcsv.as_bytes())?;

    Ok(rows)
}

/// Full state evolutions a point costs: one per shot under noise, one per
/// instance when the zero-noise shortcut applies.
fn cc_trajectories(cc: &CompiledCircuit, model: &NoiseModel, config: &ExperimentConfig) -> u64 {
    if cc.is_noisy_under(model) {
        config.instances as u64 * config.shots
    } else {
        config.instances as u64
    }
}

/// Paths of a sweep output directory.
pub fn sweep_paths(out_dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    (out_dir.join("points"), out_dir.join("summary.csv"), out_dir.join("config.json"))
}
