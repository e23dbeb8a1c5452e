//! Random-graph applicability experiments.
//!
//! Each graph gets its own seeded stream derived from the master seed and
//! its 1-based index, so results do not depend on worker scheduling. Edge
//! density is drawn from a normal distribution centred at 0.5 and redrawn
//! until it lands in `(0, 1]`. By default every vertex pair is then an edge
//! independently with that probability; [`RandomModel::Rotation`] instead
//! grows the graph by twin merges until the density is reached.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{self, CoverTest, EngineError, SolveOptions, SolveResult, SolveStatus};
use crate::graph::{pad_to_power_of_two, LabeledGraph};
use crate::mcc::MccGraph;
use crate::oracle::{self, ORACLE_MAX_ORDER};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config asks for k = {cfg_k} but H was built for k = {h_k}")]
    KMismatch { cfg_k: u32, h_k: u32 },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("graph {index}: {source}")]
    Engine { index: u64, source: EngineError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RandomModel {
    /// Each pair is an edge independently with probability `d`.
    #[default]
    Bernoulli,
    /// Support pattern of random symmetric plane rotations applied to a
    /// diagonal matrix, as sparse symmetric random-matrix generators do.
    /// Produces many closed twins.
    Rotation,
}

impl RandomModel {
    fn describe(self) -> &'static str {
        match self {
            RandomModel::Bernoulli => "each pair is an edge independently with probability d",
            RandomModel::Rotation => {
                "random twin merges (rotation support pattern) until 2|E| + n >= d*n^2"
            }
        }
    }
}

impl FromStr for RandomModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bernoulli" => Ok(RandomModel::Bernoulli),
            "rotation" => Ok(RandomModel::Rotation),
            _ => Err(format!("unknown random model '{s}' (expected bernoulli or rotation)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub k: u32,
    pub count: u64,
    pub sigma: f64,
    pub seed: u64,
    pub model: RandomModel,
    pub max_stage: u32,
    pub workers: usize,
    pub matlab_2plus: bool,
    /// Check every output against the exact oracle (orders up to 40).
    pub oracle: bool,
    /// On every stage-1 failure, also run the `t = 2` hyperedge engine and
    /// compare it with the filtered-edge stage 2.
    pub compare_t2: bool,
    /// Fill the `ms_elapsed` column (makes the CSV run-dependent).
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(k: u32, count: u64, sigma: f64, seed: u64) -> Self {
        ExperimentConfig {
            k,
            count,
            sigma,
            seed,
            model: RandomModel::Bernoulli,
            max_stage: engine::DEFAULT_MAX_STAGE,
            workers: 1,
            matlab_2plus: false,
            oracle: true,
            compare_t2: true,
            record_timing: false,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.count == 0 {
            return Err(HarnessError::Config("graph count must be at least 1".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(HarnessError::Config("sigma must be positive".into()));
        }
        if self.workers == 0 {
            return Err(HarnessError::Config("worker count must be at least 1".into()));
        }
        Ok(())
    }
}

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The random stream for graph `index` (1-based) under `master_seed`.
pub fn graph_stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(master_seed) ^ index))
}

/// `0.5 + sigma * N(0, 1)`, redrawn until it lies in `(0, 1]`.
pub fn sample_density<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> f64 {
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let d = 0.5 + sigma * z;
        if d > 0.0 && d <= 1.0 {
            return d;
        }
    }
}

/// Order-`2^k` graph with each pair joined independently with probability `d`.
pub fn random_graph<R: Rng + ?Sized>(k: u32, d: f64, rng: &mut R) -> LabeledGraph {
    let n = 1u32 << k;
    let mut g = LabeledGraph::empty(n).expect("k <= 6");
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.random::<f64>() < d {
                g.add_edge(u, v).expect("valid pair");
            }
        }
    }
    g
}

/// Order-`2^k` graph grown from the edgeless graph by merges: pick distinct
/// `i`, `j` and give both the closed neighbourhood `N[i] ∪ N[j]`. Stops once
/// `2|E| + n`, the nonzero count of the matching matrix, reaches `d·n²`.
pub fn rotation_graph<R: Rng + ?Sized>(k: u32, d: f64, rng: &mut R) -> LabeledGraph {
    let n = 1usize << k;
    let mut rows: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
    let target = (d * (n * n) as f64).ceil() as u32;
    let mut nnz = n as u32;
    while nnz < target {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j {
            continue;
        }
        let merged = rows[i] | rows[j];
        for w in crate::bits::word_ones(merged) {
            rows[w] |= (1 << i) | (1 << j);
        }
        rows[i] = merged;
        rows[j] = merged;
        nnz = rows.iter().map(|r| r.count_ones()).sum();
    }
    let mut g = LabeledGraph::empty(n as u32).expect("k <= 6");
    for (i, &row) in rows.iter().enumerate() {
        for j in crate::bits::word_ones(row >> i >> 1) {
            g.add_edge(i as u32 + 1, (i + j) as u32 + 2).expect("valid pair");
        }
    }
    g
}

/// The graph (and its density) that `run_experiment` uses at `index`.
pub fn experiment_graph(model: RandomModel, k: u32, sigma: f64, seed: u64, index: u64) -> (f64, LabeledGraph) {
    let mut rng = graph_stream(seed, index);
    let d = sample_density(sigma, &mut rng);
    let g = match model {
        RandomModel::Bernoulli => random_graph(k, d, &mut rng),
        RandomModel::Rotation => rotation_graph(k, d, &mut rng),
    };
    (d, g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphRecord {
    pub index: u64,
    pub density: f64,
    pub edges: usize,
    pub result: SolveResult,
    pub oracle_size: Option<usize>,
    pub agree: Option<bool>,
    /// `Some(true)` when the `t = 2` engine matched the filtered stage 2.
    pub t2_agree: Option<bool>,
    pub ms_elapsed: f64,
}

impl GraphRecord {
    pub fn is_edgeless(&self) -> bool {
        self.result.status == SolveStatus::EdgelessSpecialCase
    }

    pub fn stage1_failed(&self) -> bool {
        !self.result.stage1_applicable()
    }

    pub fn stage2_failed(&self) -> bool {
        self.stage1_failed() && self.result.status != (SolveStatus::Applicable { stage: 2 })
    }

    fn status_str(&self) -> &'static str {
        match self.result.status {
            SolveStatus::Applicable { .. } => "applicable",
            SolveStatus::NotApplicable { .. } => "not_applicable",
            SolveStatus::EdgelessSpecialCase => "edgeless",
        }
    }
}

#[derive(Serialize)]
struct CsvRow {
    index: u64,
    density: String,
    edges: usize,
    stage_reached: u32,
    status: &'static str,
    cover_size: Option<usize>,
    oracle_size: Option<usize>,
    agree: Option<bool>,
    ms_elapsed: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<GraphRecord>,
    /// Graphs where stage 1 did not yield a clique.
    pub n1: u64,
    /// Graphs where stage 2 did not yield a clique either.
    pub n2: u64,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub skipped_edgeless: u64,
    pub oracle_checked: u64,
    pub disagreements: u64,
    pub t2_compared: u64,
    pub t2_mismatches: u64,
}

impl ExperimentReport {
    fn from_records(config: ExperimentConfig, records: Vec<GraphRecord>) -> Self {
        let mut r = ExperimentReport {
            config,
            records: Vec::new(),
            n1: 0,
            n2: 0,
            d1: Vec::new(),
            d2: Vec::new(),
            skipped_edgeless: 0,
            oracle_checked: 0,
            disagreements: 0,
            t2_compared: 0,
            t2_mismatches: 0,
        };
        for rec in &records {
            if rec.is_edgeless() {
                r.skipped_edgeless += 1;
                continue;
            }
            if rec.stage1_failed() {
                r.n1 += 1;
                r.d1.push(rec.density);
                if rec.stage2_failed() {
                    r.n2 += 1;
                    r.d2.push(rec.density);
                }
            }
            if let Some(agree) = rec.agree {
                r.oracle_checked += 1;
                if !agree {
                    r.disagreements += 1;
                }
            }
            if let Some(t2) = rec.t2_agree {
                r.t2_compared += 1;
                if !t2 {
                    r.t2_mismatches += 1;
                }
            }
        }
        r.records = records;
        r
    }

    /// Graphs counted in applicability ratios (edgeless ones excluded).
    pub fn tested(&self) -> u64 {
        self.records.len() as u64 - self.skipped_edgeless
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), HarnessError> {
        let mut w = csv::Writer::from_writer(sink);
        for rec in &self.records {
            let applicable = rec.result.is_applicable() || rec.is_edgeless();
            w.serialize(CsvRow {
                index: rec.index,
                density: format!("{:.4}", rec.density),
                edges: rec.edges,
                stage_reached: rec.result.stage_reached,
                status: rec.status_str(),
                cover_size: applicable.then(|| rec.result.cover.len()),
                oracle_size: rec.oracle_size,
                agree: rec.agree,
                ms_elapsed: self
                    .config
                    .record_timing
                    .then(|| format!("{:.3}", rec.ms_elapsed)),
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let fmt_d = |d: &[f64]| d.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
        writeln!(s, "# experiment k={} order={} graphs={} sigma={} seed={} max_stage={}", c.k, 1u32 << c.k, c.count, c.sigma, c.seed, c.max_stage).unwrap();
        writeln!(s, "# random model: {}; d = 0.5 + sigma*N(0,1) redrawn until 0 < d <= 1", c.model.describe()).unwrap();
        writeln!(s, "tested (non-edgeless): {}", self.tested()).unwrap();
        writeln!(s, "skipped edgeless: {}", self.skipped_edgeless).unwrap();
        writeln!(s, "stage 1 not applicable (n1): {}", self.n1).unwrap();
        writeln!(s, "stage 2 not applicable (n2): {}", self.n2).unwrap();
        writeln!(s, "d1: [{}]", fmt_d(&self.d1)).unwrap();
        writeln!(s, "d2: [{}]", fmt_d(&self.d2)).unwrap();
        writeln!(s, "oracle checked: {} disagreements: {}", self.oracle_checked, self.disagreements).unwrap();
        writeln!(s, "t=2 engine compared: {} mismatches: {}", self.t2_compared, self.t2_mismatches).unwrap();
        if c.record_timing && !self.records.is_empty() {
            let mut ms: Vec<f64> = self.records.iter().map(|r| r.ms_elapsed).collect();
            ms.sort_by(f64::total_cmp);
            writeln!(s, "median solve ms: {:.3} max: {:.3}", ms[ms.len() / 2], ms[ms.len() - 1]).unwrap();
        }
        s
    }
}

fn run_one(cfg: &ExperimentConfig, h: &MccGraph, index: u64) -> Result<GraphRecord, HarnessError> {
    let (density, g) = experiment_graph(cfg.model, cfg.k, cfg.sigma, cfg.seed, index);
    let opts = SolveOptions {
        max_stage: cfg.max_stage,
        matlab_2plus: cfg.matlab_2plus,
        verify_with_oracle: false,
        ..Default::default()
    };
    let start = Instant::now();
    let result = engine::solve(&g, h, &opts).map_err(|source| HarnessError::Engine { index, source })?;
    let ms_elapsed = start.elapsed().as_secs_f64() * 1e3;

    let (oracle_size, agree) = if cfg.oracle && g.order() <= ORACLE_MAX_ORDER {
        let min = oracle::min_vertex_cover_size(&g).expect("order within guard");
        let agree = match result.status {
            SolveStatus::Applicable { .. } | SolveStatus::EdgelessSpecialCase => {
                Some(g.is_vertex_cover(result.cover) && result.cover.len() == min)
            }
            SolveStatus::NotApplicable { .. } => None,
        };
        (Some(min), agree)
    } else {
        (None, None)
    };

    let t2_agree = if cfg.compare_t2 && !result.stage1_applicable() && result.stages.len() >= 2 {
        let from_grade = result.stages[0].found_grade.unwrap_or(1);
        let padded = pad_to_power_of_two(&g);
        let mut cover = CoverTest::new(&padded);
        let hyper = engine::run_hyper_stage(h, 2, from_grade, &mut cover, opts.hyperedge_limit)
            .map_err(|source| HarnessError::Engine { index, source })?;
        let plain = &result.stages[1];
        Some(hyper.is_clique == plain.is_clique && hyper.i_labels == plain.i_labels)
    } else {
        None
    };

    Ok(GraphRecord {
        index,
        density,
        edges: g.edge_count(),
        result,
        oracle_size,
        agree,
        t2_agree,
        ms_elapsed,
    })
}

/// Runs graphs `1..=count`, fanned out over `workers` threads.
pub fn run_experiment(cfg: &ExperimentConfig, h: &MccGraph) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    if cfg.k != h.k() {
        return Err(HarnessError::KMismatch { cfg_k: cfg.k, h_k: h.k() });
    }
    let records = if cfg.workers == 1 {
        (1..=cfg.count)
            .map(|i| run_one(cfg, h, i))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        pool.install(|| {
            (1..=cfg.count)
                .into_par_iter()
                .map(|i| run_one(cfg, h, i))
                .collect::<Result<Vec<_>, _>>()
        })?
    };
    Ok(ExperimentReport::from_records(cfg.clone(), records))
}
