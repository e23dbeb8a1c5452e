use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use mcc_cover::container::{load_h, save_h};
use mcc_cover::engine::{self, EngineError, SolveOptions, SolveStatus};
use mcc_cover::harness::{run_experiment, ExperimentConfig, HarnessError, RandomModel};
use mcc_cover::hyper::HyperError;
use mcc_cover::mcc::{build_h, BuildError, MccGraph};
use mcc_cover::oracle::{self, OracleError};
use mcc_cover::verify::{verify_h_structure, DEFAULT_EXHAUSTIVE_LIMIT};
use mcc_cover::{parse_graph, LabeledGraph};

#[derive(Parser)]
#[command(name = "mcc", version, about = "Minimum vertex cover via the staged MCC-graph method")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build H for 2^k labels and save it.
    BuildH {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: PathBuf,
        /// Allow k = 6 (about 13 GB of adjacency).
        #[arg(long)]
        force_large: bool,
    },
    /// Load H and check its structural conditions.
    VerifyH {
        #[arg(long = "in")]
        input: PathBuf,
        /// Largest k for the maximal-clique checks.
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_LIMIT)]
        exhaustive_limit: u32,
    },
    /// Solve one graph.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long, default_value_t = engine::DEFAULT_MAX_STAGE)]
        max_stage: u32,
        /// Exempt the edge endpoints from the stage-2 filter.
        #[arg(long)]
        matlab_2plus: bool,
        /// Certify the output with the exact oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        fail_on_inapplicable: bool,
    },
    /// Exact minimum vertex cover.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Batch of random graphs; writes per-graph CSV and prints a summary.
    Experiment {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        count: u64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Random graph model: bernoulli or rotation.
        #[arg(long, default_value = "bernoulli")]
        model: RandomModel,
        #[arg(long, default_value_t = engine::DEFAULT_MAX_STAGE)]
        max_stage: u32,
        #[arg(long)]
        matlab_2plus: bool,
        /// Skip the oracle comparison.
        #[arg(long)]
        no_oracle: bool,
        /// Fill the ms_elapsed column (the CSV is then not reproducible).
        #[arg(long)]
        record_timing: bool,
        #[arg(long)]
        fail_on_inapplicable: bool,
    },
}

const EXIT_FORMAT: u8 = 1;
const EXIT_INAPPLICABLE: u8 = 2;
const EXIT_GUARD: u8 = 3;

fn is_guard(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        matches!(e.downcast_ref(), Some(BuildError::ResourceGuard { .. }))
            || matches!(e.downcast_ref(), Some(HyperError::GuardExceeded { .. }))
            || e.downcast_ref::<OracleError>().is_some()
            || matches!(e.downcast_ref(), Some(EngineError::Hyper(HyperError::GuardExceeded { .. })))
            || matches!(
                e.downcast_ref(),
                Some(HarnessError::Engine { source: EngineError::Hyper(HyperError::GuardExceeded { .. }), .. })
            )
    })
}

fn read_graph(path: &Path) -> anyhow::Result<LabeledGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_h(path: &Path) -> anyhow::Result<MccGraph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_h(BufReader::new(file)).with_context(|| format!("loading {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::BuildH { k, out, force_large } => {
            let h = build_h(k, force_large)?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            save_h(&h, BufWriter::new(file))?;
            println!(
                "k={} components={} vertices={} edges={} -> {}",
                h.k(),
                h.components().len(),
                h.vertex_count(),
                h.edge_count(),
                out.display()
            );
            Ok(0)
        }
        Cmd::VerifyH { input, exhaustive_limit } => {
            let h = read_h(&input)?;
            let report = verify_h_structure(&h, exhaustive_limit);
            println!("k={} edges checked={}", report.k, report.edges_checked);
            if report.exhaustive {
                println!(
                    "maximal cliques={} witnessed label sets={}",
                    report.maximal_cliques,
                    report.witnesses.len()
                );
            } else {
                println!("clique checks skipped (k > {exhaustive_limit})");
            }
            for v in &report.violations {
                println!("violation: {v}");
            }
            if report.is_clean() {
                println!("ok");
                Ok(0)
            } else {
                anyhow::bail!("{} violations", report.violations.len())
            }
        }
        Cmd::Solve {
            graph,
            h,
            max_stage,
            matlab_2plus,
            oracle,
            fail_on_inapplicable,
        } => {
            let g = read_graph(&graph)?;
            let h = read_h(&h)?;
            let opts = SolveOptions {
                max_stage,
                matlab_2plus,
                verify_with_oracle: oracle,
                ..Default::default()
            };
            let (r, elapsed) = engine::solve_timed(&g, &h, &opts)?;
            for s in &r.stages {
                println!(
                    "stage {}: from grade {} found {:?} grade {:?} |S|={} |I|={} labels={} clique={}",
                    s.stage,
                    s.from_grade,
                    s.found_component.map(|c| h.component(c).name()),
                    s.found_grade,
                    s.s_vertices,
                    s.i_vertices,
                    s.i_labels,
                    s.is_clique
                );
            }
            match r.status {
                SolveStatus::Applicable { stage } => println!("applicable at stage {stage}: cover {} (size {})", r.cover, r.cover.len()),
                SolveStatus::EdgelessSpecialCase => println!("edgeless: cover {{}}"),
                SolveStatus::NotApplicable { max_stage } => println!("not applicable up to stage {max_stage}"),
            }
            if let Some(min) = r.oracle_min {
                println!("oracle minimum: {min}");
            }
            println!("elapsed ms: {:.3}", elapsed.as_secs_f64() * 1e3);
            let inapplicable = matches!(r.status, SolveStatus::NotApplicable { .. });
            Ok(if inapplicable && fail_on_inapplicable { EXIT_INAPPLICABLE } else { 0 })
        }
        Cmd::Oracle { graph } => {
            let g = read_graph(&graph)?;
            let r = oracle::min_vertex_cover_exact(&g)?;
            println!("min size: {}", r.min_size);
            println!("witness: {}", r.witness);
            println!("method: {:?}", r.method);
            println!("elapsed ms: {:.3}", r.elapsed.as_secs_f64() * 1e3);
            Ok(0)
        }
        Cmd::Experiment {
            k,
            count,
            sigma,
            seed,
            h,
            out,
            workers,
            model,
            max_stage,
            matlab_2plus,
            no_oracle,
            record_timing,
            fail_on_inapplicable,
        } => {
            let h = read_h(&h)?;
            let mut cfg = ExperimentConfig::new(k, count, sigma, seed);
            cfg.workers = workers;
            cfg.model = model;
            cfg.max_stage = max_stage;
            cfg.matlab_2plus = matlab_2plus;
            cfg.oracle = !no_oracle;
            cfg.record_timing = record_timing;
            let report = run_experiment(&cfg, &h)?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            report.write_csv(BufWriter::new(file))?;
            print!("{}", report.summary());
            if report.disagreements > 0 {
                anyhow::bail!("{} outputs disagree with the oracle", report.disagreements);
            }
            let inapplicable = report
                .records
                .iter()
                .any(|r| matches!(r.result.status, SolveStatus::NotApplicable { .. }));
            Ok(if inapplicable && fail_on_inapplicable { EXIT_INAPPLICABLE } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_FORMAT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_guard(&e) { EXIT_GUARD } else { EXIT_FORMAT })
        }
    }
}
