use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use grc_core::cutsim::{verify_round_equivalence, CutInstance, CutReport};
use grc_core::engine::{RandomSource, SeededStreams, Simulation, TraceMode};
use grc_core::graph::{generate, load_graph, save_graph, Graph, GraphKind, WeightMode};
use grc_core::harness::{
    default_out_dir, fit_rounds, preset, rows_from_csv, run_batch, write_outputs, Algorithm,
    ExperimentConfig, FitModel, GraphSource, OutputPaths, Seeds, DEFAULT_MAX_ROUNDS,
};
use grc_core::mst::{mst_inputs, Mst};
use grc_core::primitives::standalone::CountingRuns;
use grc_core::primitives::GrcProgram;
use grc_core::spanner::{SamplerConfig, Spanner};
use grc_core::verification::{verify, Task};

/// Simulator for graphical reconfigurable circuits.
#[derive(Parser)]
#[command(name = "grc", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Mst,
    Spanner,
    SpannerLowMemory,
    Counting,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph and print it in the text format.
    Gen {
        /// path, cycle, grid, complete, star, gnp, tree-chords
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        chords: usize,
        /// uniform:W, equal or distinct
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a batch from a config file, a preset, or a single graph.
    Run {
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, requires = "algo")]
        graph: Option<PathBuf>,
        #[arg(long, value_enum)]
        algo: Option<Algo>,
        #[arg(long, default_value_t = 3)]
        c: u32,
        #[arg(long, default_value_t = 3)]
        kappa: u32,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Run only this seed.
        #[arg(long, conflicts_with = "seeds")]
        seed: Option<u64>,
        /// Run seeds `0..N`.
        #[arg(long)]
        seeds: Option<u64>,
        /// Output directory; defaults to $GRC_OUT_DIR or ./grc-out.
        #[arg(long)]
        out: Option<PathBuf>,
        /// What to print on stdout.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Decide a verification task; exit code 0 for yes, 1 for no.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        task: String,
        #[arg(long, default_value_t = 3)]
        c: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
        max_rounds: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Replay a run through the two-party cut protocol; per-round bits as CSV.
    Cutsim {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        /// A file listing the nodes of one side, or `random`.
        #[arg(long, default_value = "random")]
        cut: String,
        #[arg(long, default_value_t = 50)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        c: u32,
        #[arg(long, default_value_t = 3)]
        kappa: u32,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit mean rounds per n from a batch CSV.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        /// log, loglog, kappa-plus-log or kappa-log
        #[arg(long, default_value = "log")]
        model: String,
        #[arg(long, default_value_t = 16)]
        w: u64,
        #[arg(long, default_value_t = 3)]
        kappa: u32,
    },
    /// Print a per-round, per-node trace.
    Trace {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long, default_value_t = 20)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        c: u32,
        #[arg(long, default_value_t = 3)]
        kappa: u32,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(load_graph(&text)
        .with_context(|| format!("parsing {}", path.display()))?
        .with_pins(3))
}

fn parse_weights(s: &str) -> Result<WeightMode> {
    Ok(match s {
        "equal" => WeightMode::AllEqual,
        "distinct" => WeightMode::DistinctRandom,
        _ => match s.strip_prefix("uniform:") {
            Some(w) => WeightMode::Uniform {
                max: w.parse().context("weight bound")?,
            },
            None => bail!("unknown weight mode {s:?}"),
        },
    })
}

fn graph_kind(family: &str, n: usize, p: f64, chords: usize) -> Result<GraphKind> {
    Ok(match family {
        "path" => GraphKind::Path { n },
        "cycle" => GraphKind::Cycle { n },
        "complete" => GraphKind::Complete { n },
        "star" => GraphKind::Star { n },
        "gnp" => GraphKind::GnpConnected { n, p },
        "tree-chords" => GraphKind::TreePlusChords { n, chords },
        "grid" => {
            let rows = (1..=n)
                .rev()
                .find(|r| r * r <= n && n.is_multiple_of(*r))
                .unwrap_or(1);
            GraphKind::Grid {
                rows,
                cols: n / rows,
            }
        }
        _ => bail!("unknown family {family:?}"),
    })
}

fn algorithm(algo: Algo, c: u32, kappa: u32, eps: f64) -> Algorithm {
    match algo {
        Algo::Mst => Algorithm::Mst { c },
        Algo::Spanner | Algo::SpannerLowMemory => Algorithm::Spanner {
            kappa,
            eps,
            c,
            low_memory: algo == Algo::SpannerLowMemory,
        },
        Algo::Counting => Algorithm::Counting { r: 6, rho: 0.5 },
    }
}

fn say(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => say(text),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    config: Option<PathBuf>,
    preset_name: Option<String>,
    graph: Option<PathBuf>,
    algo: Option<Algo>,
    (c, kappa, eps): (u32, u32, f64),
    seed: Option<u64>,
    seeds: Option<u64>,
    out: Option<PathBuf>,
    format: Format,
) -> Result<()> {
    let mut configs = if let Some(path) = config {
        let text =
            fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        vec![ExperimentConfig::from_json(&text)?]
    } else if let Some(name) = preset_name {
        preset(&name)?
    } else if let (Some(graph), Some(algo)) = (graph, algo) {
        vec![ExperimentConfig {
            name: "run".to_string(),
            algorithm: algorithm(algo, c, kappa, eps),
            graph: Some(GraphSource::File { path: graph }),
            seeds: Seeds::List(vec![0]),
            max_rounds: DEFAULT_MAX_ROUNDS,
            output: OutputPaths::default(),
        }]
    } else {
        bail!("give --config, --preset, or --graph with --algo");
    };
    let dir = out.unwrap_or_else(default_out_dir);
    for cfg in &mut configs {
        if let Some(s) = seed {
            cfg.seeds = Seeds::List(vec![s]);
        } else if let Some(n) = seeds {
            cfg.seeds = Seeds::Range { start: 0, count: n };
        }
        let result = run_batch(cfg)?;
        let paths = OutputPaths {
            csv: Some(
                cfg.output
                    .csv
                    .clone()
                    .unwrap_or_else(|| dir.join(format!("{}.csv", cfg.name))),
            ),
            json: Some(
                cfg.output
                    .json
                    .clone()
                    .unwrap_or_else(|| dir.join(format!("{}.json", cfg.name))),
            ),
        };
        write_outputs(&result, &paths)?;
        match format {
            Format::Csv => say(&result.to_csv()?)?,
            Format::Json => say(&format!("{}\n", result.summary_json()))?,
        }
    }
    Ok(())
}

fn cut_report(
    g: &Graph,
    algo: Algo,
    inst: &CutInstance,
    src: &dyn RandomSource,
    rounds: u64,
    (c, kappa, eps): (u32, u32, f64),
) -> Result<CutReport> {
    Ok(match algo {
        Algo::Mst => {
            let w = g.weights().context("mst needs edge weights")?;
            verify_round_equivalence(
                g,
                &GrcProgram(Mst { c }),
                &mst_inputs(g, w),
                src,
                inst,
                rounds,
            )?
        }
        Algo::Spanner | Algo::SpannerLowMemory => verify_round_equivalence(
            g,
            &GrcProgram(Spanner {
                cfg: SamplerConfig::new(kappa, eps, c)?,
                low_memory: algo == Algo::SpannerLowMemory,
            }),
            &vec![None; g.n()],
            src,
            inst,
            rounds,
        )?,
        Algo::Counting => verify_round_equivalence(
            g,
            &GrcProgram(CountingRuns { executions: 11 }),
            &vec![(); g.n()],
            src,
            inst,
            rounds,
        )?,
    })
}

fn trace_dump(
    g: &Graph,
    algo: Algo,
    seed: u64,
    rounds: u64,
    (c, kappa, eps): (u32, u32, f64),
) -> Result<String> {
    fn go<P: grc_core::engine::NodeProgram>(
        g: &Graph,
        p: &P,
        inputs: &[P::Input],
        seed: u64,
        rounds: u64,
    ) -> Result<String> {
        let mut sim = Simulation::new(g, p, inputs, &SeededStreams(seed), TraceMode::Full)?;
        while sim.round() < rounds && !sim.all_halted() {
            sim.step_round()?;
        }
        Ok(sim.trace().map(|t| t.dump()).unwrap_or_default())
    }
    match algo {
        Algo::Mst => {
            let w = g.weights().context("mst needs edge weights")?;
            go(g, &GrcProgram(Mst { c }), &mst_inputs(g, w), seed, rounds)
        }
        Algo::Spanner | Algo::SpannerLowMemory => go(
            g,
            &GrcProgram(Spanner {
                cfg: SamplerConfig::new(kappa, eps, c)?,
                low_memory: algo == Algo::SpannerLowMemory,
            }),
            &vec![None; g.n()],
            seed,
            rounds,
        ),
        Algo::Counting => go(
            g,
            &GrcProgram(CountingRuns { executions: 11 }),
            &vec![(); g.n()],
            seed,
            rounds,
        ),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen {
            family,
            n,
            p,
            chords,
            weights,
            seed,
            out,
        } => {
            let w = weights.as_deref().map(parse_weights).transpose()?;
            let g = generate(graph_kind(&family, n, p, chords)?, w, 3, seed)?;
            emit(out.as_deref(), &save_graph(&g))?;
        }
        Cmd::Run {
            config,
            preset,
            graph,
            algo,
            c,
            kappa,
            eps,
            seed,
            seeds,
            out,
            format,
        } => cmd_run(
            config,
            preset,
            graph,
            algo,
            (c, kappa, eps),
            seed,
            seeds,
            out,
            format,
        )?,
        Cmd::Verify {
            graph,
            task,
            c,
            seed,
            max_rounds,
            format,
        } => {
            let g = read_graph(&graph)?;
            let task: Task = task.parse()?;
            let run = verify(task, &g, c, &SeededStreams(seed), max_rounds)?;
            match format {
                Format::Json => say(&format!("{}\n", serde_json::to_string_pretty(&run)?))?,
                Format::Csv => say(&format!(
                    "task,decision,unanimous,rounds\n{},{},{},{}\n",
                    run.task,
                    run.decision.map(|d| d.to_string()).unwrap_or_default(),
                    run.unanimous,
                    run.rounds
                ))?,
            }
            return Ok(match run.decision {
                Some(true) if run.unanimous => ExitCode::SUCCESS,
                Some(false) if run.unanimous => ExitCode::from(1),
                _ => ExitCode::from(2),
            });
        }
        Cmd::Cutsim {
            graph,
            algo,
            cut,
            rounds,
            seed,
            c,
            kappa,
            eps,
            out,
        } => {
            let g = read_graph(&graph)?;
            let inst = if cut == "random" {
                CutInstance::random_balanced(&g, 3, seed)?
            } else {
                let text = fs::read_to_string(&cut).with_context(|| format!("reading {cut}"))?;
                CutInstance::parse(&g, 3, &text)?
            };
            let report = cut_report(
                &g,
                algo,
                &inst,
                &SeededStreams(seed),
                rounds,
                (c, kappa, eps),
            )?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &report.rounds {
                w.serialize(r)?;
            }
            emit(out.as_deref(), &String::from_utf8(w.into_inner()?)?)?;
            eprintln!(
                "cut pins {}, name width {}, bound {} bits/round, max {} bits, mismatches {}",
                report.cut_pins,
                report.name_width,
                report.bound_per_round,
                report.max_bits(),
                report.mismatches.len()
            );
            for m in report.mismatches.iter().take(10) {
                eprintln!(
                    "mismatch: round {} node {} port {} pin {}",
                    m.round, m.node, m.port, m.index
                );
            }
            if !(report.exact() && report.within_bound()) {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Fit {
            csv,
            model,
            w,
            kappa,
        } => {
            let text =
                fs::read_to_string(&csv).with_context(|| format!("reading {}", csv.display()))?;
            let rows = rows_from_csv(&text)?;
            let model = FitModel::parse(&model, w, kappa)
                .with_context(|| format!("unknown model {model:?}"))?;
            let fit = fit_rounds(&rows, model)?;
            say(&format!("{}\n", serde_json::to_string_pretty(&fit)?))?;
        }
        Cmd::Trace {
            graph,
            algo,
            rounds,
            seed,
            c,
            kappa,
            eps,
        } => {
            let g = read_graph(&graph)?;
            say(&trace_dump(&g, algo, seed, rounds, (c, kappa, eps))?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            let closed = e
                .downcast_ref::<io::Error>()
                .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe);
            if closed {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
