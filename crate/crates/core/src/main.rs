//! `qwire` command-line runner.
//!
//! Exit status: 0 when every extracted solution set matches the oracle,
//! 2 on a mismatch, 1 on any error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qwire::geometry::{validate_embedding, AtomArray};
use qwire::graph::{format_family, mis_brute_force, Graph};
use qwire::pipeline::{
    bundled_experiment, comparison_table, figure_experiments, run_experiment, ExperimentConfig,
    NoiseConfig, RunOutput, SpamConfig, DEFAULT_BLOCKADE_RADIUS,
};
use qwire::wire::{analyze, WiredGraph};
use qwire::{catalog, Error, Result};

#[derive(Parser)]
#[command(
    name = "qwire",
    version,
    about = "Quantum-wired Rydberg arrays for maximum independent set problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct RunFlags {
    /// Measurement shots (0 = exact distribution).
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Enable the noise model with default levels unless the config sets them.
    #[arg(long)]
    noise: bool,
    /// Enable readout errors (and their correction) with default rates.
    #[arg(long)]
    spam: bool,
    /// Directory for histograms, reports and plot data.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config (a TOML file or a bundled name such as `c6`).
    Run {
        config: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run every bundled experiment of figure 2, 3 or 4.
    Reproduce {
        figure: u32,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Print the exact MIS family of a catalog graph, edge list or wired-graph file.
    Oracle { graph: String },
    /// Check that an atom array induces the given graph.
    ValidateGeometry {
        array: PathBuf,
        graph: String,
        #[arg(long, default_value_t = DEFAULT_BLOCKADE_RADIUS)]
        r_b: f64,
        /// Comma-separated vertex label of each atom in file order.
        #[arg(long, value_delimiter = ',')]
        vertex_map: Option<Vec<usize>>,
    },
}

fn load_config(spec: &str) -> Result<ExperimentConfig> {
    let path = Path::new(spec);
    if path.exists() {
        ExperimentConfig::load(path)
    } else {
        bundled_experiment(spec)
    }
}

fn apply_flags(cfg: &mut ExperimentConfig, flags: &RunFlags) {
    if let Some(s) = flags.shots {
        cfg.shots = s;
    }
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if flags.noise && cfg.noise.is_none() {
        cfg.noise = Some(NoiseConfig::default());
    }
    if flags.spam && cfg.spam.is_none() {
        cfg.spam = Some(SpamConfig::default());
    }
    if let Some(out) = &flags.out {
        cfg.output = Some(out.clone());
    }
}

fn finish(cfg: &ExperimentConfig, out: &RunOutput) -> Result<()> {
    if let Some(dir) = &cfg.output {
        for path in out.write(dir)? {
            log::info!("wrote {}", path.display());
        }
    }
    if let Some(e) = &out.report.extraction_error {
        eprintln!("{}: {e}", out.report.name);
    }
    Ok(())
}

fn load_graph(spec: &str) -> Result<WiredGraph> {
    let path = Path::new(spec);
    if !path.exists() {
        return catalog::wired(spec);
    }
    let text = std::fs::read_to_string(path)?;
    if text.lines().any(|l| l.trim_start().starts_with("wire")) {
        WiredGraph::from_text(&text)
    } else {
        Ok(WiredGraph::bare(Graph::from_edge_list(&text)?))
    }
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, flags } => {
            let mut cfg = load_config(&config)?;
            apply_flags(&mut cfg, &flags);
            let out = run_experiment(&cfg)?;
            finish(&cfg, &out)?;
            print!("{}", comparison_table(std::slice::from_ref(&out.report)));
            Ok(out.report.is_match)
        }
        Command::Reproduce { figure, flags } => {
            let mut reports = Vec::new();
            for stem in figure_experiments(figure)? {
                let mut cfg = bundled_experiment(stem)?;
                apply_flags(&mut cfg, &flags);
                let out = run_experiment(&cfg)?;
                finish(&cfg, &out)?;
                reports.push(out.report);
            }
            print!("{}", comparison_table(&reports));
            Ok(reports.iter().all(|r| r.is_match))
        }
        Command::Oracle { graph } => {
            let wg = load_graph(&graph)?;
            if wg.wires().is_empty() {
                println!("{}", format_family(&mis_brute_force(wg.combined())?));
            } else {
                let a = analyze(&wg)?;
                println!("combined:   {}", format_family(&a.combined_mis));
                println!("projected:  {}", format_family(a.projected.keys()));
                println!("frustrated: {}", format_family(&a.frustrated));
                println!("target:     {}", format_family(&a.solutions));
            }
            Ok(true)
        }
        Command::ValidateGeometry {
            array,
            graph,
            r_b,
            vertex_map,
        } => {
            let mut arr = AtomArray::from_text(&std::fs::read_to_string(&array)?)?;
            if let Some(map) = vertex_map {
                arr = arr.relabeled(&map)?;
            }
            let wg = load_graph(&graph)?;
            let report = validate_embedding(&arr, wg.combined(), r_b)?;
            print!("{report}");
            Ok(report.is_clean())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Accuracy(_)) {
                eprintln!("hint: reduce schedule.dt");
            }
            ExitCode::from(1)
        }
    }
}
