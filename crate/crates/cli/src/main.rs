use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use bdmst_core::embedding::{embed_ising, find_embedding, ChainMode, LogicalGraph};
use bdmst_core::ising::qubo_to_ising;
use bdmst_core::qubo::{build_qubo, registry_json, write_coo, MapperOptions};
use clap::{Args, Parser, Subcommand};

mod config;
mod output;
mod report;
mod run;
mod spectrum;

use config::{parse_label, ExperimentConfig};
use output::{safe_name, write_atomic};

#[derive(Debug, Parser)]
#[command(name = "bdmst", version, about = "Degree-bounded MST experiments on simulated annealers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Instance catalog utilities.
    #[command(subcommand)]
    Instances(InstancesCommand),
    /// Write the QUBO of one instance as COO text plus a variable registry.
    Map(MapArgs),
    /// Embed one instance into a hardware graph.
    Embed(EmbedArgs),
    /// Run a sweep described by a TOML configuration.
    Run(RunArgs),
    /// Small-system spectra and thermal relaxation.
    #[command(subcommand)]
    Spectrum(spectrum::SpectrumCommand),
    /// Ensemble statistics and pause advantages from a results file.
    Report(ReportArgs),
}

#[derive(Debug, Subcommand)]
enum InstancesCommand {
    /// Export the ensemble (or the given labels) as instance JSON files.
    Export {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree_bound: usize,
        #[arg(long, default_value_t = 45)]
        size: usize,
        /// `graph/weights` labels; the ensemble when omitted.
        labels: Vec<String>,
    },
}

#[derive(Debug, Args)]
struct InstanceArg {
    /// `graph/weights`, e.g. `m5ver2/w4`.
    label: String,
    #[arg(long, default_value_t = 2)]
    degree_bound: usize,
}

#[derive(Debug, Args)]
struct MapArgs {
    #[command(flatten)]
    instance: InstanceArg,
    #[arg(long, default_value_t = 0)]
    epsilon: i64,
    #[arg(long)]
    no_preprocess: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[command(flatten)]
    instance: InstanceArg,
    /// Chain strength |J_F| of the written embedded model.
    #[arg(long, default_value_t = 1.5)]
    jf: f64,
    /// Configuration supplying hardware and mapping settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    reads: Option<usize>,
    #[arg(long)]
    gauges: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    jf: Option<Vec<f64>>,
    /// Ignore an existing manifest instead of resuming.
    #[arg(long)]
    fresh: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    bootstrap: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    baseline_jf: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Instances(InstancesCommand::Export {
            out,
            degree_bound,
            size,
            labels,
        }) => {
            let cfg = ExperimentConfig {
                instances: config::InstanceSelection {
                    labels,
                    ensemble_size: size,
                    degree_bound,
                    ..Default::default()
                },
                ..Default::default()
            };
            fs::create_dir_all(&out)?;
            let mut list = String::new();
            for inst in cfg.load_instances()? {
                let name = format!("{}.json", safe_name(&inst.label));
                inst.save_json(&out.join(&name))?;
                list.push_str(&format!("{}\t{name}\n", inst.label));
            }
            write_atomic(&out.join("instances.tsv"), list.as_bytes())?;
        }
        Command::Map(a) => {
            let inst = parse_label(&a.instance.label, a.instance.degree_bound)?;
            let qubo = build_qubo(
                &inst,
                &MapperOptions {
                    epsilon: a.epsilon,
                    preprocess: !a.no_preprocess,
                    ..MapperOptions::default()
                },
            )?;
            fs::create_dir_all(&a.out)?;
            let stem = safe_name(&inst.label);
            let mut coo = Vec::new();
            write_coo(&qubo, &inst.label, &mut coo)?;
            write_atomic(&a.out.join(format!("{stem}.qubo.txt")), &coo)?;
            write_atomic(
                &a.out.join(format!("{stem}.registry.json")),
                registry_json(&qubo, &inst.label)?.as_bytes(),
            )?;
            println!("{}: {} variables", inst.label, qubo.num_vars());
        }
        Command::Embed(a) => {
            let cfg = match &a.config {
                Some(p) => ExperimentConfig::load(p)?,
                None => ExperimentConfig::default(),
            };
            let inst = parse_label(&a.instance.label, a.instance.degree_bound)?;
            let qubo = build_qubo(
                &inst,
                &MapperOptions {
                    epsilon: cfg.mapping.epsilon,
                    preprocess: cfg.mapping.preprocess,
                    ..MapperOptions::default()
                },
            )?;
            let logical = qubo_to_ising(&qubo).scale_to_range(1.0)?;
            let hw = cfg.hardware_graph()?;
            let emb = find_embedding(&LogicalGraph::from_ising(&logical), &hw, &cfg.embed_options())
                .with_context(|| format!("embedding {}", inst.label))?;
            let embedded = embed_ising(&logical, &emb, &hw, a.jf, ChainMode::SpanningTree)?;
            fs::create_dir_all(&a.out)?;
            let stem = safe_name(&inst.label);
            write_atomic(&a.out.join(format!("{stem}.embedding.json")), emb.to_json()?.as_bytes())?;
            let mut coo = Vec::new();
            embedded.ising.write_coo(&inst.label, &mut coo)?;
            write_atomic(&a.out.join(format!("{stem}.embedded.txt")), &coo)?;
            let longest = emb.chains.iter().map(Vec::len).max().unwrap_or(0);
            println!(
                "{}: {} physical qubits, longest chain {longest}",
                inst.label,
                emb.chains.iter().map(Vec::len).sum::<usize>()
            );
        }
        Command::Run(a) => {
            let mut cfg = ExperimentConfig::load(&a.config)?;
            if let Some(o) = a.out {
                cfg.output_dir = o;
            }
            if let Some(r) = a.reads {
                cfg.sampling.reads = r;
            }
            if let Some(g) = a.gauges {
                cfg.sampling.gauges = g;
            }
            if let Some(s) = a.seed {
                cfg.sampling.seed = s;
            }
            if let Some(jf) = a.jf {
                cfg.sweep.jf = jf;
            }
            cfg.validate()?;
            let summary = run::cmd_run(&cfg, a.fresh)?;
            println!("{} rows written to {}", summary.rows, summary.results.display());
            if summary.failures > 0 {
                eprintln!("{} grid points failed, see errors.csv", summary.failures);
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Spectrum(c) => spectrum::cmd_spectrum(&c)?,
        Command::Report(a) => report::cmd_report(&report::ReportOptions {
            results: &a.results,
            out: &a.out,
            bootstrap: a.bootstrap,
            seed: a.seed,
            baseline_jf: a.baseline_jf,
        })?,
    }
    Ok(ExitCode::SUCCESS)
}
