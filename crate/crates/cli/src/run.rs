use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bdmst_core::embedding::{embed_ising, find_embedding, ChainMode, Embedding, LogicalGraph};
use bdmst_core::instances::{solve_bdmst_exact, BdmstSolution, ProblemInstance};
use bdmst_core::ising::qubo_to_ising;
use bdmst_core::metrics::{median, ExtReal, RunResult};
use bdmst_core::qubo::{build_qubo, MapperOptions, Qubo};
use bdmst_core::samplers::{derive_seed, run_experiment, ExperimentOptions, ReadSet, SimulatedAnnealing};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::output::{safe_name, write_atomic};

/// Outcome of sampling one instance at one chain strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entry {
    Done { p_success: f64, reads: usize, gauges: usize },
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Manifest {
    /// Serialised configuration the entries were produced with.
    pub config: String,
    pub entries: BTreeMap<String, Entry>,
}

fn key(label: &str, jf: f64) -> String {
    format!("{label}|jf={jf}")
}

fn label_seed(label: &str) -> u64 {
    // FNV-1a; stable across runs and platforms
    label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

pub struct RunSummary {
    pub rows: usize,
    pub failures: usize,
    pub results: PathBuf,
}

struct Prepared {
    qubo: Qubo,
    logical: bdmst_core::ising::IsingModel,
    embedding: Embedding,
    oracle_cost: u64,
}

fn prepare(cfg: &ExperimentConfig, inst: &ProblemInstance) -> Result<Prepared> {
    let opts = MapperOptions {
        epsilon: cfg.mapping.epsilon,
        preprocess: cfg.mapping.preprocess,
        ..MapperOptions::default()
    };
    let qubo = build_qubo(inst, &opts)?;
    let BdmstSolution::Optimal { cost, .. } = solve_bdmst_exact(inst)? else {
        bail!("no feasible tree at degree bound {}", inst.degree_bound);
    };
    let logical = qubo_to_ising(&qubo).scale_to_range(1.0)?;
    let hw = cfg.hardware_graph()?;
    let mut eopts = cfg.embed_options();
    eopts.seed = derive_seed(eopts.seed, label_seed(&inst.label));
    let embedding = find_embedding(&LogicalGraph::from_ising(&logical), &hw, &eopts)?;
    Ok(Prepared {
        qubo,
        logical,
        embedding,
        oracle_cost: cost,
    })
}

fn sample(
    cfg: &ExperimentConfig,
    inst: &ProblemInstance,
    prep: &Prepared,
    jf: f64,
    out_dir: &Path,
) -> Result<Entry> {
    let m = &cfg.sampling;
    let name = format!("{}__jf{jf}.jsonl.gz", safe_name(&inst.label));
    let reads = if m.sampler == "import" {
        let dir = m.import_dir.as_ref().expect("validated");
        ReadSet::read_jsonl_gz(&dir.join(&name)).with_context(|| format!("importing {name}"))?
    } else {
        let hw = cfg.hardware_graph()?;
        let embedded = embed_ising(&prep.logical, &prep.embedding, &hw, jf, ChainMode::SpanningTree)?;
        let seed = derive_seed(derive_seed(m.seed, label_seed(&inst.label)), jf.to_bits());
        let opts = ExperimentOptions::new(m.gauges, m.reads / m.gauges, seed);
        let sampler = SimulatedAnnealing {
            schedule: cfg.sa_schedule()?,
        };
        let mut rs = run_experiment(&embedded, &opts, &sampler)?;
        rs.meta.label = inst.label.clone();
        if m.save_reads {
            let dir = out_dir.join("reads");
            fs::create_dir_all(&dir)?;
            rs.write_jsonl_gz(&dir.join(&name))?;
        }
        rs
    };
    let p = bdmst_core::metrics::p_success(&reads, &prep.qubo, inst, prep.oracle_cost)?;
    Ok(Entry::Done {
        p_success: p,
        reads: reads.total_reads(),
        gauges: reads.meta.gauge_seeds.len().max(1),
    })
}

fn load_manifest(path: &Path, config: &str, fresh: bool) -> Result<Manifest> {
    if fresh || !path.exists() {
        return Ok(Manifest {
            config: config.to_string(),
            ..Manifest::default()
        });
    }
    let m: Manifest = serde_json::from_str(&fs::read_to_string(path)?)
        .with_context(|| format!("reading manifest {}", path.display()))?;
    if m.config != config {
        bail!(
            "{} was written with a different configuration; use --fresh to start over",
            path.display()
        );
    }
    Ok(m)
}

/// Samples every (instance, |J_F|) pair not yet in the manifest, then writes one result
/// row per (instance, grid point). The toolkit's samplers have no notion of a pause, so
/// pause points share the reads of their `|J_F|` and differ only in `t_tot`.
pub fn cmd_run(cfg: &ExperimentConfig, fresh: bool) -> Result<RunSummary> {
    let out = &cfg.output_dir;
    fs::create_dir_all(out)?;
    let config_text = toml::to_string(cfg)?;
    let manifest_path = out.join("manifest.json");
    let mut manifest = load_manifest(&manifest_path, &config_text, fresh)?;
    let instances = cfg.load_instances()?;

    for inst in &instances {
        let todo: Vec<f64> = cfg
            .sweep
            .jf
            .iter()
            .copied()
            .filter(|&jf| !manifest.entries.contains_key(&key(&inst.label, jf)))
            .collect();
        if todo.is_empty() {
            continue;
        }
        let started = Instant::now();
        let prepared = prepare(cfg, inst);
        if let Ok(p) = &prepared {
            let dir = out.join("embeddings");
            fs::create_dir_all(&dir)?;
            let path = dir.join(format!("{}.json", safe_name(&inst.label)));
            write_atomic(&path, p.embedding.to_json()?.as_bytes())?;
        }
        for jf in todo {
            let entry = match &prepared {
                Ok(p) => sample(cfg, inst, p, jf, out).unwrap_or_else(|e| Entry::Failed {
                    error: format!("{e:#}"),
                }),
                Err(e) => Entry::Failed {
                    error: format!("{e:#}"),
                },
            };
            if let Entry::Failed { error } = &entry {
                eprintln!("error: {} at jf {jf}: {error}", inst.label);
            }
            manifest.entries.insert(key(&inst.label, jf), entry);
            write_atomic(&manifest_path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;
        }
        eprintln!("{}: sampled in {:.1}s", inst.label, started.elapsed().as_secs_f64());
    }
    write_outputs(cfg, &instances, &manifest)
}

fn pause_points(cfg: &ExperimentConfig) -> Vec<Option<(f64, f64)>> {
    let mut pts = Vec::new();
    if cfg.sweep.baseline {
        pts.push(None);
    }
    for &sp in &cfg.sweep.s_p {
        for &tp in &cfg.sweep.t_p {
            pts.push(Some((sp, tp)));
        }
    }
    pts
}

fn write_outputs(
    cfg: &ExperimentConfig,
    instances: &[ProblemInstance],
    manifest: &Manifest,
) -> Result<RunSummary> {
    let out = &cfg.output_dir;
    let mut rows = Vec::new();
    let mut errors = csv::Writer::from_writer(Vec::new());
    errors.write_record(["instance", "jf", "error"])?;
    let mut failures = 0;
    for inst in instances {
        for &jf in &cfg.sweep.jf {
            match &manifest.entries[&key(&inst.label, jf)] {
                Entry::Done { p_success, reads, gauges } => {
                    for pause in pause_points(cfg) {
                        rows.push(RunResult::new(
                            inst.label.clone(),
                            cfg.sweep.t_a,
                            pause,
                            jf,
                            *gauges,
                            *reads,
                            *p_success,
                        )?);
                    }
                }
                Entry::Failed { error } => {
                    failures += 1;
                    errors.write_record([inst.label.as_str(), &jf.to_string(), error])?;
                }
            }
        }
    }
    let mut text = format!(
        "# bdmst {} seed={} sampler={} reads={} gauges={}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.sampling.seed,
        cfg.sampling.sampler,
        cfg.sampling.reads,
        cfg.sampling.gauges
    )
    .into_bytes();
    bdmst_core::metrics::write_results_csv(&rows, &mut text)?;
    let results = out.join("results.csv");
    write_atomic(&results, &text)?;
    let errors_path = out.join("errors.csv");
    if failures > 0 {
        write_atomic(&errors_path, &errors.into_inner()?)?;
    } else if errors_path.exists() {
        fs::remove_file(&errors_path)?;
    }
    write_atomic(&out.join("curves.csv"), &curves(cfg, &rows)?)?;
    Ok(RunSummary {
        rows: rows.len(),
        failures,
        results,
    })
}

/// Ensemble median p_success and TTS per grid point, ordered for plotting against s_p.
fn curves(cfg: &ExperimentConfig, rows: &[RunResult]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["jf", "t_p", "s_p", "instances", "median_p_success", "median_tts"])?;
    for &jf in &cfg.sweep.jf {
        for pause in pause_points(cfg) {
            let sel: Vec<&RunResult> = rows
                .iter()
                .filter(|r| r.jf == jf && r.s_p == pause.map(|p| p.0) && (pause.is_none() || r.t_p == pause.unwrap().1))
                .collect();
            if sel.is_empty() {
                continue;
            }
            let p: Vec<ExtReal> = sel.iter().map(|r| ExtReal::Finite(r.p_success)).collect();
            let t: Vec<ExtReal> = sel.iter().map(|r| r.tts).collect();
            let (sp, tp) = match pause {
                Some((s, t)) => (s.to_string(), t.to_string()),
                None => (String::new(), "0".to_string()),
            };
            w.write_record([
                jf.to_string(),
                tp,
                sp,
                sel.len().to_string(),
                median(&p)?.to_string(),
                median(&t)?.to_string(),
            ])?;
        }
    }
    Ok(w.into_inner()?)
}
