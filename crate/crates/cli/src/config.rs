use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bdmst_core::embedding::{chimera_graph, pegasus_graph, EmbedOptions, HardwareGraph};
use bdmst_core::instances::{catalog_ensemble, catalog_instance, ProblemInstance};
use bdmst_core::samplers::SaSchedule;
use serde::{Deserialize, Serialize};

/// Experiment configuration. Every field has a default mirroring the original runs
/// (t_a = 1 µs, 50 000 reads over 100 partial gauges).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output_dir: PathBuf,
    pub instances: InstanceSelection,
    pub mapping: Mapping,
    pub hardware: Hardware,
    pub sweep: Sweep,
    pub sampling: Sampling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceSelection {
    /// `graph/weights` labels; empty selects the catalog ensemble.
    pub labels: Vec<String>,
    pub ensemble_size: usize,
    pub degree_bound: usize,
    /// `"max-degree"` or a 1-based vertex id.
    pub root: RootPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RootPolicy {
    Named(String),
    Vertex(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Mapping {
    pub epsilon: i64,
    pub preprocess: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hardware {
    /// `"chimera"` or `"pegasus"`.
    pub topology: String,
    pub size: usize,
    pub embed_attempts: usize,
    pub embed_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub t_a: f64,
    pub s_p: Vec<f64>,
    pub t_p: Vec<f64>,
    pub jf: Vec<f64>,
    /// Also emit the no-pause baseline at every `jf`.
    pub baseline: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    /// `"sa"` or `"import"` (read sets produced elsewhere, see `import_dir`).
    pub sampler: String,
    /// Total reads per grid point, split evenly over the gauges.
    pub reads: usize,
    pub gauges: usize,
    pub seed: u64,
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub import_dir: Option<PathBuf>,
    pub save_reads: bool,
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n)
        .map(|i| ((start + i as f64 * step) * 1e6).round() / 1e6)
        .collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            output_dir: PathBuf::from("out"),
            instances: InstanceSelection::default(),
            mapping: Mapping::default(),
            hardware: Hardware::default(),
            sweep: Sweep::default(),
            sampling: Sampling::default(),
        }
    }
}

impl Default for InstanceSelection {
    fn default() -> Self {
        InstanceSelection {
            labels: Vec::new(),
            ensemble_size: 45,
            degree_bound: 2,
            root: RootPolicy::Named("max-degree".into()),
        }
    }
}

impl Default for Mapping {
    fn default() -> Self {
        Mapping {
            epsilon: 0,
            preprocess: true,
        }
    }
}

impl Default for Hardware {
    fn default() -> Self {
        Hardware {
            topology: "chimera".into(),
            size: 16,
            embed_attempts: 1,
            embed_seed: 5,
        }
    }
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            t_a: 1.0,
            s_p: grid(0.2, 0.5, 0.02),
            t_p: vec![1.0],
            jf: grid(1.0, 2.0, 0.1),
            baseline: true,
        }
    }
}

impl Default for Sampling {
    fn default() -> Self {
        let sa = SaSchedule::default();
        Sampling {
            sampler: "sa".into(),
            reads: 50_000,
            gauges: 100,
            seed: 1,
            sweeps: sa.sweeps,
            beta_start: sa.beta_start,
            beta_end: sa.beta_end,
            import_dir: None,
            save_reads: false,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sweep;
        if s.jf.is_empty() {
            bail!("sweep.jf: grid is empty");
        }
        if s.jf.iter().any(|&j| !(j > 0.0 && j.is_finite())) {
            bail!("sweep.jf: chain strengths must be positive");
        }
        if s.t_a.is_nan() || s.t_a <= 0.0 {
            bail!("sweep.t_a: anneal time must be positive");
        }
        if s.s_p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            bail!("sweep.s_p: pause locations must lie in [0, 1]");
        }
        if s.t_p.iter().any(|&x| x.is_nan() || x <= 0.0) {
            bail!("sweep.t_p: pause durations must be positive");
        }
        if !s.baseline && (s.s_p.is_empty() || s.t_p.is_empty()) {
            bail!("sweep: no grid points (s_p or t_p empty and baseline = false)");
        }
        let m = &self.sampling;
        if m.reads == 0 {
            bail!("sampling.reads: must be at least 1");
        }
        if m.gauges == 0 || !m.reads.is_multiple_of(m.gauges) {
            bail!("sampling.gauges: {} gauges do not divide {} reads", m.gauges, m.reads);
        }
        match m.sampler.as_str() {
            "sa" => {
                self.sa_schedule()?;
            }
            "import" if m.import_dir.is_none() => bail!("sampling.import_dir: required by sampler = \"import\""),
            "import" => {}
            other => bail!("sampling.sampler: unknown sampler {other:?} (expected \"sa\" or \"import\")"),
        }
        if let RootPolicy::Named(n) = &self.instances.root {
            if n != "max-degree" {
                bail!("instances.root: expected \"max-degree\" or a vertex id, got {n:?}");
            }
        }
        self.hardware_graph()?;
        Ok(())
    }

    pub fn sa_schedule(&self) -> Result<SaSchedule> {
        let m = &self.sampling;
        let sch = SaSchedule {
            sweeps: m.sweeps,
            beta_start: m.beta_start,
            beta_end: m.beta_end,
        };
        sch.validate().context("sampling: invalid annealing schedule")?;
        Ok(sch)
    }

    pub fn hardware_graph(&self) -> Result<HardwareGraph> {
        let h = &self.hardware;
        Ok(match h.topology.as_str() {
            "chimera" => chimera_graph(h.size, h.size, 4)?,
            "pegasus" => pegasus_graph(h.size)?,
            other => bail!("hardware.topology: unknown topology {other:?}"),
        })
    }

    pub fn embed_options(&self) -> EmbedOptions {
        EmbedOptions {
            attempts: self.hardware.embed_attempts.max(1),
            seed: self.hardware.embed_seed,
            ..EmbedOptions::default()
        }
    }

    pub fn load_instances(&self) -> Result<Vec<ProblemInstance>> {
        let sel = &self.instances;
        let list = if sel.labels.is_empty() {
            catalog_ensemble(sel.degree_bound, sel.ensemble_size)?
        } else {
            sel.labels
                .iter()
                .map(|l| parse_label(l, sel.degree_bound))
                .collect::<Result<_>>()?
        };
        list.into_iter()
            .map(|inst| match sel.root {
                RootPolicy::Vertex(0) => bail!("instances.root: vertex ids are 1-based"),
                RootPolicy::Vertex(v) => Ok(inst.with_root(v - 1)?),
                RootPolicy::Named(_) => Ok(inst),
            })
            .collect()
    }
}

/// `graph/weights`, e.g. `m5ver2/w4`.
pub fn parse_label(label: &str, degree_bound: usize) -> Result<ProblemInstance> {
    let (g, w) = label
        .split_once('/')
        .with_context(|| format!("instance label {label:?} is not of the form graph/weights"))?;
    catalog_instance(g, w, degree_bound).with_context(|| format!("instance {label}"))
}
