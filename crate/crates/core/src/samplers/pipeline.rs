use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{all_energies, Read, ReadMeta, ReadSet, ReadTag, SaSchedule, Sampler, SamplerError};
use crate::embedding::{EmbeddedIsing, Unembedded};
use crate::ising::{partial_gauge, ungauge_read, Gauge};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeMode {
    /// Independent random logical gauge per gauge index.
    #[default]
    Random,
    /// Every gauge is the identity; only the sampler seeds differ.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    pub num_gauges: usize,
    pub reads_per_gauge: usize,
    pub seed: u64,
    #[serde(default)]
    pub gauge_mode: GaugeMode,
}

impl ExperimentOptions {
    pub fn new(num_gauges: usize, reads_per_gauge: usize, seed: u64) -> Self {
        ExperimentOptions {
            num_gauges,
            reads_per_gauge,
            seed,
            gauge_mode: GaugeMode::Random,
        }
    }

    pub fn identity(mut self) -> Self {
        self.gauge_mode = GaugeMode::Identity;
        self
    }

    /// Seed of gauge `g`.
    pub fn gauge_seed(&self, g: usize) -> u64 {
        derive_seed(self.seed, g as u64)
    }

    /// Seed handed to the sampler for gauge `g`.
    pub fn sampler_seed(&self, g: usize) -> u64 {
        derive_seed(self.gauge_seed(g), 1)
    }
}

/// Samples the embedded model under each gauge, maps every read back to the original
/// frame and unembeds it. Reads with broken vertex models are kept, tagged
/// [`ReadTag::ChainBreak`], with the first qubit of each chain as their spins. Energies
/// are those of the physical configuration under the ungauged embedded model.
pub fn run_experiment(
    embedded: &EmbeddedIsing,
    opts: &ExperimentOptions,
    sampler: &dyn Sampler,
) -> Result<ReadSet, SamplerError> {
    let mut meta = ReadMeta {
        sampler: sampler.id(),
        seed: opts.seed,
        num_reads: opts.num_gauges * opts.reads_per_gauge,
        j_ferro: Some(embedded.j_ferro),
        ..ReadMeta::default()
    };
    let mut out = Vec::new();
    for g in 0..opts.num_gauges {
        let part = sample_gauge(embedded, opts, sampler, g)?;
        meta.gauge_seeds.extend(part.meta.gauge_seeds);
        if meta.schedule.is_none() {
            meta.schedule = part.meta.schedule;
        }
        out.extend(part.reads);
    }
    Ok(ReadSet::from_reads(meta, out))
}

/// Gauge `g` of [`run_experiment`] on its own; concatenating gauges `0..num_gauges`
/// gives the same reads.
pub fn sample_gauge(
    embedded: &EmbeddedIsing,
    opts: &ExperimentOptions,
    sampler: &dyn Sampler,
    g: usize,
) -> Result<ReadSet, SamplerError> {
    let n = embedded.num_logical();
    let gauge = match opts.gauge_mode {
        GaugeMode::Random => Gauge::random(n, opts.gauge_seed(g)),
        GaugeMode::Identity => Gauge::identity(n),
    };
    let gauged = partial_gauge(embedded, &gauge)?;
    let physical_gauge = gauge.expand(&embedded.owner);
    let raw = sampler.sample(&gauged.ising, opts.reads_per_gauge, opts.sampler_seed(g))?;
    let meta = ReadMeta {
        sampler: sampler.id(),
        seed: opts.seed,
        num_reads: opts.reads_per_gauge,
        gauge_seeds: vec![gauge.seed],
        schedule: raw.meta.schedule,
        j_ferro: Some(embedded.j_ferro),
        ..ReadMeta::default()
    };
    let reads = raw.reads.into_iter().map(|r| {
        let physical = ungauge_read(&r.spins, &physical_gauge);
        let (spins, tag) = match embedded.unembed(&physical) {
            Unembedded::Logical(s) => (s, ReadTag::Logical),
            Unembedded::ChainBreak(b) => (
                embedded.chains.iter().map(|c| physical[c[0]]).collect(),
                ReadTag::ChainBreak(b),
            ),
        };
        Read {
            spins,
            energy: r.energy,
            count: r.count,
            tag,
            gauge: Some(g),
        }
    });
    Ok(ReadSet::from_reads(meta, reads))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusWindow {
    /// States with `E <= E_ground + w`.
    Absolute(f64),
    /// Window as a fraction of the spectral width `E_max - E_ground`.
    FractionOfWidth(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusMethod {
    /// Every physical configuration (at most 24 qubits).
    Exhaustive,
    /// Distinct configurations among simulated-annealing reads; ground energy and
    /// spectral width are estimated from the sampled states.
    Sampled {
        schedule: SaSchedule,
        num_reads: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub ground_energy: f64,
    /// Absolute window actually applied.
    pub window: f64,
    pub states_in_window: usize,
    pub broken_in_window: usize,
    pub fraction_broken: f64,
}

const WINDOW_TOL: f64 = 1e-9;

/// Fraction of chain-broken configurations among the low-lying states of the embedded
/// model.
pub fn low_energy_census(
    embedded: &EmbeddedIsing,
    window: CensusWindow,
    method: &CensusMethod,
) -> Result<CensusResult, SamplerError> {
    let states: Vec<(Vec<i8>, f64)> = match method {
        CensusMethod::Exhaustive => {
            let n = embedded.num_qubits();
            let energies = all_energies(&embedded.ising)?;
            energies
                .into_iter()
                .enumerate()
                .map(|(k, e)| (crate::ising::spins_from_index(k as u64, n), e))
                .collect()
        }
        CensusMethod::Sampled {
            schedule,
            num_reads,
            seed,
        } => {
            let rs = super::simulated_annealing(&embedded.ising, schedule, *num_reads, *seed)?;
            let mut seen = HashSet::new();
            rs.reads
                .into_iter()
                .filter(|r| seen.insert(r.spins.clone()))
                .map(|r| (r.spins, r.energy))
                .collect()
        }
    };
    if states.is_empty() {
        return Err(SamplerError::EmptyModel);
    }
    let lo = states.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let hi = states.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let w = match window {
        CensusWindow::Absolute(w) => w,
        CensusWindow::FractionOfWidth(f) => f * (hi - lo),
    };
    let mut inside = 0;
    let mut broken = 0;
    for (s, e) in &states {
        if *e <= lo + w + WINDOW_TOL {
            inside += 1;
            if !embedded.is_aligned(s) {
                broken += 1;
            }
        }
    }
    Ok(CensusResult {
        ground_energy: lo,
        window: w,
        states_in_window: inside,
        broken_in_window: broken,
        fraction_broken: broken as f64 / inside as f64,
    })
}
