//! Classical samplers standing in for the annealer, and the gauge-averaged pipeline.

mod exact;
mod pipeline;
mod readset;
mod sa;

use thiserror::Error;

pub use exact::{all_energies, exhaustive_ground, GroundStates, MAX_EXHAUSTIVE_SPINS};
pub use pipeline::{
    low_energy_census, run_experiment, sample_gauge, CensusMethod, CensusResult, CensusWindow,
    ExperimentOptions, GaugeMode,
};
pub use readset::{Read, ReadMeta, ReadSet, ReadTag};
pub use sa::{simulated_annealing, SaSchedule, SimulatedAnnealing};

pub use crate::rng::derive_seed;

use crate::ising::IsingModel;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("exhaustive search is limited to {max} spins, model has {n}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("model has no spins")]
    EmptyModel,
    #[error(transparent)]
    Ising(#[from] crate::ising::IsingError),
    #[error(transparent)]
    Embedding(#[from] crate::embedding::EmbeddingError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed read file: {0}")]
    Format(String),
}

/// Anything that turns an Ising model into a batch of reads.
pub trait Sampler {
    /// Short identifier stored in read metadata.
    fn id(&self) -> String;

    fn sample(&self, model: &IsingModel, num_reads: usize, seed: u64)
        -> Result<ReadSet, SamplerError>;
}
