//! Exact small-system simulation of the anneal on embedded models: instantaneous
//! spectra, gap traces against chain strength, perturbative checks and a thermal
//! relaxation model of pausing.

mod hamiltonian;
mod relax;
mod schedule;
mod spectrum;
mod toy;

use thiserror::Error;

pub use hamiltonian::{
    classical_energies, hamiltonian_at, lowest_eigs, Eigenpairs, Hamiltonian, EIG_TOL,
    MAX_QUBITS,
};
pub use relax::{
    gibbs, kl_divergence, level_rates, pause_relax_evolve, LevelRates, RelaxParams,
    RelaxResult, DEFAULT_TEMPERATURE,
};
pub use schedule::{AnnealSchedule, Pause, ScheduleCurves};
pub use spectrum::{
    energy_shift_check, gap_trace, hf_expectation, logical_probability, perturbation_gap_shift,
    spectrum_trace, LevelShift, SpectrumTrace, DEGENERACY_TOL,
};
pub use toy::triangle_toy;

#[derive(Debug, Error)]
pub enum QsimError {
    #[error("quantum simulation is limited to {max} qubits, model has {n}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("eigensolver did not converge (largest residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("need at least two tracked levels, got {0}")]
    Levels(usize),
    #[error(transparent)]
    Embedding(#[from] crate::embedding::EmbeddingError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
