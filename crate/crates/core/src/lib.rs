//! Degree-bounded minimum spanning trees (BD-MST) on simulated quantum annealers.
//!
//! The crate is organised along the pipeline a BD-MST instance travels through:
//!
//! * [`instances`] holds graphs, the built-in n=5 catalog and exact classical oracles;
//! * [`qubo`] compiles an instance with the level-based mapping and decodes bitstrings;
//! * [`ising`] converts QUBOs to Ising form, rescales them and applies (partial) gauges;
//! * [`embedding`] generates Chimera/Pegasus hardware graphs, finds minor embeddings and
//!   builds the embedded Hamiltonian with ferromagnetic chains of strength `|J_F|`;
//! * [`samplers`] provides simulated annealing, exhaustive ground-state search and the
//!   gauge-averaged experiment pipeline;
//! * [`qsim`] simulates small embedded problems quantum mechanically (instantaneous
//!   spectra, gap traces, perturbative checks, a thermal pause model);
//! * [`metrics`] computes success probabilities, time-to-solution and bootstrap summaries.
//!
//! Spin convention used everywhere: bit `1` maps to spin `+1`, bit `0` to spin `-1`.

pub mod embedding;
pub mod instances;
pub mod ising;
pub mod metrics;
pub mod qsim;
pub mod qubo;
pub mod samplers;

pub(crate) mod rng;
