use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{validate_embedding, Embedding, EmbeddingError, HardwareGraph, LogicalGraph};
use crate::ising::IsingModel;

/// Which intra-chain couplers carry the ferromagnetic coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainMode {
    /// A breadth-first spanning tree of each vertex model.
    #[default]
    SpanningTree,
    /// Every coupler inside a vertex model.
    AllInternal,
}

/// An Ising model on the physical qubits used by an embedding.
///
/// Qubits are renumbered compactly: index `i` is hardware qubit `qubits[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedIsing {
    pub ising: IsingModel,
    /// Hardware id per compact index, ascending.
    pub qubits: Vec<usize>,
    /// Compact indices per logical variable.
    pub chains: Vec<Vec<usize>>,
    /// Logical variable per compact index.
    pub owner: Vec<usize>,
    /// Compact pairs `(a, b)`, `a < b`, carrying `-j_ferro`.
    pub chain_edges: Vec<(usize, usize)>,
    /// Physical coupler (compact pair) chosen for each logical coupling.
    pub problem_couplers: BTreeMap<(usize, usize), (usize, usize)>,
    pub j_ferro: f64,
    pub mode: ChainMode,
}

/// Result of reading logical values off a physical configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unembedded {
    Logical(Vec<i8>),
    /// Logical variables whose vertex model disagrees internally.
    ChainBreak(Vec<usize>),
}

impl Unembedded {
    pub fn logical(&self) -> Option<&[i8]> {
        match self {
            Unembedded::Logical(s) => Some(s),
            Unembedded::ChainBreak(_) => None,
        }
    }
}

fn chain_tree(chain: &[usize], hw: &HardwareGraph, mode: ChainMode) -> Vec<(usize, usize)> {
    let members: BTreeSet<usize> = chain.iter().copied().collect();
    let mut out = Vec::new();
    match mode {
        ChainMode::AllInternal => {
            for &a in chain {
                for nb in hw.neighbors(a) {
                    if a < nb && members.contains(&nb) {
                        out.push((a, nb));
                    }
                }
            }
        }
        ChainMode::SpanningTree => {
            let Some(&start) = chain.first() else {
                return out;
            };
            let mut seen = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            while let Some(q) = queue.pop_front() {
                for nb in hw.neighbors(q) {
                    if members.contains(&nb) && seen.insert(nb) {
                        out.push((q.min(nb), q.max(nb)));
                        queue.push_back(nb);
                    }
                }
            }
        }
    }
    out
}

/// Builds the physical Hamiltonian: fields split equally over each vertex model, each
/// logical coupling placed on the smallest available coupler between the two models,
/// and `-j_ferro` on the chain couplers.
pub fn embed_ising(
    logical: &IsingModel,
    embedding: &Embedding,
    hw: &HardwareGraph,
    j_ferro: f64,
    mode: ChainMode,
) -> Result<EmbeddedIsing, EmbeddingError> {
    if !(j_ferro > 0.0 && j_ferro.is_finite()) {
        return Err(EmbeddingError::ChainStrength(j_ferro));
    }
    for (&(i, j), &value) in &logical.j {
        if value.abs() > 1.0 + 1e-12 {
            return Err(EmbeddingError::CouplingRange { i, j, value });
        }
    }
    let graph = LogicalGraph::from_ising(logical);
    let verdict = validate_embedding(embedding, &graph, hw);
    if !verdict.is_valid() {
        return Err(EmbeddingError::Invalid(verdict));
    }
    let mut qubits: Vec<usize> = embedding.chains.iter().flatten().copied().collect();
    qubits.sort_unstable();
    let index: HashMap<usize, usize> = qubits.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let mut owner = vec![0; qubits.len()];
    let chains: Vec<Vec<usize>> = embedding
        .chains
        .iter()
        .enumerate()
        .map(|(v, c)| {
            c.iter()
                .map(|q| {
                    owner[index[q]] = v;
                    index[q]
                })
                .collect()
        })
        .collect();
    let mut ising = IsingModel::new(qubits.len());
    ising.offset = logical.offset;
    ising.scale = logical.scale;
    for (v, &h) in logical.h.iter().enumerate() {
        let share = h / chains[v].len() as f64;
        for &q in &chains[v] {
            ising.h[q] += share;
        }
    }
    let mut problem_couplers = BTreeMap::new();
    for (&(i, j), &c) in &logical.j {
        let mut best: Option<(usize, usize)> = None;
        for &a in &embedding.chains[i] {
            for b in hw.neighbors(a) {
                if index.get(&b).is_some_and(|&bi| owner[bi] == j) {
                    let pair = (a.min(b), a.max(b));
                    if best.is_none_or(|p| pair < p) {
                        best = Some(pair);
                    }
                }
            }
        }
        let (a, b) = best.expect("validated embedding covers every coupling");
        let pair = (index[&a], index[&b]);
        ising.add_coupling(pair.0, pair.1, c);
        problem_couplers.insert((i, j), (pair.0.min(pair.1), pair.0.max(pair.1)));
    }
    let mut chain_edges = Vec::new();
    for c in &embedding.chains {
        for (a, b) in chain_tree(c, hw, mode) {
            let (x, y) = (index[&a], index[&b]);
            chain_edges.push((x.min(y), x.max(y)));
        }
    }
    chain_edges.sort_unstable();
    for &(a, b) in &chain_edges {
        ising.add_coupling(a, b, -j_ferro);
    }
    Ok(EmbeddedIsing {
        ising,
        qubits,
        chains,
        owner,
        chain_edges,
        problem_couplers,
        j_ferro,
        mode,
    })
}

impl EmbeddedIsing {
    pub fn num_logical(&self) -> usize {
        self.chains.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Same model with a different chain strength.
    pub fn with_j_ferro(&self, j_ferro: f64) -> Result<EmbeddedIsing, EmbeddingError> {
        if !(j_ferro > 0.0 && j_ferro.is_finite()) {
            return Err(EmbeddingError::ChainStrength(j_ferro));
        }
        let mut out = self.clone();
        for &(a, b) in &self.chain_edges {
            out.ising.j.insert((a, b), -j_ferro);
        }
        out.j_ferro = j_ferro;
        Ok(out)
    }

    /// Energy contributed by the chains when every chain is aligned.
    pub fn chain_offset(&self) -> f64 {
        -self.j_ferro * self.chain_edges.len() as f64
    }

    /// Whether chain couplings fit the default extended range `[-2, 1]`.
    pub fn fits_extended_range(&self) -> bool {
        self.j_ferro <= 2.0
    }

    /// Range of the problem couplings (without chains).
    pub fn problem_range(&self) -> (f64, f64) {
        let chains: BTreeSet<(usize, usize)> = self.chain_edges.iter().copied().collect();
        self.ising
            .j
            .iter()
            .filter(|(k, _)| !chains.contains(k))
            .fold((0.0, 0.0), |(lo, hi), (_, &c)| (f64::min(lo, c), f64::max(hi, c)))
    }

    /// The chain-only Hamiltonian `H_F` (couplings `-1` on chain edges).
    pub fn chain_hamiltonian(&self) -> IsingModel {
        let mut m = IsingModel::new(self.num_qubits());
        for &(a, b) in &self.chain_edges {
            m.add_coupling(a, b, -1.0);
        }
        m
    }

    /// Copies logical values onto every qubit of their vertex model.
    pub fn embed_spins(&self, logical: &[i8]) -> Vec<i8> {
        self.owner.iter().map(|&v| logical[v]).collect()
    }

    pub fn unembed(&self, physical: &[i8]) -> Unembedded {
        unembed_read(physical, &self.chains)
    }

    pub fn is_aligned(&self, physical: &[i8]) -> bool {
        self.chains
            .iter()
            .all(|c| c.iter().all(|&q| physical[q] == physical[c[0]]))
    }
}

/// Logical values when every vertex model is internally consistent; otherwise the
/// broken logical variables (reads are discarded, never majority-voted).
pub fn unembed_read(physical: &[i8], chains: &[Vec<usize>]) -> Unembedded {
    let mut broken = Vec::new();
    let mut logical = Vec::with_capacity(chains.len());
    for (v, c) in chains.iter().enumerate() {
        let first = physical[c[0]];
        if c.iter().any(|&q| physical[q] != first) {
            broken.push(v);
        }
        logical.push(first);
    }
    if broken.is_empty() {
        Unembedded::Logical(logical)
    } else {
        Unembedded::ChainBreak(broken)
    }
}
