//! Hardware graphs, minor embeddings and the embedded Ising model with
//! ferromagnetic chains.

mod embedded;
mod find;
mod hardware;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use embedded::{embed_ising, unembed_read, ChainMode, EmbeddedIsing, Unembedded};
pub use find::{find_embedding, EmbedOptions};
pub use hardware::{chimera_graph, pegasus_graph, HardwareFamily, HardwareGraph};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("invalid hardware graph: {0}")]
    Hardware(String),
    #[error("qubit {0} is not part of the hardware graph")]
    UnknownQubit(usize),
    #[error("no valid embedding found in {attempts} attempts")]
    NotFound { attempts: usize },
    #[error("invalid embedding: {0:?}")]
    Invalid(EmbeddingVerdict),
    #[error("chain strength must be positive, got {0}")]
    ChainStrength(f64),
    #[error("logical coupling {value} on ({i}, {j}) is outside [-1, 1]; scale the model first")]
    CouplingRange { i: usize, j: usize, value: f64 },
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Logical interaction graph: vertex count plus undirected edges. Unlike
/// [`crate::instances::Graph`] it need not be connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl LogicalGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let set: BTreeSet<(usize, usize)> = edges
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        LogicalGraph {
            n,
            edges: set.into_iter().collect(),
        }
    }

    pub fn from_ising(model: &crate::ising::IsingModel) -> Self {
        LogicalGraph::new(model.num_spins(), model.j.keys().copied())
    }

    pub fn from_graph(graph: &crate::instances::Graph) -> Self {
        LogicalGraph::new(graph.n(), graph.edges().iter().copied())
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Vertex models: the sorted set of physical qubits standing for each logical variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub hardware: HardwareFamily,
    pub chains: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingFile {
    hardware: HardwareFamily,
    chains: BTreeMap<usize, Vec<usize>>,
}

impl Embedding {
    pub fn new(hardware: HardwareFamily, chains: Vec<Vec<usize>>) -> Self {
        let chains = chains
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        Embedding { hardware, chains }
    }

    pub fn num_logical(&self) -> usize {
        self.chains.len()
    }

    pub fn physical_count(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    pub fn to_json(&self) -> Result<String, EmbeddingError> {
        let file = EmbeddingFile {
            hardware: self.hardware.clone(),
            chains: self.chains.iter().cloned().enumerate().collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    /// Reads an embedding, including ones produced by other tools, as long as the
    /// logical indices are `0..n` without gaps.
    pub fn from_json(text: &str) -> Result<Self, EmbeddingError> {
        let file: EmbeddingFile = serde_json::from_str(text)?;
        let n = file.chains.len();
        if file.chains.keys().copied().ne(0..n) {
            return Err(EmbeddingError::Hardware(
                "chain keys must be the logical indices 0..n".into(),
            ));
        }
        Ok(Embedding::new(file.hardware, file.chains.into_values().collect()))
    }
}

/// Outcome of [`validate_embedding`]; the first failing check wins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingVerdict {
    Valid,
    WrongSize { expected: usize, got: usize },
    EmptyChain(usize),
    UnknownQubit { logical: usize, qubit: usize },
    Overlap { qubit: usize, first: usize, second: usize },
    Disconnected(usize),
    MissingEdge(usize, usize),
}

impl EmbeddingVerdict {
    pub fn is_valid(&self) -> bool {
        *self == EmbeddingVerdict::Valid
    }
}

/// Breadth-first check that `chain` induces a connected subgraph.
pub(crate) fn chain_connected(chain: &[usize], hw: &HardwareGraph) -> bool {
    let Some(&start) = chain.first() else {
        return false;
    };
    let members: BTreeSet<usize> = chain.iter().copied().collect();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(q) = queue.pop_front() {
        for nb in hw.neighbors(q) {
            if members.contains(&nb) && seen.insert(nb) {
                queue.push_back(nb);
            }
        }
    }
    seen.len() == members.len()
}

pub fn validate_embedding(
    embedding: &Embedding,
    logical: &LogicalGraph,
    hw: &HardwareGraph,
) -> EmbeddingVerdict {
    if embedding.chains.len() != logical.n {
        return EmbeddingVerdict::WrongSize {
            expected: logical.n,
            got: embedding.chains.len(),
        };
    }
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (v, chain) in embedding.chains.iter().enumerate() {
        if chain.is_empty() {
            return EmbeddingVerdict::EmptyChain(v);
        }
        for &q in chain {
            if !hw.contains(q) {
                return EmbeddingVerdict::UnknownQubit {
                    logical: v,
                    qubit: q,
                };
            }
            if let Some(&first) = owner.get(&q) {
                if first != v {
                    return EmbeddingVerdict::Overlap {
                        qubit: q,
                        first,
                        second: v,
                    };
                }
            }
            owner.insert(q, v);
        }
    }
    for (v, chain) in embedding.chains.iter().enumerate() {
        if !chain_connected(chain, hw) {
            return EmbeddingVerdict::Disconnected(v);
        }
    }
    for &(a, b) in &logical.edges {
        let covered = embedding.chains[a]
            .iter()
            .any(|&q| hw.neighbors(q).iter().any(|nb| owner.get(nb) == Some(&b)));
        if !covered {
            return EmbeddingVerdict::MissingEdge(a, b);
        }
    }
    EmbeddingVerdict::Valid
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingStats {
    pub physical_count: usize,
    pub num_logical: usize,
    /// Vertex model sizes in logical order.
    pub sizes: Vec<usize>,
    pub median_size: f64,
    pub max_size: usize,
}

pub fn embedding_stats(embedding: &Embedding) -> EmbeddingStats {
    let sizes: Vec<usize> = embedding.chains.iter().map(Vec::len).collect();
    let mut sorted = sizes.clone();
    sorted.sort_unstable();
    let median_size = match sorted.len() {
        0 => 0.0,
        k if k % 2 == 1 => sorted[k / 2] as f64,
        k => (sorted[k / 2 - 1] + sorted[k / 2]) as f64 / 2.0,
    };
    EmbeddingStats {
        physical_count: sizes.iter().sum(),
        num_logical: sizes.len(),
        max_size: sorted.last().copied().unwrap_or(0),
        median_size,
        sizes,
    }
}
