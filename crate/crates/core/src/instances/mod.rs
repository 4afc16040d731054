//! Problem instances, the built-in catalog and exact classical oracles for BD-MST.
//!
//! Vertices are 0-based inside the crate. Everything that faces a user (catalog
//! tables, JSON files, display helpers) is 1-based.

mod catalog;
mod trees;

use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{
    catalog_ensemble, catalog_graph, catalog_instance, catalog_pairings, load_catalog, weight_list, CatalogGraph,
    WEIGHT_LISTS,
};
pub use trees::{
    enumerate_spanning_trees, kruskal_mst, solve_bdmst_exact, validate_tree, BdmstSolution,
    SpanningTree, SpanningTrees, TreeVerdict, MAX_ENUMERATION_VERTICES,
};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("edge weights must be positive")]
    NonPositiveWeight,
    #[error("degree bound must be at least 2, got {0}")]
    DegreeBound(usize),
    #[error("graph has {n} vertices, exact enumeration is limited to {max}")]
    TooLarge { n: usize, max: usize },
    #[error("unknown catalog label {0:?}")]
    UnknownLabel(String),
    #[error("weight list {weights} has {len} entries but graph {graph} needs {m}")]
    WeightListTooShort {
        graph: String,
        weights: String,
        len: usize,
        m: usize,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Simple connected undirected graph. Edges are stored normalised (`u < v`) in the
/// order they were supplied; edge indices refer to that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from 0-based edges.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, InstanceError> {
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        let mut normalised = Vec::new();
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(InstanceError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(InstanceError::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if normalised.contains(&e) {
                return Err(InstanceError::DuplicateEdge(e.0, e.1));
            }
            normalised.push(e);
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = Graph {
            n,
            edges: normalised,
            adjacency,
        };
        if !graph.is_connected() {
            return Err(InstanceError::Disconnected);
        }
        Ok(graph)
    }

    /// Builds a graph from 1-based edges, as written in the catalog tables.
    pub fn from_one_based(n: usize, edges: &[(usize, usize)]) -> Result<Self, InstanceError> {
        let mut zero = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == 0 || b == 0 {
                return Err(InstanceError::VertexOutOfRange { vertex: 0, n });
            }
            zero.push((a - 1, b - 1));
        }
        Graph::new(n, zero)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn one_based_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(a, b)| (a + 1, b + 1)).collect()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let e = (a.min(b), a.max(b));
        self.edges.iter().position(|&x| x == e)
    }

    /// Hop distances from `root`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, root: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[root] = Some(0);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Maximum-degree vertex, ties broken towards the smallest id.
    pub fn max_degree_vertex(&self) -> usize {
        (0..self.n)
            .max_by(|&a, &b| self.degree(a).cmp(&self.degree(b)).then(b.cmp(&a)))
            .unwrap_or(0)
    }
}

/// A weighted graph with a degree bound and a chosen tree root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    pub label: String,
    pub graph: Graph,
    /// Positive integer weight per edge, aligned with `graph.edges()`.
    pub weights: Vec<u64>,
    pub degree_bound: usize,
    /// 0-based root vertex.
    pub root: usize,
}

impl ProblemInstance {
    /// Creates an instance rooted at a maximum-degree vertex.
    pub fn new(
        label: impl Into<String>,
        graph: Graph,
        weights: Vec<u64>,
        degree_bound: usize,
    ) -> Result<Self, InstanceError> {
        if weights.len() != graph.m() {
            return Err(InstanceError::WeightCount {
                expected: graph.m(),
                got: weights.len(),
            });
        }
        if weights.contains(&0) {
            return Err(InstanceError::NonPositiveWeight);
        }
        if degree_bound < 2 {
            return Err(InstanceError::DegreeBound(degree_bound));
        }
        let root = graph.max_degree_vertex();
        Ok(ProblemInstance {
            label: label.into(),
            graph,
            weights,
            degree_bound,
            root,
        })
    }

    /// Overrides the root (0-based).
    pub fn with_root(mut self, root: usize) -> Result<Self, InstanceError> {
        if root >= self.graph.n() {
            return Err(InstanceError::VertexOutOfRange {
                vertex: root,
                n: self.graph.n(),
            });
        }
        self.root = root;
        Ok(self)
    }

    pub fn with_degree_bound(mut self, degree_bound: usize) -> Result<Self, InstanceError> {
        if degree_bound < 2 {
            return Err(InstanceError::DegreeBound(degree_bound));
        }
        self.degree_bound = degree_bound;
        Ok(self)
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<u64> {
        self.graph.edge_index(a, b).map(|i| self.weights[i])
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().copied().max().unwrap_or(0)
    }

    pub fn root_degree(&self) -> usize {
        self.graph.degree(self.root)
    }

    pub fn tree_cost(&self, edges: &[(usize, usize)]) -> Option<u64> {
        edges.iter().map(|&(a, b)| self.weight(a, b)).sum()
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            label: self.label.clone(),
            n: self.graph.n(),
            edges: self
                .graph
                .one_based_edges()
                .into_iter()
                .map(|(a, b)| [a, b])
                .collect(),
            weights: self.weights.clone(),
            delta: self.degree_bound,
            root: self.root + 1,
        }
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self, InstanceError> {
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        let graph = Graph::from_one_based(file.n, &edges)?;
        if file.root == 0 {
            return Err(InstanceError::VertexOutOfRange {
                vertex: 0,
                n: file.n,
            });
        }
        ProblemInstance::new(file.label.clone(), graph, file.weights.clone(), file.delta)?
            .with_root(file.root - 1)
    }

    pub fn load_json(path: &Path) -> Result<Self, InstanceError> {
        let text = std::fs::read_to_string(path)?;
        let file: InstanceFile = serde_json::from_str(&text)?;
        ProblemInstance::from_file(&file)
    }

    pub fn save_json(&self, path: &Path) -> Result<(), InstanceError> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_file())?)?;
        Ok(())
    }
}

/// On-disk instance format (1-based vertices, weights aligned with edges).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub label: String,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub weights: Vec<u64>,
    pub delta: usize,
    pub root: usize,
}
