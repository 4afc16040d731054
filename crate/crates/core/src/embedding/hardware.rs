use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::EmbeddingError;

/// How a hardware graph was generated. Custom graphs carry their full edge list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum HardwareFamily {
    Chimera { m: usize, n: usize, l: usize },
    Pegasus { p: usize },
    Custom { nodes: Vec<usize>, edges: Vec<(usize, usize)> },
}

impl HardwareFamily {
    pub fn build(&self) -> Result<HardwareGraph, EmbeddingError> {
        match self {
            HardwareFamily::Chimera { m, n, l } => chimera_graph(*m, *n, *l),
            HardwareFamily::Pegasus { p } => pegasus_graph(*p),
            HardwareFamily::Custom { nodes, edges } => {
                HardwareGraph::custom(nodes.clone(), edges.clone())
            }
        }
    }
}

/// Physical qubits and couplers. Qubit ids are arbitrary integers; internally each id
/// also has a dense position used by the embedding heuristic.
#[derive(Debug, Clone)]
pub struct HardwareGraph {
    family: HardwareFamily,
    nodes: Vec<usize>,
    position: HashMap<usize, usize>,
    adjacency: Vec<Vec<usize>>,
    num_edges: usize,
}

impl HardwareGraph {
    fn from_parts(
        family: HardwareFamily,
        mut nodes: Vec<usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, EmbeddingError> {
        nodes.sort_unstable();
        nodes.dedup();
        let position: HashMap<usize, usize> =
            nodes.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (a, b) in edges {
            let (Some(&pa), Some(&pb)) = (position.get(&a), position.get(&b)) else {
                return Err(EmbeddingError::UnknownQubit(if position.contains_key(&a) {
                    b
                } else {
                    a
                }));
            };
            if pa == pb {
                return Err(EmbeddingError::Hardware(format!("self-loop on qubit {a}")));
            }
            adjacency[pa].push(pb);
            adjacency[pb].push(pa);
        }
        let mut num_edges = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            num_edges += list.len();
        }
        Ok(HardwareGraph {
            family,
            nodes,
            position,
            adjacency,
            num_edges: num_edges / 2,
        })
    }

    pub fn custom(nodes: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self, EmbeddingError> {
        let family = HardwareFamily::Custom {
            nodes: nodes.clone(),
            edges: edges.clone(),
        };
        HardwareGraph::from_parts(family, nodes, edges)
    }

    pub fn family(&self) -> &HardwareFamily {
        &self.family
    }

    /// Sorted qubit ids.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn contains(&self, q: usize) -> bool {
        self.position.contains_key(&q)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        match (self.position.get(&a), self.position.get(&b)) {
            (Some(&pa), Some(&pb)) => self.adjacency[pa].binary_search(&pb).is_ok(),
            _ => false,
        }
    }

    /// Neighbouring qubit ids, ascending.
    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        self.position
            .get(&q)
            .map(|&p| self.adjacency[p].iter().map(|&i| self.nodes[i]).collect())
            .unwrap_or_default()
    }

    pub fn degree(&self, q: usize) -> usize {
        self.position
            .get(&q)
            .map_or(0, |&p| self.adjacency[p].len())
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// All couplers as `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges);
        for (i, list) in self.adjacency.iter().enumerate() {
            for &j in list {
                if i < j {
                    out.push((self.nodes[i], self.nodes[j]));
                }
            }
        }
        out
    }

    pub(crate) fn id(&self, pos: usize) -> usize {
        self.nodes[pos]
    }

    pub(crate) fn dense_adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }
}

/// Chimera `C(M, N, L)`: an `M x N` grid of `K_{L,L}` cells.
/// Qubit `((row * N + col) * 2 + side) * L + k`; side 0 qubits couple to the same
/// position in the cells above and below, side 1 qubits to the cells left and right.
pub fn chimera_graph(m: usize, n: usize, l: usize) -> Result<HardwareGraph, EmbeddingError> {
    if m == 0 || n == 0 || l == 0 {
        return Err(EmbeddingError::Hardware(
            "chimera dimensions must be positive".into(),
        ));
    }
    let id = |row: usize, col: usize, side: usize, k: usize| ((row * n + col) * 2 + side) * l + k;
    let mut edges = Vec::new();
    for row in 0..m {
        for col in 0..n {
            for a in 0..l {
                for b in 0..l {
                    edges.push((id(row, col, 0, a), id(row, col, 1, b)));
                }
            }
            for k in 0..l {
                if row + 1 < m {
                    edges.push((id(row, col, 0, k), id(row + 1, col, 0, k)));
                }
                if col + 1 < n {
                    edges.push((id(row, col, 1, k), id(row, col + 1, 1, k)));
                }
            }
        }
    }
    HardwareGraph::from_parts(
        HardwareFamily::Chimera { m, n, l },
        (0..2 * m * n * l).collect(),
        edges,
    )
}

const PEGASUS_VERTICAL_OFFSETS: [usize; 12] = [2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6];
const PEGASUS_HORIZONTAL_OFFSETS: [usize; 12] = [6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10];

/// Pegasus `P(p)` in the standard coordinate construction with the default shift
/// offsets, restricted to the main fabric (qubits that can take part in a full set of
/// internal couplers). Qubit `(u, w, k, z)` has id `((u * p + w) * 12 + k) * (p - 1) + z`.
#[allow(clippy::needless_range_loop)]
pub fn pegasus_graph(p: usize) -> Result<HardwareGraph, EmbeddingError> {
    if p < 2 {
        return Err(EmbeddingError::Hardware("pegasus needs p >= 2".into()));
    }
    let m1 = p - 1;
    let id = |u: usize, w: usize, k: usize, z: usize| ((u * p + w) * 12 + k) * m1 + z;
    let off0 = PEGASUS_VERTICAL_OFFSETS;
    let off1 = PEGASUS_HORIZONTAL_OFFSETS;
    let mut edges = Vec::new();
    for u in 0..2 {
        for w in 0..p {
            for k in 0..12 {
                // external couplers between consecutive qubits of a line
                for z in 0..m1.saturating_sub(1) {
                    edges.push((id(u, w, k, z), id(u, w, k, z + 1)));
                }
                // odd couplers pairing neighbouring tracks
                if k % 2 == 0 {
                    for z in 0..m1 {
                        edges.push((id(u, w, k, z), id(u, w, k + 1, z)));
                    }
                }
            }
        }
    }
    for w in 0..p {
        for kk in 0..12 {
            let lo = if w > 0 { 0 } else { off1[kk] };
            let hi = if w < m1 { 12 } else { off1[kk] };
            for k in lo..hi {
                for z in 0..m1 {
                    let zz = z + usize::from(kk < off0[k]);
                    let ww = w - usize::from(k < off1[kk]);
                    edges.push((id(0, w, k, z), id(1, zz, kk, ww)));
                }
            }
        }
    }
    let fabric = |w: usize, k: usize| !((w == 0 && k < 2) || (w == m1 && k >= 10));
    let mut nodes = Vec::new();
    for u in 0..2 {
        for w in 0..p {
            for k in 0..12 {
                if fabric(w, k) {
                    nodes.extend((0..m1).map(|z| id(u, w, k, z)));
                }
            }
        }
    }
    let keep: std::collections::HashSet<usize> = nodes.iter().copied().collect();
    edges.retain(|(a, b)| keep.contains(a) && keep.contains(b));
    HardwareGraph::from_parts(HardwareFamily::Pegasus { p }, nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chimera_counts() {
        let c = chimera_graph(1, 1, 4).unwrap();
        assert_eq!((c.num_nodes(), c.num_edges()), (8, 16));
        let c = chimera_graph(2, 1, 4).unwrap();
        assert_eq!((c.num_nodes(), c.num_edges()), (16, 36));
        let c = chimera_graph(16, 16, 4).unwrap();
        assert_eq!(c.num_nodes(), 2048);
        assert_eq!(c.max_degree(), 6);
        assert_eq!(c.num_edges(), 256 * 16 + 2 * 15 * 16 * 4);
    }

    #[test]
    fn chimera_cells_are_complete_bipartite() {
        let c = chimera_graph(2, 2, 4).unwrap();
        for a in 0..4 {
            for b in 4..8 {
                assert!(c.has_edge(a, b));
            }
            for b in 0..4 {
                assert!(!c.has_edge(a, b));
            }
        }
    }

    #[test]
    fn pegasus_counts() {
        for (p, nodes) in [(2, 40), (6, 680), (16, 5640)] {
            let g = pegasus_graph(p).unwrap();
            assert_eq!(g.num_nodes(), nodes, "P{p}");
            assert_eq!(g.num_nodes(), 8 * (p - 1) * (3 * p - 1));
        }
        let g = pegasus_graph(16).unwrap();
        assert_eq!(g.num_edges(), 40484);
        assert_eq!(g.max_degree(), 15);
        assert_eq!(pegasus_graph(6).unwrap().max_degree(), 15);
    }
}
