//! Spanning-tree enumeration and the exact BD-MST oracle.

use super::{Graph, InstanceError, ProblemInstance};

/// Exact enumeration refuses graphs with more vertices than this.
pub const MAX_ENUMERATION_VERTICES: usize = 10;

/// A spanning tree as a sorted list of normalised 0-based edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub edges: Vec<(usize, usize)>,
    pub cost: u64,
}

impl SpanningTree {
    pub fn one_based_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(a, b)| (a + 1, b + 1)).collect()
    }

    pub fn max_degree(&self, n: usize) -> usize {
        degrees(n, &self.edges).into_iter().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BdmstSolution {
    Optimal { cost: u64, tree: SpanningTree },
    Infeasible,
}

impl BdmstSolution {
    pub fn cost(&self) -> Option<u64> {
        match self {
            BdmstSolution::Optimal { cost, .. } => Some(*cost),
            BdmstSolution::Infeasible => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeVerdict {
    Valid,
    /// Edge (0-based) not present in the graph.
    NotSubgraph(usize, usize),
    Cyclic,
    Disconnected,
    DegreeViolation { vertex: usize, degree: usize },
}

impl TreeVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, TreeVerdict::Valid)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    // (child root, old rank of the new root) per successful union, for rollback
    history: Vec<(usize, usize, u8)>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
            history: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.history.push((rb, ra, self.rank[ra]));
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] += 1;
        }
        true
    }

    fn rollback(&mut self) {
        if let Some((child, root, rank)) = self.history.pop() {
            self.parent[child] = child;
            self.rank[root] = rank;
        }
    }
}

fn degrees(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut deg = vec![0; n];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    deg
}

/// Lazily enumerates every spanning tree of a graph exactly once, as sorted lists of
/// edge indices. Include/exclude backtracking over the edge list with a rollback
/// union-find; branches that cannot reach `n - 1` edges are pruned.
pub struct SpanningTrees<'g> {
    graph: &'g Graph,
    uf: UnionFind,
    chosen: Vec<usize>,
    // per depth: 0 = try include, 1 = try exclude, 2 = exhausted
    stage: Vec<u8>,
    done: bool,
}

impl<'g> SpanningTrees<'g> {
    fn new(graph: &'g Graph) -> Self {
        SpanningTrees {
            graph,
            uf: UnionFind::new(graph.n()),
            chosen: Vec::new(),
            stage: vec![0],
            done: false,
        }
    }
}

impl Iterator for SpanningTrees<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let n = self.graph.n();
        let m = self.graph.m();
        if n == 1 {
            if self.done {
                return None;
            }
            self.done = true;
            return Some(Vec::new());
        }
        while !self.done {
            let depth = self.stage.len() - 1;
            let need = n - 1 - self.chosen.len();
            if need == 0 {
                let tree = self.chosen.clone();
                self.backtrack();
                return Some(tree);
            }
            if depth >= m || m - depth < need {
                self.backtrack();
                continue;
            }
            match self.stage[depth] {
                0 => {
                    self.stage[depth] = 1;
                    let (a, b) = self.graph.edges()[depth];
                    if self.uf.union(a, b) {
                        self.chosen.push(depth);
                        self.stage.push(0);
                    }
                }
                1 => {
                    self.stage[depth] = 2;
                    self.stage.push(0);
                }
                _ => self.backtrack(),
            }
        }
        None
    }
}

impl SpanningTrees<'_> {
    // Pops the current depth and undoes the decision made at the parent depth.
    fn backtrack(&mut self) {
        self.stage.pop();
        let Some(&parent_stage) = self.stage.last() else {
            self.done = true;
            return;
        };
        let parent = self.stage.len() - 1;
        if parent_stage == 1 && self.chosen.last() == Some(&parent) {
            self.chosen.pop();
            self.uf.rollback();
        }
    }
}

/// Streams every spanning tree (edge-index lists). Refuses graphs above the size guard.
pub fn enumerate_spanning_trees(graph: &Graph) -> Result<SpanningTrees<'_>, InstanceError> {
    if graph.n() > MAX_ENUMERATION_VERTICES {
        return Err(InstanceError::TooLarge {
            n: graph.n(),
            max: MAX_ENUMERATION_VERTICES,
        });
    }
    Ok(SpanningTrees::new(graph))
}

/// Minimum-cost spanning tree with maximum degree at most the instance's bound.
/// Ties go to the lexicographically smallest sorted edge list.
pub fn solve_bdmst_exact(instance: &ProblemInstance) -> Result<BdmstSolution, InstanceError> {
    let graph = &instance.graph;
    let mut best: Option<SpanningTree> = None;
    let mut deg = vec![0usize; graph.n()];
    for tree in enumerate_spanning_trees(graph)? {
        deg.iter_mut().for_each(|d| *d = 0);
        let mut cost = 0;
        for &e in &tree {
            let (a, b) = graph.edges()[e];
            deg[a] += 1;
            deg[b] += 1;
            cost += instance.weights[e];
        }
        if deg.iter().any(|&d| d > instance.degree_bound) {
            continue;
        }
        if best.as_ref().is_some_and(|b| b.cost < cost) {
            continue;
        }
        let mut edges: Vec<(usize, usize)> = tree.iter().map(|&e| graph.edges()[e]).collect();
        edges.sort_unstable();
        let candidate = SpanningTree { edges, cost };
        if best
            .as_ref()
            .is_none_or(|b| (candidate.cost, &candidate.edges) < (b.cost, &b.edges))
        {
            best = Some(candidate);
        }
    }
    Ok(match best {
        Some(tree) => BdmstSolution::Optimal {
            cost: tree.cost,
            tree,
        },
        None => BdmstSolution::Infeasible,
    })
}

/// Unconstrained minimum spanning tree (Kruskal). Equal weights keep edge order.
pub fn kruskal_mst(graph: &Graph, weights: &[u64]) -> SpanningTree {
    let mut order: Vec<usize> = (0..graph.m()).collect();
    order.sort_by_key(|&e| (weights[e], graph.edges()[e]));
    let mut uf = UnionFind::new(graph.n());
    let mut edges = Vec::with_capacity(graph.n().saturating_sub(1));
    let mut cost = 0;
    for e in order {
        let (a, b) = graph.edges()[e];
        if uf.union(a, b) {
            edges.push((a, b));
            cost += weights[e];
        }
    }
    edges.sort_unstable();
    SpanningTree { edges, cost }
}

/// Checks that `edges` (0-based) form a spanning tree of `graph` with max degree <= `delta`.
pub fn validate_tree(graph: &Graph, edges: &[(usize, usize)], delta: usize) -> TreeVerdict {
    for &(a, b) in edges {
        if !graph.has_edge(a, b) {
            return TreeVerdict::NotSubgraph(a.min(b), a.max(b));
        }
    }
    let mut uf = UnionFind::new(graph.n());
    for &(a, b) in edges {
        if !uf.union(a, b) {
            return TreeVerdict::Cyclic;
        }
    }
    if edges.len() + 1 != graph.n() {
        return TreeVerdict::Disconnected;
    }
    let deg = degrees(graph.n(), edges);
    if let Some((vertex, &degree)) = deg.iter().enumerate().find(|(_, &d)| d > delta) {
        return TreeVerdict::DegreeViolation { vertex, degree };
    }
    TreeVerdict::Valid
}
