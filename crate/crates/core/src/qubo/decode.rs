use std::collections::VecDeque;

use super::{Qubo, QuboError, VarKind};
use crate::instances::{validate_tree, ProblemInstance, SpanningTree, TreeVerdict};

/// First constraint a bitstring violates, checked in this order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BrokenReason {
    /// A non-root vertex has no parent bit set.
    NoParent(usize),
    MultipleParents(usize),
    /// A non-root vertex has `count != 1` level bits set.
    Level { vertex: usize, count: usize },
    /// Parent level is not child level minus one.
    LevelMismatch { parent: usize, child: usize },
    DegreeViolation { vertex: usize, degree: usize },
    NotSpanningTree(TreeVerdict),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeStatus {
    ValidTree,
    Broken(BrokenReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedSolution {
    pub status: DecodeStatus,
    pub tree: Option<SpanningTree>,
    /// Exact QUBO value of the bits.
    pub energy: i64,
}

impl DecodedSolution {
    pub fn is_valid(&self) -> bool {
        self.status == DecodeStatus::ValidTree
    }

    /// Tree cost for valid decodes.
    pub fn cost(&self) -> Option<u64> {
        self.tree.as_ref().filter(|_| self.is_valid()).map(|t| t.cost)
    }
}

/// Reads a parent map and level assignment off the bits and checks every constraint.
pub fn decode(
    qubo: &Qubo,
    instance: &ProblemInstance,
    bits: &[u8],
) -> Result<DecodedSolution, QuboError> {
    let energy = qubo.energy(bits)?;
    let n = instance.graph.n();
    let root = instance.root;
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut levels: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, kind) in qubo.registry.vars().iter().enumerate() {
        if bits[i] == 0 {
            continue;
        }
        match *kind {
            VarKind::X { parent, child } => parents[child].push(parent),
            VarKind::Y { vertex, level } => levels[vertex].push(level),
            _ => {}
        }
    }
    let broken = |reason| DecodedSolution {
        status: DecodeStatus::Broken(reason),
        tree: None,
        energy,
    };
    for v in (0..n).filter(|&v| v != root) {
        match parents[v].len() {
            0 => return Ok(broken(BrokenReason::NoParent(v))),
            1 => {}
            _ => return Ok(broken(BrokenReason::MultipleParents(v))),
        }
    }
    for v in (0..n).filter(|&v| v != root) {
        if levels[v].len() != 1 {
            return Ok(broken(BrokenReason::Level {
                vertex: v,
                count: levels[v].len(),
            }));
        }
    }
    let level_of = |v: usize| if v == root { 1 } else { levels[v][0] };
    for v in (0..n).filter(|&v| v != root) {
        let p = parents[v][0];
        if level_of(p) + 1 != level_of(v) {
            return Ok(broken(BrokenReason::LevelMismatch {
                parent: p,
                child: v,
            }));
        }
    }
    let mut edges: Vec<(usize, usize)> = (0..n)
        .filter(|&v| v != root)
        .map(|v| {
            let p = parents[v][0];
            (p.min(v), p.max(v))
        })
        .collect();
    edges.sort_unstable();
    let mut degree = vec![0usize; n];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    if let Some((vertex, &d)) = degree
        .iter()
        .enumerate()
        .find(|(_, &d)| d > instance.degree_bound)
    {
        return Ok(broken(BrokenReason::DegreeViolation {
            vertex,
            degree: d,
        }));
    }
    let verdict = validate_tree(&instance.graph, &edges, instance.degree_bound);
    if !verdict.is_valid() {
        return Ok(broken(BrokenReason::NotSpanningTree(verdict)));
    }
    let cost = instance
        .tree_cost(&edges)
        .expect("validated edges are graph edges");
    Ok(DecodedSolution {
        status: DecodeStatus::ValidTree,
        tree: Some(SpanningTree { edges, cost }),
        energy,
    })
}

/// Encodes a spanning tree (0-based edges) as the zero-penalty assignment of `qubo`.
/// Fails if the tree needs a variable the registry does not have (e.g. a degree above
/// the bound, or a level removed by preprocessing, which cannot happen for real trees).
pub fn encode_tree(
    qubo: &Qubo,
    instance: &ProblemInstance,
    edges: &[(usize, usize)],
) -> Result<Vec<u8>, QuboError> {
    let n = instance.graph.n();
    let root = instance.root;
    let reg = &qubo.registry;
    let missing = |what: String| QuboError::Registry(format!("tree needs missing variable {what}"));
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut parent = vec![usize::MAX; n];
    let mut level = vec![0usize; n];
    level[root] = 1;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if level[w] == 0 {
                level[w] = level[u] + 1;
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    if level.contains(&0) {
        return Err(QuboError::Registry("edge set does not span the graph".into()));
    }
    let mut bits = vec![0u8; reg.len()];
    let mut children = vec![0usize; n];
    for v in (0..n).filter(|&v| v != root) {
        let p = parent[v];
        children[p] += 1;
        let x = reg.x(p, v).ok_or_else(|| missing(format!("X({p},{v})")))?;
        bits[x] = 1;
        let y = reg
            .y(v, level[v])
            .ok_or_else(|| missing(format!("Y({v},{})", level[v])))?;
        bits[y] = 1;
        if let Some(a) = reg.anc(p, v, level[v]) {
            bits[a] = 1;
        }
    }
    for (p, &c) in children.iter().enumerate() {
        for slot in 1..=c {
            let z = reg.z(p, slot).ok_or_else(|| missing(format!("Z({p},{slot})")))?;
            bits[z] = 1;
        }
    }
    Ok(bits)
}
