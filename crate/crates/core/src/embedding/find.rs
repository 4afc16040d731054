//! Randomised chain-growth embedding heuristic with rip-up-and-reroute rounds.
//!
//! Each logical vertex is placed by running a node-weighted Dijkstra search out of every
//! already placed neighbour chain, picking the root qubit with the smallest combined
//! distance and taking the union of the shortest paths back to the neighbours as its
//! chain. Qubits used by `u` other chains cost `(1 + history) * alpha^u`; the history
//! term grows on qubits that stay overlapped, so persistent conflicts get priced out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Embedding, EmbeddingError, HardwareGraph, LogicalGraph};
use crate::rng::{derive_seed, substream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedOptions {
    /// Independent attempts; the smallest valid embedding wins.
    pub attempts: usize,
    pub seed: u64,
    /// Reroute rounds allowed for removing overlaps.
    pub max_rounds: usize,
    /// Extra reroute rounds spent shrinking an overlap-free embedding.
    pub polish_rounds: usize,
    /// Base of the overlap penalty: a qubit already used by `u` chains costs `alpha^u`.
    pub alpha: f64,
    /// Added to a qubit's history cost after every round in which it is overlapped.
    pub history_step: f64,
    /// Rounds without fewer overlaps before the overlapping neighbourhoods are re-placed.
    pub stall_rounds: usize,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions {
            attempts: 30,
            seed: 0,
            max_rounds: 100,
            polish_rounds: 10,
            alpha: 4.0,
            history_step: 1.0,
            stall_rounds: 5,
        }
    }
}

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Router<'a> {
    adj: &'a [Vec<usize>],
    ladj: Vec<Vec<usize>>,
    chains: Vec<Vec<usize>>,
    usage: Vec<u32>,
    dist: Vec<Vec<f64>>,
    pred: Vec<Vec<usize>>,
    mark: Vec<usize>,
    stamp: usize,
    total: Vec<f64>,
    history: Vec<f64>,
}

impl<'a> Router<'a> {
    fn new(logical: &LogicalGraph, hw: &'a HardwareGraph) -> Self {
        let n = hw.num_nodes();
        Router {
            adj: hw.dense_adjacency(),
            ladj: logical.adjacency(),
            chains: vec![Vec::new(); logical.n],
            usage: vec![0; n],
            dist: Vec::new(),
            pred: Vec::new(),
            mark: vec![0; n],
            stamp: 0,
            total: vec![0.0; n],
            history: vec![0.0; n],
        }
    }

    fn weight(&self, q: usize, alpha: f64) -> f64 {
        (1.0 + self.history[q]) * alpha.powi(self.usage[q] as i32)
    }

    fn rip_up(&mut self, v: usize) {
        for &q in &self.chains[v] {
            self.usage[q] -= 1;
        }
        self.chains[v].clear();
    }

    fn place(&mut self, v: usize, chain: Vec<usize>) {
        for &q in &chain {
            self.usage[q] += 1;
        }
        self.chains[v] = chain;
    }

    fn overlapping(&self) -> bool {
        self.usage.iter().any(|&u| u > 1)
    }

    fn size(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    /// Shortest node-weighted distances from the chain of `u` (excluded) to every qubit.
    fn search(&mut self, slot: usize, u: usize, alpha: f64) {
        let n = self.adj.len();
        if self.dist.len() <= slot {
            self.dist.push(vec![f64::INFINITY; n]);
            self.pred.push(vec![NONE; n]);
        }
        self.stamp += 1;
        let stamp = self.stamp;
        for &q in &self.chains[u] {
            self.mark[q] = stamp;
        }
        let mut dist = std::mem::take(&mut self.dist[slot]);
        let mut pred = std::mem::take(&mut self.pred[slot]);
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        pred.iter_mut().for_each(|p| *p = NONE);
        let mut heap = BinaryHeap::new();
        for &s in &self.chains[u] {
            for &q in &self.adj[s] {
                if self.mark[q] != stamp {
                    let w = self.weight(q, alpha);
                    if w < dist[q] {
                        dist[q] = w;
                        heap.push(Entry(w, q));
                    }
                }
            }
        }
        while let Some(Entry(d, q)) = heap.pop() {
            if d > dist[q] {
                continue;
            }
            for &nb in &self.adj[q] {
                if self.mark[nb] == stamp {
                    continue;
                }
                let nd = d + self.weight(nb, alpha);
                if nd < dist[nb] {
                    dist[nb] = nd;
                    pred[nb] = q;
                    heap.push(Entry(nd, nb));
                }
            }
        }
        self.dist[slot] = dist;
        self.pred[slot] = pred;
    }

    fn route(&mut self, v: usize, alpha: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let placed: Vec<usize> = self.ladj[v]
            .iter()
            .copied()
            .filter(|&u| !self.chains[u].is_empty())
            .collect();
        let n = self.adj.len();
        if placed.is_empty() {
            let min_use = *self.usage.iter().min().unwrap_or(&0);
            let free: Vec<usize> = (0..n).filter(|&q| self.usage[q] == min_use).collect();
            return vec![*free.choose(rng).expect("hardware has qubits")];
        }
        for (slot, &u) in placed.iter().enumerate() {
            self.search(slot, u, alpha);
        }
        let k = placed.len() as f64;
        let mut best = f64::INFINITY;
        for q in 0..n {
            let mut t = 0.0;
            for slot in 0..placed.len() {
                t += self.dist[slot][q];
            }
            t -= (k - 1.0) * self.weight(q, alpha);
            self.total[q] = t;
            if t < best {
                best = t;
            }
        }
        if !best.is_finite() {
            // some neighbour is unreachable; fall back to any free qubit
            let min_use = *self.usage.iter().min().unwrap_or(&0);
            let free: Vec<usize> = (0..n).filter(|&q| self.usage[q] == min_use).collect();
            return vec![*free.choose(rng).expect("hardware has qubits")];
        }
        let tol = best.abs() * 1e-12 + 1e-12;
        let ties: Vec<usize> = (0..n).filter(|&q| self.total[q] <= best + tol).collect();
        let root = *ties.choose(rng).expect("minimum exists");
        let mut chain = vec![root];
        for slot in 0..placed.len() {
            let mut q = self.pred[slot][root];
            while q != NONE {
                chain.push(q);
                q = self.pred[slot][q];
            }
        }
        chain.sort_unstable();
        chain.dedup();
        chain
    }

    /// Drops qubits that are not needed for connectivity or for touching a neighbour.
    fn prune(&mut self) {
        let n = self.adj.len();
        let mut owner = vec![NONE; n];
        for (v, c) in self.chains.iter().enumerate() {
            for &q in c {
                owner[q] = v;
            }
        }
        for v in 0..self.chains.len() {
            let mut changed = true;
            while changed && self.chains[v].len() > 1 {
                changed = false;
                for idx in 0..self.chains[v].len() {
                    let q = self.chains[v][idx];
                    let rest: Vec<usize> =
                        self.chains[v].iter().copied().filter(|&x| x != q).collect();
                    if !self.connected(&rest) {
                        continue;
                    }
                    owner[q] = NONE;
                    let covered = self.ladj[v].iter().all(|&u| {
                        rest.iter()
                            .any(|&x| self.adj[x].iter().any(|&nb| owner[nb] == u))
                    });
                    if covered {
                        self.usage[q] -= 1;
                        self.chains[v] = rest;
                        changed = true;
                        break;
                    }
                    owner[q] = v;
                }
            }
        }
    }

    fn connected(&mut self, chain: &[usize]) -> bool {
        let Some(&start) = chain.first() else {
            return false;
        };
        self.stamp += 1;
        let member = self.stamp;
        for &q in chain {
            self.mark[q] = member;
        }
        self.stamp += 1;
        let seen = self.stamp;
        self.mark[start] = seen;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(q) = stack.pop() {
            for &nb in &self.adj[q] {
                if self.mark[nb] == member {
                    self.mark[nb] = seen;
                    count += 1;
                    stack.push(nb);
                }
            }
        }
        count == chain.len()
    }
}

/// Breadth-first order from a random start, restarting in every component.
fn placement_order(ladj: &[Vec<usize>], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = ladj.len();
    let mut starts: Vec<usize> = (0..n).collect();
    starts.shuffle(rng);
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbs = ladj[v].clone();
            nbs.shuffle(rng);
            for u in nbs {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    order
}

fn attempt(
    logical: &LogicalGraph,
    hw: &HardwareGraph,
    options: &EmbedOptions,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<usize>>> {
    let mut r = Router::new(logical, hw);
    let order = placement_order(&r.ladj, rng);
    let alpha = options.alpha;
    for &v in &order {
        let c = r.route(v, alpha, rng);
        r.place(v, c);
    }
    let mut best_overlaps = usize::MAX;
    let mut stall = 0;
    for _ in 0..options.max_rounds {
        if !r.overlapping() {
            break;
        }
        let mut order = order.clone();
        if rng.gen::<bool>() {
            order.reverse();
        }
        for &v in &order {
            r.rip_up(v);
            let c = r.route(v, alpha, rng);
            r.place(v, c);
        }
        let overlaps = r.usage.iter().filter(|&&u| u > 1).count();
        if overlaps < best_overlaps {
            best_overlaps = overlaps;
            stall = 0;
        } else {
            stall += 1;
        }
        if stall >= options.stall_rounds && overlaps > 0 {
            // stuck: re-place every overlapping chain together with its neighbours
            stall = 0;
            let mut hit = vec![false; r.chains.len()];
            for v in 0..r.chains.len() {
                if r.chains[v].iter().any(|&q| r.usage[q] > 1) {
                    hit[v] = true;
                    for &u in &r.ladj[v] {
                        hit[u] = true;
                    }
                }
            }
            let victims: Vec<usize> = order.iter().copied().filter(|&v| hit[v]).collect();
            for &v in &victims {
                r.rip_up(v);
            }
            for &v in &victims {
                let c = r.route(v, alpha, rng);
                r.place(v, c);
            }
        }
        for q in 0..r.usage.len() {
            if r.usage[q] > 1 {
                r.history[q] += options.history_step;
            }
        }
    }
    if r.overlapping() {
        return None;
    }
    r.prune();
    // shrink: reroute with overlaps priced out, keep a new chain only if it is no larger
    r.history.iter_mut().for_each(|h| *h = 0.0);
    let strict = (hw.num_nodes() as f64).max(4.0);
    for _ in 0..options.polish_rounds {
        let before = r.size();
        for &v in &order {
            let old = r.chains[v].clone();
            r.rip_up(v);
            let c = r.route(v, strict, rng);
            let worse = c.len() > old.len() || c.iter().any(|&q| r.usage[q] > 0);
            r.place(v, if worse { old } else { c });
        }
        r.prune();
        if r.size() >= before {
            break;
        }
    }
    Some(r.chains)
}

/// Runs `options.attempts` independent attempts (seeds derived from `options.seed`) and
/// returns the valid embedding with the fewest physical qubits.
pub fn find_embedding(
    logical: &LogicalGraph,
    hw: &HardwareGraph,
    options: &EmbedOptions,
) -> Result<Embedding, EmbeddingError> {
    let attempts = options.attempts.max(1);
    let mut best: Option<Vec<Vec<usize>>> = None;
    for a in 0..attempts {
        let mut rng = substream(derive_seed(options.seed, a as u64), 0);
        if let Some(chains) = attempt(logical, hw, options, &mut rng) {
            let size: usize = chains.iter().map(Vec::len).sum();
            if best
                .as_ref()
                .is_none_or(|b| size < b.iter().map(Vec::len).sum())
            {
                best = Some(chains);
            }
        }
    }
    let chains = best.ok_or(EmbeddingError::NotFound { attempts })?;
    let chains = chains
        .into_iter()
        .map(|c| c.into_iter().map(|p| hw.id(p)).collect())
        .collect();
    Ok(Embedding::new(hw.family().clone(), chains))
}

#[cfg(test)]
mod tests {
    use super::super::{chimera_graph, embedding_stats, validate_embedding};
    use super::*;

    #[test]
    fn triangle_needs_one_chain_of_two() {
        let hw = chimera_graph(1, 1, 4).unwrap();
        let tri = LogicalGraph::new(3, [(0, 1), (1, 2), (0, 2)]);
        let emb = find_embedding(&tri, &hw, &EmbedOptions::default()).unwrap();
        assert!(validate_embedding(&emb, &tri, &hw).is_valid());
        let mut sizes = embedding_stats(&emb).sizes;
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 2]);
    }

    #[test]
    fn native_bipartite_graph_uses_single_qubits() {
        let hw = chimera_graph(1, 1, 4).unwrap();
        let k33 = LogicalGraph::new(6, (0..3).flat_map(|a| (3..6).map(move |b| (a, b))));
        let emb = find_embedding(&k33, &hw, &EmbedOptions::default()).unwrap();
        assert!(validate_embedding(&emb, &k33, &hw).is_valid());
        assert_eq!(emb.physical_count(), 6);
    }

    #[test]
    fn deterministic_given_seed() {
        let hw = chimera_graph(2, 2, 4).unwrap();
        let k5 = LogicalGraph::new(5, (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))));
        let opts = EmbedOptions {
            attempts: 3,
            seed: 9,
            ..EmbedOptions::default()
        };
        let a = find_embedding(&k5, &hw, &opts).unwrap();
        let b = find_embedding(&k5, &hw, &opts).unwrap();
        assert_eq!(a, b);
        assert!(validate_embedding(&a, &k5, &hw).is_valid());
    }

    #[test]
    fn impossible_embeddings_are_reported() {
        let hw = HardwareGraph::custom(vec![0, 1], vec![(0, 1)]).unwrap();
        let tri = LogicalGraph::new(3, [(0, 1), (1, 2), (0, 2)]);
        let opts = EmbedOptions {
            attempts: 2,
            max_rounds: 5,
            ..EmbedOptions::default()
        };
        assert!(matches!(
            find_embedding(&tri, &hw, &opts),
            Err(EmbeddingError::NotFound { attempts: 2 })
        ));
    }
}
