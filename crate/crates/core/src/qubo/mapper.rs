use std::collections::BTreeSet;

use super::{QuadPoly, Qubo, QuboError, Registry, VarKind};
use crate::instances::{solve_bdmst_exact, BdmstSolution, ProblemInstance, MAX_ENUMERATION_VERTICES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapperOptions {
    /// Added to `w_max` to form the penalty weight. 0 reproduces the original runs; any
    /// positive value makes correctly encoded optimal trees the unique minimisers.
    pub epsilon: i64,
    /// Drop level variables below a vertex's BFS distance from the root.
    pub preprocess: bool,
    /// Build even if the exact oracle reports no feasible tree.
    pub allow_infeasible: bool,
}

impl Default for MapperOptions {
    fn default() -> Self {
        MapperOptions {
            epsilon: 0,
            preprocess: true,
            allow_infeasible: false,
        }
    }
}

impl MapperOptions {
    pub fn with_epsilon(mut self, epsilon: i64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn without_preprocessing(mut self) -> Self {
        self.preprocess = false;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarCounts {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub anc: usize,
    pub total: usize,
}

/// The objective split into its cost and penalty groups, all over one registry.
#[derive(Debug, Clone)]
pub struct QuboParts {
    pub registry: Registry,
    pub cost: QuadPoly,
    /// Every non-root vertex has exactly one parent.
    pub one_parent: QuadPoly,
    /// Every non-root vertex sits on exactly one level.
    pub one_level: QuadPoly,
    /// Child counts respect the degree bound (unary slack).
    pub degree: QuadPoly,
    /// Parent level is one less than child level (with ancilla reduction).
    pub level_order: QuadPoly,
}

impl QuboParts {
    pub fn penalties(&self) -> [&QuadPoly; 4] {
        [
            &self.one_parent,
            &self.one_level,
            &self.degree,
            &self.level_order,
        ]
    }
}

/// Allowed tree levels per vertex. The root is level 1 and gets an empty set; every
/// other vertex may sit on levels `dist(root, v) + 1 ..= n` (or `2 ..= n` without
/// preprocessing).
pub fn level_preprocess(instance: &ProblemInstance, preprocess: bool) -> Vec<BTreeSet<usize>> {
    let n = instance.graph.n();
    let dist = instance.graph.bfs_distances(instance.root);
    (0..n)
        .map(|v| {
            if v == instance.root {
                BTreeSet::new()
            } else {
                let lo = if preprocess {
                    dist[v].map_or(n + 1, |d| d + 1)
                } else {
                    2
                };
                (lo..=n).collect()
            }
        })
        .collect()
}

fn registry_for(instance: &ProblemInstance, levels: &[BTreeSet<usize>]) -> Registry {
    let g = &instance.graph;
    let root = instance.root;
    let n = g.n();
    let mut xs = Vec::new();
    for p in 0..n {
        for &v in g.neighbors(p) {
            if v != root {
                xs.push(VarKind::X {
                    parent: p,
                    child: v,
                });
            }
        }
    }
    let mut ys = Vec::new();
    for (v, ls) in levels.iter().enumerate() {
        ys.extend(ls.iter().map(|&level| VarKind::Y { vertex: v, level }));
    }
    let mut zs = Vec::new();
    for p in 0..n {
        let slots = if p == root {
            instance.degree_bound
        } else {
            instance.degree_bound - 1
        };
        zs.extend((1..=slots).map(|slot| VarKind::Z { vertex: p, slot }));
    }
    // An ancilla is only needed when the cubic term survives, i.e. when the parent can
    // actually sit one level above; otherwise the term collapses to x * y.
    let mut ancs = Vec::new();
    for &x in &xs {
        let VarKind::X { parent, child } = x else {
            unreachable!()
        };
        if parent == root {
            continue;
        }
        for &level in levels[child].range(3..) {
            if levels[parent].contains(&(level - 1)) {
                ancs.push(VarKind::Anc {
                    parent,
                    child,
                    level,
                });
            }
        }
    }
    xs.sort();
    ys.sort();
    zs.sort();
    ancs.sort();
    Registry::from_vars(xs.into_iter().chain(ys).chain(zs).chain(ancs).collect())
}

pub fn count_variables(instance: &ProblemInstance, options: &MapperOptions) -> VarCounts {
    let levels = level_preprocess(instance, options.preprocess);
    let reg = registry_for(instance, &levels);
    let mut c = VarCounts {
        x: 0,
        y: 0,
        z: 0,
        anc: 0,
        total: reg.len(),
    };
    for v in reg.vars() {
        match v {
            VarKind::X { .. } => c.x += 1,
            VarKind::Y { .. } => c.y += 1,
            VarKind::Z { .. } => c.z += 1,
            VarKind::Anc { .. } => c.anc += 1,
        }
    }
    c
}

/// Builds the cost function and the four penalty groups separately.
pub fn build_parts(instance: &ProblemInstance, options: &MapperOptions) -> QuboParts {
    let g = &instance.graph;
    let n = g.n();
    let root = instance.root;
    let levels = level_preprocess(instance, options.preprocess);
    let reg = registry_for(instance, &levels);
    let nv = reg.len();

    let mut cost = QuadPoly::zeros(nv);
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        for (p, v) in [(a, b), (b, a)] {
            if let Some(i) = reg.x(p, v) {
                cost.add_linear(i, instance.weights[e] as i64);
            }
        }
    }

    let mut one_parent = QuadPoly::zeros(nv);
    let mut one_level = QuadPoly::zeros(nv);
    for v in (0..n).filter(|&v| v != root) {
        let parents: Vec<(usize, i64)> = g
            .neighbors(v)
            .iter()
            .filter_map(|&p| reg.x(p, v).map(|i| (i, 1)))
            .collect();
        one_parent.add_squared(&parents, -1);
        let ys: Vec<(usize, i64)> = levels[v]
            .iter()
            .map(|&l| (reg.y(v, l).expect("registered"), 1))
            .collect();
        one_level.add_squared(&ys, -1);
    }

    let mut degree = QuadPoly::zeros(nv);
    for p in 0..n {
        let slots = if p == root {
            instance.degree_bound
        } else {
            instance.degree_bound - 1
        };
        let mut terms: Vec<(usize, i64)> = g
            .neighbors(p)
            .iter()
            .filter_map(|&v| reg.x(p, v).map(|i| (i, 1)))
            .collect();
        terms.extend((1..=slots).map(|j| (reg.z(p, j).expect("registered"), -1)));
        degree.add_squared(&terms, 0);
    }

    let mut level_order = QuadPoly::zeros(nv);
    for v in (0..n).filter(|&v| v != root) {
        // Level 2 holds exactly the root's children: x_{r,v} (1 - y_{v,2}) + y_{v,2} (1 - x_{r,v}).
        // A missing x_{r,v} (v not adjacent to the root) is the constant 0.
        let y2 = reg.y(v, 2);
        match (reg.x(root, v), y2) {
            (Some(x), Some(y)) => {
                level_order.add_linear(x, 1);
                level_order.add_linear(y, 1);
                level_order.add_quadratic(x, y, -2);
            }
            (Some(x), None) => level_order.add_linear(x, 1),
            (None, Some(y)) => level_order.add_linear(y, 1),
            (None, None) => {}
        }
        for &p in g.neighbors(v) {
            if p == root {
                continue;
            }
            let x = reg.x(p, v).expect("non-root parent");
            for &l in levels[v].range(3..) {
                let y = reg.y(v, l).expect("registered");
                match reg.y(p, l - 1) {
                    // x y (1 - y') with a = x y enforced by 3a + xy - 2ax - 2ay
                    Some(yp) => {
                        let a = reg.anc(p, v, l).expect("registered");
                        level_order.add_linear(a, 4);
                        level_order.add_quadratic(a, yp, -1);
                        level_order.add_quadratic(x, y, 1);
                        level_order.add_quadratic(a, x, -2);
                        level_order.add_quadratic(a, y, -2);
                    }
                    None => level_order.add_quadratic(x, y, 1),
                }
            }
        }
    }

    QuboParts {
        registry: reg,
        cost,
        one_parent,
        one_level,
        degree,
        level_order,
    }
}

/// Compiles an instance into `C = C0 + A (pen1 + pen2 + pen3 + pen4)`, `A = w_max + epsilon`.
pub fn build_qubo(instance: &ProblemInstance, options: &MapperOptions) -> Result<Qubo, QuboError> {
    if !options.allow_infeasible
        && instance.graph.n() <= MAX_ENUMERATION_VERTICES
        && solve_bdmst_exact(instance)? == BdmstSolution::Infeasible
    {
        return Err(QuboError::Infeasible(instance.label.clone()));
    }
    let parts = build_parts(instance, options);
    let penalty_weight = instance.max_weight() as i64 + options.epsilon;
    let mut poly = parts.cost.clone();
    for pen in parts.penalties() {
        poly.add_scaled(pen, penalty_weight);
    }
    Ok(Qubo {
        registry: parts.registry,
        poly,
        penalty_weight,
    })
}
