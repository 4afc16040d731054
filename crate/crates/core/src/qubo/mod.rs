//! Level-based QUBO compilation of BD-MST instances.
//!
//! Variables:
//! * `X(p, v)` — `p` is the parent of `v` (one per edge direction not pointing into the root);
//! * `Y(v, l)` — non-root `v` sits at tree level `l` (root is level 1);
//! * `Z(p, j)` — unary slack for the child count of `p`;
//! * `Anc(p, v, l)` — ancilla standing in for the product `X(p, v) * Y(v, l)`.
//!
//! All coefficients are exact integers. The registry orders variables X, Y, Z, Anc,
//! each block lexicographic in its indices.

mod decode;
mod export;
mod mapper;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use decode::{decode, encode_tree, BrokenReason, DecodeStatus, DecodedSolution};
pub use export::{read_coo, read_registry_json, registry_json, write_coo, RegistryFile};
pub use mapper::{
    build_parts, build_qubo, count_variables, level_preprocess, MapperOptions, QuboParts,
    VarCounts,
};

#[derive(Debug, Error)]
pub enum QuboError {
    #[error("instance {0} has no spanning tree within its degree bound")]
    Infeasible(String),
    #[error("assignment has {got} bits, qubo has {expected} variables")]
    Length { expected: usize, got: usize },
    #[error(transparent)]
    Instance(#[from] crate::instances::InstanceError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed registry: {0}")]
    Registry(String),
}

/// Identity of a QUBO variable. Vertex ids are 0-based, levels and slots 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum VarKind {
    X { parent: usize, child: usize },
    Y { vertex: usize, level: usize },
    Z { vertex: usize, slot: usize },
    Anc { parent: usize, child: usize, level: usize },
}

/// Bidirectional map between variable identities and dense indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    vars: Vec<VarKind>,
    index: HashMap<VarKind, usize>,
}

impl Registry {
    pub fn from_vars(vars: Vec<VarKind>) -> Self {
        let index = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        Registry { vars, index }
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn get(&self, kind: &VarKind) -> Option<usize> {
        self.index.get(kind).copied()
    }

    pub fn kind(&self, index: usize) -> VarKind {
        self.vars[index]
    }

    pub fn vars(&self) -> &[VarKind] {
        &self.vars
    }

    pub fn x(&self, parent: usize, child: usize) -> Option<usize> {
        self.get(&VarKind::X { parent, child })
    }

    pub fn y(&self, vertex: usize, level: usize) -> Option<usize> {
        self.get(&VarKind::Y { vertex, level })
    }

    pub fn z(&self, vertex: usize, slot: usize) -> Option<usize> {
        self.get(&VarKind::Z { vertex, slot })
    }

    pub fn anc(&self, parent: usize, child: usize, level: usize) -> Option<usize> {
        self.get(&VarKind::Anc {
            parent,
            child,
            level,
        })
    }
}

/// Quadratic pseudo-boolean polynomial with integer coefficients.
/// Quadratic keys are `(i, j)` with `i < j`; zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuadPoly {
    pub linear: Vec<i64>,
    pub quadratic: BTreeMap<(usize, usize), i64>,
    pub offset: i64,
}

impl QuadPoly {
    pub fn zeros(num_vars: usize) -> Self {
        QuadPoly {
            linear: vec![0; num_vars],
            quadratic: BTreeMap::new(),
            offset: 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn add_constant(&mut self, c: i64) {
        self.offset += c;
    }

    pub fn add_linear(&mut self, i: usize, c: i64) {
        self.linear[i] += c;
    }

    /// Adds `c * x_i * x_j`; `i == j` folds into the linear term since `x^2 = x`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: i64) {
        if c == 0 {
            return;
        }
        if i == j {
            self.linear[i] += c;
            return;
        }
        let key = (i.min(j), i.max(j));
        let entry = self.quadratic.entry(key).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.quadratic.remove(&key);
        }
    }

    /// Adds `(sum_k c_k x_k + constant)^2`.
    pub fn add_squared(&mut self, terms: &[(usize, i64)], constant: i64) {
        self.offset += constant * constant;
        for (a, &(i, ci)) in terms.iter().enumerate() {
            self.add_linear(i, ci * ci + 2 * ci * constant);
            for &(j, cj) in &terms[a + 1..] {
                self.add_quadratic(i, j, 2 * ci * cj);
            }
        }
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &QuadPoly, scale: i64) {
        self.offset += scale * other.offset;
        for (i, &c) in other.linear.iter().enumerate() {
            self.linear[i] += scale * c;
        }
        for (&(i, j), &c) in &other.quadratic {
            self.add_quadratic(i, j, scale * c);
        }
    }

    pub fn evaluate(&self, bits: &[u8]) -> i64 {
        let mut e = self.offset;
        for (i, &c) in self.linear.iter().enumerate() {
            if bits[i] != 0 {
                e += c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if bits[i] != 0 && bits[j] != 0 {
                e += c;
            }
        }
        e
    }

    /// Neighbour lists `(j, coefficient)` per variable.
    pub fn adjacency(&self) -> Vec<Vec<(usize, i64)>> {
        let mut adj = vec![Vec::new(); self.num_vars()];
        for (&(i, j), &c) in &self.quadratic {
            adj[i].push((j, c));
            adj[j].push((i, c));
        }
        adj
    }
}

/// A compiled BD-MST QUBO: `C = C0 + A (pen1 + pen2 + pen3 + pen4)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qubo {
    pub registry: Registry,
    pub poly: QuadPoly,
    /// `A = w_max + epsilon`.
    pub penalty_weight: i64,
}

impl Qubo {
    pub fn num_vars(&self) -> usize {
        self.registry.len()
    }

    pub fn energy(&self, bits: &[u8]) -> Result<i64, QuboError> {
        if bits.len() != self.num_vars() {
            return Err(QuboError::Length {
                expected: self.num_vars(),
                got: bits.len(),
            });
        }
        Ok(self.poly.evaluate(bits))
    }
}
