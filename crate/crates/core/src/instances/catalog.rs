//! The n = 5 graph catalog and the weight lists used to build instances.
//!
//! An instance pairs a graph with a weight list by taking the first `m` weights of
//! the list, in edge order.

use super::{Graph, InstanceError, ProblemInstance};

struct GraphRow {
    label: &'static str,
    graph6: &'static str,
    edges: &'static [(usize, usize)],
}

const GRAPHS: &[GraphRow] = &[
    GraphRow { label: "m4ver1", graph6: "DhC", edges: &[(1, 2), (2, 3), (3, 4), (4, 5)] },
    GraphRow { label: "m5ver1", graph6: "Dhc", edges: &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)] },
    GraphRow { label: "m5ver2", graph6: "DiK", edges: &[(1, 2), (2, 3), (2, 5), (3, 4), (4, 5)] },
    GraphRow { label: "m5ver3", graph6: "DjC", edges: &[(1, 2), (2, 3), (2, 4), (3, 4), (4, 5)] },
    GraphRow { label: "m5ver5", graph6: "DiS", edges: &[(1, 2), (1, 3), (1, 4), (1, 5), (4, 5)] },
    GraphRow { label: "m5ver6", graph6: "DKs", edges: &[(1, 2), (2, 3), (3, 4), (4, 5), (3, 5)] },
    GraphRow { label: "m6ver1", graph6: "DyK", edges: &[(1, 2), (1, 5), (2, 5), (2, 3), (3, 4), (4, 5)] },
    GraphRow { label: "m6ver2", graph6: "DjS", edges: &[(1, 2), (2, 3), (2, 4), (2, 5), (3, 4), (4, 5)] },
    GraphRow { label: "m6ver3", graph6: "DjK", edges: &[(1, 2), (2, 3), (2, 5), (3, 5), (3, 4), (4, 5)] },
    GraphRow { label: "m6ver4", graph6: "D{K", edges: &[(1, 2), (1, 5), (1, 3), (2, 3), (3, 4), (4, 5)] },
    GraphRow { label: "m6ver5", graph6: "D{c", edges: &[(1, 2), (1, 3), (2, 3), (3, 5), (3, 4), (4, 5)] },
    GraphRow { label: "m6ver6", graph6: "D]o", edges: &[(1, 2), (2, 3), (3, 4), (1, 4), (2, 5), (4, 5)] },
    GraphRow { label: "m7ver1", graph6: "D|S", edges: &[(1, 2), (1, 5), (1, 4), (2, 5), (2, 3), (3, 4), (4, 5)] },
    GraphRow { label: "m7ver2", graph6: "DzW", edges: &[(1, 2), (1, 5), (2, 5), (2, 3), (2, 4), (3, 5), (4, 5)] },
    GraphRow { label: "m7ver3", graph6: "D|c", edges: &[(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (3, 4), (4, 5)] },
    GraphRow { label: "m7ver4", graph6: "D~C", edges: &[(1, 2), (1, 3), (1, 4), (2, 4), (2, 3), (3, 4), (4, 5)] },
    GraphRow { label: "m7ver5", graph6: "D]w", edges: &[(1, 2), (2, 3), (3, 4), (1, 4), (4, 5), (2, 5), (3, 5)] },
    GraphRow { label: "m7ver6", graph6: "Dh{", edges: &[(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (3, 4), (4, 5)] },
    GraphRow { label: "m8ver1", graph6: "D}k", edges: &[(1, 2), (1, 5), (1, 3), (1, 4), (2, 5), (2, 3), (3, 4), (4, 5)] },
    GraphRow { label: "m8ver2", graph6: "Dz[", edges: &[(1, 2), (1, 5), (2, 5), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5)] },
    GraphRow {
        label: "m9ver1",
        graph6: "D~k",
        edges: &[(1, 2), (2, 3), (4, 5), (1, 5), (1, 4), (1, 3), (2, 5), (2, 4), (3, 5)],
    },
    GraphRow {
        label: "m10ver1",
        graph6: "D~{",
        edges: &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (1, 4), (1, 3), (2, 5), (2, 4), (3, 5)],
    },
];

/// Weight lists, by label.
pub const WEIGHT_LISTS: &[(&str, &[u64])] = &[
    ("w2", &[1, 2, 1, 2, 1, 2, 1, 2, 1, 2]),
    ("w3", &[1, 1, 2, 1, 1, 2, 1, 1, 2, 1]),
    ("w4", &[1, 1, 2, 2, 1, 1, 2, 2, 1, 1]),
    ("w5", &[1, 4, 1, 4, 1, 4, 1, 4, 1, 4]),
    ("w6", &[1, 3, 6, 1, 3, 6, 1, 3, 6, 1]),
    ("w7", &[1, 7, 1, 7, 1, 7, 1, 7, 1, 7]),
    ("w8", &[3, 2, 1, 3, 2, 1, 3, 2, 1, 3]),
    ("w9", &[4, 3, 2, 1, 4, 3, 2, 1, 4, 3]),
    ("w10", &[5, 4, 3, 2, 1, 5, 4, 3, 2, 1]),
    ("w11", &[6, 5, 4, 3, 2, 1, 6, 5, 4, 3]),
    ("w12", &[7, 6, 5, 4, 3, 2, 1, 7, 6, 5]),
    ("w13", &[1, 1, 3, 4, 2, 1, 2, 3, 4, 2]),
    ("w14", &[3, 2, 1, 1, 1, 1, 2, 4, 2, 2]),
    ("w15", &[2, 1, 2, 1, 4, 1, 1, 3, 3, 2]),
    ("w16", &[4, 3, 3, 4, 3, 3, 4, 3, 4]),
    ("w17", &[3, 4, 7, 5, 5, 5, 5]),
    ("w18", &[2, 1, 4, 1, 2, 1, 2]),
    ("w19", &[4, 6, 4, 7, 4, 7]),
    ("w20", &[1, 1, 2, 3, 2, 3]),
    ("w21", &[4, 5, 4, 5, 5]),
    ("w22", &[2, 2, 6, 2, 4]),
    ("w23", &[3, 3, 5, 2, 3, 2, 5, 2, 5]),
    ("w24", &[4, 3, 2, 2]),
    ("w25", &[2, 2, 6, 2, 4]),
    ("w26", &[4, 3, 3, 3]),
    ("w27", &[3, 4, 7, 5, 5, 5, 5]),
    ("w28", &[4, 6, 4, 7, 4, 7]),
    ("w29", &[6, 4, 2, 2]),
];

/// A catalog graph with its label and graph6 name.
#[derive(Debug, Clone)]
pub struct CatalogGraph {
    pub label: &'static str,
    pub graph6: &'static str,
    pub graph: Graph,
}

/// All 22 catalog graphs, in table order.
pub fn load_catalog() -> Vec<CatalogGraph> {
    GRAPHS
        .iter()
        .map(|row| CatalogGraph {
            label: row.label,
            graph6: row.graph6,
            graph: Graph::from_one_based(5, row.edges).expect("catalog graphs are valid"),
        })
        .collect()
}

pub fn catalog_graph(label: &str) -> Result<Graph, InstanceError> {
    GRAPHS
        .iter()
        .find(|row| row.label == label)
        .map(|row| Graph::from_one_based(5, row.edges).expect("catalog graphs are valid"))
        .ok_or_else(|| InstanceError::UnknownLabel(label.to_string()))
}

pub fn weight_list(label: &str) -> Result<&'static [u64], InstanceError> {
    WEIGHT_LISTS
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, w)| *w)
        .ok_or_else(|| InstanceError::UnknownLabel(label.to_string()))
}

/// Pairs a catalog graph with a weight list (first `m` weights), labelled `graph/weights`.
pub fn catalog_instance(
    graph_label: &str,
    weight_label: &str,
    degree_bound: usize,
) -> Result<ProblemInstance, InstanceError> {
    let graph = catalog_graph(graph_label)?;
    let list = weight_list(weight_label)?;
    if list.len() < graph.m() {
        return Err(InstanceError::WeightListTooShort {
            graph: graph_label.to_string(),
            weights: weight_label.to_string(),
            len: list.len(),
            m: graph.m(),
        });
    }
    let weights = list[..graph.m()].to_vec();
    ProblemInstance::new(
        format!("{graph_label}/{weight_label}"),
        graph,
        weights,
        degree_bound,
    )
}

/// A fixed ensemble of `size` feasible instances at the given degree bound.
///
/// Graphs are visited round-robin in table order. In round `r`, graph `i` takes its
/// compatible weight list at position `(i + 7r) mod count`, so every graph appears
/// before any appears twice and the weight lists vary between graphs. Pairings that
/// are infeasible at `degree_bound` are skipped. Returns fewer instances only when the
/// catalog runs out.
pub fn catalog_ensemble(
    degree_bound: usize,
    size: usize,
) -> Result<Vec<ProblemInstance>, InstanceError> {
    let mut per_graph: Vec<(&'static str, Vec<&'static str>)> = GRAPHS
        .iter()
        .map(|row| {
            let lists = WEIGHT_LISTS
                .iter()
                .filter(|(_, w)| w.len() >= row.edges.len())
                .map(|(l, _)| *l)
                .collect();
            (row.label, lists)
        })
        .collect();
    let mut out = Vec::new();
    let mut round = 0;
    while out.len() < size && per_graph.iter().any(|(_, l)| !l.is_empty()) {
        for (i, (graph, lists)) in per_graph.iter_mut().enumerate() {
            if out.len() == size {
                break;
            }
            while !lists.is_empty() {
                let w = lists.remove((i + 7 * round) % lists.len());
                let inst = catalog_instance(graph, w, degree_bound)?;
                if super::solve_bdmst_exact(&inst)? != super::BdmstSolution::Infeasible {
                    out.push(inst);
                    break;
                }
            }
        }
        round += 1;
    }
    Ok(out)
}

/// Every (graph, weight list) pairing where the list is long enough, in table order.
pub fn catalog_pairings() -> Vec<(&'static str, &'static str)> {
    let mut out = Vec::new();
    for row in GRAPHS {
        for (wl, list) in WEIGHT_LISTS {
            if list.len() >= row.edges.len() {
                out.push((row.label, *wl));
            }
        }
    }
    out
}
