use super::QsimError;
use crate::embedding::{embed_ising, ChainMode, EmbeddedIsing, Embedding, HardwareGraph};
use crate::ising::IsingModel;

/// Antiferromagnetic triangle (`J = +1` on all three edges) with fields `h`, where
/// logical variable 0 is the two-qubit chain (0, 1) of a 4-cycle and the others sit on
/// qubits 2 and 3.
pub fn triangle_toy(h: [f64; 3], j_ferro: f64) -> Result<EmbeddedIsing, QsimError> {
    let hw = HardwareGraph::custom(vec![0, 1, 2, 3], vec![(0, 1), (1, 2), (2, 3), (0, 3)])?;
    let mut m = IsingModel::new(3);
    m.h = h.to_vec();
    m.add_coupling(0, 1, 1.0);
    m.add_coupling(0, 2, 1.0);
    m.add_coupling(1, 2, 1.0);
    let emb = Embedding::new(hw.family().clone(), vec![vec![0, 1], vec![2], vec![3]]);
    Ok(embed_ising(&m, &emb, &hw, j_ferro, ChainMode::SpanningTree)?)
}
