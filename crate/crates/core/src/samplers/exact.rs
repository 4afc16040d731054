use super::SamplerError;
use crate::ising::{spins_from_index, IsingModel};

pub const MAX_EXHAUSTIVE_SPINS: usize = 24;

/// Energies closer than this to the minimum count as ground states.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStates {
    pub energy: f64,
    /// Every minimising configuration, in increasing index order.
    pub states: Vec<Vec<i8>>,
}

fn guard(model: &IsingModel) -> Result<usize, SamplerError> {
    let n = model.num_spins();
    if n > MAX_EXHAUSTIVE_SPINS {
        return Err(SamplerError::TooLarge {
            n,
            max: MAX_EXHAUSTIVE_SPINS,
        });
    }
    Ok(n)
}

/// Visits all `2^n` configurations in Gray-code order with O(degree) updates and calls
/// `visit(index, energy)`, where bit `i` of `index` set means spin `i` is `+1`.
fn gray_walk(model: &IsingModel, mut visit: impl FnMut(u64, f64)) {
    let n = model.num_spins();
    let adj = model.adjacency();
    let mut spins = vec![-1i8; n];
    let mut e = model.energy(&spins);
    let mut index = 0u64;
    visit(index, e);
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let mut f = model.h[i];
        for &(k, c) in &adj[i] {
            f += c * spins[k] as f64;
        }
        e -= 2.0 * spins[i] as f64 * f;
        spins[i] = -spins[i];
        index ^= 1 << i;
        visit(index, e);
    }
}

/// Exact minimum and all minimising configurations.
pub fn exhaustive_ground(model: &IsingModel) -> Result<GroundStates, SamplerError> {
    let n = guard(model)?;
    let mut best = f64::INFINITY;
    let mut idx = Vec::new();
    gray_walk(model, |k, e| {
        if e < best - DEGENERACY_TOL {
            best = e;
            idx.clear();
            idx.push(k);
        } else if e <= best + DEGENERACY_TOL {
            best = best.min(e);
            idx.push(k);
        }
    });
    // re-evaluate exactly; the running sum can drift by a few ulps
    let exact: Vec<(u64, f64)> = idx
        .into_iter()
        .map(|k| (k, model.energy(&spins_from_index(k, n))))
        .collect();
    let energy = exact.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let mut keep: Vec<u64> = exact
        .into_iter()
        .filter(|p| p.1 <= energy + DEGENERACY_TOL)
        .map(|p| p.0)
        .collect();
    keep.sort_unstable();
    Ok(GroundStates {
        energy,
        states: keep.into_iter().map(|k| spins_from_index(k, n)).collect(),
    })
}

/// Energy of every configuration, indexed as in [`spins_from_index`].
pub fn all_energies(model: &IsingModel) -> Result<Vec<f64>, SamplerError> {
    let n = guard(model)?;
    let mut out = vec![0.0; 1usize << n];
    gray_walk(model, |k, e| out[k as usize] = e);
    Ok(out)
}
