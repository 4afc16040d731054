use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{classical_energies, lowest_eigs, AnnealSchedule, Hamiltonian, QsimError};
use crate::embedding::EmbeddedIsing;

/// Weight of a state on basis states where every chain is aligned.
pub fn logical_probability(state: &[f64], chains: &[Vec<usize>]) -> f64 {
    state
        .iter()
        .enumerate()
        .filter(|&(k, _)| {
            chains.iter().all(|c| {
                let first = k >> c[0] & 1;
                c.iter().all(|&q| k >> q & 1 == first)
            })
        })
        .map(|(_, a)| a * a)
        .sum()
}

/// `<H_F>` with `H_F = sum over chain couplings of Z_a Z_b` (aligned pairs count `+1`).
/// For a single two-qubit chain this equals `2 P_L - 1`.
pub fn hf_expectation(state: &[f64], chain_edges: &[(usize, usize)]) -> f64 {
    state
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let zz: f64 = chain_edges
                .iter()
                .map(|&(p, q)| if (k >> p & 1) == (k >> q & 1) { 1.0 } else { -1.0 })
                .sum();
            a * a * zz
        })
        .sum()
}

/// Lowest levels along an `s` grid at one chain strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    pub j_ferro: f64,
    pub s_grid: Vec<f64>,
    /// `energies[i][l]`: level `l` at `s_grid[i]`.
    pub energies: Vec<Vec<f64>>,
    pub gap: Vec<f64>,
    pub p_logical: Vec<Vec<f64>>,
    /// `<H_F>` per level.
    pub hf: Vec<Vec<f64>>,
    /// `B(s)` at each grid point.
    pub b: Vec<f64>,
}

impl SpectrumTrace {
    /// Location and size of the smallest ground-state gap (first grid point on ties).
    pub fn min_gap(&self) -> (f64, f64) {
        let mut best = 0;
        for (i, &g) in self.gap.iter().enumerate() {
            if g < self.gap[best] {
                best = i;
            }
        }
        (self.s_grid[best], self.gap[best])
    }

    /// Columns `s, E0..E{k-1}, gap, PL0, PL1, j_ferro`.
    pub fn write_csv(&self, out: impl Write) -> Result<(), QsimError> {
        let k = self.energies.first().map_or(0, Vec::len);
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["s".to_string()];
        header.extend((0..k).map(|l| format!("E{l}")));
        header.extend(["gap", "PL0", "PL1", "j_ferro"].map(String::from));
        w.write_record(&header)?;
        for i in 0..self.s_grid.len() {
            let mut row = vec![self.s_grid[i].to_string()];
            row.extend(self.energies[i].iter().map(f64::to_string));
            row.push(self.gap[i].to_string());
            for l in 0..2 {
                row.push(self.p_logical[i].get(l).map_or(String::new(), f64::to_string));
            }
            row.push(self.j_ferro.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_grid(s_grid: &[f64]) -> Result<(), QsimError> {
    if s_grid.is_empty() {
        return Err(QsimError::Grid("empty s grid".into()));
    }
    if s_grid.iter().any(|&s| !(s > 0.0 && s < 1.0)) {
        return Err(QsimError::Grid("grid points must lie in (0, 1)".into()));
    }
    if s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QsimError::Grid("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Spectrum of one embedded model along the grid.
pub fn spectrum_trace(
    embedded: &EmbeddedIsing,
    schedule: &AnnealSchedule,
    s_grid: &[f64],
    k: usize,
) -> Result<SpectrumTrace, QsimError> {
    check_grid(s_grid)?;
    let k = k.max(2);
    let base = Hamiltonian::from_model(&embedded.ising, 0.0, 1.0)?;
    let mut trace = SpectrumTrace {
        j_ferro: embedded.j_ferro,
        s_grid: s_grid.to_vec(),
        energies: Vec::with_capacity(s_grid.len()),
        gap: Vec::with_capacity(s_grid.len()),
        p_logical: Vec::with_capacity(s_grid.len()),
        hf: Vec::with_capacity(s_grid.len()),
        b: Vec::with_capacity(s_grid.len()),
    };
    for &s in s_grid {
        let b = schedule.curves.b(s);
        let h = base.at(schedule.curves.a(s), b);
        let eig = lowest_eigs(&h, k)?;
        trace.gap.push((eig.values[1] - eig.values[0]).max(0.0));
        trace.p_logical.push(
            eig.vectors
                .iter()
                .map(|v| logical_probability(v, &embedded.chains))
                .collect(),
        );
        trace.hf.push(
            eig.vectors
                .iter()
                .map(|v| hf_expectation(v, &embedded.chain_edges))
                .collect(),
        );
        trace.energies.push(eig.values);
        trace.b.push(b);
    }
    Ok(trace)
}

/// One trace per chain strength; couplings other than the chains are untouched.
pub fn gap_trace(
    embedded: &EmbeddedIsing,
    j_ferro_list: &[f64],
    schedule: &AnnealSchedule,
    s_grid: &[f64],
    k: usize,
) -> Result<Vec<SpectrumTrace>, QsimError> {
    j_ferro_list
        .iter()
        .map(|&jf| spectrum_trace(&embedded.with_j_ferro(jf)?, schedule, s_grid, k))
        .collect()
}

/// First-order gap after weakening the chains by `lambda`:
/// `gap + B lambda (<H_F>_1 - <H_F>_0)`, i.e. `gap + 2 B lambda (P_L1 - P_L0)` for a
/// single two-qubit chain.
pub fn perturbation_gap_shift(trace: &SpectrumTrace, lambda: f64) -> Vec<f64> {
    (0..trace.s_grid.len())
        .map(|i| trace.gap[i] + trace.b[i] * lambda * (trace.hf[i][1] - trace.hf[i][0]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelShift {
    pub level: usize,
    pub energy: f64,
    pub p_logical: f64,
    /// `B lambda <H_F>`.
    pub predicted: f64,
    /// Eigenvalue at `|J_F| - lambda` minus eigenvalue at `|J_F|`.
    pub exact: f64,
    /// Another level lies within the degeneracy tolerance; first-order
    /// non-degenerate theory does not apply.
    pub near_degenerate: bool,
}

impl LevelShift {
    pub fn error(&self) -> f64 {
        (self.exact - self.predicted).abs()
    }
}

/// Levels closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-6;

/// Predicted and exact shifts of the `k` lowest levels at `s` when `|J_F|` drops by
/// `lambda`.
pub fn energy_shift_check(
    embedded: &EmbeddedIsing,
    schedule: &AnnealSchedule,
    s: f64,
    lambda: f64,
    k: usize,
) -> Result<Vec<LevelShift>, QsimError> {
    let (a, b) = (schedule.curves.a(s), schedule.curves.b(s));
    let weakened = embedded.with_j_ferro(embedded.j_ferro - lambda)?;
    let h0 = Hamiltonian {
        num_qubits: embedded.num_qubits(),
        a,
        b,
        diag: classical_energies(&embedded.ising)?,
    };
    let h1 = Hamiltonian {
        diag: classical_energies(&weakened.ising)?,
        ..h0.clone()
    };
    let e0 = lowest_eigs(&h0, k + 1)?;
    let e1 = lowest_eigs(&h1, k)?;
    Ok((0..k.min(e1.values.len()))
        .map(|l| {
            let v = &e0.vectors[l];
            let near_degenerate = (l > 0 && e0.values[l] - e0.values[l - 1] < DEGENERACY_TOL)
                || e0
                    .values
                    .get(l + 1)
                    .is_some_and(|&u| u - e0.values[l] < DEGENERACY_TOL);
            LevelShift {
                level: l,
                energy: e0.values[l],
                p_logical: logical_probability(v, &embedded.chains),
                predicted: b * lambda * hf_expectation(v, &embedded.chain_edges),
                exact: e1.values[l] - e0.values[l],
                near_degenerate,
            }
        })
        .collect())
}
