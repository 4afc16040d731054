use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{lowest_eigs, AnnealSchedule, Eigenpairs, Hamiltonian, QsimError};
use crate::embedding::EmbeddedIsing;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxParams {
    /// Bath temperature in the energy units of `H(s)`.
    pub temperature: f64,
    /// Rate prefactor in 1/µs.
    pub gamma0: f64,
    /// Number of instantaneous levels tracked.
    pub k: usize,
    /// Points of the ramp grid over `[0, 1]` (the pause point is added if missing).
    pub grid_points: usize,
    /// Minimum overlap of each tracked level with its predecessor step.
    pub min_overlap: f64,
    /// Population lost out of the tracked levels above which the result is flagged.
    pub max_leakage: f64,
    /// Times a grid step may be halved to satisfy `min_overlap` before refusing.
    pub max_refinements: u32,
}

impl Default for RelaxParams {
    fn default() -> Self {
        RelaxParams {
            temperature: DEFAULT_TEMPERATURE,
            gamma0: 10.0,
            k: 8,
            grid_points: 251,
            min_overlap: 0.99,
            max_leakage: 0.01,
            max_refinements: 12,
        }
    }
}

/// 1.5 times the minimal gap of the embedded triangle toy at `|J_F| = 2` under the
/// linear schedule (minimal gap 0.2874 at s = 0.63).
pub const DEFAULT_TEMPERATURE: f64 = 0.431;

/// Transition rates between instantaneous eigenstates at one `s`.
///
/// `rate(i -> j) = gamma0 * M_ij * min(1, exp(-(E_j - E_i) / T))` with the
/// system-bath matrix element `M_ij = sum_q |<j|Z_q|i>|^2` of single-qubit dephasing.
/// `M` is symmetric, so the Gibbs distribution over the tracked levels is stationary.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRates {
    pub energies: Vec<f64>,
    pub generator: DMatrix<f64>,
}

impl LevelRates {
    pub fn new(eig: &Eigenpairs, num_qubits: usize, temperature: f64, gamma0: f64) -> Self {
        let k = eig.values.len();
        let mut m = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            for j in i + 1..k {
                let mut total = 0.0;
                for q in 0..num_qubits {
                    let el: f64 = eig.vectors[i]
                        .iter()
                        .zip(&eig.vectors[j])
                        .enumerate()
                        .map(|(b, (x, y))| if b >> q & 1 == 1 { x * y } else { -x * y })
                        .sum();
                    total += el * el;
                }
                m[(i, j)] = total;
                m[(j, i)] = total;
            }
        }
        let e = &eig.values;
        let mut g = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    let boltz = (-(e[j] - e[i]) / temperature).exp().min(1.0);
                    g[(j, i)] = gamma0 * m[(i, j)] * boltz;
                }
            }
        }
        for i in 0..k {
            let out: f64 = (0..k).filter(|&j| j != i).map(|j| g[(j, i)]).sum();
            g[(i, i)] = -out;
        }
        LevelRates {
            energies: e.clone(),
            generator: g,
        }
    }

    /// `exp(G t) p` by uniformisation, in chunks short enough to avoid underflow.
    pub fn evolve(&self, p: &[f64], t: f64) -> Vec<f64> {
        let k = p.len();
        let lambda = (0..k)
            .map(|i| -self.generator[(i, i)])
            .fold(0.0, f64::max);
        if lambda <= 0.0 || t <= 0.0 {
            return p.to_vec();
        }
        let uniform = DMatrix::<f64>::identity(k, k) + &self.generator / lambda;
        let chunks = (lambda * t / 30.0).ceil().max(1.0);
        let dt = t / chunks;
        let mut cur = nalgebra::DVector::from_column_slice(p);
        for _ in 0..chunks as usize {
            let x = lambda * dt;
            let mut term = cur.clone();
            let mut weight = (-x).exp();
            let mut acc = &term * weight;
            let mut cum = weight;
            let mut n = 0.0;
            while 1.0 - cum > 1e-16 && n < 10_000.0 {
                n += 1.0;
                term = &uniform * term;
                weight *= x / n;
                cum += weight;
                acc += &term * weight;
            }
            cur = acc;
        }
        cur.iter().map(|&v| v.max(0.0)).collect()
    }

    pub fn gibbs(&self, temperature: f64) -> Vec<f64> {
        gibbs(&self.energies, temperature)
    }
}

pub fn gibbs(energies: &[f64], temperature: f64) -> Vec<f64> {
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies
        .iter()
        .map(|e| (-(e - e0) / temperature).exp())
        .collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// `KL(p || q)`, with `0 ln 0 = 0`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| a * (a / b).ln())
        .sum()
}

/// Rates among the `k` lowest levels of the embedded model at `s`.
pub fn level_rates(
    embedded: &EmbeddedIsing,
    schedule: &AnnealSchedule,
    s: f64,
    params: &RelaxParams,
) -> Result<LevelRates, QsimError> {
    let h = super::hamiltonian_at(embedded, schedule, s)?;
    let eig = lowest_eigs(&h, params.k)?;
    Ok(LevelRates::new(
        &eig,
        h.num_qubits,
        params.temperature,
        params.gamma0,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxResult {
    pub s: Vec<f64>,
    /// Elapsed time (µs) at each recorded point.
    pub t: Vec<f64>,
    /// Populations of the tracked instantaneous levels; the pause adds a second entry
    /// at `s_p` holding the populations after the hold.
    pub populations: Vec<Vec<f64>>,
    pub p_ground: f64,
    /// Largest single-step population loss out of the tracked levels.
    pub max_leakage: f64,
    /// `max_leakage` exceeded the configured bound; `k` is too small.
    pub leakage_exceeded: bool,
}

fn ramp_grid(points: usize, pause: Option<f64>) -> Vec<f64> {
    let n = points.max(2);
    let mut grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    if let Some(sp) = pause {
        if !grid.iter().any(|&s| (s - sp).abs() < 1e-12) {
            let at = grid.partition_point(|&s| s < sp);
            grid.insert(at, sp);
        }
    }
    grid
}

/// Groups contiguous level indices whose energies differ by less than `tol`.
fn clusters(values: &[f64], tol: f64) -> Vec<usize> {
    let mut id = vec![0; values.len()];
    for i in 1..values.len() {
        id[i] = if values[i] - values[i - 1] < tol { id[i - 1] } else { id[i - 1] + 1 };
    }
    id
}

const CLUSTER_TOL: f64 = 1e-6;

/// `O_ij = |<new_i|old_j>|^2`.
fn overlaps(old: &Eigenpairs, new: &Eigenpairs) -> DMatrix<f64> {
    let k = new.vectors.len();
    DMatrix::from_fn(k, k, |i, j| {
        let d: f64 = new.vectors[i]
            .iter()
            .zip(&old.vectors[j])
            .map(|(a, b)| a * b)
            .sum();
        d * d
    })
}

/// First tracked level whose best match among the previous levels (summed over
/// degenerate multiplets) falls below `min`.
fn worst_match(
    old: &Eigenpairs,
    new: &Eigenpairs,
    overlap: &DMatrix<f64>,
    min: f64,
) -> Option<(usize, f64)> {
    let k = new.values.len();
    let new_c = clusters(&new.values, CLUSTER_TOL);
    let old_c = clusters(&old.values, CLUSTER_TOL);
    // multiplets cut by the top of the tracked window cannot be matched
    let top = (new_c[k - 1], old_c[k - 1]);
    (0..k)
        .filter(|&i| new_c[i] != top.0 && old_c[i] != top.1)
        .map(|i| {
            let forming: f64 = (0..k)
                .filter(|&j| new_c[j] == new_c[i])
                .map(|j| overlap[(i, j)])
                .sum();
            let best = (0..=old_c[k - 1])
                .map(|c| (0..k).filter(|&j| old_c[j] == c).map(|j| overlap[(i, j)]).sum())
                .fold(forming, f64::max);
            (i, best)
        })
        .find(|&(_, score)| score < min)
}

/// Thermal relaxation along the schedule: a Pauli master equation over the `k` lowest
/// instantaneous eigenstates, starting in the ground state at `s = 0`. Between grid
/// points the populations are carried over by eigenvector overlaps and then relaxed
/// for the time the ramp spends there; at the pause point they relax for `t_p` more.
/// Coherent (diabatic) transitions are not modelled.
pub fn pause_relax_evolve(
    embedded: &EmbeddedIsing,
    schedule: &AnnealSchedule,
    params: &RelaxParams,
) -> Result<RelaxResult, QsimError> {
    if params.k < 2 {
        return Err(QsimError::Levels(params.k));
    }
    if params.temperature.is_nan()
        || params.temperature <= 0.0
        || params.gamma0.is_nan()
        || params.gamma0 < 0.0
    {
        return Err(QsimError::Schedule(
            "temperature must be positive and gamma0 non-negative".into(),
        ));
    }
    let base = Hamiltonian::from_model(&embedded.ising, 0.0, 1.0)?;
    let k = params.k.min(base.dim());
    let pause = schedule.pause;
    let grid = ramp_grid(params.grid_points, pause.map(|p| p.s_p));
    let eig_at = |s: f64| lowest_eigs(&base.at(schedule.curves.a(s), schedule.curves.b(s)), k);

    let mut prev = eig_at(grid[0])?;
    let mut p = vec![0.0; k];
    p[0] = 1.0;
    let mut out = RelaxResult {
        s: vec![grid[0]],
        t: vec![0.0],
        populations: vec![p.clone()],
        p_ground: 0.0,
        max_leakage: 0.0,
        leakage_exceeded: false,
    };
    let mut t = 0.0;
    for w in grid.windows(2) {
        // bisect the step until every level is matched, at most `max_refinements` times
        let mut pending = vec![(w[1], 0u32)];
        let mut s0 = w[0];
        let mut rates = None;
        while let Some((s1, depth)) = pending.pop() {
            let eig = eig_at(s1)?;
            let overlap = overlaps(&prev, &eig);
            if let Some((level, score)) = worst_match(&prev, &eig, &overlap, params.min_overlap) {
                if depth >= params.max_refinements {
                    return Err(QsimError::Grid(format!(
                        "level {level} overlap {score:.4} between s = {s0} and s = {s1}; refine the grid"
                    )));
                }
                pending.push((s1, depth + 1));
                pending.push((0.5 * (s0 + s1), depth + 1));
                continue;
            }
            let carried = &overlap * nalgebra::DVector::from_column_slice(&p);
            let total: f64 = carried.iter().sum();
            out.max_leakage = out.max_leakage.max(1.0 - total);
            p = carried.iter().map(|x| x / total).collect();
            let r = LevelRates::new(&eig, base.num_qubits, params.temperature, params.gamma0);
            let dt = (s1 - s0) * schedule.t_a;
            p = r.evolve(&p, dt);
            t += dt;
            s0 = s1;
            prev = eig;
            rates = Some(r);
        }
        out.s.push(s0);
        out.t.push(t);
        out.populations.push(p.clone());
        if let (Some(ps), Some(r)) = (pause.filter(|ps| (ps.s_p - s0).abs() < 1e-12), &rates) {
            p = r.evolve(&p, ps.t_p);
            t += ps.t_p;
            out.s.push(s0);
            out.t.push(t);
            out.populations.push(p.clone());
        }
    }
    out.p_ground = p[0];
    out.leakage_exceeded = out.max_leakage > params.max_leakage;
    Ok(out)
}
