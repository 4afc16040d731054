use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use super::{AnnealSchedule, QsimError};
use crate::embedding::EmbeddedIsing;
use crate::ising::{spins_from_index, IsingModel};
use crate::rng::substream;

/// Largest physical register the simulator accepts.
pub const MAX_QUBITS: usize = 14;

/// Dimensions up to this size are diagonalised densely.
const DENSE_LIMIT: usize = 512;

/// `H(s) = A(s) (-sum_i X_i) + B(s) H_C` in the computational basis, where basis index
/// `k` has spin `+1` on qubit `i` iff bit `i` of `k` is set. Stored matrix-free.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub num_qubits: usize,
    pub a: f64,
    pub b: f64,
    /// Classical energies of every basis state.
    pub diag: Vec<f64>,
}

/// Classical energy of every basis state of `model`.
pub fn classical_energies(model: &IsingModel) -> Result<Vec<f64>, QsimError> {
    let n = model.num_spins();
    if n > MAX_QUBITS {
        return Err(QsimError::TooLarge { n, max: MAX_QUBITS });
    }
    Ok((0..1u64 << n)
        .map(|k| model.energy(&spins_from_index(k, n)))
        .collect())
}

impl Hamiltonian {
    pub fn from_model(model: &IsingModel, a: f64, b: f64) -> Result<Self, QsimError> {
        Ok(Hamiltonian {
            num_qubits: model.num_spins(),
            a,
            b,
            diag: classical_energies(model)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Same problem part at different schedule weights.
    pub fn at(&self, a: f64, b: f64) -> Hamiltonian {
        Hamiltonian {
            a,
            b,
            ..self.clone()
        }
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (k, yk) in y.iter_mut().enumerate() {
            let mut off = 0.0;
            for i in 0..self.num_qubits {
                off += x[k ^ (1 << i)];
            }
            *yk = self.b * self.diag[k] * x[k] - self.a * off;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d {
            m[(k, k)] = self.b * self.diag[k];
            for i in 0..self.num_qubits {
                m[(k ^ (1 << i), k)] -= self.a;
            }
        }
        m
    }

    pub fn residual(&self, value: f64, vector: &[f64]) -> f64 {
        let mut hv = vec![0.0; vector.len()];
        self.apply(vector, &mut hv);
        hv.iter()
            .zip(vector)
            .map(|(h, v)| (h - value * v).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// The embedded model's Hamiltonian at anneal fraction `s`.
pub fn hamiltonian_at(
    embedded: &EmbeddedIsing,
    schedule: &AnnealSchedule,
    s: f64,
) -> Result<Hamiltonian, QsimError> {
    Hamiltonian::from_model(
        &embedded.ising,
        schedule.curves.a(s),
        schedule.curves.b(s),
    )
}

/// Lowest eigenpairs, energies ascending; `vectors[i]` is normalised.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

pub const EIG_TOL: f64 = 1e-8;

/// `k` smallest eigenpairs. Small operators are diagonalised densely; larger ones with
/// a restarted block Krylov (Rayleigh-Ritz) iteration.
pub fn lowest_eigs(h: &Hamiltonian, k: usize) -> Result<Eigenpairs, QsimError> {
    let d = h.dim();
    let k = k.min(d);
    if d <= DENSE_LIMIT {
        return Ok(dense_eigs(h, k));
    }
    block_krylov(h, k)
}

fn sorted_pairs(eig: SymmetricEigen<f64, nalgebra::Dyn>, k: usize) -> (Vec<f64>, Vec<DVector<f64>>) {
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    order.truncate(k);
    (
        order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect(),
    )
}

fn dense_eigs(h: &Hamiltonian, k: usize) -> Eigenpairs {
    let (values, vecs) = sorted_pairs(SymmetricEigen::new(h.to_dense()), k);
    let vectors: Vec<Vec<f64>> = vecs.into_iter().map(|v| v.as_slice().to_vec()).collect();
    let residuals = values
        .iter()
        .zip(&vectors)
        .map(|(&e, v)| h.residual(e, v))
        .collect();
    Eigenpairs {
        values,
        vectors,
        residuals,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormalises `v` against `basis` (two Gram-Schmidt passes); `None` if dependent.
fn orthonormalise(basis: &[Vec<f64>], mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm0 = dot(&v, &v).sqrt();
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, &v);
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
    }
    let norm = dot(&v, &v).sqrt();
    if norm <= 1e-10 * norm0.max(1e-300) {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

fn block_krylov(h: &Hamiltonian, k: usize) -> Result<Eigenpairs, QsimError> {
    const STEPS: usize = 10;
    const RESTARTS: usize = 200;
    let d = h.dim();
    let block = k + 2;
    let mut rng = substream(0x5eed, 0);
    let mut x: Vec<Vec<f64>> = (0..block)
        .map(|_| (0..d).map(|_| rng.gen::<f64>() - 0.5).collect())
        .collect();
    let mut last = None;
    for _ in 0..RESTARTS {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut frontier = Vec::new();
        for v in x.drain(..) {
            if let Some(q) = orthonormalise(&basis, v) {
                basis.push(q.clone());
                frontier.push(q);
            }
        }
        for _ in 0..STEPS {
            let mut next = Vec::new();
            for v in &frontier {
                let mut w = vec![0.0; d];
                h.apply(v, &mut w);
                if let Some(q) = orthonormalise(&basis, w) {
                    basis.push(q.clone());
                    next.push(q);
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        // Rayleigh-Ritz on the Krylov basis
        let m = basis.len();
        let hq: Vec<Vec<f64>> = basis
            .iter()
            .map(|q| {
                let mut w = vec![0.0; d];
                h.apply(q, &mut w);
                w
            })
            .collect();
        let small = DMatrix::from_fn(m, m, |i, j| dot(&basis[i], &hq[j]));
        let small = (&small + small.transpose()) * 0.5;
        let (values, coeffs) = sorted_pairs(SymmetricEigen::new(small), block.min(m));
        let ritz: Vec<Vec<f64>> = coeffs
            .iter()
            .map(|c| {
                let mut v = vec![0.0; d];
                for (j, q) in basis.iter().enumerate() {
                    v.iter_mut().zip(q).for_each(|(x, y)| *x += c[j] * y);
                }
                v
            })
            .collect();
        let residuals: Vec<f64> = values
            .iter()
            .zip(&ritz)
            .take(k)
            .map(|(&e, v)| h.residual(e, v))
            .collect();
        let done = residuals.iter().all(|&r| r <= EIG_TOL);
        let pairs = Eigenpairs {
            values: values[..k].to_vec(),
            vectors: ritz[..k].to_vec(),
            residuals,
        };
        if done {
            return Ok(pairs);
        }
        x = ritz;
        last = Some(pairs);
    }
    let residual = last
        .map(|p| p.residuals.into_iter().fold(0.0, f64::max))
        .unwrap_or(f64::INFINITY);
    Err(QsimError::NoConvergence { residual })
}
