use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Read, ReadMeta, ReadSet, ReadTag, Sampler, SamplerError};
use crate::ising::IsingModel;
use crate::rng::substream;

/// Linear-in-beta Metropolis schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaSchedule {
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
}

impl Default for SaSchedule {
    fn default() -> Self {
        SaSchedule {
            sweeps: 1000,
            beta_start: 0.1,
            beta_end: 10.0,
        }
    }
}

impl SaSchedule {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.sweeps == 0 {
            return Err(SamplerError::Schedule("need at least one sweep".into()));
        }
        if !(self.beta_start > 0.0 && self.beta_end >= self.beta_start) {
            return Err(SamplerError::Schedule(format!(
                "need 0 < beta_start <= beta_end, got {} and {}",
                self.beta_start, self.beta_end
            )));
        }
        Ok(())
    }

    pub fn beta(&self, sweep: usize) -> f64 {
        if self.sweeps == 1 {
            return self.beta_end;
        }
        let t = sweep as f64 / (self.sweeps - 1) as f64;
        self.beta_start + t * (self.beta_end - self.beta_start)
    }
}

/// Dense neighbour lists used by the sweep loop.
struct Compiled {
    h: Vec<f64>,
    start: Vec<usize>,
    nbr: Vec<usize>,
    cpl: Vec<f64>,
}

impl Compiled {
    fn new(model: &IsingModel) -> Self {
        let adj = model.adjacency();
        let mut start = Vec::with_capacity(adj.len() + 1);
        let mut nbr = Vec::new();
        let mut cpl = Vec::new();
        start.push(0);
        for list in &adj {
            for &(k, c) in list {
                nbr.push(k);
                cpl.push(c);
            }
            start.push(nbr.len());
        }
        Compiled {
            h: model.h.clone(),
            start,
            nbr,
            cpl,
        }
    }

    fn local_fields(&self, spins: &[i8]) -> Vec<f64> {
        (0..self.h.len())
            .map(|i| {
                let mut f = self.h[i];
                for e in self.start[i]..self.start[i + 1] {
                    f += self.cpl[e] * spins[self.nbr[e]] as f64;
                }
                f
            })
            .collect()
    }

    fn flip(&self, spins: &mut [i8], fields: &mut [f64], i: usize) {
        spins[i] = -spins[i];
        let d = 2.0 * spins[i] as f64;
        for e in self.start[i]..self.start[i + 1] {
            fields[self.nbr[e]] += d * self.cpl[e];
        }
    }
}

/// Uphill moves with `beta * dE` above this are rejected without drawing a number;
/// their acceptance probability is below `1e-17`.
const MAX_EXPONENT: f64 = 40.0;

/// Independent single-spin-flip Metropolis anneals; read `r` uses random substream `r`
/// of `seed`, so the result does not depend on how reads are scheduled.
pub fn simulated_annealing(
    model: &IsingModel,
    schedule: &SaSchedule,
    num_reads: usize,
    seed: u64,
) -> Result<ReadSet, SamplerError> {
    schedule.validate()?;
    let n = model.num_spins();
    if n == 0 {
        return Err(SamplerError::EmptyModel);
    }
    let c = Compiled::new(model);
    let betas: Vec<f64> = (0..schedule.sweeps).map(|s| schedule.beta(s)).collect();
    let mut reads = Vec::with_capacity(num_reads);
    let mut spins = vec![0i8; n];
    for r in 0..num_reads {
        let mut rng = substream(seed, r as u64);
        for s in spins.iter_mut() {
            *s = if rng.gen::<bool>() { 1 } else { -1 };
        }
        let mut fields = c.local_fields(&spins);
        for &beta in &betas {
            for i in 0..n {
                // flipping s_i changes the energy by -2 s_i f_i
                let de = -2.0 * spins[i] as f64 * fields[i];
                let accept = de <= 0.0
                    || (beta * de < MAX_EXPONENT && rng.gen::<f64>() < (-beta * de).exp());
                if accept {
                    c.flip(&mut spins, &mut fields, i);
                }
            }
        }
        reads.push(Read {
            energy: model.energy(&spins),
            spins: spins.clone(),
            count: 1,
            tag: ReadTag::Raw,
            gauge: None,
        });
    }
    let meta = ReadMeta {
        sampler: "sa".into(),
        seed,
        num_reads,
        schedule: Some(*schedule),
        ..ReadMeta::default()
    };
    Ok(ReadSet::from_reads(meta, reads))
}

/// [`simulated_annealing`] behind the [`Sampler`] trait.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimulatedAnnealing {
    pub schedule: SaSchedule,
}

impl Sampler for SimulatedAnnealing {
    fn id(&self) -> String {
        format!(
            "sa(sweeps={}, beta={}..{})",
            self.schedule.sweeps, self.schedule.beta_start, self.schedule.beta_end
        )
    }

    fn sample(
        &self,
        model: &IsingModel,
        num_reads: usize,
        seed: u64,
    ) -> Result<ReadSet, SamplerError> {
        simulated_annealing(model, &self.schedule, num_reads, seed)
    }
}
