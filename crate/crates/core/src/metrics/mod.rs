//! Success probability, time-to-solution and ensemble statistics.

mod bootstrap;
mod extreal;

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bootstrap::{
    bootstrap_percentiles, difference_of_medians, median, median_of_differences, percentile,
    EnsembleSummary,
};
pub use extreal::{ExtReal, ParseExtRealError};

use crate::instances::ProblemInstance;
use crate::ising::bits_from_spins;
use crate::qubo::{decode, Qubo, QuboError};
use crate::samplers::{ReadSet, ReadTag};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("total time must be positive, got {0}")]
    Time(f64),
    #[error("bootstrap needs at least one value")]
    Empty,
    #[error("percentile {0} is outside [0, 100]")]
    Percentile(f64),
    #[error("ensembles differ in size: {0} vs {1}")]
    Mismatch(usize, usize),
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Reads that decode to a valid tree with the oracle cost.
pub fn optimal_reads(
    reads: &ReadSet,
    qubo: &Qubo,
    instance: &ProblemInstance,
    oracle_cost: u64,
) -> Result<usize, MetricsError> {
    let mut hits = 0;
    for r in &reads.reads {
        if matches!(r.tag, ReadTag::ChainBreak(_)) {
            continue;
        }
        let d = decode(qubo, instance, &bits_from_spins(&r.spins))?;
        if d.cost() == Some(oracle_cost) {
            hits += r.count;
        }
    }
    Ok(hits)
}

/// Fraction of all reads (chain-broken ones included) that are valid optimal trees.
pub fn p_success(
    reads: &ReadSet,
    qubo: &Qubo,
    instance: &ProblemInstance,
    oracle_cost: u64,
) -> Result<f64, MetricsError> {
    let total = reads.total_reads();
    if total == 0 {
        return Ok(0.0);
    }
    Ok(optimal_reads(reads, qubo, instance, oracle_cost)? as f64 / total as f64)
}

/// Expected time to reach the optimum with 99% confidence:
/// `ln(1 - 0.99) / ln(1 - p) * t_tot`. `p = 0` gives `+inf`; `p = 1` gives `t_tot`
/// (one run suffices).
pub fn tts(p_success: f64, t_tot: f64) -> Result<ExtReal, MetricsError> {
    if !(0.0..=1.0).contains(&p_success) {
        return Err(MetricsError::Probability(p_success));
    }
    if !(t_tot > 0.0 && t_tot.is_finite()) {
        return Err(MetricsError::Time(t_tot));
    }
    Ok(if p_success == 0.0 {
        ExtReal::PosInf
    } else if p_success == 1.0 {
        ExtReal::Finite(t_tot)
    } else {
        ExtReal::Finite(0.01f64.ln() / (-p_success).ln_1p() * t_tot)
    })
}

/// Instance-wise improvement of a pause over the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaTts {
    /// `TTS(no pause) - TTS(pause)`.
    pub delta: ExtReal,
    /// `delta / TTS(no pause)`.
    pub ratio: ExtReal,
}

/// Infinity rules: both infinite gives 0 (ratio 0); only the baseline infinite gives
/// `+inf` with ratio 1; only the pause infinite gives `-inf` for both.
pub fn delta_tts(no_pause: ExtReal, pause: ExtReal) -> DeltaTts {
    use ExtReal::*;
    match (no_pause, pause) {
        (PosInf, PosInf) => DeltaTts {
            delta: Finite(0.0),
            ratio: Finite(0.0),
        },
        (PosInf, _) => DeltaTts {
            delta: PosInf,
            ratio: Finite(1.0),
        },
        (_, PosInf) => DeltaTts {
            delta: NegInf,
            ratio: NegInf,
        },
        (a, b) => {
            let (a, b) = (a.to_f64(), b.to_f64());
            DeltaTts {
                delta: ExtReal::from(a - b),
                ratio: ExtReal::from((a - b) / a),
            }
        }
    }
}

/// One instance under one schedule and chain strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub instance: String,
    pub t_a: f64,
    pub s_p: Option<f64>,
    pub t_p: f64,
    pub jf: f64,
    pub gauges: usize,
    pub reads: usize,
    pub p_success: f64,
    pub tts: ExtReal,
}

impl RunResult {
    pub fn new(
        instance: impl Into<String>,
        t_a: f64,
        pause: Option<(f64, f64)>,
        jf: f64,
        gauges: usize,
        reads: usize,
        p_success: f64,
    ) -> Result<RunResult, MetricsError> {
        let (s_p, t_p) = match pause {
            Some((s, t)) => (Some(s), t),
            None => (None, 0.0),
        };
        Ok(RunResult {
            instance: instance.into(),
            t_a,
            s_p,
            t_p,
            jf,
            gauges,
            reads,
            p_success,
            tts: tts(p_success, t_a + t_p)?,
        })
    }

    pub fn t_tot(&self) -> f64 {
        self.t_a + self.t_p
    }
}

/// Columns `instance, t_a, s_p, t_p, jf, gauges, reads, p_success, tts`.
pub fn write_results_csv(results: &[RunResult], out: impl Write) -> Result<(), MetricsError> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Lines starting with `#` are skipped.
pub fn read_results_csv(input: impl std::io::Read) -> Result<Vec<RunResult>, MetricsError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let rows = rdr.deserialize().collect::<Result<Vec<RunResult>, _>>()?;
    Ok(rows)
}

/// Columns `metric, median, p35, p65, B, seed`.
pub fn write_summary_csv(rows: &[EnsembleSummary], out: impl Write) -> Result<(), MetricsError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
