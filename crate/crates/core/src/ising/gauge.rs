use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{IsingError, IsingModel};
use crate::embedding::EmbeddedIsing;
use crate::rng::substream;

/// A `±1` sign per spin. Random gauges keep the seed that produced them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gauge {
    pub a: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Gauge {
    pub fn identity(n: usize) -> Self {
        Gauge {
            a: vec![1; n],
            seed: None,
        }
    }

    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = substream(seed, 0);
        Gauge {
            a: (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect(),
            seed: Some(seed),
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.a.iter().all(|&s| s == 1)
    }

    /// Pulls a logical gauge back onto physical qubits via their owning logical spin.
    pub fn expand(&self, owner: &[usize]) -> Gauge {
        Gauge {
            a: owner.iter().map(|&l| self.a[l]).collect(),
            seed: self.seed,
        }
    }

    pub fn to_json(&self) -> Result<String, IsingError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, IsingError> {
        let g: Gauge = serde_json::from_str(text)?;
        if g.a.iter().any(|&s| s != 1 && s != -1) {
            return Err(IsingError::SpinValue);
        }
        Ok(g)
    }
}

/// `h_i -> a_i h_i`, `J_ij -> a_i a_j J_ij`.
pub fn gauge_transform(model: &IsingModel, gauge: &Gauge) -> Result<IsingModel, IsingError> {
    if gauge.len() != model.num_spins() {
        return Err(IsingError::GaugeSize {
            expected: model.num_spins(),
            got: gauge.len(),
        });
    }
    let a = &gauge.a;
    Ok(IsingModel {
        h: model
            .h
            .iter()
            .zip(a)
            .map(|(&h, &s)| h * s as f64)
            .collect(),
        j: model
            .j
            .iter()
            .map(|(&(i, k), &c)| ((i, k), c * (a[i] * a[k]) as f64))
            .collect(),
        offset: model.offset,
        scale: model.scale,
    })
}

/// Maps a read of the gauged model back to the original frame. Its own inverse.
pub fn ungauge_read(spins: &[i8], gauge: &Gauge) -> Vec<i8> {
    spins.iter().zip(&gauge.a).map(|(&s, &a)| s * a).collect()
}

/// Applies a logical gauge to an embedded model: every qubit takes the sign of the
/// logical spin it represents. Chain couplings join qubits of the same sign and so are
/// left unchanged; the result equals embedding the gauged logical model.
pub fn partial_gauge(
    embedded: &EmbeddedIsing,
    logical_gauge: &Gauge,
) -> Result<EmbeddedIsing, IsingError> {
    if logical_gauge.len() != embedded.num_logical() {
        return Err(IsingError::GaugeSize {
            expected: embedded.num_logical(),
            got: logical_gauge.len(),
        });
    }
    let physical = logical_gauge.expand(&embedded.owner);
    let mut out = embedded.clone();
    out.ising = gauge_transform(&embedded.ising, &physical)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_spin_example() {
        let mut m = IsingModel::new(2);
        m.h = vec![0.3, -0.7];
        m.add_coupling(0, 1, 0.5);
        let g = Gauge {
            a: vec![1, -1],
            seed: None,
        };
        let t = gauge_transform(&m, &g).unwrap();
        assert_eq!(t.h, vec![0.3, 0.7]);
        assert_eq!(t.coupling(0, 1), -0.5);
        let id = gauge_transform(&m, &Gauge::identity(2)).unwrap();
        assert_eq!(id, m);
    }

    #[test]
    fn ungauge_is_an_involution_and_preserves_energy() {
        let mut m = IsingModel::new(4);
        m.h = vec![0.2, -0.1, 0.4, 0.0];
        m.add_coupling(0, 3, 0.9);
        m.add_coupling(1, 2, -0.6);
        let g = Gauge::random(4, 7);
        let t = gauge_transform(&m, &g).unwrap();
        let read = vec![1, -1, -1, 1];
        let back = ungauge_read(&read, &g);
        assert_eq!(ungauge_read(&back, &g), read);
        assert!((m.energy(&back) - t.energy(&read)).abs() < 1e-12);
    }

    #[test]
    fn random_gauges_are_seeded() {
        assert_eq!(Gauge::random(50, 3), Gauge::random(50, 3));
        assert_ne!(Gauge::random(50, 3).a, Gauge::random(50, 4).a);
        let g = Gauge::random(5, 11);
        assert_eq!(Gauge::from_json(&g.to_json().unwrap()).unwrap(), g);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        assert!(matches!(
            gauge_transform(&IsingModel::new(3), &Gauge::identity(2)),
            Err(IsingError::GaugeSize { .. })
        ));
    }
}
