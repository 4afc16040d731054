//! Ising models, QUBO conversion, range scaling and gauge transformations.
//!
//! Spins are `i8` values in `{-1, +1}`; bit `1` maps to spin `+1`.

mod gauge;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::qubo::{QuadPoly, Qubo};

pub use gauge::{gauge_transform, partial_gauge, ungauge_read, Gauge};

#[derive(Debug, Error)]
pub enum IsingError {
    #[error("model has no nonzero terms to scale")]
    AllZero,
    #[error("gauge covers {got} spins, model has {expected}")]
    GaugeSize { expected: usize, got: usize },
    #[error("configuration has {got} spins, model has {expected}")]
    Length { expected: usize, got: usize },
    #[error("spin values must be -1 or +1")]
    SpinValue,
    #[error("exhaustive search is limited to {max} spins, model has {n}")]
    TooLarge { n: usize, max: usize },
    #[error("malformed model file: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// `E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub h: Vec<f64>,
    /// Keys `(i, j)` with `i < j`.
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
    /// Cumulative factor applied by [`IsingModel::scale_to_range`]; original energies
    /// are `energy / scale`.
    pub scale: f64,
}

impl IsingModel {
    pub fn new(num_spins: usize) -> Self {
        IsingModel {
            h: vec![0.0; num_spins],
            j: BTreeMap::new(),
            offset: 0.0,
            scale: 1.0,
        }
    }

    pub fn num_spins(&self) -> usize {
        self.h.len()
    }

    /// Adds `c` to `J_ij`; entries that cancel to exactly zero are dropped.
    pub fn add_coupling(&mut self, i: usize, j: usize, c: f64) {
        assert_ne!(i, j, "coupling needs distinct spins");
        let key = (i.min(j), i.max(j));
        let e = self.j.entry(key).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.j.remove(&key);
        }
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.j.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)
    }

    pub fn energy(&self, spins: &[i8]) -> f64 {
        let mut e = self.offset;
        for (i, &h) in self.h.iter().enumerate() {
            e += h * spins[i] as f64;
        }
        for (&(a, b), &c) in &self.j {
            e += c * (spins[a] * spins[b]) as f64;
        }
        e
    }

    pub fn checked_energy(&self, spins: &[i8]) -> Result<f64, IsingError> {
        if spins.len() != self.num_spins() {
            return Err(IsingError::Length {
                expected: self.num_spins(),
                got: spins.len(),
            });
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(IsingError::SpinValue);
        }
        Ok(self.energy(spins))
    }

    /// Energy in the units of the model before any range scaling.
    pub fn unscaled_energy(&self, spins: &[i8]) -> f64 {
        self.energy(spins) / self.scale
    }

    /// Largest absolute field or coupling.
    pub fn max_abs_term(&self) -> f64 {
        self.h
            .iter()
            .chain(self.j.values())
            .fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Neighbour lists `(k, J)` per spin.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.num_spins()];
        for (&(a, b), &c) in &self.j {
            adj[a].push((b, c));
            adj[b].push((a, c));
        }
        adj
    }

    /// Uniform positive rescaling so that the largest term equals `j_max`.
    pub fn scale_to_range(&self, j_max: f64) -> Result<IsingModel, IsingError> {
        let m = self.max_abs_term();
        if m == 0.0 {
            return Err(IsingError::AllZero);
        }
        let c = if m <= j_max { 1.0 } else { j_max / m };
        // only shrinks: an already in-range model keeps c = 1
        Ok(self.scaled_by(c))
    }

    /// Multiplies every term (and the offset) by `c > 0`.
    pub fn scaled_by(&self, c: f64) -> IsingModel {
        IsingModel {
            h: self.h.iter().map(|v| v * c).collect(),
            j: self.j.iter().map(|(&k, &v)| (k, v * c)).collect(),
            offset: self.offset * c,
            scale: self.scale * c,
        }
    }

    /// Same text layout as the QUBO coordinate format.
    pub fn write_coo(&self, label: &str, out: &mut impl Write) -> Result<(), IsingError> {
        let mut s = String::new();
        let _ = writeln!(s, "# ising {label}");
        let _ = writeln!(s, "# num_spins {}", self.num_spins());
        let _ = writeln!(s, "# offset {:e}", self.offset);
        let _ = writeln!(s, "# scale {:e}", self.scale);
        for (i, &h) in self.h.iter().enumerate() {
            if h != 0.0 {
                let _ = writeln!(s, "{i} {i} {h:e}");
            }
        }
        for (&(a, b), &c) in &self.j {
            let _ = writeln!(s, "{a} {b} {c:e}");
        }
        out.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn read_coo(input: impl BufRead) -> Result<IsingModel, IsingError> {
        let bad = |line: &str| IsingError::Parse(line.to_string());
        let mut n = None;
        let mut offset = 0.0;
        let mut scale = 1.0;
        let mut terms = Vec::new();
        for line in input.lines() {
            let line = line?;
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                [] => {}
                ["#", "num_spins", v] => n = Some(v.parse::<usize>().map_err(|_| bad(&line))?),
                ["#", "offset", v] => offset = v.parse().map_err(|_| bad(&line))?,
                ["#", "scale", v] => scale = v.parse().map_err(|_| bad(&line))?,
                ["#", ..] => {}
                [i, j, c] => {
                    let i: usize = i.parse().map_err(|_| bad(&line))?;
                    let j: usize = j.parse().map_err(|_| bad(&line))?;
                    let c: f64 = c.parse().map_err(|_| bad(&line))?;
                    terms.push((i, j, c));
                }
                _ => return Err(bad(&line)),
            }
        }
        let n = n.ok_or_else(|| IsingError::Parse("missing num_spins header".into()))?;
        let mut m = IsingModel::new(n);
        m.offset = offset;
        m.scale = scale;
        for (i, j, c) in terms {
            if i >= n || j >= n {
                return Err(IsingError::Parse(format!("term ({i}, {j}) out of range")));
            }
            if i == j {
                m.h[i] += c;
            } else {
                m.add_coupling(i, j, c);
            }
        }
        Ok(m)
    }
}

/// Substitutes `x = (1 + s) / 2` into a quadratic pseudo-boolean polynomial.
pub fn poly_to_ising(poly: &QuadPoly) -> IsingModel {
    let mut m = IsingModel::new(poly.num_vars());
    m.offset = poly.offset as f64;
    for (i, &c) in poly.linear.iter().enumerate() {
        let c = c as f64;
        m.h[i] += c / 2.0;
        m.offset += c / 2.0;
    }
    for (&(i, j), &c) in &poly.quadratic {
        let c = c as f64 / 4.0;
        m.add_coupling(i, j, c);
        m.h[i] += c;
        m.h[j] += c;
        m.offset += c;
    }
    m
}

pub fn qubo_to_ising(qubo: &Qubo) -> IsingModel {
    poly_to_ising(&qubo.poly)
}

pub fn spins_from_bits(bits: &[u8]) -> Vec<i8> {
    bits.iter().map(|&b| if b != 0 { 1 } else { -1 }).collect()
}

pub fn bits_from_spins(spins: &[i8]) -> Vec<u8> {
    spins.iter().map(|&s| u8::from(s > 0)).collect()
}

/// Spin configuration of index `k`: bit `i` of `k` set means spin `i` is `+1`.
pub fn spins_from_index(k: u64, n: usize) -> Vec<i8> {
    (0..n).map(|i| if (k >> i) & 1 == 1 { 1 } else { -1 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_linear_term() {
        let mut p = QuadPoly::zeros(1);
        p.add_linear(0, 1);
        let m = poly_to_ising(&p);
        assert_eq!(m.h, vec![0.5]);
        assert_eq!(m.offset, 0.5);
    }

    #[test]
    fn single_quadratic_term() {
        let mut p = QuadPoly::zeros(2);
        p.add_quadratic(0, 1, 1);
        let m = poly_to_ising(&p);
        assert_eq!(m.coupling(0, 1), 0.25);
        assert_eq!(m.h, vec![0.25, 0.25]);
        assert_eq!(m.offset, 0.25);
    }

    #[test]
    fn scaling_shrinks_to_j_max_and_records_factor() {
        let mut m = IsingModel::new(2);
        m.add_coupling(0, 1, 4.0);
        m.h[0] = -2.0;
        let s = m.scale_to_range(1.0).unwrap();
        assert_eq!(s.coupling(0, 1), 1.0);
        assert_eq!(s.h[0], -0.5);
        assert_eq!(s.scale, 0.25);
        let t = s.scale_to_range(1.0).unwrap();
        assert_eq!(t, s);
        assert!(matches!(
            IsingModel::new(3).scale_to_range(1.0),
            Err(IsingError::AllZero)
        ));
    }

    #[test]
    fn coo_round_trip() {
        let mut m = IsingModel::new(3);
        m.h = vec![0.1, -0.3, 0.0];
        m.add_coupling(0, 2, -0.75);
        m.offset = 2.5;
        let mut buf = Vec::new();
        m.write_coo("t", &mut buf).unwrap();
        assert_eq!(IsingModel::read_coo(buf.as_slice()).unwrap(), m);
    }
}
