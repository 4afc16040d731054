use std::io::Read;

use serde::{Deserialize, Serialize};

use super::QsimError;

/// Tabulated `A(s)` and `B(s)` with linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleCurves {
    s: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Default for ScheduleCurves {
    fn default() -> Self {
        ScheduleCurves::linear()
    }
}

#[derive(Debug, Deserialize)]
struct CurveRow {
    s: f64,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
}

impl ScheduleCurves {
    /// `A(s) = 1 - s`, `B(s) = s`.
    pub fn linear() -> Self {
        ScheduleCurves {
            s: vec![0.0, 1.0],
            a: vec![1.0, 0.0],
            b: vec![0.0, 1.0],
        }
    }

    /// Checks the table: `s` strictly increasing from 0 to 1, `A` non-increasing,
    /// `B` non-decreasing, both non-negative.
    pub fn from_table(s: Vec<f64>, a: Vec<f64>, b: Vec<f64>) -> Result<Self, QsimError> {
        let bad = |m: &str| Err(QsimError::Schedule(m.to_string()));
        if s.len() < 2 || a.len() != s.len() || b.len() != s.len() {
            return bad("need at least two rows with s, A and B");
        }
        if s[0] != 0.0 || *s.last().unwrap() != 1.0 {
            return bad("s must run from 0 to 1");
        }
        if s.windows(2).any(|w| w[1] <= w[0]) {
            return bad("s must be strictly increasing");
        }
        if a.iter().chain(&b).any(|v| !v.is_finite() || *v < 0.0) {
            return bad("A and B must be finite and non-negative");
        }
        if a.windows(2).any(|w| w[1] > w[0]) {
            return bad("A must be non-increasing");
        }
        if b.windows(2).any(|w| w[1] < w[0]) {
            return bad("B must be non-decreasing");
        }
        Ok(ScheduleCurves { s, a, b })
    }

    /// Reads a CSV with header `s,A,B`.
    pub fn from_csv(input: impl Read) -> Result<Self, QsimError> {
        let mut rdr = csv::Reader::from_reader(input);
        let (mut s, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new());
        for row in rdr.deserialize() {
            let row: CurveRow = row?;
            s.push(row.s);
            a.push(row.a);
            b.push(row.b);
        }
        ScheduleCurves::from_table(s, a, b)
    }

    fn interp(&self, ys: &[f64], s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        let i = self.s.partition_point(|&x| x <= s).clamp(1, self.s.len() - 1);
        let (x0, x1) = (self.s[i - 1], self.s[i]);
        let t = (s - x0) / (x1 - x0);
        ys[i - 1] + t * (ys[i] - ys[i - 1])
    }

    pub fn a(&self, s: f64) -> f64 {
        self.interp(&self.a, s)
    }

    pub fn b(&self, s: f64) -> f64 {
        self.interp(&self.b, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pause {
    pub s_p: f64,
    /// Duration in µs.
    pub t_p: f64,
}

/// Linear ramp over `t_a` µs, optionally held at `s_p` for `t_p` µs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub t_a: f64,
    pub pause: Option<Pause>,
    #[serde(default)]
    pub curves: ScheduleCurves,
}

impl AnnealSchedule {
    pub fn new(t_a: f64) -> Result<Self, QsimError> {
        if !(t_a > 0.0 && t_a.is_finite()) {
            return Err(QsimError::Schedule(format!("anneal time must be positive, got {t_a}")));
        }
        Ok(AnnealSchedule {
            t_a,
            pause: None,
            curves: ScheduleCurves::linear(),
        })
    }

    pub fn with_pause(mut self, s_p: f64, t_p: f64) -> Result<Self, QsimError> {
        if !(0.0..=1.0).contains(&s_p) || !(t_p >= 0.0 && t_p.is_finite()) {
            return Err(QsimError::Schedule(format!(
                "pause needs s_p in [0, 1] and t_p >= 0, got {s_p} and {t_p}"
            )));
        }
        self.pause = (t_p > 0.0).then_some(Pause { s_p, t_p });
        Ok(self)
    }

    pub fn with_curves(mut self, curves: ScheduleCurves) -> Self {
        self.curves = curves;
        self
    }

    pub fn t_p(&self) -> f64 {
        self.pause.map_or(0.0, |p| p.t_p)
    }

    pub fn t_tot(&self) -> f64 {
        self.t_a + self.t_p()
    }

    /// Anneal fraction at time `t` (µs).
    pub fn s_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.t_tot());
        match self.pause {
            None => t / self.t_a,
            Some(Pause { s_p, t_p }) => {
                let t1 = s_p * self.t_a;
                if t <= t1 {
                    t / self.t_a
                } else if t <= t1 + t_p {
                    s_p
                } else {
                    (t - t_p) / self.t_a
                }
            }
        }
        .min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pause_profile() {
        let sch = AnnealSchedule::new(1.0).unwrap().with_pause(0.3, 2.0).unwrap();
        assert_eq!(sch.t_tot(), 3.0);
        assert_eq!(sch.s_at(0.0), 0.0);
        assert!((sch.s_at(0.15) - 0.15).abs() < 1e-12);
        assert_eq!(sch.s_at(1.0), 0.3);
        assert_eq!(sch.s_at(2.3), 0.3);
        assert!((sch.s_at(2.8) - 0.8).abs() < 1e-12);
        assert_eq!(sch.s_at(3.0), 1.0);
    }

    #[test]
    fn csv_curves_interpolate() {
        let text = "s,A,B\n0,2,0\n0.5,1,0.25\n1,0,1\n";
        let c = ScheduleCurves::from_csv(text.as_bytes()).unwrap();
        assert!((c.a(0.25) - 1.5).abs() < 1e-12);
        assert!((c.b(0.75) - 0.625).abs() < 1e-12);
        assert_eq!(c.a(1.0), 0.0);
    }

    #[test]
    fn non_monotone_curves_are_rejected() {
        let r = ScheduleCurves::from_table(vec![0.0, 0.5, 1.0], vec![1.0, 1.2, 0.0], vec![0.0, 0.5, 1.0]);
        assert!(matches!(r, Err(QsimError::Schedule(_))));
    }
}
