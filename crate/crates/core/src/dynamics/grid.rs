use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed time interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::InvalidInterval(format!(
                "need start < end, got [{start}, {end}]"
            )));
        }
        Ok(Interval { start, end })
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// Uniform grid `t0 = t_0 < t_1 < ... < t_n = t1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    steps: usize,
}

/// Relative slack used when snapping times to nodes.
pub const NODE_TOL: f64 = 1e-9;

impl TimeGrid {
    /// Grid on `[t0, t1]` with step `dt`; `dt` must divide the interval.
    pub fn new(t0: f64, t1: f64, dt: f64) -> Result<Self> {
        Interval::new(t0, t1)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid(format!("time step must be positive, got {dt}")));
        }
        let ratio = (t1 - t0) / dt;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > NODE_TOL * ratio.max(1.0) {
            return Err(Error::invalid(format!(
                "dt = {dt} does not divide the interval [{t0}, {t1}]"
            )));
        }
        Ok(TimeGrid {
            t0,
            t1,
            steps: steps as usize,
        })
    }

    pub fn with_steps(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        Interval::new(t0, t1)?;
        if steps == 0 {
            return Err(Error::invalid("grid needs at least one step"));
        }
        Ok(TimeGrid { t0, t1, steps })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }

    pub fn interval(&self) -> Interval {
        Interval {
            start: self.t0,
            end: self.t1,
        }
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.steps {
            self.t1
        } else {
            self.t0 + i as f64 * self.dt()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Index of the node at `t`, within `NODE_TOL * dt`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let dt = self.dt();
        let x = (t - self.t0) / dt;
        let i = x.round();
        if !(i >= 0.0 && i <= self.steps as f64) {
            return Err(Error::OffGrid { t });
        }
        let i = i as usize;
        if (self.node(i) - t).abs() > NODE_TOL * dt {
            return Err(Error::OffGrid { t });
        }
        Ok(i)
    }

    /// Same grid with the step halved `levels` times.
    pub fn refined(&self, levels: u32) -> TimeGrid {
        TimeGrid {
            t0: self.t0,
            t1: self.t1,
            steps: self.steps << levels,
        }
    }

    pub fn same_as(&self, other: &TimeGrid) -> bool {
        self.steps == other.steps
            && (self.t0 - other.t0).abs() <= NODE_TOL * self.dt()
            && (self.t1 - other.t1).abs() <= NODE_TOL * self.dt()
    }
}

/// Composite trapezoid rule for samples on a uniform grid.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dt * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_lookup() {
        let g = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g.node(10), 1.0);
        assert_eq!(g.index_of(0.3).unwrap(), 3);
        assert!(matches!(g.index_of(0.35), Err(Error::OffGrid { .. })));
        assert!(matches!(g.index_of(1.2), Err(Error::OffGrid { .. })));
        let nodes = g.nodes();
        for w in nodes.windows(2) {
            assert!((w[1] - w[0] - 0.1).abs() < 1e-12 * 0.1 * 10.0);
        }
    }

    #[test]
    fn dt_must_divide_interval() {
        assert!(TimeGrid::new(0.0, 1.0, 0.3).is_err());
        assert!(TimeGrid::new(0.0, 1.0, -0.1).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn refinement_keeps_coarse_nodes() {
        let g = TimeGrid::new(0.5, 2.5, 0.25).unwrap();
        let f = g.refined(2);
        assert_eq!(f.steps(), 32);
        for i in 0..g.len() {
            assert_eq!(f.index_of(g.node(i)).unwrap(), 4 * i);
        }
    }

    #[test]
    fn trapezoid_exact_for_linear() {
        let v: Vec<f64> = (0..=10).map(|i| 2.0 * i as f64 * 0.1 + 1.0).collect();
        assert!((trapezoid(&v, 0.1) - 2.0).abs() < 1e-14);
        assert_eq!(trapezoid(&[3.0], 0.1), 0.0);
    }
}
