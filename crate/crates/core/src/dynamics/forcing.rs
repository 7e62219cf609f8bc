use std::sync::Arc;

use super::grid::Interval;
use crate::error::{Error, Result};
use crate::spectral::{VelocityField, WaveLattice, DIVERGENCE_TOL};

/// One constant piece `f(t) = field` for `t` in `[start, end)`.
#[derive(Debug, Clone)]
pub struct ForcingSegment {
    pub start: f64,
    pub end: f64,
    pub field: VelocityField,
}

/// Piecewise-constant forcing `f in L^inf(I; H)`.
#[derive(Debug, Clone)]
pub struct ForcingSignal {
    interval: Interval,
    segments: Vec<ForcingSegment>,
    ess_sup_norm: f64,
}

const TILE_TOL: f64 = 1e-12;

impl ForcingSignal {
    /// Segments must tile `interval` in order, without gaps or overlaps.
    pub fn new(interval: Interval, mut segments: Vec<ForcingSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Forcing("no segments".into()));
        }
        segments.sort_by(|a, b| a.start.partial_cmp(&b.start).expect("finite segment times"));
        let scale = interval.length().abs().max(1.0);
        let lattice = segments[0].field.lattice().clone();
        let mut cursor = interval.start;
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.start < seg.end) {
                return Err(Error::Forcing(format!(
                    "segment {i} is empty: [{}, {})",
                    seg.start, seg.end
                )));
            }
            if seg.start < cursor - TILE_TOL * scale {
                return Err(Error::Forcing(format!(
                    "segment {i} starting at {} overlaps the previous one ending at {cursor}",
                    seg.start
                )));
            }
            if seg.start > cursor + TILE_TOL * scale {
                return Err(Error::Forcing(format!(
                    "gap between {cursor} and {} is not covered",
                    seg.start
                )));
            }
            if !seg.field.same_lattice(&VelocityField::zeros(&lattice)) {
                return Err(Error::LatticeMismatch);
            }
            let residual = seg.field.divergence_residual();
            if residual > DIVERGENCE_TOL {
                return Err(Error::NotDivergenceFree { residual });
            }
            cursor = seg.end;
        }
        if (cursor - interval.end).abs() > TILE_TOL * scale {
            return Err(Error::Forcing(format!(
                "segments end at {cursor}, interval ends at {}",
                interval.end
            )));
        }
        let ess_sup_norm = segments.iter().map(|s| s.field.norm()).fold(0.0, f64::max);
        Ok(ForcingSignal {
            interval,
            segments,
            ess_sup_norm,
        })
    }

    pub fn steady(interval: Interval, field: VelocityField) -> Result<Self> {
        Self::new(
            interval,
            vec![ForcingSegment {
                start: interval.start,
                end: interval.end,
                field,
            }],
        )
    }

    pub fn zero(lattice: &Arc<WaveLattice>, interval: Interval) -> Self {
        Self::steady(interval, VelocityField::zeros(lattice)).expect("zero forcing is valid")
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn segments(&self) -> &[ForcingSegment] {
        &self.segments
    }

    pub fn lattice(&self) -> &Arc<WaveLattice> {
        self.segments[0].field.lattice()
    }

    /// `||f||_{L^inf(I; H)}`.
    pub fn ess_sup_norm(&self) -> f64 {
        self.ess_sup_norm
    }

    /// `||f||_{L^inf(a, b; H)}` over segments meeting `(a, b)` with positive length.
    pub fn ess_sup_norm_on(&self, a: f64, b: f64) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.start < b && s.end > a)
            .map(|s| s.field.norm())
            .fold(0.0, f64::max)
    }

    /// Index of the segment containing the midpoint of `[a, b]`.
    pub fn segment_index(&self, a: f64, b: f64) -> usize {
        let mid = 0.5 * (a + b);
        self.segments
            .iter()
            .position(|s| mid < s.end)
            .unwrap_or(self.segments.len() - 1)
    }

    /// Forcing field active on the step `[a, b]`.
    pub fn on_step(&self, a: f64, b: f64) -> &VelocityField {
        &self.segments[self.segment_index(a, b)].field
    }

    pub fn covers(&self, a: f64, b: f64) -> bool {
        let scale = self.interval.length().abs().max(1.0);
        a >= self.interval.start - TILE_TOL * scale && b <= self.interval.end + TILE_TOL * scale
    }
}

/// Builds a forcing signal from `(start, end, field)` triples.
pub fn make_forcing(interval: Interval, pieces: Vec<(f64, f64, VelocityField)>) -> Result<ForcingSignal> {
    ForcingSignal::new(
        interval,
        pieces
            .into_iter()
            .map(|(start, end, field)| ForcingSegment { start, end, field })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::BoxParams;

    fn lat() -> Arc<WaveLattice> {
        Arc::new(WaveLattice::new(BoxParams::periodic_cube(0.1, 1).unwrap()).unwrap())
    }

    #[test]
    fn zero_forcing_norm() {
        let f = ForcingSignal::zero(&lat(), Interval::new(0.0, 1.0).unwrap());
        assert_eq!(f.ess_sup_norm(), 0.0);
    }

    #[test]
    fn single_mode_amplitude() {
        let l = lat();
        let w = VelocityField::eigenmode(&l, [1, 0, 0], 0, 2.5).unwrap();
        let f = ForcingSignal::steady(Interval::new(0.0, 1.0).unwrap(), w).unwrap();
        assert!((f.ess_sup_norm() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn two_segments_take_the_max() {
        let l = lat();
        let a = VelocityField::eigenmode(&l, [1, 0, 0], 0, 1.0).unwrap();
        let b = VelocityField::eigenmode(&l, [0, 1, 0], 1, 3.0).unwrap();
        let f = make_forcing(Interval::new(0.0, 2.0).unwrap(), vec![(1.0, 2.0, b), (0.0, 1.0, a)]).unwrap();
        assert!((f.ess_sup_norm() - 3.0).abs() < 1e-14);
        assert!((f.ess_sup_norm_on(0.0, 1.0) - 1.0).abs() < 1e-14);
        assert!((f.on_step(0.9, 1.0).norm() - 1.0).abs() < 1e-14);
        assert!((f.on_step(1.0, 1.1).norm() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn overlap_and_gap_are_rejected() {
        let l = lat();
        let z = VelocityField::zeros(&l);
        let iv = Interval::new(0.0, 2.0).unwrap();
        let overlap = make_forcing(iv, vec![(0.0, 1.2, z.clone()), (1.0, 2.0, z.clone())]);
        assert!(matches!(overlap, Err(Error::Forcing(m)) if m.contains("overlaps")));
        let gap = make_forcing(iv, vec![(0.0, 0.8, z.clone()), (1.0, 2.0, z.clone())]);
        assert!(matches!(gap, Err(Error::Forcing(m)) if m.contains("gap")));
        let short = make_forcing(iv, vec![(0.0, 1.0, z)]);
        assert!(short.is_err());
    }
}
