use serde::{Deserialize, Serialize};

use super::measures::PhaseMeasure;
use crate::error::{Error, Result};
use crate::spectral::VelocityField;

/// Relative slack when assigning an atom to the closed ball `|u| <= R_k`.
const SHELL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiiLadder {
    radii: Vec<f64>,
}

impl RadiiLadder {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::invalid("a radii ladder needs at least one radius"));
        }
        if !(radii[0] > 0.0) || radii.windows(2).any(|w| !(w[1] > w[0])) || radii.iter().any(|r| !r.is_finite()) {
            return Err(Error::invalid(format!("radii must be positive and strictly increasing: {radii:?}")));
        }
        Ok(RadiiLadder { radii })
    }

    /// Ladder whose first rung sits at or above the absorbing radius.
    pub fn above_r0(radii: Vec<f64>, r0: f64) -> Result<Self> {
        let ladder = RadiiLadder::new(radii)?;
        if ladder.radii[0] < r0 {
            return Err(Error::invalid(format!("first radius {} is below R0={r0}", ladder.radii[0])));
        }
        Ok(ladder)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn top(&self) -> f64 {
        *self.radii.last().expect("nonempty")
    }

    /// Annulus index of a norm: 0 for `|u| <= R_1`, `k` for `R_k < |u| <= R_{k+1}`.
    pub fn shell_of(&self, norm: f64) -> Option<usize> {
        self.radii.iter().position(|r| norm <= r * (1.0 + SHELL_SLACK))
    }
}

/// One annulus restricted and renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusPart {
    pub shell: usize,
    pub mass: f64,
    pub measure: PhaseMeasure,
    /// Positions of the part's atoms in the source measure.
    pub source: Vec<usize>,
}

/// Splits a measure by atom norm; empty annuli are omitted.
pub fn annuli_split(mu: &PhaseMeasure, ladder: &RadiiLadder) -> Result<Vec<AnnulusPart>> {
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); ladder.radii().len()];
    for (j, u) in mu.atoms().iter().enumerate() {
        let n = u.norm();
        let k = ladder
            .shell_of(n)
            .ok_or_else(|| Error::Measure(format!("atom {j} has norm {n} beyond the ladder top {}", ladder.top())))?;
        groups[k].push(j);
    }
    let mut parts = Vec::new();
    for (shell, idx) in groups.into_iter().enumerate() {
        if idx.is_empty() {
            continue;
        }
        let raw: Vec<f64> = idx.iter().map(|&j| mu.weights()[j]).collect();
        let mass: f64 = raw.iter().sum();
        let atoms = idx.iter().map(|&j| mu.atoms()[j].clone()).collect();
        let weights: Vec<f64> = raw.iter().map(|w| w / mass).collect();
        parts.push(AnnulusPart {
            shell,
            mass,
            measure: PhaseMeasure::new(atoms, weights)?,
            source: idx,
        });
    }
    Ok(parts)
}

/// `sum_k mass_k mu_k`, with atoms restored to source order.
pub fn recombine(parts: &[AnnulusPart]) -> Result<PhaseMeasure> {
    let n: usize = parts.iter().map(|p| p.source.len()).sum();
    let mut slots: Vec<Option<(VelocityField, f64)>> = vec![None; n];
    for p in parts {
        for (local, &j) in p.source.iter().enumerate() {
            let slot = slots
                .get_mut(j)
                .ok_or_else(|| Error::Measure(format!("part refers to atom {j} of {n}")))?;
            if slot.is_some() {
                return Err(Error::Measure(format!("atom {j} appears in two parts")));
            }
            *slot = Some((p.measure.atoms()[local].clone(), p.mass * p.measure.weights()[local]));
        }
    }
    let (atoms, weights): (Vec<_>, Vec<_>) = slots
        .into_iter()
        .enumerate()
        .map(|(j, s)| s.ok_or_else(|| Error::Measure(format!("atom {j} is missing from the parts"))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    PhaseMeasure::new(atoms, weights)
}

/// `sum_k mass_k E_{mu_k}[f]`, the mixture identity used to check a split.
pub fn mixture_expectation<F: Fn(&VelocityField) -> f64>(parts: &[AnnulusPart], f: F) -> f64 {
    let mut acc = 0.0;
    for p in parts {
        acc += p.mass * p.measure.expect(&f);
    }
    acc
}
