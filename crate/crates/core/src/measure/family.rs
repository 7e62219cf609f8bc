use serde::{Deserialize, Serialize};

use crate::checks::PsiFunction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiKind {
    Linear,
    Saturating,
}

/// Builds a ψ and checks positivity, monotonicity and `0 <= psi' <= 1` on
/// a log grid `r = 10^-8 .. 10^8`. `a` is ignored for the linear kind.
pub fn psi_family(kind: PsiKind, a: f64) -> Result<PsiFunction> {
    let psi = match kind {
        PsiKind::Linear => PsiFunction::Linear,
        PsiKind::Saturating => {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::invalid(format!("saturating psi needs a > 0, got {a}")));
            }
            PsiFunction::Saturating { a }
        }
    };
    let mut prev = psi.value(0.0);
    if prev != 0.0 {
        return Err(Error::invalid("psi(0) must vanish"));
    }
    for e in -32..=32 {
        let r = 10f64.powf(e as f64 / 4.0);
        let (v, d) = (psi.value(r), psi.derivative(r));
        if !(v >= prev) || !(0.0..=1.0).contains(&d) {
            return Err(Error::invalid(format!("{} violates its invariants at r={r}", psi.label())));
        }
        prev = v;
    }
    Ok(psi)
}
