use serde::{Deserialize, Serialize};

/// Nonnegative, nondecreasing `C^1` function with bounded derivative used
/// to strengthen energy inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsiFunction {
    /// `psi(r) = r`.
    Linear,
    /// `psi(r) = a (1 - exp(-r / a))`.
    Saturating { a: f64 },
}

impl PsiFunction {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            PsiFunction::Linear => r,
            PsiFunction::Saturating { a } => -a * (-r / a).exp_m1(),
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match *self {
            PsiFunction::Linear => 1.0,
            PsiFunction::Saturating { a } => (-r / a).exp(),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            PsiFunction::Linear => "linear".into(),
            PsiFunction::Saturating { a } => format!("saturating(a={a})"),
        }
    }
}
