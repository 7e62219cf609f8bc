use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::sampler::sample_gaussian_measure;
use crate::checks::{compute_r0, PsiFunction};
use crate::dynamics::{ForcingSegment, ForcingSignal, TimeGrid};
use crate::error::{Error, Result};
use crate::measure::{psi_family, PhaseMeasure, PsiKind, RadiiLadder};
use crate::pipeline::VFBuildConfig;
use crate::spectral::{BoxParams, NonlinearScheme, VelocityField, WaveLattice};

/// Names accepted in `checks.list` and by `verify --checks`.
pub const CHECK_NAMES: [&str; 7] = [
    "energy",
    "ball",
    "mean_energy",
    "continuity",
    "carrier",
    "localization",
    "liouville",
];

/// One experiment: box, time grid, forcing, initial measure, checks and
/// output location. Parsed from JSON with unknown fields rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    #[serde(rename = "box")]
    pub domain: DomainConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub forcing: ForcingConfig,
    pub initial: InitialConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Absolute radii of an annuli decomposition of the initial measure.
    #[serde(default)]
    pub ladder: Option<Vec<f64>>,
    #[serde(default)]
    pub checks: CheckConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    /// Side lengths; the `2 pi` cube when omitted.
    #[serde(default = "two_pi_cube")]
    pub lengths: [f64; 3],
    pub viscosity: f64,
    /// Lattice cutoff `K`: wavevectors with `max |k_i| <= K`.
    pub cutoff: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

/// Eigenmode with `L2` norm `amplitude` along polarization 0 or 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub k: [i32; 3],
    #[serde(default)]
    pub polarization: usize,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub start: f64,
    pub end: f64,
    #[serde(default)]
    pub modes: Vec<ModeConfig>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingConfig {
    #[default]
    Zero,
    /// Time-independent sum of eigenmodes.
    Steady { modes: Vec<ModeConfig> },
    /// Piecewise-constant forcing; the segments must tile the interval.
    Segments { segments: Vec<SegmentConfig> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    #[serde(default = "one")]
    pub weight: f64,
    pub modes: Vec<ModeConfig>,
}

/// Radius clamp for sampled atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiusConfig {
    Absolute(f64),
    /// Multiple of the absorbing radius `R0` of the configured forcing.
    R0Multiple { r0_multiple: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClampMode {
    /// Atoms outside the ball are rescaled onto its boundary.
    #[default]
    Rescale,
    /// Every atom is rescaled onto the sphere of radius `R`.
    Sphere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// Explicit atoms; weights are normalized if they sum to 1 within 1e-9.
    Atoms { atoms: Vec<AtomConfig> },
    /// Dirac mass at the ABC field with coefficients `(a, b, c)`.
    Abc { a: f64, b: f64, c: f64 },
    /// Equal-weight atoms drawn from a truncated spectral Gaussian with
    /// mode variance proportional to `lambda^-spectral_slope` and mean
    /// `|u|^2` equal to `energy`.
    Gaussian {
        seed: u64,
        atoms: usize,
        energy: f64,
        #[serde(default = "one")]
        spectral_slope: f64,
        #[serde(default)]
        radius: Option<RadiusConfig>,
        #[serde(default)]
        clamp: ClampMode,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub scheme: NonlinearScheme,
}

/// Default selection and tolerances for `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(default = "all_checks")]
    pub list: Vec<String>,
    /// Absolute tolerance for the inequality checks; calibrated by step
    /// halving when absent.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_psis")]
    pub psi: Vec<PsiFunction>,
    /// Number of step halvings used for calibration and the residual-vs-dt table.
    #[serde(default = "default_refine")]
    pub refine: u32,
    /// Tolerance on extrapolated continuity limits.
    #[serde(default = "default_continuity_tol")]
    pub continuity_tol: f64,
    /// Relative slack on ball radii.
    #[serde(default = "default_ball_slack")]
    pub ball_slack: f64,
    #[serde(default = "default_liouville_functions")]
    pub liouville_functions: usize,
    #[serde(default = "default_liouville_arity")]
    pub liouville_arity: usize,
    /// Seed of the random cylindrical test family.
    #[serde(default)]
    pub family_seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            list: all_checks(),
            tol: None,
            psi: default_psis(),
            refine: default_refine(),
            continuity_tol: default_continuity_tol(),
            ball_slack: default_ball_slack(),
            liouville_functions: default_liouville_functions(),
            liouville_arity: default_liouville_arity(),
            family_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory, relative to the config file's directory.
    #[serde(default = "default_out")]
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out() }
    }
}

fn two_pi_cube() -> [f64; 3] {
    [2.0 * PI; 3]
}
fn one() -> f64 {
    1.0
}
fn all_checks() -> Vec<String> {
    CHECK_NAMES.iter().map(|s| s.to_string()).collect()
}
fn default_psis() -> Vec<PsiFunction> {
    vec![
        PsiFunction::Linear,
        PsiFunction::Saturating { a: 1.0 },
        PsiFunction::Saturating { a: 10.0 },
    ]
}
fn default_refine() -> u32 {
    2
}
fn default_continuity_tol() -> f64 {
    1e-6
}
fn default_ball_slack() -> f64 {
    1e-6
}
fn default_liouville_functions() -> usize {
    5
}
fn default_liouville_arity() -> usize {
    3
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Everything `run` needs, resolved from a config.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub lattice: Arc<WaveLattice>,
    pub build: VFBuildConfig,
    pub mu0: PhaseMeasure,
}

fn positive(path: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be a positive number, got {x}")))
    }
}

fn field_from_modes(lattice: &Arc<WaveLattice>, modes: &[ModeConfig], path: &str) -> Result<VelocityField> {
    let mut u = VelocityField::zeros(lattice);
    for (i, m) in modes.iter().enumerate() {
        let p = format!("{path}[{i}]");
        if !m.amplitude.is_finite() {
            return Err(Error::config(format!("{p}.amplitude"), "must be finite"));
        }
        if m.polarization > 1 {
            return Err(Error::config(format!("{p}.polarization"), "must be 0 or 1"));
        }
        if lattice.locate(m.k).is_none() {
            return Err(Error::config(
                format!("{p}.k"),
                format!("{:?} is zero or outside the lattice with cutoff {}", m.k, lattice.cutoff()),
            ));
        }
        let e = VelocityField::eigenmode(lattice, m.k, m.polarization, m.amplitude)?;
        u = u.add_scaled(1.0, &e)?;
    }
    Ok(u)
}

impl ExperimentConfig {
    /// Parses JSON; type errors carry the path of the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path).map_err(|source| Error::File {
            path: path.display().to_string(),
            source,
        })?;
        let text = std::str::from_utf8(&bytes).map_err(|_| Error::config(".", "config is not valid UTF-8"))?;
        Ok((Self::from_json(text)?, bytes))
    }

    pub fn box_params(&self) -> Result<BoxParams> {
        let d = &self.domain;
        for (i, l) in d.lengths.iter().enumerate() {
            positive(&format!("box.lengths[{i}]"), *l)?;
        }
        positive("box.viscosity", d.viscosity)?;
        if d.cutoff == 0 {
            return Err(Error::config("box.cutoff", "must be at least 1"));
        }
        BoxParams::new(d.lengths, d.viscosity, d.cutoff)
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        let t = &self.time;
        if !(t.t0.is_finite() && t.t1.is_finite() && t.t1 > t.t0) {
            return Err(Error::config("time.t1", format!("interval [{}, {}] is empty", t.t0, t.t1)));
        }
        positive("time.dt", t.dt)?;
        TimeGrid::new(t.t0, t.t1, t.dt).map_err(|_| {
            Error::config(
                "time.dt",
                format!("dt = {} does not divide the interval [{}, {}]", t.dt, t.t0, t.t1),
            )
        })
    }

    pub fn forcing_signal(&self, lattice: &Arc<WaveLattice>, grid: &TimeGrid) -> Result<ForcingSignal> {
        let iv = grid.interval();
        match &self.forcing {
            ForcingConfig::Zero => Ok(ForcingSignal::zero(lattice, iv)),
            ForcingConfig::Steady { modes } => {
                let f = field_from_modes(lattice, modes, "forcing.modes")?;
                ForcingSignal::steady(iv, f)
            }
            ForcingConfig::Segments { segments } => {
                if segments.is_empty() {
                    return Err(Error::config("forcing.segments", "needs at least one segment"));
                }
                let mut pieces = Vec::with_capacity(segments.len());
                for (i, s) in segments.iter().enumerate() {
                    let field = field_from_modes(lattice, &s.modes, &format!("forcing.segments[{i}].modes"))?;
                    pieces.push(ForcingSegment {
                        start: s.start,
                        end: s.end,
                        field,
                    });
                }
                ForcingSignal::new(iv, pieces).map_err(|e| Error::config("forcing.segments", e.to_string()))
            }
        }
    }

    pub fn initial_measure(&self, lattice: &Arc<WaveLattice>, forcing: &ForcingSignal) -> Result<PhaseMeasure> {
        match &self.initial {
            InitialConfig::Atoms { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::config("initial.atoms", "needs at least one atom"));
                }
                let mut fields = Vec::with_capacity(atoms.len());
                let mut weights = Vec::with_capacity(atoms.len());
                for (i, a) in atoms.iter().enumerate() {
                    positive(&format!("initial.atoms[{i}].weight"), a.weight)?;
                    fields.push(field_from_modes(lattice, &a.modes, &format!("initial.atoms[{i}].modes"))?);
                    weights.push(a.weight);
                }
                PhaseMeasure::new(fields, weights).map_err(|e| Error::config("initial.atoms", e.to_string()))
            }
            InitialConfig::Abc { a, b, c } => {
                let u = VelocityField::abc(lattice, *a, *b, *c).map_err(|e| Error::config("initial", e.to_string()))?;
                Ok(PhaseMeasure::dirac(u))
            }
            InitialConfig::Gaussian {
                seed,
                atoms,
                energy,
                spectral_slope,
                radius,
                clamp,
            } => {
                if *atoms == 0 {
                    return Err(Error::config("initial.atoms", "must be at least 1"));
                }
                positive("initial.energy", *energy)?;
                if !spectral_slope.is_finite() {
                    return Err(Error::config("initial.spectral_slope", "must be finite"));
                }
                let r = match radius {
                    None => None,
                    Some(RadiusConfig::Absolute(r)) => {
                        positive("initial.radius", *r)?;
                        Some(*r)
                    }
                    Some(RadiusConfig::R0Multiple { r0_multiple }) => {
                        positive("initial.radius.r0_multiple", *r0_multiple)?;
                        let r0 = compute_r0(forcing, self.domain.viscosity, lattice.lambda1());
                        if r0 == 0.0 {
                            return Err(Error::config("initial.radius.r0_multiple", "R0 vanishes for zero forcing"));
                        }
                        Some(r0_multiple * r0)
                    }
                };
                sample_gaussian_measure(lattice, *seed, *atoms, *energy, *spectral_slope, r, *clamp)
            }
        }
    }

    pub fn validate_checks(&self) -> Result<()> {
        let c = &self.checks;
        validate_check_list(&c.list, "checks.list")?;
        if let Some(tol) = c.tol {
            positive("checks.tol", tol)?;
        }
        for (i, psi) in c.psi.iter().enumerate() {
            let (kind, a) = match psi {
                PsiFunction::Linear => (PsiKind::Linear, 0.0),
                PsiFunction::Saturating { a } => (PsiKind::Saturating, *a),
            };
            psi_family(kind, a).map_err(|e| Error::config(format!("checks.psi[{i}]"), e.to_string()))?;
        }
        positive("checks.continuity_tol", c.continuity_tol)?;
        positive("checks.ball_slack", c.ball_slack)?;
        if c.liouville_functions == 0 {
            return Err(Error::config("checks.liouville_functions", "must be at least 1"));
        }
        if c.liouville_arity == 0 {
            return Err(Error::config("checks.liouville_arity", "must be at least 1"));
        }
        if c.refine > 4 {
            return Err(Error::config("checks.refine", "at most 4 halvings are supported"));
        }
        Ok(())
    }

    /// Validates every section and resolves the experiment.
    pub fn build(&self) -> Result<Experiment> {
        let params = self.box_params()?;
        let grid = self.grid()?;
        let lattice = Arc::new(WaveLattice::new(params)?);
        let forcing = self.forcing_signal(&lattice, &grid)?;
        self.validate_checks()?;
        let mu0 = self.initial_measure(&lattice, &forcing)?;
        let mut build = VFBuildConfig::new(grid, params.viscosity, forcing).with_scheme(self.solver.scheme);
        if let Some(radii) = &self.ladder {
            let ladder = RadiiLadder::new(radii.clone()).map_err(|e| Error::config("ladder", e.to_string()))?;
            if mu0.max_norm() > ladder.top() {
                return Err(Error::config(
                    "ladder",
                    format!("top radius {} does not contain the initial measure (max norm {})", ladder.top(), mu0.max_norm()),
                ));
            }
            build = build.with_ladder(ladder);
        }
        Ok(Experiment { lattice, build, mu0 })
    }
}

pub(crate) fn validate_check_list(list: &[String], path: &str) -> Result<()> {
    if list.is_empty() {
        return Err(Error::config(path, "no checks selected"));
    }
    for (i, name) in list.iter().enumerate() {
        if !CHECK_NAMES.contains(&name.as_str()) {
            return Err(Error::config(
                format!("{path}[{i}]"),
                format!("unknown check `{name}`; expected one of {}", CHECK_NAMES.join(", ")),
            ));
        }
    }
    Ok(())
}
