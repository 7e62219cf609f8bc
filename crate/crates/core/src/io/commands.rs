use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{validate_check_list, CheckConfig, ExperimentConfig};
use super::format::{
    forcing_to_file, read_file, read_measure, write_json, write_trajectory, GridSpec, LoadedMeasure, MeasureFile,
    MEASURE_FORMAT,
};
use super::manifest::{unix_now, RunManifest};
use crate::checks::{
    ball_invariance, compute_r0, dyadic_times, strong_continuity_diagnostic, sweep_energy_checks, EnergyLedger,
    EnergyProfile, PsiFunction, RichardsonCalibration, SweepSummary,
};
use crate::dynamics::TimeGrid;
use crate::error::{Error, Result};
use crate::measure::{random_cylindrical_family, TrajectoryMeasure};
use crate::pipeline::{
    carrier_check, construct_vf_measure, initial_continuity, localization_check, mean_energy_bound,
    weighted_psi_series, ConvergencePoint, EnsembleEnergy, LiouvilleEvaluator, StatReport, StatRow, VFBuildConfig,
    MEAN_BOUND_TAG, WEAK_MEAN_ENERGY_TAG,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Exit code for a command that failed with `err`: bad input (usage,
/// config, unreadable or unparsable files) is 2, anything that goes wrong
/// while computing is 3.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::Usage(_) | Error::File { .. } | Error::Json(_) | Error::Csv(_) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", dir.display()))))
}

/// Paths written by [`cmd_run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub measure: PathBuf,
    pub manifest: PathBuf,
    pub atom_files: Vec<PathBuf>,
}

/// Builds the initial measure of the config at `config_path`, integrates
/// every atom and writes `atom_NNN.json`, `measure.json` and
/// `manifest.json` into the configured output directory.
pub fn cmd_run(config_path: &Path) -> Result<RunOutput> {
    let started = unix_now();
    let (cfg, bytes) = ExperimentConfig::load(config_path)?;
    let exp = cfg.build()?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let dir = base.join(&cfg.output.dir);
    let rho = construct_vf_measure(&exp.mu0, &exp.build)?;
    create_dir(&dir)?;

    let mut manifest = RunManifest::new(&cfg.name, &bytes, started);
    let width = rho.len().saturating_sub(1).to_string().len().max(3);
    let mut names = Vec::with_capacity(rho.len());
    let mut atom_files = Vec::with_capacity(rho.len());
    for (j, traj) in rho.atoms().iter().enumerate() {
        let name = format!("atom_{j:0width$}.json");
        let path = dir.join(&name);
        let written = write_trajectory(&path, traj)?;
        manifest.record(&name, &written);
        names.push(name);
        atom_files.push(path);
    }
    let measure = MeasureFile {
        format: MEASURE_FORMAT.into(),
        lattice: *exp.lattice.params(),
        grid: GridSpec::of(&exp.build.grid),
        viscosity: exp.build.viscosity,
        scheme: exp.build.scheme,
        forcing: forcing_to_file(&exp.build.forcing),
        weights: rho.weights().to_vec(),
        atoms: names,
        ladder: cfg.ladder.clone(),
        checks: cfg.checks.clone(),
        config_sha256: manifest.config_sha256.clone(),
    };
    let measure_path = dir.join("measure.json");
    let written = write_json(&measure_path, &measure)?;
    manifest.record("measure.json", &written);
    manifest.timestamps.finished = unix_now();
    let manifest_path = dir.join("manifest.json");
    write_json(&manifest_path, &manifest)?;
    Ok(RunOutput {
        dir,
        measure: measure_path,
        manifest: manifest_path,
        atom_files,
    })
}

/// Overrides for the check defaults stored in a measure file.
#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub checks: Option<Vec<String>>,
    /// Absolute tolerance replacing every calibrated one.
    pub tol: Option<f64>,
    pub refine: Option<u32>,
    /// Report path; `report.json` next to the measure file by default.
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct VerifyOutput {
    pub report: StatReport,
    pub path: PathBuf,
}

impl VerifyOutput {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            EXIT_PASS
        } else {
            EXIT_CHECK_FAILURE
        }
    }
}

/// Runs the selected checks on a stored measure and writes the report.
/// Check failures are not errors: the report is written and
/// [`VerifyOutput::exit_code`] is 1.
pub fn cmd_verify(measure_path: &Path, opts: &VerifyOptions) -> Result<VerifyOutput> {
    let loaded = read_measure(measure_path)?;
    let report = verify_measure(&loaded, opts)?;
    let path = opts
        .out
        .clone()
        .unwrap_or_else(|| measure_path.parent().unwrap_or(Path::new(".")).join("report.json"));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let mut text = report.to_json()?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(VerifyOutput { report, path })
}

/// Resolved settings of one verification.
struct Plan {
    checks: Vec<String>,
    tol: Option<f64>,
    refine: u32,
    cfg: CheckConfig,
}

impl Plan {
    fn new(loaded: &LoadedMeasure, opts: &VerifyOptions) -> Result<Self> {
        let cfg = loaded.checks.clone();
        let checks = opts.checks.clone().unwrap_or_else(|| cfg.list.clone());
        validate_check_list(&checks, "--checks").map_err(|e| match e {
            Error::Config { path, msg } => Error::Usage(format!("{path}: {msg}")),
            other => other,
        })?;
        let tol = opts.tol.or(cfg.tol);
        if let Some(t) = tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::Usage(format!("--tol must be a nonnegative number, got {t}")));
            }
        }
        let refine = opts.refine.unwrap_or(cfg.refine);
        if refine > 4 {
            return Err(Error::Usage(format!("--refine {refine} exceeds the supported 4 halvings")));
        }
        Ok(Plan { checks, tol, refine, cfg })
    }

    fn wants(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c == name)
    }

    fn needs_calibration(&self) -> bool {
        self.tol.is_none() && ["energy", "mean_energy", "carrier", "continuity"].iter().any(|c| self.wants(c))
    }
}

/// Re-integrations of the stored initial marginal at `dt / 2^l`,
/// `l = 0..=levels`. They calibrate tolerances independently of the stored
/// trajectories, which may have been altered after the fact.
struct Refinement {
    grids: Vec<TimeGrid>,
    ensembles: Vec<TrajectoryMeasure>,
}

impl Refinement {
    fn build(loaded: &LoadedMeasure, levels: u32) -> Result<Self> {
        let mu0 = loaded.rho.marginal(0);
        let mut grids = Vec::new();
        let mut ensembles = Vec::new();
        for l in 0..=levels {
            let grid = loaded.rho.grid().refined(l);
            let cfg = VFBuildConfig::new(grid, loaded.viscosity, loaded.forcing.clone()).with_scheme(loaded.scheme);
            ensembles.push(construct_vf_measure(&mu0, &cfg)?);
            grids.push(grid);
        }
        Ok(Refinement { grids, ensembles })
    }
}

/// Coarse nodes used for calibration; at most about 48 of them so that
/// the pair count stays small on long grids.
fn calibration_nodes(steps: usize) -> Vec<usize> {
    let stride = steps.div_ceil(48).max(1);
    (0..=steps).step_by(stride).collect()
}

fn pair_defects(ledger: &EnergyLedger, nodes: &[usize], factor: usize, out: &mut Vec<f64>) {
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            let (i, j) = (i * factor, j * factor);
            out.push(ledger.rhs(i, j) - ledger.lhs(i, j));
        }
    }
}

/// Step-halving calibration of every energy-type defect (`psi(r) = r` and
/// the configured ψ) over all atoms.
fn energy_calibration(
    loaded: &LoadedMeasure,
    refinement: &Refinement,
    psis: &[PsiFunction],
) -> Result<RichardsonCalibration> {
    let nodes = calibration_nodes(loaded.rho.grid().steps());
    let mut per_level = Vec::new();
    let mut scale = 0.0f64;
    for (l, rho) in refinement.ensembles.iter().enumerate().take(2) {
        let mut d = Vec::new();
        for traj in rho.atoms() {
            let profile = EnergyProfile::new(traj, loaded.viscosity, &loaded.forcing)?;
            for psi in std::iter::once(PsiFunction::Linear).chain(psis.iter().copied()) {
                let ledger = profile.ledger(psi);
                scale = scale.max(ledger.scale());
                pair_defects(&ledger, &nodes, 1 << l, &mut d);
            }
        }
        per_level.push(d);
    }
    let dt = refinement.grids[0].dt();
    Ok(RichardsonCalibration::from_pairs(dt, &per_level[0], &per_level[1], scale))
}

fn record_energy_convergence(loaded: &LoadedMeasure, refinement: &Refinement, report: &mut StatReport) -> Result<()> {
    let nodes = calibration_nodes(loaded.rho.grid().steps());
    for (l, rho) in refinement.ensembles.iter().enumerate() {
        let mut d = Vec::new();
        for traj in rho.atoms() {
            let ledger = EnergyProfile::new(traj, loaded.viscosity, &loaded.forcing)?.ledger(PsiFunction::Linear);
            pair_defects(&ledger, &nodes, 1 << l, &mut d);
        }
        let worst = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        report.push_convergence("energy", "max |energy identity defect|", refinement.grids[l].dt(), worst);
    }
    Ok(())
}

/// Dyadic sample times `t0 + H / 2^j` for continuity checks, `H` the
/// largest power-of-two number of steps not exceeding half the interval
/// (capped at 64 steps). All samples sit on even nodes, down to two steps.
pub fn continuity_times(grid: &TimeGrid) -> Result<Vec<f64>> {
    let half = grid.steps() / 2;
    if half < 8 {
        return Err(Error::Usage(format!(
            "continuity checks need at least 16 steps, the grid has {}",
            grid.steps()
        )));
    }
    let p = (usize::BITS - 1 - half.min(64).leading_zeros()) as usize;
    dyadic_times(grid, (1usize << p) as f64 * grid.dt(), p)
}

/// Resolution floor for continuity limits: ten times the largest
/// extrapolated limit of the re-integrated ensemble at `dt / 2`, whose
/// atoms are continuous by construction. What remains at that level is
/// quadrature and extrapolation error of the sampling, not a jump.
fn continuity_floor(refinement: &Refinement, psis: &[PsiFunction]) -> Result<f64> {
    let reference = &refinement.ensembles[1];
    let coarse = &refinement.grids[0];
    let samples = continuity_times(coarse)?;
    let mut worst = 0.0f64;
    for traj in reference.atoms() {
        worst = worst.max(strong_continuity_diagnostic(traj, &samples, 0.0)?.limit.abs());
    }
    let horizon = samples[0] - coarse.t0();
    for &psi in psis {
        worst = worst.max(initial_continuity(reference, psi, horizon, 0.0)?.limit.abs());
    }
    Ok(crate::checks::DEFAULT_SAFETY * worst)
}

fn liouville_rows(
    loaded: &LoadedMeasure,
    plan: &Plan,
    refinement: Option<&Refinement>,
    report: &mut StatReport,
) -> Result<()> {
    let rho = &loaded.rho;
    let max_norm = rho
        .atoms()
        .iter()
        .flat_map(|a| a.states().iter().map(|u| u.norm()))
        .fold(0.0f64, f64::max);
    let support = if max_norm > 0.0 { 2.0 * max_norm } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(plan.cfg.family_seed);
    let family = random_cylindrical_family(
        &loaded.lattice,
        plan.cfg.liouville_functions,
        plan.cfg.liouville_arity,
        support,
        &mut rng,
    )?;
    let stored = LiouvilleEvaluator::new(rho, loaded.viscosity, &loaded.forcing, loaded.scheme)?;
    let levels = match refinement {
        Some(r) => r
            .ensembles
            .iter()
            .map(|e| LiouvilleEvaluator::new(e, loaded.viscosity, &loaded.forcing, loaded.scheme))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let coarse: Vec<usize> = (0..rho.grid().len()).collect();
    for phi in &family {
        let series = stored.series(phi)?;
        let value = series.max_residual();
        let scale = series.expectation.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut by_level = Vec::with_capacity(levels.len());
        for (l, eval) in levels.iter().enumerate() {
            let nodes: Vec<usize> = coarse.iter().map(|i| i << l).collect();
            let r = eval.series(phi)?.max_residual_on(&nodes);
            report.push_convergence("liouville", phi.name(), refinement.expect("levels imply refinement").grids[l].dt(), r);
            by_level.push(r);
        }
        let tol = match plan.tol {
            Some(t) => t,
            None if by_level.len() >= 2 => {
                RichardsonCalibration::from_pairs(rho.grid().dt(), &by_level[..1], &by_level[1..2], scale.max(1.0)).tol()
            }
            None => {
                return Err(Error::Usage("the liouville check needs --tol or at least one refinement".into()));
            }
        };
        report.push(StatRow::scalar("liouville", phi.name(), value, tol));
        if by_level.len() >= 3 {
            // Second-order decay under halving, unless already at round-off.
            let floor = 1e-13 * scale.max(1.0);
            let ok = by_level.windows(2).all(|w| w[1] <= floor || w[0] / w[1] >= 3.5);
            report.push(StatRow::flag("liouville_order", phi.name(), ok));
        }
    }
    Ok(())
}

/// In-memory verification of a loaded measure.
pub fn verify_measure(loaded: &LoadedMeasure, opts: &VerifyOptions) -> Result<StatReport> {
    let plan = Plan::new(loaded, opts)?;
    let rho = &loaded.rho;
    let grid = rho.grid();
    let nu = loaded.viscosity;
    let f = &loaded.forcing;
    let lambda1 = loaded.lattice.lambda1();
    let psis = plan.cfg.psi.clone();
    let title = loaded
        .path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut report = StatReport::new(title);

    let ens = EnsembleEnergy::new(rho, nu, f)?;
    let times = grid.nodes();
    report.push_series("mean_energy", &times, &ens.mean_energies());
    report.push_series("mean_enstrophy", &times, &ens.mean_enstrophies());
    report.push_series("weighted_psi", &times[1..], &weighted_psi_series(rho)?[1..]);

    let wants_liouville = plan.wants("liouville");
    let refinement = if (plan.needs_calibration() || wants_liouville) && plan.refine >= 1 {
        Some(Refinement::build(loaded, plan.refine)?)
    } else {
        None
    };
    let tol = match (plan.tol, &refinement) {
        (Some(t), _) => Some(t),
        (None, Some(r)) if ["energy", "mean_energy", "carrier"].iter().any(|c| plan.wants(c)) => {
            record_energy_convergence(loaded, r, &mut report)?;
            Some(energy_calibration(loaded, r, &psis)?.tol())
        }
        _ => None,
    };
    let require_tol = |name: &str| {
        tol.ok_or_else(|| Error::Usage(format!("the {name} check needs --tol or at least one refinement")))
    };
    let wants_continuity = ["continuity", "carrier", "mean_energy"].iter().any(|c| plan.wants(c));
    let ctol = match (plan.tol, &refinement) {
        (Some(t), _) => t,
        (None, Some(r)) if wants_continuity => plan.cfg.continuity_tol.max(continuity_floor(r, &psis)?),
        _ => plan.cfg.continuity_tol,
    };
    let r0 = compute_r0(f, nu, lambda1);

    if plan.wants("energy") {
        let tol = require_tol("energy")?;
        for (j, traj) in rho.atoms().iter().enumerate() {
            let s = sweep_energy_checks(traj, nu, f, lambda1, &psis, tol)?;
            let label = format!("atom {j}");
            report.push(StatRow::from_sweep(&s.energy, &label));
            for (psi, summary) in &s.strengthened {
                report.push(StatRow::from_sweep(summary, &format!("{label}, {}", psi.label())));
            }
            report.push(StatRow::from_sweep(&s.apriori, &label));
            report.push(StatRow::from_sweep(&s.decay, &label));
        }
    }
    if plan.wants("ball") {
        for (j, traj) in rho.atoms().iter().enumerate() {
            let radius = r0.max(traj.initial().norm());
            let b = ball_invariance(traj, f, nu, lambda1, radius, plan.cfg.ball_slack)?;
            let mut row = StatRow::scalar("ball", &format!("atom {j}"), b.max_norm, radius * (1.0 + b.tol));
            row.passed = b.passed;
            report.push(row);
        }
    }
    if plan.wants("mean_energy") {
        let tol = require_tol("mean_energy")?;
        for &psi in &psis {
            report.push(StatRow::from_sweep(&ens.sweep(psi, tol), &psi.label()));
        }
        let linear = ens.ledger(PsiFunction::Linear);
        let nodes = calibration_nodes(grid.steps());
        if let Some(weak) = SweepSummary::collect(
            WEAK_MEAN_ENERGY_TAG,
            nodes.iter().skip(1).map(|&j| linear.report(WEAK_MEAN_ENERGY_TAG, 0, j, tol)),
        ) {
            report.push(StatRow::from_sweep(&weak, "from t0"));
        }
        let bound = mean_energy_bound(rho, nu, lambda1, f, tol)?;
        if let Some(s) = SweepSummary::collect(MEAN_BOUND_TAG, bound.into_iter()) {
            report.push(StatRow::from_sweep(&s, "all nodes"));
        }
        let horizon = continuity_times(grid)?[0] - grid.t0();
        for &psi in &psis {
            let ic = initial_continuity(rho, psi, horizon, ctol)?;
            report.push(StatRow::scalar("initial_continuity", &psi.label(), ic.limit.abs(), ctol));
        }
    }
    if plan.wants("continuity") {
        let samples = continuity_times(grid)?;
        for (j, traj) in rho.atoms().iter().enumerate() {
            let d = strong_continuity_diagnostic(traj, &samples, ctol)?;
            report.push(StatRow::scalar("continuity", &format!("atom {j}"), d.limit.abs(), ctol));
        }
    }
    if plan.wants("carrier") {
        let samples = continuity_times(grid)?;
        let bound_tol = match (plan.tol, &refinement) {
            (Some(t), _) => t,
            (None, Some(r)) => {
                let w0 = carrier_check(&r.ensembles[0], &samples, nu, f, ctol, 0.0)?;
                let w1 = carrier_check(&r.ensembles[1], &samples, nu, f, ctol, 0.0)?;
                let scale = w0.weighted_psi.iter().chain(&w0.bounds).fold(0.0f64, |m, x| m.max(x.abs()));
                RichardsonCalibration::from_pairs(grid.dt(), &w0.weighted_psi, &w1.weighted_psi, scale).tol()
            }
            (None, None) => require_tol("carrier")?,
        };
        let c = carrier_check(rho, &samples, nu, f, ctol, bound_tol)?;
        report.push_series("psi_samples", &c.times, &c.weighted_psi);
        for ((t, w), b) in c.times.iter().zip(&c.weighted_psi).zip(&c.bounds) {
            let r = crate::checks::InequalityReport::new("carrier_bound", grid.t0(), *t, *w, *b, bound_tol);
            report.push(StatRow::from_inequality(&r, "weighted psi"));
        }
        for a in &c.atoms {
            let label = if a.synthetic { format!("atom {} (synthetic)", a.atom) } else { format!("atom {}", a.atom) };
            report.push(StatRow::scalar("carrier", &label, a.limit.abs(), ctol));
        }
    }
    if plan.wants("localization") {
        let radius = r0.max(rho.marginal(0).max_norm());
        let samples = [grid.t0(), grid.node(grid.steps() / 2), grid.t1()];
        let loc = localization_check(rho, radius, &samples)?;
        report.push(StatRow::flag("localization", "carried by the ball on samples", loc.on_samples));
        report.push(StatRow::flag("localization", "samples agree with all nodes", loc.agree()));
    }
    if wants_liouville {
        liouville_rows(loaded, &plan, refinement.as_ref(), &mut report)?;
    }
    Ok(report)
}

/// Plot-data format requested from [`cmd_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Usage(format!("unknown report format `{other}`; expected csv or json"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesData {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
}

/// JSON plot data: series keyed by name, the residual-vs-dt table and
/// the check rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub title: String,
    pub series: BTreeMap<String, SeriesData>,
    pub convergence: Vec<ConvergencePoint>,
    pub rows: Vec<StatRow>,
}

impl PlotData {
    pub fn of(report: &StatReport) -> Self {
        let mut series: BTreeMap<String, SeriesData> = BTreeMap::new();
        for p in &report.series {
            let s = series.entry(p.series.clone()).or_insert_with(|| SeriesData {
                t: Vec::new(),
                value: Vec::new(),
            });
            s.t.push(p.t);
            s.value.push(p.value);
        }
        PlotData {
            title: report.title.clone(),
            series,
            convergence: report.convergence.clone(),
            rows: report.rows.clone(),
        }
    }
}

/// Converts a verification report into plot data. The output goes to
/// `out`, or next to the report as `<stem>.csv` / `<stem>.plot.json`.
pub fn cmd_report(report_path: &Path, format: &str, out: Option<&Path>) -> Result<PathBuf> {
    let format = ReportFormat::from_str(format)?;
    let bytes = read_file(report_path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Error::config(report_path.display().to_string(), "report is not valid UTF-8"))?;
    let report = StatReport::from_json(text)?;
    let target = match (out, format) {
        (Some(p), _) => p.to_path_buf(),
        (None, ReportFormat::Csv) => report_path.with_extension("csv"),
        (None, ReportFormat::Json) => report_path.with_extension("plot.json"),
    };
    let io_err = |e: std::io::Error| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", target.display())));
    match format {
        ReportFormat::Csv => {
            let file = fs::File::create(&target).map_err(io_err)?;
            report.write_csv(std::io::BufWriter::new(file))?;
        }
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(&PlotData::of(&report))?;
            text.push('\n');
            fs::write(&target, text).map_err(io_err)?;
        }
    }
    Ok(target)
}
