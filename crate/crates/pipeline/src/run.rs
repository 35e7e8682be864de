//! Subcommand bodies: ground state, single solve, δ sweep, diagnose, plot.

use crate::config::RunConfig;
use crate::fields::{write_atomic, FieldError, FieldFile, Manifest, ManifestEntry};
use crate::scaling::{ScalingReport, ScalingRow};
use crate::svg;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;
use vortex_spike::ground_state::{self, decay_constant, nondegeneracy_audit, GroundState};
use vortex_spike::nonlinearity::Nonlinearity;
use vortex_spike::strip::StripGrid;
use vortex_spike::wave::{diagnostics, Diagnostics, PhysicalParams, ProbeSummary, RootReport, StepRecord, WaveError, WaveProblem, WaveSolution};

/// Half-width of the figure window in physical x₁.
pub const FIGURE_HALF_WIDTH: f64 = 2.0;
const AUDIT_RADIUS: f64 = 16.0;
const AUDIT_STEP: f64 = 0.02;

/// A failed stage with whatever iteration history it left.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
    pub log: serde_json::Value,
}

impl StageError {
    pub fn new(stage: &str, message: impl ToString) -> Self {
        StageError { stage: stage.into(), message: message.to_string(), log: serde_json::Value::Null }
    }

    fn wave(stage: &str, e: WaveError) -> Self {
        let log = match &e {
            WaveError::Diverged { log, .. } | WaveError::NotConverged { log, .. } => serde_json::to_value(log).unwrap_or_default(),
            _ => serde_json::Value::Null,
        };
        StageError { stage: stage.into(), message: e.to_string(), log }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Input(String),
    #[error("stage {}: {}", .0.stage, .0.message)]
    Numerical(StageError),
    #[error(transparent)]
    Io(#[from] FieldError),
}

impl RunError {
    /// 1 for input errors, 2 for numerical failures and I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) => 1,
            _ => 2,
        }
    }

    pub fn stage(&self) -> StageError {
        match self {
            RunError::Input(m) => StageError::new("config", m),
            RunError::Numerical(s) => s.clone(),
            RunError::Io(e) => StageError::new("write", e),
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

pub fn shoot(cfg: &RunConfig) -> Result<GroundState, RunError> {
    ground_state::shoot(Nonlinearity::power_law(cfg.p), cfg.tolerances.shoot)
        .map_err(|e| RunError::Numerical(StageError::new("ground_state", e)))
}

pub fn problem(cfg: &RunConfig, gs: &GroundState, delta: f64) -> Result<WaveProblem, RunError> {
    let grid = cfg.grid.grid(delta).map_err(|e| RunError::Input(format!("grid at delta {delta}: {e}")))?;
    let params = PhysicalParams::new(cfg.g, cfg.alpha).map_err(|e| RunError::Input(e.to_string()))?;
    let mut pb = WaveProblem::new(gs.clone(), grid, params, cfg.rescale);
    pb.mixing = cfg.mixing;
    pb.solve_tol = cfg.tolerances.solve;
    pb.eigen_tol = cfg.tolerances.eigen;
    Ok(pb)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroundStateSummary {
    pub config_hash: String,
    pub p: u32,
    pub center_value: f64,
    pub lambda: f64,
    pub lambda_k1: f64,
    pub plateau_spread: f64,
    pub tail_coefficient: f64,
    pub r_match: f64,
    pub mass: f64,
    pub gradient_norm_sq: f64,
    pub max_ode_residual: f64,
}

/// Writes ground_state.csv, ground_state.json and audit.json under `out`.
pub fn cmd_ground_state(cfg: &RunConfig) -> Result<GroundStateSummary, RunError> {
    let hash = cfg.hash();
    let gs = shoot(cfg)?;
    let fit = decay_constant(&gs).map_err(|e| RunError::Numerical(StageError::new("decay_fit", e)))?;
    let summary = GroundStateSummary {
        config_hash: hash.clone(),
        p: cfg.p,
        center_value: gs.center_value,
        lambda: gs.lambda,
        lambda_k1: fit.lambda_k1,
        plateau_spread: fit.spread,
        tail_coefficient: gs.tail_coefficient,
        r_match: gs.r_match,
        mass: gs.mass(),
        gradient_norm_sq: gs.gradient_norm_sq(),
        max_ode_residual: gs.ode_residuals().into_iter().fold(0.0, f64::max),
    };
    let audit = nondegeneracy_audit(&gs, AUDIT_RADIUS, AUDIT_STEP);
    let csv = format!("# config_hash {hash}\n{}", gs.to_csv());
    write_atomic(&cfg.out.join("ground_state.csv"), csv.as_bytes())?;
    write_atomic(&cfg.out.join("ground_state.json"), &json_bytes(&summary))?;
    write_atomic(&cfg.out.join("audit.json"), &json_bytes(&serde_json::json!({ "config_hash": hash, "audit": audit })))?;
    Ok(summary)
}

/// One line of the threshold table.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Threshold {
    pub name: String,
    pub value: f64,
    /// "<", "<=" or ">" against `limit`.
    pub comparison: String,
    pub limit: f64,
    pub pass: bool,
}

impl Threshold {
    pub fn new(name: &str, value: f64, comparison: &str, limit: f64) -> Self {
        let pass = match comparison {
            "<" => value < limit,
            "<=" => value <= limit,
            ">" => value > limit,
            _ => false,
        };
        Threshold { name: name.into(), value, comparison: comparison.into(), limit, pass }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BracketRecord {
    pub left_tau: f64,
    pub right_tau: f64,
    pub left_b: f64,
    pub right_b: f64,
    pub left_b_tilde: f64,
    pub right_b_tilde: f64,
}

impl From<&(ProbeSummary, ProbeSummary)> for BracketRecord {
    fn from((l, r): &(ProbeSummary, ProbeSummary)) -> Self {
        BracketRecord {
            left_tau: l.tau,
            right_tau: r.tau,
            left_b: l.b,
            right_b: r.b,
            left_b_tilde: l.b_tilde,
            right_b_tilde: r.b_tilde,
        }
    }
}

impl BracketRecord {
    pub fn width(&self) -> f64 {
        self.right_tau - self.left_tau
    }

    pub fn b_changes_sign(&self) -> bool {
        self.left_b * self.right_b <= 0.0
    }

    pub fn b_tilde_changes_sign(&self) -> bool {
        self.left_b_tilde * self.right_b_tilde <= 0.0
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub tau: f64,
    pub b: f64,
    pub b_tilde: f64,
    pub top: f64,
    pub bottom: f64,
    pub l: f64,
    /// ‖ṽ‖ + (C/δ)‖Γ̃ₛ‖
    pub state_norm: f64,
    pub fixed_point_steps: usize,
}

impl From<&ProbeSummary> for ProbeRecord {
    fn from(p: &ProbeSummary) -> Self {
        ProbeRecord {
            tau: p.tau,
            b: p.b,
            b_tilde: p.b_tilde,
            top: p.top,
            bottom: p.bottom,
            l: p.l,
            state_norm: p.state_norm,
            fixed_point_steps: p.fixed_point_steps,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepLog {
    pub v_norm: f64,
    pub gamma_norm: f64,
    pub update: f64,
}

impl From<&StepRecord> for StepLog {
    fn from(s: &StepRecord) -> Self {
        StepLog { v_norm: s.v_norm, gamma_norm: s.gamma_norm, update: s.update }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub energy: f64,
    pub kinetic_energy: f64,
    pub gravitational_energy: f64,
    pub surface_energy: f64,
    pub kinetic_norm: f64,
    pub total_vorticity: f64,
    pub omega_l1: f64,
    pub omega_linf: f64,
    pub boundary_identity: f64,
    pub boundary_identity_relative: f64,
    pub pde_residual: f64,
    pub bernoulli_residual: f64,
    pub psi0_distance: f64,
    pub eta0_distance: f64,
    pub eta_min: f64,
    pub eta_center: f64,
    pub omega_center: f64,
    pub omega_negative_nodes: usize,
    pub omega_positive_nodes: usize,
    pub psi_interior_min: f64,
    pub psi_local_maxima: usize,
}

impl From<&Diagnostics> for DiagnosticsRecord {
    fn from(d: &Diagnostics) -> Self {
        DiagnosticsRecord {
            energy: d.energy,
            kinetic_energy: d.kinetic_energy,
            gravitational_energy: d.gravitational_energy,
            surface_energy: d.surface_energy,
            kinetic_norm: d.kinetic_norm,
            total_vorticity: d.total_vorticity,
            omega_l1: d.omega_l1,
            omega_linf: d.omega_linf,
            boundary_identity: d.boundary_identity,
            boundary_identity_relative: d.boundary_identity_relative,
            pde_residual: d.pde_residual,
            bernoulli_residual: d.bernoulli_residual,
            psi0_distance: d.psi0_distance,
            eta0_distance: d.eta0_distance,
            eta_min: d.eta_min,
            eta_center: d.eta_center,
            omega_center: d.omega_center,
            omega_negative_nodes: d.omega_negative_nodes,
            omega_positive_nodes: d.omega_positive_nodes,
            psi_interior_min: d.psi_interior_min,
            psi_local_maxima: d.psi_local_maxima,
        }
    }
}

/// Everything a solve reports, written as diagnostics.json.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveRecord {
    pub config_hash: String,
    pub delta: f64,
    pub grid: StripGrid,
    pub tau_star: f64,
    /// Eigenvalue at τ* and at τ = 0.
    pub l: f64,
    pub l_at_zero: f64,
    pub b: f64,
    pub b_tilde: f64,
    pub top: f64,
    pub bottom: f64,
    pub bracket: BracketRecord,
    /// The bisection bracket of width at most the coincidence tolerance.
    pub coincidence_bracket: BracketRecord,
    pub probes: Vec<ProbeRecord>,
    pub fixed_point_log: Vec<StepLog>,
    pub residual_perp: f64,
    pub residual_bernoulli: f64,
    /// |⟨ṽ, U₀⟩| / ‖ṽ‖
    pub deflation: f64,
    /// ‖F(τ = 0, ṽ = 0, Γₛ = 0)‖
    pub f0_norm: f64,
    pub sup_eta: f64,
    pub sup_eta0: f64,
    /// ½‖∇U‖² over the plane.
    pub reference_kinetic: f64,
    pub kinetic_relative: f64,
    pub diagnostics: DiagnosticsRecord,
    pub thresholds: Vec<Threshold>,
    pub all_green: bool,
}

/// Root search, assembly and diagnostics at `delta`.
pub fn solve_delta(cfg: &RunConfig, gs: &GroundState, delta: f64) -> Result<(SolveRecord, WaveSolution), RunError> {
    let pb = problem(cfg, gs, delta)?;
    let t = &cfg.tolerances;
    let root: RootReport = pb
        .find_tau_root(cfg.tau_hint, t.tau, t.fixed_point, cfg.max_fixed_point)
        .map_err(|e| RunError::Numerical(StageError::wave("root", e)))?;
    let sol = pb.assemble_solution(&root.root, cfg.levels).map_err(|e| RunError::Numerical(StageError::wave("assemble", e)))?;
    let d = diagnostics(&sol);
    let bg0 = pb.background(0.0).map_err(|e| RunError::Numerical(StageError::wave("forcing", e)))?;
    let f0 = pb
        .assemble_f(&bg0, &pb.grid.zeros(), &pb.zero_surface())
        .map_err(|e| RunError::Numerical(StageError::wave("forcing", e)))?;
    let state = &root.root.state;
    let u0 = &root.root.eig.u0;
    let deflation = state.v.dot(u0).abs() / (u0.norm() * state.v.norm()).max(f64::MIN_POSITIVE);
    let reference_kinetic = 0.5 * gs.gradient_norm_sq();
    let record = SolveRecord {
        config_hash: cfg.hash(),
        delta,
        grid: pb.grid,
        tau_star: root.tau_star,
        l: root.root.eig.l,
        l_at_zero: root.probes[0].l,
        b: root.root.b,
        b_tilde: root.root.b_tilde,
        top: root.root.top,
        bottom: root.root.bottom,
        bracket: BracketRecord::from(&root.bracket),
        coincidence_bracket: BracketRecord::from(root.bracket_at(t.coincidence)),
        probes: root.probes.iter().map(ProbeRecord::from).collect(),
        fixed_point_log: state.log.iter().map(StepLog::from).collect(),
        residual_perp: state.residual_perp,
        residual_bernoulli: state.residual_bernoulli,
        deflation,
        f0_norm: f0.norm(),
        sup_eta: sol.eta.max_abs(),
        sup_eta0: sol.eta0.max_abs(),
        reference_kinetic,
        kinetic_relative: (d.kinetic_energy - reference_kinetic).abs() / reference_kinetic,
        diagnostics: DiagnosticsRecord::from(&d),
        thresholds: Vec::new(),
        all_green: false,
    };
    let thresholds = thresholds(&record);
    let all_green = thresholds.iter().all(|t| t.pass);
    Ok((SolveRecord { thresholds, all_green, ..record }, sol))
}

/// Per-solution acceptance thresholds.
pub fn thresholds(r: &SolveRecord) -> Vec<Threshold> {
    let d = &r.diagnostics;
    let c = &r.coincidence_bracket;
    vec![
        Threshold::new("fixed_point_residual_perp", r.residual_perp, "<", 1e-9),
        Threshold::new("fixed_point_residual_bernoulli", r.residual_bernoulli, "<", 1e-9),
        Threshold::new("deflation", r.deflation, "<=", 1e-10),
        Threshold::new("root_abs_tau", r.tau_star.abs(), "<=", 0.15),
        Threshold::new("root_b_tilde_relative", r.b_tilde.abs() / (r.top.abs() + r.bottom.abs()), "<", 1e-10),
        Threshold::new("coincidence_b_sign_product", c.left_b.signum() * c.right_b.signum(), "<=", 0.0),
        Threshold::new("coincidence_b_tilde_sign_product", c.left_b_tilde.signum() * c.right_b_tilde.signum(), "<=", 0.0),
        Threshold::new("boundary_identity_relative", d.boundary_identity_relative, "<", 1e-6),
        Threshold::new("pde_residual", d.pde_residual, "<", 1e-7),
        Threshold::new("bernoulli_residual", d.bernoulli_residual, "<", 1e-7),
        Threshold::new("total_vorticity_relative", d.total_vorticity.abs() / d.omega_l1, "<", 1e-3),
        Threshold::new("kinetic_energy_relative", r.kinetic_relative, "<", 0.10),
        Threshold::new("eta_min", d.eta_min, "<", 0.0),
        Threshold::new("eta_center", d.eta_center, "<", 0.0),
        Threshold::new("omega_center", d.omega_center, "<", 0.0),
        Threshold::new("omega_negative_nodes", d.omega_negative_nodes as f64, ">", 0.0),
        Threshold::new("omega_positive_nodes", d.omega_positive_nodes as f64, ">", 0.0),
        Threshold::new("psi_local_maxima", d.psi_local_maxima as f64, ">", 0.0),
    ]
}

pub fn bundle_dir(out: &Path, delta: f64) -> PathBuf {
    out.join(format!("delta_{delta:.4}"))
}

/// Field files, manifest, diagnostics and figures of one solution.
pub fn write_bundle(dir: &Path, record: &SolveRecord, sol: &WaveSolution) -> Result<(), RunError> {
    let hash = &record.config_hash;
    let delta = record.delta;
    let grid = record.grid;
    let image_half = 0.5 * sol.eta.period();
    let mut files = Vec::new();
    let mut put = |name: &str, kind: &str, nx: usize, ny: usize, lx: f64, data: Vec<f64>, description: &str| -> Result<(), RunError> {
        FieldFile::new(nx, ny, lx, delta, hash, data).write(&dir.join(name))?;
        files.push(ManifestEntry { file: name.into(), kind: kind.into(), nx, ny, lx, description: description.into() });
        Ok(())
    };
    put("phi.bin", "strip", grid.nx, grid.ny, grid.lx, sol.phi.data.clone(), "phi = v + U - U_bc on the reference strip")?;
    put("v.bin", "strip", grid.nx, grid.ny, grid.lx, sol.state.v.data.clone(), "correction v on the reference strip")?;
    let gs = &sol.state.gamma_s;
    put("gamma_s.bin", "line", gs.len(), 1, 0.5 * gs.period(), gs.values.clone(), "surface trace of the conformal map")?;
    put("eta.bin", "line", sol.eta.len(), 1, image_half, sol.eta.values.clone(), "free surface elevation")?;
    put("eta0.bin", "line", sol.eta0.len(), 1, image_half, sol.eta0.values.clone(), "leading-order surface elevation")?;
    for (name, f, what) in [
        ("psi.bin", &sol.psi, "stream function"),
        ("omega.bin", &sol.omega, "vorticity"),
        ("psi0.bin", &sol.psi0, "leading-order stream function"),
    ] {
        put(name, "mapped", f.ncols(), f.levels + 1, image_half, f.values.clone(), what)?;
    }
    let manifest = Manifest { config_hash: hash.clone(), delta, files };
    write_atomic(&dir.join("manifest.json"), &json_bytes(&manifest))?;
    write_atomic(&dir.join("diagnostics.json"), &json_bytes(record))?;
    let x: Vec<f64> = (0..sol.eta.len()).map(|i| sol.eta.x(i)).collect();
    write_figures(dir, hash, &sol.psi, &sol.omega, &x, &sol.eta.values, &sol.eta0.values)
}

fn write_figures(
    dir: &Path,
    hash: &str,
    psi: &vortex_spike::wave::MappedField,
    omega: &vortex_spike::wave::MappedField,
    x: &[f64],
    eta: &[f64],
    eta0: &[f64],
) -> Result<(), RunError> {
    let half = FIGURE_HALF_WIDTH.min(x.last().copied().unwrap_or(FIGURE_HALF_WIDTH));
    write_atomic(&dir.join("streamlines.svg"), svg::streamlines(psi, half, hash).as_bytes())?;
    write_atomic(&dir.join("vorticity.svg"), svg::vorticity(omega, half, hash).as_bytes())?;
    write_atomic(&dir.join("surface.svg"), svg::surface(x, eta, eta0, half, hash).as_bytes())?;
    Ok(())
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<SolveRecord, RunError> {
    let gs = shoot(cfg)?;
    let (record, sol) = solve_delta(cfg, &gs, cfg.delta)?;
    write_bundle(&bundle_dir(&cfg.out, cfg.delta), &record, &sol)?;
    Ok(record)
}

/// Scaling rows from the surviving sweep points.
pub fn scaling_rows(records: &[SolveRecord]) -> Vec<ScalingRow> {
    let deltas: Vec<f64> = records.iter().map(|r| r.delta).collect();
    let col = |f: fn(&SolveRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
    vec![
        ScalingRow::new(
            "l(delta, tau = 0)",
            "l ~ delta^(1/2) exp(-2(1 - |tau|)/delta)",
            Some(0.5),
            deltas.clone(),
            col(|r| r.l_at_zero),
            -2.0,
            0.10,
            0.99,
        ),
        ScalingRow::new(
            "sup|eta|",
            "sup|eta| ~ delta^(-1/2) exp(-2/delta), prefactor from the squared wall trace of U",
            Some(-0.5),
            deltas.clone(),
            col(|r| r.sup_eta),
            -2.0,
            0.15,
            0.99,
        ),
        ScalingRow::new(
            "sup|eta| (free power)",
            "sup|eta| ~ delta^c1 exp(-2/delta)",
            None,
            deltas.clone(),
            col(|r| r.sup_eta),
            -2.0,
            0.15,
            0.99,
        ),
        ScalingRow::new(
            "||F(0, 0, 0)||",
            "||F|| ~ delta^c1 exp(-2(1 - |tau|)/delta)",
            None,
            deltas,
            col(|r| r.f0_norm),
            -2.0,
            0.15,
            0.99,
        ),
    ]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepOutput {
    pub report: ScalingReport,
    pub records: Vec<SolveRecord>,
}

/// Solves every δ of the list in a bounded pool, writes one bundle per
/// survivor and scaling.json.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepOutput, RunError> {
    let gs = shoot(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| RunError::Input(format!("thread pool: {e}")))?;
    let results: Vec<(f64, Result<(SolveRecord, WaveSolution), RunError>)> = pool.install(|| {
        use rayon::prelude::*;
        cfg.delta_list.par_iter().map(|&delta| (delta, solve_delta(cfg, &gs, delta))).collect()
    });
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (delta, res) in results {
        match res {
            Ok((record, sol)) => {
                write_bundle(&bundle_dir(&cfg.out, delta), &record, &sol)?;
                records.push(record);
            }
            Err(e @ RunError::Input(_)) => return Err(e),
            Err(e) => failures.push((delta, e.to_string())),
        }
    }
    let report = ScalingReport { config_hash: cfg.hash(), rows: scaling_rows(&records), failures };
    write_atomic(&cfg.out.join("scaling.json"), &json_bytes(&report))?;
    Ok(SweepOutput { report, records })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::Input(format!("{}: {e}", path.display())))
}

/// Checks the bundle's files against its manifest and re-evaluates the
/// threshold table from diagnostics.json.
pub fn cmd_diagnose(dir: &Path) -> Result<Vec<Threshold>, RunError> {
    let manifest: Manifest = read_json(&dir.join("manifest.json"))?;
    let record: SolveRecord = read_json(&dir.join("diagnostics.json"))?;
    if record.config_hash != manifest.config_hash {
        return Err(RunError::Input("diagnostics.json and manifest.json disagree on the config hash".into()));
    }
    for entry in &manifest.files {
        let f = read_field(&dir.join(&entry.file))?;
        if (f.nx, f.ny) != (entry.nx, entry.ny) || !manifest.config_hash.starts_with(&f.hash) {
            return Err(RunError::Input(format!("{} does not match the manifest", entry.file)));
        }
    }
    Ok(thresholds(&record))
}

/// Bundle files are user input: unreadable or corrupt ones are input errors.
fn read_field(path: &Path) -> Result<FieldFile, RunError> {
    FieldFile::read(path).map_err(|e| RunError::Input(e.to_string()))
}

fn mapped(dir: &Path, name: &str, top: &[f64]) -> Result<vortex_spike::wave::MappedField, RunError> {
    let f = read_field(&dir.join(name))?;
    let x1 = (0..f.nx).map(|i| -f.lx + i as f64 * 2.0 * f.lx / f.nx as f64).collect();
    Ok(vortex_spike::wave::MappedField { x1, top: top.to_vec(), levels: f.ny - 1, values: f.data })
}

/// Re-renders the three figures from the bundle's field files.
pub fn cmd_plot(dir: &Path) -> Result<(), RunError> {
    let manifest: Manifest = read_json(&dir.join("manifest.json"))?;
    let eta = read_field(&dir.join("eta.bin"))?;
    let eta0 = read_field(&dir.join("eta0.bin"))?;
    let top: Vec<f64> = eta.data.iter().map(|e| 1.0 + e).collect();
    let psi = mapped(dir, "psi.bin", &top)?;
    let omega = mapped(dir, "omega.bin", &top)?;
    write_figures(dir, &manifest.config_hash, &psi, &omega, &psi.x1.clone(), &eta.data, &eta0.data)
}
