//! Nonlinear layer: F, G and A(Γₛ), the reduced fixed point at fixed τ, the
//! bifurcation function and its root, and the assembled physical wave.

mod anderson;
mod bifurcation;
mod interp;
mod solution;

use anderson::Anderson;
pub use bifurcation::{find_tau_root, ProbeSummary, RootReport, TauProbe, TAU_EXPANSION_LIMIT};
pub use interp::LocalInterp;
pub use solution::{assemble_solution, diagnostics, Diagnostics, MappedField, WaveSolution};

use crate::elliptic::{self, EigenError, EigenPair, EllipticOperator, SolveError, WallLift};
use crate::ground_state::{GroundState, Quantity};
use crate::nonlinearity::Nonlinearity;
use crate::strip::{
    apply_bc, bc_normal_derivatives, conformal_rows, dn_map, exp_kernel_convolve, helmholtz_inverse_surface, Field2D,
    Scale, StripGrid, SurfaceField,
};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Amplitude threshold on |Γ′| at the surface for A(Γₛ) and the conformal map.
pub const AMPLITUDE_LIMIT: f64 = 0.6;
const A_INVERSE_TOL: f64 = 1e-10;
/// Relative MINRES tolerance of the inner solves.
pub const DEFAULT_SOLVE_TOL: f64 = 1e-11;
/// Relative eigen-residual for the eigenpair at each τ.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-11;
pub const DEFAULT_MIXING: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub g: f64,
    pub alpha: f64,
}

impl PhysicalParams {
    pub fn new(g: f64, alpha: f64) -> Result<Self, WaveError> {
        if g > 0.0 && alpha > 0.0 {
            Ok(PhysicalParams { g, alpha })
        } else {
            Err(WaveError::Params { g, alpha })
        }
    }
}

#[derive(Debug, Error)]
pub enum WaveError {
    #[error("g and alpha must be positive (g = {g}, alpha = {alpha})")]
    Params { g: f64, alpha: f64 },
    #[error("|tau| = {0} exceeds 1/3")]
    TauRange(f64),
    #[error("surface amplitude {0:.3e} above the limit")]
    Amplitude(f64),
    #[error("A(gamma_s) solve failed (relative residual {0:.3e})")]
    AInverse(f64),
    #[error("fixed point diverged at step {step}")]
    Diverged { step: usize, log: Vec<StepRecord> },
    #[error("fixed point not converged in {steps} steps")]
    NotConverged { steps: usize, log: Vec<StepRecord> },
    #[error("no sign change of the boundary bifurcation function up to |tau| = {0}")]
    NoSignChange(f64),
    #[error("map inversion did not contract")]
    MapInversion,
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Everything that defines the reduced problem at a given δ.
#[derive(Clone, Debug)]
pub struct WaveProblem {
    pub gs: GroundState,
    pub grid: StripGrid,
    pub params: PhysicalParams,
    /// Γ̌ₛ = (C/δ)Γₛ weighting in the fixed-point norm.
    pub rescale: f64,
    /// When false, Γₛ ≡ 0 and G is not evaluated (rigid-lid comparison).
    pub free_surface: bool,
    /// Anderson depth of the fixed point (0: plain iteration).
    pub mixing: usize,
    pub solve_tol: f64,
    pub eigen_tol: f64,
}

/// τ-dependent data of the spike ansatz on the strip grid.
#[derive(Clone, Debug)]
pub struct Background {
    pub tau: f64,
    pub u: Field2D,
    pub gamma_u: Field2D,
    pub gamma_prime_u: Field2D,
    pub u_bc: Field2D,
    /// ∂₂U − ∂₂U_bc on the top and bottom walls (rescaled line).
    pub trace_top: SurfaceField,
    pub trace_bottom: SurfaceField,
    /// Carries the wall curvature of ṽ: on the walls φ = 0, so F = U − γ(U)
    /// there whatever ṽ and Γₛ are, and ∂₂²ṽ = F.
    pub lift: WallLift,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub v_norm: f64,
    pub gamma_norm: f64,
    pub update: f64,
}

#[derive(Clone, Debug)]
pub struct WaveState {
    pub tau: f64,
    pub v: Field2D,
    /// Physical scale.
    pub gamma_s: SurfaceField,
    pub log: Vec<StepRecord>,
    pub residual_perp: f64,
    pub residual_bernoulli: f64,
}

/// Surface quantities of Γₛ needed by G and A(Γₛ).
struct SurfaceGeometry {
    /// 1 + m(D)Γₛ
    stretch: SurfaceField,
    slope: SurfaceField,
    /// (1 + m(D)Γₛ)² + Γₛ′²
    metric: SurfaceField,
}

impl SurfaceGeometry {
    fn new(gamma_s: &SurfaceField) -> Self {
        let stretch = dn_map(gamma_s).map(|v| 1.0 + v);
        let slope = gamma_s.derivative();
        let metric = stretch.zip_with(&slope, |a, b| a * a + b * b);
        SurfaceGeometry { stretch, slope, metric }
    }
}

impl WaveProblem {
    pub fn new(gs: GroundState, grid: StripGrid, params: PhysicalParams, rescale: f64) -> Self {
        WaveProblem {
            gs,
            grid,
            params,
            rescale,
            free_surface: true,
            mixing: DEFAULT_MIXING,
            solve_tol: DEFAULT_SOLVE_TOL,
            eigen_tol: DEFAULT_EIGEN_TOL,
        }
    }

    pub fn delta(&self) -> f64 {
        self.grid.delta
    }

    fn nonlinearity(&self) -> Nonlinearity {
        self.gs.spec
    }

    pub fn zero_surface(&self) -> SurfaceField {
        SurfaceField::new(vec![0.0; self.grid.nx], Scale::Physical, self.grid.line_spacing(Scale::Physical))
    }

    /// Interior heights y = δx₂ of the grid rows on the reference strip.
    pub fn row_heights(&self) -> Vec<f64> {
        (0..self.grid.ny).map(|j| self.delta() * self.grid.x2(j)).collect()
    }

    pub fn background(&self, tau: f64) -> Result<Background, WaveError> {
        if tau.abs() > 1.0 / 3.0 {
            return Err(WaveError::TauRange(tau.abs()));
        }
        let g = &self.grid;
        let nl = self.nonlinearity();
        let u = elliptic::sample_field(&self.gs, g, tau, Quantity::U);
        let (u_top, u_bottom) = elliptic::wall_traces(&self.gs, g, tau, Quantity::U);
        let u_bc = apply_bc(&u_top, &u_bottom, g);
        let (d_top, d_bottom) = elliptic::wall_traces(&self.gs, g, tau, Quantity::D2U);
        let (bc_top, bc_bottom) = bc_normal_derivatives(&u_top, &u_bottom, g);
        let gamma_prime_u = u.map(|x| nl.gamma_prime(x));
        let wall_f = |t: &SurfaceField| t.map(|x| x - nl.gamma(x));
        let lift = elliptic::with_potential(g, gamma_prime_u.clone(), tau).wall_lift(&wall_f(&u_top), &wall_f(&u_bottom));
        Ok(Background {
            tau,
            gamma_u: u.map(|x| nl.gamma(x)),
            gamma_prime_u,
            u,
            u_bc,
            trace_top: d_top.zip_with(&bc_top, |a, b| a - b),
            trace_bottom: d_bottom.zip_with(&bc_bottom, |a, b| a - b),
            lift,
        })
    }

    pub fn operator(&self, bg: &Background) -> EllipticOperator {
        elliptic::with_potential(&self.grid, bg.gamma_prime_u.clone(), bg.tau)
    }

    fn check_amplitude(&self, gamma_s: &SurfaceField) -> Result<(), WaveError> {
        let geo = SurfaceGeometry::new(gamma_s);
        let amp = geo.stretch.values.iter().zip(&geo.slope.values).fold(0.0f64, |m, (a, b)| m.max((a - 1.0).abs()).max(b.abs()));
        if amp < AMPLITUDE_LIMIT {
            Ok(())
        } else {
            Err(WaveError::Amplitude(amp))
        }
    }

    /// |1 + Γ′(δx)|² on the strip grid.
    pub fn jacobian_field(&self, gamma_s: &SurfaceField) -> Field2D {
        let rows = conformal_rows(gamma_s, &self.row_heights(), false);
        let mut data = Vec::with_capacity(self.grid.len());
        for r in 0..self.grid.ny {
            data.extend(rows.jacobian(r));
        }
        let mut f = Field2D { grid: self.grid, data };
        f.even_projection();
        f
    }

    /// φ = v + U − U_bc.
    pub fn phi(&self, bg: &Background, v: &Field2D) -> Field2D {
        let mut phi = v.add(&bg.u);
        phi.axpy(-1.0, &bg.u_bc);
        phi
    }

    /// F = |1 + Γ′(δ·)|²γ(φ) − γ(U) − γ′(U)v + U_bc.
    pub fn assemble_f(&self, bg: &Background, v: &Field2D, gamma_s: &SurfaceField) -> Result<Field2D, WaveError> {
        self.check_amplitude(gamma_s)?;
        let nl = self.nonlinearity();
        let phi = self.phi(bg, v);
        let jac = if gamma_s.max_abs() == 0.0 { None } else { Some(self.jacobian_field(gamma_s)) };
        let data = (0..self.grid.len())
            .map(|n| {
                let j = jac.as_ref().map_or(1.0, |f| f.data[n]);
                j * nl.gamma(phi.data[n]) - bg.gamma_u.data[n] - bg.gamma_prime_u.data[n] * v.data[n] + bg.u_bc.data[n]
            })
            .collect();
        let mut f = Field2D { grid: self.grid, data };
        f.even_projection();
        Ok(f)
    }

    /// ∂₂φ on the walls, rescaled line: spectral trace of v − q plus the
    /// closed forms for q, U and U_bc.
    pub fn wall_traces(&self, bg: &Background, v: &Field2D) -> (SurfaceField, SurfaceField) {
        let (mut vt, mut vb) = v.sub(&bg.lift.q).wall_normal_derivatives();
        vt.iter_mut().zip(&bg.lift.trace_top).for_each(|(a, b)| *a += b);
        vb.iter_mut().zip(&bg.lift.trace_bottom).for_each(|(a, b)| *a += b);
        let top = bg.trace_top.zip_with(&SurfaceField::new(vt, Scale::Rescaled, self.grid.hx), |a, b| a + b);
        let bottom = bg.trace_bottom.zip_with(&SurfaceField::new(vb, Scale::Rescaled, self.grid.hx), |a, b| a + b);
        (top.even_projection(), bottom.even_projection())
    }

    /// A(Γₛ)w = (g − α²Q^{-3/2}((1 + mΓₛ)D² − Γₛ′ m(D)D))(g − α²D²)^{-1}w.
    pub fn apply_a(&self, gamma_s: &SurfaceField, w: &SurfaceField) -> SurfaceField {
        let geo = SurfaceGeometry::new(gamma_s);
        self.apply_a_with(&geo, w)
    }

    fn apply_a_with(&self, geo: &SurfaceGeometry, w: &SurfaceField) -> SurfaceField {
        self.apply_a_raw(geo, w).even_projection()
    }

    fn apply_a_raw(&self, geo: &SurfaceGeometry, w: &SurfaceField) -> SurfaceField {
        let PhysicalParams { g, alpha } = self.params;
        let h = helmholtz_inverse_surface(w, g, alpha);
        let hxx = h.second_derivative();
        let mdh = dn_map(&h.derivative());
        let values = (0..w.len())
            .map(|i| {
                let q = geo.metric.values[i];
                g * h.values[i]
                    - alpha * alpha * q.powf(-1.5) * (geo.stretch.values[i] * hxx.values[i] - geo.slope.values[i] * mdh.values[i])
            })
            .collect();
        SurfaceField { values, ..w.clone() }
    }

    /// Solve A(Γₛ)w = rhs by dense LU on the surface line, column by column
    /// from A applied to unit vectors, plus one step of iterative refinement.
    pub fn apply_a_inverse(&self, gamma_s: &SurfaceField, rhs: &SurfaceField) -> Result<SurfaceField, WaveError> {
        if gamma_s.max_abs() == 0.0 {
            return Ok(rhs.clone());
        }
        self.check_amplitude(gamma_s)?;
        let geo = SurfaceGeometry::new(gamma_s);
        let n = rhs.len();
        let columns: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|c| {
                let mut unit = rhs.zeros_like();
                unit.values[c] = 1.0;
                self.apply_a_raw(&geo, &unit).values
            })
            .collect();
        let matrix = DMatrix::from_fn(n, n, |r, c| columns[c][r]);
        let lu = matrix.clone().lu();
        let solve = |b: &[f64]| lu.solve(&DVector::from_column_slice(b)).map(|x| x.as_slice().to_vec());
        let scale = rhs.norm().max(f64::MIN_POSITIVE);
        let mut w = SurfaceField { values: solve(&rhs.values).ok_or(WaveError::AInverse(f64::INFINITY))?, ..rhs.clone() };
        let residual = rhs.zip_with(&self.apply_a_raw(&geo, &w), |a, b| a - b);
        let correction = solve(&residual.values).ok_or(WaveError::AInverse(f64::INFINITY))?;
        for (x, d) in w.values.iter_mut().zip(correction) {
            *x += d;
        }
        let w = w.even_projection();
        let left = rhs.zip_with(&self.apply_a_with(&geo, &w), |a, b| a - b).norm() / scale;
        if left > A_INVERSE_TOL {
            return Err(WaveError::AInverse(left));
        }
        Ok(w)
    }

    /// G = (1/2δ²)A(Γₛ)^{-1}[(∂₂φ(·/δ, 1/δ))²/((1 + mΓₛ)² + Γₛ′²)], physical line.
    pub fn assemble_g(&self, bg: &Background, v: &Field2D, gamma_s: &SurfaceField) -> Result<SurfaceField, WaveError> {
        let (top, _) = self.wall_traces(bg, v);
        self.assemble_g_from_trace(&top, gamma_s)
    }

    fn assemble_g_from_trace(&self, top: &SurfaceField, gamma_s: &SurfaceField) -> Result<SurfaceField, WaveError> {
        let geo = SurfaceGeometry::new(gamma_s);
        let delta = self.delta();
        let values = top.values.iter().zip(&geo.metric.values).map(|(t, q)| t * t / q).collect();
        let rhs = SurfaceField::new(values, Scale::Physical, self.grid.line_spacing(Scale::Physical));
        Ok(self.apply_a_inverse(gamma_s, &rhs)?.map(|x| x / (2.0 * delta * delta)))
    }

    /// ‖v‖ + (C/δ)‖Γₛ‖
    pub fn surface_norm(&self, v: &Field2D, gamma_s: &SurfaceField) -> f64 {
        v.norm() + self.rescale / self.delta() * gamma_s.norm()
    }

    /// Residuals of Lv + (I − P₀)F = 0 and (g − α²D²)Γₛ + G = 0, each relative
    /// to the norm of its forcing term.
    pub fn residuals(
        &self,
        op: &EllipticOperator,
        bg: &Background,
        eig: &EigenPair,
        v: &Field2D,
        gamma_s: &SurfaceField,
    ) -> Result<(f64, f64), WaveError> {
        let f = self.assemble_f(bg, v, gamma_s)?;
        let mut pf = f.clone();
        pf.axpy(-f.dot(&eig.u0), &eig.u0);
        let r1 = op.apply_lifted(v, &bg.lift).expect("same grid").add(&pf).norm() / pf.norm().max(f64::MIN_POSITIVE);
        if !self.free_surface {
            return Ok((r1, 0.0));
        }
        let gf = self.assemble_g(bg, v, gamma_s)?;
        let PhysicalParams { g, alpha } = self.params;
        let lin = gamma_s.zip_with(&gamma_s.second_derivative(), |a, b| g * a - alpha * alpha * b);
        let r2 = lin.zip_with(&gf, |a, b| a + b).norm() / gf.norm().max(f64::MIN_POSITIVE);
        Ok((r1, r2))
    }

    /// Fixed point of v ← −L₁^{-1}(I − P₀)F, Γₛ ← −(g − α²D²)^{-1}G at fixed τ,
    /// from `start` (or zero). Stops when the relative Picard update in the
    /// norm ‖v‖ + (C/δ)‖Γₛ‖ falls below `tol`. With `mixing` > 0 the
    /// iterates are Anderson-mixed over that many previous steps.
    pub fn ls_fixed_point(
        &self,
        op: &EllipticOperator,
        bg: &Background,
        eig: &EigenPair,
        start: Option<(&Field2D, &SurfaceField)>,
        tol: f64,
        max_iter: usize,
    ) -> Result<WaveState, WaveError> {
        let PhysicalParams { g, alpha } = self.params;
        let (mut v, mut gamma_s) = match start {
            Some((v0, g0)) => {
                let mut v0 = v0.clone();
                v0.axpy(-v0.dot(&eig.u0), &eig.u0);
                (v0, if self.free_surface { g0.clone() } else { self.zero_surface() })
            }
            None => (self.grid.zeros(), self.zero_surface()),
        };
        let mut mixer = Anderson::new(self.mixing);
        let wv = self.grid.cell().sqrt();
        let wg = self.rescale / self.delta() * gamma_s.spacing.sqrt();
        let nv = self.grid.len();
        let pack = |v: &Field2D, gs: &SurfaceField| -> Vec<f64> {
            v.data.iter().map(|x| x * wv).chain(gs.values.iter().map(|x| x * wg)).collect()
        };
        let mut log = Vec::new();
        let mut growth = 0;
        // ṽ = (I − P₀)q − x with (I − P₀)L(I − P₀)x = (I − P₀)(F + Lq)
        let mut q_perp = bg.lift.q.clone();
        q_perp.axpy(-q_perp.dot(&eig.u0) / eig.u0.dot(&eig.u0), &eig.u0);
        for step in 1..=max_iter {
            let f = self.assemble_f(bg, &v, &gamma_s)?.add(&bg.lift.lq);
            let (sol, _) = op.solve_projected_from(&f, &eig.u0, Some(&q_perp.sub(&v)), self.solve_tol)?;
            let v_next = q_perp.sub(&sol);
            let gamma_next = if self.free_surface {
                helmholtz_inverse_surface(&self.assemble_g(bg, &v, &gamma_s)?, g, alpha).map(|x| -x)
            } else {
                self.zero_surface()
            };
            let update = self.surface_norm(&v_next.sub(&v), &gamma_next.zip_with(&gamma_s, |a, b| a - b))
                / self.surface_norm(&v_next, &gamma_next).max(f64::MIN_POSITIVE);
            log.push(StepRecord { v_norm: v_next.norm(), gamma_norm: gamma_next.norm(), update });
            if log.len() >= 2 && update > log[log.len() - 2].update {
                growth += 1;
            } else {
                growth = 0;
            }
            if growth >= 5 || !update.is_finite() {
                return Err(WaveError::Diverged { step, log });
            }
            if update < tol {
                let (r1, r2) = self.residuals(op, bg, eig, &v_next, &gamma_next)?;
                return Ok(WaveState {
                    tau: bg.tau,
                    v: v_next,
                    gamma_s: gamma_next,
                    log,
                    residual_perp: r1,
                    residual_bernoulli: r2,
                });
            }
            let mixed = mixer.next(pack(&v, &gamma_s), pack(&v_next, &gamma_next));
            v = Field2D { grid: self.grid, data: mixed[..nv].iter().map(|x| x / wv).collect() };
            gamma_s = SurfaceField { values: mixed[nv..].iter().map(|x| x / wg).collect(), ..gamma_next };
        }
        Err(WaveError::NotConverged { steps: max_iter, log })
    }

    /// η₀ = −2δ^{-2}(g − α²D²)^{-1}((∂₂U(·/δ, 1/δ))²) for U centred at
    /// (0, τ/δ): multiplier route and exponential-kernel route.
    pub fn eta0_leading(&self, tau: f64) -> (SurfaceField, SurfaceField) {
        let delta = self.delta();
        let (top, _) = elliptic::wall_traces(&self.gs, &self.grid, tau, Quantity::D2U);
        let sq = SurfaceField::new(
            top.values.iter().map(|t| t * t).collect(),
            Scale::Physical,
            self.grid.line_spacing(Scale::Physical),
        );
        let c = -2.0 / (delta * delta);
        let PhysicalParams { g, alpha } = self.params;
        let by_multiplier = helmholtz_inverse_surface(&sq, g, alpha).map(|x| c * x);
        let by_kernel = exp_kernel_convolve(&sq, g, alpha).map(|x| c * x);
        (by_multiplier, by_kernel)
    }
}
