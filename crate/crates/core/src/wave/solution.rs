//! Physical wave from the converged reduced state: conformal pushforward,
//! free surface, vorticity and diagnostics.

use super::bifurcation::TauProbe;
use super::{LocalInterp, PhysicalParams, WaveError, WaveProblem, WaveState};
use crate::ground_state::Quantity;
use crate::nonlinearity::Nonlinearity;
use crate::strip::{apply_separable, conformal_rows, symbol_table, ConformalRows, Field2D, FourierSeries, Scale, SurfaceField};
use serde::Serialize;

const MAP_TOL: f64 = 1e-15;
const MAP_MAX: usize = 200;

/// Values on a boundary-fitted physical grid: column i at x1[i], levels
/// k = 0..=levels from the bed x₂ = −1 to the surface x₂ = top[i].
#[derive(Clone, Debug, Serialize)]
pub struct MappedField {
    pub x1: Vec<f64>,
    pub top: Vec<f64>,
    pub levels: usize,
    /// values[k·ncols + i]
    pub values: Vec<f64>,
}

impl MappedField {
    pub fn ncols(&self) -> usize {
        self.x1.len()
    }

    pub fn x2(&self, i: usize, k: usize) -> f64 {
        -1.0 + k as f64 / self.levels as f64 * (self.top[i] + 1.0)
    }

    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.values[k * self.ncols() + i]
    }

    fn column_step(&self) -> f64 {
        self.x1[1] - self.x1[0]
    }

    /// Trapezoid in the level direction, uniform in x₁.
    pub fn integral_of(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = self.ncols();
        let mut total = 0.0;
        for i in 0..n {
            let h = (self.top[i] + 1.0) / self.levels as f64;
            let mut col = 0.0;
            for k in 0..=self.levels {
                let w = if k == 0 || k == self.levels { 0.5 } else { 1.0 };
                col += w * f(self.at(i, k));
            }
            total += col * h;
        }
        total * self.column_step()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> MappedField {
        MappedField { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
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

#[derive(Clone, Debug)]
pub struct WaveSolution {
    pub delta: f64,
    pub tau: f64,
    pub l: f64,
    pub b: f64,
    pub b_tilde: f64,
    pub params: PhysicalParams,
    pub nonlinearity: Nonlinearity,
    pub state: WaveState,
    /// φ = ṽ + U − U_bc on the strip grid.
    pub phi: Field2D,
    /// −Δφ on the strip grid.
    pub neg_laplacian_phi: Field2D,
    pub jacobian: Field2D,
    /// Γ on rows y = −1, interior rows, y = 1 of the reference strip.
    pub conformal: ConformalRows,
    /// mean of Γₛ: Γ₁ carries the non-periodic part (mean/2)·x₁.
    pub gamma_mean: f64,
    /// η on the uniform surface abscissae (spacing = image period / Nx).
    pub eta: SurfaceField,
    pub eta0: SurfaceField,
    /// |∇Ψ|² on the surface and the bed at the same abscissae.
    pub speed_sq_top: SurfaceField,
    pub speed_sq_bottom: SurfaceField,
    pub psi: MappedField,
    pub omega: MappedField,
    pub psi0: MappedField,
}

/// Solve x + Γ₁(x) = X by x ← X − Γ₁(x).
fn invert_line(target: f64, gamma1: impl Fn(f64) -> f64) -> Result<f64, WaveError> {
    let mut x = target;
    for _ in 0..MAP_MAX {
        let next = target - gamma1(x);
        let done = (next - x).abs() <= MAP_TOL * (1.0 + target.abs());
        x = next;
        if done {
            return Ok(x);
        }
    }
    Err(WaveError::MapInversion)
}

impl WaveProblem {
    /// Pushforward of the reduced solution at τ* to the physical domain,
    /// with `levels` + 1 grid levels per column.
    pub fn assemble_solution(&self, root: &TauProbe, levels: usize) -> Result<WaveSolution, WaveError> {
        let grid = self.grid;
        let delta = self.delta();
        let (nx, ny) = (grid.nx, grid.ny);
        let bg = &root.bg;
        let state = &root.state;
        let nl = self.gs.spec;
        let gamma_s = &state.gamma_s;
        let phi = self.phi(bg, &state.v);
        let laplace = symbol_table(&grid, |k, m| k * k + m * m);
        let mut neg_lap = apply_separable(&state.v.sub(&bg.lift.q), &laplace);
        neg_lap.axpy(1.0, &bg.lift.lq);
        neg_lap = neg_lap.sub(&bg.lift.q.zip_with(&bg.gamma_prime_u, |q, p| q * p));
        neg_lap.axpy(-1.0, &bg.gamma_u);
        neg_lap.axpy(1.0, &bg.u_bc);
        let jacobian = self.jacobian_field(gamma_s);

        let mut heights = vec![-1.0];
        heights.extend(self.row_heights());
        heights.push(1.0);
        let conformal = conformal_rows(gamma_s, &heights, true);
        let period = gamma_s.period();
        let gamma_mean = gamma_s.integral() / period;
        let stretch = 1.0 + 0.5 * gamma_mean;
        let image_period = period * stretch;
        let xs = SurfaceField::new(vec![0.0; nx], Scale::Physical, image_period / nx as f64);
        let targets: Vec<f64> = (0..nx).map(|i| xs.x(i)).collect();

        // surface and bed lines
        let top_g1 = FourierSeries::new(&conformal.gamma1[ny + 1]);
        let bot_g1 = FourierSeries::new(&conformal.gamma1[0]);
        let top_g2 = FourierSeries::new(gamma_s);
        let (t_top, t_bottom) = self.wall_traces(bg, &state.v);
        let speed = |t: &SurfaceField, r: usize| {
            let jac = conformal.jacobian(r);
            let values = t.values.iter().zip(&jac).map(|(t, j)| t * t / (delta * delta * j)).collect();
            FourierSeries::new(&SurfaceField::new(values, Scale::Physical, gamma_s.spacing))
        };
        let s_top = speed(&t_top, ny + 1);
        let s_bot = speed(&t_bottom, 0);
        let mut eta = Vec::with_capacity(nx);
        let mut sp_top = Vec::with_capacity(nx);
        let mut sp_bot = Vec::with_capacity(nx);
        for &x_phys in &targets {
            let x = invert_line(x_phys, |x| 0.5 * gamma_mean * x + top_g1.eval(x).0)?;
            eta.push(top_g2.eval(x).0);
            sp_top.push(s_top.eval(x).0);
            let xb = invert_line(x_phys, |x| 0.5 * gamma_mean * x + bot_g1.eval(x).0)?;
            sp_bot.push(s_bot.eval(xb).0);
        }
        let eta = SurfaceField { values: eta, ..xs.clone() }.even_projection();
        let speed_sq_top = SurfaceField { values: sp_top, ..xs.clone() }.even_projection();
        let speed_sq_bottom = SurfaceField { values: sp_bot, ..xs.clone() }.even_projection();
        let (eta0_ref, _) = self.eta0_leading(bg.tau);
        let eta0_series = FourierSeries::new(&eta0_ref);
        let eta0 = SurfaceField { values: targets.iter().map(|&x| eta0_series.eval(x).0).collect(), ..xs.clone() };

        // interior pushforward
        let rows = ny + 2;
        let hyp = delta * grid.hy;
        let x0p = -period / 2.0;
        let flat = |f: &Vec<SurfaceField>| f.iter().flat_map(|r| r.values.iter().copied()).collect::<Vec<f64>>();
        let g1 = LocalInterp::new(nx, rows, x0p, gamma_s.spacing, -1.0, hyp, flat(&conformal.gamma1));
        let g2 = LocalInterp::new(nx, rows, x0p, gamma_s.spacing, -1.0, hyp, flat(&conformal.gamma2));
        let shift = bg.tau / delta;
        let h = grid.half_width();
        let mut rest = Vec::with_capacity(nx * rows);
        for r in 0..rows {
            for i in 0..nx {
                rest.push(if r == 0 {
                    -self.gs.eval(grid.x1(i), -h, shift, Quantity::U)
                } else if r == rows - 1 {
                    -self.gs.eval(grid.x1(i), h, shift, Quantity::U)
                } else {
                    state.v.at(i, r - 1) - bg.u_bc.at(i, r - 1)
                });
            }
        }
        let rest = LocalInterp::new(nx, rows, -grid.lx, grid.hx, -h, grid.hy, rest);
        let top: Vec<f64> = eta.values.iter().map(|e| 1.0 + e).collect();
        let mut psi = MappedField { x1: targets.clone(), top: top.clone(), levels, values: vec![0.0; nx * (levels + 1)] };
        for k in 1..levels {
            for i in 0..nx {
                let (xp, yp) = (targets[i], psi.x2(i, k));
                let (mut y1, mut y2) = (xp, yp);
                let mut ok = false;
                for _ in 0..MAP_MAX {
                    let n1 = xp - 0.5 * gamma_mean * y1 - g1.eval(y1, y2);
                    let n2 = yp - g2.eval(y1, y2);
                    let d = (n1 - y1).abs() + (n2 - y2).abs();
                    y1 = n1;
                    y2 = n2;
                    if d <= 1e-14 {
                        ok = true;
                        break;
                    }
                }
                if !ok {
                    return Err(WaveError::MapInversion);
                }
                let (r1, r2) = (y1 / delta, y2 / delta);
                psi.values[k * nx + i] = rest.eval(r1, r2) + self.gs.eval(r1, r2, shift, Quantity::U);
            }
        }
        let omega = psi.map(|p| nl.gamma(p) / (delta * delta));
        let tau = bg.tau;
        let mut psi0 = psi.clone();
        for k in 0..=levels {
            for i in 0..nx {
                let (x1, x2) = (targets[i] / delta, psi.x2(i, k));
                let u = |y: f64| self.gs.eval(x1, y / delta, 0.0, Quantity::U);
                psi0.values[k * nx + i] = u(x2 - tau) - u(2.0 - x2 - tau) - u(-2.0 - x2 - tau);
            }
        }
        Ok(WaveSolution {
            delta,
            tau,
            l: root.eig.l,
            b: root.b,
            b_tilde: root.b_tilde,
            params: self.params,
            nonlinearity: nl,
            state: state.clone(),
            phi,
            neg_laplacian_phi: neg_lap,
            jacobian,
            conformal,
            gamma_mean,
            eta,
            eta0,
            speed_sq_top,
            speed_sq_bottom,
            psi,
            omega,
            psi0,
        })
    }
}

pub fn assemble_solution(problem: &WaveProblem, root: &TauProbe, levels: usize) -> Result<WaveSolution, WaveError> {
    problem.assemble_solution(root, levels)
}

fn local_maxima(f: &MappedField) -> usize {
    let n = f.ncols();
    let mut count = 0;
    for k in 1..f.levels {
        for i in 1..n - 1 {
            let c = f.at(i, k);
            let nbrs = [f.at(i - 1, k), f.at(i + 1, k), f.at(i, k - 1), f.at(i, k + 1)];
            if nbrs.iter().all(|&v| c > v) {
                count += 1;
            }
        }
    }
    count
}

pub fn diagnostics(sol: &WaveSolution) -> Diagnostics {
    let PhysicalParams { g, alpha } = sol.params;
    let delta = sol.delta;
    let phi = &sol.phi;
    let kinetic_energy = 0.5 * phi.dot(&sol.neg_laplacian_phi);
    let eta = &sol.eta;
    let d_eta = eta.derivative();
    let dd_eta = eta.second_derivative();
    let gravitational_energy = eta.values.iter().map(|e| 0.5 * g * e * e).sum::<f64>() * eta.spacing;
    let surface_energy =
        d_eta.values.iter().map(|d| alpha * alpha * ((1.0 + d * d).sqrt() - 1.0)).sum::<f64>() * eta.spacing;
    // vorticity in reference coordinates: ω dX = δ^{-2}γ(φ)|1 + Γ′|² δ² dx
    let nl_gamma: Vec<f64> = phi.data.iter().map(|&p| sol.nonlinearity.gamma(p)).collect();
    let cell = phi.grid.cell();
    let total_vorticity = nl_gamma.iter().zip(&sol.jacobian.data).map(|(w, j)| w * j).sum::<f64>() * cell;
    let omega_l1 = nl_gamma.iter().zip(&sol.jacobian.data).map(|(w, j)| w.abs() * j).sum::<f64>() * cell;
    let omega_linf = nl_gamma.iter().fold(0.0f64, |m, w| m.max(w.abs())) / (delta * delta);
    let kinetic_norm = (2.0 * kinetic_energy).sqrt();
    let boundary_identity = sol.speed_sq_top.integral() - sol.speed_sq_bottom.integral();
    // interior PDE: Δφ − |1 + Γ′|²γ(φ), with Δ(U − U_bc) = γ(U) − U_bc exactly
    let source: Vec<f64> = nl_gamma.iter().zip(&sol.jacobian.data).map(|(w, j)| w * j).collect();
    let res: Vec<f64> = sol.neg_laplacian_phi.data.iter().zip(&source).map(|(nl, s)| -nl - s).collect();
    let pde_residual = (crate::strip::dot(&res, &res) / crate::strip::dot(&source, &source)).sqrt();
    // Bernoulli on the physical surface, curvature from the graph
    let kappa: Vec<f64> = d_eta.values.iter().zip(&dd_eta.values).map(|(d, dd)| -dd / (1.0 + d * d).powf(1.5)).collect();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..eta.len() {
        let kin = 0.5 * sol.speed_sq_top.values[i];
        let grav = g * eta.values[i];
        let cap = alpha * alpha * kappa[i];
        worst = worst.max((kin + grav + cap).abs());
        scale = scale.max(kin.abs()).max(grav.abs()).max(cap.abs());
    }
    let psi_norm = sol.psi.integral_of(|p| p * p).sqrt();
    let mut diff = sol.psi.clone();
    for (d, p0) in diff.values.iter_mut().zip(&sol.psi0.values) {
        *d -= p0;
    }
    let psi0_distance = diff.integral_of(|p| p * p).sqrt() / psi_norm;
    let eta0_distance = eta.zip_with(&sol.eta0, |a, b| a - b).norm() / sol.eta0.norm();
    let n = eta.len();
    let mut psi_interior_min = f64::INFINITY;
    for k in 1..sol.psi.levels {
        for i in 0..sol.psi.ncols() {
            psi_interior_min = psi_interior_min.min(sol.psi.at(i, k));
        }
    }
    let centre_col = n / 2;
    let centre_level = (0..=sol.omega.levels)
        .min_by(|&a, &b| {
            let da = (sol.omega.x2(centre_col, a) - sol.tau).abs();
            let db = (sol.omega.x2(centre_col, b) - sol.tau).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    Diagnostics {
        energy: kinetic_energy + gravitational_energy + surface_energy,
        kinetic_energy,
        gravitational_energy,
        surface_energy,
        kinetic_norm,
        total_vorticity,
        omega_l1,
        omega_linf,
        boundary_identity,
        boundary_identity_relative: boundary_identity.abs() / (kinetic_norm * kinetic_norm),
        pde_residual,
        bernoulli_residual: worst / scale,
        psi0_distance,
        eta0_distance,
        eta_min: eta.values.iter().copied().fold(f64::INFINITY, f64::min),
        eta_center: eta.values[n / 2],
        omega_center: sol.omega.at(centre_col, centre_level),
        omega_negative_nodes: sol.omega.values.iter().filter(|&&w| w < 0.0).count(),
        omega_positive_nodes: sol.omega.values.iter().filter(|&&w| w > 0.0).count(),
        psi_interior_min,
        psi_local_maxima: local_maxima(&sol.psi),
    }
}

