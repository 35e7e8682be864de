//! L_τ = −Δ + γ′(U(τ)) on S_δ with Dirichlet walls, even in x₁: Fourier
//! collocation in x₁, sine collocation in x₂.

mod eigen;
pub mod krylov;

pub use eigen::{eigen_contraction, eigenpair, spectral_scaling_table, EigenError, EigenPair, ScalingRow};
pub use krylov::{SolveError, SolveStats};

use crate::ground_state::{GroundState, Quantity};
use crate::strip::{apply_bc, apply_separable, symbol_table, Field2D, GridError, Scale, StripGrid, SurfaceField};
use rayon::prelude::*;

pub const MAX_KRYLOV: usize = 600;
/// Weight of the deflated direction in projected solves.
const DEFLATION_SHIFT: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct EllipticOperator {
    pub grid: StripGrid,
    pub potential: Field2D,
    pub tau: f64,
    laplacian: Vec<f64>,
    preconditioner: Vec<f64>,
}

/// Sample a ground-state quantity on the grid nodes, center (0, τ/δ).
pub fn sample_field(gs: &GroundState, grid: &StripGrid, tau: f64, what: Quantity) -> Field2D {
    let shift = tau / grid.delta;
    let mut f = grid.from_fn(|x1, x2| gs.eval(x1, x2, shift, what));
    f.even_projection();
    f
}

/// Ground-state quantity on the walls x₂ = ±1/δ: (top, bottom).
pub fn wall_traces(gs: &GroundState, grid: &StripGrid, tau: f64, what: Quantity) -> (SurfaceField, SurfaceField) {
    let shift = tau / grid.delta;
    let h = grid.half_width();
    (
        grid.line(Scale::Rescaled, |x| gs.eval(x, h, shift, what)),
        grid.line(Scale::Rescaled, |x| gs.eval(x, -h, shift, what)),
    )
}

pub fn build(grid: &StripGrid, gs: &GroundState, tau: f64) -> EllipticOperator {
    assert!(tau.abs() <= 1.0 / 3.0, "|tau| must not exceed 1/3");
    let potential = sample_field(gs, grid, tau, Quantity::GammaPrimeU);
    with_potential(grid, potential, tau)
}

pub fn with_potential(grid: &StripGrid, potential: Field2D, tau: f64) -> EllipticOperator {
    EllipticOperator {
        grid: *grid,
        potential,
        tau,
        laplacian: symbol_table(grid, |k, m| k * k + m * m),
        preconditioner: symbol_table(grid, |k, m| 1.0 / (1.0 + k * k + m * m)),
    }
}

impl EllipticOperator {
    fn check(&self, u: &Field2D) -> Result<(), GridError> {
        if u.grid != self.grid {
            Err(GridError::Mismatch)
        } else {
            Ok(())
        }
    }

    fn apply_raw(&self, u: &[f64]) -> Vec<f64> {
        let f = Field2D { grid: self.grid, data: u.to_vec() };
        let mut out = apply_separable(&f, &self.laplacian).data;
        out.par_iter_mut().zip(self.potential.data.par_iter().zip(u.par_iter())).for_each(|(o, (p, v))| *o += p * v);
        out
    }

    fn precondition_raw(&self, r: &[f64]) -> Vec<f64> {
        let f = Field2D { grid: self.grid, data: r.to_vec() };
        apply_separable(&f, &self.preconditioner).data
    }

    pub fn apply(&self, u: &Field2D) -> Result<Field2D, GridError> {
        self.check(u)?;
        Ok(Field2D { grid: self.grid, data: self.apply_raw(&u.data) })
    }

    /// (1 − Δ)^{-1} r.
    pub fn precondition(&self, r: &Field2D) -> Field2D {
        Field2D { grid: self.grid, data: self.precondition_raw(&r.data) }
    }

    pub fn solve(&self, f: &Field2D, tol: f64) -> Result<(Field2D, SolveStats), SolveError> {
        self.solve_from(f, None, tol)
    }

    pub fn solve_from(&self, f: &Field2D, x0: Option<&Field2D>, tol: f64) -> Result<(Field2D, SolveStats), SolveError> {
        let (x, st) = krylov::minres(
            |u| self.apply_raw(u),
            |r| self.precondition_raw(r),
            &f.data,
            x0.map(|v| v.data.clone()),
            tol,
            MAX_KRYLOV,
        )?;
        Ok((Field2D { grid: self.grid, data: x }, st))
    }

    /// Solve (I − P)L(I − P)u = (I − P)f on dir^⊥, P the L²-orthogonal
    /// projection onto `dir`; the returned u is orthogonal to dir.
    pub fn solve_projected(&self, f: &Field2D, dir: &Field2D, tol: f64) -> Result<(Field2D, SolveStats), SolveError> {
        self.solve_projected_from(f, dir, None, tol)
    }

    pub fn solve_projected_from(
        &self,
        f: &Field2D,
        dir: &Field2D,
        x0: Option<&Field2D>,
        tol: f64,
    ) -> Result<(Field2D, SolveStats), SolveError> {
        let cell = self.grid.cell();
        let dn2 = dir.dot(dir);
        let d = &dir.data;
        let project = |u: &[f64]| -> Vec<f64> {
            let c = crate::strip::dot(u, d) * cell / dn2;
            u.iter().zip(d).map(|(ui, di)| ui - c * di).collect()
        };
        let op = |u: &[f64]| -> Vec<f64> {
            let c = crate::strip::dot(u, d) * cell / dn2;
            let pu: Vec<f64> = u.iter().zip(d).map(|(ui, di)| ui - c * di).collect();
            let lpu = project(&self.apply_raw(&pu));
            lpu.iter().zip(d).map(|(l, di)| l + DEFLATION_SHIFT * c * di).collect()
        };
        let rhs = project(&f.data);
        let x0 = x0.map(|v| project(&v.data));
        let (x, st) = krylov::minres(op, |r| self.precondition_raw(r), &rhs, x0, tol, MAX_KRYLOV)?;
        // orthogonality to roundoff
        let x = project(&project(&x));
        Ok((Field2D { grid: self.grid, data: x }, st))
    }
}

/// q = top(x₁)s(x₂) + bottom(x₁)s(−x₂) with s(y) = (y³ − H²y)/(12H) + (y² − H²)/4,
/// H = 1/δ: q vanishes on the walls and ∂₂²q equals `top`, `bottom` there.
/// Subtracting q leaves a field whose sine series has no wall curvature.
#[derive(Clone, Debug)]
pub struct WallLift {
    pub q: Field2D,
    /// Lq from the closed form of ∂₂²q and the Fourier ∂₁² of the wall data.
    pub lq: Field2D,
    /// ∂₂q on the walls x₂ = H and x₂ = −H.
    pub trace_top: Vec<f64>,
    pub trace_bottom: Vec<f64>,
    /// ∂₂²q on the walls.
    pub curvature_top: Vec<f64>,
    pub curvature_bottom: Vec<f64>,
}

impl EllipticOperator {
    pub fn wall_lift(&self, top: &SurfaceField, bottom: &SurfaceField) -> WallLift {
        let g = &self.grid;
        let h = g.half_width();
        let s = |y: f64| (y * y * y - h * h * y) / (12.0 * h) + (y * y - h * h) / 4.0;
        let s2 = |y: f64| y / (2.0 * h) + 0.5;
        let (top_xx, bottom_xx) = (top.second_derivative(), bottom.second_derivative());
        let mut q = g.zeros();
        let mut lq = g.zeros();
        for j in 0..g.ny {
            let y = g.x2(j);
            for i in 0..g.nx {
                let n = j * g.nx + i;
                let (a, b) = (top.values[i], bottom.values[i]);
                q.data[n] = a * s(y) + b * s(-y);
                let lap = top_xx.values[i] * s(y) + bottom_xx.values[i] * s(-y) + a * s2(y) + b * s2(-y);
                lq.data[n] = -lap + self.potential.data[n] * q.data[n];
            }
        }
        q.even_projection();
        lq.even_projection();
        let (near, far) = (2.0 * h / 3.0, h / 3.0);
        WallLift {
            q,
            lq,
            trace_top: top.values.iter().zip(&bottom.values).map(|(a, b)| near * a + far * b).collect(),
            trace_bottom: top.values.iter().zip(&bottom.values).map(|(a, b)| -far * a - near * b).collect(),
            curvature_top: top.values.clone(),
            curvature_bottom: bottom.values.clone(),
        }
    }

    /// Lu for a field u whose wall curvature is carried by `lift`.
    pub fn apply_lifted(&self, u: &Field2D, lift: &WallLift) -> Result<Field2D, GridError> {
        Ok(self.apply(&u.sub(&lift.q))?.add(&lift.lq))
    }
}

/// U₂ = ∂_{x₂}U(·, τ) − (∂_{x₂}U)(·, τ)_bc.
pub fn make_u2(gs: &GroundState, tau: f64, grid: &StripGrid) -> Field2D {
    assert!(tau.abs() <= 1.0 / 3.0);
    let d2u = sample_field(gs, grid, tau, Quantity::D2U);
    let (top, bottom) = wall_traces(gs, grid, tau, Quantity::D2U);
    d2u.sub(&apply_bc(&top, &bottom, grid))
}

/// (∂_{x₂}U)(·, τ)_bc.
pub fn d2u_bc(gs: &GroundState, tau: f64, grid: &StripGrid) -> Field2D {
    let (top, bottom) = wall_traces(gs, grid, tau, Quantity::D2U);
    apply_bc(&top, &bottom, grid)
}
