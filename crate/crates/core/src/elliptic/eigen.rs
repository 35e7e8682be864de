//! Near-degenerate eigenpair of L_τ: inverse iteration (production) and the
//! fixed-point map on U₂^⊥ (cross-check).

use super::{make_u2, EllipticOperator, SolveError};
use crate::ground_state::GroundState;
use crate::strip::{Field2D, StripGrid};
use serde::Serialize;
use thiserror::Error;

pub const MAX_INVERSE_STEPS: usize = 50;
const MAX_CONTRACTION_STEPS: usize = 200;
const INNER_TOL: f64 = 1e-11;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("inverse iteration did not converge in {steps} steps (residual {residual:.3e})")]
    NoConvergence { steps: usize, residual: f64 },
    #[error("fixed-point map grew for 3 consecutive steps (step {step})")]
    NotContracting { step: usize },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub l: f64,
    pub u0: Field2D,
    pub a0: f64,
    pub w: Field2D,
    pub residual: f64,
    pub steps: usize,
}

fn finish(l_op: &EllipticOperator, u0: Field2D, u2: &Field2D, steps: usize) -> EigenPair {
    let mut u0 = u0.scaled(1.0 / u0.norm());
    if u0.dot(u2) < 0.0 {
        u0 = u0.scaled(-1.0);
    }
    let lu = l_op.apply_raw(&u0.data);
    let l = crate::strip::dot(&u0.data, &lu) * l_op.grid.cell();
    let res = Field2D { grid: l_op.grid, data: lu }.sub(&u0.scaled(l)).norm();
    let a0 = u0.dot(u2) / u2.dot(u2);
    let w = u0.scaled(1.0 / a0).sub(u2);
    EigenPair { l, u0, a0, w, residual: res, steps }
}

/// Inverse iteration from `seed` (= U₂) with Rayleigh-quotient eigenvalue,
/// stopped when ‖LU₀ − lU₀‖ < tol. Each step solves for the correction,
/// x ← x − L⁻¹(Lx − l x) = l L⁻¹x, which keeps the right side small as l → 0.
pub fn eigenpair(l_op: &EllipticOperator, seed: &Field2D, tol: f64) -> Result<EigenPair, EigenError> {
    let mut pair = finish(l_op, seed.clone(), seed, 0);
    for step in 1..=MAX_INVERSE_STEPS {
        let lx = l_op.apply(&pair.u0).expect("same grid");
        let r = lx.sub(&pair.u0.scaled(pair.l));
        let (e, _) = l_op.solve(&r, INNER_TOL)?;
        let mut x = pair.u0.sub(&e);
        x.even_projection();
        pair = finish(l_op, x, seed, step);
        if pair.residual < tol {
            return Ok(pair);
        }
    }
    Err(EigenError::NoConvergence { steps: MAX_INVERSE_STEPS, residual: pair.residual })
}

/// Fixed point of w ↦ ℓ(w)L̃⁻¹w − L̃⁻¹(1 − P₂)LU₂ on U₂^⊥, where L̃ is L
/// restricted to U₂^⊥ and ℓ(w) = ⟨w + U₂, LU₂⟩/‖U₂‖².
pub fn eigen_contraction(l_op: &EllipticOperator, u2: &Field2D, tol: f64) -> Result<EigenPair, EigenError> {
    let lu2 = l_op.apply(u2).expect("same grid");
    let u2n2 = u2.dot(u2);
    let ell = |w: &Field2D| w.add(u2).dot(&lu2) / u2n2;
    let (z, _) = l_op.solve_projected(&lu2, u2, INNER_TOL)?;
    let mut w = u2.grid.zeros();
    let mut prev_step = f64::INFINITY;
    let mut growth = 0;
    for step in 1..=MAX_CONTRACTION_STEPS {
        let lw = if w.max_abs() == 0.0 { w.clone() } else { l_op.solve_projected(&w, u2, INNER_TOL)?.0 };
        let next = lw.scaled(ell(&w)).sub(&z);
        let change = next.sub(&w).norm();
        w = next;
        growth = if change > prev_step { growth + 1 } else { 0 };
        if growth >= 3 {
            return Err(EigenError::NotContracting { step });
        }
        prev_step = change;
        if change <= tol * w.norm().max(u2.norm()) {
            let pair = finish(l_op, w.add(u2), u2, step);
            return Ok(EigenPair { l: ell(&w), ..pair });
        }
    }
    Err(EigenError::NotContracting { step: MAX_CONTRACTION_STEPS })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingRow {
    pub delta: f64,
    pub l: f64,
    pub rayleigh_u2: f64,
    pub lu2_norm: f64,
}

/// (δ, l, ⟨U₂, LU₂⟩/‖U₂‖², ‖LU₂‖) on `grid_for(δ)`.
pub fn spectral_scaling_table(
    gs: &GroundState,
    deltas: &[f64],
    tau: f64,
    grid_for: impl Fn(f64) -> StripGrid,
) -> Result<Vec<ScalingRow>, EigenError> {
    deltas
        .iter()
        .map(|&delta| {
            assert!((0.2..=0.6).contains(&delta), "delta outside [0.2, 0.6]");
            let grid = grid_for(delta);
            let l_op = super::build(&grid, gs, tau);
            let u2 = make_u2(gs, tau, &grid);
            let lu2 = l_op.apply(&u2).expect("same grid");
            let pair = eigenpair(&l_op, &u2, 1e-10)?;
            Ok(ScalingRow { delta, l: pair.l, rayleigh_u2: u2.dot(&lu2) / u2.dot(&u2), lu2_norm: lu2.norm() })
        })
        .collect()
}
