//! Bifurcation function in projection and boundary form, and the bisection
//! for its root in τ.

use super::{Background, WaveError, WaveProblem, WaveState};
use crate::elliptic::{self, EigenPair, EllipticOperator};
use crate::strip::conformal_rows;
use serde::Serialize;

/// Largest |τ| the bracket expansion may reach.
pub const TAU_EXPANSION_LIMIT: f64 = 0.3;

/// Everything computed at one τ.
#[derive(Clone, Debug)]
pub struct TauProbe {
    pub tau: f64,
    pub bg: Background,
    pub op: EllipticOperator,
    pub eig: EigenPair,
    pub state: WaveState,
    /// ⟨U₀, F(τ, ṽ, Γ̃ₛ)⟩
    pub b: f64,
    /// Boundary form: −top + bottom.
    pub b_tilde: f64,
    pub top: f64,
    pub bottom: f64,
    /// ‖ṽ‖ + (C/δ)‖Γ̃ₛ‖
    pub state_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeSummary {
    pub tau: f64,
    pub b: f64,
    pub b_tilde: f64,
    pub top: f64,
    pub bottom: f64,
    pub l: f64,
    pub state_norm: f64,
    pub fixed_point_steps: usize,
}

impl From<&TauProbe> for ProbeSummary {
    fn from(p: &TauProbe) -> Self {
        ProbeSummary {
            tau: p.tau,
            b: p.b,
            b_tilde: p.b_tilde,
            top: p.top,
            bottom: p.bottom,
            l: p.eig.l,
            state_norm: p.state_norm,
            fixed_point_steps: p.state.log.len(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RootReport {
    pub tau_star: f64,
    pub root: TauProbe,
    /// Final bracket endpoints (left, right).
    pub bracket: (ProbeSummary, ProbeSummary),
    /// Every bracket of the bisection, widest first, ending with `bracket`.
    pub brackets: Vec<(ProbeSummary, ProbeSummary)>,
    pub probes: Vec<ProbeSummary>,
}

impl RootReport {
    /// The bracket a search stopped at width `tol_tau` would have returned.
    pub fn bracket_at(&self, tol_tau: f64) -> &(ProbeSummary, ProbeSummary) {
        self.brackets.iter().find(|(l, r)| r.tau - l.tau <= tol_tau).unwrap_or(&self.bracket)
    }
}

impl WaveProblem {
    /// ⟨U₀, F(τ, ṽ, Γ̃ₛ)⟩. The ⟨U₀, Lṽ⟩ term is dropped: it equals
    /// l⟨U₀, ṽ⟩ = 0 up to the eigen-residual.
    pub fn bifurcation_b(&self, bg: &Background, state: &WaveState, eig: &EigenPair) -> Result<f64, WaveError> {
        let f = self.assemble_f(bg, &state.v, &state.gamma_s)?;
        // U₀F vanishes on the walls with slope ∂₂U₀·F there; the trapezoid
        // rule in x₂ misses (h²/12)·[∂₂(U₀F)] between the walls
        let (d_top, d_bottom) = eig.u0.wall_normal_derivatives();
        let lift = &bg.lift;
        let jump = (0..self.grid.nx)
            .map(|i| d_top[i] * lift.curvature_top[i] - d_bottom[i] * lift.curvature_bottom[i])
            .sum::<f64>()
            * self.grid.hx;
        Ok(eig.u0.dot(&f) - self.grid.hy * self.grid.hy / 12.0 * jump)
    }

    /// (b̃, top, bottom) with top = ½∫w₊|∂₂φ(·, 1/δ)|², bottom likewise at
    /// −1/δ, weights w± = (1 + ∂₁Γ₁)/|1 + Γ′|² at (δx₁, ±1); b̃ = −top + bottom.
    pub fn bifurcation_b_boundary(&self, bg: &Background, state: &WaveState) -> (f64, f64, f64) {
        let (t_top, t_bottom) = self.wall_traces(bg, &state.v);
        let rows = conformal_rows(&state.gamma_s, &[1.0, -1.0], false);
        let weight = |r: usize| -> Vec<f64> {
            rows.jacobian(r).iter().zip(&rows.d1_gamma1[r].values).map(|(j, d)| (1.0 + d) / j).collect()
        };
        let hx = self.grid.hx;
        let integral = |t: &[f64], w: &[f64]| 0.5 * t.iter().zip(w).map(|(t, w)| w * t * t).sum::<f64>() * hx;
        let top = integral(&t_top.values, &weight(0));
        let bottom = integral(&t_bottom.values, &weight(1));
        (bottom - top, top, bottom)
    }

    /// Eigenpair, fixed point and both bifurcation values at τ.
    pub fn probe(
        &self,
        tau: f64,
        warm: Option<&TauProbe>,
        tol: f64,
        max_iter: usize,
    ) -> Result<TauProbe, WaveError> {
        let bg = self.background(tau)?;
        let op = self.operator(&bg);
        let u2 = elliptic::make_u2(&self.gs, tau, &self.grid);
        let eig = elliptic::eigenpair(&op, &u2, self.eigen_tol)?;
        let start = warm.map(|p| (&p.state.v, &p.state.gamma_s));
        let state = self.ls_fixed_point(&op, &bg, &eig, start, tol, max_iter)?;
        let b = self.bifurcation_b(&bg, &state, &eig)?;
        let (b_tilde, top, bottom) = self.bifurcation_b_boundary(&bg, &state);
        let state_norm = self.surface_norm(&state.v, &state.gamma_s);
        Ok(TauProbe { tau, bg, op, eig, state, b, b_tilde, top, bottom, state_norm })
    }

    /// Bisection on b̃. The bracket pairs the τ = 0 probe with the first of
    /// ±hint, ±2·hint, … (up to |τ| = 0.3) where b̃ has the opposite sign; a
    /// side whose probe fails (amplitude guard, divergent fixed point) is
    /// dropped from the expansion. The bracket is then halved until its width
    /// is below `tol_tau`. Each probe recomputes the eigenpair and fixed point.
    pub fn find_tau_root(&self, hint: f64, tol_tau: f64, tol: f64, max_iter: usize) -> Result<RootReport, WaveError> {
        let mut probes = Vec::new();
        let centre = self.probe(0.0, None, tol, max_iter)?;
        probes.push(ProbeSummary::from(&centre));
        if centre.b_tilde == 0.0 {
            let s = ProbeSummary::from(&centre);
            let bracket = (s.clone(), s);
            return Ok(RootReport { tau_star: 0.0, brackets: vec![bracket.clone()], bracket, root: centre, probes });
        }
        let mut live = [true, true];
        let mut half = hint.abs().min(TAU_EXPANSION_LIMIT);
        let far = 'expand: loop {
            for (side, sign) in [(0, -1.0), (1, 1.0)] {
                if !live[side] {
                    continue;
                }
                match self.probe(sign * half, Some(&centre), tol, max_iter) {
                    Ok(p) => {
                        probes.push(ProbeSummary::from(&p));
                        if p.b_tilde.signum() != centre.b_tilde.signum() {
                            break 'expand p;
                        }
                    }
                    Err(WaveError::Amplitude(_) | WaveError::Diverged { .. } | WaveError::NotConverged { .. }) => {
                        live[side] = false;
                    }
                    Err(e) => return Err(e),
                }
            }
            if half >= TAU_EXPANSION_LIMIT || !live.contains(&true) {
                return Err(WaveError::NoSignChange(half));
            }
            half = (2.0 * half).min(TAU_EXPANSION_LIMIT);
        };
        let (mut left, mut right) = if far.tau < 0.0 { (far, centre) } else { (centre, far) };
        let mut brackets = vec![(ProbeSummary::from(&left), ProbeSummary::from(&right))];
        while right.tau - left.tau > tol_tau {
            let mid = 0.5 * (left.tau + right.tau);
            let p = self.probe(mid, Some(&left), tol, max_iter)?;
            probes.push(ProbeSummary::from(&p));
            if p.b_tilde == 0.0 {
                let s = ProbeSummary::from(&p);
                let bracket = (s.clone(), s);
                brackets.push(bracket.clone());
                return Ok(RootReport { tau_star: mid, brackets, bracket, root: p, probes });
            }
            if p.b_tilde.signum() == left.b_tilde.signum() {
                left = p;
            } else {
                right = p;
            }
            brackets.push((ProbeSummary::from(&left), ProbeSummary::from(&right)));
        }
        let root = if left.b_tilde.abs() <= right.b_tilde.abs() { left.clone() } else { right.clone() };
        Ok(RootReport {
            tau_star: root.tau,
            bracket: (ProbeSummary::from(&left), ProbeSummary::from(&right)),
            brackets,
            root,
            probes,
        })
    }
}

/// Free-function form of the root search.
pub fn find_tau_root(problem: &WaveProblem, hint: f64, tol_tau: f64, tol: f64, max_iter: usize) -> Result<RootReport, WaveError> {
    problem.find_tau_root(hint, tol_tau, tol, max_iter)
}
