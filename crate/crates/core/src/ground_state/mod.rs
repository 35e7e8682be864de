//! Radial ground state ΔU = γ(U) on the plane, its exponential tail and
//! pointwise evaluation for shifted centers.

mod audit;

pub use audit::{nondegeneracy_audit, AuditReport, ChannelEigenvalue};

use crate::bessel::{i_scaled, k_scaled};
use crate::nonlinearity::Nonlinearity;
use crate::ode::{integrate, OdeError, State, Tolerance};
use serde::Serialize;
use thiserror::Error;

pub const R_MATCH: f64 = 12.0;
pub const R_MAX: f64 = 25.0;
pub const FIT_WINDOW: (f64, f64) = (12.0, 20.0);
/// Table spacing in r.
pub const DR: f64 = 1.0 / 1024.0;
const ODE_RTOL: f64 = 1e-12;
const ODE_ATOL: f64 = 1e-18;
/// Below this radius values come from the Taylor series at the origin.
const SERIES_RADIUS: f64 = 0.005;

#[derive(Debug, Error)]
pub enum GroundStateError {
    #[error("no bracket found in the initial scan of U(0): {scan:?}")]
    BracketNotFound { scan: Vec<(f64, Outcome)> },
    #[error("integrator step underflow at r = {r} (h = {h})")]
    StepUnderflow { r: f64, h: f64 },
    #[error("fit window is not flat: relative spread {spread:.3e} exceeds 5%")]
    NonFlatWindow { spread: f64 },
    #[error("profile ends at r = {0}, must extend past r = 10")]
    ProfileTooShort(f64),
}

impl From<OdeError> for GroundStateError {
    fn from(e: OdeError) -> Self {
        match e {
            OdeError::StepUnderflow { t, h } => GroundStateError::StepUnderflow { r: t, h },
        }
    }
}

/// Fate of a trial trajectory started from U(0) = a.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// U reaches zero: a is too large.
    CrossesZero,
    /// U turns back up (U_r > 0) or exceeds 2a: a is too small.
    TurnsBack,
    /// Neither happened before the integration horizon.
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroundState {
    pub spec: Nonlinearity,
    pub r_nodes: Vec<f64>,
    pub u_values: Vec<f64>,
    pub u_r_values: Vec<f64>,
    pub u_rr_values: Vec<f64>,
    u_rrr_values: Vec<f64>,
    pub center_value: f64,
    pub lambda: f64,
    /// Coefficient c of the tail c·K₀(r) used beyond R_match.
    pub tail_coefficient: f64,
    pub r_match: f64,
    /// Taylor coefficients of U(r) = a + c₁r² + c₂r⁴ + c₃r⁶ near the origin.
    series: [f64; 4],
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayFit {
    pub lambda: f64,
    pub lambda_k1: f64,
    pub spread: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    U,
    D2U,
    D22U,
    GammaPrimeU,
}

fn rhs(spec: Nonlinearity) -> impl Fn(f64, &State) -> State {
    move |r: f64, y: &State| [y[1], -y[1] / r + spec.gamma(y[0])]
}

fn series_coefficients(spec: Nonlinearity, a: f64) -> [f64; 4] {
    let p = spec.p as f64;
    let g = spec.gamma(a);
    let gp = spec.gamma_prime(a);
    let gpp = -(p + 1.0) * p * a.abs().powi(spec.p as i32 - 1) * a.signum();
    let b = g / 4.0;
    let c = gp * b / 16.0;
    let d = (gp * c + 0.5 * gpp * b * b) / 36.0;
    [a, b, c, d]
}

fn series_eval(s: &[f64; 4], r: f64) -> [f64; 4] {
    let r2 = r * r;
    let u = s[0] + r2 * (s[1] + r2 * (s[2] + r2 * s[3]));
    let ur = r * (2.0 * s[1] + r2 * (4.0 * s[2] + r2 * 6.0 * s[3]));
    let urr = 2.0 * s[1] + r2 * (12.0 * s[2] + r2 * 30.0 * s[3]);
    let urrr = r * (24.0 * s[2] + r2 * 120.0 * s[3]);
    [u, ur, urr, urrr]
}

fn tolerance() -> Tolerance {
    Tolerance { rtol: ODE_RTOL, atol: ODE_ATOL }
}

/// Walk the trajectory started from U(0) = a node by node on the table grid,
/// calling `visit(i, U, U_r)` at every node until it returns false.
fn march<V>(spec: Nonlinearity, a: f64, last: usize, mut visit: V) -> Result<(), GroundStateError>
where
    V: FnMut(usize, f64, f64) -> bool,
{
    let s = series_coefficients(spec, a);
    let f = rhs(spec);
    let mut y = [0.0; 2];
    let mut h = DR;
    for i in 0..=last {
        let r = i as f64 * DR;
        if r <= SERIES_RADIUS {
            let e = series_eval(&s, r);
            y = [e[0], e[1]];
        } else {
            let (_, yn, hn) = integrate(&f, r - DR, y, r, h, tolerance(), |_, _| false)?;
            y = yn;
            h = hn;
        }
        if !visit(i, y[0], y[1]) {
            break;
        }
    }
    Ok(())
}

/// Integrate a trial trajectory and classify it.
pub fn classify(spec: Nonlinearity, a: f64, horizon: f64) -> Result<Outcome, GroundStateError> {
    let mut outcome = Outcome::Undecided;
    march(spec, a, (horizon / DR).round() as usize, |_, u, ur| {
        if u < 0.0 {
            outcome = Outcome::CrossesZero;
        } else if ur > 0.0 || u > 2.0 * a {
            outcome = Outcome::TurnsBack;
        }
        outcome == Outcome::Undecided
    })?;
    Ok(outcome)
}

/// Shooting by bisection on a = U(0); the bracket is shrunk until its width
/// is below `tol`·a.
pub fn shoot(spec: Nonlinearity, tol: f64) -> Result<GroundState, GroundStateError> {
    assert!(tol > 0.0);
    let mut scan = Vec::new();
    let mut bracket = None;
    let mut prev: Option<(f64, Outcome)> = None;
    let mut a = 0.5;
    while a < 20.0 {
        let o = classify(spec, a, R_MAX)?;
        scan.push((a, o));
        if let Some((ap, op)) = prev {
            if op == Outcome::TurnsBack && o == Outcome::CrossesZero {
                bracket = Some((ap, a));
                break;
            }
        }
        prev = Some((a, o));
        a *= 1.1;
    }
    let (mut lo, mut hi) = bracket.ok_or(GroundStateError::BracketNotFound { scan })?;
    while hi - lo > tol * 0.5 * (lo + hi) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match classify(spec, mid, R_MAX)? {
            Outcome::CrossesZero => hi = mid,
            Outcome::TurnsBack => lo = mid,
            Outcome::Undecided => {
                lo = mid;
                hi = mid;
            }
        }
    }
    tabulate(spec, 0.5 * (lo + hi))
}

fn tabulate(spec: Nonlinearity, a: f64) -> Result<GroundState, GroundStateError> {
    let s = series_coefficients(spec, a);
    let n_match = (R_MATCH / DR).round() as usize;
    let n_max = (R_MAX / DR).round() as usize;
    let r_nodes: Vec<f64> = (0..=n_max).map(|i| i as f64 * DR).collect();
    let mut u = vec![0.0; n_max + 1];
    let mut ur = vec![0.0; n_max + 1];
    march(spec, a, n_match, |i, ui, uri| {
        u[i] = ui;
        ur[i] = uri;
        true
    })?;
    // split the state at R_match into the decaying K₀ and growing I₀ parts;
    // the growing part is shooting error and is dropped
    let rm = r_nodes[n_match];
    let c0 = rm * rm.exp() * (u[n_match] * i_scaled(1, rm) - ur[n_match] * i_scaled(0, rm));
    let mut urr = vec![0.0; n_max + 1];
    let mut urrr = vec![0.0; n_max + 1];
    for i in 0..=n_max {
        let r = r_nodes[i];
        if i > n_match {
            let t = tail(c0, r);
            u[i] = t[0];
            ur[i] = t[1];
            urr[i] = t[2];
            urrr[i] = t[3];
        } else if r <= SERIES_RADIUS {
            let e = series_eval(&s, r);
            urr[i] = e[2];
            urrr[i] = e[3];
        } else {
            urr[i] = -ur[i] / r + spec.gamma(u[i]);
            urrr[i] = ur[i] / (r * r) - urr[i] / r + spec.gamma_prime(u[i]) * ur[i];
        }
    }
    let mut gs = GroundState {
        spec,
        r_nodes,
        u_values: u,
        u_r_values: ur,
        u_rr_values: urr,
        u_rrr_values: urrr,
        center_value: a,
        lambda: 0.0,
        tail_coefficient: c0,
        r_match: rm,
        series: s,
    };
    gs.lambda = decay_constant(&gs)?.lambda;
    Ok(gs)
}

/// c·K₀ tail and its first three derivatives.
fn tail(c: f64, r: f64) -> [f64; 4] {
    let e = c * (-r).exp();
    let k0 = k_scaled(0, r);
    let k1 = k_scaled(1, r);
    [
        e * k0,
        -e * k1,
        e * (k0 + k1 / r),
        -e * (k1 + k0 / r + 2.0 * k1 / (r * r)),
    ]
}

/// Window means of r^{1/2}e^r U and r^{1/2}e^r(−U_r) on tabulated data.
pub fn decay_constant_from_table(
    r: &[f64],
    u: &[f64],
    u_r: &[f64],
    window: (f64, f64),
) -> Result<DecayFit, GroundStateError> {
    let last = *r.last().unwrap_or(&0.0);
    if last <= 10.0 {
        return Err(GroundStateError::ProfileTooShort(last));
    }
    let (mut s0, mut s1, mut n) = (0.0, 0.0, 0usize);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..r.len() {
        if r[i] < window.0 || r[i] > window.1 {
            continue;
        }
        let w = r[i].sqrt() * r[i].exp();
        let v = w * u[i];
        s0 += v;
        s1 -= w * u_r[i];
        lo = lo.min(v);
        hi = hi.max(v);
        n += 1;
    }
    let lambda = s0 / n as f64;
    let spread = (hi - lo) / lambda.abs();
    if spread > 0.05 {
        return Err(GroundStateError::NonFlatWindow { spread });
    }
    Ok(DecayFit { lambda, lambda_k1: s1 / n as f64, spread })
}

pub fn decay_constant(gs: &GroundState) -> Result<DecayFit, GroundStateError> {
    decay_constant_from_table(&gs.r_nodes, &gs.u_values, &gs.u_r_values, FIT_WINDOW)
}

#[inline]
fn hermite(t: f64, h: f64, f0: f64, f1: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * f0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * f1
        + (t3 - t2) * h * d1
}

impl GroundState {
    pub fn p(&self) -> u32 {
        self.spec.p
    }

    /// (U, U_r, U_rr, U_r/r) at radius r.
    pub fn radial(&self, r: f64) -> [f64; 4] {
        if r <= SERIES_RADIUS {
            let e = series_eval(&self.series, r);
            let s = &self.series;
            let r2 = r * r;
            let ur_over_r = 2.0 * s[1] + r2 * (4.0 * s[2] + r2 * 6.0 * s[3]);
            return [e[0], e[1], e[2], ur_over_r];
        }
        let n = self.r_nodes.len() - 1;
        if r >= self.r_nodes[n] {
            let t = tail(self.tail_coefficient, r);
            return [t[0], t[1], t[2], t[1] / r];
        }
        let x = r / DR;
        let i = (x.floor() as usize).min(n - 1);
        let t = x - i as f64;
        let u = hermite(t, DR, self.u_values[i], self.u_values[i + 1], self.u_r_values[i], self.u_r_values[i + 1]);
        let ur = hermite(t, DR, self.u_r_values[i], self.u_r_values[i + 1], self.u_rr_values[i], self.u_rr_values[i + 1]);
        let urr = hermite(t, DR, self.u_rr_values[i], self.u_rr_values[i + 1], self.u_rrr_values[i], self.u_rrr_values[i + 1]);
        [u, ur, urr, ur / r]
    }

    /// Quantity at a single point with the center at (0, shift).
    pub fn eval(&self, x1: f64, x2: f64, shift: f64, what: Quantity) -> f64 {
        let y = x2 - shift;
        let r = x1.hypot(y);
        let q = self.radial(r);
        match what {
            Quantity::U => q[0],
            Quantity::GammaPrimeU => self.spec.gamma_prime(q[0]),
            Quantity::D2U => {
                if r == 0.0 {
                    0.0
                } else {
                    y / r * q[1]
                }
            }
            Quantity::D22U => {
                if r == 0.0 {
                    q[2]
                } else {
                    let s2 = y * y / (r * r);
                    s2 * q[2] + (1.0 - s2) * q[3]
                }
            }
        }
    }

    /// ∂_{x₁}U with the center at (0, shift).
    pub fn d1(&self, x1: f64, x2: f64, shift: f64) -> f64 {
        let r = x1.hypot(x2 - shift);
        if r == 0.0 {
            0.0
        } else {
            x1 * self.radial(r)[3]
        }
    }

    /// ∂_{x₁}∂_{x₂}U with the center at (0, shift).
    pub fn d12(&self, x1: f64, x2: f64, shift: f64) -> f64 {
        let y = x2 - shift;
        let r = x1.hypot(y);
        if r == 0.0 {
            return 0.0;
        }
        let q = self.radial(r);
        x1 * y / (r * r) * (q[2] - q[3])
    }

    /// ‖U‖²_{L²(ℝ²)}.
    pub fn mass(&self) -> f64 {
        self.radial_integral(|i| self.u_values[i] * self.u_values[i])
    }

    /// ‖∇U‖²_{L²(ℝ²)}.
    pub fn gradient_norm_sq(&self) -> f64 {
        self.radial_integral(|i| self.u_r_values[i] * self.u_r_values[i])
    }

    fn radial_integral<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        // Simpson on the uniform table
        let n = self.r_nodes.len() - 1;
        let n = n - n % 2;
        let mut s = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * f(i) * self.r_nodes[i];
        }
        2.0 * std::f64::consts::PI * s * DR / 3.0
    }

    /// |U_rr + U_r/r − γ(U)| at every interior node.
    pub fn ode_residuals(&self) -> Vec<f64> {
        (1..self.r_nodes.len())
            .map(|i| {
                let r = self.r_nodes[i];
                (self.u_rr_values[i] + self.u_r_values[i] / r - self.spec.gamma(self.u_values[i])).abs()
            })
            .collect()
    }

    /// CSV with a one-line JSON header.
    pub fn to_csv(&self) -> String {
        let header = serde_json::json!({
            "p": self.spec.p,
            "a": self.center_value,
            "lambda": self.lambda,
            "R_match": self.r_match,
        });
        let mut s = format!("# {}\nr,U,U_r,U_rr\n", header);
        for i in 0..self.r_nodes.len() {
            s.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.r_nodes[i], self.u_values[i], self.u_r_values[i], self.u_rr_values[i]
            ));
        }
        s
    }
}

/// Evaluate a quantity at many points.
pub fn sample(gs: &GroundState, points: &[(f64, f64)], shift: f64, what: Quantity) -> Vec<f64> {
    points.iter().map(|&(x1, x2)| gs.eval(x1, x2, shift, what)).collect()
}
