//! Boundary correction, harmonic extension and conjugate, Dirichlet–Neumann
//! map and surface Helmholtz inverse.

use super::{fft, Field2D, Scale, StripGrid, SurfaceField};
use num_complex::Complex64;
use rayon::prelude::*;

/// sinh(a·u)/sinh(a·v) for 0 ≤ u ≤ v, a ≥ 0, without overflow.
#[inline]
pub(crate) fn sinh_ratio(a: f64, u: f64, v: f64) -> f64 {
    if a == 0.0 {
        return u / v;
    }
    (a * (u - v)).exp() * ((-2.0 * a * u).exp_m1() / (-2.0 * a * v).exp_m1())
}

/// cosh(a·u)/sinh(a·v) for 0 ≤ u ≤ v, a > 0.
#[inline]
pub(crate) fn cosh_over_sinh(a: f64, u: f64, v: f64) -> f64 {
    (a * (u - v)).exp() * ((1.0 + (-2.0 * a * u).exp()) / -(-2.0 * a * v).exp_m1())
}

/// Screened-harmonic interpolant of the wall traces: (1 − Δ)f_bc = 0 in the
/// strip, f_bc = f₊ on x₂ = 1/δ and f₋ on x₂ = −1/δ.
pub fn apply_bc(f_plus: &SurfaceField, f_minus: &SurfaceField, grid: &StripGrid) -> Field2D {
    let nx = grid.nx;
    assert_eq!(f_plus.len(), nx);
    assert_eq!(f_minus.len(), nx);
    let fp = fft::forward(&f_plus.values);
    let fm = fft::forward(&f_minus.values);
    let k = grid.k();
    let bracket: Vec<f64> = k.iter().map(|&kk| (1.0 + kk * kk).sqrt()).collect();
    let h = grid.half_width();
    let mut data = vec![0.0; grid.len()];
    data.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let x2 = grid.x2(j);
        let mut spec: Vec<Complex64> = (0..nx)
            .map(|i| {
                let a = bracket[i];
                fp[i] * sinh_ratio(a, x2 + h, 2.0 * h) + fm[i] * sinh_ratio(a, h - x2, 2.0 * h)
            })
            .collect();
        fft::plan(nx, false).process(&mut spec);
        for i in 0..nx {
            row[i] = spec[i].re / nx as f64;
        }
    });
    let mut f = Field2D { grid: *grid, data };
    f.even_projection();
    f
}

/// ∂_{x₂}f_bc on the top and bottom walls, closed form per mode.
pub fn bc_normal_derivatives(
    f_plus: &SurfaceField,
    f_minus: &SurfaceField,
    grid: &StripGrid,
) -> (SurfaceField, SurfaceField) {
    let fp = fft::forward(&f_plus.values);
    let fm = fft::forward(&f_minus.values);
    let h = grid.half_width();
    let mut top = Vec::with_capacity(grid.nx);
    let mut bot = Vec::with_capacity(grid.nx);
    for (i, kk) in grid.k().into_iter().enumerate() {
        let a = (1.0 + kk * kk).sqrt();
        let den = -(-4.0 * a * h).exp_m1();
        let coth = (1.0 + (-4.0 * a * h).exp()) / den;
        let csch = 2.0 * (-2.0 * a * h).exp() / den;
        top.push(a * (coth * fp[i] - csch * fm[i]));
        bot.push(a * (csch * fp[i] - coth * fm[i]));
    }
    let mk = |s: Vec<Complex64>| {
        SurfaceField::new(fft::inverse_real(s), Scale::Rescaled, grid.hx).even_projection()
    };
    (mk(top), mk(bot))
}

fn apply_rows(f: &SurfaceField, heights: &[f64], symbol: impl Fn(f64, f64) -> Complex64 + Sync) -> Vec<SurfaceField> {
    let spec = fft::forward(&f.values);
    let k = f.k();
    let n = f.len();
    heights
        .par_iter()
        .map(|&y| {
            let mut s: Vec<Complex64> = (0..n).map(|i| spec[i] * symbol(k[i], y)).collect();
            if symbol(k[n / 2], y).im != 0.0 {
                s[n / 2] = Complex64::new(0.0, 0.0);
            }
            SurfaceField::new(fft::inverse_real(s), f.scale, f.spacing)
        })
        .collect()
}

/// Γ₂ at the given heights y ∈ [−1, 1] of the reference strip from its top
/// trace: sinh(|ξ|(y+1))/sinh(2|ξ|).
pub fn harmonic_extension(gamma_s: &SurfaceField, heights: &[f64]) -> Vec<SurfaceField> {
    apply_rows(gamma_s, heights, |k, y| Complex64::new(sinh_ratio(k.abs(), y + 1.0, 2.0), 0.0))
}

/// Harmonic conjugate Γ₁ (odd, zero mean) at the given heights.
pub fn harmonic_conjugate(gamma_s: &SurfaceField, heights: &[f64]) -> Vec<SurfaceField> {
    apply_rows(gamma_s, heights, |k, y| {
        if k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -k.signum() * cosh_over_sinh(k.abs(), y + 1.0, 2.0))
        }
    })
}

/// Derivatives of Γ = Γ₁ + iΓ₂ along rows of the reference strip.
#[derive(Clone, Debug)]
pub struct ConformalRows {
    pub heights: Vec<f64>,
    pub gamma1: Vec<SurfaceField>,
    pub gamma2: Vec<SurfaceField>,
    /// ∂₁Γ₁ = ∂₂Γ₂
    pub d1_gamma1: Vec<SurfaceField>,
    pub d1_gamma2: Vec<SurfaceField>,
    pub d11_gamma1: Vec<SurfaceField>,
    pub d11_gamma2: Vec<SurfaceField>,
}

impl ConformalRows {
    /// |1 + Γ′|² on row r.
    pub fn jacobian(&self, r: usize) -> Vec<f64> {
        self.d1_gamma1[r]
            .values
            .iter()
            .zip(&self.d1_gamma2[r].values)
            .map(|(a, b)| (1.0 + a) * (1.0 + a) + b * b)
            .collect()
    }
}

/// Γ₁, Γ₂ and their first and second x₁-derivatives. With `full = false`
/// only the first derivatives are filled (the others are left empty).
pub fn conformal_rows(gamma_s: &SurfaceField, heights: &[f64], full: bool) -> ConformalRows {
    let c = |a: f64, y: f64| {
        if a == 0.0 {
            0.5
        } else {
            a * cosh_over_sinh(a, y + 1.0, 2.0)
        }
    };
    let d1_gamma1 = apply_rows(gamma_s, heights, |k, y| Complex64::new(c(k.abs(), y), 0.0));
    let d1_gamma2 = apply_rows(gamma_s, heights, |k, y| Complex64::new(0.0, k * sinh_ratio(k.abs(), y + 1.0, 2.0)));
    let (gamma1, gamma2, d11_gamma1, d11_gamma2) = if full {
        (
            harmonic_conjugate(gamma_s, heights),
            harmonic_extension(gamma_s, heights),
            apply_rows(gamma_s, heights, |k, y| {
                if k == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, k * c(k.abs(), y))
                }
            }),
            apply_rows(gamma_s, heights, |k, y| Complex64::new(-k * k * sinh_ratio(k.abs(), y + 1.0, 2.0), 0.0)),
        )
    } else {
        (vec![], vec![], vec![], vec![])
    };
    ConformalRows { heights: heights.to_vec(), gamma1, gamma2, d1_gamma1, d1_gamma2, d11_gamma1, d11_gamma2 }
}

/// m(ξ) = |ξ|coth(2|ξ|), m(0) = 1/2.
pub fn dn_symbol(k: f64) -> f64 {
    let a = k.abs();
    if a == 0.0 {
        0.5
    } else {
        a * (1.0 + (-4.0 * a).exp()) / -(-4.0 * a).exp_m1()
    }
}

pub fn dn_map(gamma_s: &SurfaceField) -> SurfaceField {
    gamma_s.apply_symbol(|k| Complex64::new(dn_symbol(k), 0.0))
}

/// (g − α²D²)^{-1}: multiplier 1/(g + α²ξ²).
pub fn helmholtz_inverse_surface(f: &SurfaceField, g: f64, alpha: f64) -> SurfaceField {
    assert!(g > 0.0 && alpha > 0.0);
    f.apply_symbol(|k| Complex64::new(1.0 / (g + alpha * alpha * k * k), 0.0))
}

/// Trigonometric interpolant of a periodic surface field, evaluable anywhere.
#[derive(Clone, Debug)]
pub struct FourierSeries {
    coeffs: Vec<Complex64>,
    x0: f64,
    base: f64,
}

impl FourierSeries {
    pub fn new(f: &SurfaceField) -> Self {
        let n = f.len() as f64;
        let coeffs = fft::forward(&f.values).into_iter().map(|z| z / n).collect();
        FourierSeries { coeffs, x0: f.x(0), base: 2.0 * std::f64::consts::PI / f.period() }
    }

    /// (value, first derivative) at x.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let n = self.coeffs.len();
        let th = self.base * (x - self.x0);
        let step = Complex64::new(th.cos(), th.sin());
        let mut e = Complex64::new(1.0, 0.0);
        let mut v = self.coeffs[0].re;
        let mut d = 0.0;
        for m in 1..n / 2 {
            e *= step;
            let z = self.coeffs[m] * e;
            let k = self.base * m as f64;
            v += 2.0 * z.re;
            d -= 2.0 * k * z.im;
        }
        let kn = self.base * (n / 2) as f64;
        v += self.coeffs[n / 2].re * (kn * (x - self.x0)).cos();
        (v, d)
    }
}
