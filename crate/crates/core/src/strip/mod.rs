//! Discretisation of the rescaled slab S_δ = {|x₂| < 1/δ} and the Fourier
//! multiplier operators acting on it and on its boundary lines.
//!
//! Fields are stored row-major with rows along x₁: value (i, j) sits at
//! `j * nx + i`, x₁ = −Lx + i·hx, x₂ = −1/δ + (j+1)·hy.

pub mod fft;
mod kernel;
mod multipliers;

pub use kernel::exp_kernel_convolve;
pub use multipliers::{
    apply_bc, bc_normal_derivatives, conformal_rows, dn_map, harmonic_conjugate, harmonic_extension,
    helmholtz_inverse_surface, ConformalRows, FourierSeries,
};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("Nx must be even and positive, got {0}")]
    OddNx(usize),
    #[error("grid spacing {name} = {value} exceeds 0.25")]
    Coarse { name: &'static str, value: f64 },
    #[error("half length Lx = {lx} is below 1/δ + 10 = {need}")]
    Short { lx: f64, need: f64 },
    #[error("delta = {0} outside (0, 1)")]
    Delta(f64),
    #[error("grid mismatch")]
    Mismatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripGrid {
    pub delta: f64,
    pub lx: f64,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

impl StripGrid {
    pub fn new(delta: f64, lx: f64, nx: usize, ny: usize) -> Result<Self, GridError> {
        let g = Self::unchecked(delta, lx, nx, ny)?;
        if g.hx > 0.25 {
            return Err(GridError::Coarse { name: "hx", value: g.hx });
        }
        if g.hy > 0.25 {
            return Err(GridError::Coarse { name: "hy", value: g.hy });
        }
        if lx < 1.0 / delta + 10.0 {
            return Err(GridError::Short { lx, need: 1.0 / delta + 10.0 });
        }
        Ok(g)
    }

    /// Default resolution for `delta`: Lx = 1/δ + 10 rounded up to an even
    /// integer, both steps at most `step`, FFT-friendly sizes.
    pub fn standard(delta: f64, step: f64) -> Result<Self, GridError> {
        let lx = 2.0 * ((1.0 / delta + 10.0) / 2.0).ceil();
        let nx = 16 * (2.0 * lx / step / 16.0).ceil() as usize;
        let ny = 8 * (2.0 / delta / step / 8.0).ceil() as usize - 1;
        Self::new(delta, lx, nx, ny)
    }

    /// Grid without the resolution and truncation checks (coarse oracles).
    pub fn unchecked(delta: f64, lx: f64, nx: usize, ny: usize) -> Result<Self, GridError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(GridError::Delta(delta));
        }
        if nx == 0 || nx % 2 != 0 {
            return Err(GridError::OddNx(nx));
        }
        Ok(StripGrid { delta, lx, nx, ny, hx: 2.0 * lx / nx as f64, hy: 2.0 / (delta * (ny as f64 + 1.0)) })
    }

    pub fn half_width(&self) -> f64 {
        1.0 / self.delta
    }

    pub fn x1(&self, i: usize) -> f64 {
        -self.lx + i as f64 * self.hx
    }

    pub fn x2(&self, j: usize) -> f64 {
        -self.half_width() + (j as f64 + 1.0) * self.hy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self) -> f64 {
        self.hx * self.hy
    }

    /// Rescaled x₁ wavenumbers.
    pub fn k(&self) -> Vec<f64> {
        fft::wavenumbers(self.nx, 2.0 * self.lx)
    }

    /// Sine wavenumbers μ_m = mπ/(2/δ), m = 1..Ny.
    pub fn mu(&self) -> Vec<f64> {
        let w = 2.0 * self.half_width();
        (1..=self.ny).map(|m| m as f64 * std::f64::consts::PI / w).collect()
    }

    pub fn zeros(&self) -> Field2D {
        Field2D { grid: *self, data: vec![0.0; self.len()] }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64 + Sync>(&self, f: F) -> Field2D {
        let data = (0..self.len())
            .into_par_iter()
            .map(|idx| f(self.x1(idx % self.nx), self.x2(idx / self.nx)))
            .collect();
        Field2D { grid: *self, data }
    }

    /// The boundary line as a surface field (rescaled or physical scale).
    pub fn line<F: Fn(f64) -> f64>(&self, scale: Scale, f: F) -> SurfaceField {
        let s = self.line_spacing(scale);
        let values = (0..self.nx).map(|i| f(-(self.nx as f64) * s / 2.0 + i as f64 * s)).collect();
        SurfaceField { values, scale, spacing: s }
    }

    pub fn line_spacing(&self, scale: Scale) -> f64 {
        match scale {
            Scale::Rescaled => self.hx,
            Scale::Physical => self.hx * self.delta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scale {
    Rescaled,
    Physical,
}

/// Values on the Nx nodes of a horizontal line, starting at −Nx·spacing/2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceField {
    pub values: Vec<f64>,
    pub scale: Scale,
    pub spacing: f64,
}

impl SurfaceField {
    pub fn new(values: Vec<f64>, scale: Scale, spacing: f64) -> Self {
        SurfaceField { values, scale, spacing }
    }

    pub fn zeros_like(&self) -> Self {
        SurfaceField { values: vec![0.0; self.values.len()], scale: self.scale, spacing: self.spacing }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn period(&self) -> f64 {
        self.spacing * self.values.len() as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.period() / 2.0 + i as f64 * self.spacing
    }

    pub fn k(&self) -> Vec<f64> {
        fft::wavenumbers(self.len(), self.period())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SurfaceField { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    /// Apply a Fourier symbol (complex in general).
    pub fn apply_symbol(&self, symbol: impl Fn(f64) -> Complex64) -> Self {
        let mut spec = fft::forward(&self.values);
        for (z, k) in spec.iter_mut().zip(self.k()) {
            *z *= symbol(k);
        }
        let n = self.len();
        // Nyquist: odd symbols have no real representation there
        let nyq = symbol(std::f64::consts::PI / self.spacing);
        if nyq.im != 0.0 {
            spec[n / 2] = Complex64::new(0.0, 0.0);
        }
        SurfaceField { values: fft::inverse_real(spec), ..self.clone() }
    }

    pub fn derivative(&self) -> Self {
        self.apply_symbol(|k| Complex64::new(0.0, k))
    }

    pub fn second_derivative(&self) -> Self {
        self.apply_symbol(|k| Complex64::new(-k * k, 0.0))
    }

    /// v(x) ← ½(v(x) + v(−x)).
    pub fn even_projection(&self) -> Self {
        let n = self.len();
        let v = &self.values;
        let values = (0..n).map(|i| 0.5 * (v[i] + v[(n - i) % n])).collect();
        SurfaceField { values, ..self.clone() }
    }

    pub fn odd_part_norm(&self) -> f64 {
        let n = self.len();
        let v = &self.values;
        ((0..n).map(|i| (0.5 * (v[i] - v[(n - i) % n])).powi(2)).sum::<f64>() * self.spacing).sqrt()
    }

    /// Trapezoid ∫ over one period.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.values.iter().zip(&o.values).map(|(a, b)| a * b).sum::<f64>() * self.spacing
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// L² norm computed from the DFT coefficients.
    pub fn norm_fourier(&self) -> f64 {
        let spec = fft::forward(&self.values);
        (spec.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.spacing / self.len() as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn zip_with(&self, o: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.values.iter().zip(&o.values).map(|(&a, &b)| f(a, b)).collect();
        SurfaceField { values, ..self.clone() }
    }
}

/// Scalar field on the interior nodes of the strip; Dirichlet walls implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    pub grid: StripGrid,
    pub data: Vec<f64>,
}

impl Field2D {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.grid.nx + i]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.grid.nx..(j + 1) * self.grid.nx]
    }

    pub fn dot(&self, o: &Field2D) -> f64 {
        dot(&self.data, &o.data) * self.grid.cell()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.cell()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Field2D {
        Field2D { grid: self.grid, data: self.data.par_iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, o: &Field2D, f: impl Fn(f64, f64) -> f64 + Sync) -> Field2D {
        let data = self.data.par_iter().zip(o.data.par_iter()).map(|(&a, &b)| f(a, b)).collect();
        Field2D { grid: self.grid, data }
    }

    pub fn scaled(&self, c: f64) -> Field2D {
        self.map(|v| c * v)
    }

    pub fn add(&self, o: &Field2D) -> Field2D {
        self.zip_with(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Field2D) -> Field2D {
        self.zip_with(o, |a, b| a - b)
    }

    pub fn axpy(&mut self, a: f64, x: &Field2D) {
        for (y, xv) in self.data.iter_mut().zip(&x.data) {
            *y += a * xv;
        }
    }

    /// f(x₁) ← ½(f(x₁) + f(−x₁)).
    pub fn even_projection(&mut self) {
        even_project(&mut self.data, self.grid.nx);
    }

    pub fn odd_part_norm(&self) -> f64 {
        let nx = self.grid.nx;
        let mut s = 0.0;
        for row in self.data.chunks(nx) {
            for i in 0..nx {
                s += (0.5 * (row[i] - row[(nx - i) % nx])).powi(2);
            }
        }
        (s * self.grid.cell()).sqrt()
    }

    /// Values reflected in x₂ ↦ −x₂.
    pub fn flipped(&self) -> Field2D {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut data = vec![0.0; self.data.len()];
        for j in 0..ny {
            data[j * nx..(j + 1) * nx].copy_from_slice(self.row(ny - 1 - j));
        }
        Field2D { grid: self.grid, data }
    }

    /// Spectral ∂_{x₂} at the walls (x₂ = 1/δ, x₂ = −1/δ) of a field that
    /// vanishes there; accurate when its wall curvature vanishes as well.
    pub fn wall_normal_derivatives(&self) -> (Vec<f64>, Vec<f64>) {
        let g = &self.grid;
        let coeffs = sine_coefficients(self);
        let mu = g.mu();
        let mut top = vec![0.0; g.nx];
        let mut bottom = vec![0.0; g.nx];
        for (m, row) in coeffs.chunks(g.nx).enumerate() {
            let sign = if (m + 1) % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..g.nx {
                top[i] += sign * mu[m] * row[i];
                bottom[i] += mu[m] * row[i];
            }
        }
        (top, bottom)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    // fixed order, four partial sums
    let mut s = [0.0; 4];
    let n4 = a.len() / 4 * 4;
    for c in (0..n4).step_by(4) {
        for l in 0..4 {
            s[l] += a[c + l] * b[c + l];
        }
    }
    let mut tail = 0.0;
    for c in n4..a.len() {
        tail += a[c] * b[c];
    }
    (s[0] + s[1]) + (s[2] + s[3]) + tail
}

pub fn even_project(data: &mut [f64], nx: usize) {
    for row in data.chunks_mut(nx) {
        for i in 1..nx / 2 {
            let m = 0.5 * (row[i] + row[nx - i]);
            row[i] = m;
            row[nx - i] = m;
        }
    }
}

/// Sine coefficients b_m(x₁) with f(x₂) = Σ b_m sin(μ_m(x₂ + 1/δ)), stored
/// row-major in m.
pub fn sine_coefficients(f: &Field2D) -> Vec<f64> {
    let g = &f.grid;
    let mut out = f.data.clone();
    columns_dst(&mut out, g.nx, g.ny);
    let s = 2.0 / (g.ny as f64 + 1.0);
    out.iter_mut().for_each(|v| *v *= s);
    out
}

/// In-place DST-I along x₂ for every column.
fn columns_dst(data: &mut [f64], nx: usize, ny: usize) {
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..nx.div_ceil(2))
        .into_par_iter()
        .map_init(Vec::new, |buf, p| {
            let ia = 2 * p;
            let ib = (2 * p + 1).min(nx - 1);
            let mut a: Vec<f64> = (0..ny).map(|j| data[j * nx + ia]).collect();
            let mut b: Vec<f64> = if ib != ia { (0..ny).map(|j| data[j * nx + ib]).collect() } else { vec![0.0; ny] };
            fft::dst1_pair(&mut a, &mut b, buf);
            (a, b)
        })
        .collect();
    for (p, (a, b)) in pairs.into_iter().enumerate() {
        let ia = 2 * p;
        let ib = 2 * p + 1;
        for j in 0..ny {
            data[j * nx + ia] = a[j];
            if ib < nx {
                data[j * nx + ib] = b[j];
            }
        }
    }
}

/// Apply the separable symbol s(k, μ) of a constant-coefficient operator with
/// Dirichlet walls: sine series in x₂, Fourier series in x₁. `symbol` holds
/// Ny rows of Nx values.
pub fn apply_separable(f: &Field2D, symbol: &[f64]) -> Field2D {
    let g = f.grid;
    let (nx, ny) = (g.nx, g.ny);
    let mut data = f.data.clone();
    columns_dst(&mut data, nx, ny);
    // rows of sine modes, paired for the x₁ transform
    data.par_chunks_mut(2 * nx).zip(symbol.par_chunks(2 * nx)).for_each_init(Vec::new, |buf, (rows, sym)| {
        if rows.len() == 2 * nx {
            let (a, b) = rows.split_at_mut(nx);
            // the two rows carry different symbols: transform once, scale separately
            let n = nx;
            buf.clear();
            buf.extend(a.iter().zip(b.iter()).map(|(&x, &y)| Complex64::new(x, y)));
            fft::plan(n, true).process(buf);
            // unpack the two real transforms, scale, repack
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for k in 0..n {
                let z = buf[k];
                let zc = buf[(n - k) % n].conj();
                let fa = 0.5 * (z + zc);
                let fb = Complex64::new(0.0, -0.5) * (z - zc);
                out[k] = fa * sym[k] + Complex64::new(0.0, 1.0) * fb * sym[nx + k];
            }
            fft::plan(n, false).process(&mut out);
            for k in 0..n {
                a[k] = out[k].re / n as f64;
                b[k] = out[k].im / n as f64;
            }
        } else {
            let mut dummy = vec![0.0; nx];
            fft::real_symbol_pair(rows, &mut dummy, &sym[..nx], buf);
        }
    });
    columns_dst(&mut data, nx, ny);
    let s = 2.0 / (ny as f64 + 1.0);
    data.iter_mut().for_each(|v| *v *= s);
    even_project(&mut data, nx);
    Field2D { grid: g, data }
}

/// Symbol table s(k_i, μ_m) laid out like a field (row m, column i).
pub fn symbol_table(g: &StripGrid, s: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let k = g.k();
    let mu = g.mu();
    let mut out = Vec::with_capacity(g.len());
    for &m in &mu {
        for &kk in &k {
            out.push(s(kk, m));
        }
    }
    out
}
