use proptest::prelude::*;
use std::f64::consts::PI;
use vortex_spike::strip::{
    apply_bc, apply_separable, bc_normal_derivatives, conformal_rows, dn_map, exp_kernel_convolve, harmonic_conjugate,
    harmonic_extension, helmholtz_inverse_surface, symbol_table, Field2D, Scale, StripGrid, SurfaceField,
};

fn grid() -> StripGrid {
    StripGrid::unchecked(0.35, 12.0, 192, 47).unwrap()
}

fn mode_k(g: &StripGrid, m: usize) -> f64 {
    PI * m as f64 / g.lx
}

fn max_diff(a: &Field2D, b: &Field2D) -> f64 {
    a.data.iter().zip(&b.data).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn line_diff(a: &SurfaceField, b: &SurfaceField) -> f64 {
    a.values.iter().zip(&b.values).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn surface(n: usize, period: f64, f: impl Fn(f64) -> f64) -> SurfaceField {
    let h = period / n as f64;
    SurfaceField::new((0..n).map(|i| f(-period / 2.0 + i as f64 * h)).collect(), Scale::Rescaled, h)
}

// Screened-harmonic boundary interpolant

#[test]
fn unit_traces_give_cosh_profile() {
    let g = grid();
    let one = g.line(Scale::Rescaled, |_| 1.0);
    let out = apply_bc(&one, &one, &g);
    let exact = g.from_fn(|_, y| y.cosh() / g.half_width().cosh());
    assert!(max_diff(&out, &exact) < 1e-12);
}

#[test]
fn mode_traces_give_screened_profile() {
    let g = grid();
    for m in [1, 3, 10, 40] {
        let k = mode_k(&g, m);
        let a = (1.0 + k * k).sqrt();
        let tr = g.line(Scale::Rescaled, |x| (k * x).cos());
        let out = apply_bc(&tr, &tr, &g);
        let exact = g.from_fn(|x, y| (k * x).cos() * (a * y).cosh() / (a * g.half_width()).cosh());
        assert!(max_diff(&out, &exact) < 1e-12, "mode {m}");
    }
}

#[test]
fn antisymmetric_traces_give_sinh_profile() {
    let g = grid();
    let k = mode_k(&g, 2);
    let a = (1.0 + k * k).sqrt();
    let top = g.line(Scale::Rescaled, |x| (k * x).cos());
    let bottom = top.map(|v| -v);
    let out = apply_bc(&top, &bottom, &g);
    let exact = g.from_fn(|x, y| (k * x).cos() * (a * y).sinh() / (a * g.half_width()).sinh());
    assert!(max_diff(&out, &exact) < 1e-12);
}

#[test]
fn zero_traces_give_zero() {
    let g = grid();
    let z = g.line(Scale::Rescaled, |_| 0.0);
    assert_eq!(apply_bc(&z, &z, &g).max_abs(), 0.0);
}

#[test]
fn swapping_traces_reflects_the_field() {
    let g = grid();
    let top = g.line(Scale::Rescaled, |x| (-x * x).exp());
    let bottom = g.line(Scale::Rescaled, |x| 0.3 / (1.0 + x * x));
    let a = apply_bc(&top, &bottom, &g);
    let b = apply_bc(&bottom, &top, &g);
    assert!(max_diff(&a.flipped(), &b) < 1e-13);
}

#[test]
fn wall_derivatives_match_closed_form() {
    let g = grid();
    let k = mode_k(&g, 5);
    let a = (1.0 + k * k).sqrt();
    let tr = g.line(Scale::Rescaled, |x| (k * x).cos());
    let (top, bottom) = bc_normal_derivatives(&tr, &tr, &g);
    let t = (a * g.half_width()).tanh();
    let top_exact = g.line(Scale::Rescaled, |x| a * t * (k * x).cos());
    let bottom_exact = top_exact.map(|v| -v);
    assert!(line_diff(&top, &top_exact) < 1e-12);
    assert!(line_diff(&bottom, &bottom_exact) < 1e-12);
}

#[test]
fn wide_strip_with_fine_grid_stays_finite() {
    let g = StripGrid::unchecked(0.05, 30.0, 4096, 79).unwrap();
    let top = g.line(Scale::Rescaled, |x| (-x * x).exp() + 1e-3 * (40.0 * x).cos());
    let bottom = g.line(Scale::Rescaled, |x| (-x * x / 4.0).exp());
    let out = apply_bc(&top, &bottom, &g);
    assert!(out.data.iter().all(|v| v.is_finite()));
    // deep interior: every mode has decayed by at least e^{−10}
    let mid = out.row(g.ny / 2);
    assert!(mid.iter().all(|v| v.abs() < 1e-4));
    let (dt, db) = bc_normal_derivatives(&top, &bottom, &g);
    assert!(dt.values.iter().chain(&db.values).all(|v| v.is_finite()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boundary_interpolant_is_linear(
        c1 in -2.0f64..2.0, c2 in -2.0f64..2.0,
        w1 in 0.3f64..2.0, w2 in 0.3f64..2.0,
    ) {
        let g = grid();
        let f = g.line(Scale::Rescaled, |x| (-w1 * x * x).exp());
        let h = g.line(Scale::Rescaled, |x| 1.0 / (1.0 + w2 * x * x));
        let combo = f.zip_with(&h, |a, b| c1 * a + c2 * b);
        let lhs = apply_bc(&combo, &h, &g);
        let fa = apply_bc(&f, &g.line(Scale::Rescaled, |_| 0.0), &g);
        let ha = apply_bc(&h, &h, &g);
        let hz = apply_bc(&h, &g.line(Scale::Rescaled, |_| 0.0), &g);
        // lhs = c1·fa + c2·hz + (ha − hz)
        let rhs = fa.scaled(c1).add(&hz.scaled(c2)).add(&ha.sub(&hz));
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12 * (1.0 + c1.abs() + c2.abs()));
    }
}

// Reference strip: harmonic extension, conjugate, Dirichlet–Neumann map

const PERIOD: f64 = 24.0;
const N: usize = 256;

#[test]
fn harmonic_extension_of_a_mode() {
    let k = 2.0 * PI * 4.0 / PERIOD;
    let tr = surface(N, PERIOD, |x| (k * x).cos());
    let heights = [-1.0, -0.4, 0.0, 0.7, 1.0];
    for (y, row) in heights.iter().zip(harmonic_extension(&tr, &heights)) {
        let exact = surface(N, PERIOD, |x| (k * x).cos() * (k * (y + 1.0)).sinh() / (2.0 * k).sinh());
        assert!(line_diff(&row, &exact) < 1e-13, "y = {y}");
    }
}

#[test]
fn harmonic_extension_of_a_constant_is_linear_in_height() {
    let tr = surface(N, PERIOD, |_| 1.5);
    let heights = [-1.0, -0.5, 0.25, 1.0];
    for (y, row) in heights.iter().zip(harmonic_extension(&tr, &heights)) {
        assert!(row.values.iter().all(|v| (v - 1.5 * (y + 1.0) / 2.0).abs() < 1e-13));
    }
}

#[test]
fn dn_map_of_a_mode_and_a_constant() {
    let k = 2.0 * PI * 3.0 / PERIOD;
    let tr = surface(N, PERIOD, |x| (k * x).cos());
    let exact = surface(N, PERIOD, |x| k / (2.0 * k).tanh() * (k * x).cos());
    assert!(line_diff(&dn_map(&tr), &exact) < 1e-13);
    let c = surface(N, PERIOD, |_| -0.8);
    assert!(dn_map(&c).values.iter().all(|v| (v + 0.4).abs() < 1e-14));
}

#[test]
fn dn_map_is_the_normal_derivative_of_the_extension() {
    let tr = surface(N, PERIOD, |x| (-x * x / 2.0).exp());
    let eps = 1e-3;
    let rows = harmonic_extension(&tr, &[1.0, 1.0 - eps, 1.0 - 2.0 * eps]);
    let fd: Vec<f64> = (0..N).map(|i| (3.0 * rows[0].values[i] - 4.0 * rows[1].values[i] + rows[2].values[i]) / (2.0 * eps)).collect();
    let dn = dn_map(&tr);
    let err = dn.values.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err < 1e-5, "{err}");
}

#[test]
fn harmonic_conjugate_of_a_mode_and_a_constant() {
    let k = 2.0 * PI * 2.0 / PERIOD;
    let tr = surface(N, PERIOD, |x| (k * x).cos());
    let heights = [-1.0, 0.0, 0.5, 1.0];
    for (y, row) in heights.iter().zip(harmonic_conjugate(&tr, &heights)) {
        let exact = surface(N, PERIOD, |x| (k * x).sin() * (k * (y + 1.0)).cosh() / (2.0 * k).sinh());
        assert!(line_diff(&row, &exact) < 1e-13, "y = {y}");
    }
    let c = surface(N, PERIOD, |_| 2.0);
    assert!(harmonic_conjugate(&c, &[0.3])[0].max_abs() < 1e-14);
}

#[test]
fn conformal_rows_satisfy_cauchy_riemann() {
    let tr = surface(N, PERIOD, |x| 0.2 * (-x * x).exp());
    let eps = 1e-4;
    let y = 0.3;
    let heights = [y - eps, y, y + eps];
    let rows = conformal_rows(&tr, &heights, true);
    for i in 0..N {
        // ∂₁Γ₁ = ∂₂Γ₂ and ∂₂Γ₁ = −∂₁Γ₂
        let d2g2 = (rows.gamma2[2].values[i] - rows.gamma2[0].values[i]) / (2.0 * eps);
        let d2g1 = (rows.gamma1[2].values[i] - rows.gamma1[0].values[i]) / (2.0 * eps);
        assert!((rows.d1_gamma1[1].values[i] - d2g2).abs() < 1e-8);
        assert!((d2g1 + rows.d1_gamma2[1].values[i]).abs() < 1e-8);
    }
    // first and second x₁-derivatives agree with spectral differentiation;
    // the trace mean m adds the non-periodic part m·x₁/2 to Γ₁
    let half_mean = 0.5 * tr.integral() / tr.period();
    let d1 = rows.gamma1[1].derivative().map(|v| v + half_mean);
    assert!(line_diff(&rows.d1_gamma1[1], &d1) < 1e-12);
    assert!(line_diff(&rows.d1_gamma2[1], &rows.gamma2[1].derivative()) < 1e-12);
    assert!(line_diff(&rows.d11_gamma1[1], &rows.gamma1[1].second_derivative()) < 1e-12);
    assert!(line_diff(&rows.d11_gamma2[1], &rows.gamma2[1].second_derivative()) < 1e-12);
}

// Surface Helmholtz inverse

#[test]
fn helmholtz_inverse_of_a_mode_and_a_constant() {
    let (g, alpha) = (1.7, 0.6);
    let k = 2.0 * PI * 5.0 / PERIOD;
    let f = surface(N, PERIOD, |x| (k * x).cos());
    let exact = f.map(|v| v / (g + alpha * alpha * k * k));
    assert!(line_diff(&helmholtz_inverse_surface(&f, g, alpha), &exact) < 1e-14);
    let c = surface(N, PERIOD, |_| 3.4);
    assert!(helmholtz_inverse_surface(&c, g, alpha).values.iter().all(|v| (v - 2.0).abs() < 1e-13));
}

#[test]
fn multiplier_and_kernel_routes_agree() {
    for (g, alpha) in [(1.0, 1.0), (2.5, 0.4), (0.3, 1.8)] {
        let f = surface(1024, 40.0, |x| (-x * x).exp());
        let by_symbol = helmholtz_inverse_surface(&f, g, alpha);
        let by_kernel = exp_kernel_convolve(&f, g, alpha);
        let err = line_diff(&by_symbol, &by_kernel);
        assert!(err < 1e-8, "g = {g}, alpha = {alpha}: {err}");
    }
}

#[test]
fn narrow_bump_recovers_the_kernel_peak() {
    let (g, alpha) = (1.0, 1.0);
    let sigma = 0.01;
    let f = surface(8192, 20.0, |x| (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt()));
    let out = exp_kernel_convolve(&f, g, alpha);
    let peak = out.values.iter().cloned().fold(f64::MIN, f64::max);
    let expected = 1.0 / (2.0 * alpha * g.sqrt());
    assert!((peak / expected - 1.0).abs() < 0.02, "{peak}");
}

#[test]
fn helmholtz_preserves_evenness() {
    let f = surface(N, PERIOD, |x| (-(x - 0.0).powi(2)).exp() * (1.0 + 0.1 * x * x));
    assert!(f.odd_part_norm() < 1e-15);
    assert!(helmholtz_inverse_surface(&f, 1.0, 0.5).odd_part_norm() < 1e-14);
    assert!(exp_kernel_convolve(&f, 1.0, 0.5).odd_part_norm() < 1e-12);
}

// Symmetry bookkeeping

#[test]
fn even_projection_commutes_with_operators() {
    let f = surface(N, PERIOD, |x| (-(x - 1.3).powi(2)).exp() + 0.2 * (0.9 * x).sin());
    let pf = f.even_projection();
    assert!(line_diff(&dn_map(&pf), &dn_map(&f).even_projection()) < 1e-12);
    assert!(line_diff(&helmholtz_inverse_surface(&pf, 1.2, 0.7), &helmholtz_inverse_surface(&f, 1.2, 0.7).even_projection()) < 1e-12);
    assert!(line_diff(&exp_kernel_convolve(&pf, 1.2, 0.7), &exp_kernel_convolve(&f, 1.2, 0.7).even_projection()) < 1e-12);

    let g = grid();
    let sym = symbol_table(&g, |k, mu| 1.0 + k * k + mu * mu);
    let u = g.from_fn(|x, y| (-(x - 0.8).powi(2) - y * y).exp());
    let mut pu = u.clone();
    pu.even_projection();
    let a = apply_separable(&pu, &sym);
    // apply_separable returns even fields, so it must not see the odd part
    assert!(max_diff(&a, &apply_separable(&u, &sym)) < 1e-12);
}

#[test]
fn parseval_identity() {
    let f = surface(N, PERIOD, |x| (-(x - 1.0).powi(2)).exp() + 0.3 * (2.0 * PI * 7.0 * x / PERIOD).cos());
    assert!((f.norm() - f.norm_fourier()).abs() < 1e-10 * f.norm());
}

#[test]
fn separable_identity_symbol_is_the_identity_on_even_fields() {
    let g = grid();
    let sym = symbol_table(&g, |_, _| 1.0);
    let u = g.from_fn(|x, y| (-x * x - 0.5 * y * y).exp() * (1.0 + 0.1 * y));
    assert!(max_diff(&apply_separable(&u, &sym), &u) < 1e-13);
}
