use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;
use vortex_spike::elliptic::{
    build, eigen_contraction, eigenpair, make_u2, spectral_scaling_table, with_potential,
};
use vortex_spike::ground_state::{shoot, GroundState};
use vortex_spike::nonlinearity::Nonlinearity;
use vortex_spike::strip::{Field2D, Scale, StripGrid};

fn cubic() -> &'static GroundState {
    static GS: OnceLock<GroundState> = OnceLock::new();
    GS.get_or_init(|| shoot(Nonlinearity::power_law(2), 1e-13).expect("shooting converges"))
}

fn coarse() -> StripGrid {
    StripGrid::unchecked(0.4, 8.0, 64, 19).unwrap()
}

fn max_diff(a: &Field2D, b: &Field2D) -> f64 {
    a.data.iter().zip(&b.data).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Smooth even test field with parameters.
fn bump(g: &StripGrid, w: f64, c: f64, s: f64) -> Field2D {
    let h = g.half_width();
    let mut f = g.from_fn(|x, y| (-w * x * x).exp() * (1.0 + c * x * x) * (PI * (y + h) / (2.0 * h)).sin() * (1.0 + s * y));
    f.even_projection();
    f
}

// Constant potential: the operator is 1 − Δ

#[test]
fn unit_potential_acts_diagonally_on_modes() {
    let g = coarse();
    let op = with_potential(&g, g.from_fn(|_, _| 1.0), 0.0);
    let h = g.half_width();
    for (m, p) in [(0usize, 1usize), (3, 2), (7, 5), (20, 11)] {
        let k = PI * m as f64 / g.lx;
        let mu = PI * p as f64 / (2.0 * h);
        let u = g.from_fn(|x, y| (k * x).cos() * (mu * (y + h)).sin());
        let lu = op.apply(&u).unwrap();
        assert!(max_diff(&lu, &u.scaled(1.0 + k * k + mu * mu)) < 1e-11 * (1.0 + k * k + mu * mu));
    }
}

#[test]
fn preconditioner_inverts_unit_potential() {
    let g = coarse();
    let op = with_potential(&g, g.from_fn(|_, _| 1.0), 0.0);
    let u = bump(&g, 0.3, 0.1, 0.2);
    let back = op.precondition(&op.apply(&u).unwrap());
    assert!(max_diff(&back, &u) < 1e-12);
}

// Operator built from the ground state

#[test]
fn potential_is_mirror_symmetric_and_tends_to_one() {
    let g = coarse();
    let a = build(&g, cubic(), 0.2);
    let b = build(&g, cubic(), -0.2);
    assert!(max_diff(&a.potential.flipped(), &b.potential) < 1e-13);
    assert!(a.potential.odd_part_norm() < 1e-14);
    // far corner: γ′(U) → γ′(0) = 1
    assert!((a.potential.at(0, 0) - 1.0).abs() < 1e-3);
}

#[test]
fn build_is_deterministic() {
    let g = coarse();
    let a = build(&g, cubic(), 0.1);
    let b = build(&g, cubic(), 0.1);
    assert_eq!(a.potential.data, b.potential.data);
    let u = bump(&g, 0.5, 0.0, 0.3);
    assert_eq!(a.apply(&u).unwrap().data, b.apply(&u).unwrap().data);
}

#[test]
fn mismatched_grid_is_rejected() {
    let op = build(&coarse(), cubic(), 0.0);
    let other = StripGrid::unchecked(0.4, 8.0, 64, 23).unwrap();
    assert!(op.apply(&other.zeros()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn operator_is_symmetric(
        w1 in 0.1f64..1.0, c1 in -0.5f64..0.5, s1 in -0.3f64..0.3,
        w2 in 0.1f64..1.0, c2 in -0.5f64..0.5, s2 in -0.3f64..0.3,
        tau in -0.3f64..0.3,
    ) {
        let g = coarse();
        let op = build(&g, cubic(), tau);
        let u = bump(&g, w1, c1, s1);
        let v = bump(&g, w2, c2, s2);
        let a = u.dot(&op.apply(&v).unwrap());
        let b = op.apply(&u).unwrap().dot(&v);
        prop_assert!((a - b).abs() < 1e-11 * (1.0 + a.abs()));
    }
}

#[test]
fn solve_recovers_a_known_field() {
    let g = StripGrid::standard(0.35, 0.125).unwrap();
    let op = build(&g, cubic(), 0.05);
    let u = bump(&g, 0.2, 0.05, 0.1);
    let f = op.apply(&u).unwrap();
    let (x, stats) = op.solve(&f, 1e-12).unwrap();
    assert!(stats.iterations <= 200, "{}", stats.iterations);
    assert!(x.sub(&u).norm() < 1e-9 * u.norm());
}

// Near-kernel direction

#[test]
fn u2_norm_tends_to_the_plane_value() {
    // ‖∂₂U‖² = ½‖∇U‖² on the plane; the walls cut off the tail
    let plane = cubic().gradient_norm_sq() / 2.0;
    let gap = |delta: f64| {
        let g = StripGrid::standard(delta, 0.125).unwrap();
        let u2 = make_u2(cubic(), 0.0, &g);
        let op = build(&g, cubic(), 0.0);
        assert!(u2.dot(&op.apply(&u2).unwrap()) > 0.0);
        (u2.dot(&u2) / plane - 1.0).abs()
    };
    let (wide, mid, narrow) = (gap(0.2), gap(0.3), gap(0.4));
    println!("U2 norm gaps {wide:.3e} {mid:.3e} {narrow:.3e}");
    assert!(wide < mid && mid < narrow);
    assert!(wide < 0.01, "{wide}");
}

#[test]
fn u2_vanishes_on_the_walls() {
    // a grid whose last row sits on x₂ = 1/δ
    let base = StripGrid::unchecked(0.35, 12.0, 192, 47).unwrap();
    let h = base.half_width();
    let on_wall = StripGrid { hy: 2.0 * h / base.ny as f64, ..base };
    assert!((on_wall.x2(on_wall.ny - 1) - h).abs() < 1e-13);
    for tau in [0.0, 0.15, -0.15] {
        let u2 = make_u2(cubic(), tau, &on_wall);
        let top = u2.row(on_wall.ny - 1);
        assert!(top.iter().all(|v| v.abs() < 1e-10), "tau = {tau}");
    }
}

#[test]
fn eigenvalue_matches_dense_oracle() {
    let g = coarse();
    let (nx, ny) = (g.nx, g.ny);
    for tau in [0.0, 0.1] {
        let op = build(&g, cubic(), tau);
        let pair = eigenpair(&op, &make_u2(cubic(), tau, &g), 1e-11).unwrap();

        // dense collocation matrix on the x₁-even subspace
        let k: Vec<f64> = (0..nx).map(|i| PI / g.lx * if i <= nx / 2 { i as f64 } else { i as f64 - nx as f64 }).collect();
        let dxx = DMatrix::from_fn(nx, nx, |a, b| {
            let d = (a as f64 - b as f64) * g.hx;
            k.iter().map(|kk| kk * kk * (kk * d).cos()).sum::<f64>() / nx as f64
        });
        let dyy = DMatrix::from_fn(ny, ny, |a, b| {
            (1..=ny)
                .map(|m| {
                    let th = PI * m as f64 / (ny as f64 + 1.0);
                    let mu = PI * m as f64 / (2.0 * g.half_width());
                    mu * mu * (th * (a + 1) as f64).sin() * (th * (b + 1) as f64).sin()
                })
                .sum::<f64>()
                * 2.0
                / (ny as f64 + 1.0)
        });
        let n = nx * ny;
        let mut full = DMatrix::<f64>::zeros(n, n);
        for j in 0..ny {
            for i in 0..nx {
                let r = j * nx + i;
                for i2 in 0..nx {
                    full[(r, j * nx + i2)] += dxx[(i, i2)];
                }
                for j2 in 0..ny {
                    full[(r, j2 * nx + i)] += dyy[(j, j2)];
                }
                full[(r, r)] += op.potential.data[r];
            }
        }
        // orthonormal basis of x₁-even grid functions
        let half = nx / 2 + 1;
        let mut basis = DMatrix::<f64>::zeros(n, ny * half);
        for j in 0..ny {
            for c in 0..half {
                let col = j * half + c;
                if c == 0 || c == nx / 2 {
                    basis[(j * nx + c, col)] = 1.0;
                } else {
                    basis[(j * nx + c, col)] = 0.5f64.sqrt();
                    basis[(j * nx + nx - c, col)] = 0.5f64.sqrt();
                }
            }
        }
        let reduced = basis.transpose() * &full * &basis;
        let sym = (&reduced + reduced.transpose()) * 0.5;
        let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().cloned().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(ev[0] < 0.0, "ground state direction is unstable");
        let nearest = ev.iter().cloned().min_by(|a, b| (a - pair.l).abs().partial_cmp(&(b - pair.l).abs()).unwrap()).unwrap();
        assert!((nearest - pair.l).abs() < 1e-8 * pair.l.abs(), "tau = {tau}: {nearest} vs {}", pair.l);
        assert_eq!(nearest, ev[1], "the near-kernel eigenvalue is the second one");
    }
}

#[test]
fn inverse_iteration_and_contraction_agree() {
    let g = StripGrid::standard(0.35, 0.125).unwrap();
    let op = build(&g, cubic(), 0.0);
    let u2 = make_u2(cubic(), 0.0, &g);
    let inv = eigenpair(&op, &u2, 1e-11).unwrap();
    let fix = eigen_contraction(&op, &u2, 1e-12).unwrap();
    assert!((inv.l - fix.l).abs() < 1e-8 * inv.l.abs(), "{} vs {}", inv.l, fix.l);
    assert!(fix.w.dot(&u2).abs() < 1e-10 * u2.norm() * fix.w.norm().max(1e-300));
    let cos = inv.u0.dot(&fix.u0) / (inv.u0.norm() * fix.u0.norm());
    assert!(1.0 - cos < 1e-10);
}

#[test]
fn correction_shrinks_with_delta() {
    let ratio = |delta: f64| {
        let g = StripGrid::standard(delta, 0.125).unwrap();
        let op = build(&g, cubic(), 0.0);
        let u2 = make_u2(cubic(), 0.0, &g);
        let pair = eigenpair(&op, &u2, 1e-11).unwrap();
        pair.w.norm() / u2.norm()
    };
    let (a, b, c) = (ratio(0.45), ratio(0.35), ratio(0.25));
    assert!(a > b && b > c, "{a} {b} {c}");
}

#[test]
fn projected_solves() {
    let g = StripGrid::standard(0.35, 0.125).unwrap();
    let op = build(&g, cubic(), 0.0);
    let pair = eigenpair(&op, &make_u2(cubic(), 0.0, &g), 1e-11).unwrap();
    let u0 = &pair.u0;

    let (zero, _) = op.solve_projected(u0, u0, 1e-12).unwrap();
    assert!(zero.norm() < 1e-10);

    let raw = bump(&g, 0.3, 0.0, 0.4);
    let f = raw.sub(&u0.scaled(raw.dot(u0) / u0.dot(u0)));
    let (a, _) = op.solve_projected(&f, u0, 1e-12).unwrap();
    let (b, _) = op.solve(&f, 1e-12).unwrap();
    assert!(a.dot(u0).abs() <= 1e-10 * a.norm());
    // L maps U₀^⊥ into itself up to the eigen residual
    assert!(a.sub(&b).norm() < 1e-7 * b.norm(), "{}", a.sub(&b).norm() / b.norm());
}

#[test]
fn spectral_table_is_positive_consistent_and_monotone() {
    let deltas = [0.25, 0.3, 0.35, 0.4];
    let rows = spectral_scaling_table(cubic(), &deltas, 0.0, |d| StripGrid::standard(d, 0.125).unwrap()).unwrap();
    for r in &rows {
        assert!(r.l > 0.0 && r.rayleigh_u2 > 0.0);
        assert!((r.l / r.rayleigh_u2 - 1.0).abs() < 0.2, "{r:?}");
    }
    assert!(rows.windows(2).all(|w| w[0].l < w[1].l));
    assert!(rows.windows(2).all(|w| w[0].lu2_norm < w[1].lu2_norm));
}

#[test]
fn eigenvalue_is_even_and_continuous_in_tau() {
    let g = StripGrid::standard(0.35, 0.125).unwrap();
    let l = |tau: f64| {
        let op = build(&g, cubic(), tau);
        eigenpair(&op, &make_u2(cubic(), tau, &g), 1e-11).unwrap().l
    };
    let (l0, lp, lm, lp2) = (l(0.0), l(0.01), l(-0.01), l(0.02));
    assert!((lp - lm).abs() < 1e-9 * l0);
    assert!((lp - l0).abs() < 0.02 * l0);
    // smooth and even: l(τ) − l(0) ∝ τ²
    let ratio = (lp2 - l0) / (lp - l0);
    assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
}

// Wall lift

fn lift_error(ny: usize) -> (f64, f64) {
    let g = StripGrid::unchecked(0.5, 8.0, 128, ny).unwrap();
    let h = g.half_width();
    let op = with_potential(&g, g.from_fn(|x, y| 1.0 + 0.5 * (-x * x - y * y).exp()), 0.0);
    let gx = |x: f64| (-x * x).exp();
    let gxx = |x: f64| (4.0 * x * x - 2.0) * (-x * x).exp();
    // profile with nonzero and unequal wall curvature
    let p = |y: f64| y.cosh() - h.cosh() + 0.5 * (y.sinh() - y * h.sinh() / h);
    let pyy = |y: f64| y.cosh() + 0.5 * y.sinh();
    let u = g.from_fn(|x, y| gx(x) * p(y));
    let exact = g.from_fn(|x, y| -gxx(x) * p(y) - gx(x) * pyy(y) + (1.0 + 0.5 * (-x * x - y * y).exp()) * gx(x) * p(y));
    let top = g.line(Scale::Rescaled, |x| gx(x) * pyy(h));
    let bottom = g.line(Scale::Rescaled, |x| gx(x) * pyy(-h));
    let lift = op.wall_lift(&top, &bottom);
    let lifted = op.apply_lifted(&u, &lift).unwrap();
    let plain = op.apply(&u).unwrap();
    (lifted.sub(&exact).norm() / exact.norm(), plain.sub(&exact).norm() / exact.norm())
}

#[test]
fn wall_lift_restores_accuracy() {
    let (coarse_err, plain) = lift_error(31);
    let (fine_err, _) = lift_error(63);
    assert!(coarse_err < 1e-3, "{coarse_err}");
    assert!(plain > 10.0 * coarse_err, "{plain} vs {coarse_err}");
    assert!(fine_err < coarse_err / 4.0, "{fine_err} vs {coarse_err}");
}

#[test]
fn lift_vanishes_on_walls_with_prescribed_curvature() {
    let g = StripGrid::unchecked(0.5, 8.0, 64, 15).unwrap();
    let op = with_potential(&g, g.from_fn(|_, _| 1.0), 0.0);
    let top = g.line(Scale::Rescaled, |x| (-x * x).exp());
    let bottom = g.line(Scale::Rescaled, |x| 0.5 * (-x * x).exp());
    let lift = op.wall_lift(&top, &bottom);
    let h = g.half_width();
    let s = |y: f64| (y * y * y - h * h * y) / (12.0 * h) + (y * y - h * h) / 4.0;
    let s1 = |y: f64| (3.0 * y * y - h * h) / (12.0 * h) + y / 2.0;
    let s2 = |y: f64| y / (2.0 * h) + 0.5;
    assert!(s(h).abs() < 1e-14 && s(-h).abs() < 1e-14);
    assert!((s2(h) - 1.0).abs() < 1e-15 && s2(-h).abs() < 1e-15);
    for i in 0..g.nx {
        let (a, b) = (top.values[i], bottom.values[i]);
        assert!((lift.trace_top[i] - (a * s1(h) - b * s1(-h))).abs() < 1e-12);
        assert!((lift.trace_bottom[i] - (a * s1(-h) - b * s1(h))).abs() < 1e-12);
    }
}
