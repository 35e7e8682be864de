//! (1/(2α√g)) e^{−(√g/α)|x|} ∗ f on a periodic line by product integration:
//! two exponential recursions, with f replaced on each cell by its local
//! degree-5 interpolant and the cell integrals done by 8-point Gauss rules.

use super::SurfaceField;

const GAUSS_X: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GAUSS_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];
const STENCIL: [i64; 6] = [-2, -1, 0, 1, 2, 3];

fn lagrange(t: f64) -> [f64; 6] {
    let mut w = [1.0; 6];
    for (a, &ka) in STENCIL.iter().enumerate() {
        for &kb in STENCIL.iter() {
            if ka != kb {
                w[a] *= (t - kb as f64) / (ka - kb) as f64;
            }
        }
    }
    w
}

pub fn exp_kernel_convolve(f: &SurfaceField, g: f64, alpha: f64) -> SurfaceField {
    assert!(g > 0.0 && alpha > 0.0);
    let n = f.len();
    let h = f.spacing;
    let c = g.sqrt() / alpha;
    let decay = (-c * h).exp();
    // per Gauss point: cell offset t ∈ (0,1), interpolation weights, and the
    // kernel weights toward the right (J) and left (K) cell ends
    let pts: Vec<([f64; 6], f64, f64)> = (0..8)
        .map(|q| {
            let t = 0.5 * (GAUSS_X[q] + 1.0);
            let w = 0.5 * h * GAUSS_W[q];
            (lagrange(t), w * (-c * h * (1.0 - t)).exp(), w * (-c * h * t).exp())
        })
        .collect();
    let mut jr = vec![0.0; n];
    let mut kl = vec![0.0; n];
    for i in 0..n {
        let local: Vec<f64> = STENCIL.iter().map(|&s| f.values[(i as i64 + s).rem_euclid(n as i64) as usize]).collect();
        for (lw, wj, wk) in &pts {
            let v: f64 = lw.iter().zip(&local).map(|(a, b)| a * b).sum();
            jr[i] += wj * v;
            kl[i] += wk * v;
        }
    }
    let wrap = 1.0 / -(-c * h * n as f64).exp_m1();
    // left-to-right: A_{i+1} = e^{−ch}A_i + J_i
    let mut a = 0.0;
    for &j in &jr {
        a = decay * a + j;
    }
    let mut left = vec![0.0; n];
    left[0] = a * wrap;
    for i in 0..n - 1 {
        left[i + 1] = decay * left[i] + jr[i];
    }
    // right-to-left: B_i = e^{−ch}B_{i+1} + K_i
    let mut b = 0.0;
    for &k in kl.iter().rev() {
        b = decay * b + k;
    }
    let mut right = vec![0.0; n];
    right[0] = b * wrap;
    right[n - 1] = decay * right[0] + kl[n - 1];
    for i in (0..n - 1).rev() {
        right[i] = decay * right[i + 1] + kl[i];
    }
    let scale = 1.0 / (2.0 * alpha * g.sqrt());
    SurfaceField {
        values: left.iter().zip(&right).map(|(l, r)| scale * (l + r)).collect(),
        ..f.clone()
    }
}
