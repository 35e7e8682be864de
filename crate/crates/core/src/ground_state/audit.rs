//! Spectrum of −Δ + γ′(U) near zero on a disk, even in x₁.
//!
//! With U radial the operator splits into angular channels cos(nθ), sin(nθ);
//! the even-in-x₁ subspace contains cos(nθ) for even n and sin(nθ) for odd n,
//! so every channel n ≥ 0 appears once. Each channel is a symmetric
//! tridiagonal problem on a cell-centred radial grid with Dirichlet data at
//! the disk edge.

use super::GroundState;
use serde::Serialize;

const CHANNELS: u32 = 5;
const PER_CHANNEL: usize = 3;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChannelEigenvalue {
    pub n: u32,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub disk_radius: f64,
    pub grid_step: f64,
    pub eigenvalues: Vec<ChannelEigenvalue>,
    pub smallest: ChannelEigenvalue,
    pub second: ChannelEigenvalue,
    /// Correlation of the n = 1 ground eigenvector with ∂_{x₂}U.
    pub kernel_correlation: f64,
    /// ‖T·∂_{x₂}U‖ / ‖∂_{x₂}U‖ for the discrete n = 1 channel operator.
    pub kernel_residual: f64,
}

struct Tridiag {
    d: Vec<f64>,
    e: Vec<f64>,
}

impl Tridiag {
    fn count_below(&self, x: f64) -> usize {
        let mut c = 0;
        let mut q = 1.0;
        for i in 0..self.d.len() {
            let off = if i == 0 { 0.0 } else { self.e[i - 1] * self.e[i - 1] };
            q = self.d[i] - x - if i == 0 { 0.0 } else { off / q };
            if q == 0.0 {
                q = 1e-300;
            }
            if q < 0.0 {
                c += 1;
            }
        }
        c
    }

    fn bounds(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.e[i - 1].abs();
            }
            if i + 1 < n {
                r += self.e[i].abs();
            }
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// k-th smallest eigenvalue (k from 0) by Sturm bisection.
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn solve_shifted(&self, mu: f64, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut denom = self.d[0] - mu;
        c[0] = if n > 1 { self.e[0] / denom } else { 0.0 };
        x[0] = b[0] / denom;
        for i in 1..n {
            denom = self.d[i] - mu - self.e[i - 1] * c[i - 1];
            if denom == 0.0 {
                denom = 1e-300;
            }
            if i + 1 < n {
                c[i] = self.e[i] / denom;
            }
            x[i] = (b[i] - self.e[i - 1] * x[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }

    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.d.len();
        let mu = lambda + 1e-10 * lambda.abs().max(1.0);
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..4 {
            let mut w = self.solve_shifted(mu, &v);
            let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            w.iter_mut().for_each(|x| *x /= nrm);
            v = w;
        }
        v
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        (0..n)
            .map(|i| {
                let mut s = self.d[i] * x[i];
                if i > 0 {
                    s += self.e[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.e[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

fn channel(gs: &GroundState, n: u32, radius: f64, h: f64) -> (Tridiag, Vec<f64>) {
    let m = (radius / h).round() as usize;
    let r: Vec<f64> = (1..=m).map(|i| (i as f64 - 0.5) * h).collect();
    let nn = (n * n) as f64;
    let d = (0..m)
        .map(|i| {
            let rp = (i + 1) as f64 * h;
            let rm = i as f64 * h;
            (rp + rm) / (r[i] * h * h) + nn / (r[i] * r[i]) + gs.spec.gamma_prime(gs.radial(r[i])[0])
        })
        .collect();
    let e = (0..m - 1)
        .map(|i| -((i + 1) as f64 * h) / (h * h * (r[i] * r[i + 1]).sqrt()))
        .collect();
    (Tridiag { d, e }, r)
}

pub fn nondegeneracy_audit(gs: &GroundState, disk_radius: f64, grid_step: f64) -> AuditReport {
    assert!(disk_radius >= 15.0, "disk radius must be at least 15");
    let mut all = Vec::new();
    let mut kernel_correlation = 0.0;
    let mut kernel_residual = 0.0;
    for n in 0..CHANNELS {
        let (t, r) = channel(gs, n, disk_radius, grid_step);
        for k in 0..PER_CHANNEL {
            all.push(ChannelEigenvalue { n, value: t.eigenvalue(k) });
        }
        if n == 1 {
            let lam = t.eigenvalue(0);
            let v = t.eigenvector(lam);
            // symmetric scaling carries a factor √r
            let g: Vec<f64> = r.iter().map(|&ri| ri.sqrt() * gs.radial(ri)[1]).collect();
            let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
            kernel_correlation = dot.abs() / gn;
            let tg = t.apply(&g);
            kernel_residual = tg.iter().map(|x| x * x).sum::<f64>().sqrt() / gn;
        }
    }
    let mut sorted = all.clone();
    sorted.sort_by(|a, b| a.value.abs().partial_cmp(&b.value.abs()).unwrap());
    AuditReport {
        disk_radius,
        grid_step,
        smallest: sorted[0],
        second: sorted[1],
        eigenvalues: all,
        kernel_correlation,
        kernel_residual,
    }
}
