//! Local tensor Lagrange interpolation on a grid periodic in x₁ and bounded
//! in x₂ (rows include both walls).

const POINTS: usize = 8;

#[derive(Clone, Debug)]
pub struct LocalInterp {
    nx: usize,
    rows: usize,
    x0: f64,
    hx: f64,
    y0: f64,
    hy: f64,
    data: Vec<f64>,
}

fn lagrange(t: f64, w: &mut [f64; POINTS]) {
    for (i, wi) in w.iter_mut().enumerate() {
        let mut p = 1.0;
        for j in 0..POINTS {
            if j != i {
                p *= (t - j as f64) / (i as f64 - j as f64);
            }
        }
        *wi = p;
    }
}

impl LocalInterp {
    /// `data[r*nx + i]` is the value at (x0 + i·hx, y0 + r·hy).
    pub fn new(nx: usize, rows: usize, x0: f64, hx: f64, y0: f64, hy: f64, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), nx * rows);
        assert!(rows >= POINTS && nx >= POINTS);
        LocalInterp { nx, rows, x0, hx, y0, hy, data }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let half = (POINTS / 2 - 1) as f64;
        let sx = (x - self.x0) / self.hx;
        let bx = sx.floor() - half;
        let sy = (y - self.y0) / self.hy;
        let by = (sy.floor() - half).clamp(0.0, (self.rows - POINTS) as f64);
        let mut wx = [0.0; POINTS];
        let mut wy = [0.0; POINTS];
        lagrange(sx - bx, &mut wx);
        lagrange(sy - by, &mut wy);
        let n = self.nx as i64;
        let mut acc = 0.0;
        for (b, wyb) in wy.iter().enumerate() {
            let row = &self.data[(by as usize + b) * self.nx..(by as usize + b + 1) * self.nx];
            let mut s = 0.0;
            for (a, wxa) in wx.iter().enumerate() {
                let i = (bx as i64 + a as i64).rem_euclid(n) as usize;
                s += wxa * row[i];
            }
            acc += wyb * s;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_periodic_function() {
        let (nx, rows) = (64, 40);
        let hx = 2.0 * std::f64::consts::PI / nx as f64;
        let hy = 0.05;
        let f = |x: f64, y: f64| x.sin() * (1.0 + y * y) + (2.0 * x).cos() * y;
        let data = (0..rows).flat_map(|r| (0..nx).map(move |i| f(i as f64 * hx, -1.0 + r as f64 * hy))).collect();
        let it = LocalInterp::new(nx, rows, 0.0, hx, -1.0, hy, data);
        for &(x, y) in &[(0.3, -0.97), (6.2, 0.9), (-0.05, 0.0), (3.0, 0.94)] {
            assert!((it.eval(x, y) - f(x, y)).abs() < 1e-7, "{x} {y}");
        }
    }
}
