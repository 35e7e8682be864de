//! Anderson mixing for a fixed-point map x ↦ G(x).

use nalgebra::{DMatrix, DVector};
use std::collections::VecDeque;

pub struct Anderson {
    depth: usize,
    prev: Option<(Vec<f64>, Vec<f64>)>,
    d_residual: VecDeque<Vec<f64>>,
    d_image: VecDeque<Vec<f64>>,
}

impl Anderson {
    pub fn new(depth: usize) -> Self {
        Anderson { depth, prev: None, d_residual: VecDeque::new(), d_image: VecDeque::new() }
    }

    /// Next iterate from the current point `x` and its image `gx`.
    pub fn next(&mut self, x: Vec<f64>, gx: Vec<f64>) -> Vec<f64> {
        if self.depth == 0 {
            return gx;
        }
        let res: Vec<f64> = gx.iter().zip(&x).map(|(g, x)| g - x).collect();
        if let Some((pr, pg)) = self.prev.take() {
            self.d_residual.push_back(res.iter().zip(&pr).map(|(a, b)| a - b).collect());
            self.d_image.push_back(gx.iter().zip(&pg).map(|(a, b)| a - b).collect());
            if self.d_residual.len() > self.depth {
                self.d_residual.pop_front();
                self.d_image.pop_front();
            }
        }
        self.prev = Some((res.clone(), gx.clone()));
        let m = self.d_residual.len();
        if m == 0 {
            return gx;
        }
        let n = res.len();
        let df = DMatrix::from_fn(n, m, |i, j| self.d_residual[j][i]);
        let coeffs = match df.svd(true, true).solve(&DVector::from_vec(res), 1e-12) {
            Ok(c) => c,
            Err(_) => return gx,
        };
        let mut out = gx;
        for j in 0..m {
            let c = coeffs[j];
            for (o, d) in out.iter_mut().zip(&self.d_image[j]) {
                *o -= c * d;
            }
        }
        out
    }
}
