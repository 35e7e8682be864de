//! Preconditioned MINRES for symmetric (possibly indefinite) systems with a
//! symmetric positive definite preconditioner.

use crate::strip::dot;
use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Debug, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
    pub history: Vec<f64>,
}

#[derive(Debug, Error)]
#[error("Krylov solve stalled after {} iterations at relative residual {:.3e}", .0.iterations, .0.relative_residual)]
pub struct SolveError(pub SolveStats);

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Solve A x = b to relative residual `tol` (true residual, Euclidean norm).
/// Restarts from the current iterate if the recursive estimate and the true
/// residual disagree.
pub fn minres<A, M>(a: A, m: M, b: &[f64], x0: Option<Vec<f64>>, tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveStats), SolveError>
where
    A: Fn(&[f64]) -> Vec<f64>,
    M: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let bn = norm(b);
    let mut x = x0.unwrap_or_else(|| vec![0.0; n]);
    let mut stats = SolveStats { iterations: 0, relative_residual: 0.0, history: vec![] };
    if bn == 0.0 {
        return Ok((vec![0.0; n], stats));
    }
    let mut rounds = 0;
    loop {
        let ax = a(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let rel = norm(&r) / bn;
        stats.relative_residual = rel;
        stats.history.push(rel);
        if rel < tol {
            return Ok((x, stats));
        }
        if stats.iterations >= max_iter || rounds >= 6 {
            return Err(SolveError(stats));
        }
        rounds += 1;
        let budget = max_iter - stats.iterations;
        let (dx, its) = minres_round(&a, &m, &r, 0.2 * tol * bn / norm(&r), budget);
        stats.iterations += its;
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
}

fn minres_round<A, M>(a: &A, m: &M, b: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, usize)
where
    A: Fn(&[f64]) -> Vec<f64>,
    M: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r1 = b.to_vec();
    let mut y = m(&r1);
    let beta1 = dot(&r1, &y).sqrt();
    if beta1 == 0.0 {
        return (x, 0);
    }
    let mut r2 = r1.clone();
    let (mut oldb, mut beta, mut dbar, mut epsln, mut phibar) = (0.0, beta1, 0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0f64, 0.0f64);
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut itn = 0;
    while itn < max_iter {
        itn += 1;
        let s = 1.0 / beta;
        let v: Vec<f64> = y.iter().map(|yi| s * yi).collect();
        y = a(&v);
        if itn >= 2 {
            let c = beta / oldb;
            for (yi, ri) in y.iter_mut().zip(&r1) {
                *yi -= c * ri;
            }
        }
        let alfa = dot(&v, &y);
        let c = alfa / beta;
        for (yi, ri) in y.iter_mut().zip(&r2) {
            *yi -= c * ri;
        }
        r1 = std::mem::replace(&mut r2, y);
        y = m(&r2);
        oldb = beta;
        beta = dot(&r2, &y).max(0.0).sqrt();
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;
        let denom = 1.0 / gamma;
        let w1 = std::mem::replace(&mut w2, std::mem::take(&mut w));
        w = v
            .iter()
            .zip(w1.iter().zip(&w2))
            .map(|(vi, (a1, a2))| (vi - oldeps * a1 - delta * a2) * denom)
            .collect();
        for (xi, wi) in x.iter_mut().zip(&w) {
            *xi += phi * wi;
        }
        if phibar < tol * beta1 || beta == 0.0 {
            break;
        }
    }
    (x, itn)
}
