//! Adaptive Dormand–Prince 5(4) integrator for small first-order systems.

pub const DIM: usize = 2;
pub type State = [f64; DIM];

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OdeError {
    StepUnderflow { t: f64, h: f64 },
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn step<F: Fn(f64, &State) -> State>(f: &F, t: f64, y: &State, h: f64) -> (State, State) {
    let mut k = [[0.0; DIM]; 7];
    k[0] = f(t, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for d in 0..DIM {
                ys[d] += h * A[s][j] * kj[d];
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; DIM];
    for s in 0..7 {
        for d in 0..DIM {
            y5[d] += h * B5[s] * k[s][d];
            err[d] += h * (B5[s] - B4[s]) * k[s][d];
        }
    }
    (y5, err)
}

/// Integrate from t0 to t1 (t1 > t0). `stop` is checked after every accepted
/// step and ends the integration early when it returns true.
pub fn integrate<F, S>(
    f: &F,
    t0: f64,
    y0: State,
    t1: f64,
    h0: f64,
    tol: Tolerance,
    mut stop: S,
) -> Result<(f64, State, f64), OdeError>
where
    F: Fn(f64, &State) -> State,
    S: FnMut(f64, &State) -> bool,
{
    let mut t = t0;
    let mut y = y0;
    let mut h = h0.min(t1 - t0);
    while t < t1 {
        let last = t + h >= t1;
        let hh = if last { t1 - t } else { h };
        let (yn, err) = step(f, t, &y, hh);
        let mut en = 0.0f64;
        for d in 0..DIM {
            let sc = tol.atol + tol.rtol * y[d].abs().max(yn[d].abs());
            en = en.max((err[d] / sc).abs());
        }
        if en <= 1.0 {
            t = if last { t1 } else { t + hh };
            y = yn;
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h = hh * fac;
            if stop(t, &y) {
                return Ok((t, y, h));
            }
        } else {
            h = hh * (0.9 * en.powf(-0.2)).clamp(0.1, 0.9);
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(OdeError::StepUnderflow { t, h });
            }
        }
    }
    Ok((t, y, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let f = |_t: f64, y: &State| [y[1], -y[0]];
        let tol = Tolerance { rtol: 1e-12, atol: 1e-14 };
        let tp = 2.0 * std::f64::consts::PI;
        let (_, y, _) = integrate(&f, 0.0, [1.0, 0.0], tp, 1e-3, tol, |_, _| false).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10);
    }
}
