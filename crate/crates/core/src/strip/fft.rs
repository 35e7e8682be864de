//! Cached FFT plans and the row/column transforms used on strip fields.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type Plan = Arc<dyn Fft<f64>>;

fn plans() -> &'static Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Plan>)> {
    static P: OnceLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Plan>)>> = OnceLock::new();
    P.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())))
}

pub fn plan(n: usize, forward: bool) -> Plan {
    let mut guard = plans().lock().unwrap();
    let (planner, cache) = &mut *guard;
    cache
        .entry((n, forward))
        .or_insert_with(|| {
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// Angular wavenumbers of an n-point periodic grid of total length `period`.
/// The Nyquist entry carries +π/h.
pub fn wavenumbers(n: usize, period: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / period;
    (0..n)
        .map(|i| {
            let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            base * m
        })
        .collect()
}

/// Apply a real symbol per wavenumber (even in k) to two real sequences at
/// once: the pair is packed as a + ib, which the real symbol keeps separate.
pub fn real_symbol_pair(a: &mut [f64], b: &mut [f64], symbol: &[f64], buf: &mut Vec<Complex64>) {
    let n = a.len();
    buf.clear();
    buf.extend(a.iter().zip(b.iter()).map(|(&x, &y)| Complex64::new(x, y)));
    plan(n, true).process(buf);
    for (z, s) in buf.iter_mut().zip(symbol) {
        *z *= *s / n as f64;
    }
    plan(n, false).process(buf);
    for i in 0..n {
        a[i] = buf[i].re;
        b[i] = buf[i].im;
    }
}

/// Forward DFT of a real sequence.
pub fn forward(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan(x.len(), true).process(&mut buf);
    buf
}

/// Inverse DFT (normalised) returning the real part.
pub fn inverse_real(mut spec: Vec<Complex64>) -> Vec<f64> {
    let n = spec.len();
    plan(n, false).process(&mut spec);
    spec.iter().map(|z| z.re / n as f64).collect()
}

/// DST-I of two real sequences of length m (packed as a + ib):
/// S_k = Σ_j x_j sin(π (j+1)(k+1)/(m+1)).
pub fn dst1_pair(a: &mut [f64], b: &mut [f64], buf: &mut Vec<Complex64>) {
    let m = a.len();
    let n = 2 * (m + 1);
    buf.clear();
    buf.resize(n, Complex64::new(0.0, 0.0));
    for j in 0..m {
        let z = Complex64::new(a[j], b[j]);
        buf[j + 1] = z;
        buf[n - 1 - j] = -z;
    }
    plan(n, true).process(buf);
    // X_k = −2i S_k
    for k in 0..m {
        let s = buf[k + 1] * Complex64::new(0.0, 0.5);
        a[k] = s.re;
        b[k] = s.im;
    }
}
