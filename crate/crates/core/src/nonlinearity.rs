//! Vorticity function γ(t) = t − |t|^p t.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    PowerLaw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub family: Family,
    pub p: u32,
}

impl Nonlinearity {
    pub fn power_law(p: u32) -> Self {
        assert!(p >= 1, "exponent must be at least 1");
        Nonlinearity { family: Family::PowerLaw, p }
    }

    #[inline]
    pub fn gamma(&self, t: f64) -> f64 {
        match self.family {
            Family::PowerLaw => t - t.abs().powi(self.p as i32) * t,
        }
    }

    #[inline]
    pub fn gamma_prime(&self, t: f64) -> f64 {
        match self.family {
            Family::PowerLaw => 1.0 - (self.p as f64 + 1.0) * t.abs().powi(self.p as i32),
        }
    }
}

pub fn gamma_eval(spec: Nonlinearity, t: f64) -> f64 {
    spec.gamma(t)
}

pub fn gamma_prime(spec: Nonlinearity, t: f64) -> f64 {
    spec.gamma_prime(t)
}
