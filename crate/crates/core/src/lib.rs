//! Vortex spike capillary-gravity water waves.

pub mod bessel;
pub mod elliptic;
pub mod ground_state;
pub mod nonlinearity;
pub mod ode;
pub mod strip;
pub mod wave;
