//! Configuration, orchestration, persistence and figures for the vortex
//! spike solver.

pub mod config;
pub mod fields;
pub mod run;
pub mod scaling;
pub mod svg;
