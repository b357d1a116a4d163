//! Configuration-driven sweeps, the verification suite and figure panels.

pub mod config;
pub mod sweep;
pub mod figures;
pub mod verify;
