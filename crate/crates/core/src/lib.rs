//! Entanglement and correlation measures for free fermions on a tight-binding
//! chain driven out of equilibrium by two reservoirs across an impurity.

pub mod asymptotics;
pub mod correlation;
pub mod error;
pub mod harness;
pub mod measures;
pub mod oracles;
pub mod physics;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

/// Double-precision instantiations of the generic types.
pub type LatticeParams64 = physics::LatticeParams<f64>;
pub type ReservoirPair64 = physics::ReservoirPair<f64>;
pub type ScatteringModel64 = physics::ScatteringModel<f64>;
pub type SteadyState64 = correlation::SteadyState<f64>;
pub type CorrelationMatrix64 = correlation::CorrelationMatrix<f64>;
pub type BlockSymbol64 = correlation::BlockSymbol<f64>;
pub type QuadratureSpec64 = quadrature::QuadratureSpec<f64>;
pub type MeasureSpec64 = measures::MeasureSpec<f64>;
pub type MeasureValue64 = measures::MeasureValue<f64>;
pub type BiasContext64 = asymptotics::BiasContext<f64>;
pub type AsymptoticValue64 = asymptotics::AsymptoticValue<f64>;
