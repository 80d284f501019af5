//! Simulator for a Su-Schrieffer-Heeger chain with balanced sublattice gain
//! and loss used as a quantum battery.
//!
//! Every numerical routine is generic over [`Real`]; the aliases below fix the
//! scalar to `f64` (or `f32`) for callers that do not need the generality.

pub mod dynamics;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod matrixcore;
pub mod metrics;
pub mod scalar;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type C64 = C<f64>;
pub type CMatrix64 = matrixcore::CMatrix<f64>;
pub type CMatrix32 = matrixcore::CMatrix<f32>;
pub type CVector64 = matrixcore::CVector<f64>;
pub type CVector32 = matrixcore::CVector<f32>;
pub type EigenSystem64 = matrixcore::EigenSystem<f64>;
pub type LatticeParams64 = hamiltonian::LatticeParams<f64>;
pub type LatticeParams32 = hamiltonian::LatticeParams<f32>;
pub type Battery64 = dynamics::Battery<f64>;
pub type ChargingTrace64 = dynamics::ChargingTrace<f64>;
pub type ChargingMetrics64 = metrics::ChargingMetrics<f64>;
pub type PhaseDiagram64 = spectral::PhaseDiagram<f64>;
pub type SpectralSweep64 = spectral::SpectralSweep<f64>;
