//! Faster-than-Nyquist NFDM link simulation.
//!
//! The numerical kernels are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common case.

pub mod channel;
pub mod error;
pub mod grid;
pub mod nft;
pub mod params;
pub mod runner;
pub mod rxdsp;
pub mod scalar;
pub mod txdsp;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type NfdSpectrum64 = txdsp::NfdSpectrum<f64>;
pub type NfdSpectrum32 = txdsp::NfdSpectrum<f32>;
pub type TimeSignal64 = nft::TimeSignal<f64>;
pub type TimeSignal32 = nft::TimeSignal<f32>;
pub type ScatteringData64 = nft::ScatteringData<f64>;
pub type ScatteringData32 = nft::ScatteringData<f32>;
pub type SymbolBlock64 = txdsp::SymbolBlock<f64>;
pub type SymbolBlock32 = txdsp::SymbolBlock<f32>;
pub type IciMatrix64 = rxdsp::IciMatrix<f64>;
pub type IciMatrix32 = rxdsp::IciMatrix<f32>;
pub type LambdaGrid64 = grid::LambdaGrid<f64>;
pub type TimeGrid64 = grid::TimeGrid<f64>;
