//! Symbolwise-decodable space-time block codes over quasi-static Rayleigh
//! fading: code construction and class verification, the equivalent real
//! channel, and mutual-information bounds and estimates.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

// `!(x > 0)` style guards are meant to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtin;
pub mod channel;
pub mod error;
pub mod format;
pub mod infotheory;
pub mod montecarlo;
pub mod quadrature;
pub mod scalar;
pub mod stbc;
pub mod verify;

pub use channel::{ChannelRealization, EquivalentChannel, RngSpec};
pub use error::{Error, Result};
pub use infotheory::{ClpodMethod, Normalization, RateParameters, SnrSpec, SymbolRateSolution};
pub use montecarlo::{EstimateWithError, Method};
pub use quadrature::{GammaQuadrature, GaussLaguerre};
pub use scalar::Real;
pub use stbc::{CMatrix, CodeClassReport, DispersionSet, PowerDiagonal, SymbolVector};

pub type DispersionSet64 = DispersionSet<f64>;
pub type SymbolVector64 = SymbolVector<f64>;
pub type ChannelRealization64 = ChannelRealization<f64>;
pub type EquivalentChannel64 = EquivalentChannel<f64>;
pub type GaussLaguerre64 = GaussLaguerre<f64>;
pub type EstimateWithError64 = EstimateWithError<f64>;
pub type SnrSpec64 = SnrSpec<f64>;
