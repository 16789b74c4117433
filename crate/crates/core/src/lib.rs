//! Profit-rate dynamics of a linear production economy under technology
//! diffusion and endogenous real-wage growth.
//!
//! The uniform profit rate is pinned by the Perron root of the augmented
//! input matrix `M = A + b·(1 lᵀ)` through `r = 1/λ − 1`. Technical change
//! lowers `λ`, wage growth raises it, and the balance of the two is governed
//! by the sensitivity `k(t) = (b/λ)·∂λ/∂b`: the profit rate rises exactly
//! when `β·k(t) < 1`.
//!
//! Modules, bottom-up:
//!
//! * [`perron`]: Perron root, Perron vectors and first-order sensitivities.
//! * [`economy`]: technique, wage, prices, viability and the cost criterion.
//! * [`diffusion`]: innovator/follower adoption paths.
//! * [`dynamics`]: the coupled RK4 simulation and effect decomposition.
//! * [`regimes`]: critical elasticities, regime classification, turning point.

pub mod diffusion;
pub mod dynamics;
pub mod economy;
mod error;
mod matrix;
pub mod perron;
pub mod regimes;

pub use error::{Error, Result};
pub use matrix::SquareMatrix;
