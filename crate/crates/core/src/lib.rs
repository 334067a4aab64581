//! Classical capacities of single-mode phase-insensitive Gaussian channels.
//!
//! Covers coherent-state and squeezed-state communication with Gaussian
//! receivers, the general Gaussian protocol and its staged optimization,
//! Holevo quantities, and number-state communication through a pure-loss
//! channel.
//!
//! ```
//! use gausscap::{optimal_gaussian_capacity, ChannelParams, Protocol};
//!
//! let ch = ChannelParams::loss(0.5, 0.0).unwrap();
//! let best = optimal_gaussian_capacity(&ch, 3.0).unwrap();
//! assert_eq!(best.protocol, Protocol::SqueezedHomodyne);
//! assert!((best.bits - 3f64.log2()).abs() < 1e-12);
//! ```

// `!(x >= 0.0)` rejects NaN along with negative values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gaussian;
pub mod general;
pub mod holevo;
pub mod number_state;
pub mod optimize;
pub mod protocols;

pub use error::{Error, Result};
pub use gaussian::{g_entropy, ChannelKind, ChannelParams, Covariance, GaussianState};
pub use general::{
    brute_force_capacity, general_capacity, optimal_encoding_split, optimal_gaussian_capacity,
    optimal_input_squeezing, two_quadrature_optimum_over_s, EncodingSpec, GridSpec,
    MeasurementSpec,
};
pub use holevo::{holevo_bound, holevo_quantity, GaussianEnsemble};
pub use number_state::{
    ba_capacity, number_state_capacity, pure_loss_transition, BaOptions, DiscreteChannel,
    NumberStateCapacity,
};
pub use protocols::{
    coarse_grained_coherent_capacity, coherent_capacity, coherent_single_quadrature_capacity,
    critical_photon_number, optimal_squeezing, squeezed_capacity, CapacityResult, Protocol,
};
