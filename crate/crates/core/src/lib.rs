//! Tail asymptotics of the signal-to-interference ratio in cellular network models.
//!
//! Point-process samplers, fading and path-loss models, a Monte Carlo SIR
//! tail estimator, numerical evaluation of the tail constants, and bounds on
//! the circumscribed radius of the typical Voronoi cell.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

/// Implements `Serialize`/`Deserialize` through `Display`/`FromStr`, so models
/// travel through configs as their descriptor strings.
#[macro_export]
#[doc(hidden)]
macro_rules! impl_serde_via_str {
    ($ty:ty) => {
        impl serde::Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> serde::Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = <String as serde::Deserialize>::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

pub mod error;
pub mod acceptance;
pub mod asymptotics;
pub mod fading;
pub mod montecarlo;
pub mod output;
pub mod pathloss;
pub mod pointproc;
pub mod quadrature;
pub mod rng;
pub mod sir;
pub mod vbounds;

pub use error::{Error, Result};
