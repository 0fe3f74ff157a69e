//! Shared numerical kernels.

pub mod quadrature;
pub mod rng;
pub mod roots;
pub mod special;

pub use quadrature::{integrate, Interval, QuadratureResult, DEFAULT_ABS_TOL, DEFAULT_REL_TOL};
pub use rng::{make_rng, RandomStream};
pub use roots::find_root;
pub use special::{digamma, log_gamma, trigamma};
